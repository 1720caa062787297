import json
import math

import networkx as nx
import numpy as np
import pytest

from focklattice.errors import ValidationError
from focklattice.fock import enumerate_basis
from focklattice.lattice import LatticeSpec, build_hamiltonian
from focklattice.graph import (
    DisconnectedStatesError,
    build_graph,
    chain_graph,
    conjugate_bijection,
    conjugate_state,
    export_graph,
    from_stars_and_bars,
    graph_distance,
    relabels,
    stars_and_bars,
    verify_isomorphism,
)

from oracles import brute_states, hop_graph_edges

# reference relabelling: nu-ordered image of the (3,3) basis in the (2,4) basis
REFERENCE_PERMUTATION = (1, 2, 4, 7, 3, 5, 8, 6, 9, 10)


def to_nx(graph):
    g = nx.Graph()
    g.add_nodes_from(range(1, len(graph.nodes) + 1))
    g.add_edges_from((mu, nu) for mu, nu, _ in graph.edges)
    return g


class TestBuildGraph:
    def test_two_photon_trimer(self):
        g = chain_graph(2, 3)
        assert len(g.nodes) == 6
        # six edges: the |110>-|101>-|011> moves plus the four edges touching a doubly occupied mode
        assert len(g.edges) == 6
        assert {(a - 1, b - 1) for a, b, _ in g.edges} == hop_graph_edges(brute_states(2, 3))

    @pytest.mark.parametrize("M", range(2, 9))
    def test_single_photon_is_path(self, M):
        g = chain_graph(1, M)
        assert [(a, b) for a, b, _ in g.edges] == [(m, m + 1) for m in range(1, M)]

    def test_partner_edge_counts(self):
        a, b = chain_graph(3, 3), chain_graph(2, 4)
        assert len(a.nodes) == len(b.nodes) == 10
        assert len(a.edges) == len(b.edges) == len(hop_graph_edges(brute_states(3, 3)))

    @pytest.mark.parametrize("N, M", [(2, 4), (3, 3), (4, 3), (2, 6), (5, 2), (3, 5)])
    def test_matches_brute_force_moves(self, N, M):
        g = chain_graph(N, M)
        assert {(a - 1, b - 1) for a, b, _ in g.edges} == hop_graph_edges(brute_states(N, M))

    def test_weights_are_abs_hamiltonian(self):
        spec = LatticeSpec.chain([-0.5, 2.0, 1.0])
        g = build_graph(2, spec)
        dense = build_hamiltonian(2, spec).dense()
        for a, b, w in g.edges:
            assert w == abs(dense[a - 1, b - 1])

    def test_adjacency_matches_hamiltonian(self):
        rng = np.random.default_rng(2)
        for N, M in [(2, 3), (3, 4), (2, 5), (4, 3)]:
            k = np.triu(rng.uniform(-1, 1, (M, M)) * (rng.random((M, M)) < 0.6), 1)
            spec = LatticeSpec(np.zeros(M), k + k.T)
            g = build_graph(N, spec)
            dense = build_hamiltonian(N, spec).dense()
            eps = 1e-12 * np.max(np.abs(dense))
            expected = (np.abs(dense) > eps) & ~np.eye(len(dense), dtype=bool)
            np.testing.assert_array_equal(g.adjacency, expected)
            assert np.array_equal(g.adjacency, g.adjacency.T)
            edges = {(a, b) for a, b, _ in g.edges}
            assert edges == {(a + 1, b + 1) for a, b in zip(*np.nonzero(np.triu(g.adjacency)))}

    def test_tiny_couplings_below_threshold_drop(self):
        g = build_graph(1, LatticeSpec.chain([1.0, 1e-14]))
        assert [(a, b) for a, b, _ in g.edges] == [(1, 2)]

    def test_rejects_detuned_guides(self):
        with pytest.raises(ValidationError):
            build_graph(2, LatticeSpec.chain([1.0, 1.0], [0.0, 0.1, 0.0]))

    @pytest.mark.parametrize("N, M", [(N, M) for N in range(1, 7) for M in range(2, 10 - N)])
    def test_degree_bound(self, N, M):
        assert chain_graph(N, M).degree().max() <= 2 * (M - 1)

    def test_layers(self):
        g = chain_graph(3, 4)
        assert {n.layer for n in g.nodes} == {0, 1, 2, 3}
        assert all(n.layer == n.occupations[-1] for n in g.nodes)

    @pytest.mark.parametrize("N, M", [(N, M) for N in range(1, 6) for M in range(3, 9 - N)])
    def test_sub_layer_structure(self, N, M):
        g = chain_graph(N, M)
        for l in range(N):
            idx = [n.nu - 1 for n in g.nodes if n.layer == l]
            sub = g.adjacency[np.ix_(idx, idx)]
            small = chain_graph(N - l, M - 1)
            # dropping the last occupation is the relabelling
            mapping = [small.nu(g.nodes[p].occupations[:-1]) for p in idx]
            assert relabels(sub, small.adjacency, mapping)
        top = [n for n in g.nodes if n.layer == N]
        assert len(top) == 1


class TestConjugation:
    def test_stars_and_bars_round_trip(self):
        assert stars_and_bars((2, 0, 1)) == "**||*"
        assert from_stars_and_bars("**||*") == (2, 0, 1)
        for s in enumerate_basis(3, 4).states:
            assert from_stars_and_bars(stars_and_bars(s)) == s

    def test_conjugate_state(self):
        # '**||*' -> '||**|' -> (0, 0, 2, 0); reversed reading gives (0, 2, 0, 0)
        assert conjugate_state((2, 0, 1), "direct") == (0, 0, 2, 0)
        assert conjugate_state((2, 0, 1), "reversed") == (0, 2, 0, 0)
        with pytest.raises(ValidationError):
            conjugate_state((1, 0), "sideways")

    def test_conjugation_is_involutive(self):
        for o in ("direct", "reversed"):
            for s in enumerate_basis(2, 4).states:
                assert conjugate_state(conjugate_state(s, o), o) == s

    def test_reference_permutation(self):
        bij = conjugate_bijection(3, 3)
        assert bij.orientation == "reversed"
        assert bij.source == (3, 3) and bij.target == (2, 4)
        assert bij.mapping == REFERENCE_PERMUTATION

    def test_inverse_direction_gives_inverse(self):
        fwd = conjugate_bijection(3, 3).mapping
        back = conjugate_bijection(2, 4).mapping
        assert all(back[fwd[i] - 1] == i + 1 for i in range(10))

    def test_self_dual_pair_is_identity(self):
        assert conjugate_bijection(1, 2).mapping == (1, 2)

    def test_self_paired_automorphism(self):
        A = chain_graph(2, 3).adjacency
        for o in ("reversed", "direct"):
            bij = conjugate_bijection(2, 3, o)
            assert bij.target == (2, 3)
            assert relabels(A, A, bij.mapping)
        assert conjugate_bijection(2, 3).mapping != tuple(range(1, 7))

    def test_requires_two_modes(self):
        with pytest.raises(ValidationError):
            conjugate_bijection(3, 1)


class TestIsomorphism:
    def test_smallest_pair(self):
        r = verify_isomorphism(2, 4)
        assert r.isomorphic and r.target == (3, 3)
        assert len(r.permutation) == 10
        assert r.matches == {"reversed": True, "direct": True}
        d = r.to_dict()
        assert d["target"] == {"photons": 3, "modes": 3} and d["isomorphic"] is True

    @pytest.mark.parametrize("N, M", [(N, M) for N in range(1, 9) for M in range(2, 11 - N)])
    def test_sweep(self, N, M):
        assert verify_isomorphism(N, M).isomorphic

    @pytest.mark.parametrize("N, M", [(2, 4), (3, 4), (2, 5), (4, 3), (3, 5)])
    def test_agrees_with_networkx(self, N, M):
        a, b = chain_graph(N, M), chain_graph(M - 1, N + 1)
        assert nx.is_isomorphic(to_nx(a), to_nx(b))
        r = verify_isomorphism(N, M)
        relabel = {nu: r.permutation[nu - 1] for nu in range(1, len(a.nodes) + 1)}
        assert set(map(frozenset, nx.relabel_nodes(to_nx(a), relabel).edges())) == set(map(frozenset, to_nx(b).edges()))

    @pytest.mark.parametrize("M", range(2, 8))
    def test_paths_both_ways(self, M):
        a, b = chain_graph(1, M), chain_graph(M - 1, 2)
        assert len(a.edges) == len(b.edges) == M - 1
        assert verify_isomorphism(1, M).isomorphic

    def test_non_partner_graphs_differ(self):
        # same dimension 10, different topology
        assert not nx.is_isomorphic(to_nx(chain_graph(3, 3)), to_nx(chain_graph(1, 10)))
        A = chain_graph(3, 3).adjacency
        assert not relabels(A, chain_graph(1, 10).adjacency, range(1, 11))


class TestDistance:
    def test_examples(self):
        g = chain_graph(2, 3)
        assert graph_distance(g, (2, 0, 0), (0, 0, 2)) == 4
        assert graph_distance(g, (2, 0, 0), (1, 0, 1)) == 2
        assert graph_distance(g, (1, 1, 0), (1, 1, 0)) == 0

    def test_symmetry_and_networkx(self):
        g = chain_graph(3, 4)
        lengths = dict(nx.all_pairs_shortest_path_length(to_nx(g)))
        states = [n.occupations for n in g.nodes]
        for a in states[::3]:
            for b in states[::2]:
                d = graph_distance(g, a, b)
                assert d == graph_distance(g, b, a) == lengths[g.nu(a)][g.nu(b)]

    def test_disconnected(self):
        g = build_graph(2, LatticeSpec.chain([1.0, 0.0]))
        with pytest.raises(DisconnectedStatesError):
            graph_distance(g, (2, 0, 0), (0, 0, 2))

    def test_unknown_state(self):
        with pytest.raises(ValidationError):
            graph_distance(chain_graph(2, 3), (2, 0, 0), (3, 0, 0))


class TestExport:
    def test_dot(self):
        text = export_graph(chain_graph(1, 3), "dot")
        assert text == export_graph(chain_graph(1, 3), "dot")
        assert text.splitlines() == [
            "graph fock_N1_M3 {",
            '  K1 [label="1-0-0", nu=1, K=1, layer=0];',
            '  K2 [label="0-1-0", nu=2, K=2, layer=0];',
            '  K4 [label="0-0-1", nu=3, K=4, layer=1];',
            "  K1 -- K2 [weight=1.0];",
            "  K2 -- K4 [weight=1.0];",
            "}",
        ]

    def test_json(self):
        doc = json.loads(export_graph(chain_graph(2, 3), "json"))
        assert (doc["photons"], doc["modes"]) == (2, 3)
        assert [n["K"] for n in doc["nodes"]] == [2, 4, 6, 10, 12, 18]
        assert doc["nodes"][3] == {"nu": 4, "K": 10, "occupations": [1, 0, 1], "layer": 1}
        assert len(doc["edges"]) == 6
        assert [(e["u"], e["v"]) for e in doc["edges"]] == sorted((e["u"], e["v"]) for e in doc["edges"])
        assert doc["edges"][0] == {"u": 1, "v": 2, "weight": pytest.approx(math.sqrt(2))}

    def test_unknown_format(self):
        with pytest.raises(ValidationError):
            export_graph(chain_graph(1, 2), "gml")
