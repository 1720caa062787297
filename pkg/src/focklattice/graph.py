"""Fock graphs: Fock states as vertices, allowed single-photon hops as edges.

The graph of N photons in an M-site chain has the same adjacency matrix as
the graph of M-1 photons in an (N+1)-site chain once the vertices are
relabelled. The relabelling comes from the stars-and-bars picture: a state
``(n_1, ..., n_M)`` is the word of ``n_1`` stars, a bar, ``n_2`` stars, ...,
and exchanging the two symbols turns it into a state of M-1 photons in N+1
modes.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .fock import DEFAULT_CAP, FockState, check_state, enumerate_basis, occupation_label
from .lattice import LatticeSpec, build_hamiltonian

ORIENTATIONS = ("reversed", "direct")


class DisconnectedStatesError(ValidationError):
    """No path joins the two requested states."""


@dataclass(frozen=True)
class GraphNode:
    nu: int
    K: int
    occupations: FockState
    layer: int


@dataclass(frozen=True, eq=False)
class FockGraph:
    """Undirected Fock graph; ``edges`` are ``(mu, nu, |H_mu_nu|)`` with ``mu < nu`` (1-based)."""

    N: int
    M: int
    nodes: tuple[GraphNode, ...]
    edges: tuple[tuple[int, int, float], ...]
    adjacency: np.ndarray

    def degree(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def neighbours(self, nu: int) -> list[int]:
        return (np.flatnonzero(self.adjacency[nu - 1]) + 1).tolist()

    def nu(self, state: Sequence[int]) -> int:
        return enumerate_basis(self.N, self.M, None).nu(check_state(state, self.N, self.M))


def build_graph(N: int, spec: LatticeSpec, cap: int | None = DEFAULT_CAP) -> FockGraph:
    """Fock graph of the effective Hamiltonian of identical (``beta = 0``) waveguides.

    An edge joins ``mu != nu`` whenever ``|H_mu_nu|`` exceeds ``1e-12 max|H|``.
    The layer of a node is the occupation of the last mode.
    """
    if np.any(spec.beta != 0.0):
        raise ValidationError("Fock graphs are built from identical waveguides; set every beta to 0")
    H = build_hamiltonian(N, spec, cap)
    n_f = H.dim
    off = H.off_diagonal()
    scale = max((abs(v) for _, _, v in off), default=0.0)
    eps = 1e-12 * scale
    adjacency = np.zeros((n_f, n_f), dtype=bool)
    edges = []
    for mu, nu, v in off:
        if abs(v) > eps:
            adjacency[mu - 1, nu - 1] = True
            if mu < nu:
                edges.append((mu, nu, abs(v)))
    nodes = tuple(GraphNode(nu, K, s, s[-1]) for nu, K, s in H.basis.entries())
    adjacency.setflags(write=False)
    return FockGraph(N=N, M=spec.M, nodes=nodes, edges=tuple(sorted(edges)), adjacency=adjacency)


def chain_graph(N: int, M: int, cap: int | None = DEFAULT_CAP) -> FockGraph:
    """Fock graph of a uniform unit-coupling chain (topology only)."""
    return build_graph(N, LatticeSpec.uniform_chain(M), cap)


def stars_and_bars(state: Sequence[int]) -> str:
    """``(2, 0, 1)`` -> ``'**||*'``."""
    return "|".join("*" * n for n in state)


def from_stars_and_bars(word: str) -> FockState:
    return tuple(len(run) for run in word.split("|"))


def conjugate_state(state: Sequence[int], orientation: str = "reversed") -> FockState:
    """Exchange stars and bars of ``state``; ``'reversed'`` also reads the word backwards."""
    if orientation not in ORIENTATIONS:
        raise ValidationError(f"orientation must be one of {ORIENTATIONS}, got {orientation!r}")
    word = stars_and_bars(state).translate(str.maketrans("*|", "|*"))
    if orientation == "reversed":
        word = word[::-1]
    return from_stars_and_bars(word)


@dataclass(frozen=True)
class StateBijection:
    """Relabelling between the (N, M) and (M-1, N+1) Fock bases.

    ``mapping[nu - 1]`` is the target basis index of source state ``nu``.
    """

    source: tuple[int, int]
    target: tuple[int, int]
    orientation: str
    mapping: tuple[int, ...]


def conjugate_bijection(N: int, M: int, orientation: str = "reversed", cap: int | None = DEFAULT_CAP) -> StateBijection:
    if M < 2:
        raise ValidationError(f"the conjugate of an M={M} space would have no photons; need M >= 2")
    source = enumerate_basis(N, M, cap)
    target = enumerate_basis(M - 1, N + 1, cap)
    mapping = tuple(target.nu(conjugate_state(s, orientation)) for s in source.states)
    if sorted(mapping) != list(range(1, len(target) + 1)):
        raise AssertionError("stars-and-bars conjugation is not a bijection")
    return StateBijection(source=(N, M), target=(M - 1, N + 1), orientation=orientation, mapping=mapping)


@dataclass(frozen=True)
class IsomorphismReport:
    source: tuple[int, int]
    target: tuple[int, int]
    isomorphic: bool
    orientation: str | None
    permutation: tuple[int, ...] | None
    matches: dict

    def to_dict(self) -> dict:
        return {
            "source": {"photons": self.source[0], "modes": self.source[1]},
            "target": {"photons": self.target[0], "modes": self.target[1]},
            "isomorphic": self.isomorphic,
            "orientation": self.orientation,
            "permutation": list(self.permutation) if self.permutation is not None else None,
            "matches": dict(self.matches),
        }


def relabels(A_source: np.ndarray, A_target: np.ndarray, mapping: Sequence[int]) -> bool:
    """True if ``A_source[mu, nu] == A_target[p(mu), p(nu)]`` for the 1-based map ``p``."""
    p = np.asarray(mapping) - 1
    return A_source.shape == A_target.shape and np.array_equal(A_source, A_target[np.ix_(p, p)])


def verify_isomorphism(N: int, M: int, cap: int | None = DEFAULT_CAP) -> IsomorphismReport:
    """Check that the conjugation maps the (M-1, N+1) chain graph onto the (N, M) one.

    Both orientations of the conjugation are tried; the report keeps the
    first that works, in the order of :data:`ORIENTATIONS`, and records the
    outcome of each.
    """
    A = chain_graph(N, M, cap).adjacency
    B = chain_graph(M - 1, N + 1, cap).adjacency
    matches, perms = {}, {}
    for orientation in ORIENTATIONS:
        bij = conjugate_bijection(N, M, orientation, cap)
        perms[orientation] = bij.mapping
        matches[orientation] = relabels(A, B, bij.mapping)
    chosen = next((o for o in ORIENTATIONS if matches[o]), None)
    return IsomorphismReport(
        source=(N, M),
        target=(M - 1, N + 1),
        isomorphic=chosen is not None,
        orientation=chosen,
        permutation=perms[chosen] if chosen else None,
        matches=matches,
    )


def graph_distance(graph: FockGraph, source: Sequence[int], target: Sequence[int]) -> int:
    """Number of single-photon hops on a shortest path between two states (BFS)."""
    start, goal = graph.nu(source) - 1, graph.nu(target) - 1
    dist = np.full(len(graph.nodes), -1)
    dist[start] = 0
    queue = deque([start])
    while queue:
        p = queue.popleft()
        if p == goal:
            return int(dist[p])
        for q in np.flatnonzero(graph.adjacency[p]):
            if dist[q] < 0:
                dist[q] = dist[p] + 1
                queue.append(q)
    raise DisconnectedStatesError(f"no path from {tuple(source)} to {tuple(target)}")


def _fmt(x: float) -> str:
    return repr(float(x))


def export_graph(graph: FockGraph, fmt: str = "dot") -> str:
    """Serialize a Fock graph to Graphviz DOT or JSON; nodes in K order, edges sorted."""
    if fmt == "dot":
        lines = [f"graph fock_N{graph.N}_M{graph.M} {{"]
        for n in graph.nodes:
            lines.append(
                f'  K{n.K} [label="{occupation_label(n.occupations)}", nu={n.nu}, K={n.K}, layer={n.layer}];'
            )
        for mu, nu, w in graph.edges:
            lines.append(f"  K{graph.nodes[mu - 1].K} -- K{graph.nodes[nu - 1].K} [weight={_fmt(w)}];")
        lines.append("}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        doc = {
            "photons": graph.N,
            "modes": graph.M,
            "nodes": [
                {"nu": n.nu, "K": n.K, "occupations": list(n.occupations), "layer": n.layer} for n in graph.nodes
            ],
            "edges": [{"u": mu, "v": nu, "weight": w} for mu, nu, w in graph.edges],
        }
        return json.dumps(doc, indent=2) + "\n"
    raise ValidationError(f"unknown graph format {fmt!r}; use 'dot' or 'json'")
