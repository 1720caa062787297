"""One test per acceptance criterion, evaluated at the contract tolerances.

A per-criterion PASS/FAIL table is printed in the terminal summary.
"""

import json
import math

import numpy as np
import pytest

from focklattice.cli import main
from focklattice.errors import CapacityError
from focklattice.evolution import (
    DARK_STATE_SPEC,
    StateVector,
    dark_state,
    dark_state_trace,
    evolve,
)
from focklattice.fock import dimension, enumerate_basis, exchange_energy, max_key
from focklattice.graph import chain_graph, conjugate_bijection, graph_distance, verify_isomorphism
from focklattice.lattice import LatticeSpec, build_hamiltonian
from focklattice.spectral import direct_diagonalize, multi_photon_eigensystem

from oracles import brute_states, expm_propagate

R2 = math.sqrt(2)
S = 1 / R2


def criterion(key, title):
    def mark(fn):
        fn.criterion = (key, title)
        return fn

    return mark


def random_spec(rng, M):
    k = np.triu(rng.uniform(-1.5, 1.5, (M, M)) * (rng.random((M, M)) < 0.7), 1)
    return LatticeSpec(rng.uniform(-2, 2, M), k + k.T)


@criterion("AC1", "pseudo-energy spectrum of (2,3)")
def test_ac1_pseudo_energies():
    assert enumerate_basis(2, 3).keys == (2, 4, 6, 10, 12, 18)


@criterion("AC2", "dimension law for N+M <= 12")
def test_ac2_dimension_law():
    checked = 0
    for N in range(1, 12):
        for M in range(1, 13 - N):
            assert dimension(N, M) == len(brute_states(N, M)) == len(enumerate_basis(N, M))
            checked += 1
    assert checked == 66


@criterion("AC3", "two-photon trimer Hamiltonians")
def test_ac3_effective_hamiltonian():
    unit = np.array(
        [
            [0, R2, 0, 0, 0, 0],
            [R2, 0, R2, 1, 0, 0],
            [0, R2, 0, 0, R2, 0],
            [0, 1, 0, 0, 1, 0],
            [0, 0, R2, 1, 0, R2],
            [0, 0, 0, 0, R2, 0],
        ]
    )
    dark = np.array(
        [
            [0, 1, 0, 0, 0, 0],
            [1, 0, 1, S, 0, 0],
            [0, 1, 0, 0, 1, 0],
            [0, S, 0, 0, S, 0],
            [0, 0, 1, S, 0, 1],
            [0, 0, 0, 0, 1, 0],
        ]
    )
    assert np.max(np.abs(build_hamiltonian(2, LatticeSpec.uniform_chain(3)).dense() - unit)) <= 1e-12
    assert np.max(np.abs(build_hamiltonian(2, LatticeSpec.chain([S, S])).dense() - dark)) <= 1e-12


@criterion("AC4", "dark state spectrum, stationarity and revival")
def test_ac4_dark_state():
    H = build_hamiltonian(2, DARK_STATE_SPEC)
    expected = [-2, -1, 0, 0, 1, 2]
    assert np.max(np.abs(direct_diagonalize(H)[0] - expected)) <= 1e-9
    eig = multi_photon_eigensystem(2, DARK_STATE_SPEC)
    assert np.max(np.abs(eig.sorted_spectrum() - expected)) <= 1e-9
    z = np.linspace(0, 4 * math.pi, 400)
    tr = dark_state_trace(z)
    assert np.max(tr.column((0, 2, 0))) <= 1e-10
    assert np.max(np.abs(tr.column((2, 0, 0)) - (1 + np.cos(z)) / 4)) <= 1e-9
    psi0 = dark_state()
    assert abs(psi0.overlap(evolve(psi0, 2 * math.pi, eig))) >= 1 - 1e-9


@criterion("AC5", "Hong-Ou-Mandel suppression")
def test_ac5_hom():
    eig = multi_photon_eigensystem(2, LatticeSpec.uniform_chain(2))
    psi = evolve(StateVector.from_fock(eig.basis, (1, 1)), math.pi / 4, eig)
    assert abs(psi.amplitude((1, 1))) ** 2 <= 1e-9


@criterion("AC6", "Bloch revival and two-mode equal spacing")
def test_ac6_bloch():
    eig = multi_photon_eigensystem(10, LatticeSpec.chain([1.0], [0.0, 4.0]))
    psi0 = StateVector.from_fock(eig.basis, (5, 5))
    assert abs(psi0.overlap(evolve(psi0, 2 * math.pi / math.sqrt(20), eig))) >= 1 - 1e-8
    rng = np.random.default_rng(6)
    for N in range(1, 11):
        b1, b2 = rng.uniform(-2, 2, 2)
        k = rng.uniform(0.2, 2)
        w, _ = direct_diagonalize(build_hamiltonian(N, LatticeSpec.chain([k], [b1, b2])))
        assert np.max(np.abs(np.diff(w) - math.sqrt((b1 - b2) ** 2 + 4 * k**2))) <= 1e-9


@criterion("AC7", "product vs direct spectra for N+M <= 9")
def test_ac7_spectral_equivalence():
    rng = np.random.default_rng(7)
    for N in range(1, 9):
        for M in range(1, 10 - N):
            for _ in range(10):
                spec = random_spec(rng, M)
                H = build_hamiltonian(N, spec)
                eig = multi_photon_eigensystem(N, spec)
                direct, _ = direct_diagonalize(H)
                assert np.max(np.abs(eig.sorted_spectrum() - direct)) <= 1e-8
                assert np.max(eig.residuals(H)) <= 1e-8 * np.linalg.norm(H.dense(), 2)


def _partner_pairs(limit=252):
    pairs = []
    for M in range(2, limit + 2):
        for N in range(1, limit + 1):
            if math.comb(N + M - 1, N) > limit:
                break
            pairs.append((N, M))
    return pairs


@criterion("AC8", "graph isomorphism for partner dimensions <= 252")
def test_ac8_isomorphism():
    representable, unrepresentable = [], []
    for N, M in _partner_pairs():
        ok = max_key(N, M) < 2**63 and max_key(M - 1, N + 1) < 2**63
        (representable if ok else unrepresentable).append((N, M))
    for N, M in representable:
        assert verify_isomorphism(N, M).isomorphic, (N, M)
    # pairs beyond 64-bit keys are refused by design; all are single-photon path graphs
    assert all(N == 1 or M == 2 for N, M in unrepresentable)
    for N, M in unrepresentable[:3]:
        with pytest.raises(CapacityError):
            verify_isomorphism(N, M)
    report = verify_isomorphism(3, 3)
    assert report.isomorphic and report.orientation == "reversed"
    assert report.permutation == (1, 2, 4, 7, 3, 5, 8, 6, 9, 10)
    assert conjugate_bijection(3, 3).mapping == report.permutation


@criterion("AC9", "selection rules and graph distance")
def test_ac9_selection_rules():
    rng = np.random.default_rng(9)
    for N in range(1, 10):
        for M in range(1, 11 - N):
            spec = random_spec(rng, M)
            H = build_hamiltonian(N, spec)
            allowed = {abs(exchange_energy(i, j, N).delta) for i, j, _ in spec.couplings()}
            keys = H.basis.keys
            for mu, nu, _ in H.off_diagonal():
                assert abs(keys[mu - 1] - keys[nu - 1]) in allowed
    assert graph_distance(chain_graph(2, 3), (2, 0, 0), (0, 0, 2)) == 4


@criterion("AC10", "unitarity and matrix-exponential oracle")
def test_ac10_unitarity_and_oracle():
    rng = np.random.default_rng(10)
    sizes = [(N, M) for N in range(1, 10) for M in range(2, 10) if dimension(N, M, None) <= 100]
    for case in range(50):
        N, M = sizes[rng.integers(len(sizes))]
        spec = random_spec(rng, M)
        eig = multi_photon_eigensystem(N, spec)
        v = rng.normal(size=len(eig.basis)) + 1j * rng.normal(size=len(eig.basis))
        psi0 = StateVector(eig.basis, v / np.linalg.norm(v))
        z = rng.uniform(0, 15)
        psi = evolve(psi0, z, eig)
        assert abs(psi.norm() - 1) <= 1e-12
        ref = expm_propagate(build_hamiltonian(N, spec).dense(), psi0.amplitudes, z)
        assert np.max(np.abs(psi.amplitudes - ref)) <= 1e-9


@criterion("AC11", "benchmark integrity at (4,6)")
def test_ac11_benchmark(capsys):
    assert main(["bench", "-N", "4", "-M", "6"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["dimension"] == 126
    assert doc["spectrum_max_abs_diff"] <= 1e-8
    assert doc["product_seconds"] > 0 and doc["direct_seconds"] > 0
