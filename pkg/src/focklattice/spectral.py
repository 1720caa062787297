"""N-photon eigensystems built from single-particle modes.

Every N-photon eigenstate of a linear array is a product of single-particle
eigenmode creation operators applied to the vacuum, and its eigenvalue is
the occupation-weighted sum of single-particle eigenvalues. The product
construction below never forms the N-photon Hamiltonian;
:func:`direct_diagonalize` does, and serves as the reference.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .errors import ComputationError, ValidationError
from .fock import DEFAULT_CAP, Basis, FockState, enumerate_basis
from .lattice import EffectiveHamiltonian, LatticeSpec, build_hamiltonian

SIGN_TOL = 1e-10


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so that the first non-negligible component is positive."""
    vectors = np.array(vectors, dtype=float, copy=True)
    for n in range(vectors.shape[1]):
        col = vectors[:, n]
        scale = np.max(np.abs(col))
        if scale == 0.0:
            continue
        first = np.flatnonzero(np.abs(col) > SIGN_TOL * scale)[0]
        if col[first] < 0:
            vectors[:, n] = -col
    return vectors


def _eigh(matrix: np.ndarray, what: str) -> tuple[np.ndarray, np.ndarray]:
    try:
        w, v = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise ComputationError(f"symmetric eigensolver failed for {what}: {exc}") from exc
    return w, fix_signs(v)


@dataclass(frozen=True, eq=False)
class SingleParticleEigensystem:
    """Ascending ``lambdas`` and orthonormal columns ``vectors[:, n]`` (the modes u^(n))."""

    lambdas: np.ndarray
    vectors: np.ndarray

    @property
    def M(self) -> int:
        return self.lambdas.size


def single_particle_eigensystem(spec: LatticeSpec) -> SingleParticleEigensystem:
    w, v = _eigh(spec.single_particle_matrix(), repr(spec))
    return SingleParticleEigensystem(lambdas=w, vectors=v)


class _ProductExpander:
    """Expands products of eigenmode creation operators over Fock states.

    A partial product with fewer than N photons is stored as integer keys in
    base N+1 plus amplitudes, so creating a photon in mode k adds
    ``(N+1)^(k-1)`` to every key. Products are built mode by mode and partial
    results are shared between occupation patterns with a common prefix.
    """

    def __init__(self, eig: SingleParticleEigensystem, basis: Basis):
        if eig.M != basis.M:
            raise ValidationError(f"eigensystem has {eig.M} modes, basis has {basis.M}")
        self.eig = eig
        self.basis = basis
        self.base = basis.N + 1
        self.weights = self.base ** np.arange(basis.M, dtype=np.int64)
        self.basis_keys = np.asarray(basis.keys, dtype=np.int64)
        self._cache: dict[FockState, tuple[np.ndarray, np.ndarray]] = {
            (): (np.zeros(1, dtype=np.int64), np.ones(1))
        }

    def _create(self, keys: np.ndarray, amps: np.ndarray, mode: int) -> tuple[np.ndarray, np.ndarray]:
        u = self.eig.vectors[:, mode]
        nz = np.flatnonzero(u)
        w = self.weights[nz]
        occupied = (keys[:, None] // w[None, :]) % self.base
        new_keys = (keys[:, None] + w[None, :]).ravel()
        new_amps = (amps[:, None] * u[nz][None, :] * np.sqrt(occupied + 1.0)).ravel()
        keys, inverse = np.unique(new_keys, return_inverse=True)
        return keys, np.bincount(inverse.ravel(), weights=new_amps, minlength=keys.size)

    def _partial(self, prefix: FockState) -> tuple[np.ndarray, np.ndarray]:
        hit = self._cache.get(prefix)
        if hit is not None:
            return hit
        keys, amps = self._partial(prefix[:-1])
        mode = len(prefix) - 1
        for _ in range(prefix[-1]):
            keys, amps = self._create(keys, amps, mode)
        self._cache[prefix] = (keys, amps)
        return keys, amps

    def expand(self, occupations: Sequence[int]) -> np.ndarray:
        occ = tuple(int(n) for n in occupations)
        if len(occ) != self.basis.M or any(n < 0 for n in occ) or sum(occ) != self.basis.N:
            raise ValidationError(
                f"mode occupations {occ} do not describe {self.basis.N} photons in {self.basis.M} modes"
            )
        # drop trailing empty modes so shorter prefixes are reused
        last = max(m for m, n in enumerate(occ) if n > 0)
        keys, amps = self._partial(occ[: last + 1])
        pos = np.searchsorted(self.basis_keys, keys)
        if np.any(pos >= self.basis_keys.size) or np.any(self.basis_keys[np.minimum(pos, self.basis_keys.size - 1)] != keys):
            raise ComputationError("product expansion left the N-photon basis")
        coeffs = np.zeros(len(self.basis))
        coeffs[pos] = amps
        norm = np.linalg.norm(coeffs)
        if not norm > 0.0:
            raise ComputationError(f"product state for occupations {occ} vanished")
        return coeffs / norm


def expand_product(occupations: Sequence[int], eig: SingleParticleEigensystem, basis: Basis) -> np.ndarray:
    """Normalized Fock-basis coefficients of ``prod_m (phi_m^+)^{n_m} |0>``.

    Args:
        occupations: photons per single-particle eigenmode, summing to ``basis.N``
        eig: single-particle eigensystem supplying the modes ``phi_m``
        basis: pseudo-energy ordered N-photon basis

    Returns:
        real unit vector of length ``len(basis)``
    """
    return _ProductExpander(eig, basis).expand(occupations)


@dataclass(frozen=True, eq=False)
class MultiPhotonEigensystem:
    """N-photon eigenstates labelled by eigenmode occupations.

    Entry ``p`` (1-based ``nu = p + 1``) has mode occupations
    ``occupations[p]``, label ``keys[p]`` (the occupations read in base N+1),
    eigenvalue ``eigenvalues[p]`` and coefficient column ``vectors[:, p]``
    over the Fock basis. Entries are sorted by label.
    """

    basis: Basis
    single: SingleParticleEigensystem
    occupations: tuple[FockState, ...]
    keys: tuple[int, ...]
    eigenvalues: np.ndarray
    vectors: np.ndarray

    def __len__(self) -> int:
        return len(self.occupations)

    def entries(self) -> list[tuple[int, FockState, float, np.ndarray]]:
        return [
            (K, occ, float(lam), self.vectors[:, p])
            for p, (K, occ, lam) in enumerate(zip(self.keys, self.occupations, self.eigenvalues))
        ]

    def sorted_spectrum(self) -> np.ndarray:
        return np.sort(self.eigenvalues)

    def residuals(self, H: EffectiveHamiltonian) -> np.ndarray:
        """``||H c - lambda c||`` for every entry."""
        Hc = H.sparse() @ self.vectors
        return np.linalg.norm(Hc - self.vectors * self.eigenvalues[None, :], axis=0)


def multi_photon_eigensystem(
    N: int,
    spec: LatticeSpec,
    cap: int | None = DEFAULT_CAP,
    single: SingleParticleEigensystem | None = None,
) -> MultiPhotonEigensystem:
    basis = enumerate_basis(N, spec.M, cap)
    single = single if single is not None else single_particle_eigensystem(spec)
    expander = _ProductExpander(single, basis)
    # eigenmode occupation patterns are the same compositions as the Fock basis
    occupations = basis.states
    vectors = np.empty((len(basis), len(basis)))
    for p, occ in enumerate(occupations):
        vectors[:, p] = expander.expand(occ)
    eigenvalues = basis.occupation_matrix() @ single.lambdas
    return MultiPhotonEigensystem(
        basis=basis,
        single=single,
        occupations=occupations,
        keys=basis.keys,
        eigenvalues=eigenvalues,
        vectors=fix_signs(vectors),
    )


def direct_diagonalize(H: EffectiveHamiltonian) -> tuple[np.ndarray, np.ndarray]:
    """Reference eigensystem of the dense N-photon matrix: ascending values, column vectors."""
    return _eigh(H.dense(), f"N={H.N} photons in {H.spec!r}")


@dataclass(frozen=True)
class BenchmarkReport:
    photons: int
    modes: int
    dimension: int
    product_seconds: float
    direct_seconds: float
    product_seconds_min: float
    direct_seconds_min: float
    spectrum_max_abs_diff: float
    repeats: int

    def to_dict(self) -> dict:
        return asdict(self)


def benchmark_eigensystems(
    N: int, spec: LatticeSpec, repeats: int = 5, cap: int | None = DEFAULT_CAP
) -> BenchmarkReport:
    """Time the product construction against dense diagonalization.

    The product timing starts from a known single-particle eigensystem; the
    direct timing covers only the dense eigensolver. ``*_seconds`` are
    medians over ``repeats`` runs.
    """
    if repeats < 1:
        raise ValidationError(f"repeats must be >= 1, got {repeats}")
    single = single_particle_eigensystem(spec)
    H = build_hamiltonian(N, spec, cap)
    dense = H.dense()
    product_t, direct_t = [], []
    for _ in range(repeats):
        t0 = time.perf_counter()
        mp = multi_photon_eigensystem(N, spec, cap, single=single)
        t1 = time.perf_counter()
        direct_values, _ = _eigh(dense, f"N={N} photons in {spec!r}")
        t2 = time.perf_counter()
        product_t.append(t1 - t0)
        direct_t.append(t2 - t1)
    diff = float(np.max(np.abs(mp.sorted_spectrum() - direct_values)))
    return BenchmarkReport(
        photons=N,
        modes=spec.M,
        dimension=H.dim,
        product_seconds=statistics.median(product_t),
        direct_seconds=statistics.median(direct_t),
        product_seconds_min=min(product_t),
        direct_seconds_min=min(direct_t),
        spectrum_max_abs_diff=diff,
        repeats=repeats,
    )
