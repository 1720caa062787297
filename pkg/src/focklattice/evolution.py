"""Exact propagation of multi-photon states along the array.

States evolve as ``psi(z) = sum_nu exp(-i lambda_nu z) <phi_nu|psi0> |phi_nu>``
over a complete N-photon eigensystem; ``z`` is the normalized propagation
coordinate ``kappa Z`` throughout.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import gammainc

from .errors import CapacityError, ValidationError
from .fock import DEFAULT_CAP, Basis, FockState, check_state, dimension, enumerate_basis, occupation_label
from .lattice import LatticeSpec
from .spectral import MultiPhotonEigensystem, multi_photon_eigensystem

NORM_TOL = 1e-12
RENORM_WARN_TOL = 1e-9


def _same_space(a: Basis, b: Basis) -> bool:
    return a is b or (a.N == b.N and a.M == b.M)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitudes over a pseudo-energy ordered basis."""

    basis: Basis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (len(self.basis),):
            raise ValidationError(f"expected {len(self.basis)} amplitudes, got shape {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state vector norm is {norm!r}, not 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_fock(cls, basis: Basis, state: Sequence[int]) -> "StateVector":
        amps = np.zeros(len(basis), dtype=complex)
        amps[basis.position(state)] = 1.0
        return cls(basis, amps)

    @classmethod
    def from_amplitudes(cls, basis: Basis, amplitudes) -> "StateVector":
        """Normalize ``amplitudes``; warns when the input norm is off by more than 1e-9."""
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.shape != (len(basis),):
            raise ValidationError(f"expected {len(basis)} amplitudes, got shape {amps.shape}")
        norm = float(np.linalg.norm(amps))
        if not np.isfinite(norm) or norm == 0.0:
            raise ValidationError("initial state cannot be normalized (zero or non-finite norm)")
        if abs(norm - 1.0) > RENORM_WARN_TOL:
            warnings.warn(f"initial state norm {norm:.12g} renormalized to 1", stacklevel=2)
        return cls(basis, amps / norm)

    @classmethod
    def from_superposition(
        cls, basis: Basis, terms: Mapping[Sequence[int], complex] | Iterable[tuple[Sequence[int], complex]]
    ) -> "StateVector":
        items = terms.items() if isinstance(terms, Mapping) else terms
        amps = np.zeros(len(basis), dtype=complex)
        for state, amp in items:
            amps[basis.position(state)] += complex(amp)
        return cls.from_amplitudes(basis, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def amplitude(self, state: Sequence[int]) -> complex:
        return complex(self.amplitudes[self.basis.position(state)])

    def overlap(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        if not _same_space(self.basis, other.basis):
            raise ValidationError("states live in different Fock spaces")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def _check_match(psi0: StateVector, eig: MultiPhotonEigensystem) -> None:
    if not _same_space(psi0.basis, eig.basis):
        raise ValidationError(
            f"state has N={psi0.basis.N}, M={psi0.basis.M} but eigensystem has "
            f"N={eig.basis.N}, M={eig.basis.M}"
        )


def evolve(psi0: StateVector, z: float, eig: MultiPhotonEigensystem) -> StateVector:
    _check_match(psi0, eig)
    V = eig.vectors
    coeffs = V.T @ psi0.amplitudes
    return StateVector(psi0.basis, V @ (np.exp(-1j * eig.eigenvalues * z) * coeffs))


@dataclass(frozen=True, eq=False)
class ProbabilityTrace:
    """Occupation probabilities on a z grid; row ``r`` belongs to ``z[r]``, columns follow basis order."""

    basis: Basis
    z: np.ndarray
    probabilities: np.ndarray

    def column(self, state: Sequence[int]) -> np.ndarray:
        return self.probabilities[:, self.basis.position(state)]

    def labels(self) -> list[str]:
        return [f"P_{occupation_label(s)}" for s in self.basis.states]

    def row_sums(self) -> np.ndarray:
        return self.probabilities.sum(axis=1)


def _check_grid(z_grid) -> np.ndarray:
    z = np.asarray(z_grid, dtype=float).ravel()
    if z.size == 0:
        raise ValidationError("z grid is empty")
    if not np.all(np.isfinite(z)):
        raise ValidationError("z grid contains non-finite values")
    if np.any(np.diff(z) <= 0):
        raise ValidationError("z grid must be strictly ascending")
    return z


def probability_trace(psi0: StateVector, z_grid, eig: MultiPhotonEigensystem) -> ProbabilityTrace:
    _check_match(psi0, eig)
    z = _check_grid(z_grid)
    V = eig.vectors
    coeffs = V.T @ psi0.amplitudes
    phases = np.exp(-1j * np.outer(z, eig.eigenvalues))
    amps = (phases * coeffs[None, :]) @ V.T
    return ProbabilityTrace(basis=psi0.basis, z=z, probabilities=np.abs(amps) ** 2)


def concentration_peak(trace: ProbabilityTrace, states: Sequence[Sequence[int]], z_min: float = 0.0):
    """``(z, p)`` where the summed probability of ``states`` is largest for ``z > z_min``."""
    cols = [trace.basis.position(s) for s in states]
    total = trace.probabilities[:, cols].sum(axis=1)
    mask = trace.z > z_min
    if not np.any(mask):
        raise ValidationError(f"no grid points above z={z_min}")
    r = np.flatnonzero(mask)[np.argmax(total[mask])]
    return float(trace.z[r]), float(total[r])


DARK_STATE_SPEC = LatticeSpec.chain([1 / math.sqrt(2)] * 2, [0.0, 0.0, 0.0])


def _check_dark_spec(spec: LatticeSpec) -> None:
    ok = (
        spec.M == 3
        and np.allclose(spec.beta, 0.0, rtol=0, atol=1e-12)
        and np.allclose(spec.kappa, DARK_STATE_SPEC.kappa, rtol=0, atol=1e-12)
    )
    if not ok:
        raise ValidationError(f"dark state needs three waveguides with beta=0, kappa=1/sqrt(2); got {spec!r}")


def dark_state(spec: LatticeSpec = DARK_STATE_SPEC) -> StateVector:
    """Equal superposition of the third and fifth two-photon eigenstates.

    With ``beta = 0`` and ``kappa_1 = kappa_2 = 1/sqrt(2)`` these have
    eigenvalues 0 and 1, and their superposition never populates ``|0,2,0>``.
    """
    _check_dark_spec(spec)
    eig = multi_photon_eigensystem(2, spec)
    psi = (eig.vectors[:, 2] + eig.vectors[:, 4]) / math.sqrt(2)
    return StateVector.from_amplitudes(eig.basis, psi)


def dark_state_trace(z_grid, spec: LatticeSpec = DARK_STATE_SPEC) -> ProbabilityTrace:
    _check_dark_spec(spec)
    return probability_trace(dark_state(spec), z_grid, multi_photon_eigensystem(2, spec))


@dataclass(frozen=True)
class Sector:
    photons: int
    weight: float
    initial: FockState | None  # None for the vacuum sector


@dataclass(frozen=True)
class SectorMixture:
    kind: str
    parameter: complex
    modes: int
    threshold: float
    sectors: tuple[Sector, ...]
    tail: float

    def total_weight(self) -> float:
        return math.fsum(s.weight for s in self.sectors)


def _injected(photons_per_mode: Mapping[int, int], modes: int) -> FockState:
    occ = [0] * modes
    for mode, n in photons_per_mode.items():
        occ[mode - 1] += n
    return tuple(occ)


def sector_mixture(
    kind: str,
    parameter: complex,
    tail_threshold: float = 1e-6,
    modes: int = 2,
    injection: Sequence[int] | None = None,
) -> SectorMixture:
    """Photon-number sectors of a coherent or two-mode squeezed vacuum input.

    Coherent light ``|alpha>`` enters waveguide ``injection[0]`` (default 1);
    its sector N has Poisson weight ``exp(-|alpha|^2) |alpha|^(2N) / N!`` and
    initial state ``|N,0,...,0>``. Squeezed vacuum ``|xi>`` enters waveguides
    ``injection`` (default ``(1, 2)``); sector ``2n`` has weight
    ``(1 - |xi|^2) |xi|^(2n)`` and initial state ``|n,n,0,...>``. Sectors are
    kept up to the smallest cutoff whose discarded weight is at most
    ``tail_threshold``.
    """
    if not 0.0 < tail_threshold < 1.0:
        raise ValidationError(f"tail threshold must lie in (0, 1), got {tail_threshold}")
    if modes < 1:
        raise ValidationError(f"mode number must be >= 1, got {modes}")
    parameter = complex(parameter)
    sectors = []
    if kind == "coherent":
        inj = tuple(injection) if injection is not None else (1,)
        if len(inj) != 1 or not 1 <= inj[0] <= modes:
            raise ValidationError(f"coherent light needs one injection waveguide in 1..{modes}, got {inj}")
        mean = abs(parameter) ** 2
        N = 0
        while True:
            log_w = -mean + (N * math.log(mean) if mean > 0 else 0.0) - math.lgamma(N + 1)
            weight = math.exp(log_w) if (mean > 0 or N == 0) else 0.0
            sectors.append(Sector(N, weight, _injected({inj[0]: N}, modes) if N else None))
            tail = float(gammainc(N + 1, mean)) if mean > 0 else 0.0
            if tail <= tail_threshold:
                break
            N += 1
    elif kind in ("squeezed", "tmsv"):
        kind = "squeezed"
        inj = tuple(injection) if injection is not None else (1, 2)
        if len(inj) != 2 or inj[0] == inj[1] or not all(1 <= m <= modes for m in inj):
            raise ValidationError(f"squeezed light needs two distinct injection waveguides in 1..{modes}, got {inj}")
        r = abs(parameter) ** 2
        if r >= 1.0:
            raise ValidationError(f"two-mode squeezing needs |xi| < 1, got |xi| = {math.sqrt(r)}")
        n = 0
        while True:
            sectors.append(Sector(2 * n, (1.0 - r) * r**n, _injected({inj[0]: n, inj[1]: n}, modes) if n else None))
            tail = r ** (n + 1)
            if tail <= tail_threshold:
                break
            n += 1
    else:
        raise ValidationError(f"unknown mixture kind {kind!r}; use 'coherent' or 'squeezed'")
    return SectorMixture(
        kind=kind, parameter=parameter, modes=modes, threshold=tail_threshold, sectors=tuple(sectors), tail=tail
    )


@dataclass(frozen=True, eq=False)
class SectorWalk:
    photons: int
    weight: float
    trace: ProbabilityTrace | None  # vacuum carries no dynamics


def parallel_walk(
    mixture: SectorMixture, spec: LatticeSpec, z_grid, cap: int | None = DEFAULT_CAP
) -> list[SectorWalk]:
    """Evolve each photon-number sector of ``mixture`` on its own Fock lattice."""
    if spec.M != mixture.modes:
        raise ValidationError(f"mixture was built for {mixture.modes} modes, lattice has {spec.M}")
    z = _check_grid(z_grid)
    for s in mixture.sectors:
        if s.photons:
            try:
                dimension(s.photons, spec.M, cap)
            except CapacityError as exc:
                raise CapacityError(f"sector N={s.photons}: {exc}") from exc
    walks = []
    for s in sorted(mixture.sectors, key=lambda s: s.photons):
        if s.photons == 0:
            walks.append(SectorWalk(0, s.weight, None))
            continue
        eig = multi_photon_eigensystem(s.photons, spec, cap)
        psi0 = StateVector.from_fock(enumerate_basis(s.photons, spec.M, cap), check_state(s.initial))
        walks.append(SectorWalk(s.photons, s.weight, probability_trace(psi0, z, eig)))
    return walks
