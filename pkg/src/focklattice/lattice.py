"""Waveguide arrays and their effective N-photon Hamiltonians.

The array Hamiltonian is

    H = sum_j beta_j a_j^+ a_j + sum_{i != j} kappa_ij a_i^+ a_j

with real propagation constants ``beta`` and a real symmetric coupling
matrix ``kappa``. In the N-photon sector it becomes a real symmetric matrix
over the pseudo-energy ordered Fock basis. A hop of one photon from mode j
to mode i shifts the pseudo-energy by a fixed amount, so the partner of a
basis state is located by integer arithmetic on its key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, ValidationError
from .fock import DEFAULT_CAP, Basis, FockState, check_state, enumerate_basis


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LatticeSpec:
    """Propagation constants ``beta`` (length M) and coupling matrix ``kappa`` (M x M)."""

    beta: np.ndarray
    kappa: np.ndarray

    def __init__(self, beta: Sequence[float], kappa):
        beta = np.asarray(beta)
        kappa = np.asarray(kappa)
        if np.iscomplexobj(beta) or np.iscomplexobj(kappa):
            raise ValidationError("propagation constants and couplings must be real")
        beta = np.asarray(beta, dtype=float)
        kappa = np.asarray(kappa, dtype=float)
        if beta.ndim != 1 or beta.size < 1:
            raise ValidationError(f"beta must be a non-empty 1-d list, got shape {beta.shape}")
        M = beta.size
        if kappa.shape != (M, M):
            raise ValidationError(f"kappa must be {M}x{M} to match beta, got shape {kappa.shape}")
        if not (np.all(np.isfinite(beta)) and np.all(np.isfinite(kappa))):
            raise ValidationError("beta and kappa must be finite")
        if np.any(np.diag(kappa) != 0.0):
            raise ValidationError("kappa must have a zero diagonal (use beta for on-site terms)")
        if not np.array_equal(kappa, kappa.T):
            raise ValidationError("kappa must be exactly symmetric")
        object.__setattr__(self, "beta", _frozen(beta))
        object.__setattr__(self, "kappa", _frozen(kappa))

    @classmethod
    def chain(cls, couplings: Sequence[float], beta: Sequence[float] | None = None) -> "LatticeSpec":
        """Nearest-neighbour array from the M-1 couplings ``kappa_{m,m+1}``."""
        couplings = np.atleast_1d(np.asarray(couplings, dtype=float))
        M = couplings.size + 1
        kappa = np.zeros((M, M))
        idx = np.arange(M - 1)
        kappa[idx, idx + 1] = couplings
        kappa[idx + 1, idx] = couplings
        if beta is None:
            beta = np.zeros(M)
        return cls(beta, kappa)

    @classmethod
    def uniform_chain(cls, M: int, kappa: float = 1.0, beta: float = 0.0) -> "LatticeSpec":
        if M < 1:
            raise ValidationError(f"mode number must be >= 1, got M={M}")
        return cls.chain([kappa] * (M - 1), [beta] * M)

    @property
    def M(self) -> int:
        return self.beta.size

    def couplings(self) -> list[tuple[int, int, float]]:
        """Nonzero ``(i, j, kappa_ij)`` with 1-based ``i != j`` (both orders listed)."""
        rows, cols = np.nonzero(self.kappa)
        return [(int(i) + 1, int(j) + 1, float(self.kappa[i, j])) for i, j in zip(rows, cols)]

    def single_particle_matrix(self) -> np.ndarray:
        return np.diag(self.beta) + self.kappa

    def is_chain(self) -> bool:
        off = self.kappa.copy()
        idx = np.arange(self.M - 1)
        off[idx, idx + 1] = 0.0
        off[idx + 1, idx] = 0.0
        return not np.any(off)

    def to_dict(self) -> dict:
        return {"beta": self.beta.tolist(), "kappa": self.kappa.tolist()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeSpec):
            return NotImplemented
        return np.array_equal(self.beta, other.beta) and np.array_equal(self.kappa, other.kappa)

    def __hash__(self) -> int:
        return hash((self.beta.tobytes(), self.kappa.tobytes()))

    def __repr__(self) -> str:
        return f"LatticeSpec(beta={self.beta.tolist()}, kappa={self.kappa.tolist()})"


def _hop_amplitude(kappa_ij: float, n_i: int, n_j: int) -> float:
    # exact integer under the root, one rounding
    return kappa_ij * math.sqrt((n_i + 1) * n_j)


def matrix_element(bra: Sequence[int], ket: Sequence[int], spec: LatticeSpec, N: int | None = None) -> float:
    """``<bra| H |ket>`` for two Fock states of the same (N, M) space.

    The diagonal is ``sum_m beta_m n_m``; an off-diagonal element is nonzero
    only when ``bra`` follows from ``ket`` by moving one photon from mode j
    to mode i, and then equals ``kappa_ij sqrt((n_i + 1) n_j)``.
    """
    bra = check_state(bra, N)
    ket = check_state(ket, N)
    if len(bra) != len(ket):
        raise ValidationError(f"bra {bra} and ket {ket} live in different mode numbers")
    if sum(bra) != sum(ket):
        raise ValidationError(f"bra {bra} and ket {ket} carry different photon numbers")
    if len(ket) != spec.M:
        raise ValidationError(f"states have {len(ket)} modes but the lattice has {spec.M}")
    if bra == ket:
        return float(np.dot(spec.beta, ket))
    diff = [b - k for b, k in zip(bra, ket)]
    gained = [m for m, d in enumerate(diff) if d == 1]
    lost = [m for m, d in enumerate(diff) if d == -1]
    if len(gained) != 1 or len(lost) != 1 or sum(abs(d) for d in diff) != 2:
        return 0.0
    i, j = gained[0], lost[0]
    return _hop_amplitude(float(spec.kappa[i, j]), ket[i], ket[j])


@dataclass(frozen=True, eq=False)
class EffectiveHamiltonian:
    """Real symmetric N-photon Hamiltonian in the pseudo-energy basis.

    ``entries`` holds ``(mu, nu, value)`` with 1-based indices, sorted by row
    then column, exact zeros omitted. ``dense()`` and ``sparse()`` return
    0-based arrays.
    """

    N: int
    spec: LatticeSpec
    basis: Basis
    entries: tuple[tuple[int, int, float], ...]
    cap: int | None = DEFAULT_CAP
    _csr: sp.csr_matrix = field(default=None, compare=False, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def sparse(self) -> sp.csr_matrix:
        if self._csr is None:
            if self.entries:
                mu, nu, val = zip(*self.entries)
                rows = np.asarray(mu) - 1
                cols = np.asarray(nu) - 1
            else:
                rows = cols = np.zeros(0, dtype=int)
                val = ()
            csr = sp.csr_matrix((np.asarray(val, dtype=float), (rows, cols)), shape=(self.dim, self.dim))
            object.__setattr__(self, "_csr", csr)
        return self._csr

    def dense(self) -> np.ndarray:
        if self.cap is not None and self.dim > self.cap:
            raise CapacityError(f"refusing to densify a {self.dim}x{self.dim} Hamiltonian (cap {self.cap})")
        return self.sparse().toarray()

    def diagonal(self) -> np.ndarray:
        return self.sparse().diagonal()

    def value(self, mu: int, nu: int) -> float:
        self.basis.state(mu)
        self.basis.state(nu)
        return float(self.sparse()[mu - 1, nu - 1])

    def off_diagonal(self) -> list[tuple[int, int, float]]:
        return [e for e in self.entries if e[0] != e[1]]


def build_hamiltonian(N: int, spec: LatticeSpec, cap: int | None = DEFAULT_CAP) -> EffectiveHamiltonian:
    """Effective Hamiltonian of N photons in the array ``spec``."""
    basis = enumerate_basis(N, spec.M, cap)
    base = N + 1
    weights = [base**m for m in range(spec.M)]
    hops = [(i - 1, j - 1, k) for i, j, k in spec.couplings()]
    values: dict[tuple[int, int], float] = {}
    for p, (K, ket) in enumerate(zip(basis.keys, basis.states)):
        diag = float(np.dot(spec.beta, ket))
        if diag != 0.0:
            values[(p, p)] = diag
        for i, j, k in hops:
            if ket[j] == 0:
                continue
            q = basis.position_of_key(K + weights[i] - weights[j])
            values[(q, p)] = _hop_amplitude(k, ket[i], ket[j])
    entries = tuple((q + 1, p + 1, v) for (q, p), v in sorted(values.items()))
    return EffectiveHamiltonian(N=N, spec=spec, basis=basis, entries=entries, cap=cap)


def allowed_transitions(nu: int, H: EffectiveHamiltonian) -> list[tuple[int, int, float]]:
    """States directly coupled to ``nu``: ``(mu, K_mu - K_nu, H_mu_nu)`` sorted by ``mu``."""
    basis = H.basis
    K_nu = basis.key(nu)
    column = H.sparse().getcol(nu - 1).tocoo()
    out = []
    for q, v in sorted(zip(column.row.tolist(), column.data.tolist())):
        if q == nu - 1 or v == 0.0:
            continue
        out.append((q + 1, basis.keys[q] - K_nu, float(v)))
    return out


@dataclass(frozen=True)
class TermDiagram:
    """Pseudo-energy levels and the transitions the Hamiltonian allows between them.

    ``levels`` are ``(nu, K, state)``; ``transitions`` are ``(nu, mu, |dK|, amplitude)``
    with ``nu < mu``.
    """

    levels: tuple[tuple[int, int, FockState], ...]
    transitions: tuple[tuple[int, int, int, float], ...]

    def exchange_energies(self) -> set[int]:
        return {t[2] for t in self.transitions}


def term_diagram(H: EffectiveHamiltonian) -> TermDiagram:
    keys = H.basis.keys
    transitions = tuple(
        (a, b, abs(keys[b - 1] - keys[a - 1]), v) for a, b, v in H.off_diagonal() if a < b
    )
    return TermDiagram(levels=tuple(H.basis.entries()), transitions=transitions)
