"""Fock basis of N photons in M modes, ordered by pseudo-energy.

A Fock state ``(n_1, ..., n_M)`` is read as a base-(N+1) numeral whose
least significant digit is ``n_1``::

    K = n_1 + n_2 (N+1) + ... + n_M (N+1)^(M-1)

Sorting states by ``K`` gives the ordering used everywhere else in the
package. Basis indices ``nu`` are 1-based in every public interface; the
``position`` helpers return the 0-based row of the corresponding numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import CapacityError, ValidationError

DEFAULT_CAP = 10**6
INT64_LIMIT = 2**63

FockState = tuple[int, ...]


def _check_counts(N: int, M: int) -> None:
    if not isinstance(N, (int, np.integer)) or isinstance(N, bool):
        raise ValidationError(f"photon number must be an integer, got {N!r}")
    if not isinstance(M, (int, np.integer)) or isinstance(M, bool):
        raise ValidationError(f"mode number must be an integer, got {M!r}")
    if N < 1:
        raise ValidationError(f"photon number must be >= 1, got N={N}")
    if M < 1:
        raise ValidationError(f"mode number must be >= 1, got M={M}")


def max_key(N: int, M: int) -> int:
    """Largest pseudo-energy ``N (N+1)^(M-1)``, carried by ``|0,...,0,N>``."""
    return N * (N + 1) ** (M - 1)


def check_space(N: int, M: int) -> None:
    """Validate ``(N, M)`` and make sure every key fits a signed 64-bit integer."""
    _check_counts(N, M)
    if max_key(N, M) >= INT64_LIMIT:
        raise CapacityError(
            f"pseudo-energies for N={N}, M={M} reach {max_key(N, M)}, "
            "which does not fit an exact 64-bit key"
        )


def dimension(N: int, M: int, cap: int | None = DEFAULT_CAP) -> int:
    """Number of Fock states of N photons in M modes.

    Args:
        N: photon number, at least 1
        M: mode number, at least 1
        cap: largest admissible dimension; ``None`` disables the check

    Returns:
        ``binomial(N + M - 1, N)``
    """
    check_space(N, M)
    n_f = math.comb(int(N) + int(M) - 1, int(N))
    if cap is not None and n_f > cap:
        raise CapacityError(f"Fock space N={N}, M={M} has {n_f} states, above the cap of {cap}")
    return n_f


def check_state(state: Sequence[int], N: int | None = None, M: int | None = None) -> FockState:
    """Return ``state`` as a tuple after checking it is a valid occupation list."""
    try:
        occ = tuple(int(n) for n in state)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"occupations must be integers, got {state!r}") from exc
    if any(int(n) != n for n in state):
        raise ValidationError(f"occupations must be integers, got {state!r}")
    if len(occ) == 0:
        raise ValidationError("a Fock state needs at least one mode")
    if any(n < 0 for n in occ):
        raise ValidationError(f"negative occupation in {occ}")
    total = sum(occ)
    if total < 1:
        raise ValidationError(f"state {occ} carries no photons")
    if N is not None and total != N:
        raise ValidationError(f"state {occ} holds {total} photons, expected {N}")
    if M is not None and len(occ) != M:
        raise ValidationError(f"state {occ} has {len(occ)} modes, expected {M}")
    return occ


def occupation_label(state: Sequence[int]) -> str:
    return "-".join(str(n) for n in state)


def encode(state: Sequence[int]) -> int:
    """Pseudo-energy of a Fock state; the photon number is taken from the state."""
    occ = check_state(state)
    N, M = sum(occ), len(occ)
    check_space(N, M)
    base = N + 1
    K = 0
    for n in reversed(occ):
        K = K * base + n
    return K


def decode(K: int, N: int, M: int) -> FockState:
    """Invert :func:`encode`: digit ``m`` of ``K`` in base ``N+1`` is ``n_m``.

    Raises:
        ValidationError: ``K`` is outside ``[N, N (N+1)^(M-1)]`` or its digits
            do not sum to ``N``.
    """
    check_space(N, M)
    K = int(K)
    if not N <= K <= max_key(N, M):
        raise ValidationError(f"K={K} is outside [{N}, {max_key(N, M)}] for N={N}, M={M}")
    base = N + 1
    digits = []
    rest = K
    for _ in range(M):
        rest, n = divmod(rest, base)
        digits.append(n)
    if sum(digits) != N:
        raise ValidationError(
            f"K={K} has base-{base} digits {tuple(digits)} summing to {sum(digits)}, not N={N}"
        )
    return tuple(digits)


def compositions(N: int, M: int) -> Iterator[FockState]:
    """All ways to place N photons in M modes, in lexicographic order of occupations."""
    if M == 1:
        yield (N,)
        return
    for first in range(N + 1):
        for rest in compositions(N - first, M - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class Basis:
    """Pseudo-energy ordered Fock basis.

    ``states[p]`` and ``keys[p]`` describe the state with 1-based index
    ``nu = p + 1``.
    """

    N: int
    M: int
    states: tuple[FockState, ...]
    keys: tuple[int, ...]
    _by_key: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self._by_key:
            object.__setattr__(self, "_by_key", {K: p for p, K in enumerate(self.keys)})

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.entries())

    def __contains__(self, state) -> bool:
        try:
            return self.position(state) is not None
        except ValidationError:
            return False

    def entries(self) -> list[tuple[int, int, FockState]]:
        """``(nu, K, state)`` triples in ascending ``K``."""
        return [(p + 1, K, s) for p, (K, s) in enumerate(zip(self.keys, self.states))]

    def position_of_key(self, K: int) -> int | None:
        return self._by_key.get(int(K))

    def position(self, state: Sequence[int]) -> int:
        """0-based array row of ``state``."""
        occ = check_state(state, self.N, self.M)
        return self._by_key[encode(occ)]

    def nu(self, state: Sequence[int]) -> int:
        """1-based basis index of ``state``."""
        return self.position(state) + 1

    def state(self, nu: int) -> FockState:
        return self.states[self._check_nu(nu)]

    def key(self, nu: int) -> int:
        return self.keys[self._check_nu(nu)]

    def labels(self) -> list[str]:
        return [occupation_label(s) for s in self.states]

    def occupation_matrix(self) -> np.ndarray:
        """``(N_F, M)`` integer array of occupations."""
        return np.array(self.states, dtype=np.int64).reshape(len(self), self.M)

    def _check_nu(self, nu: int) -> int:
        if not 1 <= nu <= len(self):
            raise ValidationError(f"basis index nu={nu} is outside 1..{len(self)}")
        return nu - 1


@lru_cache(maxsize=128)
def _enumerate(N: int, M: int) -> Basis:
    pairs = sorted((encode(s), s) for s in compositions(N, M))
    keys, states = zip(*pairs)
    return Basis(N=N, M=M, states=tuple(states), keys=tuple(keys))


def enumerate_basis(N: int, M: int, cap: int | None = DEFAULT_CAP) -> Basis:
    """Enumerate the N-photon M-mode Fock basis sorted by ascending pseudo-energy."""
    dimension(N, M, cap)
    return _enumerate(int(N), int(M))


@dataclass(frozen=True)
class ExchangeEnergy:
    """Change of pseudo-energy when one photon hops from mode ``j`` to mode ``i``."""

    i: int
    j: int
    delta: int


def exchange_energy(i: int, j: int, N: int, M: int | None = None) -> ExchangeEnergy:
    """Pseudo-exchange energy ``(N+1)^(i-1) - (N+1)^(j-1)`` for 1-based modes."""
    _check_counts(N, M if M is not None else max(i, j, 1))
    if i == j:
        raise ValidationError(f"exchange energy needs two distinct modes, got i=j={i}")
    upper = M if M is not None else max(i, j)
    if not (1 <= i <= upper and 1 <= j <= upper):
        raise ValidationError(f"mode indices must lie in 1..{upper}, got i={i}, j={j}")
    return ExchangeEnergy(i, j, (N + 1) ** (i - 1) - (N + 1) ** (j - 1))
