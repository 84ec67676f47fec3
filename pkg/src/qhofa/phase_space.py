"""Arithmetic on Z_d and the symplectic phase space V^n = Z_d^{2n}.

A phase point is stored as ``(p1, q1, ..., pn, qn)``; the lexicographic order of
these tuples is the canonical order used by every dense array indexed by V^n.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError, DomainError, EnumerationTooLarge

DEFAULT_ENUM_CAP = 10**7
_INT_LIMIT = np.iinfo(np.int64).max

_cap_override: int | None = None


def enumeration_cap() -> int:
    """Current cap on the number of points an exact enumeration may visit."""
    if _cap_override is not None:
        return _cap_override
    env = os.environ.get("QHOFA_ENUM_CAP")
    if env:
        try:
            value = int(float(env))
        except ValueError:
            raise DomainError(f"QHOFA_ENUM_CAP must be an integer, got {env!r}") from None
        if value < 1:
            raise DomainError("QHOFA_ENUM_CAP must be positive")
        return value
    return DEFAULT_ENUM_CAP


def set_enumeration_cap(cap: int | None) -> None:
    """Override the cap for this process; ``None`` restores env/default lookup."""
    global _cap_override
    if cap is not None and cap < 1:
        raise DomainError("enumeration cap must be positive")
    _cap_override = cap


def check_enumeration(count: int, hint: str | None = None) -> None:
    cap = enumeration_cap()
    if count > cap:
        raise EnumerationTooLarge(count, cap, hint)


def is_prime(d: int) -> bool:
    if d < 2:
        return False
    if d < 4:
        return True
    if d % 2 == 0:
        return False
    f = 3
    while f * f <= d:
        if d % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class QuditParams:
    """Local dimension ``d`` (prime) and number of qudits ``n``."""

    d: int
    n: int

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or not is_prime(int(self.d)):
            raise DomainError(f"local dimension d={self.d} is not prime")
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DomainError(f"qudit count n={self.n} must be a positive integer")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "n", int(self.n))
        if self.d ** (2 * self.n) > _INT_LIMIT:
            raise DomainError(f"d^(2n) = {self.d}^{2 * self.n} overflows 64-bit indices")

    @property
    def dim(self) -> int:
        """Hilbert-space dimension d^n."""
        return self.d**self.n

    @property
    def num_points(self) -> int:
        """Size of the phase space, d^(2n)."""
        return self.d ** (2 * self.n)

    @property
    def half(self) -> int:
        """2^{-1} mod d for odd d (0 for d = 2, where it does not exist)."""
        return (self.d + 1) // 2 if self.d > 2 else 0

    @cached_property
    def omega(self) -> complex:
        return complex(np.exp(2j * np.pi / self.d))

    @cached_property
    def zeta(self) -> complex:
        """Square root of omega fixing the Weyl phase: i for qubits, omega^{2^-1} otherwise."""
        if self.d == 2:
            return 1j
        return complex(np.exp(1j * np.pi * (self.d + 1) / self.d))

    @classmethod
    def for_dimension(cls, dim: int) -> QuditParams:
        """Recover (d, n) from a Hilbert-space dimension d^n with d prime."""
        if dim < 2:
            raise DimensionError(f"dimension {dim} is not a prime power")
        d = next(f for f in range(2, dim + 1) if dim % f == 0)
        n, rest = 0, dim
        while rest % d == 0:
            rest //= d
            n += 1
        if rest != 1:
            raise DimensionError(f"dimension {dim} is not a power of a prime")
        return cls(d, n)


@dataclass(frozen=True)
class PhasePoint:
    """A point ``(p1, q1, ..., pn, qn)`` of V^n with residues in [0, d)."""

    params: QuditParams
    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if len(coords) != 2 * self.params.n:
            raise DimensionError(
                f"phase point needs {2 * self.params.n} coordinates, got {len(coords)}"
            )
        if any(c < 0 or c >= self.params.d for c in coords):
            raise DomainError(f"coordinates {coords} not reduced mod {self.params.d}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_coords(cls, params: QuditParams, coords) -> PhasePoint:
        """Build a point, reducing arbitrary integers mod d."""
        return cls(params, tuple(int(c) % params.d for c in coords))

    @classmethod
    def from_pq(cls, params: QuditParams, p, q) -> PhasePoint:
        coords = []
        for pj, qj in zip(p, q, strict=True):
            coords += [pj, qj]
        return cls.from_coords(params, coords)

    @classmethod
    def from_index(cls, params: QuditParams, index: int) -> PhasePoint:
        digits = np.unravel_index(int(index), (params.d,) * (2 * params.n))
        return cls(params, tuple(int(x) for x in digits))

    @classmethod
    def zero(cls, params: QuditParams) -> PhasePoint:
        return cls(params, (0,) * (2 * params.n))

    @property
    def p(self) -> tuple[int, ...]:
        return self.coords[0::2]

    @property
    def q(self) -> tuple[int, ...]:
        return self.coords[1::2]

    @property
    def index(self) -> int:
        """Position of this point in the lexicographic enumeration."""
        idx = 0
        for c in self.coords:
            idx = idx * self.params.d + c
        return idx

    def is_zero(self) -> bool:
        return not any(self.coords)

    def _check(self, other: PhasePoint) -> None:
        if self.params != other.params:
            raise DimensionError(f"phase points from {self.params} and {other.params}")

    def __add__(self, other: PhasePoint) -> PhasePoint:
        self._check(other)
        d = self.params.d
        return PhasePoint(self.params, tuple((a + b) % d for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: PhasePoint) -> PhasePoint:
        return self + (-other)

    def __neg__(self) -> PhasePoint:
        d = self.params.d
        return PhasePoint(self.params, tuple((-a) % d for a in self.coords))

    def scale(self, c: int) -> PhasePoint:
        return PhasePoint.from_coords(self.params, [c * a for a in self.coords])

    def __repr__(self):
        return f"PhasePoint{self.coords}"


def symplectic_form(a: PhasePoint, b: PhasePoint) -> int:
    """<a, b>_s = sum_j p_j q'_j - q_j p'_j  (mod d)."""
    a._check(b)
    total = sum(pa * qb - qa * pb for pa, qa, pb, qb in zip(a.p, a.q, b.p, b.q))
    return total % a.params.d


def enumerate_phase_points(params: QuditParams) -> list[PhasePoint]:
    """All d^(2n) points in lexicographic order."""
    check_enumeration(params.num_points)
    return [
        PhasePoint(params, coords)
        for coords in itertools.product(range(params.d), repeat=2 * params.n)
    ]


def phase_point_array(params: QuditParams) -> np.ndarray:
    """Integer array of shape (d^(2n), 2n): row i holds the coordinates of point i."""
    check_enumeration(params.num_points)
    grids = np.indices((params.d,) * (2 * params.n)).reshape(2 * params.n, -1)
    return grids.T.astype(np.int64)


def sample_phase_point(params: QuditParams, rng: np.random.Generator) -> PhasePoint:
    """Uniform point of V^n drawn from ``rng``."""
    return PhasePoint(params, tuple(int(x) for x in rng.integers(0, params.d, 2 * params.n)))


def sample_phase_indices(params: QuditParams, rng: np.random.Generator, size) -> np.ndarray:
    """Uniform point indices in [0, d^(2n)), vectorised."""
    return rng.integers(0, params.num_points, size=size)
