"""Weyl operators, their exact symbolic algebra, and the characteristic function.

Every Weyl operator is monomial: w(a)|x> = zeta^{-p.q} omega^{p.(x+q)} |x+q>.
:class:`WeylTable` caches that structure (a row permutation and a phase
vector per phase point) so conjugations and Fourier coefficients never need
dense Weyl matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, DomainError
from .operators import DenseOperator, as_operator
from .phase_space import PhasePoint, QuditParams, check_enumeration, symplectic_form


class WeylTable:
    """Monomial data for all d^(2n) Weyl operators of one system.

    Attributes
    ----------
    points : (P, 2n) int array of phase-point coordinates, lexicographic.
    src : (P, N) int array; row i maps basis index x to the index of x - q_i.
    phase : (P, N) complex array, omega^{p_i . x}.
    global_exp : (P,) int array, exponent of zeta in w(a_i) (i.e. -p.q mod 2d).
    """

    def __init__(self, params: QuditParams):
        check_enumeration(params.num_points)
        d, n = params.d, params.n
        self.params = params
        N = params.dim
        digits = np.indices((d,) * n).reshape(n, -1).T  # (N, n)
        points = np.indices((d,) * (2 * n)).reshape(2 * n, -1).T.astype(np.int64)
        p = points[:, 0::2]
        q = points[:, 1::2]
        radix = d ** np.arange(n - 1, -1, -1)
        shifted = (digits[None, :, :] - q[:, None, :]) % d  # (P, N, n)
        self.points = points
        self.p = p
        self.q = q
        self.digits = digits
        self.src = shifted @ radix
        self.phase = np.exp(2j * np.pi / d * ((digits @ p.T).T % d))
        self.global_exp = (-(p * q).sum(axis=1)) % (2 * d)
        self.radix = radix
        for arr in (self.points, self.src, self.phase, self.global_exp):
            arr.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.points)

    def zeta_power(self, exps) -> np.ndarray:
        return np.asarray(self.params.zeta) ** np.asarray(exps)

    def dense(self, i: int) -> np.ndarray:
        N = self.params.dim
        m = np.zeros((N, N), dtype=complex)
        rows = np.arange(N)
        m[rows, self.src[i]] = self.zeta_power(self.global_exp[i]) * self.phase[i]
        return m

    def conjugate(self, matrix: np.ndarray, i: int) -> np.ndarray:
        """w(a_i) M w(a_i)^*, for M of shape (..., N, N)."""
        s = self.src[i]
        ph = self.phase[i]
        return ph[:, None] * matrix[..., s[:, None], s[None, :]] * ph.conj()[None, :]

    def conjugate_all(self, matrix: np.ndarray) -> np.ndarray:
        """Stack of w(a) M w(a)^* over every phase point, shape (P, N, N)."""
        s = self.src
        return (
            self.phase[:, :, None]
            * matrix[s[:, :, None], s[:, None, :]]
            * self.phase.conj()[:, None, :]
        )


@lru_cache(maxsize=32)
def weyl_table(params: QuditParams) -> WeylTable:
    return WeylTable(params)


def _point(params: QuditParams, a) -> PhasePoint:
    if isinstance(a, PhasePoint):
        if a.params != params:
            raise DimensionError(f"phase point on {a.params}, expected {params}")
        return a
    return PhasePoint.from_coords(params, a)


def weyl(params: QuditParams, a) -> DenseOperator:
    """Dense w(a) = zeta^{-p.q} Z^p X^q, tensored over the n qudits."""
    a = _point(params, a)
    return DenseOperator(weyl_table(params).dense(a.index), params)


def weyl_dense_kron(params: QuditParams, a) -> np.ndarray:
    """Reference construction of w(a) by explicit one-qudit matrices and ``np.kron``."""
    a = _point(params, a)
    d = params.d
    Z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    X = np.roll(np.eye(d), 1, axis=0)
    out = np.eye(1, dtype=complex)
    for p, q in zip(a.p, a.q):
        if d == 2:
            phase = 1j ** (-p * q)
        else:
            phase = np.exp(2j * np.pi / d * (-params.half * p * q % d))
        one = phase * np.linalg.matrix_power(Z, p) @ np.linalg.matrix_power(X, q)
        out = np.kron(out, one)
    return out


@dataclass(frozen=True)
class WeylLabel:
    """The operator zeta^{phase_exp} w(point).

    phase_exp is reduced mod the order of zeta (4 for qubits, d for odd d), so
    equal operators always carry equal labels.
    """

    point: PhasePoint
    phase_exp: int = 0

    def __post_init__(self):
        d = self.point.params.d
        object.__setattr__(self, "phase_exp", int(self.phase_exp) % (4 if d == 2 else d))

    @property
    def params(self) -> QuditParams:
        return self.point.params

    def dense(self) -> DenseOperator:
        return weyl(self.params, self.point) * (self.params.zeta**self.phase_exp)

    def adjoint(self) -> WeylLabel:
        # w(a)^* = w(-a) exactly; the scalar conjugates.
        return WeylLabel(-self.point, -self.phase_exp)

    def __matmul__(self, other: WeylLabel) -> WeylLabel:
        return weyl_product(self, other)

    def is_identity(self) -> bool:
        return self.point.is_zero() and self.phase_exp == 0


def weyl_product(x: WeylLabel, y: WeylLabel) -> WeylLabel:
    """Exact product of two labels.

    Uses Z^p X^q Z^p' X^q' = omega^{-q.p'} Z^{p+p'} X^{q+q'} and zeta^2 = omega,
    with the reduced coordinates of a + b, so the exponent is exact in Z_{2d}.
    """
    if x.params != y.params:
        raise DimensionError(f"labels on {x.params} and {y.params}")
    d = x.params.d
    a, b = x.point, y.point
    s = a + b
    e = 0
    for pa, qa, pb, qb, ps, qs in zip(a.p, a.q, b.p, b.q, s.p, s.q):
        e += ps * qs - pa * qa - pb * qb - 2 * qa * pb
    return WeylLabel(s, x.phase_exp + y.phase_exp + e)


def commutator_phase(a: PhasePoint, b: PhasePoint) -> complex:
    """omega^{<a,b>_s}, the scalar with w(a) w(b) w(a)^* = omega^{<a,b>_s} w(b)."""
    return complex(a.params.omega ** symplectic_form(a, b))


@dataclass(frozen=True)
class CharSpectrum:
    """Characteristic function Xi_T(a) = <w(a), T>, dense over V^n in lexicographic order."""

    params: QuditParams
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.size != self.params.num_points:
            raise DimensionError(f"spectrum needs {self.params.num_points} coefficients, got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __getitem__(self, a) -> complex:
        return complex(self.coeffs[_point(self.params, a).index])

    def support(self, tol: float = 1e-12) -> list[PhasePoint]:
        idx = np.flatnonzero(np.abs(self.coeffs) > tol)
        return [PhasePoint.from_index(self.params, i) for i in idx]


def char_spectrum(T) -> CharSpectrum:
    """All Fourier coefficients <w(a), T> = Tr(w(a)^* T) / d^n."""
    T = as_operator(T)
    tab = weyl_table(T.params)
    N = T.dim
    rows = np.arange(N)
    entries = T.matrix[rows[None, :], tab.src]  # T[x, x - q] for every point
    coeffs = (tab.phase.conj() * entries).sum(axis=1)
    coeffs *= tab.zeta_power(-tab.global_exp) / N
    return CharSpectrum(T.params, coeffs)


def char_spectrum_matrix(matrix: np.ndarray, params: QuditParams) -> np.ndarray:
    """Batched characteristic function for raw arrays of shape (..., N, N)."""
    tab = weyl_table(params)
    N = params.dim
    rows = np.arange(N)
    entries = matrix[..., rows[None, :], tab.src]
    coeffs = np.einsum("...pn,pn->...p", entries, tab.phase.conj())
    return coeffs * (tab.zeta_power(-tab.global_exp) / N)


def synthesize(S: CharSpectrum) -> DenseOperator:
    """T = sum_a Xi_T(a) w(a)."""
    tab = weyl_table(S.params)
    N = S.params.dim
    m = np.zeros((N, N), dtype=complex)
    rows = np.broadcast_to(np.arange(N), tab.src.shape)
    vals = (S.coeffs * tab.zeta_power(tab.global_exp))[:, None] * tab.phase
    np.add.at(m, (rows, tab.src), vals)
    return DenseOperator(m, S.params)


def spectrum_lp(S: CharSpectrum | np.ndarray, p: float) -> float:
    """(sum_a |Xi(a)|^p)^(1/p)."""
    if not p > 0:
        raise DomainError(f"l^p exponent must be positive, got {p}")
    c = S.coeffs if isinstance(S, CharSpectrum) else np.asarray(S)
    return float(np.sum(np.abs(c) ** p) ** (1.0 / p))
