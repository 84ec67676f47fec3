"""Dense operators on (C^d)^{\\otimes n} and the normalized quantities built on them."""

from __future__ import annotations

import numpy as np

from .errors import DegenerateInput, DimensionError, DomainError, PreconditionError
from .phase_space import QuditParams

TOL_HERM = 1e-9
TOL_TRACE = 1e-9
TOL_PSD = 1e-9


class DenseOperator:
    """A d^n x d^n complex matrix tagged with its qudit parameters.

    The basis index of |k1 ... kn> is sum_j k_j d^(n-j), i.e. the ordering
    produced by ``np.kron`` with qudit 1 most significant.
    """

    __slots__ = ("params", "matrix")
    __array_priority__ = 100

    def __init__(self, matrix, params: QuditParams | None = None):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"operator must be square, got shape {m.shape}")
        if params is None:
            params = QuditParams.for_dimension(m.shape[0])
        if m.shape[0] != params.dim:
            raise DimensionError(f"matrix of size {m.shape[0]} does not match d^n = {params.dim}")
        if not np.all(np.isfinite(m)):
            raise DomainError("operator has non-finite entries")
        m.setflags(write=False)
        self.params = params
        self.matrix = m

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def dim(self) -> int:
        return self.params.dim

    def adjoint(self) -> DenseOperator:
        return DenseOperator(self.matrix.conj().T, self.params)

    @property
    def H(self) -> DenseOperator:
        return self.adjoint()

    def _same(self, other: DenseOperator) -> None:
        if self.params != other.params:
            raise DimensionError(f"operators on {self.params} and {other.params}")

    def __matmul__(self, other):
        if isinstance(other, DenseOperator):
            self._same(other)
            return DenseOperator(self.matrix @ other.matrix, self.params)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, DenseOperator):
            self._same(other)
            return DenseOperator(self.matrix + other.matrix, self.params)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, DenseOperator):
            self._same(other)
            return DenseOperator(self.matrix - other.matrix, self.params)
        return NotImplemented

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return DenseOperator(self.matrix * scalar, self.params)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if np.isscalar(scalar):
            return DenseOperator(self.matrix / scalar, self.params)
        return NotImplemented

    def __neg__(self):
        return DenseOperator(-self.matrix, self.params)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def allclose(self, other, atol=1e-10) -> bool:
        other = as_operator(other, self.params)
        return bool(np.abs(self.matrix - other.matrix).max() <= atol)

    def is_unitary(self, atol=1e-9) -> bool:
        m = self.matrix
        return bool(np.abs(m @ m.conj().T - np.eye(self.dim)).max() <= atol)

    def __repr__(self):
        return f"DenseOperator(d={self.d}, n={self.n})"


class StateOperator(DenseOperator):
    """A density matrix: Hermitian, unit trace, positive semidefinite (within 1e-9)."""

    __slots__ = ()

    def __init__(self, matrix, params: QuditParams | None = None):
        super().__init__(matrix, params)
        m = self.matrix
        if np.abs(m - m.conj().T).max() > TOL_HERM:
            raise PreconditionError("state is not Hermitian")
        if abs(np.trace(m) - 1) > TOL_TRACE:
            raise PreconditionError(f"state trace {np.trace(m):.6g} is not 1")
        if np.linalg.eigvalsh((m + m.conj().T) / 2).min() < -TOL_PSD:
            raise PreconditionError("state has a negative eigenvalue")

    @classmethod
    def from_vector(cls, psi, params: QuditParams | None = None) -> StateOperator:
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), params)

    def is_pure(self, atol=1e-9) -> bool:
        m = self.matrix
        return bool(np.abs(m @ m - m).max() <= atol)


def as_operator(obj, params: QuditParams | None = None) -> DenseOperator:
    """Accept a DenseOperator or anything array-like."""
    if isinstance(obj, DenseOperator):
        if params is not None and obj.params != params:
            raise DimensionError(f"expected an operator on {params}, got {obj.params}")
        return obj
    return DenseOperator(obj, params)


def identity(params: QuditParams) -> DenseOperator:
    return DenseOperator(np.eye(params.dim), params)


def normalized_inner(a, b) -> complex:
    """<a, b> = Tr(a^* b) / d^n."""
    a, b = as_operator(a), as_operator(b)
    a._same(b)
    return complex(np.vdot(a.matrix, b.matrix) / a.dim)


def normalized_trace(a) -> complex:
    a = as_operator(a)
    return complex(np.trace(a.matrix) / a.dim)


def schatten_norm(a, p: float) -> float:
    """Normalized Schatten norm (Tr |a|^p / d^n)^(1/p); any real p > 0."""
    if not p > 0:
        raise DomainError(f"Schatten exponent must be positive, got {p}")
    a = as_operator(a)
    s = np.linalg.svd(a.matrix, compute_uv=False)
    if np.isinf(p):
        return float(s.max())
    return float((np.sum(s**p) / a.dim) ** (1.0 / p))


def tensor(a, b) -> DenseOperator:
    a, b = as_operator(a), as_operator(b)
    if a.d != b.d:
        raise DimensionError(f"cannot tensor d={a.d} with d={b.d}")
    return DenseOperator(np.kron(a.matrix, b.matrix), QuditParams(a.d, a.n + b.n))


def equal_up_to_phase(a, b, tol: float | None = None) -> tuple[bool, complex]:
    """Decide whether a = c b for a unit complex c, returning ``(flag, c)``.

    ``c`` is read off the largest-magnitude entry of ``b``; the comparison uses
    the unnormalized Frobenius distance with default tolerance 1e-9 d^(n/2).
    """
    a, b = as_operator(a), as_operator(b)
    a._same(b)
    if tol is None:
        tol = 1e-9 * np.sqrt(a.dim)
    flat = b.matrix.reshape(-1)
    k = int(np.argmax(np.abs(flat)))
    if abs(flat[k]) == 0:
        raise DegenerateInput("reference operator is zero")
    ratio = a.matrix.reshape(-1)[k] / flat[k]
    if abs(ratio) == 0:
        return False, 0j
    c = ratio / abs(ratio)
    ok = np.linalg.norm(a.matrix - c * b.matrix) <= tol
    return bool(ok), complex(c)
