"""Classical Gowers uniformity norms on Z_d^n and their match with diagonal operators.

||f||_{U^1} = |E_x f(x)| and ||f||_{U^k}^{2^k} = E_q ||d_q f||_{U^{k-1}}^{2^{k-1}},
with the multiplicative derivative (d_q f)(x) = f(x + q) conj(f(x)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .phase_space import QuditParams, check_enumeration


@dataclass(frozen=True)
class ClassicalFunction:
    """Complex values f(x) for x in Z_d^n, in the same order as computational basis states."""

    params: QuditParams
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex).reshape(-1)
        if v.size != self.params.dim:
            raise DimensionError(f"function needs {self.params.dim} values, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise DomainError("function has non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_values(cls, values, d: int | None = None, n: int | None = None) -> ClassicalFunction:
        v = np.asarray(values, dtype=complex).reshape(-1)
        params = QuditParams(d, n) if d is not None else QuditParams.for_dimension(v.size)
        return cls(params, v)

    def grid(self) -> np.ndarray:
        return self.values.reshape((self.params.d,) * self.params.n)


def _as_function(f, params: QuditParams | None = None) -> ClassicalFunction:
    if isinstance(f, ClassicalFunction):
        return f
    v = np.asarray(f, dtype=complex).reshape(-1)
    return ClassicalFunction(params or QuditParams.for_dimension(v.size), v)


def classical_derivative(f, q) -> ClassicalFunction:
    """(d_q f)(x) = f(x + q) conj(f(x))."""
    f = _as_function(f)
    q = [int(c) % f.params.d for c in np.atleast_1d(q)]
    if len(q) != f.params.n:
        raise DimensionError(f"direction needs {f.params.n} components, got {len(q)}")
    g = f.grid()
    shifted = np.roll(g, shift=[-c for c in q], axis=tuple(range(f.params.n)))
    return ClassicalFunction(f.params, (shifted * g.conj()).reshape(-1))


def _all_shift_indices(params: QuditParams) -> np.ndarray:
    """idx[q, x] = index of x + q."""
    d, n = params.d, params.n
    digits = np.indices((d,) * n).reshape(n, -1).T
    radix = d ** np.arange(n - 1, -1, -1)
    return ((digits[:, None, :] + digits[None, :, :]) % d) @ radix


def gowers_raw(f, k: int) -> float:
    """||f||_{U^k}^{2^k} by exact enumeration of all (k-1)-tuples of directions."""
    f = _as_function(f)
    if int(k) != k or k < 1:
        raise DomainError(f"order k must be a positive integer, got {k}")
    P = f.params
    check_enumeration(P.dim ** (k - 1), "reduce k or n")
    idx = _all_shift_indices(P)
    stack = f.values[None, :]
    for _ in range(k - 1):
        # every derivative of every function in the stack
        stack = (stack[:, idx] * stack.conj()[:, None, :]).reshape(-1, P.dim)
    return float(np.mean(np.abs(stack.mean(axis=1)) ** 2))


def gowers_norm(f, k: int) -> float:
    raw = max(gowers_raw(f, k), 0.0)
    return float(raw ** (1.0 / 2**k))


def u2_via_dft(f) -> float:
    """||f||_{U^2} as the l^4 norm of the normalized discrete Fourier transform."""
    f = _as_function(f)
    hat = np.fft.fftn(f.grid()) / f.params.dim
    return float(np.sum(np.abs(hat) ** 4) ** 0.25)


def diagonal_correspondence_check(f, k: int, tol: float = 1e-9) -> dict:
    """Compare ||B_f||_{Q^k} (quantum route on the dense diagonal operator) with ||f||_{U^k}.

    d_{(p,q)} B_f is diagonal with entries f(x - q) conj(f(x)) whatever p is, so
    averaging over V^n collapses to an average over q and the two sides coincide.
    """
    from .gates import diagonal_from_function
    from .uniformity import q_measure_exact

    f = _as_function(f)
    q = q_measure_exact(diagonal_from_function(f.values, f.params), k).value
    u = gowers_norm(f, k)
    return {"k": k, "q_value": q, "u_value": u, "agree": abs(q - u) <= tol}
