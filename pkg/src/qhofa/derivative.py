"""Multiplicative quantum derivative d_a B = w(a) B w(a)^* B^* and its iterates.

Besides the single-direction operations this module has two batched kernels
used by the exact uniformity measures: every derivative of a matrix at once,
and the trace profile a -> Tr(d_a D) / d^n over all of V^n.
"""

from __future__ import annotations

from collections.abc import Sequence
from functools import lru_cache

import numpy as np

from .errors import DimensionError, DomainError
from .operators import DenseOperator, as_operator
from .phase_space import PhasePoint, QuditParams
from .weyl import weyl_table


def _direction(params: QuditParams, a) -> PhasePoint:
    if isinstance(a, PhasePoint):
        if a.params != params:
            raise DimensionError(f"direction on {a.params}, operator on {params}")
        return a
    return PhasePoint.from_coords(params, a)


def derivative(B, a) -> DenseOperator:
    """d_a B = B(a) B^* with B(a) = w(a) B w(a)^*."""
    B = as_operator(B)
    a = _direction(B.params, a)
    m = B.matrix
    shifted = weyl_table(B.params).conjugate(m, a.index)
    return DenseOperator(shifted @ m.conj().T, B.params)


def iterated_derivative(B, directions: Sequence) -> DenseOperator:
    """d_{a_k} ... d_{a_1} B with ``directions = [a_1, ..., a_k]`` (a_1 applied first)."""
    if len(directions) == 0:
        raise DomainError("need at least one direction")
    out = as_operator(B)
    for a in directions:
        out = derivative(out, a)
    return out


def all_derivatives(matrix: np.ndarray, params: QuditParams) -> np.ndarray:
    """d_a M for every phase point a; input (..., N, N), output (..., P, N, N)."""
    tab = weyl_table(params)
    m = np.asarray(matrix)
    shifted = _conjugate_stack(m, tab.src, tab.phase)
    return shifted @ np.conj(np.swapaxes(m, -1, -2))[..., None, :, :]


def _conjugate_stack(m: np.ndarray, s: np.ndarray, ph: np.ndarray) -> np.ndarray:
    # w(a) M w(a)^* for every a, keeping leading batch axes of M
    gathered = m[..., s[:, :, None], s[:, None, :]]  # (..., P, N, N)
    return ph[:, :, None] * gathered * ph.conj()[:, None, :]


@lru_cache(maxsize=32)
def _profile_tables(params: QuditParams):
    """Character matrix Phi[p, x] = omega^{p.x} and index maps between (p, q) and points."""
    tab = weyl_table(params)
    d, N = params.d, params.dim
    digits = tab.digits
    phi = np.exp(2j * np.pi / d * ((digits @ digits.T) % d))
    p_idx = tab.p @ tab.radix
    q_idx = tab.q @ tab.radix
    # shift[qi, x] = index of x - q for the q with index qi
    shift = (digits[None, :, :] - digits[:, None, :]) % d @ tab.radix
    order = np.empty(params.num_points, dtype=np.int64)
    order[p_idx * N + q_idx] = np.arange(params.num_points)
    for arr in (phi, shift, order):
        arr.setflags(write=False)
    return phi, shift, order


def cross_profile(X: np.ndarray, Y: np.ndarray, params: QuditParams) -> np.ndarray:
    """c(a) = Tr(w(a) X w(a)^* Y^*) / d^n for every phase point a, in lexicographic order.

    Tr(w(a) X w(a)^* Y^*) = sum_{x,y} omega^{p.(x-y)} X[x-q, y-q] conj(Y[x, y]),
    so for fixed q the p-dependence is a diagonal of Phi M_q Phi^*.
    Inputs broadcast over leading axes (..., N, N); output (..., d^(2n)).
    """
    X = np.asarray(X)
    Y = np.asarray(Y)
    N = params.dim
    phi, shift, order = _profile_tables(params)
    phi_c = phi.conj()
    Yc = Y.conj()
    lead = np.broadcast_shapes(X.shape[:-2], Y.shape[:-2])
    out = np.empty(lead + (N, N), dtype=complex)  # [..., p, q]
    for qi in range(N):
        s = shift[qi]
        M = X[..., s[:, None], s[None, :]] * Yc
        out[..., :, qi] = ((phi @ M) * phi_c).sum(axis=-1)
    flat = out.reshape(lead + (N * N,)) / N
    # flat is indexed by p_idx * N + q_idx; reorder to interleaved point order
    res = np.empty_like(flat)
    res[..., order] = flat
    return res


def trace_profile(matrix: np.ndarray, params: QuditParams) -> np.ndarray:
    """t(a) = Tr(d_a D) / d^n for every phase point a; input (..., N, N)."""
    return cross_profile(matrix, matrix, params)


def trace_profile_bruteforce(B) -> np.ndarray:
    """Reference profile from explicit dense derivatives."""
    B = as_operator(B)
    tab = weyl_table(B.params)
    out = np.empty(tab.size, dtype=complex)
    for i in range(tab.size):
        w = tab.dense(i)
        out[i] = np.trace(w @ B.matrix @ w.conj().T @ B.matrix.conj().T) / B.dim
    return out


def classical_shift(f, params: QuditParams, q) -> np.ndarray:
    """x -> f(x - q) for a function in computational-basis order."""
    tab = weyl_table(params)
    q = np.asarray(q) % params.d
    idx = ((tab.digits - q) % params.d) @ tab.radix
    return np.asarray(f)[idx]


def classical_reduction_check(f, a, params: QuditParams | None = None, atol: float = 1e-10) -> bool:
    """Check d_a B_f = B_g with g(x) = f(x - q) conj(f(x)) for a = (p, q)."""
    f = np.asarray(f, dtype=complex).reshape(-1)
    if params is None:
        params = QuditParams.for_dimension(f.size)
    if f.size != params.dim:
        raise DimensionError(f"function needs {params.dim} values, got {f.size}")
    a = _direction(params, a)
    lhs = derivative(np.diag(f), a).matrix
    g = classical_shift(f, params, a.q) * f.conj()
    return bool(np.abs(lhs - np.diag(g)).max() <= atol)
