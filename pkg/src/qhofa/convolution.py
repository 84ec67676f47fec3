"""Hadamard convolution, the three-input qubit convolution, Choi states, and the
convolution/swap hierarchy test.

Both convolutions are conjugations by basis permutations followed by partial
traces, so they are evaluated by index arithmetic:

    (rho [x]_H sigma)[x, x'] = sum_y rho[x + y, x' + y] sigma[x - y, x' - y]
    [x]_3(r1, r2, r3)[a, a'] = sum_{b,c} r1[a+b+c, a'+b+c] r2[a+c, a'+c] r3[a+b, a'+b]

with digit-wise arithmetic mod d (mod 2, i.e. XOR, for the qubit version).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .derivative import iterated_derivative
from .errors import CapabilityError, DimensionError, PreconditionError
from .operators import DenseOperator, StateOperator, as_operator
from .phase_space import QuditParams, check_enumeration
from .uniformity import q_measure_exact
from .weyl import weyl_table


def _digit_tables(params: QuditParams):
    d, n = params.d, params.n
    digits = np.indices((d,) * n).reshape(n, -1).T
    radix = d ** np.arange(n - 1, -1, -1)
    add = ((digits[:, None, :] + digits[None, :, :]) % d) @ radix
    sub = ((digits[:, None, :] - digits[None, :, :]) % d) @ radix
    return add, sub


def hadamard_unitary(params: QuditParams) -> DenseOperator:
    """Dense V_H on H_I (x) H_II: |x + y>|x - y> -> |x>|y> on each qudit pair (i, n + i)."""
    add, sub = _digit_tables(params)
    N = params.dim
    m = np.zeros((N * N, N * N))
    x, y = np.divmod(np.arange(N * N), N)
    np.add.at(m, (x * N + y, add[x, y] * N + sub[x, y]), 1)
    return DenseOperator(m, QuditParams(params.d, 2 * params.n))


def hadamard_convolve(rho, sigma, strict: bool = True) -> DenseOperator:
    """rho [x]_H sigma = Tr_II(V_H (rho (x) sigma) V_H^*), for arbitrary operators.

    V_H is unitary only for odd d. With ``strict=False`` the same basis formula
    is evaluated at d = 2 as well (a non-unitary map, kept for comparison).
    """
    rho, sigma = as_operator(rho), as_operator(sigma)
    rho._same(sigma)
    P = rho.params
    if P.d == 2 and strict:
        raise CapabilityError("the Hadamard map is not unitary for d = 2; use triple_convolve or strict=False")
    add, sub = _digit_tables(P)
    r, s = rho.matrix, sigma.matrix
    out = np.zeros_like(r)
    for y in range(P.dim):
        a, b = add[:, y], sub[:, y]
        out += r[a[:, None], a[None, :]] * s[b[:, None], b[None, :]]
    return DenseOperator(out, P)


def hadamard_convolve_dense(rho, sigma) -> DenseOperator:
    """Reference: explicit V_H (rho (x) sigma) V_H^* and a partial trace (small sizes)."""
    rho, sigma = as_operator(rho), as_operator(sigma)
    P = rho.params
    V = hadamard_unitary(P).matrix
    full = V @ np.kron(rho.matrix, sigma.matrix) @ V.conj().T
    N = P.dim
    return DenseOperator(np.trace(full.reshape(N, N, N, N), axis1=1, axis2=3), P)


def triple_convolve(r1, r2, r3) -> DenseOperator:
    """[x]_3(r1, r2, r3) for qubits: CNOT_{1->2,3} then CNOT_{2,3->1}, keep register 1."""
    r1, r2, r3 = (as_operator(r) for r in (r1, r2, r3))
    r1._same(r2)
    r1._same(r3)
    if r1.d != 2:
        raise CapabilityError("the three-input convolution is defined for qubits (d = 2)")
    N = r1.dim
    a = np.arange(N)
    out = np.zeros((N, N), dtype=complex)
    m1, m2, m3 = r1.matrix, r2.matrix, r3.matrix
    for b in range(N):
        for c in range(N):
            i1, i2, i3 = a ^ b ^ c, a ^ c, a ^ b
            out += m1[i1[:, None], i1[None, :]] * m2[i2[:, None], i2[None, :]] * m3[i3[:, None], i3[None, :]]
    return DenseOperator(out, r1.params)


def triple_unitary(params: QuditParams) -> DenseOperator:
    """Dense V for [x]_3 on three n-qubit registers, for cross-checks."""
    if params.d != 2:
        raise CapabilityError("the three-input convolution is defined for qubits (d = 2)")
    N = params.dim
    m = np.zeros((N**3, N**3))
    for x, y, z in itertools.product(range(N), repeat=3):
        m[(x ^ y ^ z) * N * N + (x ^ y) * N + (x ^ z), x * N * N + y * N + z] = 1
    return DenseOperator(m, QuditParams(2, 3 * params.n))


@dataclass(frozen=True)
class ChoiState:
    state: StateOperator
    source: str = ""

    @property
    def params(self) -> QuditParams:
        return self.state.params


def choi_state(U, source: str = "") -> ChoiState:
    """J_U = (I (x) U)|Phi><Phi|(I (x) U)^* with |Phi> = d^{-n/2} sum_j |j>|j>."""
    U = as_operator(U)
    if not U.is_unitary():
        raise PreconditionError("choi_state needs a unitary")
    N = U.dim
    # (I (x) U)|Phi> has amplitude U[k, j] / sqrt(N) on |j>|k>
    psi = U.matrix.T.reshape(-1) / np.sqrt(N)
    rho = np.outer(psi, psi.conj())
    return ChoiState(StateOperator(rho, QuditParams(U.d, 2 * U.n)), source)


def purity_after_convolution(U) -> float:
    """Tr((J_U [x] J_U)^2): Hadamard convolution for odd d, [x]_3 with three copies for qubits."""
    J = choi_state(U).state
    conv = triple_convolve(J, J, J) if J.d == 2 else hadamard_convolve(J, J)
    return float(np.real(np.vdot(conv.matrix.conj().T, conv.matrix)))


def _direction_tuples(params: QuditParams, count: int):
    check_enumeration(params.num_points**count, "lower k")
    return itertools.product(weyl_table(params).points, repeat=count)


def simulated_acceptance(U, k: int) -> float:
    """1/2 [1 + E_{a_1..a_{k-2}} Tr((J_D [x] J_D)^2)], D = d_{a_{k-2}} ... d_{a_1} U, enumerated exactly."""
    U = as_operator(U)
    if k < 2:
        raise PreconditionError("the hierarchy test is defined for k >= 2")
    vals = []
    for dirs in _direction_tuples(U.params, k - 2):
        D = iterated_derivative(U, dirs) if dirs else U
        vals.append(purity_after_convolution(D))
    return 0.5 * (1.0 + float(np.mean(vals)))


def closed_form_acceptance(U, k: int) -> float:
    """P_k[U] = 1/2 [1 + ||U||_{Q^{k+1}}^{2^k}]."""
    q = q_measure_exact(U, k + 1).value
    return 0.5 * (1.0 + q ** (2**k))


@dataclass(frozen=True)
class ProtocolResult:
    gate: str
    k: int
    mode: str
    p_closed_form: float
    p_simulated: float
    samples: int = 0
    p_empirical: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None

    def as_dict(self) -> dict:
        return {
            "gate": self.gate,
            "k": self.k,
            "mode": self.mode,
            "p_closed_form": self.p_closed_form,
            "p_simulated": self.p_simulated,
            "samples": self.samples,
            "p_empirical": self.p_empirical,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
        }


def swap_test_samples(p_accept: float, samples: int, seed=None) -> np.ndarray:
    """Bernoulli outcomes (1 = accept) of repeated swap tests."""
    rng = np.random.default_rng(seed)
    return rng.random(samples) < p_accept


def testing_probability(
    U, k: int, mode: str = "closed-form", samples: int = 0, seed=None, gate: str = "", z: float = 1.96
) -> ProtocolResult:
    """Acceptance probability of the k-th level hierarchy test.

    Both the closed form and the exactly simulated value are always reported;
    ``mode='simulated'`` with ``samples > 0`` adds an empirical swap-test
    frequency with a normal-approximation confidence interval.
    """
    if mode not in ("closed-form", "simulated"):
        raise PreconditionError(f"unknown mode {mode!r}")
    U = as_operator(U)
    if not U.is_unitary():
        raise PreconditionError("the hierarchy test needs a unitary")
    pc = closed_form_acceptance(U, k)
    ps = simulated_acceptance(U, k)
    if mode == "simulated" and samples > 0:
        hits = swap_test_samples(ps, samples, seed)
        pe = float(hits.mean())
        half = z * np.sqrt(max(pe * (1 - pe), 1e-300) / samples)
        return ProtocolResult(gate, k, mode, pc, ps, samples, pe, float(max(pe - half, 0.0)), float(min(pe + half, 1.0)))
    return ProtocolResult(gate, k, mode, pc, ps)


def convolution_constant(B, k: int) -> float:
    """E ||D [x]_H D||_2^2 / ||B||_{Q^{k+1}}^{2^{k+1}} over D = d_{a_{k-1}} ... d_{a_1} B (odd d).

    Norms are normalized Schatten norms. Returns the ratio of the two sides of
    the general-k convolution identity, i.e. the constant that actually links them.
    """
    B = as_operator(B)
    vals = []
    for dirs in _direction_tuples(B.params, k - 1):
        D = iterated_derivative(B, dirs) if dirs else B
        C = hadamard_convolve(D, D).matrix
        vals.append(np.vdot(C, C).real / B.dim)
    q = q_measure_exact(B, k + 1).raw_power
    if q == 0:
        raise DimensionError("||B||_{Q^{k+1}} vanishes; the ratio is undefined")
    return float(np.mean(vals) / q)
