import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhofa.derivative import all_derivatives
from qhofa.errors import DomainError, EnumerationTooLarge, PreconditionError
from qhofa.gates import (
    named_gate,
    random_clifford_circuit,
    random_operator,
    random_positive,
    random_pure_state,
    random_unitary,
    stabilizer_states,
)
from qhofa.operators import StateOperator, schatten_norm
from qhofa.phase_space import QuditParams, enumerate_phase_points
from qhofa.uniformity import (
    OperatorFamily,
    ccz_formula_report,
    ccz_formulas,
    permutation_identity_check,
    q2_via_fourier,
    q3_pure_state,
    q_measure,
    q_measure_bruteforce,
    q_measure_exact,
    q_measure_mc,
    schwarz_check,
    uniformity_functional,
)
from qhofa.weyl import char_spectrum, weyl, weyl_table


def values(B, ks=(1, 2, 3, 4)):
    return [q_measure_exact(B, k).value for k in ks]


def test_weyl_values():
    for d in (2, 3):
        P = QuditParams(d, 1)
        for b in enumerate_phase_points(P):
            expected = [1.0 if b.index == 0 else 0.0, 1.0, 1.0, 1.0]
            assert np.allclose(values(weyl(P, b)), expected, atol=1e-12)


@pytest.mark.parametrize("d,n", [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)])
def test_fourier_values(d, n):
    F = named_gate("fourier", d, n)
    q2 = 2 ** (-n / 4) if d == 2 else d ** (-n / 2)
    assert np.allclose(values(F, (2, 3, 4)), [q2, 1, 1], atol=1e-12)


@pytest.mark.parametrize("d", [2, 3])
def test_cnot_values(d):
    assert np.allclose(values(named_gate("cnot", d)), [1 / d, d**-0.5, 1, 1], atol=1e-12)


def test_t_and_ccz_values():
    t = [math.sqrt(2 + math.sqrt(2)) / 2, 0.75**0.25, 0.75**0.125, 1]
    assert np.allclose(values(named_gate("t")), t, atol=1e-12)
    c = [0.75, (11 / 32) ** 0.25, (11 / 32) ** 0.125, 1]
    assert np.allclose(values(named_gate("ccz")), c, atol=1e-12)
    assert np.allclose(values(np.eye(4)), 1, atol=1e-12)


@pytest.mark.parametrize("d,n,k", [(2, 1, 1), (2, 1, 2), (2, 1, 3), (3, 1, 2), (3, 1, 3), (2, 2, 2)])
def test_exact_matches_bruteforce(d, n, k, rng):
    B = random_operator(QuditParams(d, n), rng)
    assert abs(q_measure_exact(B, k).raw_power - q_measure_bruteforce(B, k)) < 1e-12


def test_thread_count_does_not_change_result():
    C = named_gate("cnot", 3)
    a = q_measure_exact(C, 3, threads=1).raw_power
    b = q_measure_exact(C, 3, threads=4).raw_power
    assert abs(a - b) < 1e-12


def test_estimate_invariants(rng):
    est = q_measure_exact(random_unitary(QuditParams(2, 2), rng), 2)
    assert est.method == "exact" and est.value == pytest.approx(est.raw_power**0.25)
    assert 0 <= est.value <= 1 + 1e-9
    with pytest.raises(DomainError):
        q_measure_exact(np.eye(2), 0)


def test_enumeration_cap():
    with pytest.raises(EnumerationTooLarge):
        q_measure_exact(named_gate("ccz", 3), 4)


def test_monte_carlo():
    C = named_gate("cnot", 2)
    est = q_measure_mc(C, 2, 10**5, seed=11)
    assert abs(est.raw_power - 0.25) <= 4 * est.std_error
    again = q_measure_mc(C, 2, 10**5, seed=11)
    assert est.raw_power == again.raw_power and est.std_error == again.std_error
    assert q_measure_mc(C, 1, 10, seed=1).raw_power == q_measure_exact(C, 1).raw_power
    assert q_measure(C, 2, "monte-carlo", 1000, seed=2).method == "monte-carlo"
    threaded = q_measure_mc(C, 3, 9000, seed=5, threads=3)
    assert threaded.raw_power == q_measure_mc(C, 3, 9000, seed=5, threads=1).raw_power


def test_q2_via_fourier(rng):
    assert q2_via_fourier(named_gate("cnot")) == pytest.approx(2**-0.5)
    assert q2_via_fourier(weyl(QuditParams(3, 1), (1, 2))) == pytest.approx(1)
    for d, n in [(2, 2), (3, 1), (3, 2)]:
        B = random_operator(QuditParams(d, n), rng)
        assert abs(q2_via_fourier(B) - q_measure_exact(B, 2).value) < 1e-9


def test_q3_pure_state(rng):
    zero = StateOperator(np.diag([1.0, 0.0]))
    assert q3_pure_state(zero) == pytest.approx(2**-0.5)
    for d, n in [(2, 1), (2, 2), (3, 1)]:
        rho = random_pure_state(QuditParams(d, n), rng)
        assert abs(q3_pure_state(rho) - q_measure_exact(rho, 3).value) < 1e-8
    with pytest.raises(PreconditionError):
        q3_pure_state(StateOperator(np.eye(2) / 2))


def test_functional_reduces_to_measure(rng):
    for k in (1, 2, 3):
        B = random_operator(QuditParams(2, 1), rng)
        F = OperatorFamily.constant(B, k)
        assert abs(uniformity_functional(F) - q_measure_exact(B, k).raw_power) < 1e-12


def test_functional_methods_agree(rng):
    for k in (1, 2, 3):
        P = QuditParams(2, 1)
        F = OperatorFamily.from_list([random_operator(P, rng) for _ in range(2**k)])
        assert abs(uniformity_functional(F) - uniformity_functional(F, "direct")) < 1e-12
    F = OperatorFamily.from_list([random_operator(QuditParams(3, 1), rng) for _ in range(4)])
    assert abs(uniformity_functional(F) - uniformity_functional(F, "direct")) < 1e-12


def test_functional_orthogonal_weyl():
    P = QuditParams(3, 1)
    b, c = weyl(P, (1, 0)), weyl(P, (0, 1))
    F = OperatorFamily(1, {"0": b, "1": c})
    assert abs(uniformity_functional(F)) < 1e-12
    # order-2 version with repeated members
    F = OperatorFamily.from_list([b, c, b, c])
    assert abs(uniformity_functional(F) - uniformity_functional(F, "direct")) < 1e-12


def test_functional_fourier_form(rng):
    P = QuditParams(2, 2)
    ops = [random_operator(P, rng) for _ in range(4)]
    xi = [char_spectrum(B).coeffs for B in ops]
    expected = np.sum(xi[0] * xi[1].conj() * xi[2].conj() * xi[3])
    assert abs(uniformity_functional(OperatorFamily.from_list(ops)) - expected) < 1e-12


def test_family_validation():
    with pytest.raises(Exception):
        OperatorFamily.from_list([np.eye(2)] * 3)
    with pytest.raises(Exception):
        OperatorFamily.from_list([np.eye(2), np.eye(3)])


def test_schwarz(rng):
    B = random_unitary(QuditParams(2, 1), rng)
    rep = schwarz_check(OperatorFamily.constant(B, 2))
    assert rep.holds and rep.lhs == pytest.approx(rep.rhs)
    for k in (2, 3):
        for _ in range(5):
            P = QuditParams(2, 1)
            rep = schwarz_check(OperatorFamily.from_list([random_operator(P, rng) for _ in range(2**k)]))
            assert rep.holds
    rep = schwarz_check(OperatorFamily.from_list([random_unitary(QuditParams(3, 1), rng) for _ in range(4)]))
    assert rep.holds


def test_permutation_identities(rng):
    assert permutation_identity_check(OperatorFamily.constant(np.eye(2), 3)).holds
    B = random_unitary(QuditParams(2, 1), rng)
    rep = permutation_identity_check(OperatorFamily.constant(B, 3))
    assert rep.holds and abs(rep.value - q_measure_exact(B, 3).raw_power) < 1e-12
    for P in (QuditParams(2, 1), QuditParams(3, 1)):
        F = OperatorFamily.from_list([random_unitary(P, rng) for _ in range(8)])
        assert permutation_identity_check(F).holds


def library_gates():
    return [
        named_gate("identity", 2),
        named_gate("fourier", 2),
        named_gate("fourier", 3),
        named_gate("phase_s", 3),
        named_gate("cnot", 2),
        named_gate("cnot", 3),
        named_gate("t"),
        named_gate("ccz", 2),
        weyl(QuditParams(3, 1), (1, 1)),
    ]


def test_monotonicity(rng):
    ops = library_gates()
    ops += [random_operator(QuditParams(2, 1), rng) for _ in range(60)]
    ops += [random_unitary(QuditParams(2, 1), rng) for _ in range(20)]
    ops += [random_operator(QuditParams(3, 1), rng) for _ in range(20)]
    for B in ops:
        v = values(B) if B.dim <= 4 else values(B, (1, 2, 3))
        assert all(a <= b + 1e-9 for a, b in zip(v, v[1:]))


def test_inductive_relation(rng):
    B = random_operator(QuditParams(2, 1), rng)
    for k in (2, 3):
        derivs = all_derivatives(B.matrix, B.params)
        rhs = np.mean([q_measure_exact(D, k - 1).raw_power for D in derivs])
        assert abs(q_measure_exact(B, k).raw_power - rhs) < 1e-12


def test_clifford_and_weyl_invariance(rng):
    for P in (QuditParams(2, 1), QuditParams(2, 2), QuditParams(3, 1)):
        B = random_operator(P, rng)
        U = random_clifford_circuit(P, 12, rng).matrix
        conj = U @ B.matrix @ U.conj().T
        tab = weyl_table(P)
        wb = tab.dense(1) @ B.matrix @ tab.dense(tab.size - 1)
        for k in (1, 2, 3):
            assert abs(q_measure_exact(conj, k).value - q_measure_exact(B, k).value) < 1e-9
            if k >= 2:
                assert abs(q_measure_exact(wb, k).value - q_measure_exact(B, k).value) < 1e-9


def test_triangle_inequality(rng):
    for _ in range(30):
        P = QuditParams(2, 1)
        A, B = random_operator(P, rng), random_operator(P, rng)
        for k in (2, 3):
            lhs = q_measure_exact(A + B, k).value
            assert lhs <= q_measure_exact(A, k).value + q_measure_exact(B, k).value + 1e-9


def test_schatten_domination(rng):
    ops = library_gates() + [random_operator(QuditParams(2, 1), rng) for _ in range(20)]
    ops += [random_operator(QuditParams(3, 1), rng) for _ in range(10)]
    for B in ops:
        for k in (1, 2, 3):
            assert q_measure_exact(B, k).value <= schatten_norm(B, 2**k / (k + 1)) + 1e-9


def test_holder_positive_pairs(rng):
    P = QuditParams(2, 2)
    tab = weyl_table(P)
    for _ in range(10):
        A, B = random_positive(P, rng).matrix, random_positive(P, rng).matrix
        for k in (1, 2, 3):
            vals = [np.trace(np.linalg.matrix_power(tab.conjugate(A, i) @ B, k)) / P.dim for i in range(tab.size)]
            mean = np.mean(vals)
            assert abs(mean.imag) < 1e-12 and mean.real >= -1e-12
            assert mean.real <= schatten_norm(A, k) ** k * schatten_norm(B, k) ** k + 1e-12


def _triple_sides(A, B, k, tab):
    p, r, s = 2**k / (k + 1), 2 ** (k - 1) / k, 2 ** (k - 1)
    lhs = np.mean([schatten_norm(tab.conjugate(A, i) @ B, r) ** s for i in range(tab.size)]) ** (1 / s)
    return lhs, schatten_norm(A, p) * schatten_norm(B, p)


def test_holder_exponent_triple(rng):
    P = QuditParams(2, 2)
    tab = weyl_table(P)
    for _ in range(10):
        A, B = random_operator(P, rng).matrix, random_operator(P, rng).matrix
        for k in (2, 3):
            lhs, rhs = _triple_sides(A, B, k, tab)
            assert lhs <= rhs + 1e-12


def test_holder_exponent_triple_fails_at_k1(rng):
    # k = 1 gives E ||A(a) B||_1 <= ||A||_1 ||B||_1, which random pairs violate
    P = QuditParams(2, 1)
    tab = weyl_table(P)
    ratios = []
    for _ in range(50):
        A, B = random_operator(P, rng).matrix, random_operator(P, rng).matrix
        lhs, rhs = _triple_sides(A, B, 1, tab)
        ratios.append(lhs / rhs)
    assert max(ratios) > 1.01


def log_convexity_gap(rho):
    q1, q2, q3 = (q_measure_exact(rho, k).value for k in (1, 2, 3))
    return math.sqrt(q1 * q3) - q2


def test_log_convexity(rng):
    for P in (QuditParams(2, 1), QuditParams(2, 2), QuditParams(3, 1)):
        for rho in stabilizer_states(P):
            assert abs(log_convexity_gap(rho)) < 1e-12
        for _ in range(5):
            assert log_convexity_gap(random_pure_state(P, rng)) >= -1e-12
    plus = np.array([1, np.exp(1j * np.pi / 4)]) / np.sqrt(2)
    assert log_convexity_gap(StateOperator.from_vector(plus)) > 1e-3


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_bounded_for_unitaries(seed):
    U = random_unitary(QuditParams(2, 1), seed)
    v = values(U)
    assert all(0 <= x <= 1 + 1e-9 for x in v)


def test_ccz_formulas():
    f = ccz_formulas(2)
    assert f["q3_pow8_appendix"] == Fraction(11, 32)
    for d in (3, 5):
        f = ccz_formulas(d)
        assert f["q2_pow4"] == f["q3_pow8_main"]
        assert f["q3_pow8_appendix"] != f["q3_pow8_main"]


def test_ccz_report_d3():
    C = named_gate("ccz", 3)
    q2 = q_measure_exact(C, 2).raw_power
    q3 = q_measure_exact(C, 3).raw_power
    assert q_measure_exact(C, 1).value == pytest.approx(5 / 9)
    rep = ccz_formula_report(3, q2, q3)
    assert q2 == pytest.approx(89 / 729) and q3 == pytest.approx(89 / 729)
    assert rep["q2_matches"] and rep["q3_matches_main"]
    assert not rep["q3_matches_appendix"]
