import numpy as np
import pytest

from qhofa.errors import DegenerateInput, DimensionError, DomainError, PreconditionError
from qhofa.gates import named_gate, random_operator, random_unitary
from qhofa.operators import (
    DenseOperator,
    StateOperator,
    equal_up_to_phase,
    identity,
    normalized_inner,
    normalized_trace,
    schatten_norm,
    tensor,
)
from qhofa.phase_space import QuditParams
from qhofa.weyl import char_spectrum, weyl

X = np.array([[0, 1], [1, 0]])
Z = np.diag([1, -1])


def test_dense_operator_validation():
    with pytest.raises(DimensionError):
        DenseOperator(np.eye(6))
    with pytest.raises(DimensionError):
        DenseOperator(np.ones((2, 3)))
    with pytest.raises(DomainError):
        DenseOperator([[np.nan, 0], [0, 1]])
    op = DenseOperator(np.eye(9))
    assert op.params == QuditParams(3, 2)
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 2


def test_state_validation():
    StateOperator(np.eye(2) / 2)
    with pytest.raises(PreconditionError):
        StateOperator(np.eye(2))
    with pytest.raises(PreconditionError):
        StateOperator([[1, 1], [0, 0]])
    with pytest.raises(PreconditionError):
        StateOperator(np.diag([1.5, -0.5]))
    assert StateOperator.from_vector([1, 1j]).is_pure()


def test_inner_and_trace_examples():
    P = QuditParams(2, 1)
    assert normalized_inner(identity(P), identity(P)) == pytest.approx(1)
    assert normalized_inner(Z, X) == pytest.approx(0)
    for a in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        assert normalized_inner(weyl(P, a), weyl(P, a)) == pytest.approx(1)
    assert normalized_trace(named_gate("cnot")) == pytest.approx(0.5)
    assert normalized_trace(named_gate("ccz")) == pytest.approx(0.75)
    with pytest.raises(DimensionError):
        normalized_inner(np.eye(2), np.eye(4))


def test_schatten_examples(rng):
    P = QuditParams(2, 2)
    U = random_unitary(P, rng)
    for p in (0.5, 1, 2, 3, np.inf):
        assert schatten_norm(identity(P), p) == pytest.approx(1)
        assert schatten_norm(U, p) == pytest.approx(1)
    assert schatten_norm(np.diag([1, 0]), 1) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        schatten_norm(U, 0)


def test_schatten_monotone_and_parseval(rng):
    for _ in range(100):
        B = random_operator(QuditParams(2, 2), rng)
        norms = [schatten_norm(B, p) for p in (0.5, 1, 1.5, 2, 4, 8)]
        # normalized norms are power means of the singular values, so they grow with p
        assert all(a <= b + 1e-12 for a, b in zip(norms, norms[1:]))
        l2 = np.sqrt(np.sum(np.abs(char_spectrum(B).coeffs) ** 2))
        assert abs(schatten_norm(B, 2) - l2) < 1e-10


def test_tensor():
    P = QuditParams(2, 1)
    assert tensor(identity(P), identity(P)).allclose(np.eye(4))
    zx = tensor(Z, X)
    ok, _ = equal_up_to_phase(zx, weyl(QuditParams(2, 2), (1, 0, 0, 1)))
    assert ok
    A, B = np.diag([1, 2j]), np.array([[3, 1], [0, 5]])
    assert np.trace(tensor(A, B).matrix) == pytest.approx(np.trace(A) * np.trace(B))
    with pytest.raises(DimensionError):
        tensor(np.eye(2), np.eye(3))


def test_equal_up_to_phase():
    ok, c = equal_up_to_phase(1j * X, X)
    assert ok and c == pytest.approx(1j)
    assert not equal_up_to_phase(X, Z)[0]
    P = QuditParams(3, 1)
    w = weyl(P, (1, 2))
    ok, c = equal_up_to_phase(w * P.omega, w)
    assert ok and c == pytest.approx(P.omega)
    with pytest.raises(DegenerateInput):
        equal_up_to_phase(X, np.zeros((2, 2)))
