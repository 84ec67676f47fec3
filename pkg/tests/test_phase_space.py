import itertools

import numpy as np
import pytest

from qhofa.errors import DimensionError, DomainError, EnumerationTooLarge
from qhofa.phase_space import (
    PhasePoint,
    QuditParams,
    enumerate_phase_points,
    phase_point_array,
    sample_phase_point,
    set_enumeration_cap,
    symplectic_form,
)


def pt(d, n, *c):
    return PhasePoint.from_coords(QuditParams(d, n), c)


def test_params_reject_composite_and_bad_n():
    for d in (0, 1, 4, 6, 9):
        with pytest.raises(DomainError):
            QuditParams(d, 1)
    with pytest.raises(DomainError):
        QuditParams(3, 0)
    with pytest.raises(DomainError):
        QuditParams(2, 40)  # 2^80 overflows int64 indices


def test_params_basic_properties():
    P = QuditParams(3, 2)
    assert P.dim == 9 and P.num_points == 81
    assert P.half == 2
    assert abs(P.zeta**2 - P.omega) < 1e-15
    assert abs(QuditParams(2, 1).zeta - 1j) < 1e-15
    assert QuditParams.for_dimension(27) == QuditParams(3, 3)
    with pytest.raises(DimensionError):
        QuditParams.for_dimension(6)


def test_symplectic_examples():
    assert symplectic_form(pt(2, 1, 1, 0), pt(2, 1, 0, 1)) == 1
    assert symplectic_form(pt(3, 1, 2, 1), pt(3, 1, 1, 2)) == 0
    with pytest.raises(DimensionError):
        symplectic_form(pt(2, 1, 1, 0), pt(3, 1, 1, 0))


@pytest.mark.parametrize("d,n", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_symplectic_is_alternating_bilinear_nondegenerate(d, n):
    pts = enumerate_phase_points(QuditParams(d, n))
    for a in pts:
        assert symplectic_form(a, a) == 0
        if not a.is_zero():
            assert any(symplectic_form(a, b) != 0 for b in pts)
    for a, b in itertools.product(pts[:20], pts):
        assert symplectic_form(a, b) == (-symplectic_form(b, a)) % d
        c = pts[(a.index * 7 + 3) % len(pts)]
        assert symplectic_form(a + c, b) == (symplectic_form(a, b) + symplectic_form(c, b)) % d


def test_enumeration_order_and_counts():
    P = QuditParams(2, 1)
    assert [p.coords for p in enumerate_phase_points(P)] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert len(enumerate_phase_points(QuditParams(3, 1))) == 9
    assert len(enumerate_phase_points(QuditParams(2, 3))) == 64
    arr = phase_point_array(QuditParams(3, 2))
    assert all(PhasePoint(QuditParams(3, 2), tuple(row)).index == i for i, row in enumerate(arr))


def test_enumeration_cap(monkeypatch):
    set_enumeration_cap(10)
    try:
        with pytest.raises(EnumerationTooLarge, match="cap of 10"):
            enumerate_phase_points(QuditParams(2, 2))
    finally:
        set_enumeration_cap(None)
    monkeypatch.setenv("QHOFA_ENUM_CAP", "8")
    with pytest.raises(EnumerationTooLarge):
        enumerate_phase_points(QuditParams(3, 1))


def test_point_arithmetic_and_validation():
    P = QuditParams(3, 1)
    a = PhasePoint(P, (2, 1))
    assert (a + a).coords == (1, 2)
    assert (-a).coords == (1, 2)
    assert (a - a).is_zero()
    assert PhasePoint.from_index(P, a.index) == a
    assert PhasePoint.from_pq(P, [2], [1]) == a
    with pytest.raises(DomainError):
        PhasePoint(P, (3, 0))
    with pytest.raises(DimensionError):
        PhasePoint(P, (1, 0, 0, 0))


def test_sampling_deterministic_and_uniform():
    P = QuditParams(2, 1)
    assert sample_phase_point(P, np.random.default_rng(5)) == sample_phase_point(P, np.random.default_rng(5))
    rng = np.random.default_rng(0)
    idx = rng.integers(0, 4, size=10**5)
    freq = np.bincount(idx, minlength=4) / 10**5
    assert np.all(np.abs(freq - 0.25) < 0.01)
    P = QuditParams(3, 2)
    for _ in range(50):
        assert all(0 <= c < 3 for c in sample_phase_point(P, rng).coords)
