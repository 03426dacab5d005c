"""Numeric substrate: scalar coercions, determinants, q-Pochhammer."""

from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from peakonflow import _num
from peakonflow.errors import ValidationError

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=40)


def test_as_exact_parsing():
    assert _num.as_exact("3/4") == Fraction(3, 4)
    assert _num.as_exact("0.25") == Fraction(1, 4)
    assert _num.as_exact("2.5e-3") == Fraction(1, 400)
    assert _num.as_exact(7) == Fraction(7)
    assert _num.as_exact(0.5) == Fraction(1, 2)
    with pytest.raises(ValidationError):
        _num.as_exact("forty")


def test_to_mpf_precision_scoping():
    x = Fraction(1, 3)
    with mp.workdps(50):
        hi = _num.to_mpf(x)
    with mp.workdps(15):
        lo = _num.to_mpf(x)
    assert hi != lo  # conversions honor the active precision
    with mp.workdps(50):
        assert abs(hi - mp.mpf(1) / 3) < mp.mpf("1e-48")


def test_sign_of():
    assert _num.sign_of(Fraction(-3, 7)) == -1
    assert _num.sign_of(0) == 0
    assert _num.sign_of(mp.mpf("1e-300")) == 1


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(rationals, min_size=3, max_size=3),
                min_size=3, max_size=3))
def test_det_exact_matches_sympy(rows):
    import sympy
    want = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator)
                          for x in r] for r in rows]).det()
    got = _num.det_exact(rows)
    assert Fraction(want.p, want.q) == got


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(rationals, min_size=4, max_size=4),
                min_size=4, max_size=4))
def test_det_mpf_tracks_exact(rows):
    want = _num.det_exact(rows)
    with mp.workdps(40):
        got = _num.det_mpf(rows)
        scale = max([abs(_num.to_mpf(x)) for r in rows for x in r] + [mp.mpf(1)])
        assert abs(got - _num.to_mpf(want)) <= mp.mpf("1e-30") * scale ** 4


def test_det_empty_and_singular():
    assert _num.det_exact([]) == 1
    assert _num.det_exact([[1, 2], [2, 4]]) == 0
    with mp.workdps(30):
        assert _num.det_mpf([[1, 2], [2, 4]]) == 0


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(rationals, min_size=4, max_size=4),
                min_size=4, max_size=4))
def test_leading_minors_exact_definition(rows):
    minors, broke = _num.leading_minors_exact(rows)
    # each reported minor equals the determinant of the leading block
    for k in range(1, len(minors)):
        want = _num.det_exact([r[:k] for r in rows[:k]])
        assert minors[k] == want
        if minors[k] == 0:
            assert broke == k
            break
    else:
        assert broke is None


def test_leading_minors_mpf_positive_definite():
    # Hilbert-like positive definite matrix: full chain, all positive
    rows = [[Fraction(1, i + j + 1) for j in range(5)] for i in range(5)]
    with mp.workdps(40):
        minors, broke = _num.leading_minors_mpf(rows)
        assert broke is None
        exact, _ = _num.leading_minors_exact(rows)
        for m, w in zip(minors[1:], exact[1:]):
            assert abs(m - _num.to_mpf(w)) <= mp.mpf("1e-25") * abs(_num.to_mpf(w))


def test_qpoch_exact_and_infinite():
    # (a;q)_3 = (1-a)(1-aq)(1-aq^2) by definition
    a, q = Fraction(1, 2), Fraction(1, 3)
    want = (1 - a) * (1 - a * q) * (1 - a * q ** 2)
    assert _num.qpoch(a, q, 3) == want
    assert _num.qpoch(a, q, 0) == 1
    with mp.workdps(40):
        got = _num.qpoch(a, q)
        assert abs(got - mp.qp(_num.to_mpf(a), _num.to_mpf(q))) < mp.mpf("1e-35")


def test_work_digits_monotone():
    assert _num.work_digits(60, 4) >= 60 + 25
    assert _num.work_digits(60, 100) > _num.work_digits(60, 10)
    assert _num.work_digits(200, 10) - _num.work_digits(100, 10) == 100


def test_rel_err():
    with mp.workdps(30):
        assert _num.rel_err(mp.mpf(2), mp.mpf(2)) == 0
        assert abs(_num.rel_err(mp.mpf("2.02"), mp.mpf(2)) - mp.mpf("0.01")) < mp.mpf("1e-12")


def test_geometric_mean():
    with mp.workdps(30):
        assert abs(_num.geometric_mean([2, 8]) - 4) < mp.mpf("1e-25")
        assert _num.geometric_mean([0, 0]) == 0
