from fractions import Fraction as F

from hypothesis import given, strategies as st

from hsecagg.rates import compare, rate_region, region_for
from hsecagg.params import EXAMPLE_1, EXAMPLE_2


def test_example_regions():
    r1 = rate_region(EXAMPLE_1)
    assert (r1.rx1_min, r1.ry1_min, r1.rx2_min, r1.ry2_lower, r1.ry2_upper) == (1, 1, F(1, 2), F(1, 2), F(1, 2))
    assert r1.tight
    r2 = rate_region(EXAMPLE_2)
    assert r2.rx2_min == F(1, 2) and r2.rx2_stated == 1
    assert r2.ry2_lower == r2.ry2_upper == 1 and r2.tight


def test_infeasible_region_has_no_rates():
    r = region_for(1, 2, 2)
    assert not r.feasible and r.rx1_min is None and r.ry2_upper is None
    assert "U0*V0 <= T" in r.reason


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 30))
def test_region_invariants(U0, V0, T):
    r = region_for(U0, V0, T)
    assert r.feasible == (U0 * V0 > T)
    if r.feasible:
        assert r.ry2_lower <= r.ry2_upper
        assert r.tight == (T % V0 == 0)
        assert r.ry2_upper == 1 / (U0 - F(T, V0))


def test_compare_accepts_scheme_rates():
    rep = compare((1, 1, F(1, 2), F(1, 2)), rate_region(EXAMPLE_1))
    assert rep.passed and not rep.internal_errors
    rep = compare((1, 1, F(1, 2), 1), rate_region(EXAMPLE_2))
    assert rep.passed


def test_compare_flags_converse_violation():
    rep = compare((1, 1, F(1, 2), F(1, 3)), rate_region(EXAMPLE_2))
    assert not rep.passed
    assert rep.internal_errors == ["Ry2=1/3 below converse bound 1"]
    assert "rate Ry2 measured=1/3 expected=1 pass=false" in rep.lines()
