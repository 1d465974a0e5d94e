import pytest
from mpmath import iv, mp

from approx.linear_form import LinearForm, s_of_n
from approx.machine import BudgetExceeded, build_approx, residual_direct, truncated_residual_exact
from approx.norm_audit import norm_contradiction_check
from approx.residual import (
    CHECK_NAMES,
    ROUTE_FULL,
    ROUTE_LEMMA,
    lower_constants,
    oracle_check,
    residual_series,
    scaled_u_sum,
    upper_constant,
)
from lab.config import Budgets
from numfield.ball import interval_precision, lower, upper
from numfield.element import FieldElement
from numfield.number_field import parse_field
from witness.congruence import ThresholdError, shift_witness

GOLDEN = [-1, -1, 1]
TWO = [-2, 1]


def test_linear_form_values():
    nf = parse_field(GOLDEN)
    form = LinearForm.from_coords(nf, [[0], [1]])
    assert s_of_n(form, 3).is_zero()
    assert s_of_n(LinearForm.from_coords(nf, [[1], [0]]), 3).is_zero()
    both = LinearForm.from_coords(nf, [[1], [1]])
    assert s_of_n(both, 1) == FieldElement.from_int(nf, 2)
    with pytest.raises(ValueError, match="Leading coefficient"):
        LinearForm.from_coords(nf, [[1], [0]]).require_leading()


def test_build_approx_small_case():
    nf = parse_field(TWO)
    form = LinearForm.indicator(nf, 2)
    pair = build_approx(shift_witness(2), form, nf, 1)
    assert pair.kappa == 1
    assert sorted(pair.q_poly) == [2, 4]
    assert pair.q_poly[4].coords == (1,)
    assert pair.q_poly[2].coords == (-1,)
    assert pair.evaluate_q().is_zero() is False
    # q_N(1) = 0
    assert sum(c.coords[0] for c in pair.q_poly.values()) == 0
    assert pair.materialized
    assert set(pair.p_poly) <= {1, 2, 3}


def test_build_approx_respects_term_budget():
    nf = parse_field(GOLDEN)
    pair = build_approx(shift_witness(2), LinearForm.indicator(nf, 2), nf, 15)
    assert not pair.materialized
    with pytest.raises(BudgetExceeded):
        pair.evaluate_p()


@pytest.mark.parametrize("poly", [TWO, GOLDEN])
@pytest.mark.parametrize("N", [3, 4, 5])
def test_truncated_residual_routes_agree_exactly(poly, N):
    nf = parse_field(poly)
    form = LinearForm.from_coords(nf, [[0], [1]])
    pair = build_approx(shift_witness(2), form, nf, N)
    direct, profile = truncated_residual_exact(pair, pair.degree + 40)
    assert direct == profile


def test_truncation_must_cover_q():
    nf = parse_field(TWO)
    pair = build_approx(shift_witness(2), LinearForm.indicator(nf, 2), nf, 3)
    with pytest.raises(ValueError):
        truncated_residual_exact(pair, pair.degree - 1)


@pytest.mark.parametrize("poly", [TWO, GOLDEN])
@pytest.mark.parametrize("N", [3, 4, 5])
def test_oracle_equivalence(poly, N):
    nf = parse_field(poly)
    w = shift_witness(2)
    form = LinearForm.from_coords(nf, [[0], [1]])
    report = residual_series(w, form, nf, N, enforce_threshold=False)
    assert report.route == ROUTE_FULL
    assert report.below_threshold
    oracle = oracle_check(build_approx(w, form, nf, N), report)
    assert oracle.exact_agreement
    assert oracle.overlap


def test_zero_form_residual_is_exactly_zero():
    nf = parse_field(GOLDEN)
    zero = LinearForm.from_coords(nf, [[0], [0]])
    pair = build_approx(shift_witness(2), zero, nf, 3)
    ball = residual_direct(pair, pair.degree + 8, 64)
    assert lower(ball) == upper(ball) == 0


def test_residual_lower_bound_golden_N15():
    nf = parse_field(GOLDEN)
    report = residual_series(shift_witness(2), LinearForm.indicator(nf, 2), nf, 15)
    assert report.route == ROUTE_LEMMA
    assert list(report.checks) == list(CHECK_NAMES)
    assert report.passed, report.checks
    with interval_precision(128):
        floor = report.lower_const - report.epsilon
        assert (abs(report.scaled) >= floor) is True
        assert (abs(report.residual_scaled) <= report.upper_const) is True
    assert abs(int(report.u_profile[0]) - (1 << 15)) == 1


def test_residual_upper_bound_at_two():
    nf = parse_field(TWO)
    report = residual_series(shift_witness(2), LinearForm.from_coords(nf, [[0], [1]]), nf, 15)
    assert report.checks["upperBound"]
    assert report.checks["decayLaw"]
    assert report.checks["positivity"]


def test_residual_threshold_and_leading_coefficient():
    nf = parse_field(GOLDEN)
    w = shift_witness(2)
    with pytest.raises(ThresholdError):
        residual_series(w, LinearForm.indicator(nf, 2), nf, 12)
    with pytest.raises(ValueError, match="Leading coefficient"):
        residual_series(w, LinearForm.from_coords(nf, [[1], [0]]), nf, 15)


def test_constants_at_golden_ratio():
    with interval_precision(128):
        beta = (1 + iv.sqrt(5)) / 2
        lower_const, printed, epsilon = lower_constants(beta, 15)
        # beta^4 - beta^2 - 1 = 2 beta for the golden ratio
        assert mp.mpf("0.4721") < lower(lower_const) < mp.mpf("0.4722")
        assert (printed > lower_const) is True
        assert (epsilon < mp.ldexp(1, -1000)) is True
        C = upper_constant(iv.mpf(1), beta, 3, 1 << 4)
        assert (C > beta ** 2) is True


def test_scaled_u_sum_skip_and_empty():
    w = shift_witness(2)
    with interval_precision(128):
        beta = iv.mpf(2)
        top = 1 << 15
        assert scaled_u_sum(w, 15, beta, top) == iv.mpf(0)
        full = scaled_u_sum(w, 15, beta, top + 64)
        rest = scaled_u_sum(w, 15, beta, top + 64, skip=[top + 1])
        assert abs(full - rest) == iv.mpf(0.5)


def test_norm_audit_golden():
    nf = parse_field(GOLDEN)
    w = shift_witness(2)
    form = LinearForm.from_coords(nf, [[0], [1]])
    report = norm_contradiction_check(w, form, nf, [10, 10])
    assert report.passed
    assert report.N0 >= 15
    assert report.trail[report.N0]
    doubled = norm_contradiction_check(w, form, nf, [20, 20])
    assert doubled.N0 >= report.N0
    with pytest.raises(ValueError):
        norm_contradiction_check(w, LinearForm.from_coords(nf, [[0], [0]]), nf, [1, 1])


def test_budget_exceeded_for_long_truncations():
    nf = parse_field(TWO)
    pair = build_approx(shift_witness(2), LinearForm.indicator(nf, 2), nf, 3)
    with pytest.raises(BudgetExceeded):
        truncated_residual_exact(pair, 100000, Budgets(term_budget=1000))
