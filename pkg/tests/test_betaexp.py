import pytest

from approx.machine import BudgetExceeded
from betaexp.expansion import beta_expand, detect_period, expand_series_value, reconstruct, series_ball
from numfield.ball import interval_precision, lower, upper
from numfield.number_field import parse_field
from thue_morse.sequence import tm_pow

GOLDEN = [-1, -1, 1]
TWO = [-2, 1]


def test_one_third_in_base_two():
    nf = parse_field(TWO)
    e = beta_expand(nf, [1], 3, 12)
    assert e.digits == [0, 1] * 6
    assert (e.preperiod, e.period) == (0, 2)
    assert reconstruct(nf, [1], 3, e)
    assert e.to_json()["periodic"] is True


def test_golden_beta_minus_one_terminates():
    nf = parse_field(GOLDEN)
    e = beta_expand(nf, [-1, 1], 1, 6)
    assert e.digits == [1, 0, 0, 0, 0, 0]
    assert (e.preperiod, e.period) == (1, 1)
    assert e.orbit[1] == ((0, 0), 1)
    assert reconstruct(nf, [-1, 1], 1, e)


def test_reconstruct_general_element():
    nf = parse_field(GOLDEN)
    e = beta_expand(nf, [2, -1], 5, 8)
    assert reconstruct(nf, [2, -1], 5, e)


def test_rejects_values_outside_unit_interval():
    nf = parse_field(TWO)
    with pytest.raises(ValueError, match="outside"):
        beta_expand(nf, [3], 3, 4)
    with pytest.raises(ValueError):
        beta_expand(nf, [5], 3, 4)
    with pytest.raises(ValueError):
        beta_expand(nf, [1], 0, 4)


def test_coordinate_budget():
    nf = parse_field(GOLDEN)
    with pytest.raises(BudgetExceeded):
        beta_expand(nf, [1, 0], 7, 400, coordinate_bits=1)


def test_detect_period():
    a, b, c = ((1,), 2), ((3,), 4), ((5,), 6)
    assert detect_period([a, b, c, b]) == (1, 2)
    assert detect_period([a, b, c]) is None


def test_series_digits_at_two_are_thue_morse_of_squares():
    nf = parse_field(TWO)
    e = expand_series_value(nf, 2, 256, 128)
    assert not e.exact
    assert e.period is None
    assert e.scale == 0
    assert e.digits == [tm_pow(n, 2) for n in range(1, 129)]


def test_series_ball_encloses_partial_sums():
    nf = parse_field(GOLDEN)
    with interval_precision(128):
        short = series_ball(nf, 1, 32, 128)
        longer = series_ball(nf, 1, 96, 128)
        assert lower(short) <= lower(longer) <= upper(longer) <= upper(short)
