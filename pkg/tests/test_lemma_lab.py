import numpy as np
import pytest

from lab.config import Budgets
from lemma_lab.sampling import PlanError, Segment, _draw, explicit_plan, plan_for, sample_plan
from lemma_lab.shift_invariance import (
    LEMMA_LOWER,
    LEMMA_SHIFT,
    LEMMA_SPECIAL,
    check_coefficient_bounds,
    check_congruence_identity,
    check_special_decomposition,
    coefficient_terms,
    resolve_lemma,
    special_point_terms,
    u_value,
    verify_lemmas,
    verify_lower_powers,
    verify_shift_invariance,
    verify_special_j,
)
from lemma_lab.sweep import run_sweep
from witness.congruence import ThresholdError, min_valid_N, shift_witness

TOP = 1 << 15


def test_u_value_examples():
    w = shift_witness(2)
    assert u_value(w, 15, 0) == 0
    assert abs(u_value(w, 15, TOP + 1)) == 1
    assert u_value(w, 15, TOP + 3) == 0


def test_shift_invariance_full_range_k2():
    report = verify_shift_invariance(shift_witness(2), 15)
    assert report.passed
    assert not report.sampled
    assert report.j_tested == TOP + (1 << 12) + 1


def test_shift_invariance_sampled_k3():
    w = shift_witness(3)
    budgets = Budgets(sample_budget=20000)
    report = verify_shift_invariance(w, min_valid_N(w), budgets=budgets, seed=42)
    assert report.sampled
    assert report.j_tested == 20000
    assert report.j_failed == []


def test_plan_outside_range_rejected():
    w = shift_witness(2)
    with pytest.raises(PlanError):
        verify_shift_invariance(w, 15, plan=explicit_plan([TOP + 1]))


def test_below_threshold_rejected():
    with pytest.raises(ThresholdError):
        verify_special_j(shift_witness(2), 14)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 8])
def test_special_points(k):
    w = shift_witness(k)
    report = verify_special_j(w, min_valid_N(w))
    assert report.passed
    assert report.j_tested == 2
    assert report.observed_sign in (-1, 1)


def test_lower_powers_full_range_k2():
    report = verify_lower_powers(shift_witness(2), 15, 1)
    assert report.passed
    assert report.j_tested == (1 << 22) + 1


def test_lower_powers_sampled_k3():
    w = shift_witness(3)
    budgets = Budgets(sample_budget=5000)
    for r in (1, 2):
        report = verify_lower_powers(w, min_valid_N(w), r, budgets=budgets)
        assert report.sampled
        assert report.passed


def test_lower_powers_rejects_r_equal_k():
    with pytest.raises(ValueError, match="Power r"):
        verify_lower_powers(shift_witness(2), 15, 2)


def test_verify_lemmas_all_k2():
    reports = verify_lemmas(shift_witness(2), 15, budgets=Budgets(full_range_limit=1 << 16, sample_budget=4096))
    assert [r.lemma for r in reports] == [LEMMA_SHIFT, LEMMA_SPECIAL, LEMMA_LOWER]
    assert all(r.passed for r in reports)
    assert reports[2].sampled
    with pytest.raises(ValueError):
        verify_lemmas(shift_witness(2), 15, lemma="2.5")


def test_coefficient_terms_and_bounds():
    w = shift_witness(2)
    assert coefficient_terms(w, 3) == [9, 6, 1]
    assert check_coefficient_bounds(w, 15, range(0, TOP + (1 << 13) + 1, 97)) == []
    # below the threshold the bound is not vacuous
    assert check_coefficient_bounds(w, 2, range(0, 6)) == [4, 5]


def test_congruence_identity_shortcut():
    for k in (2, 3):
        w = shift_witness(k)
        N = min_valid_N(w)
        js = list(range(0, 2048)) + [(1 << N) - 1]
        assert check_congruence_identity(w, N, js) == []


def test_sample_plan_properties():
    full = sample_plan(100, 200, seed=3)
    assert list(full) == list(range(101))
    assert not full.sampled
    big = sample_plan(1 << 41, 1000, seed=42)
    values = list(big)
    assert len(set(values)) == 1000
    assert 0 in values and (1 << 41) in values
    assert list(sample_plan(1 << 41, 1000, seed=42)) == values


def test_sweep_is_independent_of_workers():
    w = shift_witness(2)
    low, high = w.y << w.kappa(5), w.y << (w.kappa(5) + 1)
    plan = plan_for([Segment(0, 4096)], 1 << 20, 100)
    assert run_sweep(low, high, 2, plan, workers=1, chunk=256) == run_sweep(low, high, 2, plan, workers=2, chunk=256)


def test_numbered_lemma_aliases():
    assert [resolve_lemma(n) for n in ("2.2", "2.3", "2.4")] == [LEMMA_SHIFT, LEMMA_SPECIAL, LEMMA_LOWER]
    assert resolve_lemma("all") == "all"
    reports = verify_lemmas(shift_witness(2), 15, lemma="2.3")
    assert [r.lemma for r in reports] == [LEMMA_SPECIAL]
    with pytest.raises(ValueError, match="Unknown lemma"):
        resolve_lemma("2.1")


def test_special_point_blocks_k2():
    w = shift_witness(2)
    assert special_point_terms(w, 3, 1) == ([9, 6], 1 + w.z * 3 * 2, [w.z])
    assert special_point_terms(w, 1, 0) == ([1, 2], 1 + w.z, [w.z])


@pytest.mark.parametrize("k", [2, 3])
def test_special_point_decomposition(k):
    w = shift_witness(k)
    N = min_valid_N(w)
    assert check_special_decomposition(w, N) == []
    assert check_special_decomposition(w, N + 7) == []
    report = verify_special_j(w, N)
    assert report.decomposition_failed == []
    assert report.to_json()["decompositionFailed"] == []


def test_special_point_decomposition_needs_threshold():
    with pytest.raises(ThresholdError):
        check_special_decomposition(shift_witness(2), 3)


def test_draws_cover_wide_ranges():
    size = (1 << 70) + 3
    values = _draw(np.random.default_rng(1), size, 500)
    assert len(values) == 500
    assert all(0 <= v < size for v in values)
    assert max(values) > 1 << 64
    assert _draw(np.random.default_rng(1), size, 500) == values
    assert set(_draw(np.random.default_rng(2), 7, 200)) == set(range(7))
