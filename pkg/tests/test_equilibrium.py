import math

import numpy as np
import pytest

from disclosure_game import Beta, TruncatedNormal
from disclosure_game.equilibrium import (
    RESIDUAL_TOL,
    DynamicCosts,
    SolverError,
    auxiliary_price,
    count_sign_changes,
    equilibrium_price_curve,
    late_branch_thresholds,
    price_path_analysis,
    solve_benchmark,
    solve_dynamic,
    solve_early,
    solve_frequent,
    solve_late,
    solve_late_curve,
)
from disclosure_game.pricing import benchmark_price, expected_nondisclosure_price
from conftest import make_params

V_BENCH_P05 = math.sqrt(2.0) - 1.0
V_BENCH_P06 = (math.sqrt(10.0) - 2.0) / 3.0


# ---------------------------------------------------------------------------
# benchmark


def test_benchmark_uniform_closed_forms():
    assert solve_benchmark(make_params(0.5, 0.3)).threshold == pytest.approx(
        V_BENCH_P05, abs=1e-10
    )
    assert solve_benchmark(make_params(0.6, 0.15)).threshold == pytest.approx(
        V_BENCH_P06, abs=1e-10
    )


def test_benchmark_decreasing_in_endowment_probability():
    vals = [solve_benchmark(make_params(p, 0.5)).threshold for p in np.arange(0.1, 0.91, 0.1)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_benchmark_unique_root_audit():
    params = make_params(0.5, 0.5)
    f = lambda v: v - benchmark_price(params, v)
    assert count_sign_changes(f, 0.0, params.mu) == 1


def test_benchmark_nonuniform_priors():
    for dist in (Beta(2.0, 2.0), TruncatedNormal(0.5, 0.25, 0.0, 1.0)):
        res = solve_benchmark(make_params(0.5, 0.5, dist))
        assert res.residual < RESIDUAL_TOL
        assert dist.lo < res.threshold < dist.mean()


# ---------------------------------------------------------------------------
# early


def test_early_frozen_values():
    assert solve_early(make_params(0.9, 0.75)).threshold == pytest.approx(
        0.3201496353583057, abs=1e-9
    )
    assert solve_early(make_params(0.5, 0.3)).threshold == pytest.approx(
        0.4201317625698767, abs=1e-9
    )


def test_early_bracket_and_residual():
    res = solve_early(make_params(0.5, 0.3))
    vb = solve_benchmark(make_params(0.5, 0.3)).threshold
    assert vb < res.threshold < 0.5
    assert res.residual < RESIDUAL_TOL


def test_early_unique_root_audit():
    params = make_params(0.5, 0.3)
    vb = solve_benchmark(params).threshold
    f = lambda v: v - expected_nondisclosure_price(params, v, v)
    assert count_sign_changes(f, vb + 1e-9, params.mu) == 1


def test_early_collapses_to_benchmark_without_veracity():
    params = make_params(0.5, 1e-7)
    assert solve_early(params).threshold == pytest.approx(V_BENCH_P05, abs=1e-4)


def test_early_price_curve_jumps_down_only():
    curve = equilibrium_price_curve(make_params(0.5, 0.3))
    assert curve.left_limit_at_vhat > curve.right_limit_at_vhat
    # each branch is increasing, so the only decrease is the jump
    le = curve.price[curve.branch == "le"]
    gt = curve.price[curve.branch == "gt"]
    assert np.all(np.diff(le) > 0) and np.all(np.diff(gt) > 0)


# ---------------------------------------------------------------------------
# late


def test_late_frozen_values():
    params = make_params(0.5, 0.3)
    assert solve_late(params, 0.2) == pytest.approx(0.3318835782146233, abs=1e-9)
    assert solve_late(params, 0.65) == pytest.approx(0.4682572889656838, abs=1e-9)


def test_late_fixed_point_at_benchmark_signal():
    for q in (0.1, 0.5, 0.9):
        params = make_params(0.5, q)
        assert solve_late(params, V_BENCH_P05) == pytest.approx(V_BENCH_P05, abs=1e-9)


def test_late_threshold_straddles_signal():
    params = make_params(0.5, 0.3)
    for s in (0.05, 0.2, 0.35):
        assert solve_late(params, s) > s
    for s in (0.5, 0.65, 0.9):
        assert solve_late(params, s) < s


def test_late_q_monotonicity_switches_at_benchmark():
    qs = (0.1, 0.4, 0.7, 0.95)
    low = [solve_late(make_params(0.5, q), 0.2) for q in qs]
    high = [solve_late(make_params(0.5, q), 0.65) for q in qs]
    assert all(b < a for a, b in zip(low, low[1:]))
    assert all(b > a for a, b in zip(high, high[1:]))


def test_late_curve_kink_and_slopes():
    params = make_params(0.9, 0.6)
    vb = solve_benchmark(params).threshold
    curve = solve_late_curve(params, 201)
    assert curve.kink_at == pytest.approx(vb, abs=1e-9)
    h = 0.01
    slope_below = (curve(vb - h) - curve(vb - 2 * h)) / h
    slope_above = (curve(vb + 2 * h) - curve(vb + h)) / h
    assert 1.0 > slope_below > slope_above > 0.0


def test_auxiliary_price_gap_decreasing_in_conjecture():
    params = make_params(0.6, 0.4)
    for theta in (0, 1):
        grid = np.linspace(0.05, 0.95, 31)
        gap = [auxiliary_price(params, 0.3, float(v), theta) - v for v in grid]
        assert all(b < a for a, b in zip(gap, gap[1:]))


def test_branch_threshold_gap_changes_sign_at_benchmark():
    params = make_params(0.5, 0.3)
    gaps = []
    grid = np.linspace(0.05, 0.95, 19)
    for s in grid:
        v0, v1 = late_branch_thresholds(params, float(s))
        gaps.append(v1 - v0)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert np.interp(V_BENCH_P05, grid, gaps) == pytest.approx(0.0, abs=5e-3)


# ---------------------------------------------------------------------------
# frequent repricing


def test_frequent_frozen_value():
    res = solve_frequent(make_params(0.5, 0.3), 0.5)
    assert res.threshold == pytest.approx(0.4168057406656355, abs=1e-9)


def test_frequent_limits_and_monotonicity():
    params = make_params(0.5, 0.3)
    assert solve_frequent(params, 0.0).threshold == pytest.approx(V_BENCH_P05, abs=1e-9)
    vals = [solve_frequent(params, d).threshold for d in (0.1, 0.5, 0.9)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < solve_early(params).threshold
    # even full patience keeps the threshold below the commitment one
    assert solve_frequent(params, 1.0).threshold < solve_early(params).threshold


def test_price_path_late_mode():
    report = price_path_analysis(make_params(0.5, 0.3), "late")
    assert report["all_below"] and report["min_gap"] > 0


def test_price_path_early_mode():
    report = price_path_analysis(make_params(0.5, 0.3), "early", delta=0.5)
    assert report["sign_pattern"] == ("+", "-", "+", "-")
    assert 0.0 < report["s_dagger_dagger"] < report["v_tilde_early"]
    # above the threshold the gap flips sign exactly at the prior mean
    a, b = report["intervals"][2]
    assert b == pytest.approx(0.5)


# ---------------------------------------------------------------------------
# dynamic game


def test_dynamic_frozen_values():
    res = solve_dynamic(make_params(0.5, 0.3), DynamicCosts(0.01, 0.03))
    assert res.threshold == pytest.approx(0.4637686563264596, abs=1e-9)
    res = solve_dynamic(make_params(0.5, 0.5), DynamicCosts(0.01, 0.05))
    assert res.threshold == pytest.approx(0.4837361401559508, abs=1e-9)


def test_dynamic_no_early_disclosure_when_delay_is_cheaper():
    res = solve_dynamic(make_params(0.5, 0.3), DynamicCosts(0.05, 0.01))
    assert res.threshold == 1.0
    assert any("no early disclosure" in n for n in res.regime_notes)
    assert res.curve is not None


def test_dynamic_thresholds_increase_in_own_cost():
    params = make_params(0.5, 0.3)
    early = [
        solve_dynamic(params, DynamicCosts(ce, 0.03)).threshold
        for ce in (0.005, 0.01, 0.02)
    ]
    assert all(b > a for a, b in zip(early, early[1:]))
    late = [
        max(solve_dynamic(params, DynamicCosts(0.01, cl)).curve.v_late.min(), 0)
        for cl in (0.02, 0.03, 0.05)
    ]
    assert all(b > a for a, b in zip(late, late[1:]))


def test_dynamic_late_curve_capped_at_early_threshold():
    res = solve_dynamic(make_params(0.5, 0.3), DynamicCosts(0.01, 0.03))
    assert np.all(res.curve.v_late <= res.threshold + 1e-12)
    assert any("late-disclosure region nonempty" in n for n in res.regime_notes)


def test_dynamic_equal_costs_match_forced_early():
    # same cost both dates: delaying gains nothing, the early threshold
    # solves the one-shot condition with the cost netted out on both sides
    params = make_params(0.5, 0.3)
    res = solve_dynamic(params, DynamicCosts(0.02, 0.02))
    assert res.threshold == 1.0 or res.residual < 1e-8


def test_dynamic_costs_validation():
    with pytest.raises(Exception):
        DynamicCosts(-0.01, 0.0)
    with pytest.raises(Exception):
        DynamicCosts(0.0, 0.0, delta=1.5)


def test_result_serializes():
    res = solve_dynamic(make_params(0.5, 0.3), DynamicCosts(0.01, 0.03))
    payload = res.to_json()
    assert '"kind": "dynamic"' in payload and '"late_curve"' in payload
