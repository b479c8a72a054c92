import numpy as np
import pytest

from disclosure_game import ModelParams, Uniform
from disclosure_game.beliefs import (
    DomainError,
    belief_table,
    gamma,
    joint_posterior,
    pr_informed_given_silence,
)
from conftest import make_params

# worked configuration: p=0.6, q=0.4, threshold 0.4, uniform prior
PARAMS = make_params(0.6, 0.4)
VHAT = 0.4


def test_gamma_worked_value():
    # 0.4*1 + 0.6*(0.4 + 0.6*0.4) = 0.784 for a below-threshold signal
    assert gamma(PARAMS, 0.3, VHAT) == pytest.approx(0.784, abs=1e-12)


def test_joint_posterior_worked_values():
    b = joint_posterior(PARAMS, 0.3, VHAT)
    assert b.pr_iv == pytest.approx(0.24 / 0.784, abs=1e-12)
    assert b.pr_in == pytest.approx(0.144 / 0.784, abs=1e-12)
    assert b.pr_uv == pytest.approx(0.16 / 0.784, abs=1e-12)
    assert b.pr_un == pytest.approx(0.24 / 0.784, abs=1e-12)


def test_posterior_sums_to_one():
    for s in (0.0, 0.3, 0.4, 0.41, 0.9):
        b = joint_posterior(PARAMS, s, VHAT)
        assert b.pr_iv + b.pr_in + b.pr_uv + b.pr_un == pytest.approx(1.0, abs=1e-12)


def test_informed_veracious_mass_vanishes_above_threshold():
    assert joint_posterior(PARAMS, VHAT + 1e-9, VHAT).pr_iv == 0.0
    # the indifferent signal counts as below (silence tiebreak)
    assert joint_posterior(PARAMS, VHAT, VHAT).pr_iv > 0.0


def test_informed_given_silence_worked_value():
    assert pr_informed_given_silence(PARAMS, VHAT) == pytest.approx(0.375, abs=1e-12)


def test_jump_directions_at_threshold():
    below = joint_posterior(PARAMS, VHAT - 0.01, VHAT)
    above = joint_posterior(PARAMS, VHAT + 0.01, VHAT)
    assert above.pr_iv < below.pr_iv
    assert above.pr_in > below.pr_in
    assert above.pr_uv > below.pr_uv
    assert above.pr_un > below.pr_un


def test_marginals_consistent():
    b = joint_posterior(PARAMS, 0.3, VHAT)
    pr_informed, pr_veracious = b.marginals()
    assert pr_informed == pytest.approx(b.pr_iv + b.pr_in)
    assert pr_veracious == pytest.approx(b.pr_iv + b.pr_uv)


def test_no_endowment_limit_factorizes():
    # as p -> 0 nobody is informed and veracity decouples from silence
    params = make_params(1e-9, 0.35)
    b = joint_posterior(params, 0.2, 0.5)
    assert b.pr_iv + b.pr_in == pytest.approx(0.0, abs=1e-8)
    assert b.pr_uv == pytest.approx(0.35, abs=1e-8)


def test_monte_carlo_posterior_agreement():
    """Empirical conditional frequencies near a fixed signal match the formula."""
    rng = np.random.default_rng(3)
    n = 2_000_000
    p, q, vhat, s0, h = 0.6, 0.4, 0.4, 0.3, 0.01
    v = rng.random(n)
    informed = rng.random(n) < p
    veracious = rng.random(n) < q
    s = np.where(veracious, v, rng.random(n))
    silent = ~(informed & (v > vhat))
    sel = silent & (np.abs(s - s0) < h)
    m = sel.sum()
    b = joint_posterior(PARAMS, s0, vhat)
    for cell, target in (
        (informed & veracious, b.pr_iv),
        (informed & ~veracious, b.pr_in),
        (~informed & veracious, b.pr_uv),
        (~informed & ~veracious, b.pr_un),
    ):
        freq = cell[sel].mean()
        se = np.sqrt(target * (1 - target) / m)
        assert abs(freq - target) < 4 * se


def test_belief_table_baseline():
    rows, baseline = belief_table(PARAMS, VHAT, [0.1, 0.5])
    assert len(rows) == 2 and len(rows[0]) == 5
    pi = 0.375
    assert baseline["informed_veracious"] == pytest.approx(pi * 0.4)
    assert baseline["uninformed_noise"] == pytest.approx((1 - pi) * 0.6)
    assert sum(baseline.values()) == pytest.approx(1.0)


def test_out_of_support_signal_rejected():
    with pytest.raises(DomainError):
        gamma(PARAMS, 1.5, VHAT)
    with pytest.raises(DomainError):
        joint_posterior(PARAMS, 0.5, -0.1)


def test_invalid_params_rejected():
    with pytest.raises(DomainError):
        ModelParams(p=0.0, q=0.5, dist=Uniform(0, 1))
    with pytest.raises(DomainError):
        ModelParams(p=0.5, q=1.2, dist=Uniform(0, 1))
