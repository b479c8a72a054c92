"""Market price functions for a conjectured disclosure threshold.

The nondisclosure price is piecewise affine in the signal with a jump at
the conjectured threshold vhat: below (and at) vhat the informed-and-
veracious event keeps mass, above it that mass drops to zero.  One-sided
limits at vhat are computed from the two branch formulas directly, never
by numerical limiting, since the non-monotonicity tests need them exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beliefs import DomainError, ModelParams


def disclosure_price(v: float) -> float:
    """Price after truthful disclosure: the disclosed value itself."""
    return float(v)


def _withheld_mass_terms(params: ModelParams, vhat: float):
    """(B, G) with B = (1-q)((1-p) mu + p int_{lo}^{vhat} x g dx), G = G(vhat)."""
    p, q = params.p, params.q
    G = params.dist.cdf(vhat)
    B = (1.0 - q) * ((1.0 - p) * params.mu + p * params.dist.partial_mean(vhat))
    return B, G


def benchmark_price(params: ModelParams, vhat: float) -> float:
    """Nondisclosure price with no informative signal (q plays no role)."""
    params.check_support(vhat)
    p = params.p
    G = params.dist.cdf(vhat)
    num = (1.0 - p) * params.mu + p * params.dist.partial_mean(vhat)
    return num / (1.0 - p + p * G)


def nondisclosure_price_branches(params: ModelParams, s: float, vhat: float):
    """(price if s counted below vhat, price if counted above).

    Both branch formulas are defined for any in-support s; the realized
    price picks the branch by the strict indicator s > vhat.
    """
    params.check_support(s, vhat)
    p, q = params.p, params.q
    B, G = _withheld_mass_terms(params, vhat)
    core = (1.0 - q) * (1.0 - p + p * G)
    le = (q * s + B) / (q + core)
    gt = (q * (1.0 - p) * s + B) / (q * (1.0 - p) + core)
    return le, gt


def nondisclosure_price(params: ModelParams, s: float, vhat: float) -> float:
    le, gt = nondisclosure_price_branches(params, s, vhat)
    return gt if s > vhat else le


def naive_nondisclosure_price(params: ModelParams, s: float, vhat: float) -> float:
    """Reference price with beliefs frozen at the product baseline.

    Mixing weights are Pr(phi) * Pr(kappa | silence) regardless of s, which
    makes this price monotone in s (no veracity updating).
    """
    params.check_support(s, vhat)
    p, q = params.p, params.q
    G = params.dist.cdf(vhat)
    pi = p * G / (1.0 - p + p * G)
    e_below = params.dist.truncated_mean_below(vhat) if G > 0 else vhat
    return q * s + (1.0 - q) * ((1.0 - pi) * params.mu + pi * e_below)


def expected_nondisclosure_price(params: ModelParams, v: float, vhat: float) -> float:
    """Manager's date-2 expectation of the nondisclosure price given value v.

    With probability q the future signal equals v (silence-on-indifference:
    s == vhat prices on the lower branch); with probability 1-q the signal
    is an independent draw.  Both branches are affine in s, so the noise
    integral splits at vhat and reduces to partial moments of the prior.
    """
    params.check_support(v, vhat)
    p, q = params.p, params.q
    B, G = _withheld_mass_terms(params, vhat)
    core = (1.0 - q) * (1.0 - p + p * G)
    gamma_le = q + core
    gamma_gt = q * (1.0 - p) + core

    veracious = (q * v + B) / gamma_le if v <= vhat else (q * (1.0 - p) * v + B) / gamma_gt

    m_below = params.dist.partial_mean(vhat)
    mu = params.mu
    noise = (q * m_below + B * G) / gamma_le + (
        q * (1.0 - p) * (mu - m_below) + B * (1.0 - G)
    ) / gamma_gt
    return q * veracious + (1.0 - q) * noise


@dataclass
class PriceCurve:
    """Sampled nondisclosure price with exact one-sided limits at vhat."""

    vhat: float
    s: np.ndarray
    price: np.ndarray
    branch: np.ndarray  # "le" / "gt" per grid point
    left_limit_at_vhat: float
    right_limit_at_vhat: float

    def rows(self):
        """(s, price, branch) rows; the two one-sided limits appear as
        adjacent rows sharing s = vhat."""
        out = []
        emitted_jump = False
        for s, pr, br in zip(self.s, self.price, self.branch):
            if not emitted_jump and s > self.vhat:
                out.append((self.vhat, self.left_limit_at_vhat, "le"))
                out.append((self.vhat, self.right_limit_at_vhat, "gt"))
                emitted_jump = True
            if s != self.vhat:
                out.append((float(s), float(pr), str(br)))
        if not emitted_jump:
            out.append((self.vhat, self.left_limit_at_vhat, "le"))
            out.append((self.vhat, self.right_limit_at_vhat, "gt"))
        return out


def price_curve(params: ModelParams, vhat: float, grid_size: int) -> PriceCurve:
    if grid_size < 3:
        raise DomainError("grid_size must be >= 3")
    lo, hi = params.dist.lo, params.dist.hi
    s = np.linspace(lo, hi, grid_size)
    # make sure the grid straddles vhat tightly
    eps = max((hi - lo) * 1e-7, 1e-9)
    s = np.unique(np.concatenate([s, [max(lo, vhat - eps), min(hi, vhat + eps)]]))
    prices, branches = [], []
    for si in s:
        le, gt = nondisclosure_price_branches(params, float(si), vhat)
        if si > vhat:
            prices.append(gt)
            branches.append("gt")
        else:
            prices.append(le)
            branches.append("le")
    le_at, gt_at = nondisclosure_price_branches(params, vhat, vhat)
    return PriceCurve(
        vhat=vhat,
        s=s,
        price=np.asarray(prices),
        branch=np.asarray(branches, dtype=object),
        left_limit_at_vhat=le_at,
        right_limit_at_vhat=gt_at,
    )
