"""Joint investor posteriors over (informed/uninformed) x (veracious/noise).

All quantities condition on a silent manager, an observed external signal s,
and a conjectured disclosure threshold vhat.  The threshold need not be an
equilibrium one.  The tiebreak convention is that the signal counts as
"below the threshold" when s == vhat (indifferent managers stay silent), so
the informed-and-veracious cell keeps positive mass exactly on s <= vhat.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .distributions import ValueDistribution, warn_if_not_log_concave


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    """Game primitives: endowment probability p, veracity prior q, value prior."""

    p: float
    q: float
    dist: ValueDistribution

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"p must be in (0,1), got {self.p}")
        if not 0.0 <= self.q <= 1.0:
            raise DomainError(f"q must be in [0,1], got {self.q}")

    @property
    def mu(self):
        return self.dist.mean()

    def check_support(self, *values):
        for v in values:
            if not self.dist.lo <= v <= self.dist.hi:
                raise DomainError(
                    f"value {v} outside support [{self.dist.lo}, {self.dist.hi}]"
                )

    def validate_log_concavity(self) -> bool:
        return warn_if_not_log_concave(self.dist)


@dataclass(frozen=True)
class JointBeliefs:
    pr_iv: float
    pr_in: float
    pr_uv: float
    pr_un: float
    gamma: float

    def marginals(self):
        """(Pr(informed), Pr(veracious)) row/column sums."""
        return self.pr_iv + self.pr_in, self.pr_iv + self.pr_uv

    def as_dict(self):
        return {
            "informed_veracious": self.pr_iv,
            "informed_noise": self.pr_in,
            "uninformed_veracious": self.pr_uv,
            "uninformed_noise": self.pr_un,
            "normalizer": self.gamma,
        }

    def to_json(self, **kw):
        return json.dumps(self.as_dict(), **kw)


def gamma(params: ModelParams, s: float, vhat: float) -> float:
    """Normalizer of the silent-manager posterior at signal s, threshold vhat.

    The indicator uses the strict inequality s > vhat.
    """
    params.check_support(s, vhat)
    p, q = params.p, params.q
    veracious_mass = q * (1.0 - p if s > vhat else 1.0)
    return veracious_mass + (1.0 - q) * (1.0 - p + p * params.dist.cdf(vhat))


def joint_posterior(params: ModelParams, s: float, vhat: float) -> JointBeliefs:
    """The four posteriors Pr(kappa, phi | s, silence) for threshold vhat."""
    g = gamma(params, s, vhat)
    p, q = params.p, params.q
    G = params.dist.cdf(vhat)
    pr_iv = (q * p / g) if s <= vhat else 0.0
    return JointBeliefs(
        pr_iv=pr_iv,
        pr_in=(1.0 - q) * p * G / g,
        pr_uv=q * (1.0 - p) / g,
        pr_un=(1.0 - q) * (1.0 - p) / g,
        gamma=g,
    )


def marginals(beliefs: JointBeliefs):
    return beliefs.marginals()


def pr_informed_given_silence(params: ModelParams, vhat: float) -> float:
    """Pr(informed | silence), marginalizing over the yet-unseen signal."""
    params.check_support(vhat)
    p = params.p
    G = params.dist.cdf(vhat)
    return p * G / (1.0 - p + p * G)


def belief_table(params: ModelParams, vhat: float, grid):
    """Rows of the 2x2 belief table along a signal grid, for plotting.

    Each row: (s, pr_iv, pr_in, pr_uv, pr_un) plus the constant naive
    product baselines Pr(phi) * Pr(kappa | silence).
    """
    pi = pr_informed_given_silence(params, vhat)
    q = params.q
    baseline = {
        "informed_veracious": pi * q,
        "informed_noise": pi * (1.0 - q),
        "uninformed_veracious": (1.0 - pi) * q,
        "uninformed_noise": (1.0 - pi) * (1.0 - q),
    }
    rows = []
    for s in grid:
        b = joint_posterior(params, float(s), vhat)
        rows.append((float(s), b.pr_iv, b.pr_in, b.pr_uv, b.pr_un))
    return rows, baseline
