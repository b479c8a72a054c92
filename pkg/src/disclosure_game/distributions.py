"""Firm-value prior distributions on a bounded support.

All solvers in this package only need a handful of primitives from the
prior: density, CDF, the partial first moment ``M(t) = int_{lo}^{t} x g(x) dx``,
and seeded sampling.  Closed forms are used where available (uniform, beta,
truncated normal, piecewise-linear); adaptive quadrature is the fallback.

Equilibrium uniqueness requires a log-concave density, so every distribution
can be screened with :func:`check_log_concavity`.  Non-log-concave inputs are
accepted with a warning flag rather than rejected outright.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special, stats

QUAD_ABS_TOL = 1e-10
#: below this much CDF mass, E[v | v <= t] degenerates to t itself
_TINY_MASS = 1e-12


class DistributionError(ValueError):
    pass


def _require_finite(v, name="v"):
    if not np.all(np.isfinite(v)):
        raise DistributionError(f"non-finite {name}: {v!r}")


class ValueDistribution:
    """Base class: bounded-support prior with density, CDF and moments.

    Subclasses must set ``kind``, ``lo``, ``hi`` and implement ``pdf``/``cdf``.
    Numeric fallbacks here use adaptive quadrature at 1e-10 absolute
    tolerance with a fixed 256-node Gauss-Legendre backup.
    """

    kind: str
    lo: float
    hi: float

    # -- density / CDF -------------------------------------------------

    def pdf(self, v):
        raise NotImplementedError

    def cdf(self, v):
        raise NotImplementedError

    # -- moments -------------------------------------------------------

    def _quad(self, f, a, b):
        try:
            val, err = integrate.quad(f, a, b, epsabs=QUAD_ABS_TOL, limit=200)
            if not math.isfinite(val):
                raise ValueError
            return val
        except Exception:
            x, w = np.polynomial.legendre.leggauss(256)
            x = 0.5 * (b - a) * x + 0.5 * (a + b)
            return 0.5 * (b - a) * float(np.sum(w * np.asarray([f(t) for t in x])))

    def partial_mean(self, t):
        """``int_{lo}^{t} x g(x) dx`` (un-normalized truncated first moment)."""
        _require_finite(t, "t")
        t = min(max(t, self.lo), self.hi)
        return self._quad(lambda x: x * self.pdf(x), self.lo, t)

    def mean(self):
        return self.partial_mean(self.hi)

    def variance(self):
        mu = self.mean()
        return self._quad(lambda x: (x - mu) ** 2 * self.pdf(x), self.lo, self.hi)

    def truncated_mean_below(self, t):
        """E[v | v <= t].  Equals the full mean at t = hi.

        For t with vanishing mass below it (G(t) < 1e-12) the limiting
        value t is returned to avoid a 0/0.
        """
        _require_finite(t, "t")
        if t < self.lo or t > self.hi:
            raise DistributionError(f"t={t} outside support [{self.lo}, {self.hi}]")
        mass = self.cdf(t)
        if mass < _TINY_MASS:
            return float(t)
        return self.partial_mean(t) / mass

    # -- sampling ------------------------------------------------------

    def sample(self, rng, n):
        """n i.i.d. draws using the given numpy Generator (inverse CDF)."""
        if n < 1:
            raise DistributionError("n must be >= 1")
        u = rng.random(n)
        return self.ppf(u)

    def ppf(self, u):
        # generic numeric inverse via a dense CDF table
        grid = np.linspace(self.lo, self.hi, 4097)
        cg = np.asarray([self.cdf(x) for x in grid])
        cg[0], cg[-1] = 0.0, 1.0
        cg = np.maximum.accumulate(cg)
        return np.interp(u, cg, grid)

    # -- config --------------------------------------------------------

    def spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Uniform(ValueDistribution):
    lo: float = 0.0
    hi: float = 1.0
    kind: str = field(default="uniform", init=False)

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DistributionError("need lo < hi")

    def pdf(self, v):
        _require_finite(v)
        return 1.0 / (self.hi - self.lo) if self.lo <= v <= self.hi else 0.0

    def cdf(self, v):
        _require_finite(v)
        return float(np.clip((v - self.lo) / (self.hi - self.lo), 0.0, 1.0))

    def partial_mean(self, t):
        _require_finite(t, "t")
        t = min(max(t, self.lo), self.hi)
        return (t * t - self.lo * self.lo) / (2.0 * (self.hi - self.lo))

    def mean(self):
        return 0.5 * (self.lo + self.hi)

    def variance(self):
        return (self.hi - self.lo) ** 2 / 12.0

    def ppf(self, u):
        return self.lo + (self.hi - self.lo) * np.asarray(u)

    def spec(self):
        return {"kind": "uniform", "support": [self.lo, self.hi]}


@dataclass(frozen=True)
class Beta(ValueDistribution):
    a: float = 2.0
    b: float = 2.0
    lo: float = 0.0
    hi: float = 1.0
    kind: str = field(default="beta", init=False)

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0 or not self.lo < self.hi:
            raise DistributionError("invalid beta parameters")

    def _u(self, v):
        return (v - self.lo) / (self.hi - self.lo)

    def pdf(self, v):
        _require_finite(v)
        if not self.lo <= v <= self.hi:
            return 0.0
        return float(stats.beta.pdf(self._u(v), self.a, self.b) / (self.hi - self.lo))

    def cdf(self, v):
        _require_finite(v)
        return float(np.clip(special.betainc(self.a, self.b, np.clip(self._u(v), 0, 1)), 0, 1))

    def partial_mean(self, t):
        _require_finite(t, "t")
        t = min(max(t, self.lo), self.hi)
        u = self._u(t)
        frac = self.a / (self.a + self.b)
        return self.lo * special.betainc(self.a, self.b, u) + (
            self.hi - self.lo
        ) * frac * special.betainc(self.a + 1.0, self.b, u)

    def mean(self):
        return self.lo + (self.hi - self.lo) * self.a / (self.a + self.b)

    def variance(self):
        ab = self.a + self.b
        return (self.hi - self.lo) ** 2 * self.a * self.b / (ab * ab * (ab + 1.0))

    def ppf(self, u):
        return self.lo + (self.hi - self.lo) * stats.beta.ppf(u, self.a, self.b)

    def spec(self):
        return {"kind": "beta", "parameters": [self.a, self.b], "support": [self.lo, self.hi]}


@dataclass(frozen=True)
class TruncatedNormal(ValueDistribution):
    loc: float = 0.5
    scale: float = 0.25
    lo: float = 0.0
    hi: float = 1.0
    kind: str = field(default="truncated-normal", init=False)

    def __post_init__(self):
        if self.scale <= 0 or not self.lo < self.hi:
            raise DistributionError("invalid truncated-normal parameters")

    def _z(self, v):
        return (v - self.loc) / self.scale

    @property
    def _mass(self):
        return special.ndtr(self._z(self.hi)) - special.ndtr(self._z(self.lo))

    def pdf(self, v):
        _require_finite(v)
        if not self.lo <= v <= self.hi:
            return 0.0
        return float(stats.norm.pdf(self._z(v)) / (self.scale * self._mass))

    def cdf(self, v):
        _require_finite(v)
        c = (special.ndtr(self._z(np.clip(v, self.lo, self.hi))) - special.ndtr(self._z(self.lo))) / self._mass
        return float(np.clip(c, 0.0, 1.0))

    def partial_mean(self, t):
        _require_finite(t, "t")
        t = min(max(t, self.lo), self.hi)
        za, zt = self._z(self.lo), self._z(t)
        phi = stats.norm.pdf
        return (self.loc * (special.ndtr(zt) - special.ndtr(za)) - self.scale * (phi(zt) - phi(za))) / self._mass

    def mean(self):
        return self.partial_mean(self.hi)

    def ppf(self, u):
        base = special.ndtr(self._z(self.lo))
        return self.loc + self.scale * special.ndtri(base + np.asarray(u) * self._mass)

    def spec(self):
        return {
            "kind": "truncated-normal",
            "parameters": [self.loc, self.scale],
            "support": [self.lo, self.hi],
        }


@dataclass(frozen=True)
class PiecewiseLinear(ValueDistribution):
    """Density tabulated at knots and interpolated linearly between them."""

    knots: tuple = (0.0, 1.0)
    densities: tuple = (1.0, 1.0)
    kind: str = field(default="piecewise-linear-density", init=False)

    def __post_init__(self):
        x = np.asarray(self.knots, dtype=float)
        y = np.asarray(self.densities, dtype=float)
        if len(x) < 2 or len(x) != len(y):
            raise DistributionError("need matching knots/densities, at least two")
        if np.any(np.diff(x) <= 0):
            raise DistributionError("knots must be strictly increasing")
        if np.any(y < 0):
            raise DistributionError("densities must be nonnegative")
        norm = np.trapezoid(y, x)
        if norm <= 0:
            raise DistributionError("density integrates to zero")
        object.__setattr__(self, "knots", tuple(x))
        object.__setattr__(self, "densities", tuple(y / norm))
        # segment-cumulative mass for CDF / ppf
        seg = 0.5 * (y[:-1] + y[1:]) * np.diff(x) / norm
        object.__setattr__(self, "_cum", tuple(np.concatenate([[0.0], np.cumsum(seg)])))

    @property
    def lo(self):
        return self.knots[0]

    @property
    def hi(self):
        return self.knots[-1]

    def pdf(self, v):
        _require_finite(v)
        if not self.lo <= v <= self.hi:
            return 0.0
        return float(np.interp(v, self.knots, self.densities))

    def cdf(self, v):
        _require_finite(v)
        x = np.asarray(self.knots)
        if v <= self.lo:
            return 0.0
        if v >= self.hi:
            return 1.0
        i = int(np.searchsorted(x, v, side="right") - 1)
        x0, x1 = x[i], x[i + 1]
        y0, y1 = self.densities[i], self.densities[i + 1]
        dv = v - x0
        yv = y0 + (y1 - y0) * dv / (x1 - x0)
        return float(min(1.0, self._cum[i] + 0.5 * (y0 + yv) * dv))

    def partial_mean(self, t):
        _require_finite(t, "t")
        t = min(max(t, self.lo), self.hi)
        x = np.asarray(self.knots)
        total = 0.0
        for i in range(len(x) - 1):
            x0, x1 = x[i], min(x[i + 1], t)
            if x1 <= x0:
                break
            y0 = self.densities[i]
            slope = (self.densities[i + 1] - self.densities[i]) / (x[i + 1] - x[i])
            # int x*(y0 + slope*(x-x0)) dx on [x0, x1]
            a, b = x0, x1
            total += y0 * (b * b - a * a) / 2.0 + slope * (
                (b**3 - a**3) / 3.0 - x0 * (b * b - a * a) / 2.0
            )
        return total

    def ppf(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        x = np.asarray(self.knots)
        cum = np.asarray(self._cum)
        out = np.empty_like(u)
        for k, uu in enumerate(u):
            uu = min(max(uu, 0.0), 1.0)
            i = min(int(np.searchsorted(cum, uu, side="right") - 1), len(x) - 2)
            y0 = self.densities[i]
            h = x[i + 1] - x[i]
            slope = (self.densities[i + 1] - y0) / h
            rem = uu - cum[i]
            if abs(slope) < 1e-14:
                d = rem / y0 if y0 > 0 else 0.0
            else:
                # solve y0*d + slope*d^2/2 = rem for d in [0, h]
                disc = max(y0 * y0 + 2.0 * slope * rem, 0.0)
                d = (-y0 + math.sqrt(disc)) / slope
            out[k] = x[i] + min(max(d, 0.0), h)
        return out if out.size > 1 else float(out[0])

    def spec(self):
        return {
            "kind": "piecewise-linear-density",
            "knots": list(self.knots),
            "densities": list(self.densities),
        }


def check_log_concavity(dist: ValueDistribution, grid_size: int = 256, tol: float = 1e-8):
    """Screen log-concavity of the density on an interior grid.

    Returns ``(ok, max_violation)`` where the violation is the largest
    positive second difference of log g (normalized by step^2).
    """
    if grid_size < 16:
        raise DistributionError("grid_size must be >= 16")
    eps = (dist.hi - dist.lo) * 1e-6
    x = np.linspace(dist.lo + eps, dist.hi - eps, grid_size)
    g = np.asarray([dist.pdf(v) for v in x])
    pos = g > 0
    logg = np.full_like(g, -np.inf)
    logg[pos] = np.log(g[pos])
    h = x[1] - x[0]
    worst = 0.0
    for i in range(1, len(x) - 1):
        if pos[i - 1] and pos[i] and pos[i + 1]:
            d2 = (logg[i - 1] - 2.0 * logg[i] + logg[i + 1]) / (h * h)
            worst = max(worst, d2)
    return worst <= tol, worst


def warn_if_not_log_concave(dist: ValueDistribution) -> bool:
    ok, worst = check_log_concavity(dist)
    if not ok:
        warnings.warn(
            f"density of {dist.kind} is not log-concave (max violation {worst:.3g}); "
            "threshold solvers carry no uniqueness guarantee",
            stacklevel=2,
        )
    return ok


def from_spec(spec: dict) -> ValueDistribution:
    """Build a distribution from a config mapping (kind + parameters)."""
    kind = spec.get("kind")
    if kind == "uniform":
        lo, hi = (float(x) for x in spec.get("support", [0.0, 1.0]))
        return Uniform(lo, hi)
    if kind == "beta":
        a, b = (float(x) for x in spec.get("parameters", [2.0, 2.0]))
        lo, hi = (float(x) for x in spec.get("support", [0.0, 1.0]))
        return Beta(a, b, lo, hi)
    if kind == "truncated-normal":
        loc, scale = (float(x) for x in spec.get("parameters", [0.5, 0.25]))
        lo, hi = (float(x) for x in spec.get("support", [0.0, 1.0]))
        return TruncatedNormal(loc, scale, lo, hi)
    if kind == "piecewise-linear-density":
        return PiecewiseLinear(tuple(float(x) for x in spec["knots"]),
                               tuple(float(y) for y in spec["densities"]))
    raise DistributionError(f"unknown distribution kind: {kind!r}")
