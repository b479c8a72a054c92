"""Fixed-point solvers for the disclosure thresholds.

Every indifference condition here is monotone inside its bracket (a
consequence of log-concavity of the prior), so all thresholds are found
with a bracketed Brent solve and audited by sign-change counting.

The late threshold switches between two self-consistent pricing regimes:
below the veracity-independent signal the market conjectures that a
hypothetical truthful signal would be withheld (theta = 0), above it that
it would be disclosed (theta = 1).  The regime is selected analytically by
comparing the signal to that switch point rather than by solving both
branches and testing consistency.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .beliefs import DomainError, ModelParams
from .pricing import (
    benchmark_price,
    expected_nondisclosure_price,
    nondisclosure_price_branches,
    price_curve,
)

THRESHOLD_TOL = 1e-12
RESIDUAL_TOL = 1e-9


class SolverError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# result containers


@dataclass
class ThresholdFunction:
    """Sampled signal-dependent disclosure threshold with kink metadata."""

    s: np.ndarray
    v_late: np.ndarray
    kink_at: float
    regime: np.ndarray  # "theta0" / "theta1" per grid point

    def __call__(self, s):
        return float(np.interp(s, self.s, self.v_late))

    def rows(self):
        return [
            (float(a), float(b), str(r))
            for a, b, r in zip(self.s, self.v_late, self.regime)
        ]


@dataclass
class EquilibriumResult:
    kind: str
    threshold: float | None
    residual: float
    iterations: int
    bracket: tuple
    curve: ThresholdFunction | None = None
    regime_notes: list = field(default_factory=list)

    def to_json(self, **kw):
        payload = {
            "kind": self.kind,
            "threshold": self.threshold,
            "residual": self.residual,
            "iterations": self.iterations,
            "bracket": list(self.bracket),
            "regime_notes": self.regime_notes,
        }
        if self.curve is not None:
            payload["late_curve"] = {
                "kink_at": self.curve.kink_at,
                "points": self.curve.rows(),
            }
        return json.dumps(payload, **kw)


@dataclass(frozen=True)
class DynamicCosts:
    c_early: float = 0.0
    c_late: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if self.c_early < 0 or self.c_late < 0:
            raise DomainError("rescheduling costs must be nonnegative")
        if not 0.0 <= self.delta <= 1.0:
            raise DomainError("delta must be in [0,1]")


# ---------------------------------------------------------------------------
# root-finding plumbing


def _bracketed_root(f, lo, hi, what="threshold"):
    """Brent solve with diagnostics; raises SolverError on bracket failure."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo, 0
    if fhi == 0.0:
        return hi, 0
    if flo * fhi > 0:
        raise SolverError(
            f"no sign change for {what} in [{lo}, {hi}]: f(lo)={flo:.3e}, f(hi)={fhi:.3e}"
        )
    root, info = optimize.brentq(
        f, lo, hi, xtol=1e-13, rtol=8.9e-16, maxiter=200, full_output=True
    )
    if not info.converged:
        raise SolverError(f"brentq failed to converge for {what}")
    return root, info.iterations


def count_sign_changes(f, lo, hi, n=2000):
    """Number of sign changes of f on an n-point grid (uniqueness audit)."""
    x = np.linspace(lo, hi, n)
    vals = np.asarray([f(t) for t in x])
    signs = np.sign(vals)
    signs = signs[signs != 0]
    return int(np.sum(signs[:-1] != signs[1:]))


# ---------------------------------------------------------------------------
# late-threshold machinery (shared by the pure-late and dynamic cases)


def auxiliary_price(params: ModelParams, s: float, vbar: float, theta: int) -> float:
    """Nondisclosure price when the market fixes the response to a
    hypothetical truthful signal at disclose-with-probability theta."""
    p, q = params.p, params.q
    d = params.dist
    core = (1.0 - q) * (1.0 - p + p * d.cdf(vbar))
    B = (1.0 - q) * ((1.0 - p) * d.mean() + p * d.partial_mean(vbar))
    w = q * (1.0 - p) if theta else q
    return (w * s + B) / (w + core)


def _regime_switch_signal(params: ModelParams, cost: float = 0.0) -> float:
    """Signal at which the two pricing regimes give the same threshold.

    Solves s = benchmark_price(s + cost); reduces to the no-signal
    threshold when the late cost is zero.
    """
    lo, hi = params.dist.lo, params.dist.hi

    def k(s):
        return benchmark_price(params, min(s + cost, hi)) - s

    root, _ = _bracketed_root(k, lo, hi, what="regime switch signal")
    return root


def late_branch_thresholds(params: ModelParams, s: float, cost: float = 0.0):
    """(theta0, theta1) indifference thresholds at signal s, clamped to the
    support top when no type is willing to disclose late."""
    params.check_support(s)
    lo, hi = params.dist.lo, params.dist.hi
    out = []
    for theta in (0, 1):
        def f(v):
            return (v - cost) - auxiliary_price(params, s, v, theta)

        if f(hi) < 0:
            out.append(hi)
        else:
            root, _ = _bracketed_root(f, lo, hi, what=f"late threshold (theta={theta})")
            out.append(root)
    return tuple(out)


def _solve_late_at(params: ModelParams, s: float, cost: float, switch: float):
    theta = 1 if s > switch else 0
    if abs(s - switch) < 1e-13:
        return min(switch + cost, params.dist.hi), theta
    return late_branch_thresholds(params, s, cost)[theta], theta


def solve_late(params: ModelParams, s: float, cost: float = 0.0) -> float:
    """Date-4 disclosure threshold for a realized signal s."""
    params.check_support(s)
    switch = _regime_switch_signal(params, cost)
    v, _ = _solve_late_at(params, s, cost, switch)
    return v


def solve_late_curve(params: ModelParams, grid_size: int, cost: float = 0.0) -> ThresholdFunction:
    if grid_size < 32:
        raise DomainError("grid_size must be >= 32")
    lo, hi = params.dist.lo, params.dist.hi
    switch = _regime_switch_signal(params, cost)
    s = np.unique(np.concatenate([np.linspace(lo, hi, grid_size), [switch]]))
    vals, regimes = [], []
    for si in s:
        try:
            v, theta = _solve_late_at(params, float(si), cost, switch)
        except SolverError as exc:
            raise SolverError(f"late solve failed at s={si}: {exc}") from exc
        vals.append(v)
        regimes.append("theta1" if theta else "theta0")
    return ThresholdFunction(
        s=s,
        v_late=np.asarray(vals),
        kink_at=switch,
        regime=np.asarray(regimes, dtype=object),
    )


# ---------------------------------------------------------------------------
# scalar-threshold solvers


def solve_benchmark(params: ModelParams) -> EquilibriumResult:
    """No-signal threshold: unique root of v = P(no-disclosure | vhat=v)."""
    lo = params.dist.lo
    mu = params.mu

    def f(v):
        return v - benchmark_price(params, v)

    root, iters = _bracketed_root(f, lo, mu, what="benchmark threshold")
    return EquilibriumResult(
        kind="benchmark",
        threshold=root,
        residual=abs(f(root)),
        iterations=iters,
        bracket=(lo, mu),
    )


def solve_early(params: ModelParams) -> EquilibriumResult:
    """Date-2 threshold: value indifferent to its expected silent price."""
    vb = solve_benchmark(params).threshold
    mu = params.mu
    hi = params.dist.hi

    def f(v):
        return v - expected_nondisclosure_price(params, v, v)

    notes = []
    bracket = (vb + THRESHOLD_TOL, mu)
    try:
        root, iters = _bracketed_root(f, *bracket, what="early threshold")
    except SolverError:
        if f(bracket[0]) > 0:
            # root sits numerically at (or below) the no-signal threshold:
            # the veracity correction is smaller than the bracket offset
            bracket = (params.dist.lo, vb + THRESHOLD_TOL)
            notes.append("threshold indistinguishable from the no-signal one")
            root, iters = _bracketed_root(f, *bracket, what="early threshold")
        else:
            # no interior root below the mean: fall back to the full support,
            # reporting the never-disclose corner if even that fails
            bracket = (vb + THRESHOLD_TOL, hi)
            notes.append("bracket widened beyond the prior mean")
            try:
                root, iters = _bracketed_root(f, *bracket, what="early threshold")
            except SolverError:
                notes.append("no early disclosure (corner at v_max)")
                return EquilibriumResult(
                    kind="early",
                    threshold=hi,
                    residual=abs(f(hi)),
                    iterations=0,
                    bracket=bracket,
                    regime_notes=notes,
                )
    return EquilibriumResult(
        kind="early",
        threshold=root,
        residual=abs(f(root)),
        iterations=iters,
        bracket=bracket,
        regime_notes=notes,
    )


def solve_frequent(params: ModelParams, delta: float) -> EquilibriumResult:
    """Early threshold when the market reprices every date.

    Root of T_bench(v) + (delta + delta^2 + delta^3) T_early(v), where
    T_bench(v) = v - benchmark price and T_early(v) = v - expected silent
    price, both at conjectured threshold v.
    """
    if not 0.0 <= delta <= 1.0:
        raise DomainError("delta must be in [0,1]")
    w = delta + delta**2 + delta**3
    lo = params.dist.lo

    def f(v):
        t_bench = v - benchmark_price(params, v)
        t_early = v - expected_nondisclosure_price(params, v, v)
        return t_bench + w * t_early

    v_early = solve_early(params).threshold
    bracket = (lo + THRESHOLD_TOL, v_early)
    root, iters = _bracketed_root(f, *bracket, what="frequent-adjustment threshold")
    return EquilibriumResult(
        kind="frequent",
        threshold=root,
        residual=abs(f(root)),
        iterations=iters,
        bracket=bracket,
    )


# ---------------------------------------------------------------------------
# dynamic game


def _dynamic_switch_signal(params: ModelParams, cost: float, cap: float) -> float:
    """Regime-switch signal when the late threshold is capped at cap."""
    lo, hi = params.dist.lo, params.dist.hi

    def k(s):
        return benchmark_price(params, min(s + cost, cap)) - s

    root, _ = _bracketed_root(k, lo, hi, what="regime switch signal (dynamic)")
    return root


def _dynamic_late_at(params, s, cost, cap, switch):
    """(late threshold, silent price, clamped?) at signal s, cap v_early.

    Values above the cap already disclosed at date 2, so the informed
    silent pool ends at min(threshold, cap) while the uninformed pool
    keeps the full prior; that makes the price the ordinary full-prior
    formula evaluated at the capped threshold.
    """
    theta = 1 if s > switch else 0

    def f(v):
        return (v - cost) - auxiliary_price(params, s, v, theta)

    if f(cap) < 0:
        # even the top silent type prefers silence: no late disclosure;
        # the veracious branch follows the actual disclosure indicator
        theta_c = 1 if s > cap else 0
        return cap, auxiliary_price(params, s, cap, theta_c), True
    if abs(s - switch) < 1e-13:
        v = min(switch + cost, cap)
        return v, v - cost, False
    root, _ = _bracketed_root(
        f, params.dist.lo, cap, what=f"dynamic late threshold at s={s}"
    )
    return root, root - cost, False


def _delay_payoff(params: ModelParams, v_early: float, c_late: float) -> float:
    """Expected payoff of the marginal type v_early from delaying.

    When the realized signal leaves the late threshold interior (below the
    cap), the marginal type discloses late and nets v_early - c_late.  On
    signals where no silent type wants to disclose late (threshold clamped
    at the cap), it rides the silent price instead, which is affine in the
    signal on each side of the cap, so the whole expectation reduces to
    partial moments of the prior.
    """
    p, q = params.p, params.q
    d = params.dist
    lo, hi = d.lo, d.hi
    cap = v_early
    G, M, mu = d.cdf(cap), d.partial_mean(cap), d.mean()
    core = (1.0 - q) * (1.0 - p + p * G)
    B = (1.0 - q) * ((1.0 - p) * mu + p * M)
    g_le = q + core
    g_gt = q * (1.0 - p) + core
    target = cap - c_late

    if q < 1e-12:
        # signal-free price: clamp everywhere or nowhere
        price = B / core
        w_noise = max(target, price)
        return w_noise

    # clamp onsets: signals beyond which the silent price beats disclosing
    # late even for the top silent type (branch prices are affine in s)
    x0 = float(np.clip((target * g_le - B) / q, lo, cap))
    x1 = float(np.clip((target * g_gt - B) / (q * (1.0 - p)), cap, hi))

    G0, M0 = d.cdf(x0), d.partial_mean(x0)
    G1, M1 = d.cdf(x1), d.partial_mean(x1)
    unclamped_mass = G0 + (G1 - G)
    clamped_le = (q * (M - M0) + B * (G - G0)) / g_le
    clamped_gt = (q * (1.0 - p) * (mu - M1) + B * (1.0 - G1)) / g_gt
    noise = target * unclamped_mass + clamped_le + clamped_gt

    # veracious branch: the signal equals the value, priced on the lower branch
    w_veracious = max(target, (q * cap + B) / g_le)
    return q * w_veracious + (1.0 - q) * noise


def solve_dynamic(params: ModelParams, costs: DynamicCosts, n_nodes: int = 200) -> EquilibriumResult:
    """Equilibrium of the game where the manager picks the disclosure date.

    Delaying dominates outright when advancing is the costlier move; the
    equilibrium is then a cost-shifted late curve.  Otherwise the early
    cutoff solves a nested indifference: disclosing now at cost c_early
    against the expected optimum of disclosing late or riding the silent
    price, where the late thresholds are capped at the early cutoff.
    """
    lo, hi = params.dist.lo, params.dist.hi
    notes = []

    if costs.c_early >= costs.c_late:
        if costs.c_early > costs.c_late:
            notes.append("no early disclosure (delaying is cheaper)")
        curve = solve_late_curve(params, max(n_nodes, 64), cost=costs.c_late)
        if np.all(curve.v_late >= hi - 1e-12):
            notes.append("never-disclose regime (late cost prohibitive)")
        return EquilibriumResult(
            kind="dynamic",
            threshold=hi,
            residual=0.0,
            iterations=0,
            bracket=(lo, hi),
            curve=curve,
            regime_notes=notes,
        )

    vb = solve_benchmark(params).threshold

    def f(v):
        return (v - costs.c_early) - _delay_payoff(params, v, costs.c_late)

    bracket = (vb + 1e-9, hi - 1e-9)
    try:
        root, iters = _bracketed_root(f, *bracket, what="dynamic early threshold")
    except SolverError:
        notes.append("no early disclosure (early cost prohibitive)")
        root, iters = hi, 0

    cap = root if root < hi else hi - 1e-9
    switch = _dynamic_switch_signal(params, costs.c_late, cap)
    s_grid = np.unique(np.concatenate([np.linspace(lo, hi, 129), [switch]]))
    v_late, regimes = [], []
    for s in s_grid:
        vl, _, _ = _dynamic_late_at(params, float(s), costs.c_late, cap, switch)
        v_late.append(vl)
        regimes.append("theta1" if s > switch else "theta0")
    curve = ThresholdFunction(
        s=s_grid,
        v_late=np.asarray(v_late),
        kink_at=switch,
        regime=np.asarray(regimes, dtype=object),
    )
    if np.any(curve.v_late < root - 1e-10):
        notes.append("late-disclosure region nonempty")
    return EquilibriumResult(
        kind="dynamic",
        threshold=root,
        residual=abs(f(root)) if root < hi else 0.0,
        iterations=iters,
        bracket=bracket,
        curve=curve,
        regime_notes=notes,
    )


# ---------------------------------------------------------------------------
# price-path comparisons under frequent repricing


def price_path_analysis(params: ModelParams, mode: str, delta: float = 0.5, grid_size: int = 257):
    """Date-over-date price comparisons in the frequent-repricing game."""
    lo, hi = params.dist.lo, params.dist.hi
    mu = params.mu
    if mode == "late":
        curve = solve_late_curve(params, grid_size)
        p3 = params.q * curve.s + (1.0 - params.q) * mu
        p4 = curve.v_late  # silent date-4 price equals the indifferent type
        gaps = p3 - p4
        return {
            "mode": "late",
            "min_gap": float(np.min(gaps)),
            "all_below": bool(np.all(gaps > 0)),
            "s": curve.s,
            "p3": p3,
            "p4": p4,
            "disclosure_drop_signal": lambda v: (v - (1.0 - params.q) * mu) / params.q
            if params.q > 0
            else np.inf,
        }
    if mode == "early":
        v_tilde = solve_frequent(params, delta).threshold
        p2 = benchmark_price(params, v_tilde)
        # Date-3 price decomposed by manager group with the silence-only
        # group weights held fixed; each group's value estimate updates on
        # the signal.  Above the threshold a veracious signal is
        # inconsistent with informed silence, so only the uninformed
        # estimate moves and the date-2/date-3 gap is proportional to
        # (mu - s) exactly.
        p, q = params.p, params.q
        G = params.dist.cdf(v_tilde)
        e_low = params.dist.partial_mean(v_tilde) / G
        wu = (1.0 - p) / (1.0 - p + p * G)
        wi = 1.0 - wu
        pi = 1.0 / (q + (1.0 - q) * G)  # veracity posterior, informed-silent group

        def p3_of(s):
            est_u = (1.0 - q) * mu + q * s
            if s > v_tilde:
                return wu * est_u + wi * e_low
            return wu * est_u + wi * ((1.0 - q * pi) * e_low + q * pi * s)

        def w(s):  # lower-branch gap, decreasing in s
            return wu * (mu - s) + wi * pi * (e_low - s)

        s_dagger, _ = _bracketed_root(w, lo, v_tilde, what="sign-switch signal")
        intervals = [
            (lo, s_dagger),
            (s_dagger, v_tilde),
            (v_tilde, mu),
            (mu, hi),
        ]
        signs = []
        for a, b in intervals:
            m = 0.5 * (a + b)
            signs.append("+" if p2 - p3_of(m) >= 0 else "-")
        return {
            "mode": "early",
            "v_tilde_early": v_tilde,
            "p2_silent": p2,
            "s_dagger_dagger": s_dagger,
            "intervals": intervals,
            "sign_pattern": tuple(signs),
        }
    raise DomainError(f"unknown mode {mode!r}")


def equilibrium_price_curve(params: ModelParams, grid_size: int = 513):
    """Nondisclosure price curve at the early equilibrium threshold."""
    v_early = solve_early(params).threshold
    return price_curve(params, v_early, grid_size)
