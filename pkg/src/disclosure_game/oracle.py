"""Brute-force verification of the threshold solvers.

Two independent checks live here.  The first discretizes the value space
into mass cells and iterates literal best responses over disclosure sets,
with no threshold structure imposed, so agreement with the analytic
solvers is evidence rather than tautology.  The second is a plain Monte
Carlo simulation of the signal game that checks the pricing function
against empirical conditional means.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .beliefs import DomainError, ModelParams
from .equilibrium import DynamicCosts, solve_benchmark
from .pricing import nondisclosure_price_branches

#: ties are broken toward silence: disclosure needs a strict gain
_TIE_EPS = 1e-12


@dataclass(frozen=True)
class DiscreteGame:
    """Value prior collapsed onto n equal-width mass cells."""

    params: ModelParams
    edges: np.ndarray
    v: np.ndarray  # cell conditional means
    w: np.ndarray  # cell probability masses

    @classmethod
    def build(cls, params: ModelParams, n: int) -> "DiscreteGame":
        if n < 16:
            raise DomainError("need at least 16 cells")
        d = params.dist
        edges = np.linspace(d.lo, d.hi, n + 1)
        cdf = np.asarray([d.cdf(e) for e in edges])
        pm = np.asarray([d.partial_mean(e) for e in edges])
        w = np.diff(cdf)
        mids = 0.5 * (edges[:-1] + edges[1:])
        v = np.where(w > 1e-300, np.diff(pm) / np.where(w > 0, w, 1.0), mids)
        w = w / w.sum()
        return cls(params=params, edges=edges, v=v, w=w)

    @property
    def step(self):
        return float(self.edges[1] - self.edges[0])

    def cell_of(self, s: float) -> int:
        i = int(np.searchsorted(self.edges, s, side="right") - 1)
        return min(max(i, 0), len(self.v) - 1)

    def threshold_of(self, disclosed: np.ndarray) -> float:
        """Lowest disclosed cell value; support top if nobody discloses."""
        idx = np.flatnonzero(disclosed)
        return float(self.v[idx[0]]) if idx.size else float(self.params.dist.hi)


@dataclass
class OracleEquilibrium:
    kind: str
    threshold: float | None
    iterations: int
    initializations_agree: bool
    grid_step: float
    per_signal: dict = field(default_factory=dict)
    early_threshold: float | None = None
    disclosed: np.ndarray | None = None


# ---------------------------------------------------------------------------
# static (early / frequent) oracle


def _signal_prices(game: DiscreteGame, disclosed: np.ndarray) -> np.ndarray:
    """Silent-firm price at each grid signal given the disclosure set."""
    p, q = game.params.p, game.params.q
    keep = 1.0 - p * disclosed
    sw = float(np.sum(game.w * keep))
    sv = float(np.sum(game.w * game.v * keep))
    num = q * game.v * keep + (1.0 - q) * sv
    den = q * keep + (1.0 - q) * sw
    return num / den


def _silent_payoffs(game: DiscreteGame, disclosed: np.ndarray) -> np.ndarray:
    """Each cell's expected future silent price (signal yet unrealized).

    The own-signal veracious term prices the cell as silent: a cell
    weighing the silent option is, in the candidate equilibrium, exactly
    the indifferent type, and indifferent types stay silent (the same
    tiebreak that makes prices left continuous).  Pricing that term off
    the disclosed branch instead would leave a whole interval of stable
    grid thresholds.
    """
    p, q = game.params.p, game.params.q
    keep = 1.0 - p * disclosed
    sw = float(np.sum(game.w * keep))
    sv = float(np.sum(game.w * game.v * keep))
    own_silent = (q * game.v + (1.0 - q) * sv) / (q + (1.0 - q) * sw)
    avg = float(np.sum(game.w * _signal_prices(game, disclosed)))
    return q * own_silent + (1.0 - q) * avg


def _iterate_static(game: DiscreteGame, init: np.ndarray, delta: float, max_iter=500):
    disclosed = init.copy()
    wd = delta + delta**2 + delta**3
    for it in range(1, max_iter + 1):
        if wd > 0:
            keep = 1.0 - game.params.p * disclosed
            p2 = float(np.sum(game.w * game.v * keep) / np.sum(game.w * keep))
            stay = p2 + wd * _silent_payoffs(game, disclosed)
            go = (1.0 + wd) * game.v
        else:
            stay = _silent_payoffs(game, disclosed)
            go = game.v
        new = go > stay + _TIE_EPS
        if np.array_equal(new, disclosed):
            return disclosed, it
        disclosed = new
    raise DomainError("static oracle failed to reach a fixed point")


def _static_inits(game: DiscreteGame):
    guess = solve_benchmark(game.params).threshold
    return [game.v > guess, np.zeros_like(game.v, dtype=bool), np.ones_like(game.v, dtype=bool)]


def oracle_solve_early(params: ModelParams, n: int = 4000, delta: float = 0.0) -> OracleEquilibrium:
    game = DiscreteGame.build(params, n)
    sets, iters = [], 0
    for init in _static_inits(game):
        d, it = _iterate_static(game, init, delta)
        sets.append(d)
        iters = max(iters, it)
    agree = all(np.array_equal(sets[0], s) for s in sets[1:])
    # fixed point must be upper-tail: nondecreasing indicator over cells
    monotone = bool(np.all(np.diff(sets[0].astype(int)) >= 0))
    return OracleEquilibrium(
        kind="frequent" if delta > 0 else "early",
        threshold=game.threshold_of(sets[0]),
        iterations=iters,
        initializations_agree=agree and monotone,
        grid_step=game.step,
        disclosed=sets[0],
    )


# ---------------------------------------------------------------------------
# late oracle (signal realized before the disclosure decision)


def _late_price(game: DiscreteGame, s: float, disclosed: np.ndarray) -> float:
    p, q = game.params.p, game.params.q
    keep = 1.0 - p * disclosed
    own = keep[game.cell_of(s)]
    num = q * s * own + (1.0 - q) * float(np.sum(game.w * game.v * keep))
    den = q * own + (1.0 - q) * float(np.sum(game.w * keep))
    return num / den


def oracle_solve_late(
    params: ModelParams,
    signals,
    n: int = 4000,
    cost: float = 0.0,
) -> OracleEquilibrium:
    game = DiscreteGame.build(params, n)
    per_signal = {}
    agree_all, iters_all = True, 0
    for s in signals:
        results = []
        for init in (np.zeros(len(game.v), bool), np.ones(len(game.v), bool)):
            disclosed = init.copy()
            for it in range(1, 500 + 1):
                price = _late_price(game, float(s), disclosed)
                new = game.v - cost > price + _TIE_EPS
                if np.array_equal(new, disclosed):
                    break
                disclosed = new
            else:
                raise DomainError(f"late oracle did not converge at s={s}")
            results.append(disclosed)
            iters_all = max(iters_all, it)
        agree_all &= np.array_equal(results[0], results[1])
        per_signal[float(s)] = game.threshold_of(results[0])
    return OracleEquilibrium(
        kind="late",
        threshold=None,
        iterations=iters_all,
        initializations_agree=agree_all,
        grid_step=game.step,
        per_signal=per_signal,
    )


# ---------------------------------------------------------------------------
# dynamic oracle (choose the disclosure date)


def oracle_solve_dynamic(
    params: ModelParams,
    costs: DynamicCosts,
    n: int = 800,
    max_iter: int = 400,
) -> OracleEquilibrium:
    """Joint fixed point of early sets and per-signal late sets.

    Alternates best responses (Gauss-Seidel): the late matrix L[j, i]
    says whether cell i silent at date 2 discloses after grid signal j;
    the early vector E[i] compares immediate disclosure against the
    optimal continuation implied by the current prices.
    """
    game = DiscreteGame.build(params, n)
    p, q = params.p, params.q
    v, w = game.v, game.w
    m = len(v)
    E = v > solve_benchmark(params).threshold  # warm start, verified below
    L = np.zeros((m, m), dtype=bool)
    diag = np.arange(m)
    for it in range(1, max_iter + 1):
        # inner loop: late sets to a fixed point given the early set
        for _ in range(200):
            disc = E[None, :] | L
            keep = 1.0 - p * disc
            sv = keep @ (w * v)
            sw = keep @ w
            own = keep[diag, diag]
            prices = (q * v * own + (1.0 - q) * sv) / (q * own + (1.0 - q) * sw)
            newL = (v[None, :] - costs.c_late > prices[:, None] + _TIE_EPS) & ~E[None, :]
            if np.array_equal(newL, L):
                break
            L = newL
        else:
            raise DomainError("dynamic oracle: late sets did not converge")
        # outer step: early set against the optimal continuation; the own
        # veracious term prices the cell as silent (same tiebreak as in
        # _silent_payoffs)
        own_silent = (q * v + (1.0 - q) * sv) / (q + (1.0 - q) * sw)
        cont = np.maximum(v[None, :] - costs.c_late, prices[:, None])
        delay = q * np.maximum(v - costs.c_late, own_silent) + (1.0 - q) * (w @ cont)
        newE = v - costs.c_early > delay + _TIE_EPS
        if np.array_equal(newE, E):
            break
        E = newE
    else:
        raise DomainError("dynamic oracle did not converge")

    per_signal = {}
    for j in range(0, m, max(m // 64, 1)):
        full = E | L[j]
        per_signal[float(v[j])] = game.threshold_of(full)
    return OracleEquilibrium(
        kind="dynamic",
        threshold=game.threshold_of(E),
        early_threshold=game.threshold_of(E),
        iterations=it,
        initializations_agree=bool(np.all(np.diff(E.astype(int)) >= 0)),
        grid_step=game.step,
        per_signal=per_signal,
    )


def max_deviation_gain(params: ModelParams, threshold: float, n: int = 4000) -> float:
    """Largest one-shot gain from deviating at a candidate early threshold.

    Every cell's payoff from flipping its own decision, holding the rest
    of the threshold strategy fixed; small values certify the analytic
    threshold as a grid equilibrium.
    """
    game = DiscreteGame.build(params, n)
    disclosed = game.v > threshold
    stay = _silent_payoffs(game, disclosed)
    equil = np.where(disclosed, game.v, stay)
    best = np.maximum(game.v, stay)
    return float(np.max(best - equil))


# ---------------------------------------------------------------------------
# Monte Carlo check of the pricing function


def monte_carlo_price(
    params: ModelParams,
    vhat: float,
    n: int = 10**6,
    seed: int = 0,
    n_bins: int = 20,
):
    """Simulate the signal game and compare prices to conditional means.

    Returns binned statistics among silent draws: the empirical mean value
    per signal bin against the model price evaluated at the bin's own mean
    signal (bin edges are aligned with vhat so no bin straddles the jump),
    plus the overall mean price across all draws, which rational
    expectations pins at the prior mean.
    """
    params.check_support(vhat)
    d = params.dist
    rng = np.random.default_rng(seed)
    v = np.asarray(d.sample(rng, n), dtype=float)
    informed = rng.random(n) < params.p
    veracious = rng.random(n) < params.q
    x = np.asarray(d.sample(rng, n), dtype=float)
    s = np.where(veracious, v, x)
    disclosed = informed & (v > vhat)
    silent = ~disclosed

    # vectorized piecewise-affine price for the silent draws
    le0, gt0 = nondisclosure_price_branches(params, d.lo, vhat)
    le1, gt1 = nondisclosure_price_branches(params, d.hi, vhat)
    slope_le = (le1 - le0) / (d.hi - d.lo)
    slope_gt = (gt1 - gt0) / (d.hi - d.lo)
    price_silent = np.where(
        s > vhat, gt0 + slope_gt * (s - d.lo), le0 + slope_le * (s - d.lo)
    )
    price = np.where(disclosed, v, price_silent)

    lo_edges = np.linspace(d.lo, vhat, max(2, n_bins // 2 + 1))
    hi_edges = np.linspace(vhat, d.hi, max(2, n_bins // 2 + 1))
    edges = np.unique(np.concatenate([lo_edges, hi_edges]))
    rows = []
    sv, pv = s[silent], v[silent]
    for a, b in zip(edges[:-1], edges[1:]):
        # the jump sits at the left edge: bins above vhat are open at a
        mask = (sv > a) & (sv <= b) if a >= vhat else (sv >= a) & (sv <= b)
        cnt = int(mask.sum())
        if cnt < 50:
            continue
        s_bar = float(sv[mask].mean())
        emp = float(pv[mask].mean())
        se = float(pv[mask].std(ddof=1) / np.sqrt(cnt))
        le, gt = nondisclosure_price_branches(params, s_bar, vhat)
        model = gt if a >= vhat else le
        rows.append(
            {
                "s_lo": float(a),
                "s_hi": float(b),
                "n": cnt,
                "s_mean": s_bar,
                "empirical_mean_value": emp,
                "model_price": model,
                "stderr": se,
            }
        )
    return {
        "bins": rows,
        "mean_price": float(price.mean()),
        "mean_price_stderr": float(price.std(ddof=1) / np.sqrt(n)),
        "prior_mean": params.mu,
        "n": n,
        "share_silent": float(silent.mean()),
    }
