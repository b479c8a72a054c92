"""Command-line front end.

Subcommands: ``solve`` (threshold solvers), ``curve`` (CSV emitters for
prices and beliefs), ``reproduce`` (canned figure bundles with qualitative
pass/fail summaries), ``oracle-check`` (analytic-vs-brute-force diffs).

Exit codes: 0 success, 1 configuration/usage error, 2 solver failure.
Model configuration is TOML; unknown keys are rejected.  Output is
deterministic for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib
from pathlib import Path

import numpy as np

from . import beliefs as beliefs_mod
from . import equilibrium as eq
from . import extensions as ext
from . import oracle as oracle_mod
from .beliefs import DomainError, ModelParams
from .distributions import DistributionError, Uniform, from_spec
from .pricing import expected_nondisclosure_price, price_curve

log = logging.getLogger("disclosure_game")

_KNOWN_KEYS = {
    "p",
    "q",
    "vhat",
    "signal",
    "delta",
    "cost_early",
    "cost_late",
    "grid",
    "seed",
    "dist",
    "noise",
}


class ConfigError(ValueError):
    pass


def load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from exc
    unknown = set(cfg) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def params_from_config(cfg: dict) -> ModelParams:
    try:
        p = float(cfg["p"])
        q = float(cfg["q"])
    except KeyError as exc:
        raise ConfigError(f"missing required key {exc} in model config") from exc
    dist = from_spec(cfg.get("dist", {"kind": "uniform", "support": [0.0, 1.0]}))
    return ModelParams(p=p, q=q, dist=dist)


def _emit(text: str, out: str | None):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _write_csv(path_or_none, header, rows):
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([f"{x:.12g}" if isinstance(x, float) else x for x in r])
    _emit(buf.getvalue(), path_or_none)


# ---------------------------------------------------------------------------
# solve


def cmd_solve(args) -> int:
    cfg = load_config(args.model)
    params = params_from_config(cfg)
    mode = args.mode
    if mode == "benchmark":
        res = eq.solve_benchmark(params)
    elif mode == "early":
        res = eq.solve_early(params)
    elif mode == "late":
        s = args.signal if args.signal is not None else cfg.get("signal")
        if s is None:
            raise ConfigError("late mode needs --signal")
        v = eq.solve_late(params, float(s))
        res = eq.EquilibriumResult(
            kind="late", threshold=v, residual=0.0, iterations=0,
            bracket=(params.dist.lo, params.dist.hi),
            regime_notes=[f"signal={float(s)}"],
        )
    elif mode == "frequent":
        delta = args.delta if args.delta is not None else cfg.get("delta")
        if delta is None:
            raise ConfigError("frequent mode needs --delta")
        res = eq.solve_frequent(params, float(delta))
    elif mode == "dynamic":
        ce = args.cost_early if args.cost_early is not None else cfg.get("cost_early", 0.0)
        cl = args.cost_late if args.cost_late is not None else cfg.get("cost_late", 0.0)
        res = eq.solve_dynamic(params, eq.DynamicCosts(float(ce), float(cl)))
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown mode {mode}")
    if res.residual > eq.RESIDUAL_TOL:
        _emit(res.to_json(indent=2), args.out)
        log.error("residual %.3g above tolerance", res.residual)
        return 2
    _emit(res.to_json(indent=2), args.out)
    return 0


# ---------------------------------------------------------------------------
# curve


def cmd_curve(args) -> int:
    cfg = load_config(args.model)
    params = params_from_config(cfg)
    grid = int(args.grid or cfg.get("grid", 401))
    kind = args.mode or "price"
    if kind == "price":
        vhat = cfg.get("vhat")
        if vhat is None:
            raise ConfigError("price curve needs a vhat key in the model config")
        curve = price_curve(params, float(vhat), grid)
        _write_csv(args.out, ["s", "price", "branch"], curve.rows())
        return 0
    if kind == "beliefs":
        vhat = cfg.get("vhat")
        if vhat is None:
            raise ConfigError("belief curve needs a vhat key in the model config")
        s_grid = np.linspace(params.dist.lo, params.dist.hi, grid)
        rows, baseline = beliefs_mod.belief_table(params, float(vhat), s_grid)
        header = ["s", "informed_veracious", "informed_noise",
                  "uninformed_veracious", "uninformed_noise"]
        _write_csv(args.out, header, rows)
        log.info("naive product baseline: %s", json.dumps(baseline, sort_keys=True))
        return 0
    if kind == "noisy":
        vhat = cfg.get("vhat")
        noise_spec = cfg.get("noise")
        if vhat is None or noise_spec is None:
            raise ConfigError("noisy curve needs vhat and [noise] in the model config")
        noise = ext.NoiseModel(from_spec(noise_spec))
        s, prices = ext.noisy_price_curve(params, noise, float(vhat), grid)
        rows = [(float(a), float(b), noise.tau, params.q) for a, b in zip(s, prices)]
        _write_csv(args.out, ["s", "price", "tau", "q"], rows)
        return 0
    raise ConfigError(f"unknown curve mode {kind!r}")


# ---------------------------------------------------------------------------
# reproduce


def _uniform_params(p, q):
    return ModelParams(p=p, q=q, dist=Uniform(0.0, 1.0))


def _figure_bundle(figure: str, outdir: Path):
    claims = {}
    files = {}

    def save(name, header, rows):
        path = outdir / name
        _write_csv(str(path), header, rows)
        files[name] = str(path)

    if figure == "fig2":
        params = _uniform_params(0.6, 0.4)
        vhat = 0.4
        s_grid = np.linspace(0, 1, 401)
        rows, baseline = beliefs_mod.belief_table(params, vhat, s_grid)
        save("fig2_beliefs.csv",
             ["s", "informed_veracious", "informed_noise",
              "uninformed_veracious", "uninformed_noise"], rows)
        pi = beliefs_mod.pr_informed_given_silence(params, vhat)
        lo_b = beliefs_mod.joint_posterior(params, vhat - 0.01, vhat)
        hi_b = beliefs_mod.joint_posterior(params, vhat + 0.01, vhat)
        claims["informed_given_silence_0375"] = abs(pi - 0.375) < 1e-12
        claims["uninformed_given_silence_0625"] = abs((1 - pi) - 0.625) < 1e-12
        claims["jump_informed_veracious_down"] = hi_b.pr_iv < lo_b.pr_iv
        claims["jump_informed_noise_up"] = hi_b.pr_in > lo_b.pr_in
        claims["jump_uninformed_veracious_up"] = hi_b.pr_uv > lo_b.pr_uv
        claims["jump_uninformed_noise_up"] = hi_b.pr_un > lo_b.pr_un
        extra = {"baseline": baseline}
    elif figure == "fig3":
        params = _uniform_params(0.5, 0.3)
        vb = eq.solve_benchmark(params).threshold
        for label, vhat in (("a", 0.2), ("b", vb), ("c", 0.7)):
            curve = price_curve(params, vhat, 401)
            save(f"fig3_panel_{label}.csv", ["s", "price", "branch"], curve.rows())
            jump = curve.left_limit_at_vhat - curve.right_limit_at_vhat
            if label == "a":
                claims["panel_a_upward_jump"] = jump < -1e-6
            elif label == "b":
                claims["panel_b_continuous"] = abs(jump) < 1e-9
            else:
                claims["panel_c_downward_jump"] = jump > 1e-6
        extra = {"v_benchmark": vb}
    elif figure == "fig4":
        params = _uniform_params(0.9, 0.75)
        res = eq.solve_early(params)
        ve = res.threshold
        vb = eq.solve_benchmark(params).threshold
        v_grid = np.linspace(0, 1, 801)
        rows = [
            (float(v), expected_nondisclosure_price(params, float(v), ve))
            for v in v_grid
        ]
        save("fig4_expected_price.csv", ["v", "expected_nondisclosure_price"], rows)
        diffs = np.asarray([r[1] - r[0] for r in rows])
        signs = np.sign(diffs[np.abs(diffs) > 1e-12])
        crossings = int(np.sum(signs[:-1] != signs[1:]))
        left = expected_nondisclosure_price(params, ve, ve)
        right = expected_nondisclosure_price(params, min(ve + 1e-9, 1.0), ve)
        claims["threshold_in_interval"] = vb < ve < params.mu
        claims["single_crossing_of_45_degree_line"] = crossings == 1
        claims["downward_jump_at_threshold"] = left > right
        extra = {"v_early": ve, "v_benchmark": vb}
    elif figure == "fig5":
        q_grid = np.round(np.arange(0.05, 0.951, 0.05), 4)
        rows = []
        for qv in q_grid:
            rows.append((float(qv), eq.solve_early(_uniform_params(0.5, float(qv))).threshold))
        save("fig5_early_threshold.csv", ["q", "v_early"], rows)
        vals = [r[1] for r in rows]
        vb = eq.solve_benchmark(_uniform_params(0.5, 0.5)).threshold
        claims["early_threshold_increasing_in_q"] = all(
            b > a for a, b in zip(vals, vals[1:])
        )
        claims["low_q_limit_near_benchmark"] = abs(
            eq.solve_early(_uniform_params(0.5, 1e-6)).threshold - vb
        ) < 1e-4
        extra = {"v_benchmark": vb}
    elif figure == "fig6":
        vb = eq.solve_benchmark(_uniform_params(0.5, 0.5)).threshold
        q_grid = np.round(np.arange(0.05, 0.951, 0.05), 4)
        rows = []
        for qv in q_grid:
            params = _uniform_params(0.5, float(qv))
            rows.append(
                (
                    float(qv),
                    eq.solve_late(params, 0.20),
                    eq.solve_late(params, vb),
                    eq.solve_late(params, 0.65),
                )
            )
        save("fig6_late_threshold.csv",
             ["q", "v_late_s020", "v_late_s_benchmark", "v_late_s065"], rows)
        low = [r[1] for r in rows]
        mid = [r[2] for r in rows]
        high = [r[3] for r in rows]
        claims["low_signal_curve_decreasing_in_q"] = all(b < a for a, b in zip(low, low[1:]))
        claims["benchmark_signal_curve_flat"] = max(abs(m - vb) for m in mid) < 1e-8
        claims["high_signal_curve_increasing_in_q"] = all(b > a for a, b in zip(high, high[1:]))
        extra = {"v_benchmark": vb}
    elif figure == "fig7":
        params = _uniform_params(0.9, 0.6)
        vb = eq.solve_benchmark(params).threshold
        curve = eq.solve_late_curve(params, 201)
        save("fig7_late_threshold.csv", ["s", "v_late", "regime"], curve.rows())
        below = curve.s < vb - 1e-9
        above = curve.s > vb + 1e-9
        claims["threshold_above_signal_below_benchmark"] = bool(
            np.all(curve.v_late[below] > curve.s[below])
        )
        claims["threshold_below_signal_above_benchmark"] = bool(
            np.all(curve.v_late[above] < curve.s[above])
        )
        claims["threshold_crosses_at_benchmark"] = abs(curve(vb) - vb) < 1e-6
        extra = {"v_benchmark": vb, "kink_at": curve.kink_at}
    elif figure == "fig8":
        # Note: at this noise width the uncertain-veracity curve is monotone
        # on the interior (the downward jump at vhat is too small relative to
        # the local slope); non-monotonicity only appears above a finite
        # precision, which panel c documents.
        vhat = 0.41
        noise = ext.NoiseModel(Uniform(-0.085, 0.085))
        extra = {"tau": noise.tau}
        for label, qv in (("a", 0.15), ("b", 1.0)):
            params = _uniform_params(0.6, qv)
            s, prices = ext.noisy_price_curve(params, noise, vhat, 401)
            rows = [(float(a), float(b), noise.tau, qv) for a, b in zip(s, prices)]
            save(f"fig8_panel_{label}.csv", ["s", "price", "tau", "q"], rows)
            a_int, b_int = ext.interior_window(params, noise)
            keep = (s >= a_int) & (s <= b_int)
            drops = ext.detect_nonmonotonicity(s[keep], prices[keep])
            if label == "a":
                claims["uncertain_veracity_monotone_at_this_precision"] = len(drops) == 0
            else:
                claims["certain_veracity_monotone"] = len(drops) == 0
        params = _uniform_params(0.6, 0.15)
        onset = ext.find_tau_hat(params, vhat)
        extra["tau_hat"] = onset["tau_hat"]
        sharp = ext.NoiseModel.uniform_with_precision(4.0 * onset["tau_hat"])
        a_int, b_int = ext.interior_window(params, sharp)
        s, prices = ext.noisy_price_curve(
            params, sharp, vhat, 801, s_window=(max(a_int, vhat - 0.06), min(b_int, vhat + 0.06))
        )
        rows = [(float(a), float(b), sharp.tau, 0.15) for a, b in zip(s, prices)]
        save("fig8_panel_c.csv", ["s", "price", "tau", "q"], rows)
        drops = ext.detect_nonmonotonicity(s, prices)
        claims["uncertain_veracity_nonmonotone_above_onset"] = any(
            abs(a - vhat) < 0.05 for a, _, _ in drops
        )
    else:
        raise ConfigError(f"unknown figure id {figure!r}")

    summary = {
        "figure": figure,
        "files": files,
        "claims": claims,
        "pass": all(claims.values()),
        **extra,
    }
    (outdir / f"{figure}_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    return summary


def cmd_reproduce(args) -> int:
    outdir = Path(args.out or f"./{args.figure}")
    outdir.mkdir(parents=True, exist_ok=True)
    summary = _figure_bundle(args.figure, outdir)
    sys.stdout.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return 0 if summary["pass"] else 2


# ---------------------------------------------------------------------------
# oracle-check


def cmd_oracle_check(args) -> int:
    cfg = load_config(args.model)
    params = params_from_config(cfg)
    n = int(args.grid or cfg.get("grid", 4000))
    mode = args.mode or "early"
    if mode == "early":
        analytic = eq.solve_early(params).threshold
        res = oracle_mod.oracle_solve_early(params, n)
        gap = abs(analytic - res.threshold)
    elif mode == "frequent":
        delta = float(args.delta if args.delta is not None else cfg.get("delta", 0.5))
        analytic = eq.solve_frequent(params, delta).threshold
        res = oracle_mod.oracle_solve_early(params, n, delta=delta)
        gap = abs(analytic - res.threshold)
    elif mode == "late":
        s = float(args.signal if args.signal is not None else cfg.get("signal", 0.5))
        analytic = eq.solve_late(params, s)
        res = oracle_mod.oracle_solve_late(params, [s], n)
        gap = abs(analytic - res.per_signal[s])
    elif mode == "dynamic":
        ce = float(args.cost_early if args.cost_early is not None else cfg.get("cost_early", 0.0))
        cl = float(args.cost_late if args.cost_late is not None else cfg.get("cost_late", 0.0))
        costs = eq.DynamicCosts(ce, cl)
        analytic = eq.solve_dynamic(params, costs).threshold
        res = oracle_mod.oracle_solve_dynamic(params, costs, n=min(n, 1000))
        gap = abs(analytic - res.threshold)
    else:
        raise ConfigError(f"unknown oracle-check mode {mode!r}")
    report = {
        "mode": mode,
        "analytic": analytic,
        "oracle": res.threshold if mode != "late" else res.per_signal,
        "gap": gap,
        "grid_step": res.grid_step,
        "initializations_agree": res.initializations_agree,
        "pass": gap <= 2.0 * res.grid_step and res.initializations_agree,
    }
    _emit(json.dumps(report, indent=2, sort_keys=True), args.out)
    return 0 if report["pass"] else 2


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disclosure-game",
        description="Threshold solvers and price curves for the truth-or-noise disclosure game.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_mode_choices=None):
        p.add_argument("--model", required=True, help="TOML model config")
        if with_mode_choices:
            p.add_argument("--mode", choices=with_mode_choices)
        p.add_argument("--signal", type=float)
        p.add_argument("--delta", type=float)
        p.add_argument("--cost-early", dest="cost_early", type=float)
        p.add_argument("--cost-late", dest="cost_late", type=float)
        p.add_argument("--grid", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")
        p.add_argument("--format", choices=["csv", "json"], default=None)

    ps = sub.add_parser("solve", help="solve a threshold equilibrium")
    add_common(ps, ["benchmark", "early", "late", "frequent", "dynamic"])
    ps.set_defaults(func=cmd_solve)

    pc = sub.add_parser("curve", help="emit a price or belief curve as CSV")
    add_common(pc, ["price", "beliefs", "noisy"])
    pc.set_defaults(func=cmd_curve)

    pr = sub.add_parser("reproduce", help="regenerate a figure bundle")
    pr.add_argument("figure", choices=[f"fig{i}" for i in range(2, 9)])
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_reproduce)

    po = sub.add_parser("oracle-check", help="diff analytic solvers against the grid oracle")
    add_common(po, ["early", "late", "frequent", "dynamic"])
    po.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("DISCLOSURE_GAME_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError, DistributionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except eq.SolverError as exc:
        sys.stderr.write(f"solver error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
