"""Command-line entry point.

Subcommands: run, table1, table2, table3, sticking, escape, timescale,
himmelblau, trajectory. Every subcommand honors --seed and writes plot-ready
CSV (fixed header and column order) plus a JSON summary with the config echo.
Exit codes: 0 success, 1 config error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, config as cfg
from .backend import active_backend, set_workers
from .errors import ConfigError, DomainError, NumericError
from .experiments import escape_rows, table1_rows, table2_rows, table3_rows
from .montecarlo import run_batch, sticking_experiment
from .noise import gaussian, log_corrected_pareto
from .rng import run_key
from .sgd import SgdRun, run
from .timescales import membership_report

DEFAULT_SEED = 202_406


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); flag misuse is a config error
        raise ConfigError(message)


def _write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".10g")
    return v


def _write_summary(out: Path, name: str, payload: dict) -> None:
    payload = {"version": __version__, "backend": active_backend(), **payload}
    (out / f"{name}_summary.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _load_optional(path_str):
    return cfg.load_yaml(path_str) if path_str else {}


def _cmd_table1(args, out: Path):
    d = _load_optional(args.config)
    # the light-tailed budget at eps <= 1e-4 needs >= 4e10 steps per run and
    # is out of desk range, so only the heavy-tailed default goes that deep
    g_eps = cfg._float_list(d, "gaussian_epsilons", "table1", (0.1, 0.01, 0.001))
    s_eps = cfg._float_list(d, "stable_epsilons", "table1", (0.1, 0.01, 0.001, 1e-4))
    n_runs = args.runs or cfg._take(d, "n_runs", "table1", int, 1000)
    stable_alpha = cfg._take(d, "stable_alpha", "table1", float, 1.5)
    cfg._done(d, "table1")
    t0 = time.perf_counter()
    rows = table1_rows(g_eps, s_eps, n_runs=n_runs, seed=args.seed, stable_alpha=stable_alpha)
    _write_csv(
        out / "table1.csv",
        ["noise", "epsilon", "n_steps", "n_runs", "fraction_in_band", "ci_halfwidth"],
        [(r.noise, r.epsilon, r.n_steps, r.n_runs, r.fraction, r.ci_halfwidth) for r in rows],
    )
    _write_summary(
        out,
        "table1",
        {
            "config": {"gaussian_epsilons": list(g_eps), "stable_epsilons": list(s_eps), "n_runs": n_runs, "seed": args.seed},
            "rows": [r.__dict__ for r in rows],
            "wall_clock_s": time.perf_counter() - t0,
        },
    )


def _cmd_table2(args, out: Path):
    d = _load_optional(args.config)
    eps = cfg._float_list(d, "epsilons", "table2", (0.1, 0.01, 0.001))
    n_runs = args.runs or cfg._take(d, "n_runs", "table2", int, 1000)
    multiple = cfg._take(d, "multiple", "table2", float, 10.0)
    stable_alpha = cfg._take(d, "stable_alpha", "table2", float, 1.5)
    cfg._done(d, "table2")
    t0 = time.perf_counter()
    rows = table2_rows(eps, n_runs=n_runs, seed=args.seed, multiple=multiple, stable_alpha=stable_alpha)
    _write_csv(
        out / "table2.csv",
        ["noise", "epsilon", "n_steps", "n_runs", "fraction_in_band", "ci_halfwidth"],
        [(r.noise, r.epsilon, r.n_steps, r.n_runs, r.fraction, r.ci_halfwidth) for r in rows],
    )
    _write_summary(
        out,
        "table2",
        {
            "config": {"epsilons": list(eps), "n_runs": n_runs, "multiple": multiple, "seed": args.seed},
            "rows": [r.__dict__ for r in rows],
            "wall_clock_s": time.perf_counter() - t0,
        },
    )


_EXIT_HEADER = ["beta", "mu_up", "mu_down", "sim_left", "est_left", "sim_right", "est_right"]


def _exit_csv_rows(rows):
    return [(r.beta, r.mu_up, r.mu_down, r.sim_left, r.est_left, r.sim_right, r.est_right) for r in rows]


def _cmd_table3(args, out: Path):
    sweep = cfg.parse_sweep(_load_optional(args.config), "table3")
    if args.runs:
        sweep = dataclasses.replace(sweep, n_runs=args.runs)
    t0 = time.perf_counter()
    rows = table3_rows(
        betas=sweep.betas,
        alpha=sweep.alpha,
        c_l=sweep.c_l,
        c_r=sweep.c_r,
        delta=sweep.delta,
        epsilon=sweep.epsilon,
        n_runs=sweep.n_runs,
        seed=args.seed,
        max_steps=sweep.max_steps,
    )
    _write_csv(out / "table3.csv", _EXIT_HEADER, _exit_csv_rows(rows))
    _write_summary(
        out,
        "table3",
        {
            "config": {**sweep.to_dict(), "seed": args.seed},
            "rows": [r.__dict__ for r in rows],
            "wall_clock_s": time.perf_counter() - t0,
        },
    )


def _cmd_escape(args, out: Path):
    sweep = cfg.parse_sweep(_load_optional(args.config), "escape")
    n_runs = args.runs or sweep.n_runs
    t0 = time.perf_counter()
    rows = escape_rows(
        betas=sweep.betas,
        alpha=sweep.alpha,
        c_l=sweep.c_l,
        c_r=sweep.c_r,
        n_runs=n_runs,
        seed=args.seed,
        max_steps=sweep.max_steps,
    )
    _write_csv(out / "escape.csv", _EXIT_HEADER, _exit_csv_rows(rows))
    _write_summary(
        out,
        "escape",
        {
            "config": {**sweep.to_dict(), "n_runs": n_runs, "seed": args.seed},
            "rows": [r.__dict__ for r in rows],
            "wall_clock_s": time.perf_counter() - t0,
        },
    )


def _cmd_sticking(args, out: Path):
    d = _load_optional(args.config)
    k_values = [int(k) for k in cfg._take(d, "k_values", "sticking", list, [1, 3])]
    regimes = [str(r) for r in cfg._take(d, "regimes", "sticking", list, ["h1", "h2"])]
    eps = cfg._float_list(d, "epsilons", "sticking", (1e-2, 1e-3, 1e-4))
    n_runs = args.runs or cfg._take(d, "n_runs", "sticking", int, 200)
    t = cfg._take(d, "t", "sticking", float, 1.0)
    h1_alpha = cfg._take(d, "h1_alpha", "sticking", float, 1.5)
    cfg._done(d, "sticking")
    t0 = time.perf_counter()
    csv_rows = []
    for regime in regimes:
        noise = log_corrected_pareto(h1_alpha) if regime == "h1" else gaussian(1.0)
        for K in k_values:
            rows = sticking_experiment(
                K, regime, noise, eps, t=t, n_runs=n_runs, seed=run_key(args.seed, K + (regime == "h2") * 64)
            )
            csv_rows.extend(
                (regime, K, r.epsilon, r.delta, r.horizon, r.n_runs, r.contained_fraction, r.ci_halfwidth)
                for r in rows
            )
    _write_csv(
        out / "sticking.csv",
        ["regime", "K", "epsilon", "delta", "horizon", "n_runs", "contained_fraction", "ci_halfwidth"],
        csv_rows,
    )
    _write_summary(
        out,
        "sticking",
        {
            "config": {"k_values": k_values, "regimes": regimes, "epsilons": list(eps), "n_runs": n_runs, "t": t, "seed": args.seed},
            "wall_clock_s": time.perf_counter() - t0,
        },
    )


def _cmd_timescale(args, out: Path):
    d = _load_optional(args.config)
    eps = cfg._float_list(d, "epsilons", "timescale", (1e-1, 1e-2, 1e-3, 1e-4, 1e-5))
    noise = cfg.parse_noise(cfg._take(d, "noise", "timescale", dict, {"family": "pareto_symmetric", "alpha": 1.5}), "timescale.noise")
    steps_spec, _ = cfg.parse_steps(
        cfg._take(d, "steps", "timescale", dict, {"mode": "n_eps", "regime": "h1", "alpha": 1.5, "gamma": 1.4}),
        "timescale.steps",
    )
    cfg._done(d, "timescale")
    if isinstance(steps_spec, int):
        raise ConfigError("timescale.steps: a literal budget has no scale diagnostics; use mode n_eps")
    report = membership_report(steps_spec, noise, sorted(eps, reverse=True))
    _write_csv(
        out / "timescale.csv",
        ["epsilon", "n_eps", "eps_times_n", "tail_times_n", "eps_sq_times_n"],
        [(r.epsilon, r.n, r.eps_n, r.tail_n, r.eps_sq_n) for r in report.rows],
    )
    _write_summary(
        out,
        "timescale",
        {
            "config": {"epsilons": list(eps), "noise": cfg.noise_to_dict(noise), "regime": report.regime, "seed": args.seed},
            "eps_n_increasing": report.eps_n_increasing,
            "upper_decreasing_to_zero": report.upper_decreasing_to_zero,
            "in_class": report.in_class,
        },
    )


def _cmd_himmelblau(args, out: Path):
    d = _load_optional(args.config)
    eps_list = cfg._float_list(d, "epsilons", "himmelblau", (1e-3, 1e-4, 1e-5, 1e-6))
    steps = cfg._take(d, "steps", "himmelblau", int, 100_000)
    start = cfg._float_list(d, "start", "himmelblau", (-0.270845, -0.923039))
    radius_alpha = cfg._take(d, "radius_alpha", "himmelblau", float, 1.2)
    stride = cfg._take(d, "stride", "himmelblau", int, 10)
    cfg._done(d, "himmelblau")
    if len(start) != 2:
        raise ConfigError("himmelblau.start: expected [x, y]")
    from .backend import kernels

    t0 = time.perf_counter()
    for j, eps in enumerate(eps_list):
        steps_arr, xs, ys = kernels().himmelblau_path(
            eps, start[0], start[1], steps, radius_alpha, np.uint64(run_key(args.seed, j)), 0, stride
        )
        tag = format(eps, ".0e").replace("-0", "-").replace("+0", "+")
        _write_csv(out / f"himmelblau_eps{tag}.csv", ["step", "x", "y"], list(zip(steps_arr.tolist(), xs.tolist(), ys.tolist())))
    _write_summary(
        out,
        "himmelblau",
        {
            "config": {
                "epsilons": list(eps_list),
                "steps": steps,
                "start": list(start),
                "radius_alpha": radius_alpha,
                "stride": stride,
                "seed": args.seed,
            },
            "wall_clock_s": time.perf_counter() - t0,
        },
    )


def _cmd_run(args, out: Path):
    if not args.config:
        raise ConfigError("run: --config is required")
    scen = cfg.parse_scenario(args.config)
    if args.runs:
        scen = cfg.parse_scenario_dict({**cfg.scenario_to_dict(scen), "n_runs": args.runs})
    if args.seed_given:
        scen = cfg.parse_scenario_dict({**cfg.scenario_to_dict(scen), "seed": args.seed})
    b = run_batch(scen)
    n_exited = b.n_exited_left + b.n_exited_right
    if n_exited:
        from .montecarlo import wilson_interval

        _, exit_ci = wilson_interval(b.n_exited_left, n_exited)
        ci = {"exit_left_freq": b.n_exited_left / n_exited, "ci_halfwidth": exit_ci}
    else:
        ci = {"exit_left_freq": None, "ci_halfwidth": None}
    _write_csv(
        out / "runs.csv",
        ["run", "final_x", "steps", "exited", "exit_step", "exit_side", "n_down_crossings", "n_up_crossings", "aborted"],
        [
            (
                i,
                float(b.final_x[i]),
                int(b.steps[i]),
                int(b.exit_step[i] >= 0),
                int(b.exit_step[i]),
                int(b.exit_side[i]),
                int(b.n_down[i]),
                int(b.n_up[i]),
                int(b.aborted[i]),
            )
            for i in range(b.n_runs)
        ],
    )
    _write_summary(
        out,
        "run",
        {
            "config": cfg.scenario_to_dict(scen),
            "aggregates": {
                "n_runs": b.n_runs,
                "n_exited_left": b.n_exited_left,
                "n_exited_right": b.n_exited_right,
                "n_not_exited": b.n_not_exited,
                "n_aborted": b.n_aborted,
                "mean_final_x": float(np.mean(b.final_x)),
            },
            "ci": ci,
            "wall_clock_s": b.wall_clock,
        },
    )


def _cmd_trajectory(args, out: Path):
    if not args.config:
        raise ConfigError("trajectory: --config is required")
    d = cfg.load_yaml(args.config)
    stride = cfg._take(d, "record_stride", "trajectory", int, 1)
    scen = cfg.parse_scenario_dict(d, path=str(args.config))
    seed = args.seed if args.seed_given else scen.seed
    sgd_cfg = SgdRun(
        epsilon=scen.epsilon,
        # a single trajectory needs one start; a uniform rule contributes its midpoint
        x0=scen.start.x if scen.start.kind == "point" else 0.5 * (scen.start.a + scen.start.b),
        max_steps=scen.resolve_steps(),
        seed=seed,
        record_stride=max(1, stride),
    )
    summary = run(sgd_cfg, scen.landscape, scen.noise, scen.stop)
    _write_csv(out / "trajectory.csv", ["step", "x"], [(int(s), float(x)) for s, x in summary.path])
    _write_summary(
        out,
        "trajectory",
        {
            "config": {**cfg.scenario_to_dict(scen), "record_stride": sgd_cfg.record_stride, "seed": seed},
            "final_x": summary.final_x,
            "steps_taken": summary.steps_taken,
            "exit": list(summary.exit) if summary.exit else None,
            "n_crossings": len(summary.crossings),
            "aborted": summary.aborted,
        },
    )


_COMMANDS = {
    "run": _cmd_run,
    "table1": _cmd_table1,
    "table2": _cmd_table2,
    "table3": _cmd_table3,
    "sticking": _cmd_sticking,
    "escape": _cmd_escape,
    "timescale": _cmd_timescale,
    "himmelblau": _cmd_himmelblau,
    "trajectory": _cmd_trajectory,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sgdlab", description=__doc__)
    p.add_argument("--version", action="version", version=f"sgdlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None, help="YAML config path")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="root seed override")
        sp.add_argument("--workers", type=int, default=None, help="kernel thread cap")
        sp.add_argument("--runs", type=int, default=None, help="run count override")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.seed_given = args.seed is not None
        if args.seed is None:
            args.seed = DEFAULT_SEED
        if args.workers is not None:
            set_workers(args.workers)
        if args.runs is not None and args.runs < 1:
            raise ConfigError("--runs must be >= 1")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](args, out)
        return 0
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NumericError, FloatingPointError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
