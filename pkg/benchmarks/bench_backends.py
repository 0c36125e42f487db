#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-NumPy fallback.

Runs the hot workloads under both backends and reports throughput plus the
speedup ratio. The numba timing excludes JIT compilation (one warm-up call).

    python benchmarks/bench_backends.py [--quick]
"""

import argparse
import time

from sgdlab.backend import set_backend
from sgdlab.landscape import VShapeSpec, make_double_well, make_vshape
from sgdlab.montecarlo import Scenario, StartRule, run_batch
from sgdlab.noise import alpha_stable, gaussian, make_double_exponential
from sgdlab.rrw import RrwSpec, simulate_limit_direction
from sgdlab.sgd import StopRule


def _workloads(quick: bool):
    n_runs = 200 if quick else 1000
    n_steps = 10_000 if quick else 50_000
    exit_runs = 5_000 if quick else 20_000
    dw = make_double_well()
    vs = make_vshape(VShapeSpec(c_l=5.0, c_r=1.0, delta=1.0))

    def fixed(noise):
        return Scenario(
            landscape=dw,
            noise=noise,
            epsilon=0.01,
            steps=n_steps,
            start=StartRule(kind="uniform", a=0.0, b=1.9),
            stop=StopRule(kind="fixed_steps"),
            n_runs=n_runs,
            seed=1,
        )

    vshape_exit = Scenario(
        landscape=vs,
        noise=make_double_exponential(1.0, 2.0),
        epsilon=0.01,
        steps=1_000_000,
        start=StartRule(kind="point", x=0.0),
        stop=StopRule(kind="exit_interval", a=-1.0, b=1.0),
        n_runs=exit_runs,
        seed=2,
    )
    rrw_spec = RrwSpec(noise=make_double_exponential(1.0, 2.0), c_l=5.0, c_r=1.0)

    return [
        ("double-well / gaussian (fixed steps)", lambda: run_batch(fixed(gaussian(1.0))), n_runs * n_steps),
        ("double-well / alpha-stable (fixed steps)", lambda: run_batch(fixed(alpha_stable(1.5))), n_runs * n_steps),
        ("v-shape exit / double-exponential", lambda: run_batch(vshape_exit), None),
        (
            "runaway walk limit direction",
            lambda: simulate_limit_direction(rrw_spec, max_steps=100_000, seed=3, n_runs=exit_runs),
            None,
        ),
    ]


def _time(fn):
    t0 = time.perf_counter()
    out = fn()
    elapsed = time.perf_counter() - t0
    return elapsed, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args()

    results = {}
    for backend in ("numba", "numpy"):
        try:
            set_backend(backend)
        except Exception as exc:  # numba missing
            print(f"skipping {backend}: {exc}")
            continue
        rows = []
        for name, fn, steps in _workloads(args.quick):
            if backend == "numba":
                _time(fn)  # JIT warm-up
            elapsed, _ = _time(fn)
            rows.append((name, elapsed, steps))
        results[backend] = rows

    print(f"\n{'workload':45s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for i, (name, _, steps) in enumerate(results.get("numpy", results.get("numba"))):
        t_nb = results["numba"][i][1] if "numba" in results else float("nan")
        t_np = results["numpy"][i][1] if "numpy" in results else float("nan")
        ratio = t_np / t_nb if t_nb and t_nb == t_nb else float("nan")
        extra = f"  ({steps / t_nb / 1e6:.0f} M steps/s jit)" if steps and t_nb == t_nb else ""
        print(f"{name:45s} {t_nb:9.3f}s {t_np:9.3f}s {ratio:7.1f}x{extra}")


if __name__ == "__main__":
    main()
