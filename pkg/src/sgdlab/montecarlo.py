"""Batched, seeded experiment campaigns with confidence intervals.

A Scenario describes one experiment cell (landscape, noise, step size, step
budget, start rule, stop rule, run count, seed). run_batch executes its runs
with per-run derived streams, so aggregates are identical for any worker
count; helpers compute band fractions, exit-side frequencies, and the
sticking containment sweep.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, codes
from .backend import kernels
from .errors import ConfigError, DomainError
from .landscape import KCriticalSpec, Landscape, make_k_critical
from .noise import NoiseModel
from .rng import run_key
from .sgd import StopRule
from .timescales import TimeScaleSpec, n_eps, sticking_horizon, sticking_radius


@dataclass(frozen=True)
class StartRule:
    kind: str  # "point" | "uniform"
    x: float = float("nan")
    a: float = float("nan")
    b: float = float("nan")

    def __post_init__(self):
        if self.kind not in ("point", "uniform"):
            raise ConfigError(f"start rule must be point|uniform, got {self.kind!r}")
        if self.kind == "uniform" and not (self.a < self.b):
            raise ConfigError("uniform start needs a < b")
        if self.kind == "point" and math.isnan(self.x):
            raise ConfigError("point start needs x")


@dataclass(frozen=True)
class Scenario:
    landscape: Landscape
    noise: NoiseModel
    epsilon: float
    steps: TimeScaleSpec | int  # step budget: formula spec or literal
    start: StartRule
    stop: StopRule
    n_runs: int
    seed: int
    steps_multiple: float = 1.0  # e.g. 10 for over-running experiments

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise ConfigError("epsilon must be positive")
        if self.n_runs < 1:
            raise ConfigError("n_runs must be >= 1")
        if not (self.steps_multiple > 0):
            raise ConfigError("steps_multiple must be positive")
        if self.resolve_steps() < 1:
            raise ConfigError("step budget resolves to < 1")

    def resolve_steps(self) -> int:
        if isinstance(self.steps, (int, np.integer)):
            base = int(self.steps)
        else:
            base = n_eps(self.steps, self.epsilon)
        return max(1, int(math.floor(self.steps_multiple * base)))


@dataclass(frozen=True)
class BatchResult:
    final_x: np.ndarray
    steps: np.ndarray
    exit_step: np.ndarray
    exit_side: np.ndarray
    n_down: np.ndarray
    n_up: np.ndarray
    first_down: np.ndarray
    aborted: np.ndarray
    n_runs: int
    n_exited_left: int
    n_exited_right: int
    n_not_exited: int
    n_aborted: int
    wall_clock: float
    config_echo: dict = field(repr=False)
    version: str = __version__


def wilson_interval(successes: int, n: int, z: float = 1.959964) -> tuple[float, float]:
    """(center, halfwidth) of the Wilson score interval."""
    if n <= 0:
        raise DomainError("wilson_interval needs n > 0")
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    return center, half


def run_batch(s: Scenario) -> BatchResult:
    """n_runs independent trajectories; deterministic given (scenario, seed)."""
    nk, npar, tx, tc = s.noise.kernel_encoding()
    if s.start.kind == "uniform":
        start_mode, sa, sb = codes.START_UNIFORM, s.start.a, s.start.b
    else:
        start_mode, sa, sb = codes.START_POINT, s.start.x, s.start.x
    lo = s.stop.a if s.stop.mode == codes.STOP_EXIT else -np.inf
    hi = s.stop.b if s.stop.mode == codes.STOP_EXIT else np.inf
    t0 = time.perf_counter()
    final_x, steps, exit_step, exit_side, n_down, n_up, first_down, aborted = kernels().sgd_batch(
        s.landscape.kind,
        s.landscape.params,
        nk,
        npar,
        tx,
        tc,
        s.epsilon,
        start_mode,
        sa,
        sb,
        s.resolve_steps(),
        s.stop.mode,
        lo,
        hi,
        np.uint64(s.seed & 0xFFFFFFFFFFFFFFFF),
        s.n_runs,
    )
    wall = time.perf_counter() - t0
    n_left = int(np.sum(exit_side < 0))
    n_right = int(np.sum(exit_side > 0))
    echo = {
        "landscape": s.landscape.name,
        "noise": s.noise.family,
        "epsilon": s.epsilon,
        "steps": s.resolve_steps(),
        "start": s.start.kind,
        "stop": s.stop.kind,
        "n_runs": s.n_runs,
        "seed": s.seed,
    }
    return BatchResult(
        final_x=final_x,
        steps=steps,
        exit_step=exit_step,
        exit_side=exit_side,
        n_down=n_down,
        n_up=n_up,
        first_down=first_down,
        aborted=aborted,
        n_runs=s.n_runs,
        n_exited_left=n_left,
        n_exited_right=n_right,
        n_not_exited=s.n_runs - n_left - n_right,
        n_aborted=int(np.sum(aborted)),
        wall_clock=wall,
        config_echo=echo,
    )


def fraction_in_band(b: BatchResult, band: tuple[float, float]) -> tuple[float, float]:
    """Fraction of final iterates strictly inside (low, high), with Wilson-95 halfwidth."""
    low, high = band
    if not (low < high):
        raise DomainError("band must satisfy low < high")
    if b.n_runs == 0:
        raise DomainError("empty batch")
    hits = int(np.sum((b.final_x > low) & (b.final_x < high)))
    _, half = wilson_interval(hits, b.n_runs)
    return hits / b.n_runs, half


def exit_side_frequencies(b: BatchResult) -> tuple[float, float, float]:
    """(freq_left, freq_right, ci) over exited runs; non-exits are excluded
    and available as b.n_not_exited."""
    n_exited = b.n_exited_left + b.n_exited_right
    if n_exited == 0:
        raise DomainError("no run exited; exit-side frequencies undefined")
    _, half = wilson_interval(b.n_exited_left, n_exited)
    return b.n_exited_left / n_exited, b.n_exited_right / n_exited, half


@dataclass(frozen=True)
class StickingRow:
    epsilon: float
    delta: float
    horizon: int
    n_runs: int
    contained_fraction: float
    ci_halfwidth: float


def sticking_experiment(
    K: int,
    regime: str,
    noise: NoiseModel,
    epsilon_grid,
    t: float = 1.0,
    n_runs: int = 200,
    seed: int = 0,
    alpha: float | None = None,
    lead_coeff: float = -1.0,
) -> list[StickingRow]:
    """Containment sweep near a K-critical point.

    For each eps: start uniformly within a third of the sticking radius of
    the critical point, run t*h(eps) steps, and count the runs that never
    left the radius. lead_coeff < 0 puts a maximum at the critical point
    (the adversarial case: drift pushes outward).
    """
    if alpha is None and regime == "h1":
        alpha = noise.alpha
    rows = []
    for j, eps in enumerate(epsilon_grid):
        delta = sticking_radius(regime, eps, K, alpha=alpha)
        horizon = max(1, int(math.floor(t * sticking_horizon(regime, eps, K, alpha=alpha))))
        window = max(1.0, 2.0 * delta)
        land = make_k_critical(KCriticalSpec(K=K, c=0.0, lead_coeff=lead_coeff, delta=window))
        scen = Scenario(
            landscape=land,
            noise=noise,
            epsilon=eps,
            steps=horizon,
            start=StartRule(kind="uniform", a=-delta / 3.0, b=delta / 3.0),
            stop=StopRule(kind="exit_interval", a=-delta, b=delta),
            n_runs=n_runs,
            seed=run_key(seed, j),
        )
        b = run_batch(scen)
        contained = b.n_not_exited - b.n_aborted
        _, half = wilson_interval(contained, n_runs)
        rows.append(
            StickingRow(
                epsilon=eps,
                delta=delta,
                horizon=horizon,
                n_runs=n_runs,
                contained_fraction=contained / n_runs,
                ci_halfwidth=half,
            )
        )
    return rows
