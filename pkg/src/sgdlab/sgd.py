"""The SGD recursion and per-trajectory bookkeeping.

One step is x' = x - eps*f'(x) + eps*xi. A run executes the recursion under a
stop rule, recording the first exit from a monitored interval (boundary ties
count as inside; exit requires x strictly outside [a, b]), the 0-level
crossing times of the maximum, and optionally a strided path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import codes
from .backend import kernels
from .errors import ConfigError
from .landscape import Landscape, derivative
from .noise import NoiseModel

CROSS_CAP = 65_536  # recorded crossings per run; counting continues past it


@dataclass(frozen=True)
class StopRule:
    kind: str  # "fixed_steps" | "exit_interval" | "either"
    a: float = float("nan")
    b: float = float("nan")

    def __post_init__(self):
        if self.kind not in ("fixed_steps", "exit_interval", "either"):
            raise ConfigError(f"stop rule must be fixed_steps|exit_interval|either, got {self.kind!r}")
        if self.kind != "fixed_steps":
            if not (self.a < self.b):
                raise ConfigError("exit_interval stop rule needs a < b")

    @property
    def mode(self) -> int:
        return codes.STOP_FIXED if self.kind == "fixed_steps" else codes.STOP_EXIT


@dataclass(frozen=True)
class SgdRun:
    epsilon: float
    x0: float
    max_steps: int
    seed: int
    record_stride: int = 0  # 0 = summary only

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise ConfigError("epsilon must be positive")
        if self.max_steps < 1:
            raise ConfigError("max_steps must be >= 1")
        if self.record_stride < 0:
            raise ConfigError("record_stride must be >= 0")


@dataclass(frozen=True)
class TrajectorySummary:
    final_x: float
    steps_taken: int
    exit: tuple[int, str] | None  # (step, "left"|"right")
    crossings: tuple  # ((step, "up"|"down"), ...); includes (0, "up") when x0 >= 0
    path: tuple | None = field(default=None, repr=False)  # ((step, x), ...)
    aborted: bool = False
    crossings_truncated: bool = False


def step(x: float, land: Landscape, epsilon: float, xi: float) -> float:
    """One SGD update; additive in xi by construction."""
    return x - epsilon * derivative(land, x) + epsilon * xi


def _side_name(side: int) -> str:
    return "right" if side > 0 else "left"


def crossing_times(summary: TrajectorySummary) -> list[tuple[int, str]]:
    """The 0-level crossing times recorded by a run, oldest first."""
    return list(summary.crossings)


def crossings_from_path(xs, x0: float) -> list[tuple[int, str]]:
    """0-level crossing times of a trajectory x_1, x_2, ... started at x0.

    Pure-Python twin of the kernel bookkeeping; used by tests and for
    hand-built xi sequences.
    """
    out = [(0, "up")] if x0 >= 0 else []
    up = x0 >= 0.0
    for k, x in enumerate(xs, start=1):
        if up and x < 0.0:
            out.append((k, "down"))
            up = False
        elif not up and x >= 0.0:
            out.append((k, "up"))
            up = True
    return out


def run(cfg: SgdRun, land: Landscape, noise: NoiseModel, stop: StopRule) -> TrajectorySummary:
    """Execute one trajectory. Deterministic given (cfg.seed, run_index=0)."""
    nk, npar, tx, tc = noise.kernel_encoding()
    lo = stop.a if stop.mode == codes.STOP_EXIT else -np.inf
    hi = stop.b if stop.mode == codes.STOP_EXIT else np.inf
    (final_x, steps, exit_step, exit_side, aborted, p_steps, p_x, c_steps, c_dirs, truncated) = kernels().sgd_single(
        land.kind,
        land.params,
        nk,
        npar,
        tx,
        tc,
        cfg.epsilon,
        cfg.x0,
        cfg.max_steps,
        stop.mode,
        lo,
        hi,
        np.uint64(cfg.seed & 0xFFFFFFFFFFFFFFFF),
        0,
        cfg.record_stride,
        CROSS_CAP,
    )
    crossings = []
    if cfg.x0 >= 0:
        crossings.append((0, "up"))
    direction = {1: "up", -1: "down"}
    crossings.extend((int(s), direction[int(d)]) for s, d in zip(c_steps, c_dirs))
    return TrajectorySummary(
        final_x=float(final_x),
        steps_taken=int(steps),
        exit=(int(exit_step), _side_name(int(exit_side))) if exit_step >= 0 else None,
        crossings=tuple(crossings),
        path=tuple(zip(p_steps.tolist(), p_x.tolist())) if cfg.record_stride > 0 else None,
        aborted=bool(aborted),
        crossings_truncated=bool(truncated),
    )
