"""sgdlab: desk-scale experiments on 1-D SGD dynamics near critical points.

Simulates the recursion x_k = x_{k-1} - eps*f'(x_{k-1}) + eps*xi_k on piecewise
landscapes under heavy- and light-tailed noise, computes step-count/sticking
formulas, and analyzes escape from sharp maxima via a two-drift random walk.
"""

__version__ = "0.1.0"

from .noise import NoiseModel, SlowlyVarying, make_double_exponential, hill_tail_index, sample, tail_h
from .landscape import (
    Landscape,
    VShapeSpec,
    KCriticalSpec,
    make_double_well,
    make_vshape,
    make_k_critical,
    himmelblau_gradient,
    derivative,
)
from .sgd import SgdRun, StopRule, TrajectorySummary, step, run, crossing_times
from .timescales import TimeScaleSpec, n_eps, membership_report, sticking_radius, sticking_horizon
from .rrw import (
    RrwSpec,
    CrossingAnalysis,
    ExponentialRoots,
    rrw_step,
    simulate_limit_direction,
    crossing_probabilities,
    exponential_roots,
    exit_probability_bounds,
)
from .montecarlo import Scenario, BatchResult, run_batch, fraction_in_band, exit_side_frequencies, sticking_experiment
