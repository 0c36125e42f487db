"""The recursion itself: single steps, deterministic flows, exits, crossing
bookkeeping, the distributional identity of a step on a linear piece, and
overflow behavior."""

import math

import pytest
from scipy import stats

from sgdlab.errors import ConfigError
from sgdlab.landscape import VShapeSpec, make_double_well, make_linear, make_vshape
from sgdlab.noise import gaussian, make_double_exponential, no_noise, pareto_symmetric, sample_block
from sgdlab.rrw import exponential_roots
from sgdlab.sgd import SgdRun, StopRule, TrajectorySummary, crossings_from_path, run, step
from sgdlab.montecarlo import Scenario, StartRule, run_batch

DW = make_double_well()
VS = make_vshape(VShapeSpec(c_l=5.0, c_r=1.0, delta=1.0))


def test_step_deterministic_constant_derivative():
    land = make_linear(3.0)
    assert step(1.0, land, 0.1, 0.0) == 1.0 - 0.1 * 3.0


def test_step_at_vshape_maximum_moves_right():
    assert step(0.0, VS, 0.05, 0.0) == 0.05 * 1.0  # f'(0) = -c_r


def test_step_linear_in_noise():
    for x in (-1.3, 0.0, 0.7):
        base = step(x, DW, 0.01, 0.0)
        for a in (-2.0, 0.5, 10.0):
            assert math.isclose(step(x, DW, 0.01, a) - base, 0.01 * a, rel_tol=0, abs_tol=1e-15)


def test_zero_noise_run_converges_to_well():
    cfg = SgdRun(epsilon=0.01, x0=0.5, max_steps=10_000, seed=1)
    out = run(cfg, DW, no_noise(), StopRule(kind="fixed_steps"))
    assert abs(out.final_x - 1.0) < 1e-3
    assert out.steps_taken == 10_000
    assert not out.aborted


def test_zero_noise_descent_property():
    cfg = SgdRun(epsilon=0.01, x0=0.5, max_steps=2_000, seed=1, record_stride=1)
    out = run(cfg, DW, no_noise(), StopRule(kind="fixed_steps"))
    f = lambda x: (x * x - 1.0) ** 2  # noqa: E731 - potential inside [-2,2]
    values = [f(x) for _, x in out.path]
    assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))


def test_run_determinism():
    cfg = SgdRun(epsilon=0.01, x0=0.0, max_steps=5_000, seed=77)
    noise = make_double_exponential(1.0, 2.0)
    stop = StopRule(kind="exit_interval", a=-1.0, b=1.0)
    a = run(cfg, VS, noise, stop)
    b = run(cfg, VS, noise, stop)
    assert a == b


def test_vshape_always_exits():
    noise = make_double_exponential(1.0, 2.0)
    scen = Scenario(
        landscape=VS,
        noise=noise,
        epsilon=0.01,
        steps=1_000_000,
        start=StartRule(kind="point", x=0.0),
        stop=StopRule(kind="exit_interval", a=-1.0, b=1.0),
        n_runs=1_000,
        seed=5,
    )
    b = run_batch(scen)
    assert b.n_not_exited == 0
    assert b.n_exited_left + b.n_exited_right == 1_000


def test_exit_fields_and_boundary_tie_is_inside():
    # drift +0.25/step from 0 with no noise: hits exactly 1.0 at step 4
    # (stays inside), exits at step 5
    land = make_linear(-0.25)
    cfg = SgdRun(epsilon=1.0, x0=0.0, max_steps=100, seed=0)
    out = run(cfg, land, no_noise(), StopRule(kind="exit_interval", a=-1.0, b=1.0))
    assert out.exit == (5, "right")
    assert out.final_x == 1.25


def test_monotone_run_has_only_initial_crossing():
    land = make_linear(-1.0)
    cfg = SgdRun(epsilon=0.1, x0=0.0, max_steps=50, seed=0)
    out = run(cfg, land, no_noise(), StopRule(kind="fixed_steps"))
    assert out.crossings == ((0, "up"),)


def test_crossings_from_forced_alternating_sequence():
    land = make_linear(1.0)  # f' = 1 everywhere
    eps = 0.1
    x = 0.0
    xs = []
    for k in range(10):
        xi = -30.0 if k % 2 == 0 else 30.0  # large alternating kicks
        x = step(x, land, eps, xi)
        xs.append(x)
    crossings = crossings_from_path(xs, 0.0)
    dirs = [d for _, d in crossings]
    assert dirs[0] == "up"
    assert all(a != b for a, b in zip(dirs, dirs[1:])), "directions must alternate"


def test_kernel_crossings_match_python_reference():
    noise = make_double_exponential(1.0, 1.0)
    cfg = SgdRun(epsilon=0.05, x0=0.0, max_steps=400, seed=11, record_stride=1)
    out = run(cfg, VS, noise, StopRule(kind="fixed_steps"))
    xs = [x for s, x in out.path if s >= 1]
    assert crossings_from_path(xs, 0.0) == list(out.crossings)


def test_first_down_crossing_bounded_by_analytic_probability():
    # P(first down-crossing happens before exit) <= p_down for the matching walk
    beta = 2.0
    noise = make_double_exponential(1.0, beta)
    scen = Scenario(
        landscape=VS,
        noise=noise,
        epsilon=0.01,
        steps=1_000_000,
        start=StartRule(kind="point", x=0.0),
        stop=StopRule(kind="exit_interval", a=-1.0, b=1.0),
        n_runs=20_000,
        seed=13,
    )
    b = run_batch(scen)
    frac_down = float((b.first_down >= 0).mean())
    p_down = exponential_roots(1.0, beta, 5.0, 1.0).p_down
    ci = 3.0 * math.sqrt(p_down * (1 - p_down) / scen.n_runs)
    assert frac_down <= p_down + ci


def test_crossing_exit_consistency():
    noise = make_double_exponential(1.0, 1.0)
    for seed in range(20):
        cfg = SgdRun(epsilon=0.02, x0=0.0, max_steps=100_000, seed=seed)
        out = run(cfg, VS, noise, StopRule(kind="exit_interval", a=-1.0, b=1.0))
        if out.exit and len(out.crossings) > 1:
            assert out.exit[0] >= out.crossings[-1][0]


def test_step_scale_covariance_on_linear_piece():
    # a single step on f' = c is distributed as eps*(xi - c): two-sample KS
    # against directly drawn noise from an independent seed
    c, eps = 2.0, 0.05
    land = make_linear(c)
    noise = gaussian(1.0)
    scen = Scenario(
        landscape=land,
        noise=noise,
        epsilon=eps,
        steps=1,
        start=StartRule(kind="point", x=0.0),
        stop=StopRule(kind="fixed_steps"),
        n_runs=100_000,
        seed=21,
    )
    stepped = run_batch(scen).final_x
    direct = eps * (sample_block(noise, 22, 100_000) - c)
    d = stats.ks_2samp(stepped, direct).statistic
    crit_1pct = 1.628 * math.sqrt(2.0 / 100_000)
    assert d < crit_1pct


def test_overflow_aborts_gracefully():
    land = make_linear(-1e299)
    cfg = SgdRun(epsilon=10.0, x0=0.0, max_steps=100, seed=0)
    out = run(cfg, land, no_noise(), StopRule(kind="fixed_steps"))
    assert out.aborted
    assert out.steps_taken < 100


def test_either_rule_equals_exit_interval_with_budget():
    noise = make_double_exponential(1.0, 2.0)
    cfg = SgdRun(epsilon=0.01, x0=0.0, max_steps=10_000, seed=31)
    a = run(cfg, VS, noise, StopRule(kind="exit_interval", a=-1.0, b=1.0))
    b = run(cfg, VS, noise, StopRule(kind="either", a=-1.0, b=1.0))
    assert a == b


def test_validation_rejects_degenerate_budget():
    with pytest.raises(ConfigError):
        SgdRun(epsilon=0.01, x0=0.0, max_steps=0, seed=1)
    with pytest.raises(ConfigError):
        SgdRun(epsilon=0.0, x0=0.0, max_steps=10, seed=1)
    with pytest.raises(ConfigError):
        StopRule(kind="exit_interval", a=1.0, b=-1.0)
    with pytest.raises(ConfigError):
        StopRule(kind="sometimes")


def test_summary_shape():
    cfg = SgdRun(epsilon=0.01, x0=0.25, max_steps=100, seed=3, record_stride=10)
    out = run(cfg, DW, pareto_symmetric(1.5), StopRule(kind="fixed_steps"))
    assert isinstance(out, TrajectorySummary)
    assert out.path[0] == (0, 0.25)
    assert len(out.path) == 11
    steps = [s for s, _ in out.path]
    assert steps == sorted(steps)
    cross_steps = [s for s, _ in out.crossings]
    assert cross_steps == sorted(cross_steps)
