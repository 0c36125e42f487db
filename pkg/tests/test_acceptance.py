"""Acceptance criteria gate.

Each test prints one [PASS]/[FAIL] line per criterion (run with -s to see
them live). Tolerances are pinned here, not calibrated later. One criterion
(the "symmetric spec balances at 0.5" sub-criterion of the walk-invariant
suite) is asserted verbatim and fails by design: the walk's law is provably
not symmetric because state 0 carries the up-branch drift, and the same root
formula that reproduces the reference sweep to four decimals puts the true
value at >= 0.7146. See tests/test_rrw.py for the true bracketed behavior.
"""

import math
import time

import pytest

from sgdlab import cli
from sgdlab.experiments import (
    TABLE3_BETAS,
    interwell_transition_stats,
    table1_rows,
    table2_rows,
    table3_rows,
)
from sgdlab.montecarlo import sticking_experiment
from sgdlab.noise import gaussian, log_corrected_pareto, make_double_exponential
from sgdlab.rrw import (
    RrwSpec,
    crossing_probabilities,
    exit_probability_bounds,
    exponential_roots,
    simulate_limit_direction,
)

pytestmark = pytest.mark.acceptance

# Reference values for the exit-probability sweep (alpha=1, c_r=1, c_l=5).
MU_DOWN_REF = (0.0519, 0.1373, 0.3015, 0.4943, 0.7146, 1.2191, 1.7676, 2.8722, 4.9711)
SIM_LEFT_REF = (0.4798, 0.4506, 0.3957, 0.3427, 0.2823, 0.1851, 0.1153, 0.0428, 0.0060)
SIM_RIGHT_REF = (0.5202, 0.5494, 0.6043, 0.6573, 0.7177, 0.8149, 0.8847, 0.9572, 0.9940)
EST_LEFT_REF = (0.4823, 0.4518, 0.3977, 0.3414, 0.2857, 0.1874, 0.1163, 0.0426, 0.0058)
EST_RIGHT_REF = (0.5222, 0.5519, 0.6048, 0.6604, 0.7155, 0.8132, 0.8840, 0.9575, 0.9942)

# Band-concentration references: fraction of final iterates in (0.75, 1.25).
GAUSS_FRACTIONS = {0.1: 0.939, 0.01: 1.00, 0.001: 1.00}
STABLE_FRACTIONS = {0.1: 0.36, 0.01: 0.701, 0.001: 0.775}


def _criterion(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def _cramer(lam, alpha, beta, q, r):
    return r * beta / (lam + beta) + q * alpha / (alpha - lam)


def test_table3_analytic_reproduction():
    t0 = time.perf_counter()
    worst_res, worst_mu, worst_est = 0.0, 0.0, 0.0
    for beta, mu_ref, el, er in zip(TABLE3_BETAS, MU_DOWN_REF, EST_LEFT_REF, EST_RIGHT_REF):
        roots = exponential_roots(1.0, beta, 5.0, 1.0)
        q, r = 1.0 / (1.0 + beta), beta / (1.0 + beta)
        res_d = abs(math.exp(-roots.mu_down) * _cramer(-roots.mu_down, 1.0, beta, q, r) - 1.0)
        res_u = abs(math.exp(-5.0 * roots.mu_up) * _cramer(roots.mu_up, 1.0, beta, q, r) - 1.0)
        upper_right, upper_left = exit_probability_bounds(roots.p_down, roots.p_up)
        worst_res = max(worst_res, res_d, res_u)
        worst_mu = max(worst_mu, abs(roots.mu_down - mu_ref))
        worst_est = max(worst_est, abs(upper_left - el), abs(upper_right - er))
    elapsed = time.perf_counter() - t0
    _criterion(
        "table3 analytic",
        worst_res <= 1e-10 and worst_mu <= 0.005 and worst_est <= 0.003 and elapsed < 1.0,
        f"max residual {worst_res:.2e}, max |mu_down - ref| {worst_mu:.4f}, "
        f"max est deviation {worst_est:.4f}, runtime {elapsed:.3f}s",
    )


def test_table3_simulation_reproduction():
    rows = table3_rows(n_runs=100_000, seed=11)
    worst = 0.0
    for row, sl, sr in zip(rows, SIM_LEFT_REF, SIM_RIGHT_REF):
        worst = max(worst, abs(row.sim_left - sl), abs(row.sim_right - sr))
        assert row.n_not_exited == 0
    _criterion("table3 simulation", worst <= 0.012, f"max |sim - ref| {worst:.4f} over 9 rows at 1e5 runs")


@pytest.fixture(scope="module")
def table1_result():
    return table1_rows(n_runs=1000, seed=7)


def test_table1_gaussian_rows(table1_result):
    rows = {r.epsilon: r.fraction for r in table1_result if r.noise == "gaussian"}
    worst = max(abs(rows[e] - f) for e, f in GAUSS_FRACTIONS.items())
    _criterion(
        "table1 gaussian",
        worst <= 0.05,
        "fractions " + ", ".join(f"eps={e}: {rows[e]:.3f} (ref {f})" for e, f in GAUSS_FRACTIONS.items()),
    )


def test_table1_stable_rows(table1_result):
    rows = {r.epsilon: r.fraction for r in table1_result if r.noise == "alpha_stable"}
    worst = max(abs(rows[e] - f) for e, f in STABLE_FRACTIONS.items())
    seq = [rows[e] for e in (0.1, 0.01, 0.001)]
    monotone = seq[0] < seq[1] < seq[2]
    _criterion(
        "table1 alpha-stable",
        worst <= 0.08 and monotone,
        "fractions "
        + ", ".join(f"eps={e}: {rows[e]:.3f} (ref {f})" for e, f in STABLE_FRACTIONS.items())
        + f", monotone increase: {monotone}",
    )


def test_table2_over_running():
    row = table2_rows(epsilons=(0.001,), n_runs=1000, seed=8)[0]
    ok = abs(row.fraction - 0.5) <= 0.07
    _criterion("table2 over-run", ok, f"fraction at 10x budget: {row.fraction:.3f} (ref 0.508, band 0.5 +- 0.07)")


def test_sticking_suite():
    grids = (1e-2, 1e-3, 1e-4)
    details = []
    ok = True
    for regime, noise in (("h1", log_corrected_pareto(1.5)), ("h2", gaussian(1.0))):
        for K in (1, 3):
            rows = sticking_experiment(K, regime, noise, grids, t=1.0, n_runs=200, seed=3 if regime == "h1" else 4)
            fracs = [r.contained_fraction for r in rows]
            final_ok = fracs[-1] >= 0.9
            trend_ok = all(b >= a - r.ci_halfwidth for a, b, r in zip(fracs, fracs[1:], rows[1:]))
            ok = ok and final_ok and trend_ok
            details.append(f"{regime} K={K}: {['%.3f' % f for f in fracs]}")
    _criterion("sticking containment", ok, "; ".join(details))


@pytest.fixture(scope="module")
def symmetric_direction():
    spec = RrwSpec(noise=make_double_exponential(1.0, 1.0), c_l=1.0, c_r=1.0)
    return simulate_limit_direction(spec, max_steps=200_000, seed=31, n_runs=100_000)


def test_rrw_symmetric_balance_as_stated(symmetric_direction):
    # Asserted verbatim from the criteria; unattainable (see module docstring
    # and the decisions record): the true value is ~0.75, not 0.5.
    p_plus, p_minus, undecided = symmetric_direction
    ok = abs(p_plus - 0.5) <= 0.01 and undecided < 1e-3
    _criterion(
        "rrw symmetric balance (as stated)",
        ok,
        f"P(plus_inf) = {p_plus:.4f} at 1e5 runs; stated target 0.5 +- 0.01; "
        f"analytic lower bound 1 - p_down = 0.7146 makes the stated target unattainable",
    )


def test_rrw_crossing_inequalities():
    ok = True
    details = []
    for beta in (1.0, 2.0):
        spec = RrwSpec(noise=make_double_exponential(1.0, beta), c_l=5.0, c_r=1.0)
        roots = exponential_roots(1.0, beta, 5.0, 1.0)
        ca = crossing_probabilities(spec, n_runs=50_000, k_max=4, seed=32, analytic=roots)
        ci3 = 3.0 * 1.96 * 0.5 / math.sqrt(50_000)
        pd, pu = roots.p_down, roots.p_up
        for k in range(1, 5):
            ok = ok and ca.tau_down_prob[k - 1] <= pd**k * pu ** (k - 1) + ci3
            ok = ok and ca.tau_up_prob[k] <= (pd * pu) ** k + ci3
        details.append(f"beta={beta}: tau_down[0]={ca.tau_down_prob[0]:.4f} <= p_down={pd:.4f}+ci")
    _criterion("rrw crossing bounds (k<=4)", ok, "; ".join(details))


def test_rrw_series_consistency_and_estimator_agreement():
    spec = RrwSpec(noise=make_double_exponential(1.0, 1.0), c_l=5.0, c_r=1.0)
    roots = exponential_roots(1.0, 1.0, 5.0, 1.0)
    ca = crossing_probabilities(spec, n_runs=50_000, k_max=6, seed=33, analytic=roots)
    total = ca.p_right + ca.p_left
    series_ok = (1.0 - ca.truncation_bound - 2 * ca.ci_halfwidth) <= total <= (1.0 + 2 * ca.ci_halfwidth)
    p_plus, p_minus, _ = simulate_limit_direction(spec, max_steps=200_000, seed=34, n_runs=100_000)
    tol = 2.0 * (ca.ci_halfwidth + 2.5758 * 0.5 / math.sqrt(100_000)) + ca.truncation_bound
    agree_ok = abs(ca.p_right - p_plus) <= tol and abs(ca.p_left - p_minus) <= tol
    _criterion(
        "rrw series consistency + two-estimator agreement",
        series_ok and agree_ok,
        f"p_right+p_left = {total:.4f} (trunc {ca.truncation_bound:.1e}); "
        f"series p_right {ca.p_right:.4f} vs direct {p_plus:.4f}",
    )


def test_determinism_across_worker_counts(tmp_path):
    outs = []
    for tag, workers in (("w1", "1"), ("w4", "4")):
        out = tmp_path / tag
        code = cli.main(
            ["table3", "--out", str(out), "--runs", "3000", "--seed", "77", "--workers", workers]
        )
        assert code == 0
        outs.append((out / "table3.csv").read_bytes())
    ok = outs[0] == outs[1]
    _criterion("determinism across workers", ok, f"byte-identical CSV: {ok}")


def test_interwell_transition_contrast():
    stats = interwell_transition_stats(epsilon=1e-3, n_runs=200, seed=5)
    ok = stats.stable_transition_fraction >= 0.5 and stats.gaussian_zero_fraction >= 0.99
    _criterion(
        "inter-well transition contrast",
        ok,
        f"alpha-stable >=1 transition in {stats.stable_transition_fraction:.2f} of seeds; "
        f"gaussian zero transitions in {stats.gaussian_zero_fraction:.2f} of seeds "
        f"(budget {stats.n_steps} steps)",
    )
