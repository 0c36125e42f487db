"""Two-drift ("runaway") random walk analysis of escape from a sharp maximum.

The walk starts at 0 and gains drift +c_r while nonnegative, -c_l while
negative, so each zero crossing works against a drift that pushes it away.
The probability it diverges to +inf (the limiting right-exit probability of
SGD from the V-neighborhood) telescopes over the crossing-time finiteness
probabilities; for two-sided exponential noise the single-crossing
probabilities have closed form via the nonzero root of E e^{lambda*jump} = 1,
which yields tight analytic exit bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import ConfigError, DomainError, NumericError
from .noise import NoiseModel, typical_scale

Z99 = 2.5758293035489004  # two-sided 99% normal quantile


@dataclass(frozen=True)
class RrwSpec:
    noise: NoiseModel
    c_l: float
    c_r: float

    def __post_init__(self):
        if not (self.c_l > 0 and self.c_r > 0):
            raise ConfigError("RrwSpec: c_l and c_r must be positive")


@dataclass(frozen=True)
class ExponentialRoots:
    mu_down: float  # |negative root| for the +c_r walk, in (0, beta)
    mu_up: float  # positive root for the -c_l walk, in (0, alpha)
    p_down: float  # P(the +c_r walk ever goes below 0) = 1 - mu_down/beta
    p_up: float  # P(the -c_l walk ever reaches >= 0) = 1 - mu_up/alpha


@dataclass(frozen=True)
class CrossingAnalysis:
    tau_up_prob: tuple  # estimates of P(k-th up-crossing happens), k = 0.. (index 0 is 1.0)
    tau_down_prob: tuple  # estimates of P(k-th down-crossing happens)
    p_right: float  # truncated telescoping series for divergence to +inf
    p_left: float
    truncation_bound: float
    ci_halfwidth: float  # worst-case 99% Monte Carlo halfwidth
    undecided_fraction: float
    horizon: int
    warning: bool  # undecided mass still above 1% after safeguard doublings


def rrw_step(x: float, xi: float, spec: RrwSpec) -> float:
    """One walk update; the drift branch is decided by the current position."""
    if x < 0.0:
        return x + xi - spec.c_l
    return x + xi + spec.c_r


def default_escape_level(spec: RrwSpec) -> float:
    return 50.0 * max(spec.c_l, spec.c_r, typical_scale(spec.noise))


def _run_batch(spec: RrwSpec, escape_level: float, max_steps: int, seed: int, n_runs: int):
    nk, npar, tx, tc = spec.noise.kernel_encoding()
    return kernels().rrw_batch(
        nk, npar, tx, tc, spec.c_l, spec.c_r, escape_level, max_steps, np.uint64(seed & 0xFFFFFFFFFFFFFFFF), n_runs
    )


def simulate_limit_direction(
    spec: RrwSpec,
    escape_level: float | None = None,
    max_steps: int = 10_000,
    seed: int = 0,
    n_runs: int = 1,
):
    """Estimate the limit direction by first exit from [-L, +L].

    Returns (p_plus, p_minus, undecided_fraction) over n_runs walks; a single
    run returns the enum-like string "plus_inf" | "minus_inf" | "undecided".
    """
    if escape_level is None:
        escape_level = default_escape_level(spec)
    if not (escape_level > 0):
        raise DomainError("escape_level must be positive")
    if max_steps < 1:
        raise DomainError("max_steps must be >= 1")
    _, resolved, side, _ = _run_batch(spec, escape_level, max_steps, seed, n_runs)
    if n_runs == 1:
        if not resolved[0]:
            return "undecided"
        return "plus_inf" if side[0] > 0 else "minus_inf"
    n = float(n_runs)
    return (
        float(np.sum(side > 0)) / n,
        float(np.sum(side < 0)) / n,
        float(np.sum(resolved == 0)) / n,
    )


def crossing_probabilities(
    spec: RrwSpec,
    n_runs: int = 10_000,
    k_max: int = 4,
    horizon: int = 10_000,
    seed: int = 0,
    escape_level: float | None = None,
    analytic: ExponentialRoots | None = None,
) -> CrossingAnalysis:
    """Monte Carlo estimates of the crossing-time finiteness probabilities.

    Crossing j < infinity is estimated by the fraction of walks realizing j
    crossings before drifting past the escape level. Walks that exhaust the
    horizon without escaping are "undecided"; the horizon doubles until their
    mass drops below 1e-3 (warning flagged if 1% is still exceeded). The
    telescoping series truncated at k_max gives p_right/p_left, with the
    geometric tail bound (p_down*p_up)^(k_max+1)/(1-p_down*p_up) from the
    analytic single-crossing probabilities when available, else estimated.
    """
    if n_runs < 1_000:
        raise DomainError("crossing_probabilities needs n_runs >= 1000")
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    if escape_level is None:
        escape_level = default_escape_level(spec)
    h = int(horizon)
    for _ in range(12):
        n_cross, resolved, _, _ = _run_batch(spec, escape_level, h, seed, n_runs)
        undecided = float(np.mean(resolved == 0))
        if undecided < 1e-3:
            break
        h *= 2
    warning = undecided > 1e-2

    frac_at_least = lambda j: float(np.mean(n_cross >= j))  # noqa: E731
    tau_up = [1.0] + [frac_at_least(2 * k) for k in range(1, k_max + 2)]
    tau_down = [frac_at_least(2 * k + 1) for k in range(0, k_max + 1)]
    p_right = sum(tau_up[k] - tau_down[k] for k in range(0, k_max + 1))
    p_left = sum(tau_down[k] - tau_up[k + 1] for k in range(0, k_max + 1))

    if analytic is not None:
        pd, pu = analytic.p_down, analytic.p_up
    else:
        pd = tau_down[0]
        pu = tau_up[1] / tau_down[0] if tau_down[0] > 0 else 0.0
    rho = min(pd * pu, 1.0 - 1e-12)
    truncation_bound = rho ** (k_max + 1) / (1.0 - rho)
    ci = Z99 * 0.5 / math.sqrt(n_runs)
    return CrossingAnalysis(
        tau_up_prob=tuple(tau_up),
        tau_down_prob=tuple(tau_down),
        p_right=p_right,
        p_left=p_left,
        truncation_bound=truncation_bound,
        ci_halfwidth=ci,
        undecided_fraction=undecided,
        horizon=h,
        warning=warning,
    )


def _cramer_factor(lam: float, alpha: float, beta: float, q: float, r: float) -> float:
    """E e^{lambda xi} for the two-sided exponential law; domain (-beta, alpha)."""
    return r * beta / (lam + beta) + q * alpha / (alpha - lam)


def _bisect_root(g, boundary: float) -> float:
    """Root of g in (0, boundary): g(0)=0, g<0 near 0, g -> +inf at the pole.

    Scans a geometric grid approaching the boundary for the sign change, then
    bisects to absolute width 1e-14.
    """
    lo = boundary * 1e-12
    if g(lo) >= 0.0:
        raise NumericError("bracketing failed: no descent away from the trivial root")
    hi = None
    prev = lo
    for k in range(1, 64):
        cand = boundary * (1.0 - 0.5**k)
        val = g(cand)
        if math.isfinite(val) and val > 0.0:
            hi = cand
            break
        prev = cand
    if hi is None:
        raise NumericError(
            f"bracketing failed on (0, {boundary}): no sign change on the geometric grid"
        )
    lo = prev if g(prev) < 0.0 else lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo < 1e-14:
            break
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def exponential_roots(alpha_param: float, beta_param: float, c_l: float, c_r: float) -> ExponentialRoots:
    """Nonzero Cramer roots and crossing probabilities for two-sided exponential noise.

    mu_down: the +c_r walk satisfies e^{lambda c_r} E e^{lambda xi} = 1 at
    lambda = -mu_down in (-beta, 0). mu_up: the -c_l walk satisfies
    e^{-lambda c_l} E e^{lambda xi} = 1 at lambda = mu_up in (0, alpha).
    lambda = 0 solves both trivially (q + r = 1) and is excluded by
    construction of the bracket. Residuals are <= 1e-10.
    """
    a, b = float(alpha_param), float(beta_param)
    if not (a > 0 and b > 0):
        raise ConfigError("rates must be positive")
    if not (c_l > 0 and c_r > 0):
        raise ConfigError("c_l and c_r must be positive")
    q = a / (a + b)
    r = b / (a + b)

    def g_down(mu):  # phi(-mu) - 1 on mu in (0, beta)
        return math.exp(-mu * c_r) * _cramer_factor(-mu, a, b, q, r) - 1.0

    def g_up(lam):  # psi(lam) - 1 on lam in (0, alpha)
        return math.exp(-lam * c_l) * _cramer_factor(lam, a, b, q, r) - 1.0

    mu_down = _bisect_root(g_down, b)
    mu_up = _bisect_root(g_up, a)
    for name, res in (("mu_down", g_down(mu_down)), ("mu_up", g_up(mu_up))):
        if abs(res) > 1e-10:
            raise NumericError(f"{name} residual {res:.3e} exceeds 1e-10")
    return ExponentialRoots(
        mu_down=mu_down,
        mu_up=mu_up,
        p_down=1.0 - mu_down / b,
        p_up=1.0 - mu_up / a,
    )


def exit_probability_bounds(p_down: float, p_up: float) -> tuple[float, float]:
    """Closed-form upper bounds on the right/left exit probabilities.

    upper_right = 1 - p_down + p_down*p_up/(1 - p_down*p_up)
    upper_left  = p_down/(1 - p_down*p_up)
    Bounds on complementary events; they may sum to slightly above 1.
    """
    if not (0.0 < p_down < 1.0 and 0.0 < p_up < 1.0):
        raise DomainError("p_down and p_up must lie in (0,1)")
    rho = p_down * p_up
    if rho >= 1.0:
        raise DomainError("p_down * p_up must be < 1")
    upper_right = 1.0 - p_down + rho / (1.0 - rho)
    upper_left = p_down / (1.0 - rho)
    return upper_right, upper_left
