"""Zero-mean noise laws: samplers, tail functions, and tail diagnostics.

Five families are shipped. Three have regularly varying tails with index
alpha in (1, 2) (pareto_symmetric, alpha_stable, log_corrected_pareto); two
have finite variance (gaussian, double_exponential). All tail statements are
asserted only for u >= u0: a probability cannot equal u^-alpha * L(u) for
every u >= 0, so the power-law form is a tail property by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad, trapezoid

from . import codes
from .errors import ConfigError, DomainError
from .rng import Xoshiro256PP

FAMILIES = (
    "gaussian",
    "pareto_symmetric",
    "alpha_stable",
    "double_exponential",
    "log_corrected_pareto",
    "none",
)

_LOGP_UMAX = 1e6
_LOGP_KNOTS = 10_000


@dataclass(frozen=True)
class SlowlyVarying:
    """L(u) = c, or L(u) = c * (ln(e+u))^p. Positive for all u >= 0."""

    form: str = "constant"  # "constant" | "log_power"
    c: float = 1.0
    p: float = 0.0

    def __post_init__(self):
        if self.form not in ("constant", "log_power"):
            raise ConfigError(f"SlowlyVarying.form must be constant|log_power, got {self.form!r}")
        if self.c <= 0:
            raise ConfigError("SlowlyVarying.c must be positive")

    def __call__(self, u: float) -> float:
        if self.form == "constant":
            return self.c
        return self.c * math.log(math.e + u) ** self.p


CONST_ONE = SlowlyVarying()


@dataclass(frozen=True)
class NoiseModel:
    """A zero-mean noise law plus its tail structure.

    Only the fields meaningful for `family` are used; the rest keep their
    defaults. Use the factory functions below rather than building directly.
    """

    family: str
    alpha: float = float("nan")  # tail / stability index
    alpha_param: float = float("nan")  # right exponential rate (double_exponential)
    beta_param: float = float("nan")  # left exponential rate (double_exponential)
    q_weight: float = float("nan")  # right mass (double_exponential)
    r_weight: float = float("nan")  # left mass (double_exponential)
    sigma: float = float("nan")  # standard deviation (gaussian)
    u0: float = 1.0  # cutoff below which the power-law tail is not asserted
    # inverse-CDF machinery for log_corrected_pareto, built at creation
    table_x: np.ndarray | None = field(default=None, repr=False, compare=False)
    table_cdf: np.ndarray | None = field(default=None, repr=False, compare=False)
    tail_coef: float = float("nan")
    mean_abs: float = float("nan")

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown noise family {self.family!r}")
        if self.family == "gaussian":
            if not (self.sigma > 0):
                raise ConfigError("gaussian noise: sigma must be positive")
        elif self.family == "pareto_symmetric":
            if not (1.0 < self.alpha < 2.0):
                raise ConfigError("pareto_symmetric: alpha must lie in (1,2)")
            if not (self.u0 > 0):
                raise ConfigError("pareto_symmetric: u0 must be positive")
        elif self.family == "alpha_stable":
            if not (0.0 < self.alpha < 2.0) or self.alpha == 1.0:
                raise ConfigError("alpha_stable: alpha must lie in (0,2) and differ from 1")
        elif self.family == "double_exponential":
            if not (self.alpha_param > 0 and self.beta_param > 0):
                raise ConfigError("double_exponential: rates must be positive")
            if abs(self.q_weight + self.r_weight - 1.0) > 1e-12:
                raise ConfigError("double_exponential: q + r must equal 1")
            if abs(self.q_weight / self.alpha_param - self.r_weight / self.beta_param) > 1e-12:
                raise ConfigError("double_exponential: mean q/alpha - r/beta must be zero")
        elif self.family == "log_corrected_pareto":
            if not (1.0 < self.alpha < 2.0):
                raise ConfigError("log_corrected_pareto: alpha must lie in (1,2)")
            if self.table_x is None or self.table_cdf is None:
                raise ConfigError("log_corrected_pareto: use the log_corrected_pareto() factory")

    def kernel_encoding(self):
        """(kind, params, table_x, table_cdf) consumed by the simulation kernels."""
        empty = np.empty(0, dtype=np.float64)
        if self.family == "gaussian":
            return codes.NOISE_GAUSSIAN, np.array([self.sigma]), empty, empty
        if self.family == "pareto_symmetric":
            return codes.NOISE_PARETO, np.array([self.alpha, self.u0]), empty, empty
        if self.family == "alpha_stable":
            return codes.NOISE_STABLE, np.array([self.alpha]), empty, empty
        if self.family == "double_exponential":
            p = np.array([self.alpha_param, self.beta_param, self.q_weight, self.r_weight])
            return codes.NOISE_DEXP, p, empty, empty
        if self.family == "log_corrected_pareto":
            p = np.array([self.alpha, self.tail_coef])
            return codes.NOISE_LOGP, p, self.table_x, self.table_cdf
        return codes.NOISE_NONE, empty, empty, empty


def gaussian(sigma: float = 1.0) -> NoiseModel:
    return NoiseModel(family="gaussian", sigma=float(sigma))


def pareto_symmetric(alpha: float, u0: float = 1.0) -> NoiseModel:
    """Symmetric Pareto: P(|xi| > u) = (u/u0)^-alpha for u >= u0, sign +-1/2."""
    return NoiseModel(family="pareto_symmetric", alpha=float(alpha), u0=float(u0))


def alpha_stable(alpha: float) -> NoiseModel:
    """Standard symmetric alpha-stable (unit scale, zero skew)."""
    return NoiseModel(family="alpha_stable", alpha=float(alpha))


def no_noise() -> NoiseModel:
    """Degenerate xi = 0, for deterministic gradient-flow controls."""
    return NoiseModel(family="none")


def make_double_exponential(alpha_param: float, beta_param: float) -> NoiseModel:
    """Two-sided exponential with P(xi >= t) = q e^{-alpha t}, P(xi < -t) = r e^{-beta t}.

    The masses are forced by zero mean: r = beta/(alpha+beta), q = alpha/(alpha+beta),
    so q/alpha - r/beta = 0 exactly.
    """
    a, b = float(alpha_param), float(beta_param)
    if not (a > 0 and b > 0):
        raise ConfigError("double_exponential rates must be positive")
    return NoiseModel(
        family="double_exponential",
        alpha_param=a,
        beta_param=b,
        q_weight=a / (a + b),
        r_weight=b / (a + b),
    )


def _logp_integrand(alpha: float):
    def g(u):
        return 1.0 / ((1.0 + u ** (alpha + 1.0)) * math.log(math.e + u) ** 2)

    return g


def log_corrected_pareto(alpha: float, u0: float = 1.0) -> NoiseModel:
    """Symmetric density c / ((1+|u|^{alpha+1}) ln^2(e+|u|)).

    Tail ~ u^{-alpha} ln^{-2}(u) up to a constant, so E|xi|^alpha is finite
    while the tail index is exactly alpha. Sampling and the tail function use
    a 10^4-knot inverse-CDF table built here, with the closed-form tail
    asymptote taking over beyond the table.
    """
    if not (1.0 < alpha < 2.0):
        raise ConfigError("log_corrected_pareto: alpha must lie in (1,2)")
    g = _logp_integrand(alpha)
    half_mass, _ = quad(g, 0.0, np.inf, limit=200)
    c_norm = 0.5 / half_mass  # density constant for the two-sided law
    xs = np.concatenate([[0.0], np.geomspace(1e-4, _LOGP_UMAX, _LOGP_KNOTS)])
    pdf_abs = 2.0 * c_norm * np.array([g(x) for x in xs])
    raw = cumulative_trapezoid(pdf_abs, xs, initial=0.0)
    tail_coef = 2.0 * c_norm / alpha  # P(|xi|>u) ~ tail_coef * u^-alpha / ln^2(e+u)
    tail_at_umax = tail_coef * _LOGP_UMAX**-alpha / math.log(math.e + _LOGP_UMAX) ** 2
    cdf = raw * ((1.0 - tail_at_umax) / raw[-1])
    mean_abs = float(trapezoid(xs * pdf_abs, xs) * ((1.0 - tail_at_umax) / raw[-1]))
    return NoiseModel(
        family="log_corrected_pareto",
        alpha=float(alpha),
        u0=float(u0),
        table_x=xs,
        table_cdf=cdf,
        tail_coef=tail_coef,
        mean_abs=mean_abs,
    )


def logp_tail_inverse(p: float, alpha: float, tail_coef: float, u_start: float) -> float:
    """Solve tail_coef * u^-alpha / ln^2(e+u) = p for u by fixed point."""
    u = u_start
    for _ in range(64):
        u = (tail_coef / p) ** (1.0 / alpha) * math.log(math.e + u) ** (-2.0 / alpha)
    return u


def transform_pair(model: NoiseModel, u1: float, u2: float) -> float:
    """Map two open-(0,1) uniforms to one draw. The kernels mirror this exactly."""
    fam = model.family
    if fam == "gaussian":
        return model.sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
    if fam == "pareto_symmetric":
        mag = model.u0 * u2 ** (-1.0 / model.alpha)
        return mag if u1 < 0.5 else -mag
    if fam == "alpha_stable":
        a = model.alpha
        v = math.pi * (u1 - 0.5)
        w = -math.log(u2)
        t1 = math.sin(a * v) / math.cos(v) ** (1.0 / a)
        t2 = (math.cos((1.0 - a) * v) / w) ** ((1.0 - a) / a)
        return t1 * t2
    if fam == "double_exponential":
        if u1 < model.q_weight:
            return -math.log(u2) / model.alpha_param
        return math.log(u2) / model.beta_param
    if fam == "log_corrected_pareto":
        cdf = model.table_cdf
        if u2 <= cdf[-1]:
            i = int(np.searchsorted(cdf, u2))
            if i == 0:
                mag = model.table_x[0]
            else:
                c0, c1 = cdf[i - 1], cdf[i]
                x0, x1 = model.table_x[i - 1], model.table_x[i]
                frac = 0.0 if c1 == c0 else (u2 - c0) / (c1 - c0)
                mag = x0 + frac * (x1 - x0)
        else:
            mag = logp_tail_inverse(1.0 - u2, model.alpha, model.tail_coef, model.table_x[-1])
        return mag if u1 < 0.5 else -mag
    return 0.0


def sample(model: NoiseModel, rng: Xoshiro256PP) -> float:
    """One draw. Same (model, seed) always reproduces the same stream."""
    u1 = rng.uniform()
    u2 = rng.uniform()
    return transform_pair(model, u1, u2)


def sample_block(model: NoiseModel, root_seed: int, n: int, run_index: int = 0) -> np.ndarray:
    """n draws from the stream of (root_seed, run_index), via the active backend."""
    from .backend import kernels

    kind, params, tx, tc = model.kernel_encoding()
    return kernels().draw_block(kind, params, tx, tc, np.uint64(root_seed & 0xFFFFFFFFFFFFFFFF), run_index, n)


def tail_h(model: NoiseModel, u: float) -> float:
    """H(u) = P(xi > u) + P(xi <= -u), the two-sided tail mass at u > 0.

    Closed form per family; for alpha_stable the exact first-order tail
    asymptote is used (no elementary CDF exists), valid for u >= u0.
    """
    if not (u > 0):
        raise DomainError("tail_h requires u > 0")
    fam = model.family
    if fam == "gaussian":
        return math.erfc(u / (model.sigma * math.sqrt(2.0)))
    if fam == "pareto_symmetric":
        return min(1.0, (u / model.u0) ** -model.alpha)
    if fam == "alpha_stable":
        c_a = 2.0 * math.gamma(model.alpha) * math.sin(math.pi * model.alpha / 2.0) / math.pi
        return min(1.0, c_a * u**-model.alpha)
    if fam == "double_exponential":
        return model.q_weight * math.exp(-model.alpha_param * u) + model.r_weight * math.exp(
            -model.beta_param * u
        )
    if fam == "log_corrected_pareto":
        if u >= model.table_x[-1]:
            return model.tail_coef * u**-model.alpha / math.log(math.e + u) ** 2
        return 1.0 - float(np.interp(u, model.table_x, model.table_cdf))
    return 0.0


def typical_scale(model: NoiseModel) -> float:
    """A magnitude scale for the law (E|xi| where finite, 1 for alpha_stable)."""
    fam = model.family
    if fam == "gaussian":
        return model.sigma
    if fam == "pareto_symmetric":
        return model.u0 * model.alpha / (model.alpha - 1.0)
    if fam == "double_exponential":
        return model.q_weight / model.alpha_param + model.r_weight / model.beta_param
    if fam == "log_corrected_pareto":
        return model.mean_abs
    if fam == "alpha_stable":
        return 1.0
    return 1.0


def hill_tail_index(samples, k: int) -> float:
    """Hill estimate of the tail index over the k largest absolute values.

    Diagnostic only: stable for genuinely power-law tails, drifts with k
    otherwise (that drift is itself the negative diagnostic).
    """
    a = np.abs(np.asarray(samples, dtype=np.float64))
    n = a.size
    if n == 0:
        raise DomainError("hill_tail_index: empty sample")
    if not (0 < k < n):
        raise DomainError(f"hill_tail_index: need 0 < k < n, got k={k}, n={n}")
    a = np.sort(a)[::-1]
    top, ref = a[:k], a[k]
    if ref <= 0.0:
        raise DomainError("hill_tail_index: reference order statistic is not positive")
    spacing = float(np.mean(np.log(top) - math.log(ref)))
    if spacing <= 0.0:
        raise DomainError("hill_tail_index: degenerate (constant) upper order statistics")
    return 1.0 / spacing
