"""Step-count scales and sticking radius/horizon formulas.

Two noise regimes: "h1" (regularly varying tail, index alpha in (1,2)) and
"h2" (finite variance). The admissible step-count classes require
eps*n_eps -> infinity together with a regime-specific upper bound going to 0:
H(1/eps)*n_eps for h1, eps^2*n_eps for h2. Near a K-critical point the
iterates stay within radius delta(eps) for h(eps) steps; both closed forms
live here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError, DomainError
from .noise import CONST_ONE, NoiseModel, SlowlyVarying, tail_h

# Canonical o(1) factor: slow enough to keep horizons long.
def default_o_eps(epsilon: float) -> float:
    return 1.0 / math.log(1.0 / epsilon)


# Admissible default L per regime. The h2 almost-sure scale needs
# L(u) = o((ln ln u)^(-1/2)); (ln(e+u))^-1 is the simplest such choice.
H2_DEFAULT_L = SlowlyVarying(form="log_power", c=1.0, p=-1.0)


@dataclass(frozen=True)
class TimeScaleSpec:
    """Step budget n_eps, from the regime formula or a power-law override.

    Without override: n_eps = (1/eps)^alpha * L(1/eps)^alpha for h1, and
    (1/eps)^2 * L(1/eps)^2 for h2. With override: n_eps = scale * eps^-gamma
    (used to match fitted experiment budgets). In-class membership is
    diagnosed by membership_report, not enforced here: out-of-class specs
    exist precisely to be flagged.
    """

    regime: str  # "h1" | "h2"
    alpha: float | None = None
    L: SlowlyVarying = field(default=CONST_ONE)
    gamma_override: float | None = None
    override_scale: float = 1.0

    def __post_init__(self):
        if self.regime not in ("h1", "h2"):
            raise ConfigError(f"regime must be h1|h2, got {self.regime!r}")
        if self.regime == "h1" and self.gamma_override is None:
            if self.alpha is None or not (1.0 < self.alpha < 2.0):
                raise ConfigError("h1 time scale needs alpha in (1,2)")
        if self.gamma_override is not None and not (self.gamma_override > 0):
            raise ConfigError("gamma_override must be positive")
        if not (self.override_scale > 0):
            raise ConfigError("override_scale must be positive")


def n_eps(spec: TimeScaleSpec, epsilon: float) -> int:
    """Floor of the step-count formula, always >= 1. Requires 0 < eps < 1."""
    if not (0.0 < epsilon < 1.0):
        raise DomainError("n_eps requires 0 < epsilon < 1")
    inv = 1.0 / epsilon
    if spec.gamma_override is not None:
        value = spec.override_scale * inv**spec.gamma_override
    elif spec.regime == "h1":
        value = inv**spec.alpha * spec.L(inv) ** spec.alpha
    else:
        value = inv**2 * spec.L(inv) ** 2
    return max(1, int(math.floor(value)))


@dataclass(frozen=True)
class MembershipRow:
    epsilon: float
    n: int
    eps_n: float
    tail_n: float  # H(1/eps) * n
    eps_sq_n: float


@dataclass(frozen=True)
class MembershipReport:
    regime: str
    rows: tuple[MembershipRow, ...]
    eps_n_increasing: bool
    upper_decreasing_to_zero: bool

    @property
    def in_class(self) -> bool:
        return self.eps_n_increasing and self.upper_decreasing_to_zero


def membership_report(spec: TimeScaleSpec, noise: NoiseModel, eps_grid) -> MembershipReport:
    """Diagnose class membership along a strictly decreasing eps grid.

    Flags the two defining trends: eps*n_eps increasing, and the regime's
    upper quantity (H(1/eps)*n for h1, eps^2*n for h2) decreasing toward 0.
    """
    grid = list(eps_grid)
    if any(e2 >= e1 for e1, e2 in zip(grid, grid[1:])):
        raise DomainError("eps_grid must be strictly decreasing")
    rows = []
    for e in grid:
        n = n_eps(spec, e)
        rows.append(
            MembershipRow(
                epsilon=e,
                n=n,
                eps_n=e * n,
                tail_n=tail_h(noise, 1.0 / e) * n,
                eps_sq_n=e * e * n,
            )
        )
    eps_n_inc = all(b.eps_n > a.eps_n for a, b in zip(rows, rows[1:]))
    upper = [r.tail_n if spec.regime == "h1" else r.eps_sq_n for r in rows]
    upper_dec = all(b < a for a, b in zip(upper, upper[1:])) and upper[-1] < upper[0]
    return MembershipReport(
        regime=spec.regime,
        rows=tuple(rows),
        eps_n_increasing=eps_n_inc,
        upper_decreasing_to_zero=upper_dec,
    )


def _check_sticking_args(regime: str, epsilon: float, K: int, alpha: float | None):
    if regime not in ("h1", "h2"):
        raise DomainError(f"regime must be h1|h2, got {regime!r}")
    if K < 1:
        raise DomainError("K must be >= 1")
    if not (0.0 < epsilon < 1.0):
        raise DomainError("epsilon must lie in (0,1)")
    if regime == "h1" and (alpha is None or not (1.0 < alpha < 2.0)):
        raise DomainError("h1 sticking formulas need alpha in (1,2)")


def _default_L(regime: str, L: SlowlyVarying | None) -> SlowlyVarying:
    if L is not None:
        return L
    return CONST_ONE if regime == "h1" else H2_DEFAULT_L


def sticking_radius(
    regime: str,
    epsilon: float,
    K: int,
    alpha: float | None = None,
    L: SlowlyVarying | None = None,
    o_eps: float | None = None,
) -> float:
    """Radius of the neighborhood of a K-critical point that holds the iterates.

    h1: eps^((alpha-1)/(K-1+alpha)) * L(o_eps * eps^(-K/(K-1+alpha)))^(-1/(K-1+alpha))
    h2: eps^(1/(K+1)) * L(eps^(-K/(K+1)))^(-2/(K+1))
    """
    _check_sticking_args(regime, epsilon, K, alpha)
    Lf = _default_L(regime, L)
    if regime == "h1":
        o = default_o_eps(epsilon) if o_eps is None else o_eps
        if not (0.0 < o <= 1.0):
            raise DomainError("o_eps must lie in (0,1]")
        expo = (alpha - 1.0) / (K - 1.0 + alpha)
        arg = o * epsilon ** (-K / (K - 1.0 + alpha))
        return epsilon**expo * Lf(arg) ** (-1.0 / (K - 1.0 + alpha))
    arg = epsilon ** (-K / (K + 1.0))
    return epsilon ** (1.0 / (K + 1.0)) * Lf(arg) ** (-2.0 / (K + 1.0))


def sticking_horizon(
    regime: str,
    epsilon: float,
    K: int,
    alpha: float | None = None,
    o_eps: float | None = None,
    L: SlowlyVarying | None = None,
) -> int:
    """Step budget within which the iterates stay delta(eps)-close.

    h1: floor(o_eps^alpha * eps^-1 * delta(eps)^-(K-1)); h2 carries a free
    o(1) factor with no canonical value, so the same default o_eps is used:
    floor(o_eps * eps^-1 * delta(eps)^-(K-1)). Always >= 1.
    """
    _check_sticking_args(regime, epsilon, K, alpha)
    o = default_o_eps(epsilon) if o_eps is None else o_eps
    if not (0.0 < o <= 1.0):
        raise DomainError("o_eps must lie in (0,1]")
    delta = sticking_radius(regime, epsilon, K, alpha=alpha, L=L, o_eps=o)
    factor = o**alpha if regime == "h1" else o
    return max(1, int(math.floor(factor / epsilon * delta ** -(K - 1.0))))
