"""One-dimensional losses with right-continuous piecewise derivatives.

A Landscape knows its derivative everywhere on R, its ordered extrema, and a
declared derivative bound. Derivatives are closed-form per piece; the hot
kernels evaluate the same formulas from a (kind, params) encoding, and
tests pin the two paths to each other on dense grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import codes
from .errors import ConfigError


@dataclass(frozen=True)
class VShapeSpec:
    """Sharp-maximum neighborhood: f' = c_l on (-delta, 0), -c_r on [0, delta)."""

    c_l: float
    c_r: float
    delta: float

    def __post_init__(self):
        if not (self.c_l > 0 and self.c_r > 0 and self.delta > 0):
            raise ConfigError("VShapeSpec: c_l, c_r, delta must all be positive")


@dataclass(frozen=True)
class KCriticalSpec:
    """f(x) = lead_coeff * (x - c)^(K+1) on [c-delta, c+delta]: first K derivatives vanish at c."""

    K: int
    c: float = 0.0
    lead_coeff: float = 1.0
    delta: float = 1.0

    def __post_init__(self):
        if self.K < 1:
            raise ConfigError("KCriticalSpec: K must be >= 1")
        if self.lead_coeff == 0.0:
            raise ConfigError("KCriticalSpec: lead_coeff must be nonzero")
        if not (self.delta > 0):
            raise ConfigError("KCriticalSpec: delta must be positive")


@dataclass(frozen=True)
class Landscape:
    name: str
    kind: int  # codes.LAND_*
    params: np.ndarray
    minima: tuple = ()
    maxima: tuple = ()
    c_max: float = 0.0  # declared bound on |f'|
    pieces: tuple = field(default=(), repr=False)  # ((lo, hi, evaluator), ...), [lo, hi)

    def derivative(self, x: float) -> float:
        return _derivative_scalar(self.kind, self.params, float(x))


def derivative(land: Landscape, x: float) -> float:
    """Right-continuous f'(x); total on R and bounded by land.c_max."""
    return _derivative_scalar(land.kind, land.params, float(x))


def _derivative_scalar(kind: int, p: np.ndarray, x: float) -> float:
    if kind == codes.LAND_DOUBLE_WELL:
        if x > 2.0:
            return 24.0
        if x < -2.0:
            return -24.0
        return 4.0 * x * (x * x - 1.0)
    if kind == codes.LAND_VSHAPE:
        c_l, c_r, d, s = p[0], p[1], p[2], p[3]
        if x >= 0.0:
            if x < d:
                return -c_r
            if x <= d + 1.0:
                return -c_r * (d + 1.0 - x)
            y = s * (x - d - 1.0)
            return y if y < s else s
        if x > -d:
            return c_l
        if x >= -d - 1.0:
            return c_l * (x + d + 1.0)
        y = s * (x + d + 1.0)
        return y if y > -s else -s
    if kind == codes.LAND_KCRITICAL:
        k = int(p[0])
        c, a, dd, flank = p[1], p[2], p[3], p[4]
        r = x - c
        if -dd <= r <= dd:
            return (k + 1) * a * r**k
        d_right = (k + 1) * a * dd**k
        d_left = (k + 1) * a * (-dd) ** k
        if flank == 0.0:
            return d_right if r > dd else d_left
        if r > 0.0:
            if r <= dd + 1.0:
                return d_right * (dd + 1.0 - r)
            s = abs(d_right)
            y = s * (r - dd - 1.0)
            return y if y < s else s
        if r >= -dd - 1.0:
            return d_left * (r + dd + 1.0)
        s = abs(d_left)
        y = s * (r + dd + 1.0)
        return y if y > -s else -s
    if kind == codes.LAND_LINEAR:
        return p[0]
    raise ConfigError(f"unknown landscape kind {kind}")


def _build_pieces(kind, params, breaks):
    """Piece list for the public API: half-open [lo, hi) intervals sharing the
    closed-form evaluator, so right-continuity is structural."""
    edges = [-np.inf, *breaks, np.inf]
    return tuple(
        (lo, hi, (lambda k, p: (lambda x: _derivative_scalar(k, p, x)))(kind, params))
        for lo, hi in zip(edges[:-1], edges[1:])
    )


def make_double_well() -> Landscape:
    """C1 double well: wells at -1 and +1, peak at 0.

    f'(x) = 4x(x^2-1) on [-2, 2] (the derivative of (x^2-1)^2), held constant
    at +-24 outside so excursions drift back inward. Pinned for regression:
    any C1 double well with these extrema serves, but tests need one function.
    """
    params = np.empty(0, dtype=np.float64)
    return Landscape(
        name="double_well",
        kind=codes.LAND_DOUBLE_WELL,
        params=params,
        minima=(-1.0, 1.0),
        maxima=(0.0,),
        c_max=24.0,
        pieces=_build_pieces(codes.LAND_DOUBLE_WELL, params, (-2.0, 2.0)),
    )


def make_vshape(spec: VShapeSpec, outer_slope: float = 1.0) -> Landscape:
    """Sharp max at 0 with flanking minima at -(delta+1) and +(delta+1).

    Inside [-delta, delta] the derivative is exactly c_l / -c_r (jump at 0
    only, right-continuous there). On [delta, delta+1] it returns linearly to
    0 so the only jump is at the listed maximum; beyond the minima it climbs
    with slope outer_slope, clamped one unit out.
    """
    if not (outer_slope > 0):
        raise ConfigError("make_vshape: outer_slope must be positive")
    d = spec.delta
    params = np.array([spec.c_l, spec.c_r, d, outer_slope], dtype=np.float64)
    return Landscape(
        name="vshape",
        kind=codes.LAND_VSHAPE,
        params=params,
        minima=(-(d + 1.0), d + 1.0),
        maxima=(0.0,),
        c_max=max(spec.c_l, spec.c_r, outer_slope),
        pieces=_build_pieces(codes.LAND_VSHAPE, params, (-d - 1.0, -d, 0.0, d, d + 1.0)),
    )


def make_k_critical(spec: KCriticalSpec) -> Landscape:
    """Landscape whose only interesting point is a K-critical point at c.

    f = a(x-c)^(K+1) on the window [c-delta, c+delta]. Outside, the derivative
    is clamped constant when the window drifts inward on its own (minimum, or
    monotone for even K); when c is a maximum (odd K, a < 0) the derivative
    bends back to zero at c +- (delta+1) to create flanking minima, keeping
    the global extrema interleaved.
    """
    k, c, a, d = spec.K, spec.c, spec.lead_coeff, spec.delta
    is_max = (k % 2 == 1) and a < 0.0
    flank = 1.0 if is_max else 0.0
    params = np.array([float(k), c, a, d, flank], dtype=np.float64)
    if is_max:
        minima, maxima = (c - d - 1.0, c + d + 1.0), (c,)
        breaks = (c - d - 1.0, c - d, c, c + d, c + d + 1.0)
    elif k % 2 == 1:
        minima, maxima = (c,), ()
        breaks = (c - d, c, c + d)
    else:
        minima, maxima = (), ()  # inflection: monotone, no extrema
        breaks = (c - d, c, c + d)
    return Landscape(
        name="k_critical",
        kind=codes.LAND_KCRITICAL,
        params=params,
        minima=minima,
        maxima=maxima,
        c_max=(k + 1) * abs(a) * d**k,
        pieces=_build_pieces(codes.LAND_KCRITICAL, params, breaks),
    )


def make_linear(slope: float) -> Landscape:
    """f' = slope everywhere; no extrema. Test helper for pure-drift pieces."""
    if slope == 0.0:
        raise ConfigError("make_linear: slope must be nonzero")
    params = np.array([slope], dtype=np.float64)
    return Landscape(
        name="linear",
        kind=codes.LAND_LINEAR,
        params=params,
        c_max=abs(slope),
        pieces=_build_pieces(codes.LAND_LINEAR, params, ()),
    )


def himmelblau_gradient(x: float, y: float) -> tuple[float, float]:
    """Analytic gradient of (x^2+y-11)^2 + (x+y^2-7)^2."""
    p = x * x + y - 11.0
    q = x + y * y - 7.0
    return 4.0 * x * p + 2.0 * q, 2.0 * p + 4.0 * y * q
