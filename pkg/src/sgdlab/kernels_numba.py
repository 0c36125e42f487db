"""numba implementation of the simulation kernels.

Interface (mirrored exactly by kernels_numpy):

  draw_block(kind, params, tx, tc, root_seed, run_index0, n)
      draw j comes from the stream of (root_seed, run_index0 + j)
  uniform_block(root_seed, run_index, n)
      n sequential uniforms from one stream
  sgd_batch(...)        per-run summary arrays for n_runs trajectories
  sgd_single(...)       one trajectory with strided path + crossing list
  rrw_batch(...)        two-drift walk: crossing counts and limit direction
  himmelblau_path(...)  one 2-D trajectory, strided
  himmelblau_batch(...) per-run max deviation and visited-minima bitmask
  deriv_grid(...)       vectorized landscape derivative (for validation)

Run i's stream is seeded from (root_seed, i); outputs land in slot i, so
results never depend on thread count or scheduling.
"""

import math

import numpy as np
from numba import njit, prange

from . import codes

U1 = np.uint64(1)
U2 = np.uint64(2)
U3 = np.uint64(3)
U4 = np.uint64(4)
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX_A = np.uint64(0xBF58476D1CE4E5B9)
MIX_B = np.uint64(0x94D049BB133111EB)
S30 = np.uint64(30)
S27 = np.uint64(27)
S31 = np.uint64(31)
S11 = np.uint64(11)
S17 = np.uint64(17)
R23 = np.uint64(23)
R23C = np.uint64(41)
R45 = np.uint64(45)
R45C = np.uint64(19)
INV53 = 2.0**-53
TWO_PI = 2.0 * math.pi
OVF = codes.OVERFLOW_LIMIT

HIMMELBLAU_MINIMA = np.array(
    [[3.0, 2.0], [-2.805118, 3.131312], [-3.779310, -3.283186], [3.584428, -1.848126]]
)


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> S30)) * MIX_A
    z = (z ^ (z >> S27)) * MIX_B
    return z ^ (z >> S31)


@njit(cache=True, inline="always")
def _seed4(root, idx):
    key = _mix64(root + (np.uint64(idx) + U1) * GOLDEN)
    s0 = _mix64(key + U1 * GOLDEN)
    s1 = _mix64(key + U2 * GOLDEN)
    s2 = _mix64(key + U3 * GOLDEN)
    s3 = _mix64(key + U4 * GOLDEN)
    if s0 | s1 | s2 | s3 == np.uint64(0):
        s0 = GOLDEN
    return s0, s1, s2, s3


@njit(cache=True, inline="always")
def _next(s0, s1, s2, s3):
    res = (((s0 + s3) << R23) | ((s0 + s3) >> R23C)) + s0
    t = s1 << S17
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = (s3 << R45) | (s3 >> R45C)
    return res, s0, s1, s2, s3


@njit(cache=True, inline="always")
def _to_unif(r):
    return (np.float64(r >> S11) + 0.5) * INV53


@njit(cache=True, inline="always")
def _draw(kind, p, tx, tc, u1, u2):
    if kind == codes.NOISE_GAUSSIAN:
        return p[0] * math.sqrt(-2.0 * math.log(u1)) * math.cos(TWO_PI * u2)
    if kind == codes.NOISE_PARETO:
        mag = p[1] * u2 ** (-1.0 / p[0])
        return mag if u1 < 0.5 else -mag
    if kind == codes.NOISE_STABLE:
        a = p[0]
        v = math.pi * (u1 - 0.5)
        w = -math.log(u2)
        t1 = math.sin(a * v) / math.cos(v) ** (1.0 / a)
        return t1 * (math.cos((1.0 - a) * v) / w) ** ((1.0 - a) / a)
    if kind == codes.NOISE_DEXP:
        if u1 < p[2]:
            return -math.log(u2) / p[0]
        return math.log(u2) / p[1]
    if kind == codes.NOISE_LOGP:
        if u2 <= tc[-1]:
            i = np.searchsorted(tc, u2)
            if i == 0:
                mag = tx[0]
            else:
                c0 = tc[i - 1]
                c1 = tc[i]
                frac = 0.0 if c1 == c0 else (u2 - c0) / (c1 - c0)
                mag = tx[i - 1] + frac * (tx[i] - tx[i - 1])
        else:
            pp = 1.0 - u2
            mag = tx[-1]
            for _ in range(64):
                mag = (p[1] / pp) ** (1.0 / p[0]) * math.log(math.e + mag) ** (-2.0 / p[0])
        return mag if u1 < 0.5 else -mag
    return 0.0


@njit(cache=True, inline="always")
def _deriv(kind, p, x):
    if kind == codes.LAND_DOUBLE_WELL:
        if x > 2.0:
            return 24.0
        if x < -2.0:
            return -24.0
        return 4.0 * x * (x * x - 1.0)
    if kind == codes.LAND_VSHAPE:
        c_l = p[0]
        c_r = p[1]
        d = p[2]
        s = p[3]
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
        k = np.int64(p[0])
        c = p[1]
        a = p[2]
        dd = p[3]
        flank = p[4]
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
    return p[0]  # LAND_LINEAR


@njit(cache=True)
def deriv_grid(kind, params, xs):
    out = np.empty(xs.size)
    for i in range(xs.size):
        out[i] = _deriv(kind, params, xs[i])
    return out


@njit(cache=True, parallel=True)
def draw_block(kind, params, tx, tc, root_seed, run_index0, n):
    out = np.empty(n)
    for j in prange(n):
        s0, s1, s2, s3 = _seed4(root_seed, run_index0 + j)
        r1, s0, s1, s2, s3 = _next(s0, s1, s2, s3)
        r2, s0, s1, s2, s3 = _next(s0, s1, s2, s3)
        out[j] = _draw(kind, params, tx, tc, _to_unif(r1), _to_unif(r2))
    return out


@njit(cache=True)
def uniform_block(root_seed, run_index, n):
    out = np.empty(n)
    s0, s1, s2, s3 = _seed4(root_seed, run_index)
    for j in range(n):
        r, s0, s1, s2, s3 = _next(s0, s1, s2, s3)
        out[j] = _to_unif(r)
    return out


@njit(cache=True, parallel=True)
def sgd_batch(
    land_kind,
    land_params,
    noise_kind,
    noise_params,
    tx,
    tc,
    eps,
    start_mode,
    sa,
    sb,
    max_steps,
    stop_mode,
    lo,
    hi,
    root_seed,
    n_runs,
):
    final_x = np.empty(n_runs)
    steps = np.zeros(n_runs, np.int64)
    exit_step = np.full(n_runs, -1, np.int64)
    exit_side = np.zeros(n_runs, np.int8)
    n_down = np.zeros(n_runs, np.int64)
    n_up = np.zeros(n_runs, np.int64)
    first_down = np.full(n_runs, -1, np.int64)
    aborted = np.zeros(n_runs, np.uint8)
    for i in prange(n_runs):
        s0, s1, s2, s3 = _seed4(root_seed, i)
        if start_mode == codes.START_UNIFORM:
            r, s0, s1, s2, s3 = _next(s0, s1, s2, s3)
            x = sa + (sb - sa) * _to_unif(r)
        else:
            x = sa
        up = x >= 0.0
        k = 0
        for k in range(1, max_steps + 1):
            r1, s0, s1, s2, s3 = _next(s0, s1, s2, s3)
            r2, s0, s1, s2, s3 = _next(s0, s1, s2, s3)
            xi = _draw(noise_kind, noise_params, tx, tc, _to_unif(r1), _to_unif(r2))
            x = x - eps * _deriv(land_kind, land_params, x) + eps * xi
            if not (-OVF < x < OVF):
                aborted[i] = 1
                break
            if up:
                if x < 0.0:
                    n_down[i] += 1
                    if first_down[i] < 0:
                        first_down[i] = k
                    up = False
            elif x >= 0.0:
                n_up[i] += 1
                up = True
            if stop_mode == codes.STOP_EXIT and (x < lo or x > hi):
                exit_step[i] = k
                exit_side[i] = 1 if x > hi else -1
                break
        final_x[i] = x
        steps[i] = k
    return final_x, steps, exit_step, exit_side, n_down, n_up, first_down, aborted


@njit(cache=True)
def sgd_single(
    land_kind,
    land_params,
    noise_kind,
    noise_params,
    tx,
    tc,
    eps,
    x0,
    max_steps,
    stop_mode,
    lo,
    hi,
    root_seed,
    run_index,
    record_stride,
    cross_cap,
):
    cap = max_steps // record_stride + 2 if record_stride > 0 else 1
    path_steps = np.empty(cap, np.int64)
    path_x = np.empty(cap)
    n_path = 0
    if record_stride > 0:
        path_steps[0] = 0
        path_x[0] = x0
        n_path = 1
    cross_steps = np.empty(cross_cap, np.int64)
    cross_dirs = np.empty(cross_cap, np.int8)
    n_cross = 0
    truncated = False
    x = x0
    up = x >= 0.0
    exit_step = np.int64(-1)
    exit_side = np.int8(0)
    aborted = np.uint8(0)
    s0, s1, s2, s3 = _seed4(root_seed, run_index)
    k = 0
    for k in range(1, max_steps + 1):
        r1, s0, s1, s2, s3 = _next(s0, s1, s2, s3)
        r2, s0, s1, s2, s3 = _next(s0, s1, s2, s3)
        xi = _draw(noise_kind, noise_params, tx, tc, _to_unif(r1), _to_unif(r2))
        x = x - eps * _deriv(land_kind, land_params, x) + eps * xi
        if not (-OVF < x < OVF):
            aborted = np.uint8(1)
            break
        flipped = 0
        if up:
            if x < 0.0:
                up = False
                flipped = -1
        elif x >= 0.0:
            up = True
            flipped = 1
        if flipped != 0:
            if n_cross < cross_cap:
                cross_steps[n_cross] = k
                cross_dirs[n_cross] = flipped
                n_cross += 1
            else:
                truncated = True
        if record_stride > 0 and k % record_stride == 0:
            path_steps[n_path] = k
            path_x[n_path] = x
            n_path += 1
        if stop_mode == codes.STOP_EXIT and (x < lo or x > hi):
            exit_step = k
            exit_side = np.int8(1) if x > hi else np.int8(-1)
            break
    return (
        x,
        np.int64(k),
        exit_step,
        exit_side,
        aborted,
        path_steps[:n_path],
        path_x[:n_path],
        cross_steps[:n_cross],
        cross_dirs[:n_cross],
        truncated,
    )


@njit(cache=True, parallel=True)
def rrw_batch(noise_kind, noise_params, tx, tc, c_l, c_r, escape_level, max_steps, root_seed, n_runs):
    n_cross = np.zeros(n_runs, np.int64)
    resolved = np.zeros(n_runs, np.uint8)
    side = np.zeros(n_runs, np.int8)
    steps = np.zeros(n_runs, np.int64)
    for i in prange(n_runs):
        s0, s1, s2, s3 = _seed4(root_seed, i)
        x = 0.0
        up = True
        k = 0
        for k in range(1, max_steps + 1):
            r1, s0, s1, s2, s3 = _next(s0, s1, s2, s3)
            r2, s0, s1, s2, s3 = _next(s0, s1, s2, s3)
            xi = _draw(noise_kind, noise_params, tx, tc, _to_unif(r1), _to_unif(r2))
            x = x + xi + (c_r if up else -c_l)
            if up:
                if x < 0.0:
                    n_cross[i] += 1
                    up = False
            elif x >= 0.0:
                n_cross[i] += 1
                up = True
            if x > escape_level:
                resolved[i] = 1
                side[i] = 1
                break
            if x < -escape_level:
                resolved[i] = 1
                side[i] = -1
                break
        steps[i] = k
    return n_cross, resolved, side, steps


@njit(cache=True)
def himmelblau_path(eps, x0, y0, n_steps, radius_alpha, root_seed, run_index, stride):
    cap = n_steps // stride + 2
    out_step = np.empty(cap, np.int64)
    out_x = np.empty(cap)
    out_y = np.empty(cap)
    out_step[0] = 0
    out_x[0] = x0
    out_y[0] = y0
    n_out = 1
    x = x0
    y = y0
    s0, s1, s2, s3 = _seed4(root_seed, run_index)
    for k in range(1, n_steps + 1):
        r1, s0, s1, s2, s3 = _next(s0, s1, s2, s3)
        r2, s0, s1, s2, s3 = _next(s0, s1, s2, s3)
        if radius_alpha > 0.0:
            theta = TWO_PI * _to_unif(r1)
            rad = _to_unif(r2) ** (-1.0 / radius_alpha)
            nx = rad * math.cos(theta)
            ny = rad * math.sin(theta)
        else:
            nx = 0.0
            ny = 0.0
        p = x * x + y - 11.0
        q = x + y * y - 7.0
        gx = 4.0 * x * p + 2.0 * q
        gy = 2.0 * p + 4.0 * y * q
        x = x - eps * gx + eps * nx
        y = y - eps * gy + eps * ny
        if k % stride == 0:
            out_step[n_out] = k
            out_x[n_out] = x
            out_y[n_out] = y
            n_out += 1
    return out_step[:n_out], out_x[:n_out], out_y[:n_out]


@njit(cache=True, parallel=True)
def himmelblau_batch(eps, x0, y0, n_steps, radius_alpha, root_seed, n_runs):
    max_dev = np.zeros(n_runs)
    visited = np.zeros(n_runs, np.int64)
    mins = HIMMELBLAU_MINIMA
    for i in prange(n_runs):
        x = x0
        y = y0
        dev = 0.0
        mask = 0
        s0, s1, s2, s3 = _seed4(root_seed, i)
        for _ in range(n_steps):
            r1, s0, s1, s2, s3 = _next(s0, s1, s2, s3)
            r2, s0, s1, s2, s3 = _next(s0, s1, s2, s3)
            if radius_alpha > 0.0:
                theta = TWO_PI * _to_unif(r1)
                rad = _to_unif(r2) ** (-1.0 / radius_alpha)
                nx = rad * math.cos(theta)
                ny = rad * math.sin(theta)
            else:
                nx = 0.0
                ny = 0.0
            p = x * x + y - 11.0
            q = x + y * y - 7.0
            x = x - eps * (4.0 * x * p + 2.0 * q) + eps * nx
            y = y - eps * (2.0 * p + 4.0 * y * q) + eps * ny
            d = math.sqrt((x - x0) ** 2 + (y - y0) ** 2)
            if d > dev:
                dev = d
            for m in range(4):
                if (x - mins[m, 0]) ** 2 + (y - mins[m, 1]) ** 2 < 1.0:
                    mask |= 1 << m
        max_dev[i] = dev
        visited[i] = mask
    return max_dev, visited
