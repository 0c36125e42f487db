"""Pure-NumPy fallback for the simulation kernels.

Same interface and stream semantics as kernels_numba: run i draws from the
stream keyed by (root_seed, i), so the two backends agree run-for-run (bit
exact on the uniform streams; transforms agree to libm rounding). Trajectory
loops are vectorized across the still-active runs and compacted as runs
finish, which keeps total work proportional to the summed trajectory
lengths.
"""

import math

import numpy as np

from . import codes

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX_A = np.uint64(0xBF58476D1CE4E5B9)
MIX_B = np.uint64(0x94D049BB133111EB)
INV53 = 2.0**-53
TWO_PI = 2.0 * math.pi
OVF = codes.OVERFLOW_LIMIT

HIMMELBLAU_MINIMA = np.array(
    [[3.0, 2.0], [-2.805118, 3.131312], [-3.779310, -3.283186], [3.584428, -1.848126]]
)

_u = np.uint64


def _mix64(z):
    z = (z ^ (z >> _u(30))) * MIX_A
    z = (z ^ (z >> _u(27))) * MIX_B
    return z ^ (z >> _u(31))


def _seed4(root_seed, idx):
    """Vector of xoshiro256++ states for run indices idx; shape (4, n)."""
    root = _u(int(root_seed) & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        key = _mix64(root + (idx.astype(np.uint64) + _u(1)) * GOLDEN)
        s = np.stack([_mix64(key + _u(j) * GOLDEN) for j in (1, 2, 3, 4)])
    dead = (s[0] | s[1] | s[2] | s[3]) == _u(0)
    if np.any(dead):
        s[0][dead] = GOLDEN
    return s


def _rotl(x, k):
    return (x << _u(k)) | (x >> _u(64 - k))


def _next(s):
    """Advance all streams one step; returns the raw uint64 outputs."""
    with np.errstate(over="ignore"):
        res = _rotl(s[0] + s[3], 23) + s[0]
        t = s[1] << _u(17)
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
    return res


def _to_unif(r):
    return ((r >> _u(11)).astype(np.float64) + 0.5) * INV53


def _draw_vec(kind, p, tx, tc, u1, u2):
    if kind == codes.NOISE_GAUSSIAN:
        return p[0] * np.sqrt(-2.0 * np.log(u1)) * np.cos(TWO_PI * u2)
    if kind == codes.NOISE_PARETO:
        mag = p[1] * u2 ** (-1.0 / p[0])
        return np.where(u1 < 0.5, mag, -mag)
    if kind == codes.NOISE_STABLE:
        a = p[0]
        v = np.pi * (u1 - 0.5)
        w = -np.log(u2)
        t1 = np.sin(a * v) / np.cos(v) ** (1.0 / a)
        return t1 * (np.cos((1.0 - a) * v) / w) ** ((1.0 - a) / a)
    if kind == codes.NOISE_DEXP:
        return np.where(u1 < p[2], -np.log(u2) / p[0], np.log(u2) / p[1])
    if kind == codes.NOISE_LOGP:
        mag = np.interp(u2, tc, tx)
        in_tail = u2 > tc[-1]
        if np.any(in_tail):
            pp = 1.0 - u2[in_tail]
            m = np.full(pp.shape, tx[-1])
            for _ in range(64):
                m = (p[1] / pp) ** (1.0 / p[0]) * np.log(math.e + m) ** (-2.0 / p[0])
            mag[in_tail] = m
        return np.where(u1 < 0.5, mag, -mag)
    return np.zeros_like(u1)


def _deriv_vec(kind, p, x):
    if kind == codes.LAND_DOUBLE_WELL:
        return np.where(x > 2.0, 24.0, np.where(x < -2.0, -24.0, 4.0 * x * (x * x - 1.0)))
    if kind == codes.LAND_VSHAPE:
        c_l, c_r, d, s = p[0], p[1], p[2], p[3]
        right = np.where(
            x < d, -c_r, np.where(x <= d + 1.0, -c_r * (d + 1.0 - x), np.minimum(s * (x - d - 1.0), s))
        )
        left = np.where(
            x > -d, c_l, np.where(x >= -d - 1.0, c_l * (x + d + 1.0), np.maximum(s * (x + d + 1.0), -s))
        )
        return np.where(x >= 0.0, right, left)
    if kind == codes.LAND_KCRITICAL:
        k = int(p[0])
        c, a, dd, flank = p[1], p[2], p[3], p[4]
        r = x - c
        inner = (k + 1) * a * r**k
        d_right = (k + 1) * a * dd**k
        d_left = (k + 1) * a * (-dd) ** k
        if flank == 0.0:
            return np.where(np.abs(r) <= dd, inner, np.where(r > dd, d_right, d_left))
        s_r, s_l = abs(d_right), abs(d_left)
        right = np.where(r <= dd + 1.0, d_right * (dd + 1.0 - r), np.minimum(s_r * (r - dd - 1.0), s_r))
        left = np.where(r >= -dd - 1.0, d_left * (r + dd + 1.0), np.maximum(s_l * (r + dd + 1.0), -s_l))
        return np.where(np.abs(r) <= dd, inner, np.where(r > 0.0, right, left))
    return np.full_like(x, p[0])  # LAND_LINEAR


def deriv_grid(kind, params, xs):
    return _deriv_vec(kind, params, np.asarray(xs, dtype=np.float64))


def draw_block(kind, params, tx, tc, root_seed, run_index0, n):
    idx = np.arange(run_index0, run_index0 + n, dtype=np.int64)
    s = _seed4(root_seed, idx)
    u1 = _to_unif(_next(s))
    u2 = _to_unif(_next(s))
    return _draw_vec(kind, params, tx, tc, u1, u2)


def uniform_block(root_seed, run_index, n):
    # Single-stream, inherently serial; used only for stream-identity tests.
    from .rng import Xoshiro256PP

    g = Xoshiro256PP(int(root_seed), int(run_index))
    return np.array([g.uniform() for _ in range(n)])


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

    idx = np.arange(n_runs, dtype=np.int64)
    s = _seed4(root_seed, idx)
    if start_mode == codes.START_UNIFORM:
        x = sa + (sb - sa) * _to_unif(_next(s))
    else:
        x = np.full(n_runs, sa)
    up = x >= 0.0
    nd = np.zeros(n_runs, np.int64)
    nu = np.zeros(n_runs, np.int64)
    fd = np.full(n_runs, -1, np.int64)

    k = 0
    while idx.size and k < max_steps:
        k += 1
        u1 = _to_unif(_next(s))
        u2 = _to_unif(_next(s))
        xi = _draw_vec(noise_kind, noise_params, tx, tc, u1, u2)
        x = x - eps * _deriv_vec(land_kind, land_params, x) + eps * xi

        bad = ~((-OVF < x) & (x < OVF))
        new_down = up & (x < 0.0) & ~bad
        new_up = ~up & (x >= 0.0) & ~bad
        nd[new_down] += 1
        nu[new_up] += 1
        fd[new_down & (fd < 0)] = k
        up = np.where(new_down, False, np.where(new_up, True, up))

        if stop_mode == codes.STOP_EXIT:
            out = ((x < lo) | (x > hi)) & ~bad
        else:
            out = np.zeros_like(bad)
        done = bad | out | (k == max_steps)
        if np.any(done):
            gi = idx[done]
            final_x[gi] = x[done]
            steps[gi] = k
            aborted[gi] = bad[done]
            exited = out[done]
            ge = gi[exited]
            exit_step[ge] = k
            exit_side[ge] = np.where(x[done][exited] > hi, 1, -1).astype(np.int8)
            n_down[gi] = nd[done]
            n_up[gi] = nu[done]
            first_down[gi] = fd[done]
            keep = ~done
            idx, x, up, nd, nu, fd = idx[keep], x[keep], up[keep], nd[keep], nu[keep], fd[keep]
            s = s[:, keep]
    if idx.size:  # max_steps == 0 never happens (validated); defensive
        final_x[idx] = x
        steps[idx] = k
        n_down[idx] = nd
        n_up[idx] = nu
        first_down[idx] = fd
    return final_x, steps, exit_step, exit_side, n_down, n_up, first_down, aborted


def _draw_scalar(kind, p, tx, tc, u1, u2):
    """Scalar twin of _draw_vec, same formulas as noise.transform_pair."""
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
            mag = float(np.interp(u2, tc, tx))
        else:
            pp = 1.0 - u2
            mag = tx[-1]
            for _ in range(64):
                mag = (p[1] / pp) ** (1.0 / p[0]) * math.log(math.e + mag) ** (-2.0 / p[0])
        return mag if u1 < 0.5 else -mag
    return 0.0


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
    from .landscape import _derivative_scalar
    from .rng import Xoshiro256PP

    g = Xoshiro256PP(int(root_seed), int(run_index))
    p = np.asarray(noise_params)
    path_steps, path_x = [], []
    if record_stride > 0:
        path_steps.append(0)
        path_x.append(x0)
    cross_steps, cross_dirs = [], []
    truncated = False
    x = float(x0)
    up = x >= 0.0
    exit_step, exit_side, aborted = -1, 0, 0
    k = 0
    lp = np.asarray(land_params)
    for k in range(1, max_steps + 1):
        u1 = g.uniform()
        u2 = g.uniform()
        xi = _draw_scalar(noise_kind, p, tx, tc, u1, u2)
        x = x - eps * _derivative_scalar(land_kind, lp, x) + eps * xi
        if not (-OVF < x < OVF):
            aborted = 1
            break
        flipped = 0
        if up and x < 0.0:
            up, flipped = False, -1
        elif not up and x >= 0.0:
            up, flipped = True, 1
        if flipped:
            if len(cross_steps) < cross_cap:
                cross_steps.append(k)
                cross_dirs.append(flipped)
            else:
                truncated = True
        if record_stride > 0 and k % record_stride == 0:
            path_steps.append(k)
            path_x.append(x)
        if stop_mode == codes.STOP_EXIT and (x < lo or x > hi):
            exit_step = k
            exit_side = 1 if x > hi else -1
            break
    return (
        x,
        np.int64(k),
        np.int64(exit_step),
        np.int8(exit_side),
        np.uint8(aborted),
        np.array(path_steps, np.int64),
        np.array(path_x),
        np.array(cross_steps, np.int64),
        np.array(cross_dirs, np.int8),
        truncated,
    )


def rrw_batch(noise_kind, noise_params, tx, tc, c_l, c_r, escape_level, max_steps, root_seed, n_runs):
    n_cross = np.zeros(n_runs, np.int64)
    resolved = np.zeros(n_runs, np.uint8)
    side = np.zeros(n_runs, np.int8)
    steps = np.zeros(n_runs, np.int64)

    idx = np.arange(n_runs, dtype=np.int64)
    s = _seed4(root_seed, idx)
    x = np.zeros(n_runs)
    up = np.ones(n_runs, bool)
    nc = np.zeros(n_runs, np.int64)
    k = 0
    while idx.size and k < max_steps:
        k += 1
        u1 = _to_unif(_next(s))
        u2 = _to_unif(_next(s))
        xi = _draw_vec(noise_kind, noise_params, tx, tc, u1, u2)
        x = x + xi + np.where(up, c_r, -c_l)
        new_down = up & (x < 0.0)
        new_up = ~up & (x >= 0.0)
        nc[new_down | new_up] += 1
        up = np.where(new_down, False, np.where(new_up, True, up))
        done = (x > escape_level) | (x < -escape_level) | (k == max_steps)
        if np.any(done):
            gi = idx[done]
            n_cross[gi] = nc[done]
            steps[gi] = k
            esc = (np.abs(x) > escape_level)[done]
            resolved[gi] = esc
            side[gi] = np.where(esc, np.where(x[done] > 0, 1, -1), 0).astype(np.int8)
            keep = ~done
            idx, x, up, nc = idx[keep], x[keep], up[keep], nc[keep]
            s = s[:, keep]
    return n_cross, resolved, side, steps


def _himmelblau_noise(u1, u2, radius_alpha):
    if radius_alpha > 0.0:
        theta = TWO_PI * u1
        rad = u2 ** (-1.0 / radius_alpha)
        return rad * np.cos(theta), rad * np.sin(theta)
    return np.zeros_like(u1), np.zeros_like(u1)


def himmelblau_path(eps, x0, y0, n_steps, radius_alpha, root_seed, run_index, stride):
    idx = np.array([run_index], dtype=np.int64)
    s = _seed4(root_seed, idx)
    out_step, out_x, out_y = [0], [x0], [y0]
    x = np.array([x0])
    y = np.array([y0])
    for k in range(1, n_steps + 1):
        u1 = _to_unif(_next(s))
        u2 = _to_unif(_next(s))
        nx, ny = _himmelblau_noise(u1, u2, radius_alpha)
        p = x * x + y - 11.0
        q = x + y * y - 7.0
        x = x - eps * (4.0 * x * p + 2.0 * q) + eps * nx
        y = y - eps * (2.0 * p + 4.0 * y * q) + eps * ny
        if k % stride == 0:
            out_step.append(k)
            out_x.append(float(x[0]))
            out_y.append(float(y[0]))
    return np.array(out_step, np.int64), np.array(out_x), np.array(out_y)


def himmelblau_batch(eps, x0, y0, n_steps, radius_alpha, root_seed, n_runs):
    idx = np.arange(n_runs, dtype=np.int64)
    s = _seed4(root_seed, idx)
    x = np.full(n_runs, x0)
    y = np.full(n_runs, y0)
    max_dev = np.zeros(n_runs)
    visited = np.zeros(n_runs, np.int64)
    for _ in range(n_steps):
        u1 = _to_unif(_next(s))
        u2 = _to_unif(_next(s))
        nx, ny = _himmelblau_noise(u1, u2, radius_alpha)
        p = x * x + y - 11.0
        q = x + y * y - 7.0
        x = x - eps * (4.0 * x * p + 2.0 * q) + eps * nx
        y = y - eps * (2.0 * p + 4.0 * y * q) + eps * ny
        np.maximum(max_dev, np.sqrt((x - x0) ** 2 + (y - y0) ** 2), out=max_dev)
        for m in range(4):
            near = (x - HIMMELBLAU_MINIMA[m, 0]) ** 2 + (y - HIMMELBLAU_MINIMA[m, 1]) ** 2 < 1.0
            visited[near] |= 1 << m
    return max_dev, visited
