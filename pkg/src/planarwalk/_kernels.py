"""Compiled per-path Monte Carlo loops.

Every kernel takes a np.random.Generator and draws from it sequentially,
so a run is reproducible from the stream key alone.  Lattice steps are
derived from gen.random() thresholds (substantially faster under numba
than gen.integers).  All kernels release the GIL; sharded drivers may
schedule them on threads without affecting results.
"""
from __future__ import annotations

import numpy as np
from numba import njit

# Within-step exit test for the unit interval straddle: the correction
# probability exp(-2*gap/dt) is negligible past gap > ~16*dt.
_BRIDGE_CUT = 16.2

# A Brownian block exiting (-1,1) from 0 has exit time with mean 1 and
# a sub-exponential tail; 64 time units is unreachable in practice.
_BLOCK_HORIZON = 64.0


@njit(cache=True, nogil=True)
def bm_endpoint_sup_2d(gen, n_paths, n_steps, dt, out_end, out_sup):
    """|B(horizon)| and the grid sup of |B| for planar Brownian paths."""
    sd = np.sqrt(dt)
    for p in range(n_paths):
        x = 0.0
        y = 0.0
        m2 = 0.0
        for _ in range(n_steps):
            x += sd * gen.standard_normal()
            y += sd * gen.standard_normal()
            r2 = x * x + y * y
            if r2 > m2:
                m2 = r2
        out_end[p] = np.sqrt(x * x + y * y)
        out_sup[p] = np.sqrt(m2)


@njit(cache=True, nogil=True)
def bm_endpoint_sup_1d(gen, n_paths, n_steps, dt, out_end, out_sup):
    sd = np.sqrt(dt)
    for p in range(n_paths):
        x = 0.0
        m = 0.0
        for _ in range(n_steps):
            x += sd * gen.standard_normal()
            a = abs(x)
            if a > m:
                m = a
        out_end[p] = abs(x)
        out_sup[p] = m


@njit(cache=True, nogil=True)
def walk_endpoint_sup_1d(gen, n_paths, n_steps, out_end, out_sup):
    """|S(n)| and max_k |S(k)| for 1D simple walks."""
    for p in range(n_paths):
        s = 0
        m = 0
        for _ in range(n_steps):
            if gen.random() < 0.5:
                s += 1
            else:
                s -= 1
            a = abs(s)
            if a > m:
                m = a
        out_end[p] = abs(s)
        out_sup[p] = m


@njit(cache=True, nogil=True)
def walk_endpoint_sup_2d(gen, n_paths, n_steps, out_end, out_sup):
    """|S(n)| and max_k |S(k)| (Euclidean) for planar simple walks."""
    for p in range(n_paths):
        x = 0
        y = 0
        m2 = 0
        for _ in range(n_steps):
            u = gen.random()
            if u < 0.25:
                x += 1
            elif u < 0.5:
                x -= 1
            elif u < 0.75:
                y += 1
            else:
                y -= 1
            r2 = x * x + y * y
            if r2 > m2:
                m2 = r2
        out_end[p] = np.sqrt(float(x * x + y * y))
        out_sup[p] = np.sqrt(float(m2))


@njit(cache=True, nogil=True)
def small_ball_stage(gen, pos, dt, n_steps, radius):
    """Advance planar BM particles, killing on leaving the disk.

    pos is (N, 2) and is updated in place; killed particles get NaN.
    Returns the number of survivors.
    """
    sd = np.sqrt(dt)
    r2max = radius * radius
    alive = 0
    for i in range(pos.shape[0]):
        x = pos[i, 0]
        y = pos[i, 1]
        if np.isnan(x):
            continue
        dead = False
        for _ in range(n_steps):
            x += sd * gen.standard_normal()
            y += sd * gen.standard_normal()
            if x * x + y * y > r2max:
                dead = True
                break
        if dead:
            pos[i, 0] = np.nan
            pos[i, 1] = np.nan
        else:
            pos[i, 0] = x
            pos[i, 1] = y
            alive += 1
    return alive


@njit(cache=True, nogil=True)
def slit_disk_escape(gen, n_paths, eps, dt):
    """Count BM paths from -eps reaching |z| = 1 before the slit [0,1).

    The slit test checks each step's segment for a sign change in y with
    x-intercept in [0, 1).  Paths start on the negative axis at -eps.
    """
    sd = np.sqrt(dt)
    escaped = 0
    for _ in range(n_paths):
        x = -eps
        y = 0.0
        # the start point itself is on the axis left of the slit; step once
        while True:
            nx = x + sd * gen.standard_normal()
            ny = y + sd * gen.standard_normal()
            hit_slit = False
            if (y > 0.0) != (ny > 0.0) and y != ny:
                s = y / (y - ny)
                xc = x + s * (nx - x)
                if 0.0 <= xc < 1.0:
                    hit_slit = True
            if hit_slit:
                break
            if nx * nx + ny * ny >= 1.0:
                escaped += 1
                break
            x = nx
            y = ny
    return escaped


@njit(cache=True, nogil=True)
def walk_halfline_escape(gen, n_paths, x0, y0, radius_sq, slit_len):
    """Count planar walks escaping past |S| > sqrt(radius_sq) before the
    segment {(k, 0) : 0 <= k <= slit_len}.  Start (x0, y0) must be off it."""
    escaped = 0
    for _ in range(n_paths):
        x = x0
        y = y0
        while True:
            u = gen.random()
            if u < 0.25:
                x += 1
            elif u < 0.5:
                x -= 1
            elif u < 0.75:
                y += 1
            else:
                y -= 1
            if y == 0 and 0 <= x <= slit_len:
                break
            if x * x + y * y > radius_sq:
                escaped += 1
                break
    return escaped


@njit(cache=True, nogil=True)
def walk_rectangle_hit(gen, n_paths, x0, y0, length, height, phi, out):
    """Planar walks in the rectangle (0,length) x (0,height).

    phi holds boundary data on the right wall x = length, indexed by y.
    out[p] is phi(exit y) when the walk leaves through that wall and 0
    for the three grounded sides.
    """
    for p in range(n_paths):
        x = x0
        y = y0
        while True:
            u = gen.random()
            if u < 0.25:
                x += 1
            elif u < 0.5:
                x -= 1
            elif u < 0.75:
                y += 1
            else:
                y -= 1
            if x == length:
                out[p] = phi[y]
                break
            if x == 0 or y == 0 or y == height:
                out[p] = 0.0
                break


@njit(cache=True, nogil=True)
def walk_strip_hit(gen, n_paths, x0, y0, height, phi, max_steps, out):
    """Planar walks in the strip (0,inf) x (0,height) grounded at y=0,
    y=height; phi lives on the wall x = 0.  out[p] = phi(exit y), or NaN
    if the step cap is exhausted (counted by the caller)."""
    for p in range(n_paths):
        x = x0
        y = y0
        steps = 0
        while True:
            u = gen.random()
            if u < 0.25:
                x += 1
            elif u < 0.5:
                x -= 1
            elif u < 0.75:
                y += 1
            else:
                y -= 1
            steps += 1
            if x == 0:
                out[p] = phi[y]
                break
            if y == 0 or y == height:
                out[p] = 0.0
                break
            if steps >= max_steps:
                out[p] = np.nan
                break


@njit(cache=True, nogil=True)
def exit_blocks_pass1(gen, n_blocks, dt, T, side):
    """First pass of the embedding: cumulative exit times and exit sides.

    Each block runs a fresh Brownian increment stream from 0 until it
    leaves (-1, 1), on the dt grid refined by a within-step straddle
    test.  T[k] is the time of the k-th embedded step, side[k] its sign.
    Returns max_k |T[k] - k|.
    """
    sd = np.sqrt(dt)
    tglob = 0.0
    T[0] = 0.0
    maxdev = 0.0
    for k in range(1, n_blocks + 1):
        w = 0.0
        t = 0.0
        lvl = 0
        while True:
            w2 = w + sd * gen.standard_normal()
            if w2 >= 1.0 or w2 <= -1.0:
                lvl = 1 if w2 >= 1.0 else -1
                frac = (lvl - w) / (w2 - w)
                t += frac * dt
                break
            hi = (1.0 - w) * (1.0 - w2)
            lo = (1.0 + w) * (1.0 + w2)
            if hi < _BRIDGE_CUT * dt or lo < _BRIDGE_CUT * dt:
                pu = np.exp(-2.0 * hi / dt)
                pl = np.exp(-2.0 * lo / dt)
                u = gen.random()
                if u < pu + pl:
                    lvl = 1 if u < pu else -1
                    t += 0.5 * dt
                    break
            w = w2
            t += dt
        tglob += t
        T[k] = tglob
        side[k] = lvl
        d = abs(tglob - k)
        if d > maxdev:
            maxdev = d
    return maxdev


@njit(cache=True, nogil=True)
def exit_blocks_pass2(gen, n_blocks, dt, S):
    """Replay pass1's draws against the embedded walk S (length n+1).

    Evaluates sup_t |B(t) - S(t)| over the simulation grid for t <= n,
    where S is linearly interpolated between integer times and B runs
    past the last exit with fresh increments if needed.  The generator
    must be in the exact state pass1 started from.
    """
    n = n_blocks
    sd = np.sqrt(dt)
    tglob = 0.0
    anchor = 0.0  # S[k-1] during block k: B(T_{k-1} + t) = anchor + W(t)
    best = 0.0
    for k in range(1, n + 1):
        w = 0.0
        t = 0.0
        while True:
            w2 = w + sd * gen.standard_normal()
            done = False
            if w2 >= 1.0 or w2 <= -1.0:
                lvl = 1.0 if w2 >= 1.0 else -1.0
                frac = (lvl - w) / (w2 - w)
                t += frac * dt
                done = True
            else:
                hi = (1.0 - w) * (1.0 - w2)
                lo = (1.0 + w) * (1.0 + w2)
                if hi < _BRIDGE_CUT * dt or lo < _BRIDGE_CUT * dt:
                    pu = np.exp(-2.0 * hi / dt)
                    pl = np.exp(-2.0 * lo / dt)
                    u = gen.random()
                    if u < pu + pl:
                        t += 0.5 * dt
                        done = True
            if done:
                break
            w = w2
            t += dt
            tg = tglob + t
            if tg > n:
                return best
            i = int(tg)
            if i >= n:
                s_t = S[n]
            else:
                s_t = S[i] + (tg - i) * (S[i + 1] - S[i])
            d = abs(anchor + w2 - s_t)
            if d > best:
                best = d
        tglob += t
        anchor = S[k]
        if tglob > n:
            return best
        i = int(tglob)
        if i >= n:
            s_t = S[n]
        else:
            s_t = S[i] + (tglob - i) * (S[i + 1] - S[i])
        d = abs(anchor - s_t)
        if d > best:
            best = d
    # the walk ran out before time n: extend B with fresh increments
    b = float(S[n])
    t = tglob
    while t < n:
        t += dt
        if t > n:
            break
        b += sd * gen.standard_normal()
        i = int(t)
        if i >= n:
            s_t = S[n]
        else:
            s_t = S[i] + (t - i) * (S[i + 1] - S[i])
        d = abs(b - s_t)
        if d > best:
            best = d
    return best


@njit(cache=True, nogil=True)
def exit_block_record(gen, dt, wbuf):
    """One embedding block, recording the Brownian grid values.

    Fills wbuf with W(dt), W(2 dt), ... until the block exits (-1,1) and
    returns (grid_count, exit_time, side).  The straddle test may end
    the block between grid points, in which case the recorded values all
    lie strictly inside the interval.
    """
    sd = np.sqrt(dt)
    w = 0.0
    t = 0.0
    m = 0
    while True:
        w2 = w + sd * gen.standard_normal()
        if w2 >= 1.0 or w2 <= -1.0:
            lvl = 1 if w2 >= 1.0 else -1
            t += (lvl - w) / (w2 - w) * dt
            return m, t, lvl
        hi = (1.0 - w) * (1.0 - w2)
        lo = (1.0 + w) * (1.0 + w2)
        if hi < _BRIDGE_CUT * dt or lo < _BRIDGE_CUT * dt:
            pu = np.exp(-2.0 * hi / dt)
            pl = np.exp(-2.0 * lo / dt)
            u = gen.random()
            if u < pu + pl:
                lvl = 1 if u < pu else -1
                return m, t + 0.5 * dt, lvl
        w = w2
        t += dt
        wbuf[m] = w
        m += 1
        if t >= _BLOCK_HORIZON:
            # unreachable in practice; bail out rather than overrun
            return m, t, 1 if w > 0 else -1


@njit(cache=True, nogil=True)
def exit_time_side_sample(gen, n_samples, dt, out_t, out_side):
    """iid (exit time, exit side) of (-1,1) from 0, same block sampler."""
    sd = np.sqrt(dt)
    for i in range(n_samples):
        w = 0.0
        t = 0.0
        lvl = 0
        while True:
            w2 = w + sd * gen.standard_normal()
            if w2 >= 1.0 or w2 <= -1.0:
                lvl = 1 if w2 >= 1.0 else -1
                t += (lvl - w) / (w2 - w) * dt
                break
            hi = (1.0 - w) * (1.0 - w2)
            lo = (1.0 + w) * (1.0 + w2)
            if hi < _BRIDGE_CUT * dt or lo < _BRIDGE_CUT * dt:
                pu = np.exp(-2.0 * hi / dt)
                pl = np.exp(-2.0 * lo / dt)
                u = gen.random()
                if u < pu + pl:
                    lvl = 1 if u < pu else -1
                    t += 0.5 * dt
                    break
            w = w2
            t += dt
        out_t[i] = t
        out_side[i] = lvl


@njit(cache=True, nogil=True)
def walk_obstacle_escape(gen, n_paths, x0, y0, radius_sq, keys):
    """Count planar walks escaping |S|^2 > radius_sq before hitting any
    point of the obstacle, given as sorted int64 keys x*2^31 + y."""
    escaped = 0
    for _ in range(n_paths):
        x = x0
        y = y0
        while True:
            u = gen.random()
            if u < 0.25:
                x += 1
            elif u < 0.5:
                x -= 1
            elif u < 0.75:
                y += 1
            else:
                y -= 1
            key = x * 2147483648 + y
            lo = 0
            hi = keys.shape[0]
            while lo < hi:
                mid = (lo + hi) // 2
                if keys[mid] < key:
                    lo = mid + 1
                else:
                    hi = mid
            if lo < keys.shape[0] and keys[lo] == key:
                break
            if x * x + y * y > radius_sq:
                escaped += 1
                break
    return escaped
