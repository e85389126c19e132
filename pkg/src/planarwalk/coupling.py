"""Embedding of simple random walk into Brownian motion.

The 1D construction concatenates independent exit blocks: each block
runs a fresh Brownian stream from 0 until it leaves (-1, 1), the walk
takes the exit side as its next step, so S(k) = B(T_k) with |steps| = 1
exactly.  Blocks are simulated on a dt grid with a within-step straddle
correction (an exact conditional Bernoulli given the endpoints), which
removes the systematic late-exit drift a pure grid threshold would
accumulate.

The planar construction runs two independent 1D embeddings and assigns
each planar step to a coordinate by a fair coin, pairing B(t) with
S(2t).

Records retain the Brownian path at all simulated points, so records
are memory-heavy (~ horizon/dt floats); the experiment drivers use the
two-pass streaming form instead, which replays the generator and never
stores the path.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .experiments import wilson_interval
from .paths import LatticePath1D, LatticePath2D
from .rng import StreamKey, make_stream

__all__ = [
    "CouplingRecord",
    "CouplingStats",
    "sample_exit_time",
    "exit_time_sample",
    "embed_1d",
    "embed_2d",
    "coupling_sup",
    "sup_stats_1d",
    "sup_samples_1d",
    "max_time_deviation_sample",
    "tail_curve",
]


@dataclass(frozen=True)
class CouplingRecord:
    """One realized embedding.

    1D: times/values sample B on [0, T_n] (block grids plus the exact
    exit points); exit_times has T_0=0..T_n; walk is the embedded path.
    2D: per-coordinate tuples, plus the assignment sequence (True where
    the planar step moved coordinate 1) and cumulative counts.
    """

    dim: int
    dt: float
    exit_times: tuple[np.ndarray, ...]
    times: tuple[np.ndarray, ...]
    values: tuple[np.ndarray, ...]
    walk: LatticePath1D | LatticePath2D
    assign: np.ndarray | None = None  # 2D only

    @property
    def horizon(self) -> float:
        """Largest time at which the Brownian side is known."""
        return min(float(t[-1]) for t in self.times)

    def wiener_eval(self, t, coord: int = 0) -> np.ndarray:
        """B at arbitrary times by interpolation of the sampled points."""
        return np.interp(t, self.times[coord], self.values[coord])

    def assignment_counts(self) -> tuple[np.ndarray, np.ndarray]:
        """U^1_m, U^2_m for m = 0..n (2D records)."""
        if self.assign is None:
            raise ValueError("assignment counts exist only for 2D records")
        u1 = np.concatenate(([0], np.cumsum(self.assign.astype(np.int64))))
        m = np.arange(len(u1), dtype=np.int64)
        return u1, m - u1


@dataclass(frozen=True)
class CouplingStats:
    n: int
    dim: int
    dt: float
    sup_distance: float
    max_time_deviation: float

    @property
    def g_normalized(self) -> float:
        """sup distance in units of n^{1/4} (the bound's g scale)."""
        return self.sup_distance / self.n**0.25 if self.n > 0 else 0.0


def sample_exit_time(gen, dt: float) -> tuple[float, int]:
    """One exit of (-1,1) from 0: (first-crossing time, side)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    t = np.empty(1)
    s = np.empty(1, dtype=np.int64)
    _kernels.exit_time_side_sample(gen, 1, dt, t, s)
    return float(t[0]), int(s[0])


def exit_time_sample(gen, n_samples: int, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """iid exit times and sides, vectorized."""
    t = np.empty(n_samples)
    s = np.empty(n_samples, dtype=np.int64)
    _kernels.exit_time_side_sample(gen, n_samples, dt, t, s)
    return t, s


def _embed_blocks(gen, n: int, dt: float):
    """Run n exit blocks, recording the Brownian sample points.

    Returns (times, values, T, sides) with the exact exit points
    (T_k, anchor +- 1) included in the sampled path.
    """
    wbuf = np.empty(int(_kernels._BLOCK_HORIZON / dt) + 2)
    t_parts = [np.zeros(1)]
    v_parts = [np.zeros(1)]
    T = np.zeros(n + 1)
    sides = np.zeros(n, dtype=np.int64)
    anchor = 0.0
    tglob = 0.0
    for k in range(n):
        m, t_exit, side = _kernels.exit_block_record(gen, dt, wbuf)
        if m:
            t_parts.append(tglob + dt * np.arange(1, m + 1))
            v_parts.append(anchor + wbuf[:m].copy())
        tglob += t_exit
        anchor += side
        t_parts.append(np.array([tglob]))
        v_parts.append(np.array([anchor]))
        T[k + 1] = tglob
        sides[k] = side
    return np.concatenate(t_parts), np.concatenate(v_parts), T, sides


def _extend_path(gen, times, values, dt: float, horizon: float):
    """Append fresh grid increments until the path covers `horizon`."""
    t0 = float(times[-1])
    if t0 >= horizon:
        return times, values
    m = int(np.ceil((horizon - t0) / dt))
    incr = np.sqrt(dt) * gen.standard_normal(m)
    return (
        np.concatenate([times, t0 + dt * np.arange(1, m + 1)]),
        np.concatenate([values, values[-1] + np.cumsum(incr)]),
    )


def embed_1d(gen, n: int, dt: float) -> CouplingRecord:
    """Embed an n-step walk; the full Brownian path is retained.

    When the last exit lands before time n the Brownian side is extended
    with fresh grid increments, so the record always covers the sup
    window [0, n].
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if dt <= 0:
        raise ValueError("dt must be positive")
    times, values, T, sides = _embed_blocks(gen, n, dt)
    times, values = _extend_path(gen, times, values, dt, float(n))
    walk = LatticePath1D(steps=sides)
    return CouplingRecord(dim=1, dt=dt, exit_times=(T,), times=(times,),
                          values=(values,), walk=walk)


def embed_2d(gen, n: int, dt: float) -> CouplingRecord:
    """Planar embedding: a fair coin routes each step to a coordinate.

    Both Brownian coordinates are extended past their last exit so the
    record covers BM time n/2 (the S(2t) pairing horizon).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n % 2:
        raise ValueError("n must be even for the S(2t) pairing")
    if dt <= 0:
        raise ValueError("dt must be positive")
    assign = gen.random(n) < 0.5
    n1 = int(assign.sum())
    n2 = n - n1
    t1, v1, T1, sides1 = _embed_blocks(gen, n1, dt) if n1 else _empty_blocks()
    t2, v2, T2, sides2 = _embed_blocks(gen, n2, dt) if n2 else _empty_blocks()
    t1, v1 = _extend_path(gen, t1, v1, dt, n / 2)
    t2, v2 = _extend_path(gen, t2, v2, dt, n / 2)
    steps = np.zeros((n, 2), dtype=np.int64)
    steps[assign, 0] = sides1
    steps[~assign, 1] = sides2
    walk = LatticePath2D(steps=steps)
    return CouplingRecord(dim=2, dt=dt, exit_times=(T1, T2), times=(t1, t2),
                          values=(v1, v2), walk=walk, assign=assign)


def _empty_blocks():
    z = np.zeros(1)
    return z, z.copy(), np.zeros(1), np.zeros(0, dtype=np.int64)


def coupling_sup(record: CouplingRecord, horizon: float) -> CouplingStats:
    """Coupling error over the simulation grid up to `horizon`.

    1D: sup_{t<=horizon} |B(t) - S(t)|.  2D: sup |B(t) - S(2t)| with the
    walk read at twice the Brownian time.  The walk is interpolated
    linearly between integer times; evaluation points are the record's
    Brownian sample points plus the walk's kink times.
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    if horizon > record.horizon + 1e-12:
        raise ValueError(
            f"record covers t <= {record.horizon:.6g}, requested {horizon:.6g}")
    walk_steps = record.walk.n
    if record.dim == 1:
        if horizon > walk_steps:
            raise ValueError("horizon exceeds the embedded walk length")
        grid = record.times[0][record.times[0] <= horizon]
        b = record.wiener_eval(grid)
        s = np.interp(grid, np.arange(walk_steps + 1), record.walk.positions.astype(np.float64))
        sup = float(np.abs(b - s).max())
        T = record.exit_times[0]
        maxdev = float(np.abs(T - np.arange(len(T))).max())
    else:
        if 2 * horizon > walk_steps:
            raise ValueError("horizon exceeds the S(2t) pairing range")
        parts = [t[t <= horizon] for t in record.times]
        grid = np.unique(np.concatenate(parts))
        bx = record.wiener_eval(grid, 0)
        by = record.wiener_eval(grid, 1)
        m = np.arange(walk_steps + 1, dtype=np.float64)
        pos = record.walk.positions.astype(np.float64)
        sx = np.interp(2.0 * grid, m, pos[:, 0])
        sy = np.interp(2.0 * grid, m, pos[:, 1])
        sup = float(np.sqrt((bx - sx) ** 2 + (by - sy) ** 2).max())
        maxdev = max(
            float(np.abs(T - np.arange(len(T))).max()) for T in record.exit_times
        )
    return CouplingStats(n=int(horizon), dim=record.dim, dt=record.dt,
                         sup_distance=sup, max_time_deviation=maxdev)


def sup_stats_1d(key: StreamKey, n: int, dt: float) -> CouplingStats:
    """Streaming sup_{t<=n} |B(t) - S(t)| without storing the path.

    Pass 1 finds exit times and sides; pass 2 replays the identical
    generator stream against the now-known walk.  If the last exit lands
    before time n, the Brownian side is extended with fresh increments.
    Evaluation points match what a record-based computation would use.
    """
    gen = make_stream(key)
    T = np.empty(n + 1)
    side = np.empty(n + 1, dtype=np.int64)
    maxdev = _kernels.exit_blocks_pass1(gen, n, dt, T, side)
    S = np.concatenate(([0.0], np.cumsum(side[1:]))).astype(np.float64)
    gen2 = make_stream(key)
    sup = _kernels.exit_blocks_pass2(gen2, n, dt, S)
    return CouplingStats(n=n, dim=1, dt=dt, sup_distance=float(sup),
                         max_time_deviation=float(maxdev))


def sup_samples_1d(key: StreamKey, n: int, dt: float, samples: int,
                   threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """iid (sup distance, max time deviation) replicates, one child
    stream per replicate so scheduling cannot change the values."""
    sups = np.empty(samples)
    devs = np.empty(samples)

    def one(i):
        st = sup_stats_1d(key.child(i), n, dt)
        sups[i] = st.sup_distance
        devs[i] = st.max_time_deviation

    if threads <= 1:
        for i in range(samples):
            one(i)
    else:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(one, range(samples)))
    return sups, devs


def max_time_deviation_sample(key: StreamKey, n: int, dt: float, samples: int) -> np.ndarray:
    """iid copies of max_k |T_k - k| for an n-step embedding."""
    out = np.empty(samples)
    T = np.empty(n + 1)
    side = np.empty(n + 1, dtype=np.int64)
    for i in range(samples):
        gen = make_stream(key.child(i))
        out[i] = _kernels.exit_blocks_pass1(gen, n, dt, T, side)
    return out


def tail_curve(sups: np.ndarray, n: int, g_grid) -> list[dict]:
    """Exceedance rows P(sup >= n^{1/4} g) for each g, with Wilson CIs."""
    sups = np.asarray(sups, dtype=np.float64)
    total = len(sups)
    rows = []
    for g in g_grid:
        hits = int((sups >= n**0.25 * g).sum())
        p = hits / total
        lo, hi = wilson_interval(hits, total)
        rows.append({"n": n, "g": float(g), "count": hits, "freq": p,
                     "ci_lo": lo, "ci_hi": hi})
    return rows
