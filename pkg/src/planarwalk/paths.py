"""Lattice walks and Brownian paths.

Simple random walk paths on Z and Z^2 with the linear-interpolation
convention S(t) = S([t]) + (t-[t])(S([t]+1) - S([t])), the diagonal
decomposition of a planar walk into two independent one-dimensional
walks, and grid Brownian (Wiener) paths.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np

__all__ = [
    "LatticePath1D",
    "LatticePath2D",
    "DiagonalPair",
    "WienerPath",
    "gen_walk",
    "interpolate",
    "decompose",
    "compose",
    "gen_wiener",
    "sup_norm",
]


@dataclass(frozen=True)
class LatticePath1D:
    """A +-1 step walk started at the origin."""

    steps: np.ndarray  # shape (n,), entries in {-1, +1}

    def __post_init__(self) -> None:
        steps = np.asarray(self.steps, dtype=np.int64)
        if steps.ndim != 1:
            raise ValueError("steps must be one-dimensional")
        if steps.size and not np.all(np.abs(steps) == 1):
            raise ValueError("1D walk steps must be +-1")
        object.__setattr__(self, "steps", steps)

    @property
    def n(self) -> int:
        return int(self.steps.size)

    @cached_property
    def positions(self) -> np.ndarray:
        """Positions at integer times 0..n (positions[0] = 0)."""
        out = np.empty(self.n + 1, dtype=np.int64)
        out[0] = 0
        np.cumsum(self.steps, out=out[1:])
        return out


@dataclass(frozen=True)
class LatticePath2D:
    """A planar walk with unit steps (+-e1, +-e2), started at the origin."""

    steps: np.ndarray  # shape (n, 2)

    def __post_init__(self) -> None:
        steps = np.asarray(self.steps, dtype=np.int64)
        if steps.ndim != 2 or steps.shape[1] != 2:
            raise ValueError("steps must have shape (n, 2)")
        if steps.size and not np.all(np.abs(steps).sum(axis=1) == 1):
            raise ValueError("2D walk steps must be unit lattice steps")
        object.__setattr__(self, "steps", steps)

    @property
    def n(self) -> int:
        return int(self.steps.shape[0])

    @cached_property
    def positions(self) -> np.ndarray:
        """Positions at integer times 0..n, shape (n+1, 2)."""
        out = np.empty((self.n + 1, 2), dtype=np.int64)
        out[0] = 0
        np.cumsum(self.steps, axis=0, out=out[1:])
        return out


@dataclass(frozen=True)
class DiagonalPair:
    """The two diagonal components of a planar walk.

    comp1 tracks x+y and comp2 tracks y-x; each is itself a simple random
    walk, and the pair determines the planar walk exactly (see
    :func:`decompose` / :func:`compose`).
    """

    comp1: LatticePath1D
    comp2: LatticePath1D

    def __post_init__(self) -> None:
        if self.comp1.n != self.comp2.n:
            raise ValueError("components must have equal length")

    @property
    def n(self) -> int:
        return self.comp1.n


@dataclass(frozen=True)
class WienerPath:
    """Brownian path sampled on a uniform grid with linear interpolation."""

    dt: float
    values: np.ndarray  # shape (m+1,) in 1D, (m+1, 2) in 2D; values[0] = 0

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return 1 if self.values.ndim == 1 else 2

    @property
    def horizon(self) -> float:
        return (len(self.values) - 1) * self.dt

    def evaluate(self, t: float):
        """Value at time t (linear interpolation between grid points)."""
        if t < 0 or t > self.horizon * (1 + 1e-12):
            raise ValueError(f"t={t} outside [0, {self.horizon}]")
        x = t / self.dt
        i = min(int(x), len(self.values) - 2) if len(self.values) > 1 else 0
        frac = x - i
        return self.values[i] + frac * (self.values[i + 1] - self.values[i])


def gen_walk(gen: np.random.Generator, n: int, dim: int = 1):
    """Generate an n-step simple random walk (dim 1 or 2)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if dim == 1:
        steps = 2 * gen.integers(0, 2, size=n) - 1
        return LatticePath1D(steps)
    if dim == 2:
        from .rng import STEPS_2D

        steps = STEPS_2D[gen.integers(0, 4, size=n)]
        return LatticePath2D(steps)
    raise ValueError("dim must be 1 or 2")


def interpolate(path, t):
    """Walk value at real time t: S([t]) + (t-[t])(S([t]+1) - S([t]))."""
    pos = path.positions
    n = path.n
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < 0) or np.any(t_arr > n):
        raise ValueError(f"time outside [0, {n}]")
    i = np.minimum(t_arr.astype(np.int64), max(n - 1, 0))
    frac = t_arr - i
    if pos.ndim == 1:
        out = pos[i] + frac * (pos[i + 1] - pos[i]) if n > 0 else np.zeros_like(t_arr)
    else:
        frac = frac[..., None]
        out = pos[i] + frac * (pos[i + 1] - pos[i]) if n > 0 else np.zeros(t_arr.shape + (2,))
    return out if isinstance(t, np.ndarray) else (out if out.ndim else float(out))


def decompose(path: LatticePath2D) -> DiagonalPair:
    """Split a planar walk into its two diagonal 1D walks.

    Component steps are c1 = sx + sy and c2 = sy - sx, so a planar step
    (1,0) maps to (+1, -1).  Exact inverse of :func:`compose`.
    """
    sx = path.steps[:, 0]
    sy = path.steps[:, 1]
    return DiagonalPair(LatticePath1D(sx + sy), LatticePath1D(sy - sx))


def compose(pair: DiagonalPair) -> LatticePath2D:
    """Rebuild the planar walk from its diagonal components (exact)."""
    c1 = pair.comp1.steps
    c2 = pair.comp2.steps
    if c1.size != c2.size:
        raise ValueError("components must have equal length")
    sx = (c1 - c2) // 2
    sy = (c1 + c2) // 2
    return LatticePath2D(np.stack([sx, sy], axis=1))


def gen_wiener(gen: np.random.Generator, horizon: float, dt: float, dim: int = 1) -> WienerPath:
    """Brownian path on [0, horizon] with grid spacing dt.

    Increments are i.i.d. Gaussian with variance dt per coordinate;
    values has ceil(horizon/dt)+1 grid points starting at the origin.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if horizon < dt:
        raise ValueError("horizon must be at least dt")
    m = math.ceil(horizon / dt - 1e-12)
    shape = (m,) if dim == 1 else (m, dim)
    inc = gen.standard_normal(shape) * math.sqrt(dt)
    values = np.zeros((m + 1,) + shape[1:])
    np.cumsum(inc, axis=0, out=values[1:])
    return WienerPath(dt, values)


def sup_norm(path, window: tuple[float, float] | None = None) -> float:
    """Max of |position| over grid times in the window (plus its endpoints).

    For lattice paths the grid is integer times and the grid max equals
    the max over all interpolated times; for Wiener paths the grid max
    understates the continuous sup (one-sided discretization bias).
    """
    if isinstance(path, WienerPath):
        horizon, grid_dt = path.horizon, path.dt
        values = path.values
    else:
        horizon, grid_dt = float(path.n), 1.0
        values = path.positions
    t0, t1 = (0.0, horizon) if window is None else window
    if not (0 <= t0 <= t1 <= horizon * (1 + 1e-12) + 1e-12):
        raise ValueError(f"bad window [{t0}, {t1}] for horizon {horizon}")
    i0 = math.ceil(t0 / grid_dt - 1e-9)
    i1 = math.floor(t1 / grid_dt + 1e-9)
    norms = []
    if i1 >= i0:
        seg = values[i0 : i1 + 1]
        norms.append(np.abs(seg).max() if seg.ndim == 1 else np.sqrt((seg**2).sum(axis=1)).max())
    for t in (t0, t1):
        if isinstance(path, WienerPath):
            v = path.evaluate(min(t, horizon))
        else:
            v = interpolate(path, min(t, horizon))
        norms.append(float(np.linalg.norm(v)))
    return float(max(norms))
