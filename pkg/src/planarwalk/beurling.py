"""Escape probabilities past obstacles: exact slit-disk law and Monte
Carlo for both Brownian motion and the lattice walk.

The slit-disk probability has a closed form through the conformal chain
sqrt(z) -> -1/z -> z + 1/z, which sends the slit disk to a half-plane
where the exit law is Cauchy.  Monte Carlo detects slit hits by segment
crossing (the continuous event is crossing, not landing near), and the
walk escape uses strict |S| > R.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .experiments import TailEstimate, from_counts, run_sharded, slope_fit
from .rng import StreamKey, make_stream

__all__ = [
    "DiscreteObstacle",
    "half_line",
    "circular_projection",
    "cauchy_exit_prob",
    "slit_disk_exit_exact",
    "mc_bm_slit",
    "mc_walk_beurling",
    "walk_escape_prob",
    "fit_exponent",
]

N_SHARDS = 16
_KEY_BASE = 2**31


@dataclass(frozen=True)
class DiscreteObstacle:
    """A set of lattice points the walk must avoid."""

    points: frozenset

    def __post_init__(self):
        pts = frozenset((int(p[0]), int(p[1])) for p in self.points)
        object.__setattr__(self, "points", pts)

    @property
    def contains_origin(self) -> bool:
        return (0, 0) in self.points

    @property
    def sup_radius(self) -> float:
        return max(np.hypot(x, y) for x, y in self.points) if self.points else 0.0

    def is_member_AR(self, radius: float) -> bool:
        """Admissible for the escape-to-radius problem: holds the origin
        and reaches out to the escape radius."""
        return self.contains_origin and self.sup_radius >= radius

    def sorted_keys(self) -> np.ndarray:
        keys = np.array([x * _KEY_BASE + y for x, y in self.points], dtype=np.int64)
        keys.sort()
        return keys


def half_line(length: int) -> DiscreteObstacle:
    """The canonical obstacle {(k, 0) : 0 <= k <= length}."""
    if length < 0:
        raise ValueError("length must be nonnegative")
    return DiscreteObstacle(points=frozenset((k, 0) for k in range(length + 1)))


def circular_projection(points) -> np.ndarray:
    """gamma(E) = {|z| : z in E}, as a sorted array of distinct radii."""
    radii = sorted({float(np.hypot(p[0], p[1])) for p in points})
    return np.array(radii)


def cauchy_exit_prob(y: float, a: float, b: float) -> float:
    """P(B exits the upper half-plane from iy through [a, b])."""
    if y <= 0:
        raise ValueError("height must be positive")
    if a > b:
        raise ValueError("interval reversed")
    return float((np.arctan(b / y) - np.arctan(a / y)) / np.pi)


def slit_disk_exit_exact(eps: float) -> float:
    """P(BM from -eps reaches the unit circle before the slit [0, 1)).

    Equals the Cauchy exit probability of [-2, 2] from height
    1/sqrt(eps) - sqrt(eps), which simplifies to
    (2/pi) arctan(2 sqrt(eps) / (1 - eps)).
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return float(2.0 / np.pi * np.arctan(2.0 * np.sqrt(eps) / (1.0 - eps)))


def _shard_counts(samples: int) -> list[int]:
    base, extra = divmod(samples, N_SHARDS)
    return [base + (1 if i < extra else 0) for i in range(N_SHARDS)]


def mc_bm_slit(eps: float, dt: float, samples: int, key: StreamKey,
               threads: int = 1) -> TailEstimate:
    """MC estimate of the slit-disk escape probability from (-eps, 0)."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if dt <= 0:
        raise ValueError("dt must be positive")
    escaped = np.zeros(N_SHARDS, dtype=np.int64)

    def worker(i, cnt):
        gen = make_stream(key.child(i))
        escaped[i] = _kernels.slit_disk_escape(gen, cnt, eps, dt)

    run_sharded(_shard_counts(samples), worker, threads)
    return from_counts(int(escaped.sum()), samples)


def walk_escape_prob(start, radius: float, obstacle: DiscreteObstacle,
                     samples: int, key: StreamKey, threads: int = 1) -> TailEstimate:
    """Fraction of walks from `start` with |S| > radius before the obstacle."""
    x0, y0 = int(start[0]), int(start[1])
    if (x0, y0) in obstacle.points:
        raise ValueError("start lies inside the obstacle")
    r2 = float(radius) * float(radius)
    on_axis = all(y == 0 and 0 <= x for (x, y) in obstacle.points)
    slit_len = int(max((x for x, _ in obstacle.points), default=-1))
    contiguous = on_axis and len(obstacle.points) == slit_len + 1 and obstacle.contains_origin
    keys = obstacle.sorted_keys()
    escaped = np.zeros(N_SHARDS, dtype=np.int64)

    def worker(i, cnt):
        gen = make_stream(key.child(i))
        if contiguous:
            escaped[i] = _kernels.walk_halfline_escape(gen, cnt, x0, y0, r2, slit_len)
        else:
            escaped[i] = _kernels.walk_obstacle_escape(gen, cnt, x0, y0, r2, keys)

    run_sharded(_shard_counts(samples), worker, threads)
    return from_counts(int(escaped.sum()), samples)


def mc_walk_beurling(start, radius: float, obstacle: DiscreteObstacle,
                     samples: int, key: StreamKey, threads: int = 1) -> TailEstimate:
    """Walk escape estimate with the admissibility check enforced."""
    if not obstacle.is_member_AR(radius):
        raise ValueError("obstacle must contain the origin and reach the escape radius")
    return walk_escape_prob(start, radius, obstacle, samples, key, threads=threads)


def fit_exponent(pairs) -> tuple[float, float, int]:
    """Least-squares slope of log p against log ratio.

    Returns (slope, stderr, excluded) where excluded counts nonpositive
    probabilities dropped from the fit.
    """
    kept = [(r, p) for r, p in pairs if p > 0]
    excluded = len(list(pairs)) - len(kept)
    if len(kept) < 3:
        raise ValueError("need at least 3 positive-probability pairs")
    xs = np.log([r for r, _ in kept])
    ys = np.log([p for _, p in kept])
    slope, _, stderr, _ = slope_fit(xs, ys)
    return slope, stderr, excluded
