"""Exact finite-time walk distributions and the local limit expansion.

Masses are binomials computed in log space (log-gamma), so tables stay
accurate up to n in the thousands.  Planar tables are kept in product
form over the diagonal coordinates u = x+y, v = y-x -- two independent
1D walks -- and tail queries stream over that structure instead of
materializing an O(n^2) grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "PmfTable",
    "LcltExpansion",
    "exact_pmf_1d",
    "exact_pmf_2d",
    "lclt_phi",
    "lclt_error_profile",
    "lclt_upper_ratio",
    "tail_prob",
]

_DENSE_2D_LIMIT = 512


def _fuzz_ceil(x: float) -> int:
    """Smallest integer >= x after collapsing float rounding fuzz.

    A relative 1e-9 slack absorbs the ulp-level error of squared
    thresholds without ever bridging the unit gap between consecutive
    integers at the magnitudes the tables support.
    """
    return math.ceil(x - 1e-9 * max(1.0, abs(x)))


def _log_binom_masses(n: int) -> np.ndarray:
    """log P(S(n) = j) over the support j = -n, -n+2, ..., n."""
    k = np.arange(n + 1, dtype=np.float64)  # number of +1 steps; j = 2k - n
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1) - n * np.log(2.0)


@dataclass(frozen=True)
class PmfTable:
    """Distribution of an n-step walk (dim 1 or 2).

    For dim=2 only the 1D diagonal factor is stored; point masses are
    products P1(x+y) * P1(y-x) and tails are accumulated by streaming
    over one diagonal coordinate.
    """

    n: int
    dim: int
    log_factor: np.ndarray  # log 1D masses over j = -n..n step 2

    @property
    def support_1d(self) -> np.ndarray:
        return np.arange(-self.n, self.n + 1, 2, dtype=np.int64)

    @property
    def masses_1d(self) -> np.ndarray:
        return np.exp(self.log_factor)

    def mass(self, point) -> float:
        """Exact mass at an integer position (scalar in 1D, pair in 2D)."""
        if self.dim == 1:
            j = int(point)
            if abs(j) > self.n or (j - self.n) % 2 != 0:
                return 0.0
            return float(np.exp(self.log_factor[(j + self.n) // 2]))
        x, y = int(point[0]), int(point[1])
        u, v = x + y, y - x
        if abs(u) > self.n or abs(v) > self.n or (u - self.n) % 2 != 0 or (v - self.n) % 2 != 0:
            return 0.0
        lu = self.log_factor[(u + self.n) // 2]
        lv = self.log_factor[(v + self.n) // 2]
        return float(np.exp(lu + lv))

    def total(self) -> float:
        t1 = float(np.exp(self.log_factor).sum())
        return t1 if self.dim == 1 else t1 * t1

    def second_moment(self) -> float:
        """E |S(n)|^2 (Euclidean norm in 2D)."""
        j = self.support_1d.astype(np.float64)
        m2 = float((j * j * np.exp(self.log_factor)).sum())
        # 2D: E(x^2+y^2) = E((u^2+v^2)/2) = m2 for independent equal factors
        return m2

    def tail(self, threshold: float) -> float:
        """P(|S(n)| >= threshold), Euclidean norm in 2D (exact sum).

        The event is resolved to the integer comparison |S|^2 >= m with
        m the smallest integer at or above threshold^2, so support
        points that attain the threshold exactly are counted even when
        the float square of the threshold overshoots by an ulp (e.g.
        threshold = r*sqrt(n/2) with integer true square).
        """
        if threshold <= 0:
            return self.total()
        p1 = np.exp(self.log_factor)
        j = self.support_1d
        if self.dim == 1:
            m = _fuzz_ceil(threshold * threshold)
            return float(p1[j * j >= m].sum())
        # |S|^2 = (u^2 + v^2)/2 : accumulate P(v^2 >= m - u^2) over u
        cum = np.cumsum(p1)  # P(u <= j) along the support
        m = _fuzz_ceil(2.0 * threshold * threshold)
        total = 0.0
        for i, u in enumerate(j):
            rem = m - int(u) * int(u)
            if rem <= 0:
                total += p1[i]
                continue
            s = math.isqrt(rem - 1) + 1  # smallest integer with s^2 >= rem
            hi = np.searchsorted(j, -s, side="right")  # v <= -s
            lo = np.searchsorted(j, s, side="left")  # v >= s
            left = cum[hi - 1] if hi > 0 else 0.0
            right = cum[-1] - (cum[lo - 1] if lo > 0 else 0.0)
            total += p1[i] * (left + right)
        return float(total)

    def dense_2d(self) -> np.ndarray:
        """Dense grid of 2D masses indexed by (x+n, y+n); n <= 512 only."""
        if self.dim != 2:
            raise ValueError("dense_2d is for 2D tables")
        if self.n > _DENSE_2D_LIMIT:
            raise ValueError(f"dense 2D table refused for n > {_DENSE_2D_LIMIT}")
        n = self.n
        out = np.zeros((2 * n + 1, 2 * n + 1))
        p1 = np.exp(self.log_factor)
        for iu, u in enumerate(self.support_1d):
            for iv, v in enumerate(self.support_1d):
                x = (u - v) // 2
                y = (u + v) // 2
                out[x + n, y + n] = p1[iu] * p1[iv]
        return out


def exact_pmf_1d(n: int) -> PmfTable:
    """Exact pmf of the n-step 1D walk."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return PmfTable(n=n, dim=1, log_factor=_log_binom_masses(n))


def exact_pmf_2d(n: int) -> PmfTable:
    """Exact pmf of the n-step planar walk, in diagonal product form."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return PmfTable(n=n, dim=2, log_factor=_log_binom_masses(n))


@dataclass(frozen=True)
class LcltExpansion:
    """Truncated exponent series and the matching pointwise approximation.

    phi_partial = sum_{l=1}^{order-1} k^{2l} / (l (2l-1) n^{2l-1});
    approx_prob = sqrt(1/(pi n)) * exp(-phi_partial), approximating
    P(S(2n) = 2k).
    """

    n: int
    k: int
    order: int
    phi_partial: float
    approx_prob: float


def lclt_phi(n: int, k: int, order: int = 2) -> LcltExpansion:
    """Partial exponent series through l = order-1 and its approximation."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if abs(k) > n:
        raise ValueError(f"|k| = {abs(k)} exceeds n = {n}")
    if order < 2:
        raise ValueError("order must be >= 2")
    rho2 = (k / n) ** 2
    phi = 0.0
    power = rho2  # rho^(2l)
    for l in range(1, order):
        phi += n * power / (l * (2 * l - 1))
        power *= rho2
    approx = np.sqrt(1.0 / (np.pi * n)) * np.exp(-phi)
    return LcltExpansion(n=n, k=k, order=order, phi_partial=phi, approx_prob=float(approx))


def _log_exact_2n(n: int, ks: np.ndarray) -> np.ndarray:
    """log P(S(2n) = 2k) for an array of k."""
    kk = np.asarray(ks, dtype=np.float64)
    return (
        gammaln(2 * n + 1)
        - gammaln(n + kk + 1)
        - gammaln(n - kk + 1)
        - 2 * n * np.log(2.0)
    )


def lclt_error_profile(n: int, k_max: int, order: int = 2):
    """Relative error of the truncated approximation against the exact pmf.

    Returns (rows, extreme_mass): rows of (k, exact, approx, rel_error)
    for |k| <= min(k_max, n-1), and the exact extreme mass
    P(S(2n) = 2n) = 4^{-n} which the expansion does not cover.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    kmax = min(int(k_max), n - 1)
    ks = np.arange(-kmax, kmax + 1)
    exact = np.exp(_log_exact_2n(n, ks))
    rows = []
    for k, ex in zip(ks, exact):
        ap = lclt_phi(n, int(k), order).approx_prob
        rows.append((int(k), float(ex), float(ap), abs(ap - ex) / ex))
    extreme_mass = float(np.exp(-2 * n * np.log(2.0)))
    return rows, extreme_mass


def lclt_upper_ratio(n_max: int):
    """Empirical constant for the pointwise upper bound.

    Maximizes P(S(2n)=2k) * sqrt(n) * exp(k^2/n) over 1 <= n <= n_max and
    |k| <= n, in log space.  Returns (K, n_at, k_at).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    best = -np.inf
    best_at = (0, 0)
    for n in range(1, n_max + 1):
        ks = np.arange(-n, n + 1)
        log_ratio = _log_exact_2n(n, ks) + 0.5 * np.log(n) + ks.astype(np.float64) ** 2 / n
        i = int(np.argmax(log_ratio))
        if log_ratio[i] > best:
            best = float(log_ratio[i])
            best_at = (n, int(ks[i]))
    return float(np.exp(best)), best_at[0], best_at[1]


def tail_prob(pmf: PmfTable, r: float, time_convention: str = "double") -> float:
    """Exact P(|S| >= r * sqrt(n)) for the table's walk.

    time_convention "double" reads the table's step count as 2n and
    thresholds at r*sqrt(n) (the large-deviation statement convention);
    "single" thresholds at r*sqrt(table steps).
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    if time_convention == "double":
        threshold = r * np.sqrt(pmf.n / 2.0)
    elif time_convention == "single":
        threshold = r * np.sqrt(float(pmf.n))
    else:
        raise ValueError(f"unknown time convention {time_convention!r}")
    return pmf.tail(threshold)
