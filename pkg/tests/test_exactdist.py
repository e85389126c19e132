"""Exact walk distributions against brute-force enumeration oracles.

The 2D oracle enumerates all 4^n step sequences (n <= 8) and counts
endpoints exactly; the 1D oracle is the closed binomial mass computed in
exact rational arithmetic.  Every table queried here must reproduce
those counts.
"""
import math
from fractions import Fraction

import numpy as np
import pytest

from planarwalk.exactdist import (
    exact_pmf_1d,
    exact_pmf_2d,
    lclt_error_profile,
    lclt_phi,
    lclt_upper_ratio,
    tail_prob,
)
from planarwalk.rng import STEPS_2D


def enumerate_endpoints_2d(n: int) -> dict[tuple[int, int], int]:
    """Exact endpoint counts over all 4^n step sequences."""
    seqs = np.arange(4**n, dtype=np.int64)
    pos = np.zeros((len(seqs), 2), dtype=np.int64)
    digits = seqs.copy()
    for _ in range(n):
        pos += STEPS_2D[digits % 4]
        digits //= 4
    uniq, cnt = np.unique(pos, axis=0, return_counts=True)
    return {(int(x), int(y)): int(c) for (x, y), c in zip(uniq, cnt)}


@pytest.mark.parametrize("n", [0, 1, 2, 3, 5, 8])
def test_2d_masses_match_full_enumeration(n):
    pmf = exact_pmf_2d(n)
    counts = enumerate_endpoints_2d(n)
    denom = 4**n
    # every reachable endpoint has the exact rational mass
    for (x, y), c in counts.items():
        expected = Fraction(c, denom)
        assert pmf.mass((x, y)) == pytest.approx(float(expected), rel=1e-13)
    # unreachable / wrong-parity points carry zero
    assert pmf.mass((n + 1, 0)) == 0.0
    assert pmf.mass((n + 2, 0)) == 0.0
    if n >= 1:
        assert pmf.mass((0, 0)) == (0.0 if n % 2 else pytest.approx(counts[(0, 0)] / denom, rel=1e-13))
    # total masses and the exact mean-square identity E|S(n)|^2 = n
    assert pmf.total() == pytest.approx(1.0, rel=1e-12)
    m2 = sum(Fraction(c, denom) * (x * x + y * y) for (x, y), c in counts.items())
    assert m2 == n
    assert pmf.second_moment() == pytest.approx(n, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 10, 51, 200])
def test_1d_masses_are_exact_binomials(n):
    pmf = exact_pmf_1d(n)
    for j in range(-n, n + 1, 2):
        expected = Fraction(math.comb(n, (n + j) // 2), 2**n)
        assert pmf.mass(j) == pytest.approx(float(expected), rel=1e-12)
    assert pmf.mass(n + 1) == 0.0
    assert pmf.mass(n + 2) == 0.0
    assert pmf.total() == pytest.approx(1.0, rel=1e-12)
    assert pmf.second_moment() == pytest.approx(n, rel=1e-12, abs=1e-12)


def test_support_and_mass_vectors_align():
    pmf = exact_pmf_1d(6)
    assert pmf.support_1d.tolist() == [-6, -4, -2, 0, 2, 4, 6]
    assert pmf.masses_1d.sum() == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("n", [2, 5, 12])
@pytest.mark.parametrize("threshold", [0.0, 0.5, 1.0, 1.5, 2.0, 2.2, 3.0])
def test_2d_tail_matches_dense_grid(n, threshold):
    pmf = exact_pmf_2d(n)
    dense = pmf.dense_2d()
    xs = np.arange(-n, n + 1)
    xx, yy = np.meshgrid(xs, xs, indexing="ij")
    brute = dense[xx * xx + yy * yy >= threshold * threshold].sum()
    assert pmf.tail(threshold) == pytest.approx(brute, rel=1e-12, abs=1e-15)


def test_1d_tail_matches_direct_sum():
    pmf = exact_pmf_1d(9)
    for t in [0.0, 1.0, 2.5, 3.0, 9.0, 10.0]:
        brute = sum(pmf.mass(j) for j in range(-9, 10) if abs(j) >= t)
        assert pmf.tail(t) == pytest.approx(brute, rel=1e-14, abs=1e-18)


def test_tail_conventions_against_enumeration():
    # 4-step planar walk; enumerate all 256 paths
    counts = enumerate_endpoints_2d(4)
    pmf = exact_pmf_2d(4)
    # "double": table steps are 2n with n = 2, threshold r * sqrt(2)
    # threshold 2*sqrt(2): boundary points (+-2, +-2) attain it exactly and
    # must count.  Hand check: 4 paths to (+-4,0),(0,+-4) + 8*4 to the eight
    # (+-3,+-1)-type points + 4*6 to (+-2,+-2) = 60.
    hits_double = sum(c for (x, y), c in counts.items() if x * x + y * y >= 8)
    assert hits_double == 60
    assert tail_prob(pmf, 2.0, "double") == pytest.approx(60 / 256, rel=1e-12)
    # "single": threshold r * sqrt(4) = 4
    hits_single = sum(c for (x, y), c in counts.items() if x * x + y * y >= 16)
    assert tail_prob(pmf, 2.0, "single") == pytest.approx(hits_single / 256, rel=1e-12)
    with pytest.raises(ValueError):
        tail_prob(pmf, 2.0, "triple")
    with pytest.raises(ValueError):
        tail_prob(pmf, -1.0)


def test_dense_2d_guards():
    with pytest.raises(ValueError):
        exact_pmf_1d(4).dense_2d()
    with pytest.raises(ValueError):
        exact_pmf_2d(513).dense_2d()


# ------------------------------------------------------------ local limit

def test_phi_partial_series_terms():
    e = lclt_phi(100, 10, order=2)
    assert e.phi_partial == pytest.approx(100 / 100.0, rel=1e-14)  # k^2/n = 1
    e3 = lclt_phi(100, 10, order=3)
    # adds k^4 / (6 n^3)
    assert e3.phi_partial - e.phi_partial == pytest.approx(10**4 / (6 * 100**3), rel=1e-12)
    assert e.approx_prob == pytest.approx(np.sqrt(1 / (np.pi * 100)) * np.exp(-1.0), rel=1e-13)


def test_phi_validation():
    with pytest.raises(ValueError):
        lclt_phi(0, 0)
    with pytest.raises(ValueError):
        lclt_phi(10, 11)
    with pytest.raises(ValueError):
        lclt_phi(10, 1, order=1)


def test_error_profile_exact_column_is_binomial():
    n, kmax = 12, 5
    rows, extreme = lclt_error_profile(n, kmax)
    assert [r[0] for r in rows] == list(range(-kmax, kmax + 1))
    for k, exact, approx, rel in rows:
        frac = Fraction(math.comb(2 * n, n + k), 4**n)
        assert exact == pytest.approx(float(frac), rel=1e-12)
        assert rel == pytest.approx(abs(approx - exact) / exact, rel=1e-12)
    assert extreme == pytest.approx(0.25**n, rel=1e-14)


def test_error_profile_clamps_to_support():
    rows, _ = lclt_error_profile(5, 100)
    assert rows[0][0] == -4 and rows[-1][0] == 4


def test_error_profile_central_error_scale():
    # relative error at k = 0 is ~ 1/(8n) for the order-2 truncation
    for n in (50, 200, 800):
        rows, _ = lclt_error_profile(n, 0)
        (_, exact, approx, rel), = rows
        assert rel == pytest.approx(1 / (8 * n), rel=0.15)


def test_upper_ratio_constant_is_attained_at_the_smallest_time():
    k_val, n_at, k_at = lclt_upper_ratio(5)
    # P(S(2)=2) sqrt(1) e^{1} = e/4, attained at n=1, |k|=1
    assert k_val == pytest.approx(np.e / 4, rel=1e-12)
    assert n_at == 1 and abs(k_at) == 1
    k50, _, _ = lclt_upper_ratio(50)
    assert k50 == pytest.approx(k_val, rel=1e-12)  # later times never exceed it
    with pytest.raises(ValueError):
        lclt_upper_ratio(0)
