"""Escape probabilities: closed forms, projections, and MC vs an exact
absorbing-chain oracle."""
import numpy as np
import pytest

from planarwalk import _kernels
from planarwalk.beurling import (
    DiscreteObstacle,
    cauchy_exit_prob,
    circular_projection,
    fit_exponent,
    half_line,
    mc_bm_slit,
    mc_walk_beurling,
    slit_disk_exit_exact,
    walk_escape_prob,
)
from planarwalk.rng import StreamKey, make_stream


def escape_prob_exact(start, radius, obstacle) -> float:
    """Absorbing-chain solve of the walk escape probability.

    Mirrors the simulation semantics exactly: after each step the
    obstacle is checked first (landing on it loses), then strict
    |S| > radius wins; all interior non-obstacle points are transient.
    """
    r_int = int(np.floor(radius))
    states = [(x, y)
              for x in range(-r_int, r_int + 1)
              for y in range(-r_int, r_int + 1)
              if x * x + y * y <= radius * radius and (x, y) not in obstacle.points]
    index = {s: i for i, s in enumerate(states)}
    m = len(states)
    q = np.zeros((m, m))
    win = np.zeros(m)
    for (x, y), i in index.items():
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            w = (x + dx, y + dy)
            if w in obstacle.points:
                continue  # absorbed, no escape
            if w[0] ** 2 + w[1] ** 2 > radius * radius:
                win[i] += 0.25
            else:
                q[i, index[w]] += 0.25
    h = np.linalg.solve(np.eye(m) - q, win)
    return float(h[index[tuple(start)]])


# ------------------------------------------------------------ closed forms

def test_slit_disk_exact_reference_values():
    assert slit_disk_exit_exact(0.25) == pytest.approx(0.590334470601733, abs=1e-12)
    assert slit_disk_exit_exact(0.04) == pytest.approx(0.251331832756005, abs=1e-12)
    assert slit_disk_exit_exact(0.01) == pytest.approx(0.126902069722214, abs=1e-12)


def test_slit_disk_exact_shape():
    eps = np.linspace(0.01, 0.9, 30)
    vals = np.array([slit_disk_exit_exact(e) for e in eps])
    assert np.all(np.diff(vals) > 0)  # monotone in the start offset
    # small-eps law: p ~ (4/pi) sqrt(eps)
    for e in (1e-6, 1e-8):
        assert slit_disk_exit_exact(e) == pytest.approx(4 / np.pi * np.sqrt(e), rel=1e-3)
    with pytest.raises(ValueError):
        slit_disk_exit_exact(0.0)
    with pytest.raises(ValueError):
        slit_disk_exit_exact(1.0)


def test_cauchy_exit_prob_is_a_probability_measure():
    # the full line carries mass one, halves split it evenly
    assert cauchy_exit_prob(2.0, -1e12, 1e12) == pytest.approx(1.0, abs=1e-9)
    assert cauchy_exit_prob(3.0, 0.0, 1e12) == pytest.approx(0.5, abs=1e-9)
    # additivity over a partition
    parts = [(-np.inf, -2.0), (-2.0, 1.0), (1.0, np.inf)]
    total = sum(cauchy_exit_prob(1.5, a, b) for a, b in parts)
    assert total == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        cauchy_exit_prob(-1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        cauchy_exit_prob(1.0, 2.0, 1.0)


def test_circular_projection_radii():
    pts = [(3, 4), (-3, -4), (0, 2), (1, 1)]
    radii = circular_projection(pts)
    assert radii.tolist() == pytest.approx([np.sqrt(2), 2.0, 5.0])


# ---------------------------------------------------------------- obstacle

def test_half_line_membership():
    obs = half_line(5)
    assert obs.points == frozenset((k, 0) for k in range(6))
    assert obs.contains_origin
    assert obs.sup_radius == 5.0
    assert obs.is_member_AR(5.0) and not obs.is_member_AR(5.5)
    with pytest.raises(ValueError):
        half_line(-1)


def test_mc_walk_beurling_enforces_admissibility():
    with pytest.raises(ValueError):
        mc_walk_beurling((-1, 0), 8.0, half_line(4), 10, StreamKey(0))
    with pytest.raises(ValueError):
        walk_escape_prob((2, 0), 8.0, half_line(4), 10, StreamKey(0))


# ------------------------------------------------ MC vs exact chain oracle

def test_walk_escape_matches_chain_oracle_halfline():
    radius, obs = 6.0, half_line(6)
    exact = escape_prob_exact((-1, 0), radius, obs)
    est = walk_escape_prob((-1, 0), radius, obs, 40000, StreamKey(17))
    assert abs(est.p_hat - exact) <= 3.5 * np.sqrt(exact * (1 - exact) / 40000)


def test_walk_escape_matches_chain_oracle_general_set():
    # an L-shaped obstacle forces the general sorted-key kernel
    pts = frozenset({(k, 0) for k in range(5)} | {(4, 1), (4, 2)})
    obs = DiscreteObstacle(points=pts)
    radius = 5.0
    exact = escape_prob_exact((-1, 0), radius, obs)
    est = walk_escape_prob((-1, 0), radius, obs, 40000, StreamKey(19))
    assert abs(est.p_hat - exact) <= 3.5 * np.sqrt(exact * (1 - exact) / 40000)


def test_halfline_and_general_kernels_agree_pathwise():
    # same obstacle, same stream: the specialized and generic kernels
    # must count exactly the same escapes
    obs = half_line(7)
    keys = obs.sorted_keys()
    gen1 = make_stream(StreamKey(23))
    gen2 = make_stream(StreamKey(23))
    a = _kernels.walk_halfline_escape(gen1, 2000, -1, 0, 49.0, 7)
    b = _kernels.walk_obstacle_escape(gen2, 2000, -1, 0, 49.0, keys)
    assert a == b


def test_walk_escape_rejects_start_on_obstacle():
    with pytest.raises(ValueError):
        walk_escape_prob((2, 0), 8.0, DiscreteObstacle(frozenset({(2, 0)})), 10, StreamKey(0))


def test_threading_does_not_change_counts():
    obs = half_line(4)
    a = walk_escape_prob((-1, 0), 4.0, obs, 9999, StreamKey(29), threads=1)
    b = walk_escape_prob((-1, 0), 4.0, obs, 9999, StreamKey(29), threads=4)
    assert a.successes == b.successes


# ------------------------------------------------------------------ BM MC

def test_bm_slit_mc_tracks_the_closed_form():
    eps = 0.25
    est = mc_bm_slit(eps, dt=1e-4, samples=4000, key=StreamKey(31))
    exact = slit_disk_exit_exact(eps)
    sigma = np.sqrt(exact * (1 - exact) / 4000)
    # coarse dt biases upward a little; allow 3.5 sigma + a dt allowance
    assert abs(est.p_hat - exact) <= 3.5 * sigma + 0.02


def test_mc_argument_validation():
    with pytest.raises(ValueError):
        mc_bm_slit(0.0, 1e-4, 10, StreamKey(0))
    with pytest.raises(ValueError):
        mc_bm_slit(0.25, -1.0, 10, StreamKey(0))
    with pytest.raises(ValueError):
        mc_bm_slit(0.25, 1e-4, 0, StreamKey(0))


# ---------------------------------------------------------------- fitting

def test_fit_exponent_recovers_a_power_law():
    pairs = [(1 / r, 2.3 * (1 / r) ** 0.5) for r in (16, 32, 64, 128)]
    slope, stderr, excluded = fit_exponent(pairs)
    assert slope == pytest.approx(0.5, abs=1e-12)
    assert stderr == pytest.approx(0.0, abs=1e-10)
    assert excluded == 0


def test_fit_exponent_drops_nonpositive_probabilities():
    pairs = [(1 / 16, 0.25), (1 / 32, 0.17), (1 / 64, 0.12), (1 / 128, 0.0)]
    slope, _, excluded = fit_exponent(pairs)
    assert excluded == 1
    assert np.isfinite(slope)
    with pytest.raises(ValueError):
        fit_exponent([(0.1, 0.0), (0.2, 0.0), (0.3, 0.1)])
