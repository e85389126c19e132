"""Named verification suites behind the `check` CLI subcommand.

Each suite turns one statement into a pass/fail run at its documented
scale, emitting a uniform row schema: item, parameter, lhs (measured),
rhs (reference or bound), ratio, Wilson bounds where the measurement is
Monte Carlo, and a per-row pass flag.  Statistical rows use the 3 sigma
policy; fitted constants land in the suite metadata.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import beurling as brl
from . import coupling as cpl
from . import dirichlet as dlt
from .exactdist import exact_pmf_2d
from .experiments import (
    check_bm_tails,
    check_reflection,
    check_rw_tails,
    bm_functionals,
    from_counts,
    slope_fit,
    small_ball_curve,
    wilson_interval,
)
from .rng import StreamKey, make_stream

SCHEMA = ["item", "parameter", "lhs", "rhs", "ratio", "ci_lo", "ci_hi", "passed"]

# Default Monte Carlo scale per suite (overridable via --samples).  The
# retry policy reruns a failed statistical suite once at 4x this scale
# with the documented second seed: noise-level failures pass, while a
# real bias near the 3 sigma threshold doubles its z-score and stays red.
DEFAULT_SAMPLES = {
    "3.2": 100_000,
    "3.3": 100_000,
    "3.4": 20_000,
    "3.9": None,
    "3.10": 100_000,
    "4.3": 100_000,
    "4.4": 100_000,
    "5.1": 100_000,
    "5.2": 100_000,
    "6.1": 10_000,
    "6.2": 20,
    "6.3": 5,
    "6.4": None,
    "6.5": None,
}


@dataclass
class SuiteResult:
    suite: str
    rows: list = field(default_factory=list)
    passed: bool = True
    meta: dict = field(default_factory=dict)

    def add(self, item, parameter, lhs, rhs, ok, ci=(0.0, 0.0), gate=True):
        """Record one row.  With gate=False the row's flag is reported but
        does not feed the suite verdict — for per-repeat diagnostics whose
        aggregate is judged by a separate policy row."""
        ratio = lhs / rhs if rhs else float("inf")
        self.rows.append({"item": item, "parameter": float(parameter),
                          "lhs": float(lhs), "rhs": float(rhs), "ratio": float(ratio),
                          "ci_lo": float(ci[0]), "ci_hi": float(ci[1]),
                          "passed": bool(ok)})
        if gate:
            self.passed = self.passed and bool(ok)


def suite_reflection(key: StreamKey, samples: int | None, threads: int = 1) -> SuiteResult:
    """Endpoint/sup bracket for the 1D walk and planar BM."""
    samples = samples or DEFAULT_SAMPLES["3.2"]
    res = SuiteResult("3.2", meta={"samples": samples, "bm_dt": 0.01})
    for item, check in (
        ("walk-n400", check_reflection("walk", 400, [20.0, 40.0], samples,
                                       key.child(1), threads=threads)),
        ("bm-n100", check_reflection("bm", 100, [10.0, 20.0], samples,
                                     key.child(2), dt=0.01, threads=threads)),
    ):
        for a, p_end, p_sup, twice_end in check.rows:
            res.add(item, a, p_sup, twice_end, check.passed)
        res.passed = res.passed and check.passed
    return res


def suite_bm_tails(key: StreamKey, samples: int | None, threads: int = 1) -> SuiteResult:
    """Planar BM endpoint tail against exp(-r^2/2), sup dominance."""
    samples = samples or DEFAULT_SAMPLES["3.3"]
    check = check_bm_tails(100.0, [0.5, 1.0, 2.0], samples, key, dt=0.01,
                           threads=threads)
    res = SuiteResult("3.3", meta={"samples": samples, "n": 100, "dt": 0.01,
                                   "fitted_sup_constant": check.fitted_constant})
    for r, p_end, exact, ratio, p_sup, lo, hi in check.rows:
        sigma0 = np.sqrt(exact * (1 - exact) / samples)
        covers = abs(p_end - exact) <= 3 * sigma0
        res.add("endpoint", r, p_end, exact, covers, ci=(lo, hi))
        res.add("sup-dominates", r, p_sup, p_end, p_sup >= p_end * 0.999 - 1e-12)
    res.passed = res.passed and check.passed
    return res


def suite_small_ball(key: StreamKey, samples: int | None, threads: int = 1) -> SuiteResult:
    """log P(sup |B| <= sqrt(n)/r) linear in r^2 with negative slope."""
    particles = samples or DEFAULT_SAMPLES["3.4"]
    check = small_ball_curve(key, [2.0, 3.0, 4.0, 5.0], 10_000.0,
                             particles=particles, dt=1.0)
    slope = -check.fitted_constant
    res = SuiteResult("3.4", meta={"particles": particles, "n": 10000, "dt": 1.0})
    _, intercept, _, r2 = _refit(check)
    for r, log_p, p, sigma in check.rows:
        res.add("log-smallball", r * r, log_p, slope * r * r + intercept,
                np.isfinite(log_p))
    res.add("fit", 0.0, slope, r2, check.passed)
    res.passed = res.passed and check.passed
    res.meta["slope"] = slope
    res.meta["r2"] = r2
    return res


def _refit(check):
    xs = [r * r for r, log_p, _, _ in check.rows if np.isfinite(log_p)]
    ys = [log_p for _, log_p, _, _ in check.rows if np.isfinite(log_p)]
    return slope_fit(xs, ys)


def suite_rw_tails_2d(key: StreamKey, samples: int | None, threads: int = 1) -> SuiteResult:
    """Exact planar tails under K exp(-r^2/4) on a desk-scale grid."""
    check = check_rw_tails([10, 50, 100], [1.0, 2.0, 3.0])
    res = SuiteResult("3.9", meta={"fitted_K": check.fitted_constant})
    for n, r, t2, b2, ratio2, *_ in check.rows:
        res.add(f"tail-2d-n{n}", r, t2, b2, np.isfinite(ratio2))
    res.passed = res.passed and check.fitted_constant <= 10 and check.passed
    return res


def suite_rw_tails_stability(key: StreamKey, samples: int | None, threads: int = 1) -> SuiteResult:
    """Fitted tail constants on the full and halved grids, plus the
    mean-square identities for the walk (exact) and BM (MC)."""
    n_grid = [10, 20, 50, 100, 200, 500, 1000]
    r_grid = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]
    full = check_rw_tails(n_grid, r_grid)
    half = check_rw_tails(n_grid, r_grid, half=True)

    def constants(check):
        k2 = max(row[4] for row in check.rows)
        k1 = max(row[7] for row in check.rows)
        return k1, k2

    k1f, k2f = constants(full)
    k1h, k2h = constants(half)
    res = SuiteResult("3.10", meta={"K1_full": k1f, "K1_half": k1h,
                                    "K2_full": k2f, "K2_half": k2h})
    res.add("K-2d-stability", 0.0, k2h, k2f, abs(k2h / k2f - 1) <= 0.2)
    res.add("K-1d-stability", 0.0, k1h, k1f, abs(k1h / k1f - 1) <= 0.2)
    for n in [1, 2, 3, 7, 30, 100, 333, 1000]:
        m2 = exact_pmf_2d(n).second_moment()
        res.add("walk-meansq", n, m2, float(n), abs(m2 - n) <= 1e-9)
    samples = samples or DEFAULT_SAMPLES["3.10"]
    end, _ = bm_functionals(key, samples, 100.0, 1.0, dim=2, threads=threads)
    m2 = float((end ** 2).mean())
    se = float((end ** 2).std(ddof=1)) / np.sqrt(samples)
    res.add("bm-meansq", 100, m2, 200.0, abs(m2 - 200.0) <= 3 * se,
            ci=(m2 - 3 * se, m2 + 3 * se))
    res.meta["samples"] = samples
    return res


def suite_slit(key: StreamKey, samples: int | None, threads: int = 1) -> SuiteResult:
    """Slit-disk closed form against MC, and the exact small-eps slope."""
    samples = samples or DEFAULT_SAMPLES["4.3"]
    res = SuiteResult("4.3", meta={"samples": samples, "dt_rule": "1e-5*eps"})
    for i, eps in enumerate([0.25, 0.04, 0.01]):
        exact = brl.slit_disk_exit_exact(eps)
        est = brl.mc_bm_slit(eps, 1e-5 * eps, samples, key.child(i), threads=threads)
        tol = max(3 * est.sigma, 0.02)
        ok = abs(est.p_hat - exact) <= tol
        res.add("slit-mc", eps, est.p_hat, exact, ok, ci=(est.ci_lo, est.ci_hi))
    eps_grid = [1e-2, 1e-3, 1e-4]
    slope, stderr, _ = brl.fit_exponent([(e, brl.slit_disk_exit_exact(e)) for e in eps_grid])
    res.add("exact-slope", 0.0, slope, 0.5, abs(slope - 0.5) <= 0.01)
    res.meta["slope"] = slope
    res.meta["slope_stderr"] = stderr
    return res


def suite_walk_beurling(key: StreamKey, samples: int | None, threads: int = 1) -> SuiteResult:
    """Half-line obstacle escape: the r^{1/2} power law on the lattice."""
    samples = samples or DEFAULT_SAMPLES["4.4"]
    res = SuiteResult("4.4", meta={"samples": samples})
    pairs = []
    for i, radius in enumerate([64, 128, 256]):
        est = brl.mc_walk_beurling((-1, 0), radius, brl.half_line(radius),
                                   samples, key.child(i), threads=threads)
        pairs.append((1.0 / radius, est.p_hat))
        res.add("halfline", radius, est.p_hat, (1.0 / radius) ** 0.5,
                est.p_hat > 0, ci=(est.ci_lo, est.ci_hi))
    slope, stderr, _ = brl.fit_exponent(pairs)
    ok = 0.4 <= slope <= 0.6
    res.add("exponent", 0.0, slope, 0.5, ok)
    khat = pairs[0][1] / pairs[0][0] ** 0.5
    res.add("khat-r64", 64, khat, 4.0, khat <= 4.0)
    res.meta["slope"] = slope
    res.meta["slope_stderr"] = stderr
    return res


def suite_embedding_1d(key: StreamKey, samples: int | None, threads: int = 1) -> SuiteResult:
    """Exit-time law checks: mean 1, fair sides, geometric tail, and the
    max |T_k - k| deviation shape."""
    samples = samples or DEFAULT_SAMPLES["5.1"]
    dt = 1e-4
    t, sides = cpl.exit_time_sample(make_stream(key.child(1)), samples, dt)
    mean = float(t.mean())
    se = float(t.std(ddof=1)) / np.sqrt(samples)
    res = SuiteResult("5.1", meta={"samples": samples, "dt": dt,
                                   "mean_T": mean, "se_T": se})
    res.add("mean-exit-time", dt, mean, 1.0, abs(mean - 1.0) <= 0.02,
            ci=(mean - 3 * se, mean + 3 * se))
    up = int((sides > 0).sum())
    lo_w, hi_w = wilson_interval(up, samples)
    sigma = 0.5 / np.sqrt(samples)
    res.add("side-fair", 0.0, up / samples, 0.5,
            abs(up / samples - 0.5) <= 3 * sigma, ci=(lo_w, hi_w))
    prev = 1.0
    freqs = []
    for k in range(1, 7):
        f = float((t >= k).mean())
        res.add("exit-tail", k, f, np.exp(-(k - 1)), f <= prev + 1e-12)
        prev = f
        if f > 0:
            freqs.append((k, np.log(f)))
    if len(freqs) >= 3:
        gslope, _, _, _ = slope_fit([p[0] for p in freqs], [p[1] for p in freqs])
        res.add("exit-tail-slope", 0.0, gslope, 0.0, gslope < 0)
    # deviation statistic max_k |T_k - k| at a desk scale
    n, reps, dev_dt = 1024, 200, 1e-3
    devs = cpl.max_time_deviation_sample(key.child(2), n, dev_dt, reps)
    prev = 1.1
    shape_ok = True
    for r in (1.0, 2.0, 3.0):
        f = float((devs >= r * np.sqrt(n)).mean())
        shape_ok = shape_ok and f <= prev + 1e-12
        res.add("maxdev-tail", r, f, np.exp(-r), True)
        prev = f
    res.add("maxdev-decreasing", 0.0, 1.0 if shape_ok else 0.0, 1.0, shape_ok)
    res.meta["maxdev_n"] = n
    res.meta["maxdev_dt"] = dev_dt
    return res


def suite_embedding_2d(key: StreamKey, samples: int | None, threads: int = 1) -> SuiteResult:
    """Constructed planar walk: four-step uniformity, 18-of-20 policy,
    and the assignment-count partition."""
    n = samples or DEFAULT_SAMPLES["5.2"]
    dt = 0.05
    repeats = 20
    res = SuiteResult("5.2", meta={"n": n, "dt": dt, "repeats": repeats})
    sigma = np.sqrt(0.25 * 0.75 / n)
    passed_reps = 0
    worst = 0.0
    for rep in range(repeats):
        rec = cpl.embed_2d(make_stream(key.child(rep)), n, dt)
        steps = rec.walk.steps
        counts = np.array([
            int(((steps[:, 0] == 1)).sum()),
            int(((steps[:, 0] == -1)).sum()),
            int(((steps[:, 1] == 1)).sum()),
            int(((steps[:, 1] == -1)).sum()),
        ])
        dev = np.abs(counts / n - 0.25).max()
        worst = max(worst, float(dev))
        ok = dev <= 3 * sigma
        passed_reps += ok
        u1, u2 = rec.assignment_counts()
        partition_ok = bool(((u1 + u2) == np.arange(n + 1)).all())
        # Per-repeat uniformity is diagnostic: the policy row below accepts
        # up to two 3-sigma exceedances among the twenty repeats.
        res.add("four-step-uniform", rep, dev, 3 * sigma, ok, gate=False)
        res.add("assign-partition", rep, 1.0 if partition_ok else 0.0, 1.0, partition_ok)
    res.add("chi-square-policy", 0.0, passed_reps, 18.0, passed_reps >= 18)
    res.meta["worst_freq_dev"] = worst
    res.meta["passed_repeats"] = passed_reps
    return res


def suite_aj_bounds(key: StreamKey, samples: int | None, threads: int = 1) -> SuiteResult:
    """Eigenvalue-rate bounds j/(2n) <= a_j <= pi j/n and the cosh
    residual, for every n up to 10^4."""
    n_max = samples or DEFAULT_SAMPLES["6.1"]
    worst_resid = 0.0
    min_lower = np.inf
    min_upper = np.inf
    stronger_lower_holds = True
    worst_n = 0
    report_ns = [2, 3, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192, n_max]
    res = SuiteResult("6.1", meta={"n_max": n_max})
    for n in range(2, n_max + 1):
        j = np.arange(1, n, dtype=np.float64)
        a = dlt.solve_aj_all(n)
        resid = float(np.abs(np.cosh(a) - (2.0 - np.cos(np.pi * j / n))).max())
        low = float((a - j / (2 * n)).min())
        high = float((np.pi * j / n - a).min())
        if resid > worst_resid:
            worst_resid, worst_n = resid, n
        min_lower = min(min_lower, low)
        min_upper = min(min_upper, high)
        if (a < np.pi * j / (2 * n) - 1e-15).any():
            stronger_lower_holds = False
        if n in report_ns:
            res.add("cosh-residual", n, resid, 1e-13, resid <= 1e-13)
    ok = worst_resid <= 1e-13 and min_lower >= 0 and min_upper >= 0
    res.add("bounds-margin-lower", 0.0, min_lower, 0.0, min_lower >= 0)
    res.add("bounds-margin-upper", 0.0, min_upper, 0.0, min_upper >= 0)
    res.add("worst-residual", worst_n, worst_resid, 1e-13, worst_resid <= 1e-13)
    res.meta["stronger_pi_lower_bound_holds"] = stronger_lower_holds
    res.passed = res.passed and ok
    return res


def suite_rectangle(key: StreamKey, samples: int | None, threads: int = 1) -> SuiteResult:
    """Spectral vs direct-solve equivalence over all 2 <= l,n <= 64 with
    20 random boundary functions each, plus the one-point exact value."""
    lim = 64
    count = samples or DEFAULT_SAMPLES["6.2"]
    overall = 0.0
    worst_pair = (0, 0)
    res = SuiteResult("6.2", meta={"l_max": lim, "n_max": lim, "phi_count": count})
    for n in range(2, lim + 1):
        co_a = dlt.solve_aj_all(n)
        y = np.arange(0, n + 1, dtype=np.float64)
        jj = np.arange(1, n, dtype=np.float64)
        siny = np.sin(np.pi * np.outer(jj, y) / n)
        row_max = 0.0
        for l in range(2, lim + 1):
            gen = make_stream(key.child(n * 256 + l))
            phis = gen.random((count, n - 1))
            bs = phis @ siny[:, 1:n].T * (2.0 / n)  # (count, n-1)
            spectral = np.zeros((count, l + 1, n + 1))
            for x in range(1, l):
                ratio = dlt._sinh_ratio(co_a, float(x), float(l))
                spectral[:, x, :] = (bs * ratio) @ siny
            spectral[:, l, 1:n] = phis
            direct = dlt.oracle_linear_solve_many(
                dlt.RectangleSpec(l=l, n=n, phi=np.zeros(n - 1)), phis)
            diff = float(np.abs(spectral - direct).max())
            row_max = max(row_max, diff)
            if diff > overall:
                overall, worst_pair = diff, (l, n)
        res.add("max-diff-n", n, row_max, 1e-9, row_max <= 1e-9)
    exact = dlt.solve_rectangle(dlt.RectangleSpec(l=2, n=2, phi=np.array([1.0])))
    lu = dlt.oracle_linear_solve(dlt.RectangleSpec(l=2, n=2, phi=np.array([1.0])))
    res.add("point-exact-spectral", 0.0, exact(1, 1), 0.25,
            abs(exact(1, 1) - 0.25) <= 1e-15)
    res.add("point-exact-direct", 0.0, float(lu[1, 1]), 0.25,
            abs(lu[1, 1] - 0.25) <= 1e-15)
    res.meta["max_abs_diff"] = overall
    res.meta["worst_l"] = worst_pair[0]
    res.meta["worst_n"] = worst_pair[1]
    return res


def suite_strip(key: StreamKey, samples: int | None, threads: int = 1) -> SuiteResult:
    """Strip solutions: closed-form point value, truncated direct-solve
    agreement, truncation insensitivity, and decay."""
    res = SuiteResult("6.3", meta={})
    spec2 = dlt.RectangleSpec(l=0, n=2, phi=np.array([1.0]), infinite=True)
    target = 1.0 / (2.0 + np.sqrt(3.0))
    v = dlt.strip_value(spec2, 1, 1)
    res.add("strip-closed-form", 1.0, v, target, abs(v - target) <= 1e-12)
    count = samples or DEFAULT_SAMPLES["6.3"]
    worst = 0.0
    for n in [2, 4, 8, 16, 32, 64]:
        gen = make_stream(key.child(n))
        xmax = max(4 * n, 40)
        n_worst = 0.0
        for _ in range(count):
            phi = gen.random(n - 1)
            spec = dlt.RectangleSpec(l=0, n=n, phi=phi, infinite=True)
            sol = dlt.solve_strip(spec, x_max=xmax)
            direct = dlt.oracle_linear_solve(spec, truncation=xmax)
            probe = max(2, min(n, xmax // 4))
            diff = float(np.abs(sol.values[:probe + 1] - direct[:probe + 1]).max())
            n_worst = max(n_worst, diff)
        worst = max(worst, n_worst)
        res.add("strip-vs-direct", n, n_worst, 1e-9, n_worst <= 1e-9)
    spec8 = dlt.RectangleSpec(l=0, n=8, phi=np.ones(7), infinite=True)
    t40 = dlt.oracle_linear_solve(spec8, truncation=40)
    t80 = dlt.oracle_linear_solve(spec8, truncation=80)
    tdiff = float(np.abs(t40[:11] - t80[:11]).max())
    res.add("truncation-stability", 40, tdiff, 1e-8, tdiff <= 1e-8)
    far = max(abs(dlt.strip_value(spec8, 50, y)) for y in range(1, 8))
    res.add("far-decay", 50, far, 1e-5, far <= 1e-5)
    res.meta["max_abs_diff"] = worst
    return res


def suite_corner_bound(key: StreamKey, samples: int | None, threads: int = 1) -> SuiteResult:
    """Near-corner bound constant f(1,y) n^2/y stable as n doubles."""
    rows = dlt.boundary_bound_report("corner", 1.0, [16, 32, 64, 128])
    ks = [k for _, k in rows]
    res = SuiteResult("6.4", meta={"a_ratio": 1.0})
    for n, k in rows:
        res.add("corner-K", n, k, ks[0], np.isfinite(k))
    stable = max(ks) <= 1.25 * min(ks)
    res.add("corner-K-stable", 0.0, max(ks), 1.25 * min(ks), stable)
    res.meta["K_values"] = ";".join(f"{k:.6g}" for k in ks)
    return res


def suite_strip_bound(key: StreamKey, samples: int | None, threads: int = 1) -> SuiteResult:
    """Deep-strip bound constant f(n,y) n/y bounded and stable."""
    rows = dlt.boundary_bound_report("strip", 0.0, [16, 32, 64, 128, 256])
    ks = [k for _, k in rows]
    res = SuiteResult("6.5", meta={})
    for n, k in rows:
        res.add("strip-K", n, k, ks[0], np.isfinite(k))
    stable = max(ks) <= 1.25 * min(ks)
    res.add("strip-K-stable", 0.0, max(ks), 1.25 * min(ks), stable)
    res.meta["K_values"] = ";".join(f"{k:.6g}" for k in ks)
    return res


SUITES = {
    "3.2": suite_reflection,
    "3.3": suite_bm_tails,
    "3.4": suite_small_ball,
    "3.9": suite_rw_tails_2d,
    "3.10": suite_rw_tails_stability,
    "4.3": suite_slit,
    "4.4": suite_walk_beurling,
    "5.1": suite_embedding_1d,
    "5.2": suite_embedding_2d,
    "6.1": suite_aj_bounds,
    "6.2": suite_rectangle,
    "6.3": suite_strip,
    "6.4": suite_corner_bound,
    "6.5": suite_strip_bound,
}


def run_suite(lemma: str, key: StreamKey, samples: int | None = None,
              threads: int = 1) -> SuiteResult:
    if lemma not in SUITES:
        raise KeyError(f"unknown suite {lemma!r}; choose from {sorted(SUITES)}")
    return SUITES[lemma](key, samples, threads)
