"""Command-line interface.

Every numeric claim the package makes is reachable through exactly one
documented invocation of one subcommand; each run emits a single CSV
(stdout, or --out) whose header comment pins the seed and parameters, so
reruns are byte-identical.  With --out, a PNG figure is rendered next to
the CSV unless --no-figures is given.

Exit codes: 0 success, 1 invalid arguments or input, 2 a check suite
failed.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from . import beurling as brl
from . import coupling as cpl
from . import dirichlet as dlt
from . import exactdist as exd
from .csvio import emit_csv
from .paths import compose, decompose, gen_walk
from .plotting import render_figure
from .rng import StreamKey, make_stream
from .suites import DEFAULT_SAMPLES, SUITES, run_suite
from .suites import SCHEMA as CHECK_SCHEMA

# Suites whose verdicts are Monte Carlo; on failure they get one retry
# with seed+1, recorded in the output metadata.
_STATISTICAL_SUITES = {"3.2", "3.3", "3.4", "3.10", "4.3", "4.4", "5.1", "5.2"}

# Points per Brownian coordinate a 2D coupling record may require before
# the run is refused as out of memory budget.
_RECORD_POINT_BUDGET = 2 * 10**7


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; this CLI reserves 2
    for failed checks, so usage errors exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integer x,y, got {text!r}")


def _config_tokens(path: str) -> list[str]:
    """Translate a key=value config file into CLI tokens.

    Keys mirror long flags (dashes or underscores); boolean flags take
    true/false.  The tokens are injected before the user's own flags, so
    explicit flags always win.
    """
    tokens = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            k, v = (s.strip() for s in line.split("=", 1))
            flag = "--" + k.replace("_", "-")
            if v.lower() in ("true", "yes", "on"):
                tokens.append(flag)
            elif v.lower() in ("false", "no", "off"):
                continue
            else:
                tokens.extend([flag, v])
    return tokens


def _find_config(argv: list[str]) -> str | None:
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    g.add_argument("--samples", type=int, default=None,
                   help="override the subcommand's default sample count")
    g.add_argument("--out", default=None,
                   help="write the CSV here instead of stdout; figures land next to it")
    g.add_argument("--threads", type=int, default=1,
                   help="worker threads; affects scheduling only, never values")
    g.add_argument("--config", default=None,
                   help="key=value file mirroring this subcommand's flags; flags win")
    g.add_argument("--no-figures", action="store_true",
                   help="skip figure rendering even when --out is given")
    return p


def build_parser() -> _Parser:
    common = _common_parser()
    parser = _Parser(prog="planarwalk",
                     description="Exact and Monte Carlo estimates for planar "
                                 "random walk and Brownian motion.")
    parser.add_argument("--version", action="version", version=f"planarwalk {__version__}")
    subs = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    p = subs.add_parser("dirichlet", parents=[common],
                        help="harmonic interpolation on a rectangle or strip")
    p.add_argument("--l", type=int, default=8, help="rectangle depth; 0 selects the strip")
    p.add_argument("--n", type=int, default=8, help="channel width")
    p.add_argument("--infinite", action="store_true", help="semi-infinite strip domain")
    p.add_argument("--phi", default="one",
                   help="boundary data: 'one' or a file of n-1 values")
    p.add_argument("--point", type=_int_pair, default=None, metavar="X,Y",
                   help="evaluate a single point instead of the whole grid")
    p.add_argument("--oracle", choices=["linear", "mc", "both", "none"], default="linear",
                   help="cross-check: sparse solve, MC hitting, both, or none")

    p = subs.add_parser("lclt", parents=[common],
                        help="pointwise walk pmf against its Gaussian-type expansion")
    p.add_argument("--n", type=_int_list, default=[100, 400, 1600],
                   help="half step counts (the walk takes 2n steps)")
    p.add_argument("--kmax", type=int, default=None,
                   help="max |k|; default floor(n**0.6) per n")
    p.add_argument("--order", type=int, default=2, help="series truncation order")
    p.add_argument("--upper-ratio", type=int, default=None, metavar="NMAX",
                   help="also fit the pointwise upper-bound constant up to NMAX")

    p = subs.add_parser("tails", parents=[common],
                        help="exact walk tail probabilities against Gaussian bounds")
    p.add_argument("--dim", choices=["1", "2", "both"], default="both")
    p.add_argument("--n", type=_int_list, default=[10, 20, 50, 100, 200, 500, 1000])
    p.add_argument("--r", type=_float_list,
                   default=[0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0])
    p.add_argument("--convention", choices=["double", "single"], default="double",
                   help="'double': table over 2n steps, threshold r sqrt(n)")

    p = subs.add_parser("beurling", parents=[common],
                        help="escape probabilities past a slit or lattice obstacle")
    p.add_argument("--mode", choices=["exact", "bm", "walk"], default="exact")
    p.add_argument("--eps", type=_float_list, default=[0.25, 0.04, 0.01],
                   help="start offsets for the slit disk (exact/bm modes)")
    p.add_argument("--R", type=_float_list, default=[64, 128, 256],
                   help="escape radii (walk mode)")
    p.add_argument("--obstacle", default="halfline",
                   help="'halfline' or a file of x y lattice points (walk mode)")
    p.add_argument("--start", type=_int_pair, default=(-1, 0), metavar="X,Y",
                   help="walk start point (walk mode)")

    p = subs.add_parser("coupling", parents=[common],
                        help="embedded walk vs Brownian path: sup distance per replicate")
    p.add_argument("--dim", choices=["1", "2"], default="1")
    p.add_argument("--n", type=_int_list, default=[256, 1024, 4096, 16384, 65536],
                   help="walk lengths")
    p.add_argument("--dt", type=float, default=1e-3, help="Brownian step size")
    p.add_argument("--g-grid", type=_float_list, default=None,
                   help="also report exceedance counts of sup >= g n^{1/4}")

    p = subs.add_parser("decompose", parents=[common],
                        help="planar walk against its two diagonal coordinate walks")
    p.add_argument("--n", type=int, default=64, help="walk length")
    p.add_argument("--dump-paths", default=None, metavar="PATH",
                   help="also write the bare path CSV (time,x,y) here")

    p = subs.add_parser("check", parents=[common],
                        help="run one named verification suite")
    p.add_argument("--lemma", required=True, choices=sorted(SUITES),
                   help="suite id")
    return parser


def _emit(args, rows, schema, meta, subcommand):
    meta_full = {"subcommand": subcommand, "seed": args.seed, "version": __version__}
    meta_full.update(meta)
    emit_csv(rows, schema, args.out, meta_full)
    if args.out and args.out != "-":
        print(f"wrote {args.out}", file=sys.stderr)
        if not args.no_figures:
            fig = render_figure(subcommand, rows, args.out)
            if fig:
                print(f"wrote {fig}", file=sys.stderr)


def _load_phi(spec_text: str, n: int) -> np.ndarray:
    if spec_text == "one":
        return np.ones(n - 1)
    values = np.loadtxt(spec_text, dtype=np.float64).ravel()
    if values.shape != (n - 1,):
        raise ValueError(f"phi file must hold exactly {n - 1} values, got {values.shape}")
    return values


def _cmd_dirichlet(args) -> int:
    infinite = args.infinite or args.l == 0
    phi = _load_phi(args.phi, args.n)
    spec = dlt.RectangleSpec(l=0 if infinite else args.l, n=args.n, phi=phi,
                             infinite=infinite)
    sol = dlt.solve_strip(spec) if infinite else dlt.solve_rectangle(spec)
    x_hi = sol.values.shape[0] - 1
    meta = {"l": spec.l, "n": spec.n, "infinite": infinite, "phi": args.phi,
            "oracle": args.oracle, "max_laplace_residual": sol.max_residual}

    linear = None
    if args.oracle in ("linear", "both"):
        linear = dlt.oracle_linear_solve(spec, truncation=x_hi if infinite else None)

    if args.point is not None:
        points = [args.point]
    else:
        points = [(x, y) for x in range(x_hi + 1) for y in range(args.n + 1)]

    rows = []
    for x, y in points:
        if not (0 <= x <= x_hi and 0 <= y <= args.n):
            raise ValueError(f"point ({x},{y}) outside the evaluated grid")
        s = float(sol.values[x, y])
        o = float(linear[x, y]) if linear is not None else float("nan")
        rows.append({"x": x, "y": y, "spectral": s, "oracle": o,
                     "diff": s - o if linear is not None else float("nan")})

    if args.oracle in ("mc", "both"):
        mc_samples = args.samples or 20_000
        key = StreamKey(args.seed)
        if args.point is not None:
            targets = [args.point]
        else:
            gen = make_stream(key.child(977))
            targets = []
            x_lo = 1
            x_cap = max(x_lo, min(x_hi - 1, 4 * args.n))
            while len(targets) < min(10, (x_cap - x_lo + 1) * (args.n - 1)):
                pt = (int(gen.integers(x_lo, x_cap + 1)),
                      int(gen.integers(1, args.n)))
                if pt not in targets:
                    targets.append(pt)
        for i, (x, y) in enumerate(targets):
            est = dlt.oracle_hitting_mc(spec, (x, y), key.child(1000 + i), mc_samples)
            s = float(sol.values[x, y])
            if args.point is not None and args.oracle == "mc":
                rows = []  # single-point mode: the MC row replaces the nan row
            rows.append({"x": x, "y": y, "spectral": s, "oracle": est.value,
                         "diff": s - est.value})
            meta[f"mc_ci_{x}_{y}"] = f"{est.ci_lo:.12g}:{est.ci_hi:.12g}"
            if est.capped:
                meta[f"mc_capped_{x}_{y}"] = est.capped
        meta["mc_samples"] = mc_samples
    _emit(args, rows, ["x", "y", "spectral", "oracle", "diff"], meta, "dirichlet")
    return 0


def _cmd_lclt(args) -> int:
    rows = []
    meta = {"order": args.order, "n_list": ",".join(map(str, args.n))}
    for n in args.n:
        kmax = args.kmax if args.kmax is not None else int(np.floor(n ** 0.6))
        profile, extreme = exd.lclt_error_profile(n, kmax, args.order)
        for k, exact, approx, rel in profile:
            rows.append({"n": n, "k": k, "exact": exact, "approx": approx,
                         "rel_error": rel})
        meta[f"extreme_mass_n{n}"] = extreme
    if args.upper_ratio:
        k_const, at_n, at_k = exd.lclt_upper_ratio(args.upper_ratio)
        meta["upper_ratio_K"] = k_const
        meta["upper_ratio_at_n"] = at_n
        meta["upper_ratio_at_k"] = at_k
    _emit(args, rows, ["n", "k", "exact", "approx", "rel_error"], meta, "lclt")
    return 0


def _cmd_tails(args) -> int:
    dims = [1, 2] if args.dim == "both" else [int(args.dim)]
    rows = []
    for dim in dims:
        for n in args.n:
            steps = 2 * n if args.convention == "double" else n
            pmf = exd.exact_pmf_2d(steps) if dim == 2 else exd.exact_pmf_1d(steps)
            for r in args.r:
                tail = exd.tail_prob(pmf, r, args.convention)
                bound = float(np.exp(-r * r / 4.0)) if dim == 2 else float(np.exp(-r * r / 2.0))
                rows.append({"dim": dim, "n": n, "r": r, "tail": tail,
                             "bound": bound, "ratio": tail / bound})
    meta = {"convention": args.convention}
    _emit(args, rows, ["dim", "n", "r", "tail", "bound", "ratio"], meta, "tails")
    return 0


def _load_obstacle(text: str, radius: float) -> brl.DiscreteObstacle:
    if text == "halfline":
        return brl.half_line(int(radius))
    pts = np.loadtxt(text, dtype=np.int64).reshape(-1, 2)
    return brl.DiscreteObstacle(points=frozenset(map(tuple, pts)))


def _cmd_beurling(args) -> int:
    key = StreamKey(args.seed)
    rows = []
    meta = {"mode": args.mode}
    if args.mode == "exact":
        for eps in args.eps:
            p = brl.slit_disk_exit_exact(eps)
            rows.append({"ratio": eps, "prob": p, "ci_lo": p, "ci_hi": p})
    elif args.mode == "bm":
        samples = args.samples or 100_000
        meta["samples"] = samples
        meta["dt_rule"] = "1e-5*eps"
        for i, eps in enumerate(args.eps):
            est = brl.mc_bm_slit(eps, 1e-5 * eps, samples, key.child(i),
                                 threads=args.threads)
            rows.append({"ratio": eps, "prob": est.p_hat,
                         "ci_lo": est.ci_lo, "ci_hi": est.ci_hi})
    else:
        samples = args.samples or 100_000
        meta["samples"] = samples
        meta["start"] = f"{args.start[0]}:{args.start[1]}"
        meta["obstacle"] = args.obstacle
        dist = float(np.hypot(*args.start))
        for i, radius in enumerate(args.R):
            est = brl.mc_walk_beurling(args.start, radius,
                                       _load_obstacle(args.obstacle, radius),
                                       samples, key.child(i), threads=args.threads)
            rows.append({"ratio": dist / radius, "prob": est.p_hat,
                         "ci_lo": est.ci_lo, "ci_hi": est.ci_hi})
    if len([r for r in rows if r["prob"] > 0]) >= 3:
        slope, stderr, excluded = brl.fit_exponent(
            [(r["ratio"], r["prob"]) for r in rows])
        meta["slope"] = slope
        meta["slope_stderr"] = stderr
        if excluded:
            meta["slope_excluded"] = excluded
    _emit(args, rows, ["ratio", "prob", "ci_lo", "ci_hi"], meta, "beurling")
    return 0


def _cmd_coupling(args) -> int:
    key = StreamKey(args.seed)
    reps = args.samples or 200
    dim = int(args.dim)
    rows = []
    meta = {"dim": dim, "dt": args.dt, "samples": reps}
    for n in args.n:
        if n < 1:
            raise ValueError("n must be >= 1")
        if dim == 2:
            if n % 2:
                raise ValueError("2D coupling needs even n for the S(2t) pairing")
            if n / (2 * args.dt) > _RECORD_POINT_BUDGET:
                raise ValueError(
                    f"n={n} at dt={args.dt} needs more than {_RECORD_POINT_BUDGET} "
                    "record points per coordinate; raise dt or lower n")
            sups = np.empty(reps)
            devs = np.empty(reps)
            for rep in range(reps):
                rec = cpl.embed_2d(make_stream(key.child(n).child(rep)), n, args.dt)
                st = cpl.coupling_sup(rec, n / 2)
                sups[rep], devs[rep] = st.sup_distance, st.max_time_deviation
        else:
            sups, devs = cpl.sup_samples_1d(key.child(n), n, args.dt, reps,
                                            threads=args.threads)
        for rep in range(reps):
            rows.append({"n": n, "sample_id": rep, "sup_distance": float(sups[rep]),
                         "max_time_dev": float(devs[rep])})
        if args.g_grid:
            for g in args.g_grid:
                hits = int((sups >= g * n ** 0.25).sum())
                meta[f"exceed_n{n}_g{g:g}"] = f"{hits}/{reps}"
    _emit(args, rows, ["n", "sample_id", "sup_distance", "max_time_dev"], meta,
          "coupling")
    return 0


def _cmd_decompose(args) -> int:
    if args.n < 0:
        raise ValueError("n must be nonnegative")
    gen = make_stream(StreamKey(args.seed))
    walk = gen_walk(gen, args.n, dim=2)
    pair = decompose(walk)
    pos = walk.positions
    c1 = pair.comp1.positions
    c2 = pair.comp2.positions
    rows = [{"time": t, "x": int(pos[t, 0]), "y": int(pos[t, 1]),
             "comp1": int(c1[t]), "comp2": int(c2[t])}
            for t in range(args.n + 1)]
    exact = bool((compose(pair).positions == pos).all())
    meta = {"n": args.n, "exact_roundtrip": exact}
    _emit(args, rows, ["time", "x", "y", "comp1", "comp2"], meta, "decompose")
    if args.dump_paths:
        path_rows = [{"time": r["time"], "x": r["x"], "y": r["y"]} for r in rows]
        emit_csv(path_rows, ["time", "x", "y"], args.dump_paths,
                 {"subcommand": "decompose-path", "seed": args.seed,
                  "version": __version__, "n": args.n})
        print(f"wrote {args.dump_paths}", file=sys.stderr)
    return 0


def _cmd_check(args) -> int:
    key = StreamKey(args.seed)
    result = run_suite(args.lemma, key, args.samples, args.threads)
    meta = {"lemma": args.lemma}
    if not result.passed and args.lemma in _STATISTICAL_SUITES:
        # One retry at the documented second seed with 4x the Monte Carlo
        # scale: a noise-level miss at 3 sigma passes, while a real bias of
        # that size doubles its z-score and stays red.
        retry_seed = args.seed + 1
        base = args.samples or DEFAULT_SAMPLES[args.lemma]
        retry_samples = 4 * base
        retry = run_suite(args.lemma, StreamKey(retry_seed), retry_samples, args.threads)
        meta["first_attempt_passed"] = False
        meta["retry_seed"] = retry_seed
        meta["retry_samples"] = retry_samples
        result = retry
    meta.update(result.meta)
    meta["passed"] = result.passed
    _emit(args, result.rows, CHECK_SCHEMA, meta, "check")
    if not result.passed:
        print(f"check {args.lemma}: FAIL", file=sys.stderr)
        return 2
    print(f"check {args.lemma}: pass", file=sys.stderr)
    return 0


_COMMANDS = {
    "dirichlet": _cmd_dirichlet,
    "lclt": _cmd_lclt,
    "tails": _cmd_tails,
    "beurling": _cmd_beurling,
    "coupling": _cmd_coupling,
    "decompose": _cmd_decompose,
    "check": _cmd_check,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv:
        parser.print_help(sys.stderr)
        return 1
    cfg_path = _find_config(argv)
    if cfg_path and argv[0] in _COMMANDS:
        try:
            argv = [argv[0]] + _config_tokens(cfg_path) + argv[1:]
        except (OSError, ValueError) as exc:
            print(f"planarwalk: error: {exc}", file=sys.stderr)
            return 1
    args = parser.parse_args(argv)
    if args.subcommand is None:
        parser.print_help(sys.stderr)
        return 1
    try:
        return _COMMANDS[args.subcommand](args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"planarwalk {args.subcommand}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
