"""Verification toolkit for planar simple random walk and Brownian
motion estimates: exact lattice distributions, discrete Dirichlet
solvers, escape probabilities past obstacles, and a Skorokhod-type
embedding of the walk in a Brownian path — each paired with independent
oracles and statistical checks runnable from the CLI.
"""

__version__ = "0.1.0"

from .rng import StreamKey, make_stream
from .paths import (
    DiagonalPair,
    LatticePath1D,
    LatticePath2D,
    WienerPath,
    compose,
    decompose,
    gen_walk,
    gen_wiener,
)
from .exactdist import (
    PmfTable,
    exact_pmf_1d,
    exact_pmf_2d,
    lclt_error_profile,
    lclt_phi,
    lclt_upper_ratio,
    tail_prob,
)
from .dirichlet import (
    RectangleSpec,
    HarmonicSolution,
    oracle_hitting_mc,
    oracle_linear_solve,
    solve_rectangle,
    solve_strip,
)
from .beurling import (
    DiscreteObstacle,
    half_line,
    mc_bm_slit,
    mc_walk_beurling,
    slit_disk_exit_exact,
)
from .coupling import (
    CouplingRecord,
    CouplingStats,
    coupling_sup,
    embed_1d,
    embed_2d,
    sup_stats_1d,
)
from .experiments import BoundCheck, TailEstimate, slope_fit, wilson_interval
from .suites import SUITES, run_suite

__all__ = [
    "__version__",
    "StreamKey",
    "make_stream",
    "DiagonalPair",
    "LatticePath1D",
    "LatticePath2D",
    "WienerPath",
    "compose",
    "decompose",
    "gen_walk",
    "gen_wiener",
    "PmfTable",
    "exact_pmf_1d",
    "exact_pmf_2d",
    "lclt_error_profile",
    "lclt_phi",
    "lclt_upper_ratio",
    "tail_prob",
    "RectangleSpec",
    "HarmonicSolution",
    "oracle_hitting_mc",
    "oracle_linear_solve",
    "solve_rectangle",
    "solve_strip",
    "DiscreteObstacle",
    "half_line",
    "mc_bm_slit",
    "mc_walk_beurling",
    "slit_disk_exit_exact",
    "CouplingRecord",
    "CouplingStats",
    "coupling_sup",
    "embed_1d",
    "embed_2d",
    "sup_stats_1d",
    "BoundCheck",
    "TailEstimate",
    "slope_fit",
    "wilson_interval",
    "SUITES",
    "run_suite",
]
