"""Dominance solvability in random games.

Exact combinatorics, an iterated-elimination engine with traces,
exhaustive-enumeration oracles, LP-based mixed dominance and
rationalizability, and a reproducible Monte Carlo harness.
"""

__version__ = "0.1.0"

from .elimination import (
    EliminationTrace,
    GameMetrics,
    count_pure_nash,
    iterate,
    iterate_nplayer,
    metrics,
    strictly_dominates,
    undominated,
)
from .games import (
    COL,
    ROW,
    CardinalBimatrix,
    GameClass,
    OrdinalBimatrix,
    OrdinalTensorGame,
    Seed,
    apply_crra,
    ordinalize,
    sample_baseline,
    sample_cardinal,
    sample_class,
    sample_nondecreasing_br,
    sample_nplayer,
)
from .montecarlo import Estimate, ExperimentSpec, GameSource, clt_check, run, sweep
from .rationalizability import (
    MixedCertificate,
    RationalizabilityReport,
    is_mixed_dominated,
    point_rationalizable_sets,
    rationalizable_sets,
)

__all__ = [
    "COL",
    "ROW",
    "CardinalBimatrix",
    "EliminationTrace",
    "Estimate",
    "ExperimentSpec",
    "GameClass",
    "GameMetrics",
    "GameSource",
    "MixedCertificate",
    "OrdinalBimatrix",
    "OrdinalTensorGame",
    "RationalizabilityReport",
    "Seed",
    "apply_crra",
    "clt_check",
    "count_pure_nash",
    "is_mixed_dominated",
    "iterate",
    "iterate_nplayer",
    "metrics",
    "ordinalize",
    "point_rationalizable_sets",
    "rationalizable_sets",
    "run",
    "sample_baseline",
    "sample_cardinal",
    "sample_class",
    "sample_nondecreasing_br",
    "sample_nplayer",
    "strictly_dominates",
    "sweep",
    "undominated",
]
