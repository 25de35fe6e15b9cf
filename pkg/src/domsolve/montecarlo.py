"""Seeded, parallel Monte Carlo experiments over random games.

Every experiment is deterministic in (spec, seed): work is split into
batches, batch ``i`` draws from its own counter-derived random stream, and
batch results are exact integer tallies whose merge is associative, so the
estimates are bit-identical for any thread count or completion order. The
batch size is part of the stream layout; it is derived deterministically
from the game dimensions unless pinned explicitly in the spec.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import stats

from . import _simkernels as kernels
from . import exact, games
from .games import COL, GameClass, Seed, UNIFORM
from .rationalizability import rationalizable_sets

# Survivor/undominated metrics report the column player's counts (the first
# player's, for N-player sources); iteration metrics condition on
# solvability; rationalizable-mean is the column player's mixed-surviving
# count averaged over all draws.
PI = "pi"
COND_ITERATIONS = "cond-iterations"
SURVIVOR_DIST = "survivor-dist"
SURVIVOR_MEAN = "survivor-mean"
UNDOMINATED_MEAN = "undominated-mean"
UNDOMINATED_DIST = "undominated-dist"
PURE_NASH_DIST = "pure-nash-dist"
MIXED_PI = "mixed-pi"
MIXED_COND_ITERATIONS = "mixed-cond-iterations"
RATIONALIZABLE_MEAN = "rationalizable-mean"
POINT_RAT_UNIQUE = "point-rat-unique"

METRICS = (
    PI,
    COND_ITERATIONS,
    SURVIVOR_DIST,
    SURVIVOR_MEAN,
    UNDOMINATED_MEAN,
    UNDOMINATED_DIST,
    PURE_NASH_DIST,
    MIXED_PI,
    MIXED_COND_ITERATIONS,
    RATIONALIZABLE_MEAN,
    POINT_RAT_UNIQUE,
)
_MIXED_METRICS = (MIXED_PI, MIXED_COND_ITERATIONS, RATIONALIZABLE_MEAN)
_HISTOGRAM_METRICS = (SURVIVOR_DIST, UNDOMINATED_DIST, PURE_NASH_DIST)


class NoConditioningEventsError(RuntimeError):
    """A conditional metric saw zero conditioning events."""


@dataclass(frozen=True)
class GameSource:
    """What to sample: an m x n bimatrix game of a class, or an N-player
    tensor game when ``dims`` is set."""

    m: int = 0
    n: int = 0
    game_class: GameClass = GameClass.BASELINE
    distribution: str = UNIFORM
    crra_alpha: float | None = None
    dims: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.dims is not None:
            object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
            if len(self.dims) < 2 or any(d < 1 for d in self.dims):
                raise ValueError("dims needs >= 2 players with >= 1 action each")
        else:
            if self.m < 1 or self.n < 1:
                raise ValueError("m and n must be >= 1")
            if self.game_class.requires_square and self.m != self.n:
                raise ValueError(f"{self.game_class.value} requires m = n")
        if self.crra_alpha is not None and not 0 < self.crra_alpha <= 1:
            raise ValueError("crra_alpha must lie in (0, 1]")

    @property
    def is_nplayer(self) -> bool:
        return self.dims is not None


@dataclass(frozen=True)
class ExperimentSpec:
    metric: str
    source: GameSource
    samples: int
    seed: Seed
    batch_size: int | None = None

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.source.is_nplayer and self.metric in _MIXED_METRICS + (
            POINT_RAT_UNIQUE,
            PURE_NASH_DIST,
        ):
            raise ValueError(f"metric {self.metric} requires a two-player source")

    def effective_batch_size(self) -> int:
        if self.batch_size is not None:
            return self.batch_size
        if self.metric in _MIXED_METRICS:
            return 256
        if self.source.is_nplayer:
            dims = self.source.dims
            driver = sum(
                mk * mk * math.prod(d for j, d in enumerate(dims) if j != k)
                for k, mk in enumerate(dims)
            )
        else:
            m, n = self.source.m, self.source.n
            driver = m * n * n + n * m * m
        return max(32, min(8192, 2**23 // max(driver, 1)))


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo point estimate with its standard error.

    For Bernoulli metrics ``se`` is sqrt(p(1-p)/N); for means it is the
    sample standard deviation over sqrt of the conditioning count.
    """

    mean: float
    se: float
    samples_used: int
    conditioning_count: int


@dataclass(frozen=True)
class HistogramEstimate:
    counts: dict[int, int]
    samples: int

    def freq(self, value: int) -> float:
        return self.counts.get(value, 0) / self.samples

    def se(self, value: int) -> float:
        p = self.freq(value)
        return math.sqrt(p * (1 - p) / self.samples)


def _bernoulli_estimate(successes: int, samples: int) -> Estimate:
    p = successes / samples
    return Estimate(p, math.sqrt(p * (1 - p) / samples), samples, successes)


def _mean_estimate(total: int, sq_total: int, count: int, samples: int) -> Estimate:
    mean = total / count
    if count > 1:
        var = (sq_total - total * total / count) / (count - 1)
        se = math.sqrt(max(var, 0.0) / count)
    else:
        se = 0.0
    return Estimate(mean, se, samples, count)


def _batch_sizes(samples: int, batch_size: int) -> list[int]:
    full, rem = divmod(samples, batch_size)
    return [batch_size] * full + ([rem] if rem else [])


def _pure_batch_tallies(spec: ExperimentSpec, index: int, size: int) -> dict:
    rng = spec.seed.generator(index)
    src = spec.source
    if spec.metric == POINT_RAT_UNIQUE:
        row_ranks, col_ranks = kernels.sample_rank_batch(
            rng, size, src.m, src.n, src.game_class
        )
        count_r, count_c = kernels.point_rationalizable_counts(row_ranks, col_ranks)
        return {"unique": int(((count_r == 1) & (count_c == 1)).sum())}
    if src.is_nplayer:
        ranks = kernels.sample_tensor_rank_batch(rng, size, src.dims)
        out = kernels.eliminate_tensor_batch(ranks, src.dims)
        solvable = out["solvable"]
        iters = out["iterations"]
        u0 = out["undominated"][0]
        return {
            "solvable": int(solvable.sum()),
            "iter_sum": int(iters[solvable].sum()),
            "iter_sq": int((iters[solvable] ** 2).sum()),
            "u_hist": Counter(np.asarray(u0).tolist()),
        }
    row_ranks, col_ranks = kernels.sample_rank_batch(rng, size, src.m, src.n, src.game_class)
    out = kernels.eliminate_batch(row_ranks, col_ranks)
    solvable = out["solvable"]
    iters = out["iterations"]
    s_c = out["s_c"]
    u_c = out["u_c"]
    return {
        "solvable": int(solvable.sum()),
        "iter_sum": int(iters[solvable].sum()),
        "iter_sq": int((iters[solvable] ** 2).sum()),
        "sc_sum": int(s_c.sum()),
        "sc_sq": int((s_c.astype(np.int64) ** 2).sum()),
        "uc_sum": int(u_c.sum()),
        "uc_sq": int((u_c.astype(np.int64) ** 2).sum()),
        "sc_hist": Counter(np.asarray(s_c).tolist()),
        "uc_hist": Counter(np.asarray(u_c).tolist()),
        "nash_hist": Counter(np.asarray(out["pure_nash"]).tolist()),
        "sr_less": int((out["s_r"] < src.m).sum()),
    }


def _draw_cardinal_game(rng: np.random.Generator, src: GameSource) -> games.CardinalBimatrix:
    if src.game_class is GameClass.BASELINE:
        u_row = games._resample_ties(
            rng, games._draw_matrix(rng, src.m, src.n, src.distribution), 0, src.distribution
        )
        u_col = games._resample_ties(
            rng, games._draw_matrix(rng, src.m, src.n, src.distribution), 1, src.distribution
        )
        game = games.CardinalBimatrix(u_row.tolist(), u_col.tolist())
    else:
        game = games._sample_class_impl(rng, src.game_class, src.m, src.n, src.distribution)
    if src.crra_alpha is not None and src.crra_alpha != 1.0:
        game = games.apply_crra(game, src.crra_alpha)
    return game


def _mixed_batch_tallies(spec: ExperimentSpec, index: int, size: int) -> dict:
    rng = spec.seed.generator(index)
    solvable = 0
    iter_sum = 0
    iter_sq = 0
    rat_cols_sum = 0
    rat_cols_sq = 0
    pure_solvable = 0
    prat_unique = 0
    for _ in range(size):
        game = _draw_cardinal_game(rng, spec.source)
        report = rationalizable_sets(game)
        if report.mixed_solvable:
            solvable += 1
            iter_sum += report.mixed_iterations
            iter_sq += report.mixed_iterations**2
        if all(len(s) == 1 for s in report.pure_survivors):
            pure_solvable += 1
        if all(len(s) == 1 for s in report.point_rationalizable):
            prat_unique += 1
        k = len(report.rationalizable[COL])
        rat_cols_sum += k
        rat_cols_sq += k * k
    return {
        "solvable": solvable,
        "iter_sum": iter_sum,
        "iter_sq": iter_sq,
        "rat_cols_sum": rat_cols_sum,
        "rat_cols_sq": rat_cols_sq,
        "pure_solvable": pure_solvable,
        "prat_unique": prat_unique,
    }


def solvability_chain(
    source: GameSource, samples: int, seed: Seed, threads: int = 1
) -> dict[str, Estimate]:
    """Paired frequencies of pure solvability, mixed solvability and unique
    point-rationalizability on the same sampled games (the three events are
    nested per game, so the estimates are ordered by construction)."""
    spec = ExperimentSpec(MIXED_PI, source, samples, seed)
    tallies = _run_batches(spec, threads)
    return {
        "pure": _bernoulli_estimate(tallies["pure_solvable"], samples),
        "mixed": _bernoulli_estimate(tallies["solvable"], samples),
        "point_rat_unique": _bernoulli_estimate(tallies["prat_unique"], samples),
    }


def _merge(tallies: Iterable[dict]) -> dict:
    total: dict = {}
    for t in tallies:
        for key, value in t.items():
            if isinstance(value, Counter):
                total.setdefault(key, Counter()).update(value)
            else:
                total[key] = total.get(key, 0) + value
    return total


def _run_batches(spec: ExperimentSpec, threads: int) -> dict:
    sizes = _batch_sizes(spec.samples, spec.effective_batch_size())
    worker = _mixed_batch_tallies if spec.metric in _MIXED_METRICS else _pure_batch_tallies
    if threads <= 1:
        parts = [worker(spec, i, s) for i, s in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(worker, [spec] * len(sizes), range(len(sizes)), sizes))
    return _merge(parts)


def run(spec: ExperimentSpec, threads: int = 1) -> Estimate | HistogramEstimate:
    """Run one experiment; conditional metrics raise
    :class:`NoConditioningEventsError` when no game satisfied the condition."""
    tallies = _run_batches(spec, threads)
    n = spec.samples
    metric = spec.metric
    if metric in (PI, MIXED_PI):
        return _bernoulli_estimate(tallies["solvable"], n)
    if metric in (COND_ITERATIONS, MIXED_COND_ITERATIONS):
        count = tallies["solvable"]
        if count == 0:
            raise NoConditioningEventsError(
                f"no solvable games sampled ({n} draws)"
            )
        return _mean_estimate(tallies["iter_sum"], tallies["iter_sq"], count, n)
    if metric == SURVIVOR_MEAN:
        return _mean_estimate(tallies["sc_sum"], tallies["sc_sq"], n, n)
    if metric == UNDOMINATED_MEAN:
        if spec.source.is_nplayer:
            hist = tallies["u_hist"]
            total = sum(k * v for k, v in hist.items())
            sq = sum(k * k * v for k, v in hist.items())
            return _mean_estimate(total, sq, n, n)
        return _mean_estimate(tallies["uc_sum"], tallies["uc_sq"], n, n)
    if metric == SURVIVOR_DIST:
        return HistogramEstimate(dict(sorted(tallies["sc_hist"].items())), n)
    if metric == UNDOMINATED_DIST:
        key = "u_hist" if spec.source.is_nplayer else "uc_hist"
        return HistogramEstimate(dict(sorted(tallies[key].items())), n)
    if metric == PURE_NASH_DIST:
        return HistogramEstimate(dict(sorted(tallies["nash_hist"].items())), n)
    if metric == RATIONALIZABLE_MEAN:
        return _mean_estimate(tallies["rat_cols_sum"], tallies["rat_cols_sq"], n, n)
    if metric == POINT_RAT_UNIQUE:
        return _bernoulli_estimate(tallies["unique"], n)
    raise AssertionError(metric)  # pragma: no cover


@dataclass(frozen=True)
class SweepRow:
    metric: str
    source: GameSource
    samples: int
    seed: Seed
    estimate: float
    se: float
    conditioning_count: int


def sweep(
    metric: str,
    sources: Iterable[GameSource],
    samples: int,
    seed: Seed,
    threads: int = 1,
) -> list[SweepRow]:
    """One estimate per grid point; each point gets its own sub-stream."""
    if metric in _HISTOGRAM_METRICS:
        raise ValueError("sweep supports scalar metrics only")
    rows = []
    for offset, source in enumerate(sources):
        point_seed = Seed(seed.master, seed.stream + offset)
        est = run(ExperimentSpec(metric, source, samples, point_seed), threads)
        rows.append(
            SweepRow(
                metric=metric,
                source=source,
                samples=samples,
                seed=point_seed,
                estimate=est.mean,
                se=est.se,
                conditioning_count=est.conditioning_count,
            )
        )
    return rows


@dataclass(frozen=True)
class CltReport:
    """Standardized surviving-count sample versus the normal limit."""

    n: int
    samples: int
    ks_distance: float
    sample_mean: float
    sample_var: float
    exact_mean: float
    exact_var: float
    skewness: float
    kurtosis: float


def clt_check(n: int, samples: int, seed: Seed, batch_size: int = 512) -> CltReport:
    """Sample surviving column counts of 2 x n games, standardize with the
    exact mean/variance, and measure the fit to the standard normal.

    ``kurtosis`` is the raw fourth standardized moment (normal = 3). Uses the
    order-statistics fast path for 2 x n games; n >= 100 required.
    """
    if n < 100:
        raise ValueError("clt_check requires n >= 100")
    values = np.empty(samples, dtype=np.int64)
    done = 0
    for index, size in enumerate(_batch_sizes(samples, batch_size)):
        rng = seed.generator(index)
        values[done : done + size] = kernels.survivors_2xn_batch(rng, size, n)
        done += size
    mean = exact.mean_survivors_2xn(n, exact_limit=0)
    var = exact.var_survivors_2xn(n, exact_limit=0)
    z = (values - mean) / math.sqrt(var)
    return CltReport(
        n=n,
        samples=samples,
        ks_distance=float(stats.kstest(z, "norm").statistic),
        sample_mean=float(values.mean()),
        sample_var=float(values.var(ddof=1)),
        exact_mean=float(mean),
        exact_var=float(var),
        skewness=float(stats.skew(z)),
        kurtosis=float(stats.kurtosis(z, fisher=False)),
    )


@dataclass(frozen=True)
class BoundCheckRow:
    """One grid point of the bound suite.

    The pass flags use 3 * max(observed SE, SE at the bound value): with a
    rare event the observed SE degenerates to 0 at p_hat = 0, while the SE
    under the bound hypothesis keeps the test calibrated.
    """

    m: int
    n: int
    samples: int
    pi_hat: float
    pi_se: float
    pi_lower_bound: float
    pi_ok: bool
    sr_less_hat: float
    sr_less_se: float
    sr_less_bound: float
    sr_ok: bool


def _guard_se(p_hat: float, bound: float, samples: int) -> float:
    se_obs = math.sqrt(p_hat * (1 - p_hat) / samples)
    se_null = math.sqrt(bound * (1 - bound) / samples)
    return max(se_obs, se_null)


def bound_checks(
    grid: Iterable[tuple[int, int]],
    samples: int,
    seed: Seed,
    threads: int = 1,
) -> list[BoundCheckRow]:
    """Check the solvability lower bound and the row-elimination upper bound
    on each (m, n) grid point."""
    rows = []
    for offset, (m, n) in enumerate(grid):
        spec = ExperimentSpec(
            PI,
            GameSource(m=m, n=n),
            samples,
            Seed(seed.master, seed.stream + offset),
        )
        tallies = _run_batches(spec, threads)
        pi_hat = tallies["solvable"] / samples
        sr_hat = tallies["sr_less"] / samples
        pi_bound = float(exact.solvable_probability_lower_bound(m, n))
        sr_bound = exact.row_elimination_probability_bound(m, n)
        rows.append(
            BoundCheckRow(
                m=m,
                n=n,
                samples=samples,
                pi_hat=pi_hat,
                pi_se=math.sqrt(pi_hat * (1 - pi_hat) / samples),
                pi_lower_bound=pi_bound,
                pi_ok=pi_hat >= pi_bound - 3 * _guard_se(pi_hat, pi_bound, samples),
                sr_less_hat=sr_hat,
                sr_less_se=math.sqrt(sr_hat * (1 - sr_hat) / samples),
                sr_less_bound=sr_bound,
                sr_ok=sr_hat <= sr_bound + 3 * _guard_se(sr_hat, sr_bound, samples),
            )
        )
    return rows
