"""Exhaustive enumeration oracles over the finite outcome spaces.

These run the real elimination machinery (or the raw dominance definition)
over every equiprobable state, producing exact rational distributions that
the closed forms in :mod:`domsolve.exact` must match with zero tolerance.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .elimination import _run_elimination
from .exact import CapacityError
from .games import ROW, CardinalBimatrix, GameClass, OrdinalBimatrix, ordinalize
from .rationalizability import point_rationalizable_sets

MAX_FULL_2XN = 8
MAX_UC_3XN = 6


@dataclass(frozen=True)
class ExactDistributionReport:
    """Exact joint dominance statistics of random 2 x n games.

    ``dist_iterations`` is conditional on solvability; the other vectors are
    unconditional and all sum to exactly 1.
    """

    n: int
    total_states: int
    solvable_probability: Fraction
    dist_iterations: tuple[Fraction, Fraction, Fraction]
    dist_undominated: tuple[Fraction, ...]
    dist_survivors: tuple[Fraction, ...]

    def mean_survivors(self) -> Fraction:
        return sum(
            (k * p for k, p in enumerate(self.dist_survivors, start=1)),
            start=Fraction(0),
        )

    def var_survivors(self) -> Fraction:
        mean = self.mean_survivors()
        second = sum(
            (k * k * p for k, p in enumerate(self.dist_survivors, start=1)),
            start=Fraction(0),
        )
        return second - mean * mean


def enumerate_2xn(n: int) -> ExactDistributionReport:
    """Run the elimination engine over every equiprobable 2 x n state.

    Because column labels never matter, the first column ranking can be fixed
    to the identity: the state space is the n! second rankings crossed with
    the 2^n per-column row orders, all equally likely.
    """
    if not 1 <= n <= MAX_FULL_2XN:
        raise CapacityError(f"enumerate_2xn supports 1 <= n <= {MAX_FULL_2XN}")
    identity = tuple(range(1, n + 1))
    # Row-rank matrices for every per-column pattern; bit j set means row 0
    # is the better row in column j.
    patterns = []
    for bits in range(1 << n):
        top = tuple(2 if bits >> j & 1 else 1 for j in range(n))
        bottom = tuple(3 - t for t in top)
        patterns.append((top, bottom))
    all_rows = (0, 1)
    all_cols = tuple(range(n))

    solvable_states = 0
    iteration_states = [0, 0, 0, 0]
    undominated_states = [0] * (n + 1)
    survivor_states = [0] * (n + 1)
    for c2 in itertools.permutations(identity):
        col_ranks = (identity, c2)
        for row_ranks in patterns:
            rounds, rows, cols, _, u_c = _run_elimination(
                row_ranks, col_ranks, all_rows, all_cols
            )
            undominated_states[u_c] += 1
            survivor_states[len(cols)] += 1
            if len(rows) == 1 and len(cols) == 1:
                solvable_states += 1
                iteration_states[len(rounds)] += 1
    total = math.factorial(n) * 2**n
    return ExactDistributionReport(
        n=n,
        total_states=total,
        solvable_probability=Fraction(solvable_states, total),
        dist_iterations=tuple(
            Fraction(iteration_states[i], solvable_states) for i in (1, 2, 3)
        ),
        dist_undominated=tuple(
            Fraction(undominated_states[k], total) for k in range(1, n + 1)
        ),
        dist_survivors=tuple(
            Fraction(survivor_states[k], total) for k in range(1, n + 1)
        ),
    )


def enumerate_undominated_3xn(n: int) -> list[int]:
    """Counts of second/third column-ranking pairs (first fixed to identity)
    leaving exactly k = 1..n column actions of a 3 x n game undominated.

    Enumerates all (n!)^2 pairs against the raw dominance definition; row
    sums are (n!)^2 and the counts generalize the unsigned Stirling numbers
    of the first kind.
    """
    if not 1 <= n <= MAX_UC_3XN:
        raise CapacityError(f"enumerate_undominated_3xn supports 1 <= n <= {MAX_UC_3XN}")
    perms = np.array(list(itertools.permutations(range(1, n + 1))), dtype=np.int16)
    counts = np.zeros(n + 1, dtype=np.int64)
    # With the first ranking equal to the identity, column j is dominated by
    # k > j exactly when both remaining rankings also prefer k.
    for c2 in itertools.permutations(range(1, n + 1)):
        dominated = np.zeros((perms.shape[0], n), dtype=bool)
        for j in range(n):
            for k in range(j + 1, n):
                if c2[k] > c2[j]:
                    dominated[:, j] |= perms[:, k] > perms[:, j]
        counts += np.bincount(n - dominated.sum(axis=1), minlength=n + 1)
    return counts[1:].tolist()


@dataclass(frozen=True)
class Class2x2Report:
    """Exact outcome distribution of a 2 x 2 game class.

    ``outcome_probs`` maps the ordinal game (row_ranks, col_ranks tuples) to
    its probability; the aggregates cover solvability, the iteration count
    and the surviving-count pair.
    """

    game_class: GameClass
    outcome_probs: dict[tuple, Fraction]
    solvable_probability: Fraction
    iteration_probs: dict[int, Fraction]
    survivor_pair_probs: dict[tuple[int, int], Fraction]


def _ordinal_key(game: OrdinalBimatrix) -> tuple:
    return (game.row_ranks, game.col_ranks)


def _int_cardinal(u_row, u_col) -> CardinalBimatrix:
    return CardinalBimatrix(
        [[float(x) for x in row] for row in u_row],
        [[float(x) for x in row] for row in u_col],
    )


def _class_2x2_states(game_class: GameClass):
    """Yield (ordinal game, weight) pairs over the class's discrete structure."""
    if game_class is GameClass.BASELINE:
        for bits_r in range(4):
            rr = [[0, 0], [0, 0]]
            for j in range(2):
                rr[0][j] = 2 if bits_r >> j & 1 else 1
                rr[1][j] = 3 - rr[0][j]
            for bits_c in range(4):
                cc = [[0, 0], [0, 0]]
                for i in range(2):
                    cc[i][0] = 2 if bits_c >> i & 1 else 1
                    cc[i][1] = 3 - cc[i][0]
                yield OrdinalBimatrix(rr, cc), 1
        return

    cells = list(itertools.permutations((1, 2, 3, 4)))

    def matrix(vals):
        return [[vals[0], vals[1]], [vals[2], vals[3]]]

    if game_class in (GameClass.SYMMETRIC, GameClass.POTENTIAL, GameClass.CONSTANT_SUM):
        for vals in cells:
            r = matrix(vals)
            if game_class is GameClass.SYMMETRIC:
                u_col = [[r[0][0], r[1][0]], [r[0][1], r[1][1]]]
            elif game_class is GameClass.POTENTIAL:
                u_col = r
            else:
                u_col = [[5 - x for x in row] for row in r]
            yield ordinalize(_int_cardinal(r, u_col)), 1
        return

    # Strategic complementarities: condition by rejection over the cell
    # orderings, the enumeration-side ground truth for the direct sampler.
    def br_rows_nondecreasing(r):
        best = [0 if r[0][j] > r[1][j] else 1 for j in range(2)]
        return best[0] <= best[1]

    def br_cols_nondecreasing(c):
        best = [0 if c[i][0] > c[i][1] else 1 for i in range(2)]
        return best[0] <= best[1]

    accepted_r = [matrix(v) for v in cells if br_rows_nondecreasing(matrix(v))]
    if game_class is GameClass.STRAT_COMPLEMENTS_SYM:
        for r in accepted_r:
            u_col = [[r[0][0], r[1][0]], [r[0][1], r[1][1]]]
            yield ordinalize(_int_cardinal(r, u_col)), 1
        return
    accepted_c = [matrix(v) for v in cells if br_cols_nondecreasing(matrix(v))]
    for r in accepted_r:
        for c in accepted_c:
            yield ordinalize(_int_cardinal(r, c)), 1


def enumerate_class_2x2(game_class: GameClass) -> Class2x2Report:
    """Exact distribution of (solvable, iterations, survivor pair) for 2 x 2
    games of the given class, by enumerating the underlying discrete
    structure (cell orderings, with rejection for the conditioned classes)."""
    outcome: dict[tuple, int] = {}
    solvable = 0
    iterations: dict[int, int] = {}
    pairs: dict[tuple[int, int], int] = {}
    total = 0
    for game, weight in _class_2x2_states(game_class):
        total += weight
        outcome[_ordinal_key(game)] = outcome.get(_ordinal_key(game), 0) + weight
        rounds, rows, cols, _, _ = _run_elimination(
            game.row_ranks, game.col_ranks, (0, 1), (0, 1)
        )
        if len(rows) == 1 and len(cols) == 1:
            solvable += weight
        iterations[len(rounds)] = iterations.get(len(rounds), 0) + weight
        key = (len(rows), len(cols))
        pairs[key] = pairs.get(key, 0) + weight
    return Class2x2Report(
        game_class=game_class,
        outcome_probs={k: Fraction(v, total) for k, v in outcome.items()},
        solvable_probability=Fraction(solvable, total),
        iteration_probs={k: Fraction(v, total) for k, v in iterations.items()},
        survivor_pair_probs={k: Fraction(v, total) for k, v in pairs.items()},
    )


def _simplex_grid(parts: int, resolution: int) -> np.ndarray:
    """All weight vectors with `parts` coordinates on the 1/resolution grid."""
    if parts == 1:
        return np.ones((1, 1))
    cuts = itertools.combinations(range(resolution + parts - 1), parts - 1)
    rows = []
    for cut in cuts:
        prev = -1
        weights = []
        for c in cut:
            weights.append(c - prev - 1)
            prev = c
        weights.append(resolution + parts - 2 - prev)
        rows.append(weights)
    return np.array(rows, dtype=float) / resolution


def grid_mixed_dominance_oracle(
    game: CardinalBimatrix,
    player: int,
    action: int,
    own: tuple[int, ...] | None = None,
    opp: tuple[int, ...] | None = None,
    resolution: float = 1 / 200,
) -> bool:
    """One-sided mixed-dominance check on a simplex grid.

    True certifies that some grid mixture of the player's other actions in
    ``own`` strictly dominates ``action`` on ``opp``; False only means no
    grid point does, which with a fine grid flags (rather than refutes) a
    borderline LP verdict.
    """
    payoffs = np.array(game.u_row) if player == ROW else np.array(game.u_col).T
    own = tuple(range(payoffs.shape[0])) if own is None else tuple(sorted(own))
    opp = tuple(range(payoffs.shape[1])) if opp is None else tuple(sorted(opp))
    if action not in own:
        raise ValueError("action must belong to own set")
    others = [k for k in own if k != action]
    if len(others) > 3:
        raise CapacityError("grid oracle supports |own| <= 4")
    if not others:
        return False
    steps = round(1 / resolution)
    grid = _simplex_grid(len(others), steps)
    margins = grid @ payoffs[np.ix_(others, opp)] - payoffs[action, list(opp)]
    return bool((margins > 0).all(axis=1).any())


def enumerate_point_rat_2x2() -> Fraction:
    """Probability that a random 2 x 2 game has a unique point-rationalizable
    profile, by enumerating all 16 equiprobable ordinal states."""
    unique = 0
    total = 0
    for game, weight in _class_2x2_states(GameClass.BASELINE):
        total += weight
        rat_rows, rat_cols = point_rationalizable_sets(game)
        if len(rat_rows) == 1 and len(rat_cols) == 1:
            unique += weight
    return Fraction(unique, total)
