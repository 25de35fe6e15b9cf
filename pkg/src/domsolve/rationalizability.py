"""Mixed-strategy strict dominance, rationalizability, and
point-rationalizability.

Mixed dominance is decided by a small linear program: maximize the minimum
payoff gap of a mixture of the player's other surviving actions over the
target action. Every positive verdict is re-verified with direct dot
products before it is returned, so a solver malfunction can only surface as
an explicit error, never as a silently wrong certificate. Verdicts with a
gap inside the tolerance are conservatively classified "not dominated".

Point-rationalizability (iterated deletion of actions that are never a best
response to any surviving pure opponent action) is an ordinal notion and
operates on :class:`OrdinalBimatrix`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .elimination import iterate
from .games import COL, ROW, CardinalBimatrix, OrdinalBimatrix, ordinalize

_VERIFY_SLACK = 1e-9


class LPSolveError(RuntimeError):
    """The dominance LP failed or its certificate did not re-verify."""


@dataclass(frozen=True)
class MixedCertificate:
    """A mixture strictly dominating some action.

    ``support[i]`` carries probability ``weights[i]``; ``margin`` is the
    re-verified minimum payoff gap over the opponent set used in the check.
    """

    support: tuple[int, ...]
    weights: tuple[float, ...]
    margin: float

    def __post_init__(self):
        if len(self.support) != len(self.weights):
            raise ValueError("support and weights must align")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        if self.margin <= 0:
            raise ValueError("margin must be positive")


@dataclass(frozen=True)
class RationalizabilityReport:
    """Surviving sets under the three nested solution concepts.

    Per player: point-rationalizable ⊆ rationalizable ⊆ pure survivors.
    """

    rationalizable: tuple[tuple[int, ...], tuple[int, ...]]
    point_rationalizable: tuple[tuple[int, ...], tuple[int, ...]]
    pure_survivors: tuple[tuple[int, ...], tuple[int, ...]]
    mixed_solvable: bool
    mixed_iterations: int

    def __post_init__(self):
        for k in (ROW, COL):
            inner = set(self.point_rationalizable[k])
            mid = set(self.rationalizable[k])
            outer = set(self.pure_survivors[k])
            if not (inner <= mid <= outer):
                raise ValueError("inclusion chain violated")


def _payoff_view(game: CardinalBimatrix, player: int) -> np.ndarray:
    """(own actions) x (opponent actions) payoff matrix for ``player``."""
    if player == ROW:
        return np.array(game.u_row, dtype=float)
    return np.array(game.u_col, dtype=float).T


def _default_tol(payoffs: np.ndarray) -> float:
    scale = float(np.abs(payoffs).max()) if payoffs.size else 1.0
    return 1e-9 * max(1.0, scale)


def is_mixed_dominated(
    game: CardinalBimatrix,
    player: int,
    action: int,
    own: tuple[int, ...] | None = None,
    opp: tuple[int, ...] | None = None,
    tol: float | None = None,
) -> MixedCertificate | None:
    """Certificate that ``action`` is strictly dominated by a mixture of the
    other actions in ``own`` against ``opp``, or None.

    Solves max eps s.t. sigma . u(., j) >= u(action, j) + eps for all j in
    opp, sigma a distribution over own minus {action}.
    """
    payoffs = _payoff_view(game, player)
    own_size, opp_size = payoffs.shape
    own = tuple(range(own_size)) if own is None else tuple(sorted(own))
    opp = tuple(range(opp_size)) if opp is None else tuple(sorted(opp))
    if action not in own:
        raise ValueError("action must belong to own set")
    if len(own) < 2 or not opp:
        raise ValueError("need at least two own actions and a nonempty opponent set")
    if any(not 0 <= j < opp_size for j in opp):
        raise ValueError("opponent action out of range")
    others = [k for k in own if k != action]
    sub = payoffs[np.ix_(others, opp)]
    target = payoffs[action, list(opp)]
    if tol is None:
        tol = _default_tol(payoffs[np.ix_(own, opp)])

    k = len(others)
    c = np.zeros(k + 1)
    c[-1] = -1.0  # maximize eps
    a_ub = np.hstack([-sub.T, np.ones((len(opp), 1))])
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=-target,
        A_eq=np.hstack([np.ones((1, k)), np.zeros((1, 1))]),
        b_eq=[1.0],
        bounds=[(0, None)] * k + [(None, None)],
        method="highs",
    )
    if not res.success:
        raise LPSolveError(
            f"dominance LP failed (status {res.status}): {res.message}"
        )
    if -res.fun <= tol:
        return None
    sigma = np.clip(res.x[:k], 0.0, None)
    sigma /= sigma.sum()
    margins = sigma @ sub - target
    margin = float(margins.min())
    if margin <= tol:
        # Solver-optimistic gap that does not survive exact re-evaluation:
        # keep the action (strictness is conservative).
        return None
    if margin < -res.fun - 1e-6:
        raise LPSolveError("certificate failed re-verification")
    return MixedCertificate(
        support=tuple(others), weights=tuple(float(w) for w in sigma), margin=margin
    )


def _pure_dominated(payoffs: np.ndarray, action: int, own: list[int], opp: list[int]) -> bool:
    target = payoffs[action, opp]
    return any(
        (payoffs[b, opp] > target).all() for b in own if b != action
    )


def _best_response_actions(payoffs: np.ndarray, own: list[int], opp: list[int]) -> set[int]:
    sub = payoffs[np.ix_(own, opp)]
    return {own[i] for i in sub.argmax(axis=0)}


def rationalizable_sets(
    game: CardinalBimatrix, tol: float | None = None
) -> RationalizabilityReport:
    """Iterated simultaneous deletion of mixed-dominated actions, plus the
    pure and point-rationalizable sets of the same game.

    A best response to a surviving pure opponent action is never strictly
    dominated, so those actions skip the LP; purely dominated actions are
    removed without an LP as well.
    """
    views = {ROW: _payoff_view(game, ROW), COL: _payoff_view(game, COL)}
    alive = {ROW: list(range(game.m)), COL: list(range(game.n))}
    rounds = 0
    while True:
        removals: dict[int, list[int]] = {}
        for player in (ROW, COL):
            own = alive[player]
            opp = alive[COL if player == ROW else ROW]
            if len(own) < 2:
                continue
            payoffs = views[player]
            safe = _best_response_actions(payoffs, own, opp)
            removed = []
            for action in own:
                if action in safe:
                    continue
                if _pure_dominated(payoffs, action, own, opp):
                    removed.append(action)
                elif is_mixed_dominated(game, player, action, tuple(own), tuple(opp), tol):
                    removed.append(action)
            if removed:
                removals[player] = removed
        if not removals:
            break
        rounds += 1
        for player, removed in removals.items():
            gone = set(removed)
            alive[player] = [a for a in alive[player] if a not in gone]
    ordinal = ordinalize(game)
    return RationalizabilityReport(
        rationalizable=(tuple(alive[ROW]), tuple(alive[COL])),
        point_rationalizable=point_rationalizable_sets(ordinal),
        pure_survivors=iterate(ordinal).surviving,
        mixed_solvable=len(alive[ROW]) == 1 and len(alive[COL]) == 1,
        mixed_iterations=rounds,
    )


def point_rationalizable_sets(
    game: OrdinalBimatrix,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Iterated simultaneous deletion of actions that are not a best response
    to any surviving pure opponent action, until a fixpoint."""
    row_ranks = np.array(game.row_ranks)
    col_ranks = np.array(game.col_ranks)
    rows = list(range(game.m))
    cols = list(range(game.n))
    while True:
        row_br = {rows[int(i)] for i in row_ranks[np.ix_(rows, cols)].argmax(axis=0)}
        col_br = {cols[int(j)] for j in col_ranks[np.ix_(rows, cols)].argmax(axis=1)}
        new_rows = [r for r in rows if r in row_br]
        new_cols = [c for c in cols if c in col_br]
        if len(new_rows) == len(rows) and len(new_cols) == len(cols):
            return tuple(rows), tuple(cols)
        rows, cols = new_rows, new_cols
