"""Pure-strategy strict dominance and iterated elimination.

The engine deletes simultaneously: in every round each player removes all of
her currently strictly dominated actions relative to the current surviving
sets. The number of iterations is the number of rounds in which at least one
action was deleted, so a game with no dominated action at all has 0
iterations. Final survivors do not depend on deletion order (see
:func:`iterate_random_order`, used by the test suite to confirm this).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .games import (
    COL,
    ROW,
    OrdinalBimatrix,
    OrdinalTensorGame,
    opponent_profile_index,
)

Matrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class EliminationTrace:
    """Round-by-round record of an iterated elimination run.

    ``rounds[r][k]`` is the sorted tuple of player ``k``'s actions removed in
    round ``r``; every recorded round removes at least one action in total.
    """

    rounds: tuple[tuple[tuple[int, ...], ...], ...]
    surviving: tuple[tuple[int, ...], ...]

    @property
    def iterations(self) -> int:
        return len(self.rounds)

    @property
    def solvable(self) -> bool:
        return all(len(s) == 1 for s in self.surviving)

    def removed(self, player: int) -> tuple[int, ...]:
        """All actions of ``player`` removed over the whole run, in deletion order."""
        out: list[int] = []
        for rnd in self.rounds:
            out.extend(rnd[player])
        return tuple(out)

    def to_json_dict(self) -> dict:
        return {
            "rounds": [
                [
                    {"player": k, "removed": list(removed)}
                    for k, removed in enumerate(rnd)
                    if removed
                ]
                for rnd in self.rounds
            ],
            "surviving": [list(s) for s in self.surviving],
            "iterations": self.iterations,
            "solvable": self.solvable,
        }


def _dominated_rows(row_ranks: Matrix, rows: Sequence[int], cols: Sequence[int]) -> list[int]:
    out = []
    for a in rows:
        ra = row_ranks[a]
        for b in rows:
            if b == a:
                continue
            rb = row_ranks[b]
            if all(rb[j] > ra[j] for j in cols):
                out.append(a)
                break
    return out


def _dominated_cols(col_ranks: Matrix, rows: Sequence[int], cols: Sequence[int]) -> list[int]:
    out = []
    for a in cols:
        for b in cols:
            if b == a:
                continue
            if all(col_ranks[i][b] > col_ranks[i][a] for i in rows):
                out.append(a)
                break
    return out


def _run_elimination(
    row_ranks: Matrix,
    col_ranks: Matrix,
    rows: Sequence[int],
    cols: Sequence[int],
):
    """Simultaneous-deletion fixpoint restricted to initial sets ``rows``/``cols``.

    Returns (rounds, surviving_rows, surviving_cols, undominated_row_count,
    undominated_col_count), the U-counts taken from the first round.
    """
    rows = list(rows)
    cols = list(cols)
    rounds: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    u_r = u_c = None
    while True:
        dr = _dominated_rows(row_ranks, rows, cols)
        dc = _dominated_cols(col_ranks, rows, cols)
        if u_r is None:
            u_r = len(rows) - len(dr)
            u_c = len(cols) - len(dc)
        if not dr and not dc:
            break
        rounds.append((tuple(dr), tuple(dc)))
        if dr:
            gone = set(dr)
            rows = [r for r in rows if r not in gone]
        if dc:
            gone = set(dc)
            cols = [c for c in cols if c not in gone]
    return rounds, rows, cols, u_r, u_c


def _check_action_sets(game: OrdinalBimatrix, player: int, own, opp):
    m, n = game.m, game.n
    own_size, opp_size = (m, n) if player == ROW else (n, m)
    own = tuple(range(own_size)) if own is None else tuple(sorted(own))
    opp = tuple(range(opp_size)) if opp is None else tuple(sorted(opp))
    if not own or not opp:
        raise ValueError("action sets must be nonempty")
    if any(not 0 <= a < own_size for a in own) or any(not 0 <= a < opp_size for a in opp):
        raise ValueError("action index out of range")
    return own, opp


def strictly_dominates(
    game: OrdinalBimatrix,
    player: int,
    a: int,
    b: int,
    opp: Sequence[int] | None = None,
) -> bool:
    """True iff ``player``'s action ``a`` beats ``b`` against every opponent
    action in ``opp`` (defaults to the opponent's full set)."""
    if a == b:
        raise ValueError("an action cannot dominate itself")
    own, opp = _check_action_sets(game, player, (a, b), opp)
    if player == ROW:
        return all(game.row_ranks[a][j] > game.row_ranks[b][j] for j in opp)
    return all(game.col_ranks[i][a] > game.col_ranks[i][b] for i in opp)


def undominated(
    game: OrdinalBimatrix,
    player: int,
    own: Sequence[int] | None = None,
    opp: Sequence[int] | None = None,
) -> tuple[int, ...]:
    """Actions in ``own`` not strictly dominated within ``own`` against ``opp``."""
    own, opp = _check_action_sets(game, player, own, opp)
    if player == ROW:
        dom = set(_dominated_rows(game.row_ranks, own, opp))
    else:
        dom = set(_dominated_cols(game.col_ranks, opp, own))
    return tuple(a for a in own if a not in dom)


def iterate(game: OrdinalBimatrix) -> EliminationTrace:
    """Iterated elimination of strictly dominated actions, both players
    deleting simultaneously each round."""
    rounds, rows, cols, _, _ = _run_elimination(
        game.row_ranks, game.col_ranks, range(game.m), range(game.n)
    )
    return EliminationTrace(
        rounds=tuple(rounds), surviving=(tuple(rows), tuple(cols))
    )


def iterate_random_order(
    game: OrdinalBimatrix, rng: np.random.Generator
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Delete one uniformly chosen dominated action at a time until none is
    left; returns the surviving sets. Used to confirm order independence."""
    rows = list(range(game.m))
    cols = list(range(game.n))
    while True:
        cand = [(ROW, a) for a in _dominated_rows(game.row_ranks, rows, cols)]
        cand += [(COL, a) for a in _dominated_cols(game.col_ranks, rows, cols)]
        if not cand:
            return tuple(rows), tuple(cols)
        player, action = cand[int(rng.integers(len(cand)))]
        (rows if player == ROW else cols).remove(action)


def count_pure_nash(game: OrdinalBimatrix) -> int:
    """Number of cells that are mutual best responses."""
    m, n = game.m, game.n
    return sum(
        1
        for i in range(m)
        for j in range(n)
        if game.row_ranks[i][j] == m and game.col_ranks[i][j] == n
    )


@dataclass(frozen=True)
class GameMetrics:
    """The dominance summary of one game: undominated counts ``u_r``/``u_c``
    (one round), surviving counts ``s_r``/``s_c``, iterations and solvability."""

    u_r: int
    u_c: int
    s_r: int
    s_c: int
    iterations: int
    solvable: bool


def metrics(game: OrdinalBimatrix) -> GameMetrics:
    rounds, rows, cols, u_r, u_c = _run_elimination(
        game.row_ranks, game.col_ranks, range(game.m), range(game.n)
    )
    return GameMetrics(
        u_r=u_r,
        u_c=u_c,
        s_r=len(rows),
        s_c=len(cols),
        iterations=len(rounds),
        solvable=len(rows) == 1 and len(cols) == 1,
    )


def subgame(game: OrdinalBimatrix, rows: Sequence[int], cols: Sequence[int]) -> OrdinalBimatrix:
    """Restriction of ``game`` to the given actions, with ranks recomputed."""
    rows = sorted(rows)
    cols = sorted(cols)
    rr = np.array(game.row_ranks)[np.ix_(rows, cols)]
    cc = np.array(game.col_ranks)[np.ix_(rows, cols)]
    rr = rr.argsort(axis=0).argsort(axis=0) + 1
    cc = cc.argsort(axis=1).argsort(axis=1) + 1
    return OrdinalBimatrix(rr.tolist(), cc.tolist())


def solvable_subgame(
    game: OrdinalBimatrix, m_target: int, n_target: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Row/column subsets of a solvable game forming a solvable subgame of
    the requested size.

    Works greedily: while a side is too large, drop the first action of that
    side that gets eliminated when iterating the current subgame. Deleting an
    action that the elimination process would have removed anyway leaves the
    final survivors (hence solvability) unchanged.
    """
    if not iterate(game).solvable:
        raise ValueError("game is not solvable")
    if not 1 <= m_target <= game.m or not 1 <= n_target <= game.n:
        raise ValueError("target size out of range")
    rows = list(range(game.m))
    cols = list(range(game.n))
    while len(rows) > m_target or len(cols) > n_target:
        rounds, _, _, _, _ = _run_elimination(game.row_ranks, game.col_ranks, rows, cols)
        if len(rows) > m_target:
            removed = next(r for rnd in rounds for r in rnd[ROW])
            rows.remove(removed)
        if len(cols) > n_target:
            rounds, _, _, _, _ = _run_elimination(
                game.row_ranks, game.col_ranks, rows, cols
            )
            removed = next(c for rnd in rounds for c in rnd[COL])
            cols.remove(removed)
    return tuple(rows), tuple(cols)


def _tensor_dominated(
    ranks: tuple[tuple[int, ...], ...],
    own: Sequence[int],
    profiles: Sequence[int],
) -> list[int]:
    out = []
    for a in own:
        for b in own:
            if b == a:
                continue
            if all(ranks[p][b] > ranks[p][a] for p in profiles):
                out.append(a)
                break
    return out


def _alive_profiles(game: OrdinalTensorGame, player: int, alive: list[list[int]]) -> list[int]:
    others = [k for k in range(game.player_count) if k != player]
    out = []
    for combo in itertools.product(*(alive[k] for k in others)):
        actions = [0] * game.player_count
        for k, a in zip(others, combo):
            actions[k] = a
        out.append(opponent_profile_index(game.dims, player, actions))
    return out


def iterate_nplayer(game: OrdinalTensorGame) -> EliminationTrace:
    """Simultaneous-deletion iterated elimination for N-player tensor games.

    An action is dominated iff some other currently alive own action beats it
    at every currently alive opponent profile.
    """
    alive: list[list[int]] = [list(range(d)) for d in game.dims]
    rounds: list[tuple[tuple[int, ...], ...]] = []
    while True:
        removals = []
        for k in range(game.player_count):
            profiles = _alive_profiles(game, k, alive)
            removals.append(tuple(_tensor_dominated(game.ranks[k], alive[k], profiles)))
        if not any(removals):
            break
        rounds.append(tuple(removals))
        for k, rem in enumerate(removals):
            if rem:
                gone = set(rem)
                alive[k] = [a for a in alive[k] if a not in gone]
    return EliminationTrace(
        rounds=tuple(rounds), surviving=tuple(tuple(a) for a in alive)
    )


def undominated_nplayer(game: OrdinalTensorGame, player: int) -> tuple[int, ...]:
    """Player's actions undominated in the full game (one round)."""
    alive = [list(range(d)) for d in game.dims]
    profiles = _alive_profiles(game, player, alive)
    dom = set(_tensor_dominated(game.ranks[player], alive[player], profiles))
    return tuple(a for a in alive[player] if a not in dom)
