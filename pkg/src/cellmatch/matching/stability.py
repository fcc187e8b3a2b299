"""Swap-stability checker and brute-force enumeration of stable matchings.

A matching is blocked by

* a move of UE m from SBS i to SBS j, judged by the players m, i and j, or
* an exchange in which UE m at i and UE n at j trade places, judged by
  m, n, i and j,

when every judging player is at least as well off, at least one is strictly
better off, and every newly created link meets the rate, delay and PER
constraints. An SBS's utility is the sum of the utilities of its UEs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .compare import ge, gt
from .game import CONTEXT_AWARE, AssociationGame, Matching

MAX_ENUMERATION = 100_000


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class BlockingSwap:
    kind: str          # "move" or "exchange"
    ue: int
    from_sbs: int
    to_sbs: int
    partner: int | None = None
    gains: tuple[tuple[str, float], ...] = ()

    def to_dict(self) -> dict:
        return {"kind": self.kind, "ue": self.ue, "from_sbs": self.from_sbs,
                "to_sbs": self.to_sbs, "partner": self.partner,
                "gains": dict(self.gains)}


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    witness: BlockingSwap | None = None

    def __bool__(self) -> bool:
        return self.stable


def _approved(before, after) -> bool:
    before = np.asarray(before, dtype=float)
    after = np.asarray(after, dtype=float)
    return bool(np.all(ge(after, before)) and np.any(gt(after, before)))


def blocking_move(game: AssociationGame, a: np.ndarray, u: np.ndarray, m: int, j: int):
    """Return the BlockingSwap if moving m to j blocks ``a``, else None."""
    i = int(a[m])
    if j == i or not game.discovery[m, j] or not game.has_room(j, a, ue=m):
        return None
    a2 = a.copy()
    a2[m] = j
    s2 = game.evaluate(a2)
    if not s2.feasible[m]:
        return None
    u2 = s2.utility
    before = [u[m], u[a == i].sum(), u[a == j].sum()]
    after = [u2[m], u2[a2 == i].sum(), u2[a2 == j].sum()]
    if _approved(before, after):
        gains = tuple(zip(("ue", "from_sbs", "to_sbs"), np.subtract(after, before).tolist()))
        return BlockingSwap("move", m, i, j, None, gains)
    return None


def blocking_exchange(game: AssociationGame, a: np.ndarray, u: np.ndarray, m: int, n: int):
    """Exact check of the exchange of m and n by re-evaluating the network."""
    i, j = int(a[m]), int(a[n])
    if i == j or not (game.discovery[m, j] and game.discovery[n, i]):
        return None
    a2 = a.copy()
    a2[m], a2[n] = j, i
    s2 = game.evaluate(a2)
    if not (s2.feasible[m] and s2.feasible[n]):
        return None
    u2 = s2.utility
    before = [u[m], u[n], u[a == i].sum(), u[a == j].sum()]
    after = [u2[m], u2[n], u2[a2 == i].sum(), u2[a2 == j].sum()]
    if _approved(before, after):
        gains = tuple(zip(("ue", "partner", "from_sbs", "to_sbs"), np.subtract(after, before).tolist()))
        return BlockingSwap("exchange", m, i, j, n, gains)
    return None


def exchange_candidates(game: AssociationGame, a: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Boolean M x M mask of blocking exchanges (m, n), context-aware model only.

    Under the context-aware delay model an exchange leaves every bystander
    unchanged, so the whole test reduces to table lookups.
    """
    if game.mode != CONTEXT_AWARE:
        raise ValueError("the closed-form exchange test needs the context-aware model")
    X = game.exchange_matrix(a)
    new = X.utility[:, a]               # new[m, n]: m at n's SBS
    feas = (X.feasible & game.discovery)[:, a]
    new_t = new.T                       # new_t[m, n]: n at m's SBS
    um = u[:, None]
    un = u[None, :]
    # players: m, n, SBS of m (swaps m for n), SBS of n (swaps n for m)
    before = (um, un, um, un)
    after = (new, new_t, new_t, new)
    weak = np.ones_like(new, dtype=bool)
    strict = np.zeros_like(new, dtype=bool)
    for b, x in zip(before, after):
        weak &= ge(x, b)
        strict |= gt(x, b)
    mask = weak & strict & feas & feas.T & (a[:, None] != a[None, :])
    return np.triu(mask, k=1)


def is_swap_stable(game: AssociationGame, matching, exact: bool = True) -> StabilityReport:
    """Check a matching for blocking moves and exchanges.

    With ``exact=False`` and the context-aware model, exchanges are screened
    in closed form and only the flagged pairs are re-evaluated.
    """
    a = np.asarray(matching.assignment if isinstance(matching, Matching) else matching, dtype=int)
    u = game.ue_utilities(a)
    for m in range(game.M):
        for j in range(game.N):
            w = blocking_move(game, a, u, m, j)
            if w is not None:
                return StabilityReport(False, w)
    if not exact and game.mode == CONTEXT_AWARE:
        pairs = zip(*np.nonzero(exchange_candidates(game, a, u)))
    else:
        pairs = itertools.combinations(range(game.M), 2)
    for m, n in pairs:
        w = blocking_exchange(game, a, u, int(m), int(n))
        if w is not None:
            return StabilityReport(False, w)
    return StabilityReport(True)


def brute_force_stable(game: AssociationGame) -> list[Matching]:
    """Enumerate every assignment and keep the swap-stable ones."""
    total = game.N ** game.M
    if total > MAX_ENUMERATION:
        raise InstanceTooLarge(f"{game.N}^{game.M} = {total} matchings exceeds {MAX_ENUMERATION}")
    out = []
    for combo in itertools.product(range(game.N), repeat=game.M):
        if game.cfg.sbs_quota is not None and max(np.bincount(combo)) > game.cfg.sbs_quota:
            continue
        if is_swap_stable(game, combo):
            out.append(Matching(combo, game.N))
    return out
