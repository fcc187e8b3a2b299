"""Distributed swap-matching association (discovery, swap evaluation, allocation)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..scenario import ScenarioConfig, Topology, scenario_streams
from .compare import gt
from .game import CONTEXT_AWARE, AssociationGame, Matching, UtilityBreakdown
from .stability import blocking_exchange, exchange_candidates

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SwapRecord:
    kind: str                 # "move" or "exchange"
    round: int
    ue: int
    from_sbs: int
    to_sbs: int
    partner: int | None
    players_before: float     # summed utility of the deciding players
    players_after: float
    new_links_feasible: bool


@dataclass
class AlgorithmStats:
    rounds: int = 0
    proposals: int = 0
    accepts: int = 0
    rejections: int = 0
    exchanges: int = 0
    converged: bool = False
    hit_round_cap: bool = False
    per_ue_iterations: list[int] = field(default_factory=list)
    swap_log: list[SwapRecord] = field(default_factory=list)

    @property
    def mean_iterations(self) -> float:
        return float(np.mean(self.per_ue_iterations)) if self.per_ue_iterations else 0.0

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds, "proposals": self.proposals, "accepts": self.accepts,
            "rejections": self.rejections, "exchanges": self.exchanges,
            "converged": self.converged, "hit_round_cap": self.hit_round_cap,
            "mean_iterations_per_ue": self.mean_iterations,
            "per_ue_iterations": list(self.per_ue_iterations),
        }


@dataclass
class AssociationResult:
    matching: Matching
    stats: AlgorithmStats
    links: list[UtilityBreakdown]

    def __iter__(self):
        # allows ``matching, stats = run_algorithm1(...)``
        return iter((self.matching, self.stats))


def initial_assignment(game: AssociationGame, rng: np.random.Generator,
                       how: str | None = None) -> np.ndarray:
    """Starting point of phase II: the closest SBS, or a uniformly drawn
    SBS among those the UE can discover."""
    how = how or game.cfg.initial_association
    closest = np.argmin(game.topology.distance, axis=1)
    if how == "closest":
        return closest.astype(int)
    a = np.empty(game.M, dtype=int)
    for m in range(game.M):
        options = np.flatnonzero(game.discovery[m])
        if options.size == 0:
            options = closest[m:m + 1]
        a[m] = options[rng.integers(options.size)]
    return a


def _proposal_pass(game, a, u, stats, rnd) -> int:
    accepted = 0
    for m in range(game.M):
        i = int(a[m])
        pros = game.prospective(m, a)
        pu = pros.utility
        better = np.flatnonzero(game.discovery[m] & gt(pu, pu[i]))
        better = better[better != i]
        # preference order: utility descending, SBS index ascending on ties
        order = better[np.lexsort((better, -pu[better]))]
        for j in order:
            j = int(j)
            if not game.has_room(j, a, ue=m):
                continue
            stats.proposals += 1
            stats.per_ue_iterations[m] += 1
            a2 = a.copy()
            a2[m] = j
            u2 = game.ue_utilities(a2)
            old_j = u[a == j].sum()
            new_j = u2[a2 == j].sum()
            if pros.feasible[j] and gt(new_j, old_j):
                stats.accepts += 1
                stats.swap_log.append(SwapRecord(
                    "move", rnd, m, i, j, None,
                    float(u[m] + old_j), float(u2[m] + new_j), bool(pros.feasible[j])))
                a[:] = a2
                u[:] = u2
                accepted += 1
                break
            stats.rejections += 1
    return accepted


def _exchange_pass(game, a, u, stats, rnd) -> int:
    done = 0
    while True:
        if game.mode == CONTEXT_AWARE:
            pairs = list(zip(*np.nonzero(exchange_candidates(game, a, u))))
        else:
            pairs = [(m, n) for m in range(game.M) for n in range(m + 1, game.M)]
        applied = False
        for m, n in pairs:
            w = blocking_exchange(game, a, u, int(m), int(n))
            if w is None:
                continue
            i, j = int(a[m]), int(a[n])
            before = u[m] + u[n] + u[a == i].sum() + u[a == j].sum()
            a[m], a[n] = j, i
            u[:] = game.ue_utilities(a)
            after = u[m] + u[n] + u[a == i].sum() + u[a == j].sum()
            stats.exchanges += 1
            stats.swap_log.append(SwapRecord("exchange", rnd, int(m), i, j, int(n),
                                             float(before), float(after), True))
            done += 1
            applied = True
            break
        if not applied:
            return done


def run_algorithm1(cfg: ScenarioConfig, topology: Topology, contexts,
                   rng: np.random.Generator | None = None,
                   game: AssociationGame | None = None,
                   initial=None) -> AssociationResult:
    """Run the association game to a swap-stable matching.

    Phase I (discovery and metric exchange) is direct data access here.
    Phase II repeats rounds in which every UE, in index order, proposes to
    the SBSs it strictly prefers to its current one, best first, until one
    accepts. An SBS accepts only if its own utility strictly increases and
    the new link meets the QoS constraints. When a round produces no
    accepted proposal, pairwise exchanges approved by all four players are
    applied; the phase ends once a round changes nothing or the round cap
    is reached. Phase III returns the per-link metrics.
    """
    if game is None:
        game = AssociationGame(cfg, topology, contexts, mode=CONTEXT_AWARE)
    if rng is None:
        rng = scenario_streams(cfg.rng_seed)[2]
    a = initial_assignment(game, rng) if initial is None else np.array(initial, dtype=int)
    u = game.ue_utilities(a)
    stats = AlgorithmStats(per_ue_iterations=[0] * game.M)

    for rnd in range(1, cfg.max_phase2_rounds + 1):
        stats.rounds = rnd
        changed = _proposal_pass(game, a, u, stats, rnd)
        if not changed and cfg.exchange_swaps:
            changed = _exchange_pass(game, a, u, stats, rnd)
        if not changed:
            stats.converged = True
            break
    else:
        stats.hit_round_cap = True
        log.warning("phase II hit the round cap (%d) without converging", cfg.max_phase2_rounds)

    links = game.breakdowns(a)
    return AssociationResult(Matching.from_array(a, game.N), stats, links)
