"""Composite utility, QoS feasibility and preferences of the association game.

Utilities are evaluated on an explicit assignment vector (UE index -> SBS
index). Every quantity that couples links (interference from active SBSs,
the equal bandwidth split, and in the context-unaware model the aggregate
SBS load) is derived from that vector, so evaluating a hypothetical move is
just evaluating a modified copy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..context import UeContext
from ..queueing import priority_delays, uniform_delays
from ..scenario import ScenarioConfig, Topology

CONTEXT_AWARE = "context_aware"
UNIFORM = "uniform"

RATE = "rate"
DELAY = "delay"
PER = "per"


@dataclass(frozen=True)
class Matching:
    """Many-to-one assignment of UEs to SBSs."""

    assignment: tuple[int, ...]
    num_sbss: int

    def __post_init__(self):
        a = tuple(int(x) for x in self.assignment)
        if any(not 0 <= x < self.num_sbss for x in a):
            raise ValueError("assignment references an unknown SBS")
        object.__setattr__(self, "assignment", a)

    @classmethod
    def from_array(cls, arr, num_sbss: int) -> Matching:
        return cls(tuple(int(x) for x in arr), num_sbss)

    def __getitem__(self, ue: int) -> int:
        return self.assignment[ue]

    def __len__(self) -> int:
        return len(self.assignment)

    @property
    def served_sets(self) -> list[frozenset[int]]:
        sets = [set() for _ in range(self.num_sbss)]
        for m, i in enumerate(self.assignment):
            sets[i].add(m)
        return [frozenset(s) for s in sets]

    def as_array(self) -> np.ndarray:
        return np.array(self.assignment, dtype=int)

    def moved(self, ue: int, sbs: int) -> Matching:
        a = list(self.assignment)
        a[ue] = sbs
        return Matching(tuple(a), self.num_sbss)

    def exchanged(self, m: int, n: int) -> Matching:
        a = list(self.assignment)
        a[m], a[n] = a[n], a[m]
        return Matching(tuple(a), self.num_sbss)


@dataclass(frozen=True)
class UtilityBreakdown:
    ue: int
    sbs: int
    sinr: float
    bandwidth_hz: float
    rate_bps: float
    per: float
    per_priority_delays: tuple[float, ...]
    utility: float
    violations: tuple[str, ...] = field(default=())

    @property
    def feasible(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "ue": self.ue, "sbs": self.sbs, "sinr": self.sinr,
            "bandwidth_hz": self.bandwidth_hz, "rate_bps": self.rate_bps,
            "per": self.per, "per_priority_delays_s": list(self.per_priority_delays),
            "utility": self.utility, "feasible": self.feasible,
            "violations": list(self.violations),
        }


@dataclass
class Scores:
    """Vectorised evaluation of a batch of (UE, SBS) links."""

    sinr: np.ndarray
    bandwidth: np.ndarray
    capacity: np.ndarray
    per: np.ndarray
    delays: np.ndarray        # (n, K) by priority rank, NaN for padding
    utility: np.ndarray
    rate_ok: np.ndarray
    delay_ok: np.ndarray
    per_ok: np.ndarray

    @property
    def feasible(self) -> np.ndarray:
        return self.rate_ok & self.delay_ok & self.per_ok


class AssociationGame:
    """Everything needed to score links of one scenario.

    ``mode`` selects the delay model: ``"context_aware"`` uses per-UE
    priority queues, ``"uniform"`` the FIFO delay over the aggregate load of
    the serving SBS.
    """

    def __init__(self, cfg: ScenarioConfig, topology: Topology,
                 contexts: Sequence[UeContext], mode: str = CONTEXT_AWARE,
                 tx_power_w=None):
        if mode not in (CONTEXT_AWARE, UNIFORM):
            raise ValueError(f"unknown scoring mode {mode!r}")
        if len(contexts) != topology.num_ues:
            raise ValueError("one context per UE is required")
        self.cfg = cfg
        self.topology = topology
        self.contexts = list(contexts)
        self.mode = mode
        self.M = topology.num_ues
        self.N = topology.num_sbss
        p = cfg.tx_power_w if tx_power_w is None else tx_power_w
        self.power = np.broadcast_to(np.asarray(p, dtype=float), (self.N,)).copy()
        self.rx = topology.gain * self.power[None, :]   # received power, W
        self.noise = cfg.noise_w
        self.threshold = cfg.sinr_threshold
        self.bandwidth = cfg.total_bandwidth_hz

        K = max(c.num_apps for c in self.contexts)
        self.num_apps = np.array([c.num_apps for c in self.contexts])
        self.rates = np.zeros((self.M, K))
        self.delay_bounds = np.full((self.M, K), np.inf)
        self.pad = np.ones((self.M, K), dtype=bool)
        for m, c in enumerate(self.contexts):
            self.rates[m, :c.num_apps] = c.rates_by_rank()
            self.delay_bounds[m, :c.num_apps] = c.delay_bounds_by_rank()
            self.pad[m, :c.num_apps] = False
        self.load = self.rates.sum(axis=1)
        if cfg.rate_constraint == "sum":
            self.required_rate = np.array([c.total_rate_bps for c in self.contexts])
        else:
            self.required_rate = np.array([c.required_rate_bps for c in self.contexts])
        self.per_bound = np.array([c.per_bound for c in self.contexts])

        if cfg.discovery_radius_m is None:
            self.discovery = np.ones((self.M, self.N), dtype=bool)
        else:
            self.discovery = topology.distance <= cfg.discovery_radius_m

    # ---- batch scoring ---------------------------------------------------

    def score(self, ues, sinr, bandwidth, sbs_load=None) -> Scores:
        """Score links of ``ues`` given their SINR and allocated bandwidth.

        ``sbs_load`` (packets/s offered to the serving SBS) is only used by
        the uniform delay model.
        """
        ues = np.asarray(ues, dtype=int)
        sinr = np.asarray(sinr, dtype=float)
        bw = np.asarray(bandwidth, dtype=float)
        cfg = self.cfg
        cap = bw * np.log2(1.0 + sinr)
        per = np.where(sinr >= self.threshold,
                       np.clip(cfg.per_e * np.exp(-cfg.per_f * sinr), 0.0, 1.0), 1.0)
        mu = cap / cfg.packet_size_bits
        live = mu > 0
        safe_mu = np.where(live, mu, 1.0)
        if self.mode == CONTEXT_AWARE:
            # per-row rates: compute row-wise to keep each UE's own classes
            lam = self.rates[ues]
            residual = lam.sum(axis=1) / (2.0 * safe_mu ** 2)
            sigma = np.cumsum(lam, axis=1) / safe_mu[:, None]
            sigma_prev = sigma - lam / safe_mu[:, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                wait = residual[:, None] / ((1.0 - sigma_prev) * (1.0 - sigma))
                delays = np.where(sigma < 1.0, wait + 1.0 / safe_mu[:, None] + cfg.initial_delay_s, np.inf)
        else:
            load = np.asarray(sbs_load, dtype=float)
            K = self.rates.shape[1]
            delays = uniform_delays(safe_mu, load, K, cfg.initial_delay_s)
        delays = np.where(live[:, None], delays, np.inf)
        pad = self.pad[ues]
        delays = np.where(pad, np.nan, delays)
        total = np.nansum(delays, axis=1)
        with np.errstate(invalid="ignore"):
            util = np.where(np.isfinite(total) & (total > 0), cap * (1.0 - per) / total, 0.0)
        util = np.where(per >= 1.0, 0.0, util)
        rate_ok = cap >= self.required_rate[ues]
        with np.errstate(invalid="ignore"):
            delay_ok = np.all(pad | (delays <= self.delay_bounds[ues]), axis=1)
        per_ok = per <= self.per_bound[ues]
        return Scores(sinr, bw, cap, per, delays, util, rate_ok, delay_ok, per_ok)

    def _state(self, assignment):
        a = np.asarray(assignment, dtype=int)
        counts = np.bincount(a, minlength=self.N)
        load = np.bincount(a, weights=self.load, minlength=self.N)
        return a, counts, load

    def evaluate(self, assignment) -> Scores:
        """Scores of every UE on its own link under ``assignment``."""
        a, counts, load = self._state(assignment)
        active = counts > 0
        ue = np.arange(self.M)
        signal = self.rx[ue, a]
        interf = self.rx @ active - signal
        return self.score(ue, signal / (self.noise + interf), self.bandwidth / counts[a], load[a])

    def ue_utilities(self, assignment) -> np.ndarray:
        return self.evaluate(assignment).utility

    def sbs_utilities(self, assignment) -> np.ndarray:
        """Per-SBS utility: sum of the utilities of the UEs it serves."""
        a = np.asarray(assignment, dtype=int)
        return np.bincount(a, weights=self.ue_utilities(a), minlength=self.N)

    def prospective(self, m: int, assignment) -> Scores:
        """Scores of UE ``m`` at every SBS j, each under the matching with m moved to j."""
        a, counts, load = self._state(assignment)
        i = a[m]
        counts[i] -= 1
        load[i] -= self.load[m]
        active_wo = counts > 0
        base = self.rx[m] @ active_wo
        interf = base - self.rx[m] * active_wo
        sinr = self.rx[m] / (self.noise + interf)
        bw = self.bandwidth / (counts + 1)
        return self.score(np.full(self.N, m), sinr, bw, load + self.load[m])

    def has_room(self, sbs: int, assignment, ue: int | None = None) -> bool:
        """Whether ``sbs`` can take one more UE under the optional quota."""
        quota = self.cfg.sbs_quota
        if quota is None:
            return True
        a = np.asarray(assignment)
        n = np.count_nonzero(a == sbs) - (ue is not None and a[ue] == sbs)
        return n + 1 <= quota

    def exchange_matrix(self, assignment) -> Scores:
        """Scores of every UE m at every SBS j with the count at j unchanged.

        This is m's link after trading places with some UE already at j. It
        is exact for the context-aware model, where an exchange leaves the
        active set, the bandwidth split and every bystander untouched.
        """
        a, counts, load = self._state(assignment)
        active = counts > 0
        tot = self.rx @ active
        interf = tot[:, None] - self.rx * active[None, :]
        sinr = self.rx / (self.noise + interf)
        bw = self.bandwidth / np.maximum(counts, 1)
        ue = np.repeat(np.arange(self.M), self.N)
        s = self.score(ue, sinr.ravel(), np.tile(bw, self.M), np.tile(load, self.M))
        shape = (self.M, self.N)
        return Scores(*(x.reshape(shape) if x.ndim == 1 else x.reshape(shape + x.shape[1:])
                        for x in (s.sinr, s.bandwidth, s.capacity, s.per, s.delays,
                                  s.utility, s.rate_ok, s.delay_ok, s.per_ok)))

    # ---- single-link API -------------------------------------------------

    def utility(self, m: int, i: int, assignment) -> UtilityBreakdown:
        """Utility of UE m at SBS i under ``assignment`` with m (re)placed at i."""
        a = np.array(assignment, dtype=int)
        a[m] = i
        s = self.evaluate(a)
        return self._breakdown(s, m, i)

    def _breakdown(self, s: Scores, m: int, i: int) -> UtilityBreakdown:
        k = self.num_apps[m]
        violations = tuple(name for name, ok in ((RATE, s.rate_ok[m]), (DELAY, s.delay_ok[m]),
                                                 (PER, s.per_ok[m])) if not ok)
        return UtilityBreakdown(
            ue=int(m), sbs=int(i), sinr=float(s.sinr[m]), bandwidth_hz=float(s.bandwidth[m]),
            rate_bps=float(s.capacity[m]), per=float(s.per[m]),
            per_priority_delays=tuple(float(x) for x in s.delays[m, :k]),
            utility=float(s.utility[m]), violations=violations,
        )

    def breakdowns(self, assignment) -> list[UtilityBreakdown]:
        a = np.asarray(assignment, dtype=int)
        s = self.evaluate(a)
        return [self._breakdown(s, m, a[m]) for m in range(self.M)]

    def feasible(self, m: int, i: int, assignment) -> tuple[bool, tuple[str, ...]]:
        violations = self.utility(m, i, assignment).violations
        if not self.has_room(i, assignment, ue=m):
            violations = violations + ("quota",)
        return not violations, violations


def prefers_ue(game: AssociationGame, m: int, i: int, eta, j: int, eta_alt) -> bool:
    """True iff UE m strictly prefers SBS j under ``eta_alt`` to SBS i under ``eta``."""
    return game.utility(m, j, eta_alt).utility > game.utility(m, i, eta).utility


def prefers_sbs(game: AssociationGame, i: int, m: int, eta, n: int, eta_alt) -> bool:
    """True iff SBS i strictly prefers UE n under ``eta_alt`` to UE m under ``eta``."""
    return game.utility(n, i, eta_alt).utility > game.utility(m, i, eta).utility
