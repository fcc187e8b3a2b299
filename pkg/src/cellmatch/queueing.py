"""M/D/1 delays: the context-unaware FIFO form, the nonpreemptive priority
form, and a discrete-event simulator used to validate both."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

UNSTABLE = float("inf")


@dataclass(frozen=True)
class QueueInput:
    service_rate: float                     # packets/s
    class_arrivals: tuple[tuple[int, float], ...]  # (rank, packets/s)
    initial_delay: float = 0.0

    def __post_init__(self):
        if not self.service_rate > 0:
            raise ValueError("service rate must be positive")
        ranks = [k for k, _ in self.class_arrivals]
        if len(set(ranks)) != len(ranks):
            raise ValueError("priority ranks must be distinct")
        if any(lam < 0 for _, lam in self.class_arrivals):
            raise ValueError("arrival rates must be non-negative")

    def rates_by_rank(self) -> tuple[list[int], np.ndarray]:
        pairs = sorted(self.class_arrivals)
        return [k for k, _ in pairs], np.array([lam for _, lam in pairs], dtype=float)


def md1_delay(lam, mu):
    """Mean waiting time of a FIFO M/D/1 queue; ``inf`` when lam >= mu."""
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if np.any(mu <= 0):
        raise ValueError("service rate must be positive")
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(lam < mu, lam / (2.0 * mu * (mu - lam)), UNSTABLE)
    return float(d) if d.ndim == 0 else d


def priority_delays(mu, rates_by_rank, initial_delay=0.0):
    """Mean sojourn time of every priority class of a nonpreemptive M/D/1 queue.

    ``rates_by_rank[k]`` is the arrival rate of the class with rank k+1.
    ``mu`` may be an array; the result has shape ``mu.shape + (K,)``.
    Classes whose cumulative utilisation reaches 1 get ``inf``.
    """
    mu = np.asarray(mu, dtype=float)[..., None]
    lam = np.asarray(rates_by_rank, dtype=float)
    # deterministic service: second moment of service time is (1/mu)^2
    residual = lam.sum() / (2.0 * mu * mu)
    sigma = np.cumsum(lam) / mu
    sigma_prev = sigma - lam / mu
    with np.errstate(divide="ignore", invalid="ignore"):
        wait = residual / ((1.0 - sigma_prev) * (1.0 - sigma))
        d = np.where(sigma < 1.0, wait + 1.0 / mu + initial_delay, UNSTABLE)
    return d


def priority_delay(q: QueueInput, k: int) -> float:
    ranks, lam = q.rates_by_rank()
    if k not in ranks:
        raise KeyError(f"no class with rank {k}")
    # ranks need not be contiguous; cumulative sums follow rank order
    d = priority_delays(q.service_rate, lam, q.initial_delay)
    return float(d[ranks.index(k)])


def uniform_delays(mu, lam_total, num_streams: int, initial_delay=0.0):
    """Context-unaware delay: every stream sees the FIFO wait plus service."""
    mu = np.asarray(mu, dtype=float)
    d = md1_delay(lam_total, mu) + 1.0 / mu + initial_delay
    return np.repeat(np.asarray(d, dtype=float)[..., None], num_streams, axis=-1)


@dataclass(frozen=True)
class ClassStats:
    count: int
    mean_wait: float
    mean_sojourn: float


def des_oracle(q: QueueInput, horizon_packets: int, rng: np.random.Generator,
               warmup_fraction: float = 0.01) -> dict[int, ClassStats]:
    """Simulate a nonpreemptive priority queue with deterministic service.

    Returns per-rank empirical means over ``horizon_packets`` arrivals,
    dropping the first ``warmup_fraction`` of them. Ranks that see no
    arrivals are absent from the result.
    """
    ranks, lam = q.rates_by_rank()
    total = lam.sum()
    if total <= 0 or horizon_packets <= 0:
        return {}
    if total / q.service_rate >= 1.0:
        raise ValueError("oracle needs a stable queue")
    s = 1.0 / q.service_rate
    n = int(horizon_packets)
    t = np.cumsum(rng.exponential(1.0 / total, size=n)).tolist()
    cls = rng.choice(len(lam), size=n, p=lam / total).tolist()
    skip = int(n * warmup_fraction)

    queues = [deque() for _ in lam]
    wait_sum = [0.0] * len(lam)
    count = [0] * len(lam)
    free = 0.0
    i = 0
    waiting = 0
    while i < n or waiting:
        while i < n and t[i] <= free:
            queues[cls[i]].append((t[i], i))
            waiting += 1
            i += 1
        if waiting == 0:
            c, idx, w = cls[i], i, 0.0
            free = t[i] + s
            i += 1
        else:
            for c, qu in enumerate(queues):
                if qu:
                    break
            arrived, idx = queues[c].popleft()
            waiting -= 1
            w = free - arrived
            free += s
        if idx >= skip:
            wait_sum[c] += w
            count[c] += 1

    out = {}
    for c, k in enumerate(ranks):
        if count[c]:
            mw = wait_sum[c] / count[c]
            out[k] = ClassStats(count[c], mw, mw + s + q.initial_delay)
    return out


@dataclass(frozen=True)
class OracleCheck:
    label: str
    rank: int
    closed_form: float
    simulated: float
    tolerance: float

    @property
    def rel_error(self) -> float:
        return abs(self.simulated - self.closed_form) / self.closed_form

    @property
    def ok(self) -> bool:
        return self.rel_error <= self.tolerance


def validate_against_oracle(packets: int = 1_000_000, seed: int = 0,
                            loads=(0.3, 0.6, 0.8), mu: float = 2000.0,
                            tolerance: float = 0.05) -> list[OracleCheck]:
    """Compare closed forms with the simulator.

    Single class: FIFO waiting time at each load. Two classes with equal
    rates: per-class sojourn time from the priority formula, and the
    queueing part alone (sojourn minus service), which is the stricter test.
    """
    rng = np.random.default_rng(seed)
    out = []
    for rho in loads:
        lam = rho * mu
        sim = des_oracle(QueueInput(mu, ((1, lam),)), packets, rng)[1]
        out.append(OracleCheck(f"fifo wait rho={rho}", 1, md1_delay(lam, mu), sim.mean_wait, tolerance))
    for rho in loads:
        q = QueueInput(mu, ((1, rho * mu / 2), (2, rho * mu / 2)))
        sim = des_oracle(q, packets, rng)
        for k in (1, 2):
            d = priority_delay(q, k)
            out.append(OracleCheck(f"priority sojourn rho={rho}", k, d, sim[k].mean_sojourn, tolerance))
            out.append(OracleCheck(f"priority wait rho={rho}", k, d - 1.0 / mu, sim[k].mean_wait, tolerance))
    return out
