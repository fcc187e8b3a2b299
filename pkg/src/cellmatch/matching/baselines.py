"""Context-unaware association rules: strongest received power and max SINR."""

from __future__ import annotations

import numpy as np

from ..scenario import ScenarioConfig, Topology
from .game import Matching

MAX_SINR_SWEEPS = 20


def _rx(topology: Topology, cfg: ScenarioConfig, tx_power_w=None) -> np.ndarray:
    p = cfg.tx_power_w if tx_power_w is None else tx_power_w
    p = np.broadcast_to(np.asarray(p, dtype=float), (topology.num_sbss,))
    return topology.gain * p[None, :]


def baseline_rssi(topology: Topology, cfg: ScenarioConfig, tx_power_w=None) -> Matching:
    """Every UE picks the SBS with the strongest received power."""
    rx = _rx(topology, cfg, tx_power_w)
    return Matching.from_array(np.argmax(rx, axis=1), topology.num_sbss)


def sinr_table(rx: np.ndarray, noise: float, assignment, ue: int) -> np.ndarray:
    """SINR UE ``ue`` would get at each SBS if it moved there.

    Interferers are the SBSs still active once the UE has moved.
    """
    a = np.asarray(assignment)
    counts = np.bincount(a, minlength=rx.shape[1])
    counts[a[ue]] -= 1
    active = counts > 0
    interf = rx[ue] @ active - rx[ue] * active
    return rx[ue] / (noise + interf)


def baseline_max_sinr(topology: Topology, cfg: ScenarioConfig, tx_power_w=None,
                      max_sweeps: int = MAX_SINR_SWEEPS) -> Matching:
    """Every UE picks the SBS with the highest SINR.

    The first pick assumes every SBS transmits. Since only SBSs that serve
    someone interfere, the rule is then re-applied UE by UE against the
    induced active set until a sweep changes nothing (or ``max_sweeps``).
    """
    rx = _rx(topology, cfg, tx_power_w)
    noise = cfg.noise_w
    interf_all = rx.sum(axis=1, keepdims=True) - rx
    a = np.argmax(rx / (noise + interf_all), axis=1)
    for _ in range(max_sweeps):
        changed = False
        for m in range(len(a)):
            s = sinr_table(rx, noise, a, m)
            j = int(np.argmax(s))
            if s[j] > s[a[m]] and j != a[m]:
                a[m] = j
                changed = True
        if not changed:
            break
    return Matching.from_array(a, topology.num_sbss)
