"""Matching-dependent interference, SINR, capacity and packet error rate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LinkMetrics:
    sinr: float
    capacity_bps: float
    per: float
    bandwidth_hz: float


def active_sbss(assignment, num_sbss: int) -> np.ndarray:
    """Boolean mask of SBSs serving at least one UE."""
    counts = np.bincount(np.asarray(assignment, dtype=int), minlength=num_sbss)
    return counts > 0


def interference(gain, tx_power_w, assignment, ue: int, sbs: int) -> float:
    """Received power at ``ue`` from every active SBS other than ``sbs``.

    All active SBSs share the full band; idle SBSs are silent.
    """
    assignment = np.asarray(assignment)
    if assignment[ue] != sbs:
        raise ValueError(f"UE {ue} is not served by SBS {sbs}")
    gain = np.asarray(gain)
    active = active_sbss(assignment, gain.shape[1])
    active[sbs] = False
    power = np.broadcast_to(np.asarray(tx_power_w, dtype=float), active.shape)
    return float(np.sum(power[active] * gain[ue, active]))


def sinr(p_w, h, noise_w, interference_w):
    return np.asarray(p_w) * np.asarray(h) / (noise_w + np.asarray(interference_w))


def capacity(bandwidth_hz, sinr_lin):
    """Shannon rate in bits/s (log base 2)."""
    return np.asarray(bandwidth_hz, dtype=float) * np.log2(1.0 + np.asarray(sinr_lin, dtype=float))


def packet_error_rate(sinr_lin, e: float, f: float, threshold: float):
    """e*exp(-f*sinr) above the demodulation threshold, 1 below it."""
    s = np.asarray(sinr_lin, dtype=float)
    per = np.where(s >= threshold, np.minimum(e * np.exp(-f * s), 1.0), 1.0)
    per = np.maximum(per, 0.0)
    return float(per) if per.ndim == 0 else per


def bandwidth_allocation(served, total_bw_hz: float) -> dict:
    served = list(served)
    if not served:
        return {}
    share = total_bw_hz / len(served)
    return {m: share for m in served}
