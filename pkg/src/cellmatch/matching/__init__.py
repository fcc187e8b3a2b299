from .algorithm import AlgorithmStats, AssociationResult, SwapRecord, run_algorithm1
from .baselines import baseline_max_sinr, baseline_rssi
from .game import (CONTEXT_AWARE, UNIFORM, AssociationGame, Matching, UtilityBreakdown,
                   prefers_sbs, prefers_ue)
from .stability import BlockingSwap, InstanceTooLarge, StabilityReport, brute_force_stable, is_swap_stable

__all__ = [
    "AlgorithmStats", "AssociationGame", "AssociationResult", "BlockingSwap",
    "CONTEXT_AWARE", "InstanceTooLarge", "Matching", "StabilityReport", "SwapRecord",
    "UNIFORM", "UtilityBreakdown", "baseline_max_sinr", "baseline_rssi",
    "brute_force_stable", "is_swap_stable", "prefers_sbs", "prefers_ue", "run_algorithm1",
]
