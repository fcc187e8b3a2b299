"""Context-aware user-to-small-cell association as a matching game with externalities."""

from .context import UeContext, app_catalog, assign_priorities, sample_contexts
from .scenario import ScenarioConfig, Topology, generate_topology, load_scenario

__version__ = "0.1.0"

__all__ = [
    "ScenarioConfig", "Topology", "UeContext", "app_catalog", "assign_priorities",
    "generate_topology", "load_scenario", "sample_contexts",
]
