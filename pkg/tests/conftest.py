import numpy as np
import pytest

from cellmatch.context import make_context
from cellmatch.scenario import ScenarioConfig, Topology

# A regime where UEs have real choices: low demodulation threshold, steep
# PER curve, fast-decaying path loss, random starting association.
ACTIVE_REGIME = dict(sinr_threshold_db=-5.0, per_e=0.05, per_f=1.0,
                     pathloss_exponent=4.5, initial_association="random")


def crafted_topology(rx_w, p_w=None):
    """Topology whose received powers (W) are exactly ``rx_w`` at power ``p_w``."""
    p_w = ScenarioConfig().tx_power_w if p_w is None else p_w
    rx = np.asarray(rx_w, dtype=float)
    M, N = rx.shape
    ues = np.zeros((M, 2))
    sbss = np.column_stack((np.arange(N) * 10.0 + 5.0, np.zeros(N)))
    return Topology(ues, sbss, rx / p_w)


def contexts_for(M, hardware="smartphone", apps=("voip",)):
    return [make_context(hardware, apps) for _ in range(M)]


@pytest.fixture
def cfg_default():
    return ScenarioConfig()


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
