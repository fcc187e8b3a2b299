import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cellmatch.scenario import (ConfigError, ScenarioConfig, channel_gain, generate_topology,
                                load_scenario, pathloss_db, sample_disc, save_scenario)
from cellmatch.units import db_to_linear, dbm_to_watts, linear_to_db, watts_to_dbm


def test_defaults_follow_evaluation_setup():
    cfg = ScenarioConfig()
    assert cfg.cell_radius_m == 1000.0
    assert cfg.total_bandwidth_hz == 20e6
    assert cfg.sbs_tx_power_dbm == 33.0
    assert cfg.sinr_threshold_db == 9.56
    assert cfg.noise_power_dbm == -121.0
    assert cfg.packet_size_bits == 16000
    assert cfg.tx_power_w == pytest.approx(10 ** 0.3)
    assert cfg.noise_w == pytest.approx(10 ** -15.1)


@pytest.mark.parametrize("bad", [
    dict(num_ues=0), dict(num_sbss=0), dict(total_bandwidth_hz=0.0), dict(cell_radius_m=-1.0),
    dict(apps_per_ue=6), dict(rate_constraint="mean"), dict(initial_association="best"),
    dict(per_e=0.0), dict(max_phase2_rounds=0), dict(discovery_radius_m=0.0),
])
def test_invalid_configs_rejected(bad):
    with pytest.raises(ConfigError):
        ScenarioConfig(**bad)


def test_unit_conversions_round_trip():
    assert dbm_to_watts(30.0) == pytest.approx(1.0)
    assert watts_to_dbm(2.0) == pytest.approx(33.0103, abs=1e-4)
    assert linear_to_db(db_to_linear(9.56)) == pytest.approx(9.56)


def test_gain_at_reference_distance():
    # -(140.7 + 36.7*log10(1)) = -140.7 dB
    g = channel_gain(1000.0, 0.0, 140.7, 3.67)
    assert linear_to_db(g) == pytest.approx(-140.7, abs=1e-9)


def test_doubling_distance_costs_fixed_db():
    g1 = linear_to_db(channel_gain(300.0))
    g2 = linear_to_db(channel_gain(600.0))
    assert g1 - g2 == pytest.approx(10 * 3.67 * math.log10(2))


def test_distance_clamped_and_nonpositive_rejected():
    assert pathloss_db(0.2) == pathloss_db(1.0)
    with pytest.raises(ValueError):
        pathloss_db(0.0)


@given(st.floats(1.0, 5000.0), st.floats(1.0001, 3.0))
def test_gain_strictly_decreasing_without_shadowing(d, factor):
    assert channel_gain(d * factor) < channel_gain(d)


def test_topology_shapes_and_bounds():
    cfg = ScenarioConfig(num_ues=60, num_sbss=25, rng_seed=7)
    t = generate_topology(cfg)
    assert t.ue_positions.shape == (60, 2)
    assert t.sbs_positions.shape == (25, 2)
    assert t.gain.shape == (60, 25)
    assert np.all(np.hypot(*t.ue_positions.T) <= 1000.0)
    assert np.all(np.hypot(*t.sbs_positions.T) <= 1000.0)
    assert np.all(t.gain > 0) and np.all(np.isfinite(t.gain))


def test_minimal_topology():
    t = generate_topology(ScenarioConfig(num_ues=1, num_sbss=1))
    assert t.gain.shape == (1, 1)


def test_topology_deterministic():
    cfg = ScenarioConfig(num_ues=30, num_sbss=7, rng_seed=3)
    a, b = generate_topology(cfg), generate_topology(cfg)
    assert a.gain.tobytes() == b.gain.tobytes()
    assert a.ue_positions.tobytes() == b.ue_positions.tobytes()
    assert generate_topology(cfg.replace(rng_seed=4)).gain.tobytes() != a.gain.tobytes()


def test_topology_is_read_only():
    t = generate_topology(ScenarioConfig(num_ues=2, num_sbss=2))
    with pytest.raises(ValueError):
        t.gain[0, 0] = 1.0


def test_disc_sampling_uniform_in_area():
    pts = sample_disc(np.random.default_rng(0), 20_000, 1000.0)
    mean_r = np.hypot(*pts.T).mean()
    assert abs(mean_r - 2000.0 / 3) / (2000.0 / 3) < 0.02


def test_scenario_file_round_trip(tmp_path):
    cfg = ScenarioConfig(num_ues=9, sbs_quota=3, rng_seed=42)
    path = tmp_path / "s.yaml"
    save_scenario(cfg, path)
    assert load_scenario(path) == cfg
    assert load_scenario(path, num_ues=4, rng_seed=None).num_ues == 4


def test_scenario_file_rejects_unknown_keys(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text("num_ues: 3\nbogus: 1\n")
    with pytest.raises(ConfigError):
        load_scenario(path)
