"""Scenario configuration, topology generation and the propagation model."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .units import db_to_linear, dbm_to_watts

MIN_DISTANCE_M = 1.0


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    """All physical, traffic and algorithm parameters of one scenario.

    Defaults follow the evaluation setup (1 km macro cell, 20 MHz, 33 dBm
    SBSs, -121 dBm noise, 9.56 dB SINR threshold, 2000-byte packets). The
    path-loss, shadowing and PER constants are modelling choices.
    """

    num_ues: int = 60
    num_sbss: int = 25
    apps_per_ue: int = 3
    cell_radius_m: float = 1000.0
    total_bandwidth_hz: float = 20e6
    sbs_tx_power_dbm: float = 33.0
    noise_power_dbm: float = -121.0
    sinr_threshold_db: float = 9.56
    packet_size_bits: int = 16000
    pathloss_intercept_db: float = 140.7
    pathloss_exponent: float = 3.67
    shadowing_sigma_db: float = 8.0
    per_e: float = 0.2
    per_f: float = 0.05
    initial_delay_s: float = 0.0
    rate_constraint: str = "max"
    discovery_radius_m: float | None = None
    sbs_quota: int | None = None
    exchange_swaps: bool = True
    initial_association: str = "closest"
    max_phase2_rounds: int = 100
    rng_seed: int = 0

    def __post_init__(self):
        if self.num_ues < 1 or self.num_sbss < 1:
            raise ConfigError("num_ues and num_sbss must be >= 1")
        if not self.total_bandwidth_hz > 0:
            raise ConfigError("total_bandwidth_hz must be positive")
        if not self.cell_radius_m > 0:
            raise ConfigError("cell_radius_m must be positive")
        if not 1 <= self.apps_per_ue <= 5:
            raise ConfigError("apps_per_ue must lie in 1..5 (catalog size)")
        if self.packet_size_bits <= 0:
            raise ConfigError("packet_size_bits must be positive")
        if self.shadowing_sigma_db < 0:
            raise ConfigError("shadowing_sigma_db must be non-negative")
        if self.per_e <= 0 or self.per_f < 0:
            raise ConfigError("PER constants need e > 0 and f >= 0")
        if self.rate_constraint not in ("max", "sum"):
            raise ConfigError("rate_constraint must be 'max' or 'sum'")
        if self.initial_association not in ("random", "closest"):
            raise ConfigError("initial_association must be 'random' or 'closest'")
        if self.discovery_radius_m is not None and self.discovery_radius_m <= 0:
            raise ConfigError("discovery_radius_m must be positive")
        if self.sbs_quota is not None and self.sbs_quota < 1:
            raise ConfigError("sbs_quota must be >= 1")
        if self.max_phase2_rounds < 1:
            raise ConfigError("max_phase2_rounds must be >= 1")
        if self.initial_delay_s < 0:
            raise ConfigError("initial_delay_s must be non-negative")
        for name in ("sbs_tx_power_dbm", "noise_power_dbm"):
            watts = float(dbm_to_watts(getattr(self, name)))
            if not (watts > 0 and math.isfinite(watts)):
                raise ConfigError(f"{name} does not map to a positive power")

    @property
    def tx_power_w(self) -> float:
        return float(dbm_to_watts(self.sbs_tx_power_dbm))

    @property
    def noise_w(self) -> float:
        return float(dbm_to_watts(self.noise_power_dbm))

    @property
    def sinr_threshold(self) -> float:
        return float(db_to_linear(self.sinr_threshold_db))

    def replace(self, **changes) -> ScenarioConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> ScenarioConfig:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
        return cls(**data)


def load_scenario(path, **overrides) -> ScenarioConfig:
    """Read a YAML key/value scenario file; ``None`` overrides are ignored."""
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping of scenario keys")
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ScenarioConfig.from_dict(data)


def save_scenario(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(yaml.safe_dump(cfg.to_dict(), sort_keys=False))


def scenario_streams(seed: int):
    """Independent RNG streams: topology, contexts, algorithm."""
    children = np.random.SeedSequence(seed).spawn(3)
    return tuple(np.random.default_rng(c) for c in children)


@dataclass(frozen=True)
class Topology:
    ue_positions: np.ndarray   # (M, 2) metres
    sbs_positions: np.ndarray  # (N, 2) metres
    gain: np.ndarray           # (M, N) linear channel gain
    distance: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.distance is None:
            d = np.linalg.norm(self.ue_positions[:, None, :] - self.sbs_positions[None, :, :], axis=-1)
            object.__setattr__(self, "distance", d)
        for arr in (self.ue_positions, self.sbs_positions, self.gain, self.distance):
            arr.setflags(write=False)

    @property
    def num_ues(self) -> int:
        return self.gain.shape[0]

    @property
    def num_sbss(self) -> int:
        return self.gain.shape[1]


def pathloss_db(distance_m, intercept_db=140.7, exponent=3.67):
    """Log-distance path loss referenced to 1 km, distances clamped to 1 m."""
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    d = np.maximum(d, MIN_DISTANCE_M)
    return intercept_db + 10.0 * exponent * np.log10(d / 1000.0)


def channel_gain(distance_m, shadowing_db=0.0, intercept_db=140.7, exponent=3.67):
    """Linear gain for a link: -(path loss) + log-normal shadowing, in dB."""
    gain_db = -pathloss_db(distance_m, intercept_db, exponent) + np.asarray(shadowing_db, dtype=float)
    return db_to_linear(gain_db)


def sample_disc(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(n))
    theta = 2.0 * np.pi * rng.random(n)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def generate_topology(cfg: ScenarioConfig, rng: np.random.Generator | None = None) -> Topology:
    if rng is None:
        rng = scenario_streams(cfg.rng_seed)[0]
    ues = sample_disc(rng, cfg.num_ues, cfg.cell_radius_m)
    sbss = sample_disc(rng, cfg.num_sbss, cfg.cell_radius_m)
    dist = np.linalg.norm(ues[:, None, :] - sbss[None, :, :], axis=-1)
    # co-located nodes are legal; clamp before the gain model sees them
    dist = np.maximum(dist, MIN_DISTANCE_M)
    shadow = cfg.shadowing_sigma_db * rng.standard_normal(dist.shape)
    gain = channel_gain(dist, shadow, cfg.pathloss_intercept_db, cfg.pathloss_exponent)
    return Topology(ues, sbss, gain, dist)
