"""UE context: hardware class, active applications and their priorities."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np


class Hardware(str, Enum):
    SMARTPHONE = "smartphone"
    TABLET = "tablet"
    LAPTOP = "laptop"


@dataclass(frozen=True)
class ApplicationSpec:
    name: str
    data_rate_kbps: float
    delay_ms: float
    per_max: float
    video: bool = False

    def __post_init__(self):
        if min(self.data_rate_kbps, self.delay_ms, self.per_max) <= 0 or self.per_max > 1:
            raise ValueError(f"invalid QoS requirements for {self.name!r}")


HD_VIDEO = "hd_video"
VIDEO_CONF = "video_conferencing"
VOIP = "voip"
AUDIO = "audio_streaming"
FILE_DOWNLOAD = "file_download"

_CATALOG = (
    ApplicationSpec(HD_VIDEO, 800, 2000, 0.05, video=True),
    ApplicationSpec(VIDEO_CONF, 700, 30, 0.01, video=True),
    ApplicationSpec(VOIP, 512, 150, 0.01),
    ApplicationSpec(AUDIO, 320, 200, 0.08),
    ApplicationSpec(FILE_DOWNLOAD, 200, 3000, 0.1),
)
_INDEX = {app.name: i for i, app in enumerate(_CATALOG)}


def app_catalog() -> list[ApplicationSpec]:
    """Typical multimedia QoS requirements (rate kbps, delay ms, PER)."""
    return list(_CATALOG)


def get_app(name: str) -> ApplicationSpec:
    try:
        return _CATALOG[_INDEX[name]]
    except KeyError:
        raise KeyError(f"unknown application {name!r}; known: {sorted(_INDEX)}") from None


def assign_priorities(hardware, apps) -> tuple[int, ...]:
    """Rank each app (1 = highest).

    Video comes first on tablets and laptops, file download always last,
    everything else by ascending delay bound with catalog order as the
    tie-break.
    """
    hardware = Hardware(hardware)
    apps = list(apps)
    if not apps:
        raise ValueError("at least one application is required")
    big_screen = hardware in (Hardware.TABLET, Hardware.LAPTOP)

    def key(x):
        app = apps[x]
        tier = 1
        if app.name == FILE_DOWNLOAD:
            tier = 2
        elif big_screen and app.video:
            tier = 0
        return (tier, app.delay_ms, _INDEX.get(app.name, len(_CATALOG)), x)

    order = sorted(range(len(apps)), key=key)
    ranks = [0] * len(apps)
    for rank, x in enumerate(order, start=1):
        ranks[x] = rank
    return tuple(ranks)


@dataclass(frozen=True)
class UeContext:
    hardware: Hardware
    apps: tuple[ApplicationSpec, ...]
    priorities: tuple[int, ...]
    arrival_rates: tuple[float, ...]  # packets/s per app

    @property
    def num_apps(self) -> int:
        return len(self.apps)

    @property
    def aggregate_rate(self) -> float:
        return float(sum(self.arrival_rates))

    @property
    def qos_matrix(self) -> np.ndarray:
        """a_m x 3 matrix of (rate kbps, delay ms, PER) rows."""
        return np.array([[a.data_rate_kbps, a.delay_ms, a.per_max] for a in self.apps])

    @property
    def required_rate_bps(self) -> float:
        return 1000.0 * max(a.data_rate_kbps for a in self.apps)

    @property
    def total_rate_bps(self) -> float:
        return 1000.0 * sum(a.data_rate_kbps for a in self.apps)

    @property
    def per_bound(self) -> float:
        return min(a.per_max for a in self.apps)

    def rates_by_rank(self) -> np.ndarray:
        """Arrival rates ordered from rank 1 to rank a_m."""
        out = np.empty(self.num_apps)
        for rate, k in zip(self.arrival_rates, self.priorities):
            out[k - 1] = rate
        return out

    def delay_bounds_by_rank(self) -> np.ndarray:
        out = np.empty(self.num_apps)
        for app, k in zip(self.apps, self.priorities):
            out[k - 1] = app.delay_ms / 1000.0
        return out


def make_context(hardware, app_names, packet_size_bits: int = 16000) -> UeContext:
    apps = tuple(get_app(n) if isinstance(n, str) else n for n in app_names)
    if len({a.name for a in apps}) != len(apps):
        raise ValueError("applications must be distinct")
    rates = tuple(a.data_rate_kbps * 1000.0 / packet_size_bits for a in apps)
    return UeContext(Hardware(hardware), apps, assign_priorities(hardware, apps), rates)


def sample_contexts(cfg, rng: np.random.Generator) -> list[UeContext]:
    """Contexts for all UEs: an even hardware split and a_m distinct apps each."""
    if cfg.apps_per_ue > len(_CATALOG):
        raise ValueError(f"apps_per_ue={cfg.apps_per_ue} exceeds catalog size {len(_CATALOG)}")
    classes = list(Hardware)
    labels = np.array([classes[k % 3] for k in range(cfg.num_ues)], dtype=object)
    labels = labels[rng.permutation(cfg.num_ues)]
    out = []
    for m in range(cfg.num_ues):
        picks = sorted(rng.choice(len(_CATALOG), size=cfg.apps_per_ue, replace=False))
        out.append(make_context(labels[m], [_CATALOG[i] for i in picks], cfg.packet_size_bits))
    return out


def sample_context(cfg, rng: np.random.Generator, hardware=None) -> UeContext:
    """One UE's context; hardware is drawn uniformly unless given."""
    if cfg.apps_per_ue > len(_CATALOG):
        raise ValueError(f"apps_per_ue={cfg.apps_per_ue} exceeds catalog size {len(_CATALOG)}")
    if hardware is None:
        hardware = list(Hardware)[rng.integers(3)]
    picks = sorted(rng.choice(len(_CATALOG), size=cfg.apps_per_ue, replace=False))
    return make_context(hardware, [_CATALOG[i] for i in picks], cfg.packet_size_bits)


def load_context_overrides(path, packet_size_bits: int = 16000) -> dict[int, UeContext]:
    """Read ``{"<ue index>": {"hardware": ..., "apps": [...]}}`` from JSON or YAML."""
    import yaml

    with open(path) as fh:
        raw = yaml.safe_load(fh) if not str(path).endswith(".json") else json.load(fh)
    return {
        int(k): make_context(v["hardware"], v["apps"], packet_size_bits)
        for k, v in (raw or {}).items()
    }
