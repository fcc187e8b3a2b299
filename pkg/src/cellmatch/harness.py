"""Monte Carlo sweeps comparing the context-aware game with the RSSI and
max-SINR baselines, plus CSV / JSON emission of the aggregated rows."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from statistics import NormalDist

import numpy as np
import yaml

from .context import sample_contexts
from .matching import (CONTEXT_AWARE, UNIFORM, AssociationGame, baseline_max_sinr,
                       baseline_rssi, run_algorithm1)
from .scenario import ScenarioConfig, generate_topology, scenario_streams

SCHEMES = ("context_aware", "max_sinr", "rssi")
SWEEP_ALIASES = {"N": "num_sbss", "M": "num_ues", "a_m": "apps_per_ue",
                 "num_sbss": "num_sbss", "num_ues": "num_ues", "apps_per_ue": "apps_per_ue"}
METRICS = ("mean_ue_utility", "mean_sbs_utility", "mean_iterations", "mean_rounds",
           "feasibility_rate")
Z95 = NormalDist().inv_cdf(0.975)


@dataclass(frozen=True)
class ExperimentSpec:
    sweep_var: str
    values: tuple
    fixed: dict = field(default_factory=dict)
    replications: int = 30
    schemes: tuple[str, ...] = SCHEMES
    base_seed: int = 0
    name: str = "experiment"
    workers: int = 1

    def __post_init__(self):
        if self.sweep_var not in SWEEP_ALIASES:
            raise ValueError(f"sweep_var must be one of {sorted(SWEEP_ALIASES)}")
        object.__setattr__(self, "sweep_var", SWEEP_ALIASES[self.sweep_var])
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if not self.values:
            raise ValueError("the sweep needs at least one value")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.schemes or set(self.schemes) - set(SCHEMES):
            raise ValueError(f"schemes must be a non-empty subset of {SCHEMES}")
        if self.sweep_var in self.fixed:
            raise ValueError("the sweep variable cannot also be fixed")
        ScenarioConfig.from_dict(dict(self.fixed))  # validate early

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentSpec:
        data = dict(data)
        sweep = data.pop("sweep", None)
        if sweep is not None:
            data["sweep_var"] = sweep["var"]
            data["values"] = sweep["values"]
        return cls(**data)

    def config(self, value, replication: int) -> ScenarioConfig:
        params = dict(self.fixed)
        params[self.sweep_var] = value
        params["rng_seed"] = self.base_seed + replication
        return ScenarioConfig.from_dict(params)


def load_spec(path) -> ExperimentSpec:
    with open(path) as fh:
        return ExperimentSpec.from_dict(yaml.safe_load(fh))


@dataclass(frozen=True)
class MetricsRow:
    sweep_var: str
    sweep_value: float
    scheme: str
    replications: int
    mean_ue_utility: float
    mean_sbs_utility: float
    mean_iterations: float
    mean_rounds: float
    feasibility_rate: float
    ci_mean_ue_utility: float
    ci_mean_sbs_utility: float
    ci_mean_iterations: float
    ci_mean_rounds: float
    ci_feasibility_rate: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in dataclasses.fields(cls)]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def build_instance(cfg: ScenarioConfig):
    topo_rng, ctx_rng, alg_rng = scenario_streams(cfg.rng_seed)
    topology = generate_topology(cfg, topo_rng)
    contexts = sample_contexts(cfg, ctx_rng)
    return topology, contexts, alg_rng


def evaluate_schemes(cfg: ScenarioConfig, schemes=SCHEMES) -> dict[str, dict]:
    """Per-scheme metrics of one replication; all schemes share one instance."""
    topology, contexts, alg_rng = build_instance(cfg)
    out = {}
    for scheme in schemes:
        if scheme == "context_aware":
            game = AssociationGame(cfg, topology, contexts, mode=CONTEXT_AWARE)
            res = run_algorithm1(cfg, topology, contexts, alg_rng, game=game)
            a = res.matching.as_array()
            iterations, rounds = res.stats.mean_iterations, res.stats.rounds
        else:
            game = AssociationGame(cfg, topology, contexts, mode=UNIFORM)
            rule = baseline_max_sinr if scheme == "max_sinr" else baseline_rssi
            a = rule(topology, cfg).as_array()
            iterations, rounds = 0.0, 0
        s = game.evaluate(a)
        sbs = np.bincount(a, weights=s.utility, minlength=game.N)
        out[scheme] = {
            "mean_ue_utility": float(s.utility.mean()),
            "mean_sbs_utility": float(sbs.mean()),
            "mean_iterations": float(iterations),
            "mean_rounds": float(rounds),
            "feasibility_rate": float(s.feasible.mean()),
        }
    return out


def _replicate(args):
    spec, value, r = args
    return evaluate_schemes(spec.config(value, r), spec.schemes)


def ci_halfwidth(samples) -> float:
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        return 0.0
    return float(Z95 * x.std(ddof=1) / math.sqrt(x.size))


def run_experiment(spec: ExperimentSpec) -> list[MetricsRow]:
    jobs = [(spec, v, r) for v in spec.values for r in range(spec.replications)]
    if spec.workers > 1:
        with ProcessPoolExecutor(spec.workers) as pool:
            results = list(pool.map(_replicate, jobs))
    else:
        results = [_replicate(j) for j in jobs]

    rows = []
    R = spec.replications
    for k, value in enumerate(spec.values):
        chunk = results[k * R:(k + 1) * R]
        for scheme in spec.schemes:
            samples = {m: [rep[scheme][m] for rep in chunk] for m in METRICS}
            rows.append(MetricsRow(
                sweep_var=spec.sweep_var, sweep_value=value, scheme=scheme, replications=R,
                **{m: float(np.mean(samples[m])) for m in METRICS},
                **{f"ci_{m}": ci_halfwidth(samples[m]) for m in METRICS},
            ))
    return rows


def emit(rows, fmt: str, path=None) -> str:
    """Serialise rows as CSV or JSON; write to ``path`` when given."""
    cols = MetricsRow.columns()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            d = row.to_dict()
            w.writerow([repr(d[c]) if isinstance(d[c], float) else d[c] for c in cols])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps([row.to_dict() for row in rows], indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
    return text


def read_rows(path) -> list[MetricsRow]:
    path = Path(path)
    if path.suffix == ".json":
        return [MetricsRow(**d) for d in json.loads(path.read_text())]
    with open(path, newline="") as fh:
        out = []
        for d in csv.DictReader(fh):
            typed = {}
            for f in dataclasses.fields(MetricsRow):
                v = d[f.name]
                typed[f.name] = (int(v) if f.type == "int" else
                                 float(v) if f.type == "float" else v)
            out.append(MetricsRow(**typed))
        return out
