import json

import numpy as np
import pytest

from cellmatch import harness
from cellmatch.harness import (ExperimentSpec, MetricsRow, build_instance, ci_halfwidth, emit,
                               load_spec, read_rows, run_experiment)
from cellmatch.scenario import ScenarioConfig

SMALL = dict(num_ues=8, apps_per_ue=2)


def small_spec(**kw):
    base = dict(sweep_var="N", values=(2, 3), fixed=SMALL, replications=3, base_seed=5)
    base.update(kw)
    return ExperimentSpec(**base)


def row(**kw):
    d = {c: 0.0 for c in MetricsRow.columns()}
    d.update(sweep_var="num_sbss", sweep_value=10, scheme="rssi", replications=2)
    d.update(kw)
    return MetricsRow(**d)


def test_empty_rows_emit_header_only():
    text = emit([], "csv")
    assert text.splitlines() == [",".join(MetricsRow.columns())]


def test_three_rows_four_lines(tmp_path):
    rows = [row(mean_ue_utility=float(k)) for k in range(3)]
    text = emit(rows, "csv", tmp_path / "x.csv")
    assert len(text.splitlines()) == 4
    assert read_rows(tmp_path / "x.csv") == rows


def test_json_round_trip(tmp_path):
    rows = [row(scheme=s, mean_sbs_utility=1.5e9) for s in ("rssi", "max_sinr")]
    emit(rows, "json", tmp_path / "x.json")
    assert read_rows(tmp_path / "x.json") == rows
    assert json.loads((tmp_path / "x.json").read_text())[0]["scheme"] == "rssi"


def test_unknown_format():
    with pytest.raises(ValueError):
        emit([], "xml")


def test_spec_aliases_and_validation(tmp_path):
    spec = small_spec()
    assert spec.sweep_var == "num_sbss"
    cfg = spec.config(3, 2)
    assert cfg.num_sbss == 3 and cfg.num_ues == 8 and cfg.rng_seed == 7
    with pytest.raises(ValueError):
        small_spec(sweep_var="colour")
    with pytest.raises(ValueError):
        small_spec(schemes=("oracle",))
    p = tmp_path / "spec.yaml"
    p.write_text("name: t\nsweep: {var: M, values: [4, 6]}\nfixed: {num_sbss: 2}\nreplications: 2\n")
    s = load_spec(p)
    assert s.sweep_var == "num_ues" and s.values == (4, 6) and s.replications == 2


def test_ci_halfwidth():
    x = [1.0, 2.0, 3.0, 4.0]
    assert ci_halfwidth(x) == pytest.approx(1.96 * np.std(x, ddof=1) / 2, rel=1e-4)
    assert ci_halfwidth([5.0]) == 0.0


def test_experiment_rows_and_determinism():
    spec = small_spec()
    rows = run_experiment(spec)
    assert len(rows) == 2 * 3
    assert {r.scheme for r in rows} == set(harness.SCHEMES)
    assert emit(rows, "csv") == emit(run_experiment(spec), "csv")


def test_parallel_matches_serial():
    spec = small_spec(replications=2)
    par = ExperimentSpec(**{**spec.__dict__, "workers": 2})
    assert emit(run_experiment(spec), "csv") == emit(run_experiment(par), "csv")


def test_schemes_share_one_instance(monkeypatch):
    seen = []
    real = harness.build_instance

    def spy(cfg):
        out = real(cfg)
        seen.append(out[0].gain.tobytes())
        return out

    monkeypatch.setattr(harness, "build_instance", spy)
    run_experiment(small_spec(values=(3,), replications=4))
    assert len(seen) == 4 and len(set(seen)) == 4


def test_instance_streams_independent():
    cfg = ScenarioConfig(**SMALL, num_sbss=3, rng_seed=3)
    t1, c1, _ = build_instance(cfg)
    t2, c2, _ = build_instance(cfg.replace(apps_per_ue=1))
    # contexts come from their own stream, so topology is unaffected
    assert t1.gain.tobytes() == t2.gain.tobytes()
    assert [c.hardware for c in c1] == [c.hardware for c in c2]
