import csv
import io
import json

import pytest

import cocom

OGD = {
    "algorithm": "penalty_ogd",
    "variant": "coco_m2",
    "environment": {"family": "appendix_a", "m": 2, "T": 200, "mode": "adversarial"},
    "penalty": {"kind": "quadratic", "lambda": {"mode": "theorem"}},
    "seeds": [1, 2],
}

ODAF = {
    "algorithm": "odaf",
    "environment": {"family": "separable", "m": 2, "T": 200},
    "predictor": {"kind": "noisy", "scale": 0.5},
    "seeds": 3,
}


def test_run_seed_csv_and_checks():
    r = cocom.run_seed(OGD, 1)
    rows = list(csv.reader(io.StringIO(r["csv"])))
    assert rows[0][0].startswith("# seed=1")
    assert ",".join(rows[1]) == cocom.csv_header
    assert len(rows) - 2 == 200 - 2 + 1
    assert r["checks"] and all(c["ok"] for c in r["checks"])
    assert r["bounds"]["theorem"] == "thm1"
    assert r["bounds"]["regret_ok"] and r["bounds"]["ccv_ok"]


def test_determinism():
    assert cocom.run_seed(ODAF, 4)["csv"] == cocom.run_seed(ODAF, 4)["csv"]


def test_experiment_writes_files(tmp_path):
    s = cocom.run_experiment(ODAF, tmp_path, parallel=2)
    assert s["seeds_ok"] == 3
    assert {p.name for p in tmp_path.iterdir()} == {"seed_1.csv", "seed_2.csv", "seed_3.csv", "summary.json"}
    assert json.loads((tmp_path / "summary.json").read_text())["seeds_total"] == 3


def test_config_errors():
    with pytest.raises(cocom.ConfigError):
        cocom.normalize_config({"algorithm": "odaf", "penalty": {"kind": "quadratic"}})
    with pytest.raises(ValueError):
        cocom.run_seed({"algorithm": "nope"}, 1)
    full = cocom.normalize_config(ODAF)
    assert full["seeds"] == [1, 2, 3]


def test_micro_functions():
    assert cocom.huber(3.0, 1.0) == 2.5
    assert cocom.project_box([-1.0, -1.0], [1.0, 1.0], [2.0, 0.5]) == [1.0, 0.5]
    assert cocom.project_ball([0.0, 0.0], 1.0, [3.0, 4.0]) == pytest.approx([0.6, 0.8])
    # no regularization: a vertex of the box
    assert cocom.ftrl_argmin_box([-1.0], [1.0], [2.0], 0.0) == [-1.0]
    assert cocom.ftrl_argmin_box([-1.0], [1.0], [1.0], 4.0) == [-0.25]
