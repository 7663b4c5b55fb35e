"""Online learning with memory and long-term constraints (C++ core)."""
import json

from . import _cocom
from ._cocom import ConfigError, ContractViolation, csv_header, ftrl_argmin_box, huber, project_ball, project_box

__all__ = [
    "ConfigError",
    "ContractViolation",
    "csv_header",
    "ftrl_argmin_box",
    "huber",
    "normalize_config",
    "project_ball",
    "project_box",
    "run_experiment",
    "run_seed",
]


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def normalize_config(config):
    return json.loads(_cocom.normalize_config(_text(config)))


def run_seed(config, seed, with_csv=True):
    """Run one seed. Returns summary, bounds, verify checks and (optionally) the CSV text."""
    r = _cocom.run_seed(_text(config), seed, with_csv)
    out = {
        "summary": json.loads(r["summary"]),
        "bounds": json.loads(r["bounds"]),
        "checks": [dict(zip(("name", "ok", "lhs", "rhs"), c)) for c in r["checks"]],
    }
    if with_csv:
        out["csv"] = r["csv"]
    return out


def run_experiment(config, out_dir="", parallel=1):
    """Run every seed of the config; writes CSVs and summary.json when out_dir is given."""
    return json.loads(_cocom.run_experiment(_text(config), str(out_dir), parallel))
