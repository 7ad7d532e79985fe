import dataclasses
import json
import logging
import math
import os
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import numpy as np
import pandas as pd
from dotenv import load_dotenv
from pydantic import ValidationError

from _types.config_types import RunConfig

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def load_environment():
    """Load .env.local if present, otherwise .env"""
    if os.path.exists(".env.local"):
        load_dotenv(".env.local")
    else:
        load_dotenv()


def make_json_serializable(obj):
    """Convert objects to JSON serializable format"""
    if isinstance(obj, pd.DataFrame):
        return obj.to_dict(orient="records")
    elif isinstance(obj, pd.Series):
        return obj.to_dict()
    elif dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: make_json_serializable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    elif isinstance(obj, dict):
        return {str(k): make_json_serializable(v) for k, v in obj.items()}
    elif isinstance(obj, (list, tuple)):
        return [make_json_serializable(v) for v in obj]
    elif isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {"real": obj.real.tolist(), "imag": obj.imag.tolist()}
        return obj.tolist()
    elif isinstance(obj, np.bool_):
        return bool(obj)
    elif isinstance(obj, np.integer):
        return int(obj)
    elif isinstance(obj, (float, np.floating)):
        return None if math.isnan(obj) else float(obj)
    elif isinstance(obj, complex):
        return {"real": obj.real, "imag": obj.imag}
    else:
        return obj


def dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, fixed indentation"""
    return json.dumps(make_json_serializable(obj), sort_keys=True, indent=2) + "\n"


def write_csv(frame: pd.DataFrame, path: str):
    """CSV with 17 significant digits and '.' as decimal separator"""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {path} ({len(frame)} rows)")


def spectrum_frame(result) -> pd.DataFrame:
    """Rows (index, lambda, multiplicity, method) of a SpectrumResult, ascending"""
    return pd.DataFrame(
        [{"index": i, "lambda": lam, "multiplicity": mult, "method": result.method}
         for i, (lam, mult) in enumerate(result.eigenvalues)],
        columns=["index", "lambda", "multiplicity", "method"],
    )


def reports_frame(reports: Iterable) -> pd.DataFrame:
    return pd.DataFrame(
        [{"claim_id": r.claim_id, "lhs": r.lhs, "rhs": r.rhs, "passed": r.passed,
          "rejected": r.rejected, "inputs": json.dumps(make_json_serializable(r.inputs), sort_keys=True)}
         for r in reports],
        columns=["claim_id", "lhs", "rhs", "passed", "rejected", "inputs"],
    )


def load_run_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Validate a JSON config file into RunConfig, with command-line overrides.

    Overrides use dotted keys, e.g. {"numerics.integrator_tol": 1e-9, "seed": 3};
    None values are skipped.

    Raises:
        ValueError: the file is unreadable or fails validation
    """
    data: Dict[str, Any] = {}
    if path:
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"Failed to read config {path}: {e}")
            raise ValueError(f"cannot read config '{path}': {e}") from e

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        node = data
        *parents, leaf = key.split(".")
        for part in parents:
            node = node.setdefault(part, {})
        node[leaf] = value

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        logger.error(f"Invalid config: {e}")
        raise ValueError(f"invalid config: {e}") from e

