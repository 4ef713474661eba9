"""Artifact writing and aggregation.

Every number written to an artifact carries an exactness marker: exact
integers and rationals become ``{"value": ..., "exact": true}`` and floats
``{"value": x, "tol": t}``.  JSON is written with sorted keys so repeated
runs on the same inputs produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

__all__ = ["number", "to_jsonable", "dumps", "input_hash", "write_artifacts", "main"]

logger = logging.getLogger(__name__)


def number(x: Any, tol: Optional[float] = None) -> Dict[str, Any]:
    if isinstance(x, Fraction):
        return {"value": str(x), "exact": True}
    if isinstance(x, (int, np.integer)):
        return {"value": int(x), "exact": True}
    return {"value": float(x), "tol": tol}


def to_jsonable(obj: Any, tol: Optional[float] = None) -> Any:
    """Convert nested results into JSON values with number markers."""
    if obj is None or isinstance(obj, (bool, np.bool_, str)):
        return bool(obj) if isinstance(obj, np.bool_) else obj
    if isinstance(obj, (Fraction, int, float, np.integer, np.floating)):
        return number(obj, tol)
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v, tol) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v, tol) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v, tol) for v in obj]
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


def input_hash(args: Mapping[str, Any], files: Sequence[Path] = ()) -> str:
    """``sha1`` of the canonical JSON of the arguments and input file contents."""
    canonical = {
        "args": {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(args.items())},
        "files": [hashlib.sha1(Path(p).read_bytes()).hexdigest() for p in files],
    }
    return hashlib.sha1(json.dumps(canonical, sort_keys=True, default=str).encode("utf-8")).hexdigest()


def write_artifacts(out_dir: Path, name: str, payload: Any, table: Optional[pd.DataFrame] = None) -> List[Path]:
    """Write ``<out_dir>/<name>.json`` and, for tabular results, ``<name>.csv``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [out_dir / f"{name}.json"]
    written[0].write_text(dumps(payload) + "\n", encoding="utf-8")
    if table is not None:
        path = out_dir / f"{name}.csv"
        table.to_csv(path, index=False)
        written.append(path)
    logger.info("Wrote %s", ", ".join(str(p) for p in written))
    return written


def _read_json(p: Path):
    return json.loads(p.read_text(encoding="utf-8")) if p.exists() else None


def _value(field: Any) -> Any:
    return field.get("value") if isinstance(field, dict) and "value" in field else field


def main(out_dir: str | Path) -> Dict[str, Any]:
    """Collect the headline results of a run directory into ``summary.json``."""
    base = Path(out_dir)
    out: Dict[str, Any] = {}
    validate = _read_json(base / "validate.json")
    if validate:
        res = validate.get("result", {})
        out["map"] = {k: res.get(k) for k in ("name", "train_track", "expanding_power", "lambda_min", "lambda_max", "C_f")}
    analyze = _read_json(base / "analyze.json")
    if analyze:
        res = analyze.get("result", {})
        out["analysis"] = {
            "constants": res.get("constants"),
            "hyperbolicity": res.get("hyperbolicity"),
            "inps": len(res.get("inps", []) or []),
        }
    simplex = _read_json(base / "simplex.json")
    if simplex:
        res = simplex.get("result", {})
        out["simplex"] = {"dimension": _value(res.get("dimension")), "uniform_faces": res.get("uniform_faces")}
    ns = _read_json(base / "ns-report.json")
    if ns:
        res = ns.get("result", {})
        out["ns_report"] = {k: res.get(k) for k in ("m0", "ok", "samples", "violations", "unconverged")}
        orbits = base / "ns-report.csv"
        if orbits.exists():
            df = pd.read_csv(orbits)
            if not df.empty:
                fwd = df[df["step"] >= 0]
                out["ns_report"]["forward_distance_by_step"] = {
                    int(k): float(v) for k, v in fwd.groupby("step")["dist_plus"].median().dropna().items()
                }
    (base / "summary.json").write_text(dumps(out) + "\n", encoding="utf-8")
    return out


if __name__ == "__main__":  # pragma: no cover
    logging.basicConfig(level=logging.INFO)
    main(sys.argv[1])
