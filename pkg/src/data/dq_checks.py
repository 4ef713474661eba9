"""Input checks for declared maps.

:func:`check_map` reports the train track status of a parsed map file
instead of failing on the first problem: the report carries ``warnings``
and ``errors`` lists next to the status fields, and the validated context
when one could be built.  A markdown version can be written for scripts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

from src.analysis.context import TrainTrackContext, build_context
from src.data.schemas import MapFile
from src.errors import TrainTrackError
from src.model.graph_map import DEFAULT_LENGTH_BUDGET, is_train_track

__all__ = ["MapCheck", "check_map", "write_report"]

logger = logging.getLogger(__name__)


@dataclass
class MapCheck:
    status: Dict[str, object]
    warnings: List[str] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)
    context: Optional[TrainTrackContext] = None

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> Dict[str, object]:
        return {**self.status, "warnings": self.warnings, "errors": self.errors}


def check_map(mf: MapFile, max_power: int = 12, budget: int = DEFAULT_LENGTH_BUDGET) -> MapCheck:
    """Regularity, train track property, expanding power and constants.

    Parameters
    ----------
    mf:
        Parsed map file; regularity already holds for any parsed file.
    max_power:
        Largest power tried for the expanding power.
    budget:
        Longest materialized edge image.
    """
    f = mf.map
    status: Dict[str, object] = {"name": mf.name, "regular": True, "positive": f.is_positive}
    warnings: List[str] = []
    errors: List[str] = []
    tt = is_train_track(f)
    status["train_track"] = tt.ok
    if not tt.ok:
        errors.append(f"not a train track map: {tt.witness(f.graph)}")
        status["witness"] = tt.witness(f.graph)
    if mf.fixed_vertex is not None:
        v = f.graph.vertex_id(mf.fixed_vertex)
        if f.vertex_image[v] != v:
            warnings.append(f"fixed vertex {mf.fixed_vertex} is moved to {f.graph.vertices[f.vertex_image[v]]}")
    ctx: Optional[TrainTrackContext] = None
    if tt.ok:
        try:
            ctx = build_context(f, max_power, budget=budget)
        except TrainTrackError as exc:
            errors.append(f"{exc.code}: {exc.message}")
            status["expanding_power"] = None
    if ctx is not None:
        if ctx.base.graph != f.graph:
            warnings.append("invariant forest contracted: " + ", ".join(sorted(set(f.graph.edge_names) - set(ctx.graph.edge_names))))
        status.update(
            {
                "expanding_power": ctx.power,
                "lambda_min": ctx.bounds.lambda_min,
                "lambda_max": ctx.bounds.lambda_max,
                "C_f": ctx.cancellation,
                "C": ctx.critical,
                "illegal_turns": ctx.turns.labels(ctx.graph),
            }
        )
    for msg in errors:
        logger.warning("%s: %s", mf.name, msg)
    return MapCheck(status, warnings, errors, ctx)


def write_report(check: MapCheck, report_path: Union[str, Path]) -> Path:
    """Markdown summary with ``Errors`` and ``Warnings`` sections."""
    lines = [f"# Map check: {check.status.get('name')}", ""]
    for key in sorted(check.status):
        lines.append(f"- {key}: {check.status[key]}")
    lines.extend(["", "## Errors"])
    lines.extend([f"- {msg}" for msg in check.errors] or ["None"])
    lines.extend(["", "## Warnings"])
    lines.extend([f"- {msg}" for msg in check.warnings] or ["None"])
    path = Path(report_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
