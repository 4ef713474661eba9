"""Command line entry point: ``python -m src.cli <subcommand> ...``.

Machine-readable JSON goes to stdout (and ``--out DIR/<subcommand>.json``);
the human summary goes to stderr through logging.  Library errors become a
structured JSON error object with exit status 1; usage errors exit 2.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from src.analysis.constants import dichotomy_constants
from src.analysis.context import TrainTrackContext, build_context
from src.analysis.hyperbolicity import hyperbolicity_verdict
from src.analysis.inps import InpSearch, search_inps
from src.analysis.subdivide import subdivide_at_inp_endpoints
from src.config import Settings, load_settings
from src.currents.limits import build_simplex, iterate_limit
from src.currents.strata import rational_limit_strata, strata
from src.currents.weights import projective_distance
from src.data.dq_checks import check_map
from src.data.dsl import format_map_file, load_map_file
from src.data.pair_file import build_pair_from_file, load_pair_file
from src.errors import NotHyperbolicError, TrainTrackError
from src.model.graph import cyclically_reduce
from src.reports.aggregate import dumps, input_hash, to_jsonable, write_artifacts
from src.sim.backforth import verify_backforth
from src.sim.ns_report import ns_report
from src.sim.orbit import orbit
from src.sim.sampling import SampleSpec, draw_samples
from src.sim.wedge import wedge_maps
from src.subst.frequencies import limit_frequencies, stretch_factors
from src.subst.substitution import substitution_from_map

__all__ = ["SUBCOMMANDS", "build_parser", "run_subcommand", "main"]

logger = logging.getLogger(__name__)

Result = Tuple[Dict[str, Any], Optional[pd.DataFrame]]


def _settings(args: argparse.Namespace) -> Settings:
    """File defaults, then pair file values, then command line flags."""
    extra: Dict[str, Any] = {}
    if getattr(args, "pair", None) is not None:
        extra.update(load_pair_file(args.pair).overrides())
        extra.update(u_tol=args.u_tol, v_tol=args.v_tol, samples=args.samples, sample_length=args.len)
    cli = {
        "radius": args.radius,
        "tol": args.tol,
        "dedup_tol": args.dedup_tol,
        "seed": args.seed,
        "n_max": args.nmax,
        "length_budget": args.budget,
        "workers": args.workers,
    }
    merged = {**{k: v for k, v in extra.items() if v is not None}, **{k: v for k, v in cli.items() if v is not None}}
    return load_settings(args.config, **merged)


def _context(path: Path, settings: Settings) -> TrainTrackContext:
    return build_context(load_map_file(path).map, settings.max_power, budget=settings.length_budget)


def _inps(ctx: TrainTrackContext, settings: Settings) -> InpSearch:
    return search_inps(ctx, settings.period_bound, settings.max_cycles)


def _search_dict(ctx: TrainTrackContext, search: InpSearch) -> Dict[str, Any]:
    g = ctx.graph
    return {
        "inps": [eta.to_dict(g) for eta in search.inps],
        "pre_inps": [eta.to_dict(g) for eta in search.pre_inps],
        "unresolved": [eta.to_dict(g) for eta in search.unresolved],
        "automaton_states": search.n_states,
        "automaton_transitions": search.n_transitions,
        "stabilization_time": search.stabilization_time,
    }


# ----------------------------------------------------------------------
# Subcommands


def cmd_validate(args: argparse.Namespace, settings: Settings) -> Result:
    check = check_map(load_map_file(args.map), settings.max_power, settings.length_budget)
    logger.info("%s: train_track=%s errors=%d", args.map, check.status["train_track"], len(check.errors))
    return check.to_dict(), None


def cmd_analyze(args: argparse.Namespace, settings: Settings) -> Result:
    ctx = _context(args.map, settings)
    search = _inps(ctx, settings)
    verdict = hyperbolicity_verdict(ctx, search, settings.periodic_max_len, settings.periodic_max_power)
    try:
        constants: Optional[Dict[str, Any]] = dichotomy_constants(ctx, search).to_dict()
    except NotHyperbolicError as exc:
        constants = None
        logger.warning("No dichotomy constants: %s", exc.message)
    order = strata(ctx)
    lambdas = stretch_factors(substitution_from_map(ctx), settings.lambda_tol)
    g = ctx.graph
    result = {
        "context": ctx.summary(),
        "constants": constants,
        "hyperbolicity": verdict.to_dict(),
        "strata": [{"index": s.index, "edges": [g.name(e) for e in s.edges], "pf": s.pf} for s in order.strata],
        "stretch_factors": {g.name(e): lambdas.values[e] for e in g.positive_edges},
        **_search_dict(ctx, search),
    }
    logger.info("Hyperbolicity: %s; %d INPs", verdict.status, len(search.inps))
    return result, None


def cmd_inps(args: argparse.Namespace, settings: Settings) -> Result:
    ctx = _context(args.map, settings)
    result: Dict[str, Any] = _search_dict(ctx, _inps(ctx, settings))
    if args.subdivide:
        sub_ctx, sub = subdivide_at_inp_endpoints(ctx, max_power=settings.max_power)
        result["subdivided"] = sub is not None
        if sub is not None:
            result["subdivision"] = {
                "map": format_map_file(sub.map, "f_sub"),
                "after": _search_dict(sub_ctx, _inps(sub_ctx, settings)),
            }
    return result, None


def cmd_frequencies(args: argparse.Namespace, settings: Settings) -> Result:
    ctx = _context(args.map, settings)
    sub = substitution_from_map(ctx)
    g = ctx.graph
    edges = [g.edge_id(name) for name in args.edge] if args.edge else list(g.positive_edges)
    lambdas = stretch_factors(sub, settings.lambda_tol)
    out = []
    for e in edges:
        freq = limit_frequencies(sub, e, settings.radius, settings.tol, settings.max_iter)
        out.append(
            {
                "edge": g.name(e),
                "lambda": lambdas.values[e],
                "power": freq.power,
                "iterations": freq.iterations,
                "frequencies": freq.as_dict(),
            }
        )
    return {"radius": settings.radius, "edges": out}, None


def cmd_simplex(args: argparse.Namespace, settings: Settings) -> Result:
    ctx = _context(args.map, settings)
    simplex = build_simplex(
        ctx, settings.radius, settings.tol, settings.dedup_tol, settings.lambda_tol, workers=settings.workers
    )
    logger.info("Simplex: %d vertices", len(simplex.vertices))
    return simplex.to_dict(), None


def cmd_limit(args: argparse.Namespace, settings: Settings) -> Result:
    ctx = _context(args.map, settings)
    w = cyclically_reduce(ctx.graph, ctx.graph.parse(args.word))
    limit = rational_limit_strata(ctx, w, settings.radius, settings.tol, settings.limit_weighting)
    empirical, steps = iterate_limit(ctx, w, settings.radius, settings.length_budget)
    dist = projective_distance(limit.current, empirical)
    logger.info("Limit of %s: edges %s, distance to iterate %.3g", args.word, limit.edges, dist)
    return {
        "word": args.word,
        "weighting": settings.limit_weighting,
        "edges": limit.edges,
        "coefficients": limit.weights,
        "pseudo_legal_steps": limit.steps,
        "pseudo_legal_length": len(limit.pseudo_legal),
        "limit": limit.current.as_dict(),
        "empirical_steps": steps,
        "distance_to_iterate": dist,
    }, None


def _pair_setup(args: argparse.Namespace, settings: Settings):
    pair = build_pair_from_file(load_pair_file(args.pair), settings)
    common = dict(tol=settings.tol, dedup_tol=settings.dedup_tol, lambda_tol=settings.lambda_tol, workers=settings.workers)
    plus = build_simplex(pair.forward, settings.radius, sign="+", **common)
    minus = build_simplex(pair.backward, settings.radius, sign="-", **common)
    return pair, plus, minus


def cmd_orbit(args: argparse.Namespace, settings: Settings) -> Result:
    pair, plus, minus = _pair_setup(args, settings)
    g = pair.forward.graph
    w = cyclically_reduce(g, g.parse(args.word))
    records = orbit(pair, w, settings.n_max, plus, minus, settings.length_budget)
    table = pd.DataFrame([{k: v for k, v in r.to_dict().items() if k != "coefficients"} for r in records])
    return {"word": args.word, "n_max": settings.n_max, "records": [r.to_dict() for r in records]}, table


def cmd_ns_report(args: argparse.Namespace, settings: Settings) -> Result:
    pair, plus, minus = _pair_setup(args, settings)
    plan = SampleSpec(settings.samples, settings.sample_length, settings.seed, args.adversarial, tuple(args.word or ()))
    samples = draw_samples(pair.forward, plan)
    report = ns_report(
        pair,
        samples,
        plus,
        minus,
        settings.u_tol,
        settings.v_tol,
        settings.n_max,
        settings.length_budget,
        settings.workers,
        settings.seed,
    )
    result: Dict[str, Any] = {
        **report.summary(),
        "outcomes": [dataclasses.asdict(o) for o in report.outcomes],
    }
    if args.backforth is not None:
        check = verify_backforth(
            pair, [s.word for s in samples], args.backforth, settings.n_max, settings.length_budget, settings.workers
        )
        result["backforth"] = check.summary()
    logger.info("NS report: m0=%s ok=%s", report.m0, report.ok)
    return result, report.table


def cmd_wedge(args: argparse.Namespace, settings: Settings) -> Result:
    files = [load_map_file(p) for p in args.maps]
    fixed: List[str] = []
    for i, mf in enumerate(files):
        if args.fixed and i < len(args.fixed):
            fixed.append(args.fixed[i])
        elif mf.fixed_vertex is not None:
            fixed.append(mf.fixed_vertex)
        elif mf.graph.is_rose:
            fixed.append(mf.graph.vertices[0])
        else:
            raise TrainTrackError(f"{mf.source}: no fixed vertex given", {"file": str(mf.source)})
    f = wedge_maps([mf.map for mf in files], fixed)
    text = format_map_file(f, args.name, f.graph.vertices[0])
    if args.out is not None:
        path = Path(args.out) / f"{args.name}.map"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return {"map": text, "edges": list(f.graph.edge_names), "images": f.describe()}, None


SUBCOMMANDS: Dict[str, Callable[[argparse.Namespace, Settings], Result]] = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "inps": cmd_inps,
    "frequencies": cmd_frequencies,
    "simplex": cmd_simplex,
    "limit": cmd_limit,
    "orbit": cmd_orbit,
    "ns-report": cmd_ns_report,
    "wedge": cmd_wedge,
}


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="Settings YAML (default config/defaults.yaml)")
    common.add_argument("--out", type=Path, default=None, help="Directory for JSON/CSV artifacts")
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--radius", type=int, default=None, help="Path length R of weight functions")
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--dedup-tol", dest="dedup_tol", type=float, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--nmax", type=int, default=None)
    common.add_argument("--budget", type=int, default=None, help="Word length budget")

    parser = argparse.ArgumentParser(prog="src.cli", description="Train track maps, limit currents and North-South dynamics")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "analyze", "simplex"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("map", type=Path)
    sp = sub.add_parser("inps", parents=[common])
    sp.add_argument("map", type=Path)
    sp.add_argument("--subdivide", action="store_true", help="Subdivide at interior INP endpoints")
    sp = sub.add_parser("frequencies", parents=[common])
    sp.add_argument("map", type=Path)
    sp.add_argument("--edge", action="append", help="Edge name (repeatable; default all)")
    sp = sub.add_parser("limit", parents=[common])
    sp.add_argument("map", type=Path)
    sp.add_argument("--word", required=True)
    for name in ("orbit", "ns-report"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--pair", type=Path, required=True)
        sp.add_argument("--u-tol", dest="u_tol", type=float, default=None)
        sp.add_argument("--v-tol", dest="v_tol", type=float, default=None)
        sp.add_argument("--samples", type=int, default=None)
        sp.add_argument("--len", type=int, default=None, help="Sample word length")
        if name == "orbit":
            sp.add_argument("--word", required=True)
        else:
            sp.add_argument("--word", action="append", help="Extra sample word (repeatable)")
            sp.add_argument("--adversarial", action="store_true")
            sp.add_argument("--backforth", type=float, default=None, metavar="DELTA")
    sp = sub.add_parser("wedge", parents=[common])
    sp.add_argument("maps", type=Path, nargs="+")
    sp.add_argument("--fixed", action="append", help="Fixed vertex per map, in order")
    sp.add_argument("--name", default="wedge")
    return parser


def _files(args: argparse.Namespace) -> List[Path]:
    out = [p for key in ("map", "pair", "config") if isinstance(p := getattr(args, key, None), Path)]
    out += list(getattr(args, "maps", []) or [])
    return [p for p in out if p.is_file()]


def run_subcommand(name: str, args: argparse.Namespace) -> Tuple[int, Dict[str, Any]]:
    """Run one subcommand; returns the exit code and the JSON payload."""
    try:
        settings = _settings(args)
        result, table = SUBCOMMANDS[name](args, settings)
    except TrainTrackError as exc:
        logger.error("%s failed: %s", name, exc.message)
        return 1, exc.to_dict()
    except (ValueError, OSError) as exc:
        logger.error("%s failed: %s", name, exc)
        return 1, {"error": "invalid_input", "message": str(exc), "details": {}}
    params = {k: v for k, v in sorted(vars(args).items()) if k != "out"}
    payload = {
        "command": name,
        "input_hash": input_hash(params, _files(args)),
        "settings": to_jsonable(settings.to_dict()),
        "result": to_jsonable(result, settings.tol),
    }
    if args.out is not None:
        write_artifacts(args.out, name, payload, table)
    return 0, payload


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    code, payload = run_subcommand(args.command, args)
    sys.stdout.write(dumps(payload) + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    logging.basicConfig(level=logging.INFO)
    sys.exit(main())
