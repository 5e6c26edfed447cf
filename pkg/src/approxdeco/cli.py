"""Command line entry point: ``approxdeco <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Optional

from .generators import generate, parse_params
from .graph import (
    Orientation,
    PartialEdgeColoring,
    corr_of_coloring,
    corr_of_decoration,
    corr_of_orientation,
    load_graph,
    save_graph,
)
from .harness import ExperimentPlan, convergence_summary, records_to_csv, records_to_json, run_plan
from .koenig import OddCycleError, koenig_color
from .measures import VertexMeasure, measure_from_preset
from .orient import StageRecord, approximate_balanced_orientation
from .schreier import Decoration, decorate, verify_free_action

TOL = 1e-12


def _parse_dims(text):
    return [int(x) for x in text.split("x")] if text else None


def _measure(g, preset: str, weights, dims=None) -> VertexMeasure:
    if preset == "file":
        if weights is None:
            raise SystemExit("--measure file needs a JSON graph carrying weights")
        return VertexMeasure.from_weights(weights)
    # graph files do not keep torus shape, so exp presets take it from --dims
    return measure_from_preset(preset, g, _parse_dims(dims))


def _emit(args, payload: dict, checks: dict[str, bool]) -> int:
    payload = dict(payload, checks=checks, passed=all(checks.values()))
    if getattr(args, "out", None):
        Path(args.out).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    flat = {k: v for k, v in payload.items() if not isinstance(v, (list, dict))}
    flat.update({f"check_{k}": v for k, v in checks.items()})
    if args.format == "json":
        print(json.dumps(flat, sort_keys=True))
    else:
        keys = sorted(flat)
        print(",".join(keys))
        print(",".join(str(flat[k]) for k in keys))
    return 0 if payload["passed"] else 1


def cmd_gen(args) -> int:
    g = generate(args.family, parse_params(args.params), args.seed)
    save_graph(g, args.out)
    checks = {"simple": not g.has_parallel_edges()}
    if args.family in ("random_regular", "bipartite_regular", "torus", "rotation"):
        checks["regular"] = g.is_regular()
    payload = {"family": args.family, "n_vertices": g.n_vertices, "n_edges": g.n_edges,
               "max_degree": g.max_degree, "file": args.out}
    # --out names the graph file, so the report goes to stdout only
    return _emit(argparse.Namespace(format=args.format, out=None), payload, checks)


def cmd_koenig(args) -> int:
    g, weights = load_graph(args.graph)
    mu = _measure(g, args.measure, weights, args.dims)
    try:
        res = koenig_color(g, mu, args.epsilon, weighted=args.weighted or None)
    except OddCycleError as exc:
        return _emit(args, {"error": str(exc)}, {"odd_cycle_free": False})
    payload = res.as_dict()
    payload.update(seed=args.seed, epsilon=args.epsilon, measure=args.measure, dims=args.dims, kind="coloring")
    checks = {
        "proper": res.coloring.is_proper(g),
        "a_mass_bound": res.a_mass <= 1 / res.config.L,
        "corr_target": res.report.corr_mass > 1 - args.epsilon,
    }
    return _emit(args, payload, checks)


def cmd_orient(args) -> int:
    g, weights = load_graph(args.graph)
    mu = _measure(g, args.measure, weights, args.dims)
    stages: list[StageRecord] = []
    try:
        s, rep = approximate_balanced_orientation(
            g, mu, args.epsilon, truncation=args.truncation, stages=args.stages, trace=stages
        )
    except ValueError as exc:
        return _emit(args, {"error": str(exc)}, {"even_degrees": False})
    payload = {
        "kind": "orientation",
        "epsilon": args.epsilon,
        "measure": args.measure,
        "dims": args.dims,
        "corr_mass": rep.corr_mass,
        "deep_corr_mass": rep.deep_corr_mass,
        "stages": [asdict(st) for st in stages],
        "direction": s.direction,
    }
    return _emit(args, payload, {"deep_corr_target": rep.deep_corr_mass > 1 - args.epsilon})


def cmd_decorate(args) -> int:
    g, weights = load_graph(args.graph)
    mu = _measure(g, args.measure, weights, args.dims)
    d = decorate(g, mu, args.epsilon)
    fa = verify_free_action(g, d)
    b = d.budget
    payload = {
        "kind": "decoration",
        "epsilon": args.epsilon,
        "measure": args.measure,
        "dims": args.dims,
        "direction": d.orientation.direction,
        "labels": d.labels.colors,
        "palette": d.labels.palette_size,
        "corr_mass": d.report.corr_mass,
        "budget": b.as_dict(),
        "predicted_total": b.predicted_total(),
        "free_action": fa.as_dict(),
    }
    checks = {
        "bookkeeping": abs(b.total - b.predicted_total()) <= TOL,
        "budget_covers_failure": b.total + TOL >= 1 - d.report.corr_mass,
        "stages_met_budget": d.budget_met,
        "total_below_epsilon": b.total < args.epsilon,
        "injective_on_corr": fa.injective_on_corr(),
    }
    return _emit(args, payload, checks)


def cmd_bench(args) -> int:
    plan = ExperimentPlan.from_json(Path(args.plan).read_text())
    if args.out:
        plan.output = args.out
    if args.no_timing:
        plan.record_timing = False
    records = run_plan(plan, threads=args.threads)
    summary = convergence_summary(records)
    if args.format == "json":
        sys.stdout.write(records_to_json(records, plan))
    else:
        sys.stdout.write(records_to_csv(records))
    print(summary.to_text(), file=sys.stderr)
    return 0 if summary.failures == 0 else 1


def cmd_verify(args) -> int:
    """Recount the Corr sets of a result file written by koenig, orient or decorate."""
    g, weights = load_graph(args.graph)
    doc = json.loads(Path(args.result).read_text())
    mu = _measure(g, doc.get("measure", "uniform"), weights, doc.get("dims"))
    kind = doc.get("kind")
    checks: dict[str, bool] = {}
    payload: dict = {"kind": kind}
    if kind == "coloring":
        c = PartialEdgeColoring(doc["colors"], doc["palette"])
        rep = corr_of_coloring(g, c, mu)
        checks["proper"] = c.is_proper(g)
        checks["corr_matches"] = abs(rep.corr_mass - doc["corr_mass"]) <= TOL
    elif kind == "orientation":
        rep = corr_of_orientation(g, Orientation(doc["direction"]), mu)
        checks["corr_matches"] = abs(rep.corr_mass - doc["corr_mass"]) <= TOL
        checks["deep_matches"] = abs(rep.deep_corr_mass - doc["deep_corr_mass"]) <= TOL
    elif kind == "decoration":
        s = Orientation(doc["direction"])
        c = PartialEdgeColoring(doc["labels"], doc["palette"])
        rep = corr_of_decoration(g, s, c, mu)
        fa = verify_free_action(g, Decoration(s, c, rep))
        checks["corr_matches"] = abs(rep.corr_mass - doc["corr_mass"]) <= TOL
        checks["injective_on_corr"] = fa.injective_on_corr()
        payload["all_permutations"] = fa.all_permutations()
    else:
        raise SystemExit(f"unknown result kind {kind!r}")
    payload["corr_mass"] = rep.corr_mass
    ns = argparse.Namespace(format=args.format, out=None)
    return _emit(ns, payload, checks)


def build_parser() -> argparse.ArgumentParser:
    def globals_parser(defaults: bool) -> argparse.ArgumentParser:
        # subcommands repeat the global flags without defaults, so a flag given
        # before the subcommand is not reset by the subparser
        def dflt(value):
            return value if defaults else argparse.SUPPRESS

        q = argparse.ArgumentParser(add_help=False)
        q.add_argument("--seed", type=int, default=dflt(0))
        q.add_argument("--threads", type=int, default=dflt(1))
        q.add_argument("--format", choices=("csv", "json"), default=dflt("csv"))
        return q

    common = globals_parser(defaults=False)
    p = argparse.ArgumentParser(
        prog="approxdeco", parents=[globals_parser(defaults=True)], description=__doc__
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
        return sp

    sp = add("gen", cmd_gen, "generate a graph instance")
    sp.add_argument("--family", required=True)
    sp.add_argument("--params", default="")
    sp.add_argument("--out", required=True)

    for name, func, text in (
        ("koenig", cmd_koenig, "approximate max-degree coloring of a bipartite graph"),
        ("orient", cmd_orient, "approximately balanced orientation"),
        ("decorate", cmd_decorate, "approximate Schreier decoration"),
    ):
        sp = add(name, func, text)
        sp.add_argument("--graph", required=True)
        sp.add_argument("--measure", default="uniform")
        sp.add_argument("--dims", default=None, help="torus shape such as 5x5, used by exp presets")
        sp.add_argument("--epsilon", type=float, required=True)
        sp.add_argument("--out", default=None)
        if name == "koenig":
            sp.add_argument("--weighted", action="store_true", default=False)
        if name == "orient":
            sp.add_argument("--truncation", action="store_true", default=False)
            sp.add_argument("--stages", type=int, default=None)

    sp = add("bench", cmd_bench, "run an experiment plan")
    sp.add_argument("--plan", required=True)
    sp.add_argument("--out", default=None)
    sp.add_argument("--no-timing", action="store_true", default=False)

    sp = add("verify", cmd_verify, "recount a result file against its graph")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--result", required=True)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
