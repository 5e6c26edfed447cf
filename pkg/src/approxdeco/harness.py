"""Experiment plans, per-run records and their CSV/JSON forms."""

from __future__ import annotations

import csv
import io
import itertools
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

from .generators import generate
from .koenig import koenig_color
from .measures import measure_from_preset
from .orient import StageRecord, approximate_balanced_orientation
from .schreier import decorate, verify_free_action

CSV_VERSION = "approxdeco-runs/1"
JSON_SCHEMA = "approxdeco-runs/1"
ALGORITHMS = ("koenig", "orient", "decorate")


@dataclass
class InstanceSpec:
    family: str
    params: dict

    def label(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.family}({inner})"


@dataclass
class ExperimentPlan:
    instances: list[InstanceSpec]
    measures: list[str] = field(default_factory=lambda: ["uniform"])
    epsilons: list[float] = field(default_factory=lambda: [0.1])
    algorithms: list[str] = field(default_factory=lambda: ["koenig"])
    repetitions: int = 1
    seed: int = 0
    output: Optional[str] = None
    # wall time is the only nondeterministic column; switch it off for rerun comparisons
    record_timing: bool = True
    truncation: bool = False

    def __post_init__(self):
        self.instances = [
            i if isinstance(i, InstanceSpec) else InstanceSpec(**i) for i in self.instances
        ]
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ValueError(f"unknown algorithms {bad}; choose from {ALGORITHMS}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be positive")

    def cells(self):
        grid = itertools.product(
            range(self.repetitions), self.instances, self.measures, self.epsilons, self.algorithms
        )
        for index, (rep, inst, measure, eps, algo) in enumerate(grid):
            yield index, rep, inst, measure, eps, algo

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentPlan":
        return cls(**json.loads(text))


@dataclass
class RunRecord:
    cell: int
    instance: str
    repetition: int
    seed: int
    measure: str
    epsilon: float
    algorithm: str
    n_vertices: int = 0
    n_edges: int = 0
    corr_coloring: Optional[float] = None
    corr_orientation: Optional[float] = None
    deep_corr: Optional[float] = None
    corr_decoration: Optional[float] = None
    L: Optional[int] = None
    a_mass: Optional[float] = None
    a_fraction: list[float] = field(default_factory=list)
    rounds: int = 0
    wall_time: float = 0.0
    status: str = "ok"
    error: str = ""

    @property
    def achieved(self) -> Optional[float]:
        return {
            "koenig": self.corr_coloring,
            "orient": self.deep_corr,
            "decorate": self.corr_decoration,
        }[self.algorithm]

    def validate(self) -> None:
        for name in ("corr_coloring", "corr_orientation", "deep_corr", "corr_decoration"):
            value = getattr(self, name)
            if value is not None and not -1e-12 <= value <= 1 + 1e-12:
                raise AssertionError(f"{name}={value} is outside [0, 1]")
        traj = self.a_fraction
        if any(b > a for a, b in zip(traj, traj[1:])):
            raise AssertionError(f"a-edge trajectory increases: {traj}")


def _run_cell(plan: ExperimentPlan, cell) -> RunRecord:
    index, rep, inst, measure, eps, algo = cell
    seed = plan.seed + rep
    rec = RunRecord(index, inst.label(), rep, seed, measure, eps, algo)
    start = time.perf_counter()
    try:
        g = generate(inst.family, inst.params, seed)
        rec.n_vertices, rec.n_edges = g.n_vertices, g.n_edges
        mu = measure_from_preset(measure, g)
        if algo == "koenig":
            res = koenig_color(g, mu, eps)
            rec.corr_coloring = res.report.corr_mass
            _koenig_fields(rec, res, g.n_edges)
        elif algo == "orient":
            stages: list[StageRecord] = []
            _, rep_s = approximate_balanced_orientation(
                g, mu, eps, truncation=plan.truncation, trace=stages
            )
            rec.corr_orientation = rep_s.corr_mass
            rec.deep_corr = rep_s.deep_corr_mass
            rec.rounds = len(stages)
        else:
            d = decorate(g, mu, eps)
            b = d.budget
            rec.corr_orientation = b.orientation_corr_mass
            rec.deep_corr = b.orientation_deep_mass
            rec.corr_coloring = b.cover_corr_mass
            rec.corr_decoration = d.report.corr_mass
            _koenig_fields(rec, d.cover_result, d.cover.cover_graph.n_edges)
            if not verify_free_action(g, d).injective_on_corr():
                raise AssertionError("a label map is not injective on the Corr set")
        rec.validate()
    except Exception as exc:  # recorded in-row so the sweep continues
        rec.status = "error"
        rec.error = f"{type(exc).__name__}: {exc}"
    if plan.record_timing:
        rec.wall_time = time.perf_counter() - start
    return rec


def _koenig_fields(rec: RunRecord, res, n_edges: int) -> None:
    rec.L = res.config.L
    rec.a_mass = float(res.a_mass)
    rec.a_fraction = [k / n_edges for k in res.trace.a_counts] if n_edges else []
    rec.rounds = res.trace.sweeps


def run_plan(plan: ExperimentPlan, threads: int = 1) -> list[RunRecord]:
    """Run every cell; output order follows cell index whatever the completion order."""
    cells = list(plan.cells())
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda c: _run_cell(plan, c), cells))
    else:
        records = [_run_cell(plan, c) for c in cells]
    records.sort(key=lambda r: r.cell)
    if plan.output:
        csv_path, json_path = output_paths(plan.output)
        csv_path.write_text(records_to_csv(records))
        json_path.write_text(records_to_json(records, plan))
    return records


def output_paths(base: str) -> tuple[Path, Path]:
    p = Path(base)
    stem = p.with_suffix("") if p.suffix in (".csv", ".json") else p
    return stem.with_suffix(".csv"), stem.with_suffix(".json")


# ------------------------------------------------------------------- CSV/JSON

_COLUMNS = [f.name for f in fields(RunRecord)]
_INT = {"cell", "repetition", "seed", "n_vertices", "n_edges", "rounds", "L"}
_FLOAT = {"epsilon", "corr_coloring", "corr_orientation", "deep_corr", "corr_decoration",
          "a_mass", "wall_time"}


def _cell_text(name: str, value) -> str:
    if value is None:
        return ""
    if name == "a_fraction":
        return ";".join(repr(x) for x in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_cell(name: str, text: str):
    if name == "a_fraction":
        return [float(x) for x in text.split(";")] if text else []
    if name in _INT:
        return int(text) if text else None
    if name in _FLOAT:
        return float(text) if text else None
    return text


def records_to_csv(records: list[RunRecord]) -> str:
    buf = io.StringIO()
    buf.write(f"# {CSV_VERSION}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_COLUMNS)
    for r in records:
        writer.writerow([_cell_text(name, getattr(r, name)) for name in _COLUMNS])
    return buf.getvalue()


def records_from_csv(text: str) -> list[RunRecord]:
    lines = text.splitlines()
    if not lines or lines[0] != f"# {CSV_VERSION}":
        raise ValueError(f"missing version line '# {CSV_VERSION}'")
    reader = csv.DictReader(lines[1:])
    out = []
    for row in reader:
        kwargs = {name: _parse_cell(name, row[name]) for name in _COLUMNS}
        for name in ("rounds", "n_vertices", "n_edges"):
            kwargs[name] = kwargs[name] or 0
        kwargs["wall_time"] = kwargs["wall_time"] or 0.0
        out.append(RunRecord(**kwargs))
    return out


def records_to_json(records: list[RunRecord], plan: Optional[ExperimentPlan] = None) -> str:
    doc = {
        "schema": JSON_SCHEMA,
        "plan": asdict(plan) if plan is not None else None,
        "records": [asdict(r) for r in records],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def records_from_json(text: str) -> list[RunRecord]:
    doc = json.loads(text)
    if doc.get("schema") != JSON_SCHEMA:
        raise ValueError(f"unexpected schema {doc.get('schema')!r}")
    return [RunRecord(**r) for r in doc["records"]]


# ------------------------------------------------------------------- summary


@dataclass
class SummaryRow:
    cell: int
    instance: str
    algorithm: str
    epsilon: float
    achieved: Optional[float]
    target: float
    passed: bool
    bound_ok: Optional[bool]
    note: str = ""


@dataclass
class Summary:
    rows: list[SummaryRow]

    @property
    def failures(self) -> int:
        return sum(not r.passed for r in self.rows)

    def to_text(self) -> str:
        out = ["cell  algorithm  epsilon  achieved  target  1/L-ok  pass  instance"]
        for r in self.rows:
            ach = "-" if r.achieved is None else f"{r.achieved:.6f}"
            bnd = "-" if r.bound_ok is None else ("yes" if r.bound_ok else "no")
            out.append(
                f"{r.cell:4d}  {r.algorithm:9s}  {r.epsilon:7g}  {ach:>8s}  {r.target:6.4f}"
                f"  {bnd:>6s}  {'PASS' if r.passed else 'FAIL'}  {r.instance} {r.note}".rstrip()
            )
        out.append(f"failures: {self.failures}")
        return "\n".join(out)


def convergence_summary(records: list[RunRecord]) -> Summary:
    """Per cell: achieved mass against ``1 - epsilon`` and the ``a``-mass bound ``1/L``."""
    rows = []
    for r in records:
        bound_ok = None
        if r.a_mass is not None and r.L:
            bound_ok = r.a_mass <= 1 / r.L
        achieved = r.achieved if r.status == "ok" else None
        target = 1 - r.epsilon
        passed = achieved is not None and achieved > target and bound_ok is not False
        rows.append(
            SummaryRow(r.cell, r.instance, r.algorithm, r.epsilon, achieved, target, passed,
                       bound_ok, r.error)
        )
    return Summary(rows)
