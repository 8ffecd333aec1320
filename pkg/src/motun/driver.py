"""Multi-start tunneling runs: per-start minimization and tunneling, archives,
and CSV/JSON reports."""
from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .archive import ArchiveEntry, ParetoArchive, Phase, filter_nondominated
from .corpus import get_problem, uniform_starts
from .criticality import CriticalityCertificate, fj_certificate
from .descent import DescentOptions, DescentResult, Status, minimize
from .errors import MotunError
from .problem import ProblemSpec, evaluate
from .tunneling import TunnelingParams, build_tp, perturbed_start

logger = logging.getLogger(__name__)

IMPROVEMENT_TOL = 1e-8


class IoFailure(MotunError):
    """A report could not be written or read."""


@dataclass(frozen=True)
class RunConfig:
    problem: str
    n_starts: int = 200
    start_mode: str = "lattice"
    seed: int = 0
    tunneling: TunnelingParams = field(default_factory=TunnelingParams)
    descent: DescentOptions = field(default_factory=DescentOptions)
    cycles: int = 1
    workers: int = 1
    output_path: Optional[str] = None
    output_format: str = "csv"

    def __post_init__(self):
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.start_mode not in ("lattice", "random"):
            raise ValueError(f"unknown start mode {self.start_mode!r}")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"unknown output format {self.output_format!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        data["tunneling"] = TunnelingParams(**data["tunneling"])
        data["descent"] = DescentOptions(**data["descent"])
        return cls(**data)


@dataclass(frozen=True)
class PhaseRow:
    """One row of the report: a point reached in one phase of one start."""

    run_id: int
    phase: str
    x: Optional[tuple[float, ...]]
    f: Optional[tuple[float, ...]]
    fj_residual: Optional[float]
    classification: Optional[str]
    tp_feasible: Optional[bool]
    iterations: int
    status: str


@dataclass(frozen=True)
class StartRecord:
    run_id: int
    x0: tuple[float, ...]
    before: PhaseRow
    after: Optional[PhaseRow]
    wall_time: float = 0.0
    error: Optional[str] = None


@dataclass(frozen=True)
class RunReport:
    config: RunConfig
    n: int
    m: int
    starts: tuple[StartRecord, ...]
    wpf: tuple[PhaseRow, ...]
    pf: tuple[PhaseRow, ...]
    wpft: tuple[PhaseRow, ...]
    pft: tuple[PhaseRow, ...]

    @property
    def pfbt(self) -> int:
        return len(self.pf)

    @property
    def pfat(self) -> int:
        return len(self.pft)

    def archives(self) -> dict[str, tuple[PhaseRow, ...]]:
        return {"WPF": self.wpf, "PF": self.pf, "WPFT": self.wpft, "PFT": self.pft}


# -- one start ------------------------------------------------------------------

def _row(run_id: int, phase: Phase, result: DescentResult, certificate: CriticalityCertificate,
         tp_feasible: Optional[bool]) -> PhaseRow:
    return PhaseRow(
        run_id=run_id,
        phase=phase.value,
        x=tuple(float(v) for v in result.x_final),
        f=tuple(float(v) for v in result.record.fvals),
        fj_residual=certificate.residual,
        classification=certificate.classification.value,
        tp_feasible=tp_feasible,
        iterations=result.iterations,
        status=result.status.value,
    )


def _error_row(run_id: int, phase: Phase, status: str) -> PhaseRow:
    return PhaseRow(run_id, phase.value, None, None, None, None, None, 0, status)


def _improves(new: np.ndarray, old: np.ndarray) -> bool:
    return bool(np.any(new < old - IMPROVEMENT_TOL))


def run_start(problem: ProblemSpec, config: RunConfig, run_id: int, x0) -> StartRecord:
    """Steps (a)-(c) for one start point, repeated ``config.cycles`` times.

    The first minimization result is the before-tunneling point. The
    after-tunneling point is the tunneling result of the last cycle run;
    further cycles restart minimization from it and stop once the new local
    solution no longer improves any objective.
    """
    tic = time.perf_counter()
    x0 = np.asarray(x0, dtype=float)
    rng = np.random.default_rng([config.seed, run_id])
    try:
        first = minimize(problem, x0, config.descent)
    except MotunError as exc:
        return StartRecord(run_id, tuple(map(float, x0)), _error_row(run_id, Phase.BEFORE_TUNNEL, "Error"),
                           None, time.perf_counter() - tic, f"{type(exc).__name__}: {exc}")
    before = _row(run_id, Phase.BEFORE_TUNNEL, first, fj_certificate(first.record), None)

    local = first
    after = None
    error = None
    for cycle in range(config.cycles):
        try:
            tp = build_tp(problem, local.x_final, local.record.fvals, config.tunneling)
            start = perturbed_start(problem, local.x_final, config.tunneling, rng)
            tunneled = minimize(tp.spec, start, config.descent)
            base_record = evaluate(problem, tunneled.x_final)
        except MotunError as exc:
            error = f"{type(exc).__name__}: {exc}"
            after = _error_row(run_id, Phase.AFTER_TUNNEL, "Error")
            break
        after = _row(run_id, Phase.AFTER_TUNNEL, replace(tunneled, record=base_record),
                     fj_certificate(base_record), tunneled.feasible)
        if cycle + 1 == config.cycles:
            break
        try:
            nxt = minimize(problem, tunneled.x_final, config.descent)
        except MotunError:
            break
        if not _improves(nxt.record.fvals, local.record.fvals):
            break
        local = nxt
    return StartRecord(run_id, tuple(map(float, x0)), before, after,
                       time.perf_counter() - tic, error)


def _worker(args) -> StartRecord:
    name, config, run_id, x0 = args
    return run_start(get_problem(name), config, run_id, x0)


# -- whole run --------------------------------------------------------------------

def _entry(row: PhaseRow) -> ArchiveEntry:
    return ArchiveEntry(x=np.array(row.x), fvals=np.array(row.f), phase=Phase(row.phase),
                        run_id=row.run_id)


def _archivable(row: Optional[PhaseRow]) -> bool:
    return row is not None and row.f is not None and row.status != Status.STEP_FAILURE.value


def _filtered(rows: list[PhaseRow]) -> tuple[PhaseRow, ...]:
    by_id = {r.run_id: r for r in rows}
    kept = filter_nondominated(ParetoArchive([_entry(r) for r in rows]))
    return tuple(by_id[e.run_id] for e in kept)


def build_report(config: RunConfig, problem: ProblemSpec, starts: list[StartRecord]) -> RunReport:
    """Assemble the four archives from per-start records (in ``run_id`` order)."""
    starts = sorted(starts, key=lambda s: s.run_id)
    wpf = [s.before for s in starts if _archivable(s.before)]
    wpft = [s.after for s in starts if _archivable(s.after)]
    return RunReport(
        config=config, n=problem.n, m=problem.m, starts=tuple(starts),
        wpf=tuple(wpf), pf=_filtered(wpf), wpft=tuple(wpft), pft=_filtered(wpft),
    )


def run_algorithm1(config: RunConfig, problem: Optional[ProblemSpec] = None) -> RunReport:
    """Multi-start minimization + tunneling over ``config.n_starts`` points.

    ``problem`` overrides the registry lookup (single-process only).
    Per-start failures are recorded; the affected archive entry is skipped.
    """
    registered = problem is None
    problem = get_problem(config.problem) if registered else problem
    points = uniform_starts(problem, config.n_starts, config.start_mode, config.seed)
    if config.workers > 1 and registered:
        jobs = [(config.problem, config, i, x0) for i, x0 in enumerate(points)]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            starts = list(pool.map(_worker, jobs, chunksize=max(1, len(jobs) // (4 * config.workers))))
    else:
        starts = [run_start(problem, config, i, x0) for i, x0 in enumerate(points)]
    for s in starts:
        if s.error:
            logger.info("start %d: %s", s.run_id, s.error)
    return build_report(config, problem, starts)


# -- reports ----------------------------------------------------------------------

def csv_columns(n: int, m: int) -> list[str]:
    return (["run_id", "phase"] + [f"x_{j + 1}" for j in range(n)] + [f"f_{k + 1}" for k in range(m)]
            + ["fj_residual", "classification", "tp_feasible", "iterations", "status"])


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def row_dict(row: PhaseRow, n: int, m: int) -> dict:
    out = {"run_id": row.run_id, "phase": row.phase}
    for j in range(n):
        out[f"x_{j + 1}"] = None if row.x is None else row.x[j]
    for k in range(m):
        out[f"f_{k + 1}"] = None if row.f is None else row.f[k]
    out.update(fj_residual=row.fj_residual, classification=row.classification,
               tp_feasible=row.tp_feasible, iterations=row.iterations, status=row.status)
    return out


def _row_from_dict(data: dict, n: int, m: int) -> PhaseRow:
    xs = [data[f"x_{j + 1}"] for j in range(n)]
    fs = [data[f"f_{k + 1}"] for k in range(m)]
    return PhaseRow(
        run_id=int(data["run_id"]),
        phase=data["phase"],
        x=None if xs[0] is None else tuple(float(v) for v in xs),
        f=None if fs[0] is None else tuple(float(v) for v in fs),
        fj_residual=data["fj_residual"],
        classification=data["classification"],
        tp_feasible=data["tp_feasible"],
        iterations=int(data["iterations"]),
        status=data["status"],
    )


def start_rows(report: RunReport) -> list[PhaseRow]:
    rows = []
    for s in report.starts:
        rows.append(s.before)
        if s.after is not None:
            rows.append(s.after)
    return rows


def report_to_csv(report: RunReport) -> str:
    cols = csv_columns(report.n, report.m)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in start_rows(report):
        writer.writerow(_fmt(v) for v in row_dict(row, report.n, report.m).values())
    for name, rows in report.archives().items():
        if not rows:
            continue
        writer.writerow([f"# {name}"])
        for row in rows:
            writer.writerow(_fmt(v) for v in row_dict(row, report.n, report.m).values())
    return buf.getvalue()


def report_to_dict(report: RunReport) -> dict:
    n, m = report.n, report.m
    return {
        "config": report.config.to_dict(),
        "n": n,
        "m": m,
        "PFBT": report.pfbt,
        "PFAT": report.pfat,
        "starts": [
            {
                "run_id": s.run_id,
                "x0": list(s.x0),
                "before": row_dict(s.before, n, m),
                "after": None if s.after is None else row_dict(s.after, n, m),
                "wall_time": s.wall_time,
                "error": s.error,
            }
            for s in report.starts
        ],
        **{name: [row_dict(r, n, m) for r in rows] for name, rows in report.archives().items()},
    }


def report_from_dict(data: dict) -> RunReport:
    n, m = int(data["n"]), int(data["m"])
    starts = tuple(
        StartRecord(
            run_id=int(s["run_id"]),
            x0=tuple(float(v) for v in s["x0"]),
            before=_row_from_dict(s["before"], n, m),
            after=None if s["after"] is None else _row_from_dict(s["after"], n, m),
            wall_time=float(s["wall_time"]),
            error=s["error"],
        )
        for s in data["starts"]
    )
    arch = {name: tuple(_row_from_dict(r, n, m) for r in data[name]) for name in ("WPF", "PF", "WPFT", "PFT")}
    return RunReport(config=RunConfig.from_dict(data["config"]), n=n, m=m, starts=starts,
                     wpf=arch["WPF"], pf=arch["PF"], wpft=arch["WPFT"], pft=arch["PFT"])


def emit_report(report: RunReport, fmt: str = "csv", path=None) -> str:
    """Render ``report`` as CSV or JSON; write it to ``path`` when given."""
    if fmt == "csv":
        text = report_to_csv(report)
    elif fmt == "json":
        text = json.dumps(report_to_dict(report), indent=2)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise IoFailure(f"cannot write report to {path}: {exc}") from exc
    return text


def load_json_report(path) -> RunReport:
    try:
        return report_from_dict(json.loads(Path(path).read_text()))
    except (OSError, ValueError, KeyError) as exc:
        raise IoFailure(f"cannot read report {path}: {exc}") from exc
