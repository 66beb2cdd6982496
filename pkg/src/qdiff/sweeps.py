"""Batch experiments over a parameter grid, written as CSV plus a JSON manifest.

Grid points are evaluated independently (optionally in a process pool) and
gathered by index, so the CSV body does not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy

from . import __version__
from .eigen import EigenError, k_value
from .fields import FieldError, PeriodicField, from_record, phase_shift, to_record
from .identities import identity_suite, large_B_limit, lemma_constructions, run_identity_case
from .speed import BracketError, ExtinctionError, spreading_speed

CSV_MAGIC = "# qdiff-sweep v1"
EXPERIMENTS = ("speed_vs_q", "k_and_c_vs_omega", "k_vs_B", "k_vs_q", "verify", "lemma_constructions")
_NUMERICAL = (EigenError, ExtinctionError, BracketError, FieldError, ArithmeticError)

COLUMNS = {
    "speed_vs_q": ["q", "lambda_star", "c_star", "k0", "status"],
    "k_and_c_vs_omega": ["q", "omega", "k0", "c_star", "lambda_star", "status"],
    "k_vs_B": ["q", "B", "k0", "limit", "status"],
    "k_vs_q": ["q", "omega", "k0", "status"],
    "verify": ["identity", "case", "gap", "tolerance", "status"],
    "lemma_constructions": ["q", "construction", "k_q", "k_0", "margin", "status"],
}


@dataclass(frozen=True)
class SweepSpec:
    """``grid`` holds q values (speed_vs_q, k_vs_q, lemma_constructions),
    omega values (k_and_c_vs_omega), B values (k_vs_B) or case indices
    (verify).  ``qs`` lists the q values for the omega and B sweeps and
    ``omega`` is the phase shift used by k_vs_q."""

    experiment: str
    grid: tuple
    r: PeriodicField | None = None
    D: PeriodicField | None = None
    qs: tuple = ()
    omega: float = 0.0
    tol: float = 1e-7
    output: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        grid = tuple(float(g) for g in self.grid)
        if not grid:
            raise ValueError("grid must be nonempty")
        if any(b < a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid must be sorted")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "qs", tuple(float(q) for q in self.qs))
        if self.experiment in ("k_and_c_vs_omega", "k_vs_B") and not self.qs:
            raise ValueError(f"{self.experiment} needs a nonempty qs list")
        if self.experiment != "verify" and self.D is None:
            raise ValueError("D is required")
        if self.experiment not in ("verify", "lemma_constructions") and self.r is None:
            raise ValueError("r is required")
        if self.tol <= 0:
            raise ValueError("tol must be positive")

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "grid": list(self.grid),
            "r": None if self.r is None else to_record(self.r),
            "D": None if self.D is None else to_record(self.D),
            "qs": list(self.qs),
            "omega": self.omega,
            "tol": self.tol,
            "output": self.output,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        known = {"experiment", "grid", "r", "D", "qs", "omega", "tol", "output"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown sweep keys: {sorted(extra)}")
        kw = dict(d)
        for name in ("r", "D"):
            if kw.get(name) is not None:
                kw[name] = from_record(kw[name])
        kw["grid"] = tuple(kw.get("grid", ()))
        kw["qs"] = tuple(kw.get("qs", ()))
        return cls(**kw)


def _nan_row(columns, status, **fixed):
    row = {c: math.nan for c in columns}
    row.update(fixed)
    row["status"] = status
    return row


def _status(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}".replace("\n", " ")


def _speed_row(r, D, q_value, tol, **fixed):
    try:
        s = spreading_speed(r, D, q_value, tol=tol)
    except ExtinctionError as exc:
        return {**fixed, "lambda_star": math.nan, "c_star": math.nan, "k0": exc.k0, "status": "extinct"}
    return {**fixed, "lambda_star": s.lambda_star, "c_star": s.c_star, "k0": s.k0, "status": "ok"}


def evaluate_point(spec: SweepSpec, index: int) -> list[dict]:
    """Rows for grid point ``index``; numerical failures become a status."""
    x = spec.grid[index]
    cols = COLUMNS[spec.experiment]
    exp = spec.experiment
    if exp == "speed_vs_q":
        try:
            return [_speed_row(spec.r, spec.D, x, spec.tol, q=x)]
        except _NUMERICAL as exc:
            return [_nan_row(cols, _status(exc), q=x)]
    if exp == "k_and_c_vs_omega":
        D = phase_shift(spec.D, x)
        rows = []
        for q in spec.qs:
            try:
                row = _speed_row(spec.r, D, q, spec.tol, q=q, omega=x)
            except _NUMERICAL as exc:
                row = _nan_row(cols, _status(exc), q=q, omega=x)
            rows.append(row)
        return rows
    if exp == "k_vs_B":
        rows = []
        for q in spec.qs:
            try:
                k = k_value(spec.r, x * spec.D, q, 0.0, spec.tol).k
                rows.append({"q": q, "B": x, "k0": k, "limit": large_B_limit(spec.r, spec.D, q),
                             "status": "ok"})
            except _NUMERICAL as exc:
                rows.append(_nan_row(cols, _status(exc), q=q, B=x))
        return rows
    if exp == "k_vs_q":
        try:
            k = k_value(spec.r, phase_shift(spec.D, spec.omega), x, 0.0, spec.tol).k
            return [{"q": x, "omega": spec.omega, "k0": k, "status": "ok"}]
        except _NUMERICAL as exc:
            return [_nan_row(cols, _status(exc), q=x, omega=spec.omega)]
    if exp == "verify":
        case = identity_suite()[int(x)]
        try:
            gap = run_identity_case(case)
            status = "pass" if gap <= case.tolerance else "fail"
        except _NUMERICAL as exc:
            gap, status = math.nan, f"error {_status(exc)}"
        return [{"identity": case.identity, "case": case.label, "gap": gap,
                 "tolerance": case.tolerance, "status": status}]
    if exp == "lemma_constructions":
        try:
            res = lemma_constructions(spec.D, x)
        except _NUMERICAL as exc:
            return [_nan_row(cols, _status(exc), q=x, construction=name) for name in ("reduce", "increase")]
        rows = []
        for name, (kq, k0) in res.items():
            margin = (k0 - kq) if name == "reduce" else (kq - k0)
            rows.append({"q": x, "construction": name, "k_q": kq, "k_0": k0, "margin": margin,
                         "status": "ok" if margin > 1e-4 else "fail"})
        return rows
    raise ValueError(exp)


def _worker(args):
    spec, index = args
    return evaluate_point(spec, index)


def resolve_workers(workers: int | None) -> int:
    """Explicit value, else ``QDIFF_WORKERS``, else 1."""
    if workers is None:
        env = os.environ.get("QDIFF_WORKERS")
        workers = int(env) if env else 1
    if workers < 1:
        raise ValueError("workers must be at least 1")
    return workers


@dataclass
class SweepResult:
    spec: SweepSpec
    columns: list
    rows: list
    wall_time: float
    workers: int
    manifest: dict = field(default_factory=dict)

    def column(self, name) -> np.ndarray:
        return np.array([row[name] for row in self.rows])


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    workers = resolve_workers(workers)
    t0 = time.perf_counter()
    jobs = [(spec, i) for i in range(len(spec.grid))]
    if workers == 1 or len(jobs) == 1:
        parts = [_worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_worker, jobs))  # map keeps input order
    rows = [row for part in parts for row in part]
    wall = time.perf_counter() - t0
    result = SweepResult(spec, COLUMNS[spec.experiment], rows, wall, workers)
    result.manifest = manifest(result)
    if spec.output:
        write_outputs(result, spec.output)
    return result


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    buf.write(CSV_MAGIC + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result.columns)
    for row in result.rows:
        w.writerow([_fmt(row[c]) for c in result.columns])
    return buf.getvalue()


def read_csv(path) -> tuple[list, list]:
    """Columns and rows (values as strings) of a sweep CSV."""
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != CSV_MAGIC:
            raise ValueError(f"{path}: not a qdiff sweep file")
        reader = csv.reader(fh)
        columns = next(reader)
        return columns, [dict(zip(columns, r)) for r in reader]


def versions() -> dict:
    return {"qdiff": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__}


def manifest(result: SweepResult) -> dict:
    statuses: dict = {}
    for row in result.rows:
        key = str(row["status"]).split(":")[0]
        statuses[key] = statuses.get(key, 0) + 1
    return {
        "format": CSV_MAGIC.lstrip("# "),
        "config": result.spec.to_dict(),
        "versions": versions(),
        "tolerance": result.spec.tol,
        "wall_time": result.wall_time,
        "workers": result.workers,
        "rows": len(result.rows),
        "statuses": statuses,
    }


def write_outputs(result: SweepResult, path) -> tuple[str, str]:
    """Write ``path`` (CSV) and ``path`` with a ``.json`` suffix (manifest)."""
    path = str(path)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(csv_text(result))
    mpath = os.path.splitext(path)[0] + ".json"
    with open(mpath, "w") as fh:
        json.dump(result.manifest, fh, indent=2, default=_json_default)
        fh.write("\n")
    return path, mpath


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


# standard setups


def speed_vs_q_spec(output=None, tol=1e-7) -> SweepSpec:
    from .fields import Constant, CosineSquared
    grid = tuple(np.round(np.arange(-2.0, 3.0 + 1e-9, 0.25), 10))
    return SweepSpec("speed_vs_q", grid, Constant(1.0), CosineSquared(0.1, 1.0, 0.0), tol=tol, output=output)


def phase_shift_spec(output=None, tol=1e-7) -> SweepSpec:
    from .fields import CosineSquared
    grid = tuple(np.round(np.linspace(0.0, 1.0, 21), 10))
    return SweepSpec("k_and_c_vs_omega", grid, CosineSquared(0.0, 1.0, 0.0), CosineSquared(0.1, 1.0, 0.0),
                     qs=(-1.0, -0.5, 0.0, 0.5, 1.0, 2.0), tol=tol, output=output)


def verify_spec(output=None) -> SweepSpec:
    return SweepSpec("verify", tuple(range(len(identity_suite()))), output=output)
