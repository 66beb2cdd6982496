"""Command line entry point: ``qdiff {eig,speed,verify,sweep,simulate,optimize}``.

Options come from flags, from a JSON config file (``--config``), or both;
flags win.  A config file looks like::

    {"subcommand": "speed",
     "fields": {"r": "const:1", "D": {"kind": "cos2", "offset": 0.1}},
     "options": {"q": 0.5, "tol": 1e-7},
     "output_dir": "out"}

Exit codes: 0 success, 1 numerical failure (or a failed identity check in
``verify``), 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field

from . import __version__
from .eigen import EigenError, k_value
from .fields import FieldError, from_record, to_record

EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG = 0, 1, 2
SUBCOMMANDS = ("eig", "speed", "verify", "sweep", "simulate", "optimize")

_num = (int, float)
OPTIONS = {
    "eig": {"q": _num, "lambda": _num, "tol": _num},
    "speed": {"q": _num, "direction": str, "tol": _num},
    "verify": {"workers": int},
    "sweep": {"experiment": str, "preset": str, "grid": list, "qs": list, "omega": _num,
              "tol": _num, "workers": int},
    "simulate": {"q": _num, "t_final": _num, "domain_length": _num, "dx": _num, "cfl_safety": _num,
                 "level": _num, "transient_fraction": _num, "initial_width": _num, "fit": str},
    "optimize": {"q_num": _num, "q_den": _num, "n_iters": int, "T0": _num, "cool": _num,
                 "cool_every": int, "proposal_sigma": _num, "seed": int, "initial": list,
                 "bounds": list, "speed_tol": _num, "spline_floor": _num},
}
REQUIRED = {
    "eig": ("q",), "speed": ("q",), "verify": (), "sweep": (), "simulate": ("q", "t_final"),
    "optimize": ("seed",),
}
FIELDS = {"eig": ("r", "D"), "speed": ("r", "D"), "simulate": ("r", "D"), "sweep": (), "verify": (),
          "optimize": ()}
OPTIONAL_FIELDS = {"sweep": ("r", "D"), "optimize": ("r",)}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    fields: dict = field(default_factory=dict)   # name -> field record
    options: dict = field(default_factory=dict)
    output_dir: str = "qdiff_out"

    def validate(self) -> "RunConfig":
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"subcommand: unknown value {self.subcommand!r}")
        schema = OPTIONS[self.subcommand]
        for key, value in self.options.items():
            if key not in schema:
                raise ConfigError(f"options.{key}: unknown option for {self.subcommand!r}")
            kind = schema[key]
            if kind is _num:
                ok = isinstance(value, _num) and not isinstance(value, bool)
            elif kind is int:
                ok = isinstance(value, int) and not isinstance(value, bool)
            else:
                ok = isinstance(value, kind)
            if not ok:
                raise ConfigError(f"options.{key}: expected {getattr(kind, '__name__', 'number')}, "
                                  f"got {value!r}")
        for key in REQUIRED[self.subcommand]:
            if key not in self.options:
                raise ConfigError(f"options.{key}: required for {self.subcommand!r}")
        allowed = set(FIELDS[self.subcommand]) | set(OPTIONAL_FIELDS.get(self.subcommand, ()))
        for name in self.fields:
            if name not in allowed:
                raise ConfigError(f"fields.{name}: not used by {self.subcommand!r}")
        for name in FIELDS[self.subcommand]:
            if name not in self.fields:
                raise ConfigError(f"fields.{name}: required for {self.subcommand!r}")
        for name, rec in self.fields.items():
            try:
                from_record(rec)
            except (FieldError, TypeError, ValueError) as exc:
                raise ConfigError(f"fields.{name}: {exc}") from None
        return self

    def field(self, name):
        return from_record(self.fields[name])

    def to_dict(self) -> dict:
        return {"subcommand": self.subcommand, "fields": dict(self.fields),
                "options": dict(self.options), "output_dir": self.output_dir}

    @classmethod
    def from_dict(cls, d) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config: top level must be an object")
        extra = set(d) - {"subcommand", "fields", "options", "output_dir"}
        if extra:
            raise ConfigError(f"config: unknown keys {sorted(extra)}")
        if "subcommand" not in d:
            raise ConfigError("subcommand: missing")
        fields_, options = d.get("fields", {}), d.get("options", {})
        if not isinstance(fields_, dict) or not isinstance(options, dict):
            raise ConfigError("config: 'fields' and 'options' must be objects")
        # normalise inline strings to records so manifests round-trip
        norm = {}
        for name, rec in fields_.items():
            try:
                norm[name] = to_record(from_record(rec)) if isinstance(rec, str) else rec
            except FieldError as exc:
                raise ConfigError(f"fields.{name}: {exc}") from None
        return cls(d["subcommand"], norm, dict(options), d.get("output_dir", "qdiff_out")).validate()


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdiff", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"qdiff {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, fields=()):
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--out", dest="output_dir", help="output directory")
        for name in fields:
            sp.add_argument(f"--{name}", dest=f"field_{name}",
                            help="field spec, e.g. const:1, cos2:0.1,1,0, spline:a,b,c,a")

    sp = sub.add_parser("eig", help="principal eigenvalue k_q^lambda")
    common(sp, ("r", "D"))
    sp.add_argument("--q", type=float)
    sp.add_argument("--lambda", dest="lambda_", type=float)
    sp.add_argument("--tol", type=float)

    sp = sub.add_parser("speed", help="spreading speed c*")
    common(sp, ("r", "D"))
    sp.add_argument("--q", type=float)
    sp.add_argument("--direction", choices=("left", "right"))
    sp.add_argument("--tol", type=float)

    sp = sub.add_parser("verify", help="run the identity suite")
    common(sp)
    sp.add_argument("--workers", type=int)

    sp = sub.add_parser("sweep", help="parameter sweep to CSV + JSON manifest")
    common(sp, ("r", "D"))
    sp.add_argument("--experiment")
    sp.add_argument("--preset", choices=("speed_vs_q", "phase_shift", "verify"))
    sp.add_argument("--grid", type=_float_list)
    sp.add_argument("--qs", type=_float_list)
    sp.add_argument("--omega", type=float)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--workers", type=int)

    sp = sub.add_parser("simulate", help="time-step the KPP equation and fit the front speed")
    common(sp, ("r", "D"))
    sp.add_argument("--q", type=float)
    sp.add_argument("--t-final", dest="t_final", type=float)
    sp.add_argument("--domain-length", dest="domain_length", type=float)
    sp.add_argument("--dx", type=float)
    sp.add_argument("--cfl-safety", dest="cfl_safety", type=float)
    sp.add_argument("--level", type=float)
    sp.add_argument("--transient-fraction", dest="transient_fraction", type=float)
    sp.add_argument("--initial-width", dest="initial_width", type=float)
    sp.add_argument("--fit", choices=("line", "log"))

    sp = sub.add_parser("optimize", help="simulated annealing of a spline D for a speed ratio")
    common(sp, ("r",))
    sp.add_argument("--q-num", dest="q_num", type=float)
    sp.add_argument("--q-den", dest="q_den", type=float)
    sp.add_argument("--iters", dest="n_iters", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--T0", type=float)
    sp.add_argument("--cool", type=float)
    sp.add_argument("--sigma", dest="proposal_sigma", type=float)
    sp.add_argument("--spline-floor", dest="spline_floor", type=float)
    return p


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


_NOT_OPTIONS = {"subcommand", "config", "output_dir"}


def config_from_args(args) -> RunConfig:
    base = {"subcommand": args.subcommand, "fields": {}, "options": {}}
    if args.config:
        base = load_config(args.config)
        if not isinstance(base, dict):
            raise ConfigError(f"{args.config}: top level must be an object")
        if base.get("subcommand", args.subcommand) != args.subcommand:
            raise ConfigError(f"subcommand: config says {base.get('subcommand')!r}, "
                              f"command line says {args.subcommand!r}")
        base = dict(base)
        base["subcommand"] = args.subcommand
        base["fields"] = dict(base.get("fields", {}))
        base["options"] = dict(base.get("options", {}))
    for key, value in vars(args).items():
        if value is None or key in _NOT_OPTIONS:
            continue
        if key.startswith("field_"):
            base["fields"][key[6:]] = value
        else:
            base["options"]["lambda" if key == "lambda_" else key] = value
    if args.output_dir:
        base["output_dir"] = args.output_dir
    return RunConfig.from_dict(base)


# ---------------------------------------------------------------------------
# subcommands


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, default=_jsonable)
        fh.write("\n")


def _jsonable(o):
    if hasattr(o, "item"):
        return o.item()
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(type(o).__name__)


def cmd_eig(cfg: RunConfig, out):
    o = cfg.options
    res = k_value(cfg.field("r"), cfg.field("D"), o["q"], o.get("lambda", 0.0), o.get("tol", 1e-8))
    print(f"k={res.k!r}")
    print(f"n_used={res.n_used}")
    _write_json(os.path.join(out, "eig.json"), {"k": res.k, "n_used": res.n_used,
                                                "run_config": cfg.to_dict()})
    return EXIT_OK


def cmd_speed(cfg: RunConfig, out):
    from .speed import spreading_speed
    o = cfg.options
    res = spreading_speed(cfg.field("r"), cfg.field("D"), o["q"], o.get("direction", "right"),
                          o.get("tol", 1e-7))
    print(f"c_star={res.c_star!r}")
    print(f"lambda_star={res.lambda_star!r}")
    print(f"k_at_lambda_star={res.k_at_lambda_star!r}")
    print(f"k0={res.k0!r}")
    _write_json(os.path.join(out, "speed.json"), {
        "c_star": res.c_star, "lambda_star": res.lambda_star, "direction": res.direction,
        "k_at_lambda_star": res.k_at_lambda_star, "k0": res.k0, "bracket": list(res.bracket),
        "evaluations": res.evaluations, "run_config": cfg.to_dict()})
    return EXIT_OK


def _sweep_and_report(spec, cfg, out):
    from dataclasses import replace

    from .sweeps import run_sweep, write_outputs
    result = run_sweep(replace(spec, output=None), cfg.options.get("workers"))
    result.manifest["config"]["output"] = spec.output
    result.manifest["run_config"] = cfg.to_dict()
    csv_path, man_path = write_outputs(result, spec.output)
    return result, csv_path, man_path


def cmd_verify(cfg: RunConfig, out):
    from .sweeps import verify_spec
    spec = verify_spec(os.path.join(out, "verify.csv"))
    result, csv_path, _ = _sweep_and_report(spec, cfg, out)
    failed = 0
    print(f"{'identity':<20} {'case':<32} {'gap':>12} {'tolerance':>10}  status")
    for row in result.rows:
        print(f"{row['identity']:<20} {row['case']:<32} {row['gap']:>12.3e} {row['tolerance']:>10.1e}  "
              f"{row['status']}")
        failed += row["status"] != "pass"
    print(f"{len(result.rows) - failed}/{len(result.rows)} passed; table in {csv_path}")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


def cmd_sweep(cfg: RunConfig, out):
    from .sweeps import SweepSpec, speed_vs_q_spec, phase_shift_spec, verify_spec
    o = cfg.options
    preset = o.get("preset")
    path = os.path.join(out, f"{preset or o.get('experiment', 'sweep')}.csv")
    try:
        if preset == "speed_vs_q":
            spec = speed_vs_q_spec(path, o.get("tol", 1e-7))
        elif preset == "phase_shift":
            spec = phase_shift_spec(path, o.get("tol", 1e-7))
        elif preset == "verify":
            spec = verify_spec(path)
        elif preset is not None:
            raise ConfigError(f"options.preset: unknown preset {preset!r}")
        else:
            if "experiment" not in o or "grid" not in o:
                raise ConfigError("options.experiment/options.grid: required without a preset")
            spec = SweepSpec(o["experiment"], tuple(o["grid"]),
                             cfg.field("r") if "r" in cfg.fields else None,
                             cfg.field("D") if "D" in cfg.fields else None,
                             tuple(o.get("qs", ())), o.get("omega", 0.0), o.get("tol", 1e-7), path)
    except ValueError as exc:
        raise ConfigError(f"options: {exc}") from None
    result, csv_path, man_path = _sweep_and_report(spec, cfg, out)
    bad = sum(1 for row in result.rows if row["status"] not in ("ok", "pass"))
    print(f"rows={len(result.rows)}")
    print(f"non_ok_rows={bad}")
    print(f"wall_time={result.wall_time:.3f}")
    print(f"csv={csv_path}")
    print(f"manifest={man_path}")
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, out):
    from .pdesim import SimConfig, measure_front_speed, stable_dt
    o = dict(cfg.options)
    try:
        sim = SimConfig(cfg.field("r"), cfg.field("D"), **o)
    except ValueError as exc:
        raise ConfigError(f"options: {exc}") from None
    trace = measure_front_speed(sim)
    with open(os.path.join(out, "front.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x_front"])
        for t, x in zip(trace.times, trace.positions):
            w.writerow([repr(float(t)), repr(float(x))])
    summary = {"fitted_speed": trace.fitted_speed, "fit_residual": trace.fit_residual,
               "dx": trace.dx, "dt": trace.dt, "monotone": trace.monotone,
               "level_ok": trace.level_ok, "notes": trace.notes, "crossings": len(trace.times),
               "run_config": cfg.to_dict()}
    _write_json(os.path.join(out, "front_summary.json"), summary)
    print(f"fitted_speed={trace.fitted_speed!r}")
    print(f"fit_residual={trace.fit_residual!r}")
    print(f"dx={trace.dx!r}")
    print(f"dt={stable_dt(sim)!r}")
    for note in trace.notes:
        print(f"warning: {note}", file=sys.stderr)
    return EXIT_OK


def cmd_optimize(cfg: RunConfig, out):
    from .anneal import AnnealConfig, run_annealing, spline_peak
    o = dict(cfg.options)
    if "r" in cfg.fields:
        o["r"] = cfg.field("r")
    for key in ("initial", "bounds"):
        if key in o:
            o[key] = tuple(o[key])
    try:
        acfg = AnnealConfig(**o)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"options: {exc}") from None
    res = run_annealing(acfg)
    peak = spline_peak(res.best_control, acfg.bounds)
    payload = {"best_control": list(res.best_control), "best_ratio": res.best_ratio,
               "peak_location": peak, "evaluations": res.evaluations,
               "initial_control": list(res.initial_control), "initial_ratio": res.initial_ratio,
               "anneal_config": acfg.to_dict(), "run_config": cfg.to_dict()}
    _write_json(os.path.join(out, "anneal.json"), payload)
    with open(os.path.join(out, "anneal_trace.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "ratio", "accepted", "best_ratio"])
        for (it, ratio, acc), best in zip(res.history, res.best_trace):
            w.writerow([it, repr(float(ratio)), int(acc), repr(float(best))])
    print(f"best_ratio={res.best_ratio!r}")
    print("best_control=" + ",".join(repr(v) for v in res.best_control))
    print(f"peak_location={peak!r}")
    print(f"evaluations={res.evaluations}")
    return EXIT_OK


COMMANDS = {"eig": cmd_eig, "speed": cmd_speed, "verify": cmd_verify, "sweep": cmd_sweep,
            "simulate": cmd_simulate, "optimize": cmd_optimize}


def main(argv=None) -> int:
    from .pdesim import SimulationError
    from .speed import BracketError, ExtinctionError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = config_from_args(args)
        os.makedirs(cfg.output_dir, exist_ok=True)
        return COMMANDS[cfg.subcommand](cfg, cfg.output_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FieldError as exc:
        print(f"config error: field: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EigenError, ExtinctionError, BracketError, SimulationError, ArithmeticError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
