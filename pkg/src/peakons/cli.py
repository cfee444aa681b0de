"""Command-line front end: ``peakons <subcommand> [options]``.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical
failure, 3 run ended early on an event (partial output is still written).
"""
from __future__ import annotations

import argparse
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .analytic import CATALOG_IDS, design_breather, make_entry
from .classify import ProbeSettings, classify_numeric
from .config import ConfigError, RunConfig, apply_overrides, load_config
from .dsl import ExprError
from .integrator import StepSizeUnderflow
from .npeakon import NOptions, NPeakonState, integrateN
from .peakon1 import CSV_HEADER, IntegratorOptions, PeakonState, Trajectory, integrate1
from .reduce import ReducedSystem, ReductionError
from .verify import field_values, verify_trajectory

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_EARLY = 0, 1, 2, 3
EARLY_TERMINATIONS = ("blow-up", "extinction", "collision")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _param(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    name, value = text.split("=", 1)
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse {value!r} as a number") from None


def _vector(text):
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse {text!r} as numbers") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI run configuration")
    common.add_argument("--f", dest="f", metavar="EXPR", help="nonlinearity f(u, ux)")
    common.add_argument("--g", dest="g", metavar="EXPR", help="nonlinearity g(u, ux)")
    common.add_argument("--param", action="append", type=_param, default=[], metavar="NAME=VALUE",
                        help="expression parameter (repeatable)")
    common.add_argument("--t0", type=float)
    common.add_argument("--horizon", type=float, help="final time (below t0 runs backward)")
    common.add_argument("--sample-dt", type=float)
    common.add_argument("--init-A", type=float)
    common.add_argument("--init-X", type=float)
    common.add_argument("--out", metavar="PATH", help="CSV output (directory for sweeps and demos)")
    common.add_argument("--report", metavar="PATH", help="JSON report output")
    common.add_argument("--oscillatory", action="store_true", default=None,
                        help="continue through square-root turning points of the amplitude")

    parser = _Parser(prog="peakons", description="Dynamical peakons of m_t + f m + (g m)_x = 0")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("simulate", parents=[common], help="integrate a single peakon")
    p = sub.add_parser("simulate-n", parents=[common], help="integrate an N-peakon superposition")
    p.add_argument("--init-a", type=_vector, metavar="A1,A2,...")
    p.add_argument("--init-x", type=_vector, metavar="X1,X2,...")
    p = sub.add_parser("classify", parents=[common], help="classify amplitude and position behaviour")
    p.add_argument("--direction", choices=("forward", "backward", "both"))
    p.add_argument("--sweep", metavar="SPEC", help="parameter grid, e.g. 'p=1,2;q=-1,1'")
    p.add_argument("--jobs", type=int, default=2, help="worker processes for --sweep")
    p = sub.add_parser("verify", parents=[common], help="check a trajectory CSV")
    p.add_argument("trajectory", help="CSV written by simulate or simulate-n")
    p = sub.add_parser("design-breather", parents=[common], help="equation for a peakon breather")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--speed", type=float, default=0.0)
    p = sub.add_parser("catalog", parents=[common], help="list closed-form examples")
    p.add_argument("--id", choices=CATALOG_IDS)
    p = sub.add_parser("demo", parents=[common], help="plot data for the reference figures")
    p.add_argument("figure", choices=sorted(DEMOS))
    return parser


# --------------------------------------------------------------------------
# configuration assembly


def _overrides(args) -> dict:
    ov = {
        "equation.f": args.f,
        "equation.g": args.g,
        "equation.params": dict(args.param) if args.param else None,
        "run.t0": args.t0,
        "run.horizon": args.horizon,
        "run.sample_dt": args.sample_dt,
        "run.A": args.init_A,
        "run.X": args.init_X,
        "run.oscillatory": args.oscillatory,
        "output.csv_path": args.out,
        "output.report_path": args.report,
    }
    for name in ("init_a", "init_x"):
        if getattr(args, name, None) is not None:
            ov[f"run.{name[-1]}"] = getattr(args, name)
    if getattr(args, "direction", None):
        ov["run.direction"] = args.direction
    return ov


def _config(args, need_equation=True) -> RunConfig:
    ov = _overrides(args)
    if args.config:
        return load_config(args.config, ov, need_equation)
    return apply_overrides(RunConfig(), ov).validate(need_equation)


def _options(cfg: RunConfig) -> IntegratorOptions:
    tol = cfg.tolerances
    return IntegratorOptions(tol=tol.ode_tol, sample_dt=cfg.run.sample_dt, A_max=tol.A_max,
                             eps_ext=tol.eps_ext, eps_eq=tol.eps_eq, oscillatory=cfg.run.oscillatory)


def _meta(cfg: RunConfig, **extra) -> dict:
    return {
        "version": __version__,
        "f": cfg.equation.f,
        "g": cfg.equation.g,
        "params": dict(sorted(cfg.equation.params.items())),
        "tolerances": vars(cfg.tolerances).copy(),
        "t0": cfg.run.t0,
        "horizon": cfg.run.horizon,
        "sample_dt": cfg.run.sample_dt,
        "oscillatory": cfg.run.oscillatory,
        **extra,
    }


def _emit(text: str, path: str, out):
    if path:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)


def _dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _clean(v):
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    if isinstance(v, np.integer):
        return int(v)
    return v


def _rs(cfg: RunConfig) -> ReducedSystem:
    return ReducedSystem(cfg.equation.spec(), quad_tol=cfg.tolerances.quad_tol)


# --------------------------------------------------------------------------
# subcommands


def cmd_simulate(args, out) -> int:
    cfg = _config(args)
    rs = _rs(cfg)
    traj = integrate1(rs, PeakonState(cfg.run.t0, cfg.run.A, cfg.run.X), cfg.run.horizon, _options(cfg))
    _emit(traj.to_csv(_meta(cfg, kind="single")), cfg.output.csv_path, out)
    report = {"termination": traj.termination, "message": traj.message,
              "events": [e.to_dict() for e in traj.events], "samples": int(traj.t.size),
              "spec": cfg.equation.spec().describe()}
    if cfg.output.report_path:
        _emit(_dumps(report), cfg.output.report_path, out)
    return _exit_for(traj.termination)


def cmd_simulate_n(args, out) -> int:
    cfg = _config(args)
    if not cfg.run.a:
        raise ConfigError("simulate-n needs amplitude and position vectors ([run] a, x or --init-a/--init-x)")
    rs = _rs(cfg)
    base = _options(cfg)
    opts = NOptions(**{**vars(base), "gap_min": cfg.tolerances.gap_min})
    traj = integrateN(rs, NPeakonState(cfg.run.t0, cfg.run.a, cfg.run.x), cfg.run.horizon, opts)
    _emit(traj.to_csv(_meta(cfg, kind="multi", n=len(cfg.run.a))), cfg.output.csv_path, out)
    if cfg.output.report_path:
        report = {"termination": traj.termination, "message": traj.message,
                  "events": [e.to_dict() for e in traj.events], "samples": int(traj.t.size)}
        _emit(_dumps(report), cfg.output.report_path, out)
    return _exit_for(traj.termination)


def _classify_job(cfg: RunConfig) -> dict:
    rs = _rs(cfg)
    init = PeakonState(cfg.run.t0, cfg.run.A, cfg.run.X)
    settings = ProbeSettings(slope_tol=cfg.tolerances.slope_tol)
    opts = _options(cfg)
    span = abs(cfg.run.horizon - cfg.run.t0)
    reports = {}
    if cfg.run.direction in ("forward", "both"):
        reports["forward"] = classify_numeric(rs, init, cfg.run.t0 + span, opts, settings).to_dict()
    if cfg.run.direction in ("backward", "both"):
        reports["backward"] = classify_numeric(rs, init, cfg.run.t0 - span, opts, settings).to_dict()
    return {"spec": cfg.equation.spec().describe(), **reports}


def _sweep_grid(spec: str) -> list[dict]:
    axes = []
    for part in filter(None, (p.strip() for p in spec.split(";"))):
        if "=" not in part:
            raise ConfigError(f"sweep axis {part!r} is not name=v1,v2,...")
        name, values = part.split("=", 1)
        try:
            axes.append([(name.strip(), float(v)) for v in values.split(",") if v.strip()])
        except ValueError:
            raise ConfigError(f"sweep axis {part!r} has a non-numeric value") from None
    if not axes:
        raise ConfigError("empty sweep specification")
    return [dict(combo) for combo in itertools.product(*axes)]


def _sweep_job(payload):
    cfg, point = payload
    try:
        return {"point": point, "status": "ok", **_classify_job(cfg)}
    except (ExprError, ReductionError, ArithmeticError, ValueError) as exc:
        return {"point": point, "status": "error", "error": str(exc)}


def cmd_classify(args, out) -> int:
    cfg = _config(args)
    if not args.sweep:
        result = _classify_job(cfg)
        _emit(_dumps(result), cfg.output.report_path, out)
        return EXIT_OK
    grid = _sweep_grid(args.sweep)
    jobs = []
    for point in grid:
        job_cfg = _config(args)
        run_keys = {"A", "X", "t0", "horizon"}
        apply_overrides(job_cfg, {"equation.params": {k: v for k, v in point.items() if k not in run_keys}})
        for key in run_keys & set(point):
            setattr(job_cfg.run, key, point[key])
        job_cfg.validate()
        jobs.append((job_cfg, point))
    with ProcessPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(_sweep_job, jobs))
    out_dir = cfg.output.csv_path
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        for i, res in enumerate(results):
            with open(os.path.join(out_dir, f"job_{i:04d}.json"), "w", encoding="utf-8") as fh:
                fh.write(_dumps(res))
    summary = [{"point": r["point"], "status": r["status"],
                **({d: {"amplitude": r[d]["amplitude"]["class"], "position": r[d]["position"]["class"]}
                    for d in ("forward", "backward") if d in r})} for r in results]
    _emit(_dumps({"sweep": args.sweep, "jobs": summary}), cfg.output.report_path, out)
    return EXIT_OK if all(r["status"] == "ok" for r in results) else EXIT_NUMERIC


def read_trajectory_csv(text: str):
    """Parse CSV written by simulate/simulate-n into (meta, header, rows)."""
    meta, header, rows = {}, None, []
    for line in io.StringIO(text):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# meta:"):
                meta = json.loads(line[len("# meta:"):])
            continue
        if header is None:
            header = line.split(",")
            continue
        rows.append([float(v) for v in line.split(",")])
    if header is None or not rows:
        raise ConfigError("trajectory CSV has no header or no rows")
    return meta, header, np.array(rows)


def cmd_verify(args, out) -> int:
    try:
        with open(args.trajectory, encoding="utf-8") as fh:
            meta, header, rows = read_trajectory_csv(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read trajectory {args.trajectory!r}: {exc.strerror}") from None
    if not (args.f or args.config):
        args.f, args.g = args.f or meta.get("f"), args.g or meta.get("g")
        args.param = list(meta.get("params", {}).items()) + list(args.param)
    cfg = _config(args)
    rs = _rs(cfg)
    cols = {name: rows[:, i] for i, name in enumerate(header)}
    if ",".join(header) == CSV_HEADER:
        traj = Trajectory(cols["t"], cols["A"], cols["X"], cols["Xdot"], cols["Xddot"], [],
                          "horizon-reached", oscillatory=bool(meta.get("oscillatory", False)))
    else:
        from .npeakon import NTrajectory
        n = sum(1 for h in header if h.startswith("a_"))
        traj = NTrajectory(cols["t"], rows[:, 1:1 + n], rows[:, 1 + n:1 + 2 * n])
    report = verify_trajectory(rs, traj)
    _emit(report.to_json() + "\n", cfg.output.report_path, out)
    return EXIT_OK if report.passed else EXIT_NUMERIC


def cmd_design_breather(args, out) -> int:
    spec = design_breather(args.amplitude, args.kappa, args.speed)
    lines = ["[equation]", f"f = {spec.f_text}", f"g = {spec.g_text}"]
    lines += [f"{k} = {v!r}" for k, v in sorted(spec.params.items())]
    lines += ["", "[run]", f"A = {args.amplitude!r}", "X = 0.0", "oscillatory = true",
              f"horizon = {4 * math.pi / abs(args.kappa)!r}"]
    _emit("\n".join(lines) + "\n", args.out or "", out)
    return EXIT_OK


def cmd_catalog(args, out) -> int:
    ids = [args.id] if args.id else list(CATALOG_IDS)
    if args.report:
        entries = []
        for i in ids:
            e = make_entry(i)
            entries.append({"id": e.id, "params": e.params, "f": e.spec.f_text, "g": e.spec.g_text,
                            "domain": list(e.domain), "oscillatory": e.oscillatory, "caveat": e.caveat})
        _emit(_dumps({"entries": entries}), args.report, out)
    text = []
    for i in ids:
        e = make_entry(i)
        text.append(f"# {e.id}" + (f" (oscillatory; {e.caveat})" if e.oscillatory else ""))
        text.append(e.config_snippet())
    _emit("\n".join(text), args.out or "", out)
    return EXIT_OK


# figure id -> (catalog id, start, end)
DEMOS = {
    "fig1": ("asymptotic-ex2", -6.0, 6.0),
    "fig2": ("reversing-ex3", -6.0, 6.0),
    "fig3": ("dissipating-ex5", -6.0, 10.0),
    "fig4": ("blowup-ex5", -4.0, 0.9),
    "fig5": ("breather", 0.0, 2 * math.pi),
}


def cmd_demo(args, out) -> int:
    entry_id, start, end = DEMOS[args.figure]
    entry = make_entry(entry_id)
    rs = ReducedSystem(entry.spec)
    opts = IntegratorOptions(oscillatory=entry.oscillatory, sample_dt=args.sample_dt or 0.01)
    traj = integrate1(rs, entry.initial_state(start), end, opts)
    out_dir = args.out or f"demo_{args.figure}"
    os.makedirs(out_dir, exist_ok=True)
    meta = {"version": __version__, "figure": args.figure, "entry": entry_id, "f": entry.spec.f_text,
            "g": entry.spec.g_text, "params": dict(sorted(entry.spec.params.items()))}
    with open(os.path.join(out_dir, "trajectory.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(traj.to_csv(meta))
    stride = max(1, traj.t.size // 100)
    xs = np.linspace(float(np.min(traj.X)) - 5.0, float(np.max(traj.X)) + 5.0, 201)
    buf = io.StringIO()
    buf.write("t,x,u\n")
    for k in range(0, traj.t.size, stride):
        u = field_values(traj.A[k], traj.X[k], xs)
        for xv, uv in zip(xs, u):
            buf.write(f"{float(traj.t[k])!r},{float(xv)!r},{float(uv)!r}\n")
        buf.write("\n")       # blank line between scans for gnuplot splot
    with open(os.path.join(out_dir, "surface.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(buf.getvalue())
    out.write(f"wrote {out_dir}/trajectory.csv and {out_dir}/surface.csv ({traj.termination})\n")
    return _exit_for(traj.termination)


def _exit_for(termination: str) -> int:
    if termination == "domain-error":
        return EXIT_NUMERIC
    if termination in EARLY_TERMINATIONS:
        return EXIT_EARLY
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "simulate-n": cmd_simulate_n,
    "classify": cmd_classify,
    "verify": cmd_verify,
    "design-breather": cmd_design_breather,
    "catalog": cmd_catalog,
    "demo": cmd_demo,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"peakons: error: {exc}\n")
        return EXIT_CONFIG
    except (ConfigError, ExprError) as exc:
        err.write(f"peakons: configuration error: {exc}\n")
        return EXIT_CONFIG
    except (ReductionError + (StepSizeUnderflow, ArithmeticError, ValueError)) as exc:
        err.write(f"peakons: numerical failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
