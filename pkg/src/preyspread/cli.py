"""Command-line front end.

Subcommands: speeds, check, wave, simulate, ode, analyze, sweep.
Exit codes: 0 success, 1 a verification/check failed, 2 usage or config
error, 3 runtime error.  Every simulate/sweep run directory receives a
manifest (written even on early abort) listing the files produced.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import itertools
import json
import os
import sys
import time as _time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    DomainError,
    FrontReachedBoundary,
    LyapunovValidityError,
    PreyspreadError,
)
from .models import check_assumptions, check_weak_dissipativity, preset
from .speeds import speed_report
from .wavespeed import minimal_wave_speed, shoot_profile
from .pde import SimConfig, load_run, run_simulation, write_outputs, _fmt, _time_label
from .fronttrack import verify_spreading, zone_profile
from .lyapunov import dissipation, final_zone_error, for_model, lyapunov_value, ode_integrate

__all__ = ["main", "run_command", "RunManifest"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


@dataclass
class RunManifest:
    config_hash: str
    version: str
    wall_clock: float
    files: dict
    error: dict | None = None

    def write(self, out_dir):
        payload = {
            "config_hash": self.config_hash,
            "version": self.version,
            "wall_clock": self.wall_clock,
            "files": self.files,
            "error": self.error,
        }
        with open(Path(out_dir) / "manifest.json", "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def _inventory(out_dir, names) -> dict:
    out_dir = Path(out_dir)
    return {n: (out_dir / n).stat().st_size for n in names if (out_dir / n).exists()}


def _parse_params(spec: str | None) -> dict:
    params = {}
    if not spec:
        return params
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ConfigError(f"bad parameter {item!r}; expected key=value")
        key, val = item.split("=", 1)
        try:
            params[key.strip()] = float(val)
        except ValueError:
            raise ConfigError(f"parameter {key.strip()!r} has non-numeric value {val!r}") from None
    return params


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_speeds(args) -> int:
    model = preset(args.model, **_parse_params(args.params))
    rep = speed_report(model)
    print(json.dumps(rep.to_dict(), sort_keys=True))
    return EXIT_OK


def cmd_check(args) -> int:
    model = preset(args.model, **_parse_params(args.params))
    assertions = check_assumptions(model)
    dissip = check_weak_dissipativity(model)
    failed = assertions.failed()
    hard_fail = bool(failed) or dissip.verdict == "Violated"
    if args.json:
        print(json.dumps({
            "clauses": {k: {"status": c.status, "witnesses": c.witnesses[:5]}
                        for k, c in assertions.clauses.items()},
            "dissipativity": {
                "verdict": dissip.verdict,
                "m_star": dissip.m_star,
                "G_at_mstar_inf": dissip.G_at_mstar_inf,
                "G_at_zero_inf": dissip.G_at_zero_inf,
            },
            "hard_fail": hard_fail,
        }, sort_keys=True))
    else:
        for k, c in assertions.clauses.items():
            line = f"{k}: {c.status}"
            if c.witnesses:
                line += f"  (witness {c.witnesses[0]})"
            print(line)
        print(f"weak_dissipativity: {dissip.verdict} (m*={dissip.m_star}, "
              f"G_inf(m*)={dissip.G_at_mstar_inf}, G_inf(0)={dissip.G_at_zero_inf})")
    return EXIT_CHECK_FAILED if hard_fail else EXIT_OK


def _wave_reaction(args):
    if args.f.startswith("kpp:"):
        try:
            r = float(args.f.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad KPP rate in {args.f!r}") from None
        if r <= 0:
            raise ConfigError("KPP rate must be positive")
        return lambda q: r * (1.0 - q)
    model = preset(args.f, **_parse_params(args.params))
    return lambda q: model.F(q, 0.0)


def cmd_wave(args) -> int:
    f = _wave_reaction(args)
    if args.c is None:
        c_min, details = minimal_wave_speed(f, args.d, tol=args.tol, return_details=True)
        print(json.dumps({"c_min": c_min, "top_state": details["p"],
                          "alpha_retries": details["alpha_retries"]}, sort_keys=True))
        return EXIT_OK
    alpha = args.alpha if args.alpha is not None else 0.99
    out = shoot_profile(f, args.d, args.c, alpha)
    print(json.dumps({"kind": out.kind, "b": out.b}, sort_keys=True))
    print("z,q,qprime")
    for z, q, w in out.profile:
        print(f"{_fmt(z)},{_fmt(q)},{_fmt(w)}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = SimConfig.from_json(args.config)
    out_dir = args.out or config.output_dir
    if not out_dir:
        raise ConfigError("no output directory: set output.dir in the config or pass --out")
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    cfg_dict = config.to_dict()
    t0 = _time.perf_counter()
    try:
        output = run_simulation(config)
    except FrontReachedBoundary as exc:
        files = write_outputs(exc.partial, out_dir) if exc.partial else []
        RunManifest(
            config_hash=_config_hash(cfg_dict),
            version=__version__,
            wall_clock=_time.perf_counter() - t0,
            files=_inventory(out_dir, files + ["manifest.json"]),
            error={"type": "FrontReachedBoundary", "time": exc.time,
                   "message": str(exc)},
        ).write(out_dir)
        print(f"error: {exc} (partial outputs in {out_dir})", file=sys.stderr)
        return EXIT_RUNTIME
    files = write_outputs(output, out_dir)
    RunManifest(
        config_hash=_config_hash(cfg_dict),
        version=__version__,
        wall_clock=_time.perf_counter() - t0,
        files=_inventory(out_dir, files),
        error=None,
    ).write(out_dir)
    print(json.dumps({"out_dir": str(out_dir), "n_steps": output.n_steps,
                      "dt": output.dt, "backend": output.backend,
                      "v_sup_running": output.v_sup_running}, sort_keys=True))
    return EXIT_OK


def cmd_ode(args) -> int:
    model = preset(args.model, **_parse_params(args.params))
    traj = ode_integrate(model, args.u0, args.v0, args.T, dt=args.dt)
    try:
        fn = for_model(model)
    except LyapunovValidityError:
        fn = None
    print("t,u,v,phi,J")
    for t, u, v in traj:
        if fn is not None and 0 < u < 1 and v > 0:
            phi = _fmt(lyapunov_value(fn, u, v))
            diss = _fmt(dissipation(model, fn, u, v))
        else:
            phi = diss = ""
        print(f"{_fmt(t)},{_fmt(u)},{_fmt(v)},{phi},{diss}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    output = load_run(args.run)
    model = output.model
    rep = verify_spreading(output)
    report = rep.to_dict()

    run_dir = Path(args.run)
    fze_grid = [float(c) for c in args.fze_c.split(",")] if args.fze_c else [0.5]
    fze = {}
    with open(run_dir / "final_zone_error.csv", "w") as fh:
        fh.write("t,c,sup_error\n")
        for snap in output.snapshots:
            if snap.t <= 0:
                continue
            per_c = {}
            for c in fze_grid:
                if c * snap.t <= output.domain.length:
                    err = final_zone_error(snap, model, c)
                    per_c[f"{c:g}"] = err
                    fh.write(f"{_fmt(snap.t)},{_fmt(c)},{_fmt(err)}\n")
            fze[_time_label(snap.t)] = per_c
    report["final_zone_error"] = fze

    if args.c_grid:
        zone_grid = [float(c) for c in args.c_grid.split(",")]
    else:
        last_t = max(s.t for s in output.snapshots) if output.snapshots else 0.0
        hi = 1.25 * rep.c_star if last_t == 0 else min(1.25 * rep.c_star, 0.95 * output.domain.length / last_t)
        zone_grid = list(np.linspace(0.0, hi, 26))
    for snap in output.snapshots:
        if snap.t <= 0:
            continue
        zp = zone_profile(snap, model, [c for c in zone_grid if c * snap.t <= output.domain.length])
        name = f"zones_t{_time_label(snap.t)}.csv"
        with open(run_dir / name, "w") as fh:
            fh.write("c,u,v,label\n")
            for c, u, v, label in zp.samples:
                fh.write(f"{_fmt(c)},{_fmt(u)},{_fmt(v)},{label}\n")

    with open(run_dir / "verification_report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    hard_fail = any(c.status == "fail" for c in rep.checks)
    print(json.dumps({"all_pass": rep.all_pass, "regime": rep.regime,
                      "n_checks": len(rep.checks)}, sort_keys=True))
    return EXIT_CHECK_FAILED if hard_fail else EXIT_OK


def _set_dotted(cfg: dict, dotted: str, value):
    node = cfg
    keys = dotted.split(".")
    for k in keys[:-1]:
        node = node.setdefault(k, {})
    node[keys[-1]] = value


def _sweep_job(job):
    """Run one simulate+analyze job; returns the result row.  Top-level so
    process pools can pickle it."""
    index, base, overrides, out_dir = job
    cfg_dict = json.loads(json.dumps(base))
    for key, val in overrides.items():
        _set_dotted(cfg_dict, key, val)
    cfg_dict.setdefault("output", {})["dir"] = out_dir
    config = SimConfig.from_dict(cfg_dict)
    row = dict(overrides)
    try:
        output = run_simulation(config)
        files = write_outputs(output, out_dir)
        rep = verify_spreading(output)
        with open(Path(out_dir) / "verification_report.json", "w") as fh:
            json.dump(rep.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        RunManifest(_config_hash(cfg_dict), __version__, output.wall_time,
                    _inventory(out_dir, files + ["verification_report.json"])).write(out_dir)
        measured = {c.name: c.measured for c in rep.checks}
        row.update({
            "c_star": rep.c_star,
            "c_star_star": rep.c_star_star,
            "regime": rep.regime,
            "measured_u_speed": measured.get("u_front_speed", {}).get("measured", ""),
            "measured_v_speed": measured.get("v_front_speed", {}).get("measured", ""),
            "all_checks_pass": rep.all_pass,
        })
    except PreyspreadError as exc:
        RunManifest(_config_hash(cfg_dict), __version__, 0.0, {},
                    error={"type": type(exc).__name__, "message": str(exc)}).write(out_dir)
        row.update({"c_star": "", "c_star_star": "", "regime": "",
                    "measured_u_speed": "", "measured_v_speed": "",
                    "all_checks_pass": False, "error": str(exc)})
    return index, row


def cmd_sweep(args) -> int:
    try:
        with open(args.config) as fh:
            sweep_cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"sweep config not found: {args.config}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"sweep config is not valid JSON: {exc}") from None
    try:
        base = sweep_cfg["base"]
        grid = sweep_cfg["grid"]
        out_root = Path(sweep_cfg["output"]["dir"])
    except KeyError as exc:
        raise ConfigError(f"sweep config missing key: {exc}") from None
    if not grid:
        raise ConfigError("sweep grid is empty")
    out_root.mkdir(parents=True, exist_ok=True)

    keys = sorted(grid)
    combos = list(itertools.product(*(grid[k] for k in keys)))
    jobs = []
    for i, combo in enumerate(combos):
        overrides = dict(zip(keys, combo))
        jobs.append((i, base, overrides, str(out_root / f"job_{i:04d}")))

    workers = int(os.environ.get("PREYSPREAD_THREADS", "0")) or (os.cpu_count() or 1)
    workers = max(1, min(workers, len(jobs)))
    if workers == 1:
        results = [_sweep_job(j) for j in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_job, jobs))
    results.sort(key=lambda r: r[0])

    columns = keys + ["c_star", "c_star_star", "regime",
                      "measured_u_speed", "measured_v_speed", "all_checks_pass"]
    with open(out_root / "sweep_results.csv", "w") as fh:
        fh.write(",".join(columns) + "\n")
        for _, row in results:
            cells = []
            for col in columns:
                val = row.get(col, "")
                cells.append(_fmt(val) if isinstance(val, float) else str(val))
            fh.write(",".join(cells) + "\n")
    n_fail = sum(1 for _, r in results if not r.get("all_checks_pass"))
    print(json.dumps({"jobs": len(jobs), "failed": n_fail,
                      "results": str(out_root / "sweep_results.csv")}, sort_keys=True))
    return EXIT_OK if n_fail == 0 else EXIT_CHECK_FAILED


# ----------------------------------------------------------------------
# parser / dispatch
# ----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # route argparse usage errors through exit code 2 without killing
        # the calling process
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="preyspread", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("speeds", help="theoretical speeds and regime")
    sp.add_argument("--model", required=True)
    sp.add_argument("--params", default="")
    sp.set_defaults(func=cmd_speeds)

    sp = sub.add_parser("check", help="hypothesis and dissipativity checks")
    sp.add_argument("--model", required=True)
    sp.add_argument("--params", default="")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("wave", help="profile shoot or minimal wave speed")
    sp.add_argument("--f", required=True, help="reaction: preset name or kpp:<rate>")
    sp.add_argument("--params", default="", help="preset parameters for --f")
    sp.add_argument("--d", type=float, default=1.0)
    sp.add_argument("--c", type=float, default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--tol", type=float, default=1e-3)
    sp.set_defaults(func=cmd_wave)

    sp = sub.add_parser("simulate", help="run a config file")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("ode", help="kinetic ODE trajectory CSV")
    sp.add_argument("--model", required=True)
    sp.add_argument("--params", default="")
    sp.add_argument("--u0", type=float, required=True)
    sp.add_argument("--v0", type=float, required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--dt", type=float, default=1e-2)
    sp.set_defaults(func=cmd_ode)

    sp = sub.add_parser("analyze", help="verification report for a run directory")
    sp.add_argument("--run", required=True)
    sp.add_argument("--c-grid", default=None, help="comma list of ray speeds for zones CSV")
    sp.add_argument("--fze-c", default=None, help="comma list of ray speeds for final-zone error")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("sweep", help="expand a parameter grid and run all jobs")
    sp.add_argument("--config", required=True)
    sp.set_defaults(func=cmd_sweep)

    return p


def run_command(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreyspreadError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
