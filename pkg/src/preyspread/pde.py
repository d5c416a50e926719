"""Explicit finite-difference initial-value solver for the two-species system.

Geometry is a symmetric 1-D line or a radially symmetric ball in N
dimensions.  Time stepping is Heun's method (explicit trapezoidal) under a
diffusive CFL bound; the fields are clamped back into the invariant region
u in [0, 1], v >= 0 after every step with the clamped mass accounted, never
hidden.  Compact-support initial data use a cosine ramp so the initial
fields are continuous.
"""

from __future__ import annotations

import json
import math
import time as _time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import _accel
from ._accel import fallback
from .errors import (
    CFLViolation,
    ConfigError,
    FrontReachedBoundary,
    ModelDefinitionError,
    NoInteriorEquilibrium,
    NonFiniteState,
)
from .models import KineticModel, check_assumptions, equilibrium, preset

__all__ = [
    "Domain",
    "SimState",
    "SimConfig",
    "SimOutput",
    "init_state",
    "laplacian",
    "step",
    "run_simulation",
    "write_outputs",
    "load_run",
]

BOUND_TOL = 1e-9  # discrete slack on the continuum bounds 0 <= u <= 1, v >= 0
FRONT_GUARD_THETA = 1e-4
MACRO_STRIDE = 50


@dataclass(frozen=True)
class Domain:
    """Spatial grid: a symmetric line [-L, L] or a radial axis [0, L]."""

    geometry: str  # "line" | "radial"
    length: float
    dx: float
    N: int = 1

    def __post_init__(self):
        if self.geometry not in ("line", "radial"):
            raise ConfigError(f"geometry must be 'line' or 'radial', got {self.geometry!r}")
        if self.geometry == "radial" and self.N < 1:
            raise ConfigError("radial dimension N must be >= 1")
        if self.length <= 0 or self.dx <= 0:
            raise ConfigError("length and dx must be positive")
        ratio = self.length / self.dx
        if abs(ratio - round(ratio)) > 1e-9:
            raise ConfigError(f"length/dx = {ratio!r} must be an integer")

    @property
    def n_points(self) -> int:
        per_side = round(self.length / self.dx)
        return 2 * per_side + 1 if self.geometry == "line" else per_side + 1

    def grid(self) -> np.ndarray:
        if self.geometry == "line":
            n = round(self.length / self.dx)
            return np.arange(-n, n + 1, dtype=float) * self.dx
        n = round(self.length / self.dx)
        return np.arange(0, n + 1, dtype=float) * self.dx

    def effective_dim(self) -> int:
        return max(self.N, 1) if self.geometry == "radial" else 1


def _lap_params(domain: Domain):
    inv_dx2 = 1.0 / (domain.dx * domain.dx)
    if domain.geometry == "radial":
        r = domain.grid()
        drift = np.zeros_like(r)
        drift[1:] = (domain.N - 1) / (2.0 * domain.dx * r[1:])
        return 1, float(domain.N), inv_dx2, drift
    return 0, 1.0, inv_dx2, np.zeros(domain.n_points)


def laplacian(field_values: np.ndarray, domain: Domain) -> np.ndarray:
    """Discrete Laplacian with symmetric (Neumann) ghosts at both ends.

    Radial geometry adds the (N-1)/r first-derivative term, with the
    regular 2N*(f1 - f0)/dx^2 limit at the origin.
    """
    f = np.asarray(field_values, dtype=float)
    if f.shape != (domain.n_points,):
        raise ConfigError(f"field length {f.shape} does not match domain ({domain.n_points},)")
    geom, dim, inv_dx2, drift = _lap_params(domain)
    if geom == 1:
        return fallback.laplacian_radial(f, inv_dx2, dim, drift)
    return fallback.laplacian_line(f, inv_dx2)


@dataclass
class SimState:
    """Fields at one time plus run-accumulated diagnostics."""

    t: float
    u: np.ndarray
    v: np.ndarray
    domain: Domain
    v_sup_running: float = 0.0
    clamp_l1_total: float = 0.0
    preclamp_u_min: float = math.inf
    preclamp_u_max: float = -math.inf
    preclamp_v_min: float = math.inf

    def copy(self) -> "SimState":
        return replace(self, u=self.u.copy(), v=self.v.copy())


@dataclass(frozen=True)
class SimConfig:
    model_name: str
    model_params: dict
    d: float
    domain: Domain
    u_amp: float = 1.0
    v_amp: float = 0.5
    u_radius: float = 5.0
    v_radius: float = 5.0
    ramp_width: Optional[float] = None  # defaults to 2*dx
    T: float = 100.0
    dt_safety: float = 0.4
    snapshot_times: tuple = ()
    thresholds_u: tuple = ()
    thresholds_v: tuple = ()
    output_dir: Optional[str] = None
    assume_valid: bool = False

    def __post_init__(self):
        if not (0 <= self.u_amp <= 1):
            raise ConfigError("u_amp must lie in [0, 1]")
        if self.v_amp < 0:
            raise ConfigError("v_amp must be nonnegative")
        if not (0 < self.dt_safety <= 0.9):
            raise ConfigError("dt_safety must lie in (0, 0.9]")
        if self.T <= 0:
            raise ConfigError("T must be positive")
        L = self.domain.length
        if max(self.u_radius, self.v_radius) >= L / 4:
            raise ConfigError(
                f"initial radii {self.u_radius:g}, {self.v_radius:g} must stay below L/4 = {L / 4:g}"
            )
        if self.ramp_width is None:
            object.__setattr__(self, "ramp_width", 2.0 * self.domain.dx)
        elif self.ramp_width < 0:
            raise ConfigError("ramp_width must be nonnegative")

    def build_model(self) -> KineticModel:
        return preset(self.model_name, d=self.d, **self.model_params)

    def effective_thresholds(self, model: KineticModel) -> tuple:
        """Front thresholds, defaulted from the model when not configured.

        The prey default tracks the 0.1 level: ahead-of-front u decays fast
        and the 0.5 level would conflate the front with final-zone dynamics
        where u relaxes to u* < 1.  The predator default is 10% of v* when
        a coexistence state exists.  1e-3 traces back the inter-species
        front-ordering check.
        """
        th_u = tuple(self.thresholds_u)
        th_v = tuple(self.thresholds_v)
        if not th_u:
            th_u = (0.1, 1e-3)
        if not th_v:
            try:
                _, v_star = equilibrium(model)
                th_v = (0.1 * min(1.0, v_star), 1e-3)
            except NoInteriorEquilibrium:
                th_v = (0.05, 1e-3)
        return th_u, th_v

    def to_dict(self) -> dict:
        dom = {
            "geometry": self.domain.geometry,
            "N": self.domain.N,
            "length": self.domain.length,
            "dx": self.domain.dx,
        }
        out = {
            "model": {"name": self.model_name, "params": dict(self.model_params), "d": self.d},
            "domain": dom,
            "init": {
                "u_amp": self.u_amp,
                "v_amp": self.v_amp,
                "u_radius": self.u_radius,
                "v_radius": self.v_radius,
                "ramp_width": self.ramp_width,
            },
            "time": {
                "T": self.T,
                "dt_safety": self.dt_safety,
                "snapshots": list(self.snapshot_times),
            },
            "fronts": {
                "thresholds_u": list(self.thresholds_u),
                "thresholds_v": list(self.thresholds_v),
            },
            "output": {"dir": self.output_dir},
        }
        if self.assume_valid:
            out["model"]["assume_valid"] = True
        return out

    @staticmethod
    def from_dict(cfg: dict) -> "SimConfig":
        try:
            model = cfg["model"]
            dom = cfg["domain"]
            init = cfg.get("init", {})
            tim = cfg["time"]
            fronts = cfg.get("fronts", {})
            output = cfg.get("output", {})
            domain = Domain(
                geometry=str(dom["geometry"]).lower(),
                N=int(dom.get("N", 1)),
                length=float(dom["length"]),
                dx=float(dom["dx"]),
            )
            return SimConfig(
                model_name=model["name"],
                model_params={k: float(v) for k, v in model.get("params", {}).items()},
                d=float(model.get("d", model.get("params", {}).get("d", 1.0))),
                domain=domain,
                u_amp=float(init.get("u_amp", 1.0)),
                v_amp=float(init.get("v_amp", 0.5)),
                u_radius=float(init.get("u_radius", 5.0)),
                v_radius=float(init.get("v_radius", 5.0)),
                ramp_width=(float(init["ramp_width"]) if "ramp_width" in init else None),
                T=float(tim["T"]),
                dt_safety=float(tim.get("dt_safety", 0.4)),
                snapshot_times=tuple(float(s) for s in tim.get("snapshots", [])),
                thresholds_u=tuple(float(x) for x in fronts.get("thresholds_u", [])),
                thresholds_v=tuple(float(x) for x in fronts.get("thresholds_v", [])),
                output_dir=output.get("dir"),
                assume_valid=bool(model.get("assume_valid", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid simulation config: {exc}") from exc

    @staticmethod
    def from_json(path) -> "SimConfig":
        try:
            with open(path) as fh:
                return SimConfig.from_dict(json.load(fh))
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc


def _ramp(s: np.ndarray, radius: float, width: float) -> np.ndarray:
    """1 inside the radius, 0 beyond radius+width, cosine-smoothed between."""
    if width <= 0:
        return np.where(s <= radius, 1.0, 0.0)
    out = 0.5 * (1.0 + np.cos(np.pi * (s - radius) / width))
    out = np.where(s <= radius, 1.0, out)
    return np.where(s >= radius + width, 0.0, out)


def init_state(config: SimConfig) -> SimState:
    """Compact-support initial data centred at the origin, t = 0."""
    x = config.domain.grid()
    s = np.abs(x)
    w = config.ramp_width
    u0 = config.u_amp * _ramp(s, config.u_radius, w)
    v0 = config.v_amp * _ramp(s, config.v_radius, w)
    return SimState(
        t=0.0,
        u=u0,
        v=v0,
        domain=config.domain,
        v_sup_running=float(v0.max()),
    )


def cfl_limit(domain: Domain, d: float) -> float:
    """Largest admissible dt at dt_safety = 0.9."""
    n_eff = domain.effective_dim()
    return 0.9 * domain.dx**2 / (2.0 * n_eff * max(d, 1.0))


class _Stepper:
    """Reusable stepping context: backend choice, scratch buffers."""

    def __init__(self, model: KineticModel, domain: Domain, backend: Optional[str] = None):
        self.model = model
        self.domain = domain
        self.geom, self.dim, self.inv_dx2, self.drift = _lap_params(domain)
        self.use_compiled = _accel.resolve(backend) and model.fast_kinetics is not None
        if backend == "compiled" and model.fast_kinetics is None:
            raise RuntimeError("compiled stepping requires a preset model with fast kinetics")
        n = domain.n_points
        if self.use_compiled:
            code, p = model.fast_kinetics
            if code == 0:
                a, b, mu = p
                self.kin_args = (0, a, b, 0.0, mu)
            else:
                a, b, m, mu = p
                self.kin_args = (1, a, b, m, mu)
            self.buf = [np.empty(n) for _ in range(6)]

    def advance(self, u: np.ndarray, v: np.ndarray, dt: float):
        """One Heun step; returns (u_new, v_new, stats)."""
        if self.use_compiled:
            un, vn, u1, v1, k1u, k1v = self.buf
            code, a, b, m, mu = self.kin_args
            stats = _accel._core.heun_step(
                u, v, un, vn, u1, v1, k1u, k1v,
                self.geom, self.dim, self.inv_dx2, self.drift,
                self.model.d, dt, code, a, b, m, mu,
            )
            out_u, out_v = un.copy(), vn.copy()
            return out_u, out_v, stats
        geometry = "radial" if self.geom == 1 else "line"
        return fallback.heun_step(
            u, v, self.model.F, self.model.G, self.model.d, dt,
            geometry, self.dim, self.inv_dx2, self.drift,
        )


def step(
    state: SimState,
    model: KineticModel,
    dt: float,
    domain: Optional[Domain] = None,
    backend: Optional[str] = None,
    _stepper: Optional[_Stepper] = None,
) -> SimState:
    """One Heun step of the coupled system, then clamp into the invariant
    region with the clamped mass accumulated into the diagnostics."""
    dom = domain or state.domain
    if dt > cfl_limit(dom, model.d) * (1 + 1e-12):
        raise CFLViolation(
            f"dt={dt:g} exceeds stability limit {cfl_limit(dom, model.d):g}"
        )
    stepper = _stepper or _Stepper(model, dom, backend)
    u_new, v_new, stats = stepper.advance(state.u, state.v, dt)
    pre_u_min, pre_u_max, pre_v_min, clamp_raw, v_max, finite = stats
    if not finite:
        raise NonFiniteState(f"non-finite field value after step at t={state.t:g}")
    return SimState(
        t=state.t + dt,
        u=u_new,
        v=v_new,
        domain=dom,
        v_sup_running=max(state.v_sup_running, v_max),
        clamp_l1_total=state.clamp_l1_total + clamp_raw * dom.dx * dt,
        preclamp_u_min=min(state.preclamp_u_min, pre_u_min),
        preclamp_u_max=max(state.preclamp_u_max, pre_u_max),
        preclamp_v_min=min(state.preclamp_v_min, pre_v_min),
    )


@dataclass
class SimOutput:
    """Everything a finished (or salvaged) run produced."""

    config: SimConfig
    model: KineticModel
    domain: Domain
    dt: float
    n_steps: int
    snapshots: list
    traces: list
    v_sup_running: float
    clamp_l1_total: float
    preclamp_u_min: float
    preclamp_u_max: float
    preclamp_v_min: float
    wall_time: float
    aborted_at: Optional[float] = None
    backend: str = "unknown"

    def snapshot_at(self, t: float) -> SimState:
        for s in self.snapshots:
            if abs(s.t - t) <= max(1e-9, 2 * self.dt):
                return s
        raise KeyError(f"no snapshot near t={t:g}; have {[s.t for s in self.snapshots]}")

    def trace(self, species: str, theta: float):
        for tr in self.traces:
            if tr.species == species and math.isclose(tr.theta, theta, rel_tol=1e-9):
                return tr
        raise KeyError(f"no trace for species={species!r} theta={theta:g}")


def _outermost(field: np.ndarray, x: np.ndarray, theta: float, geometry: str):
    idx = np.nonzero(field >= theta)[0]
    if idx.size == 0:
        return None
    if geometry == "line":
        return max(float(x[idx[-1]]), float(-x[idx[0]]))
    return float(x[idx[-1]])


def run_simulation(config: SimConfig, backend: Optional[str] = None) -> SimOutput:
    """March the system from compact-support data to T.

    Records front traces every MACRO_STRIDE steps and snapshots at the
    configured times; aborts with FrontReachedBoundary (carrying the
    partial output) if either species' 1e-4 level comes within
    10*dx + 5 of the boundary, since Neumann walls would then contaminate
    the interior.
    """
    from .fronttrack import FrontTrace, front_position

    model = config.build_model()
    if not config.assume_valid:
        report = check_assumptions(model)
        if not report.all_pass:
            raise ModelDefinitionError(
                f"model {model.name!r} fails structural checks: {report.failed()}; "
                "set assume_valid to override"
            )

    domain = config.domain
    dt_max = config.dt_safety * domain.dx**2 / (2.0 * domain.effective_dim() * max(model.d, 1.0))
    n_steps = max(1, int(math.ceil(config.T / dt_max - 1e-12)))
    dt = config.T / n_steps

    snap_steps = {}
    for ts in config.snapshot_times:
        if ts < 0 or ts > config.T * (1 + 1e-12):
            raise ConfigError(f"snapshot time {ts:g} outside [0, T]")
        snap_steps.setdefault(int(round(ts / dt)), ts)

    th_u, th_v = config.effective_thresholds(model)
    traces = {("u", th): FrontTrace("u", th) for th in th_u}
    traces.update({("v", th): FrontTrace("v", th) for th in th_v})

    state = init_state(config)
    stepper = _Stepper(model, domain, backend)
    x = domain.grid()
    guard = domain.length - (10.0 * domain.dx + 5.0)
    snapshots = []
    t_start = _time.perf_counter()

    def record_fronts(st: SimState):
        for (species, th), tr in traces.items():
            f = st.u if species == "u" else st.v
            tr.append(st.t, front_position(f, domain, th))

    def build_output(aborted_at=None):
        return SimOutput(
            config=config,
            model=model,
            domain=domain,
            dt=dt,
            n_steps=n_steps,
            snapshots=snapshots,
            traces=list(traces.values()),
            v_sup_running=state.v_sup_running,
            clamp_l1_total=state.clamp_l1_total,
            preclamp_u_min=state.preclamp_u_min,
            preclamp_u_max=state.preclamp_u_max,
            preclamp_v_min=state.preclamp_v_min,
            wall_time=_time.perf_counter() - t_start,
            aborted_at=aborted_at,
            backend="compiled" if stepper.use_compiled else "fallback",
        )

    record_fronts(state)
    if 0 in snap_steps:
        snapshots.append(state.copy())

    for k in range(1, n_steps + 1):
        state = step(state, model, dt, domain, _stepper=stepper)
        if k % MACRO_STRIDE == 0 or k == n_steps:
            record_fronts(state)
            for species in ("u", "v"):
                f = state.u if species == "u" else state.v
                outer = _outermost(f, x, FRONT_GUARD_THETA, domain.geometry)
                if outer is not None and outer >= guard:
                    raise FrontReachedBoundary(state.t, partial=build_output(aborted_at=state.t))
        if k in snap_steps:
            snapshots.append(state.copy())

    return build_output()


# ----------------------------------------------------------------------
# run directory IO (CSV schemas are part of the external contract)
# ----------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def _time_label(t: float) -> str:
    return f"{t:g}"


def write_outputs(output: SimOutput, out_dir) -> list:
    """Write snapshots, front traces, config and diagnostics; returns the
    list of file names written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    x = output.domain.grid()
    for snap in output.snapshots:
        name = f"snap_t{_time_label(snap.t)}.csv"
        with open(out_dir / name, "w") as fh:
            fh.write("x,u,v\n")
            for xi, ui, vi in zip(x, snap.u, snap.v):
                fh.write(f"{_fmt(xi)},{_fmt(ui)},{_fmt(vi)}\n")
        written.append(name)

    with open(out_dir / "fronts.csv", "w") as fh:
        fh.write("t,species,threshold,position\n")
        for tr in output.traces:
            for t, pos in tr.entries:
                pos_s = "" if pos is None else _fmt(pos)
                fh.write(f"{_fmt(t)},{tr.species},{_fmt(tr.theta)},{pos_s}\n")
    written.append("fronts.csv")

    with open(out_dir / "config.json", "w") as fh:
        json.dump(output.config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append("config.json")

    diag = {
        "dt": output.dt,
        "n_steps": output.n_steps,
        "v_sup_running": output.v_sup_running,
        "clamp_l1_total": output.clamp_l1_total,
        "preclamp_u_min": output.preclamp_u_min,
        "preclamp_u_max": output.preclamp_u_max,
        "preclamp_v_min": output.preclamp_v_min,
        "wall_time": output.wall_time,
        "aborted_at": output.aborted_at,
        "backend": output.backend,
    }
    with open(out_dir / "diagnostics.json", "w") as fh:
        json.dump(diag, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append("diagnostics.json")
    return written


def load_run(run_dir) -> SimOutput:
    """Rebuild a SimOutput from a run directory written by write_outputs."""
    from .fronttrack import FrontTrace

    run_dir = Path(run_dir)
    cfg_path = run_dir / "config.json"
    if not cfg_path.exists():
        raise ConfigError(f"{run_dir} does not look like a run directory (no config.json)")
    config = SimConfig.from_json(cfg_path)
    model = config.build_model()
    domain = config.domain

    with open(run_dir / "diagnostics.json") as fh:
        diag = json.load(fh)

    snapshots = []
    for path in sorted(run_dir.glob("snap_t*.csv")):
        t = float(path.stem[len("snap_t"):])
        data = np.genfromtxt(path, delimiter=",", skip_header=1)
        snapshots.append(
            SimState(t=t, u=data[:, 1].copy(), v=data[:, 2].copy(), domain=domain)
        )
    snapshots.sort(key=lambda s: s.t)

    traces = {}
    fronts_path = run_dir / "fronts.csv"
    if fronts_path.exists():
        with open(fronts_path) as fh:
            next(fh)
            for line in fh:
                t_s, species, th_s, pos_s = line.rstrip("\n").split(",")
                key = (species, float(th_s))
                tr = traces.setdefault(key, FrontTrace(species, float(th_s)))
                tr.append(float(t_s), float(pos_s) if pos_s else None)

    return SimOutput(
        config=config,
        model=model,
        domain=domain,
        dt=float(diag["dt"]),
        n_steps=int(diag["n_steps"]),
        snapshots=snapshots,
        traces=list(traces.values()),
        v_sup_running=float(diag["v_sup_running"]),
        clamp_l1_total=float(diag["clamp_l1_total"]),
        preclamp_u_min=float(diag["preclamp_u_min"]),
        preclamp_u_max=float(diag["preclamp_u_max"]),
        preclamp_v_min=float(diag["preclamp_v_min"]),
        wall_time=float(diag["wall_time"]),
        aborted_at=diag.get("aborted_at"),
        backend=diag.get("backend", "unknown"),
    )
