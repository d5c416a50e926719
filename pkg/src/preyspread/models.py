"""Kinetics models and validation of their structural hypotheses.

A :class:`KineticModel` bundles the per-capita growth-rate maps ``F`` (prey)
and ``G`` (predator) together with the prey diffusivity ``d``.  The checkers
in this module probe, by sampling, the monotonicity and sign conditions that
the rest of the package relies on, classify weak dissipativity from the
``v -> infinity`` limits of ``F`` and ``G``, and locate the coexistence
equilibrium.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, ModelDefinitionError, NoInteriorEquilibrium

__all__ = [
    "KineticModel",
    "AssumptionReport",
    "ClauseCheck",
    "DissipativityReport",
    "lotka",
    "holling2",
    "preset",
    "eval_kinetics",
    "check_assumptions",
    "compute_m_star",
    "check_weak_dissipativity",
    "equilibrium",
]

NEG_INF = float("-inf")


@dataclass(frozen=True)
class KineticModel:
    """Immutable description of a two-species kinetic system.

    ``F`` and ``G`` must accept floats or numpy arrays elementwise.  The
    optional ``F_inf``/``G_inf`` give the exact limits as the predator
    density tends to infinity, valued in R union {-inf}; they are supplied
    in closed form (numerical extrapolation cannot distinguish -inf from a
    large negative value, and the dissipativity criterion is about exact
    limits).

    ``fast_kinetics`` is an internal tag ``(code, params)`` that lets the
    compiled stepping kernel evaluate preset kinetics without calling back
    into Python; generic models leave it ``None`` and take the numpy path.
    """

    name: str
    d: float
    F: Callable
    G: Callable
    F_inf: Optional[Callable] = None
    G_inf: Optional[Callable] = None
    params: dict = field(default_factory=dict)
    equilibrium_closed_form: Optional[Callable] = None
    fast_kinetics: Optional[tuple] = None

    def __post_init__(self):
        if not (self.d > 0):
            raise DomainError(f"diffusivity d must be positive, got {self.d}")


@dataclass
class ClauseCheck:
    """Outcome of one sampled hypothesis clause."""

    status: str  # "pass" | "fail" | "indeterminate"
    description: str
    witnesses: list = field(default_factory=list)


@dataclass
class AssumptionReport:
    """Per-clause results of the structural hypothesis checks.

    A "pass" means no violation was found on the sample grid; sampling can
    refute but never prove the continuum statements.
    """

    clauses: dict
    u_samples: int
    v_samples: int
    v_max: float

    @property
    def all_pass(self) -> bool:
        return all(c.status == "pass" for c in self.clauses.values())

    def failed(self) -> list:
        return [k for k, c in self.clauses.items() if c.status == "fail"]


@dataclass
class DissipativityReport:
    m_star: Optional[float]
    G_at_mstar_inf: Optional[float]
    G_at_zero_inf: Optional[float]
    verdict: str  # "Satisfied" | "Violated" | "Indeterminate"


# ----------------------------------------------------------------------
# Presets
# ----------------------------------------------------------------------

def lotka(a: float = 1.5, b: float = 1.0, mu: float = 2.0, d: float = 1.0) -> KineticModel:
    """Logistic prey with linear capture: F = 1 - u - b*v, G = mu*b*u - a."""
    if min(a, b, mu) <= 0:
        raise DomainError("lotka parameters a, b, mu must be positive")

    def F(u, v):
        return 1.0 - u - b * v

    def G(u, v):
        return (mu * b) * u - a

    def F_inf(u):
        return NEG_INF

    def G_inf(u):
        return (mu * b) * u - a

    def closed_eq():
        if mu * b <= a:
            raise NoInteriorEquilibrium(
                f"lotka needs mu*b > a for a coexistence state (mu*b={mu * b:g}, a={a:g})"
            )
        return a / (mu * b), (mu * b - a) / (mu * b * b)

    return KineticModel(
        name="lotka",
        d=d,
        F=F,
        G=G,
        F_inf=F_inf,
        G_inf=G_inf,
        params={"a": a, "b": b, "mu": mu},
        equilibrium_closed_form=closed_eq,
        fast_kinetics=(0, (a, b, mu)),
    )


def holling2(
    a: float = 1.0,
    b: float = 2.0,
    m: float = 1.0,
    mu: float = 4.0,
    n: float = 1.0,
    d: float = 1.0,
) -> KineticModel:
    """Logistic prey with saturating capture rate m*u^n / (b + u^n).

    The compiled kernel path and the Lyapunov construction only cover the
    default n = 1; other n are accepted but run on the generic code paths.
    """
    if min(a, b, m, mu) <= 0 or n < 1:
        raise DomainError("holling2 needs a, b, m, mu > 0 and n >= 1")

    def capture(u):
        if n == 1.0:
            return m * u / (b + u)
        return m * u**n / (b + u**n)

    def F(u, v):
        if n == 1.0:
            return 1.0 - u - m * v / (b + u)
        return 1.0 - u - m * u ** (n - 1.0) * v / (b + u**n)

    def G(u, v):
        if n == 1.0:
            return mu * m * u / (b + u) - a
        return mu * m * u**n / (b + u**n) - a

    def F_inf(u):
        # coefficient of v in F is negative for u > 0 (and for u = 0 iff n = 1)
        if n == 1.0 or u > 0:
            return NEG_INF
        return 1.0

    def G_inf(u):
        return G(u, 0.0)

    def closed_eq():
        if mu * m <= a:
            raise NoInteriorEquilibrium(
                f"holling2 needs mu*m > a for a coexistence state (mu*m={mu * m:g}, a={a:g})"
            )
        un = a * b / (mu * m - a)
        u_star = un ** (1.0 / n)
        if not (0 < u_star < 1):
            raise NoInteriorEquilibrium(
                f"holling2 equilibrium u*={u_star:g} outside (0,1); G(1,0) <= 0"
            )
        v_star = (1.0 - u_star) * (b + un) / (m * u_star ** (n - 1.0))
        return u_star, v_star

    return KineticModel(
        name="holling2",
        d=d,
        F=F,
        G=G,
        F_inf=F_inf,
        G_inf=G_inf,
        params={"a": a, "b": b, "m": m, "mu": mu, "n": n},
        equilibrium_closed_form=closed_eq,
        fast_kinetics=(1, (a, b, m, mu)) if n == 1.0 else None,
    )


_PRESETS = {"lotka": lotka, "holling2": holling2}


def preset(name: str, **params) -> KineticModel:
    """Build a preset model by name ("lotka" or "holling2")."""
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise DomainError(f"unknown preset {name!r}; choose from {sorted(_PRESETS)}") from None
    return factory(**params)


# ----------------------------------------------------------------------
# Operations
# ----------------------------------------------------------------------

def eval_kinetics(model: KineticModel, u: float, v: float) -> tuple:
    """Evaluate (F(u, v), G(u, v)) with domain and finiteness checks."""
    if u < 0 or v < 0:
        raise DomainError(f"densities must be nonnegative, got (u, v) = ({u}, {v})")
    f = float(model.F(u, v))
    g = float(model.G(u, v))
    if not (math.isfinite(f) and math.isfinite(g)):
        raise ModelDefinitionError(
            f"model {model.name!r} returned non-finite kinetics at (u, v) = ({u}, {v})"
        )
    return f, g


_EXACT_TOL = 1e-12


def check_assumptions(
    model: KineticModel,
    u_samples: int = 48,
    v_max: float = 4.0,
    v_samples: int = 48,
) -> AssumptionReport:
    """Probe the structural hypotheses on a sample grid.

    Monotonicity clauses are checked on consecutive grid pairs over
    [0, 1] x [0, v_max]; the pointwise sign clauses (F(1,0) = 0,
    G(0,0) < 0 < G(1,0)) are checked exactly.  A clause that fails carries
    at least one witness point.
    """
    if u_samples < 8 or v_samples < 8:
        raise DomainError("need at least 8 samples per axis")
    if v_max <= 0:
        raise DomainError("v_max must be positive")

    u_grid = np.linspace(0.0, 1.0, u_samples)
    v_grid = np.linspace(0.0, v_max, v_samples)

    def sample(fn, u, v):
        val = float(fn(u, v))
        if not math.isfinite(val):
            raise ModelDefinitionError(
                f"model {model.name!r} non-finite at sample (u, v) = ({u}, {v})"
            )
        return val

    clauses = {}

    c = ClauseCheck("pass", "F strictly decreasing in v for u in (0, 1]")
    for u in u_grid[u_grid > 0]:
        vals = [sample(model.F, u, v) for v in v_grid]
        for j in range(len(v_grid) - 1):
            if not vals[j] > vals[j + 1]:
                c.status = "fail"
                c.witnesses.append((float(u), float(v_grid[j]), float(v_grid[j + 1]), vals[j], vals[j + 1]))
    clauses["F_decreasing_in_v"] = c

    c = ClauseCheck("pass", "F(1, 0) = 0 and F(u, 0) > 0 on [0, 1)")
    f10 = sample(model.F, 1.0, 0.0)
    if abs(f10) > _EXACT_TOL:
        c.status = "fail"
        c.witnesses.append((1.0, 0.0, f10))
    for u in u_grid[u_grid < 1.0]:
        fu = sample(model.F, u, 0.0)
        if not fu > 0:
            c.status = "fail"
            c.witnesses.append((float(u), 0.0, fu))
    clauses["F_monostable"] = c

    c = ClauseCheck("pass", "F(u, 0) <= F(0, 0) (linearly determined prey speed)")
    f00 = sample(model.F, 0.0, 0.0)
    for u in u_grid:
        fu = sample(model.F, u, 0.0)
        if fu > f00 + _EXACT_TOL:
            c.status = "fail"
            c.witnesses.append((float(u), 0.0, fu, f00))
    clauses["F_kpp"] = c

    c = ClauseCheck("pass", "G nondecreasing in u")
    for v in v_grid:
        vals = [sample(model.G, u, v) for u in u_grid]
        for i in range(len(u_grid) - 1):
            if vals[i + 1] < vals[i] - _EXACT_TOL:
                c.status = "fail"
                c.witnesses.append((float(u_grid[i]), float(u_grid[i + 1]), float(v), vals[i], vals[i + 1]))
    clauses["G_nondecreasing_in_u"] = c

    c = ClauseCheck("pass", "G(0, 0) < 0 < G(1, 0)")
    g00 = sample(model.G, 0.0, 0.0)
    g10 = sample(model.G, 1.0, 0.0)
    if not (g00 < 0 < g10):
        c.status = "fail"
        c.witnesses.append((0.0, 0.0, g00))
        c.witnesses.append((1.0, 0.0, g10))
    clauses["G_sign_split"] = c

    c = ClauseCheck("pass", "G nonincreasing in v (linearly determined predator speed)")
    for u in u_grid:
        vals = [sample(model.G, u, v) for v in v_grid]
        for j in range(len(v_grid) - 1):
            if vals[j + 1] > vals[j] + _EXACT_TOL:
                c.status = "fail"
                c.witnesses.append((float(u), float(v_grid[j]), float(v_grid[j + 1]), vals[j], vals[j + 1]))
    clauses["G_nonincreasing_in_v"] = c

    return AssumptionReport(clauses=clauses, u_samples=u_samples, v_samples=v_samples, v_max=v_max)


def compute_m_star(F_inf: Callable, tol: float = 1e-9, scan_points: int = 2049) -> float:
    """Smallest threshold m in [0, 1] above which F(., +inf) is negative.

    Computes ``inf { m : sup_{u in [m, 1]} F_inf(u) < 0 }`` by bisection on
    the (monotone, up-closed) predicate, with the supremum approximated on a
    dense sample of [m, 1].  A sampled pass is refutation-based, as
    everywhere else in this module.
    """
    if not (float(F_inf(1.0)) < 0):
        raise DomainError("F_inf(1) must be negative; model outside the dissipativity criterion")

    def all_negative(m: float) -> bool:
        us = np.linspace(m, 1.0, scan_points)
        return all(float(F_inf(float(u))) < 0 for u in us)

    if all_negative(0.0):
        return 0.0
    lo, hi = 0.0, 1.0  # predicate false at lo, true at hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if all_negative(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def check_weak_dissipativity(model: KineticModel, tol: float = 1e-9) -> DissipativityReport:
    """Classify weak dissipativity from the v -> infinity limits.

    Satisfied requires G_inf(0) > -inf together with G_inf(m*) < -tol;
    G_inf(m*) > tol is a certificate of violation; the boundary band
    |G_inf(m*)| <= tol (and missing limits) stay Indeterminate.
    """
    if model.F_inf is None or model.G_inf is None:
        return DissipativityReport(None, None, None, "Indeterminate")
    m_star = compute_m_star(model.F_inf, tol=min(tol, 1e-6))
    g_zero = float(model.G_inf(0.0))
    g_mstar = float(model.G_inf(m_star))
    if g_mstar > tol:
        verdict = "Violated"
    elif g_mstar < -tol and g_zero > NEG_INF:
        verdict = "Satisfied"
    else:
        verdict = "Indeterminate"
    return DissipativityReport(m_star, g_mstar, g_zero, verdict)


def equilibrium(model: KineticModel, tol: float = 1e-10) -> tuple:
    """Coexistence state (u*, v*) with |F| + |G| <= tol.

    Presets use their closed forms; generic models run a damped 2-D Newton
    iteration from (0.5, 0.5), halving any step that would leave the open
    region 0 < u < 1, v > 0.
    """
    if model.equilibrium_closed_form is not None:
        u, v = model.equilibrium_closed_form()
        f, g = eval_kinetics(model, u, v)
        if abs(f) + abs(g) > max(tol, 1e-9):
            raise ModelDefinitionError(
                f"closed-form equilibrium of {model.name!r} has residual {abs(f) + abs(g):.3e}"
            )
        return u, v
    return _newton_equilibrium(model, tol)


def _newton_equilibrium(model: KineticModel, tol: float) -> tuple:
    u, v = 0.5, 0.5
    h = 1e-7
    for _ in range(200):
        f, g = eval_kinetics(model, u, v)
        if abs(f) + abs(g) <= tol:
            if not (0 < u < 1 and v > 0):
                break
            return u, v
        # central-difference Jacobian of (F, G)
        fu = (model.F(u + h, v) - model.F(u - h, v)) / (2 * h)
        fv = (model.F(u, v + h) - model.F(u, v - h)) / (2 * h)
        gu = (model.G(u + h, v) - model.G(u - h, v)) / (2 * h)
        gv = (model.G(u, v + h) - model.G(u, v - h)) / (2 * h)
        det = fu * gv - fv * gu
        if not math.isfinite(det) or abs(det) < 1e-14:
            raise NoInteriorEquilibrium("singular Jacobian in Newton iteration")
        du = (-f * gv + g * fv) / det
        dv = (-g * fu + f * gu) / det
        step = 1.0
        for _ in range(40):
            un, vn = u + step * du, v + step * dv
            if 0 < un < 1 and vn > 0:
                break
            step *= 0.5
        else:
            raise NoInteriorEquilibrium("Newton iterate could not stay inside 0<u<1, v>0")
        u, v = un, vn
    raise NoInteriorEquilibrium("Newton iteration did not converge in 200 steps")
