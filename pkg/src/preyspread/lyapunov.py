"""Lyapunov functionals for the kinetic system and final-zone convergence.

Both built-in models admit a convex functional that decreases along kinetic
trajectories and vanishes only at the coexistence state; this is what
forces the final zone of the PDE to settle onto (u*, v*).  The module also
provides the kinetic ODE integrator used to exercise those functionals and
the sup-norm convergence metric evaluated on PDE snapshots.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, TYPE_CHECKING

import numpy as np
from scipy.integrate import quad

from .errors import (
    BoundaryExitWarning,
    DomainError,
    LyapunovValidityError,
    NonFiniteState,
    TheoremScopeWarning,
)
from .models import KineticModel, equilibrium

if TYPE_CHECKING:
    from .pde import SimState

__all__ = [
    "LyapunovFn",
    "LyapunovTrace",
    "lotka_lyapunov",
    "holling2_lyapunov",
    "for_model",
    "lyapunov_value",
    "dissipation",
    "ode_integrate",
    "trace_from_trajectory",
    "final_zone_error",
]

QUAD_ABS_TOL = 1e-10  # keeps quadrature noise far below monotonicity tolerances


@dataclass(frozen=True)
class LyapunovFn:
    """Convex functional on O = {0 < u < 1, v > 0}, minimized (= 0) at the
    coexistence state, with explicit gradient."""

    name: str
    phi: Callable
    grad: Callable
    u_star: float
    v_star: float


@dataclass(frozen=True)
class LyapunovTrace:
    source: str  # "ODE" or e.g. "PDE_sup_ball(0.5)"
    times: np.ndarray
    values: np.ndarray


def _require_interior(u: float, v: float):
    if not (0.0 < u < 1.0 and v > 0.0):
        raise DomainError(f"(u, v) = ({u}, {v}) outside the open region 0<u<1, v>0")


def lotka_lyapunov(model: KineticModel) -> LyapunovFn:
    """mu*(u - u* - u*ln(u/u*)) + (v - v* - v*ln(v/v*)); its dissipation
    along the kinetics is -mu*(u - u*)^2."""
    if model.name != "lotka":
        raise LyapunovValidityError(f"lotka Lyapunov function requested for model {model.name!r}")
    mu = model.params["mu"]
    u_star, v_star = equilibrium(model)

    def phi(u, v):
        return mu * (u - u_star - u_star * math.log(u / u_star)) + (
            v - v_star - v_star * math.log(v / v_star)
        )

    def grad(u, v):
        return mu * (u - u_star) / u, (v - v_star) / v

    return LyapunovFn("lotka", phi, grad, u_star, v_star)


def holling2_lyapunov(model: KineticModel) -> LyapunovFn:
    """Capture-rate-weighted prey integral plus the usual predator term.

    Only valid for n = 1 and b >= m*v*: outside that parameter region the
    dissipation is not sign-definite and construction is refused.
    """
    if model.name != "holling2":
        raise LyapunovValidityError(f"holling2 Lyapunov function requested for model {model.name!r}")
    p = model.params
    if p.get("n", 1.0) != 1.0:
        raise LyapunovValidityError("holling2 Lyapunov function is only established for n = 1")
    m, b, mu = p["m"], p["b"], p["mu"]
    u_star, v_star = equilibrium(model)
    if b < m * v_star:
        raise LyapunovValidityError(
            f"needs b >= m*v* for nonpositive dissipation (b={b:g}, m*v*={m * v_star:g})"
        )

    def capture(x):
        return m * x / (b + x)

    cap_star = capture(u_star)

    def phi(u, v):
        prey, _ = quad(
            lambda xi: mu * (capture(xi) - cap_star) / capture(xi),
            u_star,
            u,
            epsabs=QUAD_ABS_TOL,
            epsrel=1e-12,
            limit=200,
        )
        return prey + (v - v_star - v_star * math.log(v / v_star))

    def grad(u, v):
        return mu * (capture(u) - cap_star) / capture(u), (v - v_star) / v

    return LyapunovFn("holling2", phi, grad, u_star, v_star)


_BUILDERS = {"lotka": lotka_lyapunov, "holling2": holling2_lyapunov}


def for_model(model: KineticModel) -> LyapunovFn:
    try:
        return _BUILDERS[model.name](model)
    except KeyError:
        raise LyapunovValidityError(
            f"no Lyapunov construction available for model {model.name!r}"
        ) from None


def lyapunov_value(fn: LyapunovFn, u: float, v: float) -> float:
    _require_interior(u, v)
    return float(fn.phi(u, v))


def dissipation(model: KineticModel, fn: LyapunovFn, u: float, v: float) -> float:
    """Inner product of the kinetic vector field with grad(phi) at (u, v)."""
    _require_interior(u, v)
    gu, gv = fn.grad(u, v)
    return float(u * model.F(u, v) * gu + v * model.G(u, v) * gv)


def ode_integrate(
    model: KineticModel,
    u0: float,
    v0: float,
    T: float,
    dt: float = 1e-2,
    stride: int = 10,
) -> np.ndarray:
    """Classic RK4 for the kinetic system; rows (t, u, v) every `stride`
    steps.  A trajectory that leaves the open region numerically is clamped
    back (warned once) and integration continues."""
    if not (0.0 < u0 < 1.0 and v0 > 0.0):
        raise DomainError(f"initial point ({u0}, {v0}) outside 0<u<1, v>0")
    if dt > 1e-2 * (1 + 1e-12):
        raise DomainError("dt must be <= 1e-2")
    if stride < 10:
        raise DomainError("record stride must be >= 10 steps")
    n = max(1, int(math.ceil(T / dt - 1e-12)))
    dt = T / n

    def rhs(u, v):
        return u * float(model.F(u, v)), v * float(model.G(u, v))

    rows = [(0.0, u0, v0)]
    u, v = u0, v0
    warned = False
    for k in range(1, n + 1):
        du1, dv1 = rhs(u, v)
        du2, dv2 = rhs(u + 0.5 * dt * du1, v + 0.5 * dt * dv1)
        du3, dv3 = rhs(u + 0.5 * dt * du2, v + 0.5 * dt * dv2)
        du4, dv4 = rhs(u + dt * du3, v + dt * dv3)
        u = u + (dt / 6.0) * (du1 + 2.0 * (du2 + du3) + du4)
        v = v + (dt / 6.0) * (dv1 + 2.0 * (dv2 + dv3) + dv4)
        if not (math.isfinite(u) and math.isfinite(v)):
            raise NonFiniteState(f"kinetic trajectory became non-finite at t={k * dt:g}")
        if not (0.0 < u < 1.0 and v > 0.0):
            if not warned:
                warnings.warn(
                    f"trajectory left the open region at t={k * dt:g}; clamping",
                    BoundaryExitWarning,
                )
                warned = True
            u = min(max(u, 1e-300), 1.0)
            v = max(v, 1e-300)
        if k % stride == 0 or k == n:
            rows.append((k * dt, u, v))
    return np.asarray(rows)


def trace_from_trajectory(fn: LyapunovFn, trajectory: np.ndarray, source: str = "ODE") -> LyapunovTrace:
    values = np.array([fn.phi(u, v) for _, u, v in trajectory])
    return LyapunovTrace(source=source, times=trajectory[:, 0].copy(), values=values)


def final_zone_error(snapshot: "SimState", model: KineticModel, c: float) -> float:
    """sup over |x| <= c*t of |u - u*| + |v - v*| on one snapshot.

    The convergence statement this operationalizes is established for
    d = 1; other diffusivities get the number anyway, with a warning that
    no theory backs it.
    """
    t = snapshot.t
    if t <= 0:
        raise DomainError("final-zone error needs a snapshot at positive time")
    dom = snapshot.domain
    if c < 0 or c * t > dom.length:
        raise DomainError(f"ball radius c*t = {c * t:g} outside the domain")
    if model.d != 1.0:
        warnings.warn(
            f"final-zone convergence is only established for d = 1 (model has d={model.d:g})",
            TheoremScopeWarning,
        )
    u_star, v_star = equilibrium(model)
    mask = np.abs(dom.grid()) <= c * t
    err = np.abs(snapshot.u[mask] - u_star) + np.abs(snapshot.v[mask] - v_star)
    return float(err.max())
