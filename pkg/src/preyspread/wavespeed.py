"""Traveling-wave machinery for scalar monostable reactions.

The profile of a planar wave with speed c solves the phase-plane problem
``d q'' + c q' + q f(q) = 0``.  Shooting from the top state and watching
whether the trajectory crosses zero (speed too small) or decays into the
origin (wave exists) turns minimal-speed computation into a monotone
feasibility bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _accel
from ._accel import fallback
from .errors import (
    BisectionBracketFailure,
    DomainError,
    MonotonicityViolation,
    ShootInconclusive,
    StepTooLarge,
)
from .models import KineticModel

__all__ = [
    "ShootOutcome",
    "EpsilonCurve",
    "shoot_profile",
    "minimal_wave_speed",
    "p_epsilon",
    "c_epsilon_curve",
]

_KIND_NAMES = {
    fallback.HITS_ZERO: "HitsZero",
    fallback.TURNS_BACK: "TurnsBack",
    fallback.WAVE_LIKE: "WaveLike",
}


@dataclass(frozen=True)
class ShootOutcome:
    """Classified trajectory of one profile shoot.

    ``kind`` is one of "HitsZero" (crossed zero at position ``b`` with the
    profile decreasing up to the crossing), "TurnsBack" (q' turned positive
    while q > 0) or "WaveLike" (stayed in (0, alpha] and converged to the
    origin by z_max).  ``profile`` holds sampled (z, q, q') rows.
    """

    kind: str
    b: Optional[float]
    profile: np.ndarray


@dataclass(frozen=True)
class EpsilonCurve:
    """Family of (eps, p_eps, c_eps): top state and minimal speed of the
    prey equation with the predator density frozen at eps."""

    points: tuple

    @property
    def eps(self):
        return np.array([p[0] for p in self.points])

    @property
    def p(self):
        return np.array([p[1] for p in self.points])

    @property
    def c(self):
        return np.array([p[2] for p in self.points])


def _horner_closure(coeffs) -> Callable:
    cs = tuple(float(c) for c in coeffs)

    def f(q):
        r = cs[-1]
        for a in reversed(cs[:-1]):
            r = r * q + a
        return r

    return f


def _lower_to_poly(f: Callable, max_degree: int = 4):
    """Try to represent f exactly as a low-degree polynomial.

    Newton divided differences on binary-friendly nodes, verified against f
    on an independent sample covering the reachable range |q| <= 2.2.
    Returns monomial coefficients (ascending) or None; None routes the
    shoot to the Python callable path.
    """
    nodes = [0.0, 0.5, 1.0, 1.5, 2.0]
    # probing deliberately evaluates f outside its comfort zone; failures
    # and non-finite values just mean "not a polynomial"
    try:
        with np.errstate(all="ignore"):
            vals = [float(f(x)) for x in nodes]
            check_x = [float(x) for x in np.linspace(-2.2, 2.2, 45)]
            check_y = [float(f(x)) for x in check_x]
    except Exception:
        return None
    if not all(map(math.isfinite, vals + check_y)):
        return None
    scale = max(1.0, max(abs(y) for y in check_y))
    for deg in range(1, max_degree + 1):
        xs, ys = nodes[: deg + 1], vals[: deg + 1]
        # divided-difference table -> Newton coefficients
        dd = list(ys)
        for j in range(1, deg + 1):
            for i in range(deg, j - 1, -1):
                dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j])
        # expand Newton form to monomial coefficients
        coeffs = [0.0] * (deg + 1)
        for i in range(deg, -1, -1):
            # multiply current poly by (x - xs[i]) and add dd[i]
            new = [0.0] * (deg + 1)
            for k in range(deg):
                new[k + 1] += coeffs[k]
                new[k] -= xs[i] * coeffs[k]
            new[0] += dd[i]
            coeffs = new
        h = _horner_closure(coeffs)
        if all(abs(h(x) - y) <= 5e-12 * scale for x, y in zip(check_x, check_y)):
            return np.asarray(coeffs, dtype=float)
    return None


def shoot_profile(
    f: Callable,
    d: float,
    c: float,
    alpha: float,
    z_max: Optional[float] = None,
    dz: Optional[float] = None,
    backend: Optional[str] = None,
) -> ShootOutcome:
    """Integrate the profile ODE from (q, q') = (alpha, 0) and classify.

    Fixed-step classic RK4; adaptive stepping is deliberately avoided so
    classifications near the feasibility threshold are reproducible.  The
    step must satisfy dz <= 0.01*sqrt(d).
    """
    if not (0 < alpha < 1):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if c < 0:
        raise DomainError("speed c must be nonnegative")
    if d <= 0:
        raise DomainError("diffusivity must be positive")
    sqrt_d = math.sqrt(d)
    if z_max is None:
        z_max = 200.0 * sqrt_d
    if dz is None:
        dz = 0.01 * sqrt_d
    if dz > 1.0e-2 * sqrt_d * (1 + 1e-12):
        raise DomainError(f"dz={dz:g} too coarse; need dz <= 0.01*sqrt(d) = {0.01 * sqrt_d:g}")

    coeffs = _lower_to_poly(f)
    use_compiled = _accel.resolve(backend) and coeffs is not None
    if backend == "compiled" and coeffs is None:
        raise RuntimeError("compiled shoot kernel requires a polynomial-representable f")

    n_steps = int(math.ceil(z_max / dz - 1e-12))
    stride = max(1, n_steps // 2000)
    if use_compiled:
        kind, b, rec = _accel._core.shoot_poly(coeffs, d, c, alpha, z_max, dz, stride)
    else:
        f_eval = _horner_closure(coeffs) if coeffs is not None else f
        kind, b, rec = fallback.shoot(f_eval, d, c, alpha, z_max, dz, stride)

    if kind == fallback.BLOWUP:
        raise StepTooLarge(
            f"profile blew up (|q| > 2) at c={c:g}, alpha={alpha:g}; reduce dz or check f"
        )
    if kind == fallback.INCONCLUSIVE:
        raise ShootInconclusive(
            f"z_max={z_max:g} reached with |q|+|q'| not converged at c={c:g}, alpha={alpha:g}"
        )
    return ShootOutcome(kind=_KIND_NAMES[kind], b=b, profile=rec)


def _scan_first_root(f: Callable, grid_points: int = 4097) -> float:
    """Smallest root of f in (0, 1]: sign-change scan then bisection."""
    us = np.linspace(0.0, 1.0, grid_points)
    vals = [float(f(u)) for u in us]
    if vals[0] <= 0:
        raise DomainError(f"f(0) = {vals[0]:g} must be positive (monostable structure lost)")
    idx = None
    for i in range(1, grid_points):
        if vals[i] <= 0.0:
            idx = i
            break
    if idx is None:
        raise DomainError("f has no root in (0, 1]; not monostable on [0, 1]")
    if vals[idx] == 0.0:
        return float(us[idx])
    lo, hi = float(us[idx - 1]), float(us[idx])
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if float(f(mid)) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


_ALPHA_LADDER = (1e-3, 1e-4, 1e-5)


def minimal_wave_speed(
    f: Callable,
    d: float,
    tol: float = 1e-3,
    backend: Optional[str] = None,
    return_details: bool = False,
):
    """Minimal speed admitting a decaying wave profile for reaction q*f(q).

    Feasibility bisection on c over [0, 2*sqrt(d*sup f) + 1]: a shoot from
    alpha just below the top state p classifies c as infeasible (HitsZero)
    or feasible (WaveLike).  TurnsBack / inconclusive shoots retry with
    alpha closer to p; feasibility monotonicity in c is audited and any
    violation aborts with a diagnostic.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    p = _scan_first_root(f)
    us = np.linspace(0.0, 1.0, 1025)
    sup_f = max(float(f(u)) for u in us[us <= p])
    c_hi = 2.0 * math.sqrt(d * sup_f) + 1.0

    retries = 0
    history = []
    base_z_max = 200.0 * math.sqrt(d)

    def feasible(c: float) -> bool:
        # alpha retries handle TurnsBack (alpha below the admissible band);
        # horizon extension handles slow decay at speeds far above the
        # threshold, where |q|+|q'| has not converged by the default z_max
        nonlocal retries
        last_exc = None
        for back_off in _ALPHA_LADDER:
            alpha = (1.0 - back_off) * p
            out = None
            for z_mult in (1, 2, 4, 8):
                try:
                    out = shoot_profile(f, d, c, alpha, z_max=base_z_max * z_mult, backend=backend)
                    break
                except ShootInconclusive as exc:
                    last_exc = exc
                    retries += 1
            if out is None:
                continue
            if out.kind == "HitsZero":
                history.append((c, False))
                return False
            if out.kind == "WaveLike":
                history.append((c, True))
                return True
            retries += 1  # TurnsBack
        raise ShootInconclusive(
            f"no classification at c={c:g} after alpha/horizon retries"
        ) from last_exc

    if feasible(0.0):
        raise BisectionBracketFailure("c = 0 already admits a wave-like profile")
    if not feasible(c_hi):
        raise BisectionBracketFailure(f"upper bracket c={c_hi:g} is not wave-like")

    lo, hi = 0.0, c_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid

    worst_no = max(c for c, ok in history if not ok)
    best_yes = min(c for c, ok in history if ok)
    if worst_no >= best_yes:
        raise BisectionBracketFailure(
            f"feasibility not monotone in c: infeasible at {worst_no:g} "
            f"but feasible at {best_yes:g}"
        )

    c_min = 0.5 * (lo + hi)
    if return_details:
        return c_min, {
            "p": p,
            "c_hi": c_hi,
            "alpha_retries": retries,
            "evaluations": len(history),
        }
    return c_min


def p_epsilon(model: KineticModel, eps: float) -> float:
    """Top state of the prey equation with predator density frozen at eps:
    the smallest u with F(u, eps) = 0."""
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    f0 = float(model.F(0.0, eps))
    if f0 <= 0:
        raise DomainError(f"F(0, eps) = {f0:g} <= 0: eps too large for a monostable reduction")
    return _scan_first_root(lambda u: model.F(u, eps))


def c_epsilon_curve(
    model: KineticModel,
    eps_list,
    tol: float = 1e-3,
    backend: Optional[str] = None,
) -> EpsilonCurve:
    """Minimal wave speed and top state for each frozen predator density.

    Both families must be nonincreasing in eps; a violation beyond
    numerical slack aborts, since downstream verification relies on it.
    """
    pts = []
    for eps in sorted(float(e) for e in eps_list):
        p = p_epsilon(model, eps)
        c = minimal_wave_speed(lambda q: model.F(q, eps), model.d, tol=tol, backend=backend)
        pts.append((eps, p, c))
    for (e1, p1, c1), (e2, p2, c2) in zip(pts, pts[1:]):
        if p2 > p1 + 1e-9:
            raise MonotonicityViolation(f"p_eps increased from {p1!r} (eps={e1}) to {p2!r} (eps={e2})")
        if c2 > c1 + 2.0 * tol:
            raise MonotonicityViolation(f"c_eps increased from {c1!r} (eps={e1}) to {c2!r} (eps={e2})")
    return EpsilonCurve(points=tuple(pts))
