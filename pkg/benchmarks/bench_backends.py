#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy / pure-Python fallback.

Two hot paths are timed:
  * field stepping: Heun steps of the coupled system on a production-size
    line grid (what dominates a spreading run);
  * profile shooting: one full minimal-wave-speed bisection (a serial RK4
    loop that numpy cannot vectorize).

Run:  python benchmarks/bench_backends.py [--steps N]
"""

import argparse
import time

import preyspread as ps
from preyspread import _accel
from preyspread.pde import _Stepper, cfl_limit


def bench_stepping(n_steps: int):
    model = ps.lotka(a=1.5, b=1.0, mu=2.0, d=1.0)
    domain = ps.Domain("line", 600.0, 0.25)
    cfg = ps.SimConfig(
        "lotka", {"a": 1.5, "b": 1.0, "mu": 2.0}, 1.0,
        domain=domain, u_amp=1.0, v_amp=0.5, u_radius=5.0, v_radius=5.0, T=1.0,
    )
    dt = 0.5 * cfl_limit(domain, model.d)
    results = {}
    for backend in ("fallback", "compiled"):
        if backend == "compiled" and not _accel.HAVE_EXT:
            continue
        state = ps.init_state(cfg)
        stepper = _Stepper(model, domain, backend)
        u, v = state.u, state.v
        t0 = time.perf_counter()
        for _ in range(n_steps):
            u, v, _stats = stepper.advance(u, v, dt)
        elapsed = time.perf_counter() - t0
        results[backend] = elapsed
        rate = n_steps * domain.n_points / elapsed
        print(f"  stepping [{backend:9s}]  {elapsed:8.3f} s  "
              f"({rate / 1e6:7.1f} M point-updates/s)")
    return results


def bench_shooting():
    results = {}
    for backend in ("fallback", "compiled"):
        if backend == "compiled" and not _accel.HAVE_EXT:
            continue
        t0 = time.perf_counter()
        c = ps.minimal_wave_speed(lambda q: 1.0 - q, 1.0, backend=backend)
        elapsed = time.perf_counter() - t0
        results[backend] = elapsed
        print(f"  shooting [{backend:9s}]  {elapsed:8.3f} s  (c_min = {c:.6f})")
    return results


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=2000, help="Heun steps to time")
    args = parser.parse_args()

    print(f"active backend at import: {_accel.backend_name()}")
    if not _accel.HAVE_EXT:
        print("compiled extension unavailable; timing fallback only")

    print(f"\nfield stepping ({args.steps} Heun steps, 4801-point grid):")
    step_res = bench_stepping(args.steps)
    print("\nminimal wave speed (full bisection, RK4 shoots):")
    shoot_res = bench_shooting()

    if _accel.HAVE_EXT:
        print("\nspeedups (fallback / compiled):")
        print(f"  stepping: {step_res['fallback'] / step_res['compiled']:5.1f}x")
        print(f"  shooting: {shoot_res['fallback'] / shoot_res['compiled']:5.1f}x")


if __name__ == "__main__":
    main()
