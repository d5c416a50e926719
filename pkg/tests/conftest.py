"""Shared fixtures: the reference simulation runs are expensive, so they are
computed once per session and shared between the unit tests and the
acceptance suite."""

import pytest
from hypothesis import settings

import preyspread as ps

settings.register_profile("deterministic", derandomize=True)
settings.load_profile("deterministic")

P_SLOW = {"a": 1.5, "b": 1.0, "mu": 2.0}
P_FAST = {"a": 1.0, "b": 1.0, "mu": 3.0}
P_HOLLING = {"a": 1.0, "b": 2.0, "m": 1.0, "mu": 4.0}


def reference_run(model_name, params, **overrides):
    kwargs = dict(
        domain=ps.Domain("line", 600.0, 0.25),
        u_amp=1.0,
        v_amp=0.5,
        u_radius=5.0,
        v_radius=5.0,
        T=200.0,
        snapshot_times=(50.0, 100.0, 150.0, 200.0),
    )
    kwargs.update(overrides)
    config = ps.SimConfig(model_name, params, 1.0, **kwargs)
    return ps.run_simulation(config)


@pytest.fixture(scope="session")
def run_pslow():
    return reference_run("lotka", P_SLOW)


@pytest.fixture(scope="session")
def run_pfast():
    return reference_run("lotka", P_FAST)


@pytest.fixture(scope="session")
def run_pholling():
    return reference_run("holling2", P_HOLLING)


@pytest.fixture(scope="session")
def run_scalar():
    return reference_run("lotka", P_SLOW, v_amp=0.0, snapshot_times=(100.0, 150.0, 200.0))


@pytest.fixture(scope="session")
def run_hair():
    return reference_run(
        "lotka",
        P_SLOW,
        domain=ps.Domain("line", 400.0, 0.25),
        u_amp=1e-3,
        v_amp=1e-3,
        u_radius=1.0,
        v_radius=1.0,
        T=150.0,
        snapshot_times=(150.0,),
    )
