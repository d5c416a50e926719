import numpy as np
import pytest
from scipy.integrate import quad

import preyspread as ps
from preyspread.errors import (
    BoundaryExitWarning,
    DomainError,
    LyapunovValidityError,
    TheoremScopeWarning,
)
from preyspread.lyapunov import trace_from_trajectory

PSLOW = dict(a=1.5, b=1.0, mu=2.0)
PHOLL = dict(a=1.0, b=2.0, m=1.0, mu=4.0)


def quad_phi_lotka(model, u, v):
    """Quadrature oracle for the Lotka functional, independent of the
    closed form used by the implementation."""
    mu = model.params["mu"]
    us, vs = ps.equilibrium(model)
    t1 = mu * quad(lambda xi: (xi - us) / xi, us, u, epsabs=1e-13)[0]
    t2 = quad(lambda eta: (eta - vs) / eta, vs, v, epsabs=1e-13)[0]
    return t1 + t2


class TestValues:
    def test_zero_at_equilibrium(self):
        for params, factory in ((PSLOW, ps.lotka), (PHOLL, ps.holling2)):
            model = factory(**params)
            fn = ps.for_model(model)
            us, vs = ps.equilibrium(model)
            assert abs(ps.lyapunov_value(fn, us, vs)) < 1e-9

    def test_lotka_closed_form_vs_quadrature(self):
        model = ps.lotka(**PSLOW)
        fn = ps.for_model(model)
        val = ps.lyapunov_value(fn, 0.5, 0.5)
        assert val == pytest.approx(quad_phi_lotka(model, 0.5, 0.5), abs=1e-10)
        assert val == pytest.approx(0.18491086702226, abs=1e-10)

    def test_positive_away_from_equilibrium(self):
        for params, factory in ((PSLOW, ps.lotka), (PHOLL, ps.holling2)):
            model = factory(**params)
            fn = ps.for_model(model)
            us, vs = ps.equilibrium(model)
            for u in np.linspace(0.05, 0.95, 7):
                for v in np.linspace(0.05, 4.0 * vs, 7):
                    val = ps.lyapunov_value(fn, float(u), float(v))
                    if abs(u - us) + abs(v - vs) > 1e-10:
                        assert val > 0.0

    def test_domain_guard(self):
        fn = ps.for_model(ps.lotka(**PSLOW))
        for bad in ((0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (-0.1, 0.2)):
            with pytest.raises(DomainError):
                ps.lyapunov_value(fn, *bad)


class TestDissipation:
    def test_lotka_equals_negative_quadratic(self):
        # along the kinetics the Lotka functional dissipates at exactly
        # -mu*(u - u*)^2, independent of v
        model = ps.lotka(**PSLOW)
        fn = ps.for_model(model)
        assert ps.dissipation(model, fn, 0.5, 0.5) == pytest.approx(-0.125, abs=1e-12)
        for u in (0.1, 0.6, 0.9):
            for v in (0.05, 0.25, 1.7):
                expected = -2.0 * (u - 0.75) ** 2
                assert ps.dissipation(model, fn, u, v) == pytest.approx(expected, abs=1e-12)

    def test_zero_at_equilibrium(self):
        for params, factory in ((PSLOW, ps.lotka), (PHOLL, ps.holling2)):
            model = factory(**params)
            fn = ps.for_model(model)
            us, vs = ps.equilibrium(model)
            assert abs(ps.dissipation(model, fn, us, vs)) < 1e-12

    def test_holling_closed_form_and_fd_oracle(self):
        model = ps.holling2(**PHOLL)
        fn = ps.for_model(model)
        m, b, mu = 1.0, 2.0, 4.0
        us, vs = ps.equilibrium(model)
        cap = lambda u: m * u / (b + u)
        u0, v0 = 0.9, 0.5
        expected = (mu / m) * (cap(u0) - cap(us)) * ((1 - u0) * (b + u0) - m * vs)
        got = ps.dissipation(model, fn, u0, v0)
        assert got == pytest.approx(expected, abs=1e-12)
        assert got == pytest.approx(-0.14455938697, abs=1e-9)
        # finite-difference gradient oracle
        h = 1e-6
        du = (fn.phi(u0 + h, v0) - fn.phi(u0 - h, v0)) / (2 * h)
        dv = (fn.phi(u0, v0 + h) - fn.phi(u0, v0 - h)) / (2 * h)
        fd = u0 * model.F(u0, v0) * du + v0 * model.G(u0, v0) * dv
        assert got == pytest.approx(fd, abs=1e-7)

    @pytest.mark.parametrize("params,factory", [
        (PSLOW, ps.lotka),
        (dict(a=1.0, b=1.0, mu=3.0), ps.lotka),
        (dict(a=0.8, b=2.5, mu=1.0), ps.lotka),
        (PHOLL, ps.holling2),
    ])
    def test_nonpositive_on_grid(self, params, factory):
        model = factory(**params)
        fn = ps.for_model(model)
        _, vs = ps.equilibrium(model)
        for u in np.linspace(1e-3, 1 - 1e-3, 50):
            for v in np.linspace(1e-3, 4.0 * vs, 50):
                assert ps.dissipation(model, fn, float(u), float(v)) <= 1e-12

    def test_grad_matches_finite_differences(self):
        for params, factory in ((PSLOW, ps.lotka), (PHOLL, ps.holling2)):
            model = factory(**params)
            fn = ps.for_model(model)
            h = 1e-6
            for u in np.linspace(0.08, 0.92, 20):
                for v in np.linspace(0.08, 2.0, 20):
                    gu, gv = fn.grad(u, v)
                    fdu = (fn.phi(u + h, v) - fn.phi(u - h, v)) / (2 * h)
                    fdv = (fn.phi(u, v + h) - fn.phi(u, v - h)) / (2 * h)
                    assert gu == pytest.approx(fdu, rel=1e-6, abs=1e-8)
                    assert gv == pytest.approx(fdv, rel=1e-6, abs=1e-8)


class TestValidity:
    def test_holling_validity_condition(self):
        # b = 0.5 gives v* = 5/9 > b/m, violating the dissipation condition
        with pytest.raises(LyapunovValidityError):
            ps.for_model(ps.holling2(a=1.0, b=0.5, m=1.0, mu=4.0))

    def test_holling_general_n_refused(self):
        with pytest.raises(LyapunovValidityError):
            ps.for_model(ps.holling2(n=2.0))

    def test_unknown_model_refused(self):
        from preyspread.models import KineticModel

        generic = KineticModel("generic", 1.0, F=lambda u, v: 1 - u - v, G=lambda u, v: u - 0.5)
        with pytest.raises(LyapunovValidityError):
            ps.for_model(generic)


class TestOdeIntegrate:
    def test_equilibrium_is_stationary(self):
        model = ps.lotka(**PSLOW)
        us, vs = ps.equilibrium(model)
        traj = ps.ode_integrate(model, us, vs, T=10.0)
        assert np.abs(traj[:, 1] - us).max() < 1e-12
        assert np.abs(traj[:, 2] - vs).max() < 1e-12

    def test_convergence_to_equilibrium(self):
        model = ps.lotka(**PSLOW)
        traj = ps.ode_integrate(model, 0.5, 0.5, T=200.0)
        t, u, v = traj[-1]
        assert t == pytest.approx(200.0)
        assert abs(u - 0.75) + abs(v - 0.25) < 1e-4

    def test_preconditions(self):
        model = ps.lotka(**PSLOW)
        with pytest.raises(DomainError):
            ps.ode_integrate(model, 0.5, 0.0, T=1.0)  # v = 0 not in the open region
        with pytest.raises(DomainError):
            ps.ode_integrate(model, 0.5, 0.5, T=1.0, dt=0.1)

    def test_phi_nonincreasing_along_trajectory(self):
        model = ps.lotka(**PSLOW)
        fn = ps.for_model(model)
        traj = ps.ode_integrate(model, 0.2, 1.8, T=100.0)
        trace = trace_from_trajectory(fn, traj)
        assert trace.source == "ODE"
        assert (np.diff(trace.values) <= 1e-8).all()

    def test_chain_rule_identity(self):
        # d(phi)/dt along the flow equals the dissipation; check by central
        # differencing the recorded trace (error O(h^2), h = record spacing)
        model = ps.lotka(**PSLOW)
        fn = ps.for_model(model)
        traj = ps.ode_integrate(model, 0.4, 0.6, T=5.0, dt=1e-3, stride=10)
        phis = np.array([fn.phi(u, v) for _, u, v in traj])
        ts = traj[:, 0]
        h = ts[1] - ts[0]
        for k in range(1, len(ts) - 1, 25):
            dphi = (phis[k + 1] - phis[k - 1]) / (2 * h)
            J = ps.dissipation(model, fn, traj[k, 1], traj[k, 2])
            assert dphi == pytest.approx(J, abs=5e-4, rel=1e-3)

    def test_boundary_exit_warns_and_continues(self):
        # a stiff logistic rate overshoots the carrying capacity within one
        # step, leaving the open region numerically
        from preyspread.models import KineticModel

        model = KineticModel("stiff", 1.0, F=lambda u, v: 500.0 * (1.0 - u), G=lambda u, v: -1.0)
        with pytest.warns(BoundaryExitWarning):
            traj = ps.ode_integrate(model, 0.2, 1.0, T=2.0, dt=1e-2)
        assert np.isfinite(traj).all()
        assert traj[:, 1].max() <= 1.0


class TestFinalZoneError:
    def _snap(self, u, v, t=200.0, d_model=None):
        dom = ps.Domain("line", 300.0, 0.5)
        n = dom.n_points
        return ps.SimState(t, np.full(n, u), np.full(n, v), dom)

    def test_zero_at_equilibrium_snapshot(self):
        model = ps.lotka(**PSLOW)
        assert ps.final_zone_error(self._snap(0.75, 0.25), model, 0.5) == 0.0

    def test_prey_only_snapshot(self):
        model = ps.lotka(**PSLOW)
        assert ps.final_zone_error(self._snap(1.0, 0.0), model, 0.5) == pytest.approx(0.5)

    def test_warns_for_other_diffusivities(self):
        model = ps.lotka(d=2.0, **PSLOW)
        with pytest.warns(TheoremScopeWarning):
            ps.final_zone_error(self._snap(0.75, 0.25), model, 0.5)

    def test_ball_must_fit_domain(self):
        model = ps.lotka(**PSLOW)
        with pytest.raises(DomainError):
            ps.final_zone_error(self._snap(0.75, 0.25), model, 2.0)
