import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import preyspread as ps
from preyspread.errors import DomainError, InsufficientData, NoInteriorEquilibrium
from preyspread.fronttrack import FrontTrace, front_ordering_excess


def make_trace(ts, xs, species="u", theta=0.1):
    tr = FrontTrace(species, theta)
    for t, x in zip(ts, xs):
        tr.append(t, x)
    return tr


class TestFrontPosition:
    def test_step_edge(self):
        dom = ps.Domain("line", 20.0, 0.5)
        field = (np.abs(dom.grid()) <= 10.0).astype(float)
        pos = ps.front_position(field, dom, 0.5)
        assert abs(pos - 10.0) <= 0.5

    def test_exponential_crossing(self):
        dom = ps.Domain("radial", 20.0, 0.1, N=1)
        field = np.exp(-dom.grid())
        pos = ps.front_position(field, dom, math.exp(-3.0))
        assert abs(pos - 3.0) <= 0.1

    def test_absent(self):
        dom = ps.Domain("line", 10.0, 0.5)
        assert ps.front_position(np.zeros(dom.n_points), dom, 0.1) is None

    def test_everywhere_above(self):
        dom = ps.Domain("line", 10.0, 0.5)
        assert ps.front_position(np.ones(dom.n_points), dom, 0.5) == 10.0

    def test_bad_theta(self):
        dom = ps.Domain("line", 10.0, 0.5)
        with pytest.raises(DomainError):
            ps.front_position(np.ones(dom.n_points), dom, 0.0)

    @settings(max_examples=50, deadline=None)
    @given(
        data=st.lists(st.floats(0.0, 1.0), min_size=8, max_size=40),
        t1=st.floats(0.05, 0.9),
        t2=st.floats(0.05, 0.9),
    )
    def test_monotone_in_threshold(self, data, t1, t2):
        th_lo, th_hi = min(t1, t2), max(t1, t2)
        if th_lo == th_hi:
            th_hi = th_lo + 1e-3
        n = 2 * len(data)
        dom = ps.Domain("line", n * 0.25, 0.25)
        field = np.zeros(dom.n_points)
        field[: len(data)] = data
        p_lo = ps.front_position(field, dom, th_lo)
        p_hi = ps.front_position(field, dom, th_hi)
        if p_hi is None:
            return
        assert p_lo is not None
        assert p_lo >= p_hi - dom.dx


class TestEstimateSpeed:
    def test_exact_line(self):
        ts = np.arange(0.0, 200.1, 0.625)
        est = ps.estimate_speed(make_trace(ts, 2.0 * ts), 0.5)
        assert est.slope == pytest.approx(2.0, abs=1e-12)
        assert est.residual_rms == pytest.approx(0.0, abs=1e-10)
        assert est.tail_quotient == pytest.approx(2.0, abs=1e-12)
        assert est.preferred() == est.slope

    def test_logarithmic_drift(self):
        # x(t) = 2t - 1.5*ln(t): the drift biases both estimators below 2,
        # by under 0.6%.  Expected values recomputed here with explicit
        # least-squares sums, independent of the implementation.
        ts = np.arange(0.625, 200.0 + 1e-9, 0.625)
        xs = 2.0 * ts - 1.5 * np.log(ts)
        est = ps.estimate_speed(make_trace(ts, xs), 0.5)

        w = ts >= 0.5 * ts[-1]
        tw, xw = ts[w], xs[w]
        n = len(tw)
        sx, sy = tw.sum(), xw.sum()
        sxx, sxy = (tw * tw).sum(), (tw * xw).sum()
        slope_expected = (n * sxy - sx * sy) / (n * sxx - sx * sx)
        assert est.slope == pytest.approx(slope_expected, rel=1e-9)
        assert abs(est.slope - 2.0) / 2.0 < 0.006
        i_half = int(np.argmin(np.abs(ts - ts[-1] / 2)))
        tail_expected = (xs[-1] - xs[i_half]) / (ts[-1] - ts[i_half])
        assert est.tail_quotient == pytest.approx(tail_expected, rel=1e-12)

    def test_insufficient_data(self):
        with pytest.raises(InsufficientData):
            ps.estimate_speed(make_trace([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]), 0.5)

    def test_absent_entries_skipped(self):
        ts = np.arange(0.0, 100.1, 0.5)
        tr = FrontTrace("v", 0.1)
        for t in ts:
            tr.append(t, None if t < 30 else 1.5 * t)
        est = ps.estimate_speed(tr, 0.5)
        assert est.slope == pytest.approx(1.5, abs=1e-12)

    def test_window_fraction_validation(self):
        tr = make_trace(np.arange(30.0), np.arange(30.0))
        with pytest.raises(DomainError):
            ps.estimate_speed(tr, 0.8)  # window shorter than a third of the run


class TestZoneProfile:
    def _snapshot(self, u_val, v_val, t=100.0):
        dom = ps.Domain("line", 300.0, 0.5)
        n = dom.n_points
        return ps.SimState(t, np.full(n, float(u_val)), np.full(n, float(v_val)), dom)

    def test_saturated_prey_is_intermediate(self):
        model = ps.lotka(a=1.5, b=1.0, mu=2.0)
        zp = ps.zone_profile(self._snapshot(1.0, 0.0), model, [0.0, 0.5, 1.0, 2.0])
        assert zp.labels() == ["Intermediate"] * 4

    def test_vacant_is_leading_edge(self):
        model = ps.lotka(a=1.5, b=1.0, mu=2.0)
        zp = ps.zone_profile(self._snapshot(0.0, 0.0), model, [0.0, 1.0])
        assert zp.labels() == ["LeadingEdge"] * 2

    def test_coexistence_is_final(self):
        model = ps.lotka(a=1.5, b=1.0, mu=2.0)
        zp = ps.zone_profile(self._snapshot(0.75, 0.25), model, [0.0, 1.0])
        assert zp.labels() == ["Final"] * 2

    def test_positivity_form_without_equilibrium(self):
        model = ps.lotka(a=1.5, b=1.0, mu=2.0)
        zp = ps.zone_profile(
            self._snapshot(0.5, 0.5), model, [0.5], use_equilibrium=False
        )
        assert zp.equilibrium is None
        assert zp.labels() == ["Final"]

    def test_unclassified(self):
        model = ps.lotka(a=1.5, b=1.0, mu=2.0)
        zp = ps.zone_profile(self._snapshot(0.5, 0.001), model, [0.5])
        assert zp.labels() == ["Unclassified"]

    def test_equilibrium_errors_propagate_when_requested(self):
        model = ps.lotka(a=3.0, b=1.0, mu=2.0)  # no coexistence state
        snap = self._snapshot(1.0, 0.0)
        with pytest.raises(NoInteriorEquilibrium):
            ps.zone_profile(snap, model, [0.5], use_equilibrium=True)
        zp = ps.zone_profile(snap, model, [0.5], use_equilibrium=False)
        assert zp.labels() == ["Intermediate"]

    def test_ray_outside_domain(self):
        model = ps.lotka(a=1.5, b=1.0, mu=2.0)
        with pytest.raises(DomainError):
            ps.zone_profile(self._snapshot(1.0, 0.0), model, [4.0])


class TestFrontOrdering:
    def test_synthetic_excess(self):
        class FakeOut:
            domain = ps.Domain("line", 10.0, 0.5)

            def trace(self, species, theta):
                tr = FrontTrace(species, theta)
                for t in (1.0, 2.0, 3.0):
                    tr.append(t, 2.0 * t if species == "u" else 2.0 * t + 1.0)
                return tr

        # v leads u by 1.0 = 2 cells at dx = 0.5
        assert front_ordering_excess(FakeOut()) == pytest.approx(2.0)


class TestVerifySpreading:
    def test_short_run_is_indeterminate(self):
        cfg = ps.SimConfig(
            "lotka", {"a": 1.5, "b": 1.0, "mu": 2.0}, 1.0,
            domain=ps.Domain("line", 60.0, 0.25),
            T=5.0, snapshot_times=(2.5, 5.0),
        )
        out = ps.run_simulation(cfg)
        rep = ps.verify_spreading(out)
        assert all(c.status == "indeterminate" for c in rep.checks)
        assert not rep.all_pass

    def test_slow_predator_run_passes(self, run_pslow):
        rep = ps.verify_spreading(run_pslow)
        assert rep.regime == "SlowPredator"
        assert rep.all_pass, [(c.name, c.status, c.measured) for c in rep.checks]
        names = {c.name for c in rep.checks}
        assert "intermediate_zone_labels" in names

    def test_fast_predator_run_passes(self, run_pfast):
        rep = ps.verify_spreading(run_pfast)
        assert rep.regime == "FastPredator"
        assert rep.all_pass, [(c.name, c.status, c.measured) for c in rep.checks]
        # no intermediate zone exists in the fast regime
        assert "intermediate_zone_labels" not in {c.name for c in rep.checks}

    def test_report_dict_shape(self, run_pslow):
        d = ps.verify_spreading(run_pslow).to_dict()
        assert {"regime", "c_star", "c_star_star", "all_pass", "checks", "notes"} <= set(d)

    def test_labels_stable_under_cubic_resampling(self, run_pslow):
        # relabeling from a cubic interpolant must agree with linear
        # sampling away from razor-thin margins
        from scipy.interpolate import CubicSpline
        from preyspread.fronttrack import _zone_label

        model = run_pslow.model
        snap = run_pslow.snapshot_at(200.0)
        x = snap.domain.grid()
        cs_u = CubicSpline(x, snap.u)
        cs_v = CubicSpline(x, snap.v)
        eq = ps.equilibrium(model)
        zp = ps.zone_profile(snap, model, np.linspace(0.0, 2.4, 25))
        for c, u, v, label in zp.samples:
            u3 = float(cs_u(c * snap.t))
            v3 = float(cs_v(c * snap.t))
            if min(abs(u - u3), abs(v - v3)) > 2e-2:
                continue
            assert _zone_label(u3, v3, eq, zp.tol_lead, zp.tol_final) == label
