import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import preyspread as ps
from preyspread.errors import DomainError
from preyspread.models import KineticModel


def test_slow_predator_preset():
    rep = ps.speed_report(ps.lotka(a=1.5, b=1.0, mu=2.0, d=1.0))
    assert rep.c_star == 2.0
    assert abs(rep.c_star_star - 2.0 * math.sqrt(0.5)) < 1e-15
    assert rep.regime == "SlowPredator"
    assert rep.kpp_flag and rep.c_star_interpretation == "exact"


def test_fast_predator_preset():
    rep = ps.speed_report(ps.lotka(a=1.0, b=1.0, mu=3.0, d=1.0))
    assert rep.c_star == 2.0
    assert abs(rep.c_star_star - 2.0 * math.sqrt(2.0)) < 1e-15
    assert rep.regime == "FastPredator"


def test_equal_speeds_classified_fast():
    rep = ps.speed_report(ps.lotka(a=1.0, b=1.0, mu=2.0, d=1.0))
    assert rep.c_star == rep.c_star_star == 2.0
    assert rep.regime == "FastPredator"


def test_speeds_undefined_raises():
    dying_prey = KineticModel("bad", 1.0, F=lambda u, v: -u - v, G=lambda u, v: u - 0.5)
    with pytest.raises(DomainError):
        ps.speed_report(dying_prey)
    weak_predator = ps.holling2(a=1.0, b=2.0, m=1.0, mu=2.0)  # G(1,0) < 0
    with pytest.raises(DomainError):
        ps.speed_report(weak_predator)


def test_non_kpp_prey_flagged():
    # growth rate peaks away from zero density, so 2*sqrt(d*F(0,0)) is only
    # a lower bound for the true prey speed
    model = KineticModel(
        "bump", 1.0, F=lambda u, v: (1.0 - u) * (1.0 + 2.0 * u) - v, G=lambda u, v: u - 0.5
    )
    rep = ps.speed_report(model)
    assert not rep.kpp_flag
    assert rep.c_star_interpretation == "linear speed lower bound"
    assert rep.to_dict()["c_star_interpretation"] == "linear speed lower bound"


@settings(max_examples=30, deadline=None)
@given(s=st.floats(0.25, 4.0), a=st.floats(1.1, 4.0), b=st.floats(0.2, 3.0), mu_excess=st.floats(0.1, 3.0))
def test_scaling_law(s, a, b, mu_excess):
    # c_star scales with sqrt of the diffusivity factor; c_star_star ignores d
    mu = (a + mu_excess) / b
    base = ps.speed_report(ps.lotka(a=a, b=b, mu=mu, d=1.0))
    scaled = ps.speed_report(ps.lotka(a=a, b=b, mu=mu, d=s * s))
    assert scaled.c_star == pytest.approx(s * base.c_star, rel=1e-12)
    assert scaled.c_star_star == base.c_star_star


class TestSupersolutionBound:
    def test_zero_exponent(self):
        assert float(ps.supersolution_v_bound(ps.lotka(), 1.0, 0.0, 0.0)) == 1.0

    def test_on_the_ray(self):
        model = ps.lotka(a=1.5, b=1.0, mu=2.0)
        c2 = ps.speed_report(model).c_star_star
        val = float(ps.supersolution_v_bound(model, 1.0, c2 * 1.0, 1.0))
        assert val == pytest.approx(1.0, rel=1e-12)

    def test_ahead_of_the_ray(self):
        model = ps.lotka(a=1.5, b=1.0, mu=2.0)
        val = float(ps.supersolution_v_bound(model, 1.0, 2.0, 0.0))
        assert val == pytest.approx(math.exp(-2.0 * math.sqrt(0.5)), rel=1e-14)

    def test_array_input_and_log_consistency(self):
        from preyspread.speeds import supersolution_log_bound

        model = ps.lotka(a=1.5, b=1.0, mu=2.0)
        x = np.linspace(0.0, 50.0, 11)
        vals = ps.supersolution_v_bound(model, 2.5, x, 3.0)
        logs = supersolution_log_bound(model, 2.5, x, 3.0)
        assert np.allclose(np.log(vals), logs, rtol=0, atol=1e-12)

    def test_bad_amplitude(self):
        with pytest.raises(DomainError):
            ps.supersolution_v_bound(ps.lotka(), 0.0, 1.0, 1.0)
