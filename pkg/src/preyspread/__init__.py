"""preyspread: spreading fronts of two-species reaction-diffusion systems.

Library layout
--------------
models      kinetics presets, hypothesis checks, dissipativity, equilibrium
speeds      the two invasion speeds and regime classification
wavespeed   traveling-wave profile shooting and minimal-speed search
pde         explicit finite-difference initial-value solver
fronttrack  front positions, empirical speeds, zone labels, verification
lyapunov    Lyapunov functionals, kinetic ODE runs, final-zone metric
cli         command-line front end (`preyspread <subcommand>`)

Hot kernels run on a compiled extension when available, with a numpy /
pure-Python fallback selected at import (see preyspread._accel).
"""

from ._accel import HAVE_EXT, backend_name
from .models import (
    KineticModel,
    check_assumptions,
    check_weak_dissipativity,
    compute_m_star,
    equilibrium,
    eval_kinetics,
    holling2,
    lotka,
    preset,
)
from .speeds import SpeedReport, speed_report, supersolution_v_bound
from .wavespeed import (
    EpsilonCurve,
    ShootOutcome,
    c_epsilon_curve,
    minimal_wave_speed,
    p_epsilon,
    shoot_profile,
)
from .pde import (
    Domain,
    SimConfig,
    SimOutput,
    SimState,
    init_state,
    laplacian,
    run_simulation,
    step,
)
from .fronttrack import (
    FrontTrace,
    SpeedEstimate,
    ZoneProfile,
    estimate_speed,
    front_position,
    verify_spreading,
    zone_profile,
)
from .lyapunov import (
    LyapunovFn,
    LyapunovTrace,
    dissipation,
    final_zone_error,
    for_model,
    lyapunov_value,
    ode_integrate,
)

__version__ = "0.1.0"
