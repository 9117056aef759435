"""urnfield: multi-colour interacting urns on complete graphs.

Exact stochastic simulation of the ball process, fixed-point analysis of
the expected placement map, the mean-field ODE with per-step simplex
renormalization, and the network-energy descent check.
"""

from .model import (
    ModelParams,
    ReinforcementFunction,
    SimplexPoint,
    UrnModelError,
    SimplexError,
    IntegrationError,
    NumericsError,
    ValidationReport,
    check_h2,
    ensure_valid,
    from_flat,
    logistic,
    make_reinforcement,
    random_simplex_values,
    to_flat,
    validate_params,
)
from .pi_map import (
    is_contraction_regime,
    l1_norm_bound,
    max_column_l1,
    pi,
    pi_jacobian,
    spectral_radius,
)
from .fixed_points import (
    FixedPointRecord,
    MultiStartResult,
    Example1Report,
    iterate_to_fixed_point,
    multi_start_search,
    newton_solve,
    permutation_orbit,
    verify_example1,
)
from .dynamics import (
    HopfieldSystem,
    Trajectory,
    build_hopfield,
    field,
    hopfield_field,
    hopfield_index,
    integrate,
    integrate_batch,
    lyapunov,
    lyapunov_on_simplex,
    psi,
)
from .urn import (
    SimRun,
    UrnState,
    conditional_mean_xi,
    enumerate_mean_xi,
    gamma,
    proportions,
    run,
    run_batch,
    sa_decomposition_check,
    step,
)

__version__ = "0.1.0"
