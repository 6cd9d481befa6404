"""Successful-computation probability of two-user uplink-NOMA mobile edge computing.

Closed-form evaluation, closed-form optimal offloading/power allocation, and
independent brute-force checks (Monte Carlo channel sampling, grid search).
"""
from .analytic import (
    RateThresholds,
    closed_form_ps,
    gamma_star,
    log_ps_given_thresholds,
    ps_at_optimum,
    ps_given_thresholds,
    thresholds,
)
from .errors import (
    BracketFailure,
    ConfigError,
    DegeneratePlan,
    InfeasibleDeadline,
    LocalComputationSuffices,
    NoRootInUnitInterval,
    NomaMecError,
    SolverDegenerate,
    SolverError,
)
from .model import (
    ChannelRealization,
    NetworkConfig,
    OffloadingPlan,
    achievable_bits,
    execution_times,
    sinr_user_a,
    snr_user_b,
    time_feasible,
)
from .montecarlo import PsEstimate, estimate_event, estimate_ps, sample_channel
from .optimizer import (
    CaseTag,
    CubicCoefficients,
    LambdaSolution,
    bisection_lambda,
    grid_lambda,
    optimal_plan,
    required_rho,
    solve_stationarity,
    stationarity_xi,
    theorem1_allocation,
    theorem1_plan,
    theorem2_lambda,
)
from .schemes import MonteCarlo, SchemeKind, SchemeSpec, fixed_offload, scheme_plan, scheme_ps

__version__ = "0.1.0"
