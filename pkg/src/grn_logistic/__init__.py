"""Logistic reformulation of a delay-coupled two-gene regulatory network.

Sigmoid calculus and Hill-to-logistic matching, equilibria, delay-free
stability, delay-induced Hopf points, Lipschitz bounds, RK4 simulation of
the delay system and least-squares fitting.
"""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    ParameterRangeWarning,
    SimulationError,
    UnitMismatchError,
    UnsupportedConfigurationError,
)
from .sigmoid import (
    Direction,
    HillParams,
    SigmoidParams,
    WeightedMatchResult,
    hill,
    hill_deriv,
    logistic,
    logistic_deriv,
    logistic_inverse,
    logistic_second_deriv,
    match_steepness,
    match_weighted_basal_slope,
    match_weighted_custom_threshold,
    rescale_weight,
)
from .model import (
    CoreParams,
    DelayConfig,
    DelayedState,
    Formulation,
    LogisticModelParams,
    ModelConfig,
    State,
    WeightedModelParams,
    get_preset,
    jacobian,
    load_config,
    rhs,
    save_config,
)
from .equilibrium import EquilibriumReport, solve_equilibrium
from .stability import StabilityReport, classify, trace_negativity_certificate
from .hopf import HopfCoefficients, HopfPoint, find_hopf, higher_order_taus, hopf_coefficients
from .lipschitz import DomainBox, LipschitzReport, lipschitz, rho_constant
from .dde_sim import HistorySpec, Trajectory, integrate, oscillation_metrics
from .param_fit import FitResult, TimeSeries, fit
from .report import ComparisonReport, run_full_analysis
