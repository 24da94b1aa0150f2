from pylaplace.errors import (
    LaplaceError,
    ExpressionSyntaxError,
    UnknownIdentifier,
    DomainError,
    BoundaryMaximum,
    NoCriticalPoint,
    AmbiguousMaximum,
    OddLeadingDerivative,
    PositiveLeadingDerivative,
    AllDerivativesVanish,
    ZeroAmplitude,
    NonPositiveArgument,
    UnrepresentableValue,
    DivergentIntegral,
    WindowExceedsInterval,
    NonConvergenceWarning,
    NaNIntegrandWarning,
    HypothesisWarning,
)
from pylaplace.exprlang import parse, evaluate, render, jet_eval, derivative, Expr, Jet
from pylaplace.quadrature import (
    QuadResult,
    adaptive_quad,
    ProblemSpec,
    integrate_scaled,
    ratio_table,
)
from pylaplace.critical import (
    CriticalPoint,
    locate_maximum,
    classify_degeneracy,
    find_critical_point,
)
from pylaplace.asymptotic import (
    LogScaledValue,
    Estimate,
    laplace_estimate,
    log_gamma,
    log_factorial,
    gauss_power_integral,
    stirling_table,
)
from pylaplace.proofmirror import (
    WindowDiagnostics,
    window_epsilon,
    split_integral,
    check_derivative_bracket,
    check_tail_bound,
    surrogate_gap,
    truncated_tail_deficit,
    proof_trace,
    convergence_ladder,
)
from pylaplace.conditions import (
    ConditionReport,
    check_flank_dominance,
    check_integrability,
    check_amplitude,
    check_conditions,
)
