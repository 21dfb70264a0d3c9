"""Majorization-minimization solver for composite problems
f(x) = g(F(x)) + h(x), with higher-order regularized Taylor surrogates,
stationarity certificates, rate analysis, and a benchmark CLI.
"""

__version__ = "0.1.0"

from .certify import (
    CertificateRecord,
    RateFit,
    certificate_sweep,
    check_assumption2,
    check_assumption3,
    classify_regime,
    fit_rate,
    proximal_certificate,
    recurrence_bound_check,
)
from .driver import IterateTrace, SolverConfig, descent_margin, run
from .problem import (
    CompositeValue,
    InnerOracle,
    OuterFunction,
    ProblemSpec,
    SimpleTerm,
    evaluate,
    registry_lookup,
    registry_names,
    stationarity_measure,
    subgradient_generators,
)
from .subsolver import (
    SmoothingSchedule,
    SubproblemResult,
    solve_coordmax_smoothed,
    solve_identity_p1,
    solve_identity_p2_cubic,
    verify_descent,
)
from .surrogate import (
    ErrorBoundReport,
    SurrogateModel,
    build_proximal,
    build_taylor,
    certify,
    check_model_convexity,
)

__all__ = [
    "CertificateRecord",
    "CompositeValue",
    "ErrorBoundReport",
    "InnerOracle",
    "IterateTrace",
    "OuterFunction",
    "ProblemSpec",
    "RateFit",
    "SimpleTerm",
    "SmoothingSchedule",
    "SolverConfig",
    "SubproblemResult",
    "SurrogateModel",
    "build_proximal",
    "build_taylor",
    "certify",
    "certificate_sweep",
    "check_assumption2",
    "check_assumption3",
    "check_model_convexity",
    "classify_regime",
    "descent_margin",
    "evaluate",
    "fit_rate",
    "proximal_certificate",
    "recurrence_bound_check",
    "registry_lookup",
    "registry_names",
    "run",
    "solve_coordmax_smoothed",
    "solve_identity_p1",
    "solve_identity_p2_cubic",
    "stationarity_measure",
    "subgradient_generators",
    "verify_descent",
]
