"""Sparse L^p optimization in fractional Sobolev spaces."""

from ._core import (
    FracOperator,
    Grid,
    HeatTrajectory,
    IterationRecord,
    ObjectiveProblem,
    OperatorKind,
    PsiParams,
    ReactionKind,
    RunResult,
    RunStatus,
    SolverConfig,
    StationarityReport,
    add_gaussian_noise,
    g_eps,
    g_eps_grad,
    integral_stiffness,
    integrate,
    lp_pseudonorm,
    make_interval_grid,
    make_rectangle_grid,
    pairing_bound,
    phi_value,
    psi,
    psi_prime,
    run,
    spectral_operator,
    stationarity_report,
)

__all__ = [
    "FracOperator",
    "Grid",
    "HeatTrajectory",
    "IterationRecord",
    "ObjectiveProblem",
    "OperatorKind",
    "PsiParams",
    "ReactionKind",
    "RunResult",
    "RunStatus",
    "SolverConfig",
    "StationarityReport",
    "add_gaussian_noise",
    "g_eps",
    "g_eps_grad",
    "integral_stiffness",
    "integrate",
    "lp_pseudonorm",
    "make_interval_grid",
    "make_rectangle_grid",
    "pairing_bound",
    "phi_value",
    "psi",
    "psi_prime",
    "run",
    "spectral_operator",
    "stationarity_report",
]

__version__ = "0.1.0"
