"""Trace finite elements for the surface vector-Laplace problem."""

from ._tracefem import (
    ConvergenceError,
    Discretization,
    SetupError,
    exact_multiplier,
    exact_velocity,
    forcing,
    run_study,
)

__all__ = [
    "ConvergenceError",
    "Discretization",
    "SetupError",
    "exact_multiplier",
    "exact_velocity",
    "forcing",
    "run_study",
]
