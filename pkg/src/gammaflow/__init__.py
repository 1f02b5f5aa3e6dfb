"""Relaxed minimizing movements along families of functionals.

Modules
-------
core
    Points, extended-real functionals, families, schedules, certificates.
prox
    Certified Moreau-Yosida evaluation and the relaxed step.
scheme
    The time-stepping driver and its a-priori estimates.
diagnostics
    Slopes, De Giorgi ratios, energy dissipation and the Gamma metric.
zoo
    Concrete one-dimensional families.
cli
    Config-driven experiment runner.
"""

from .core import (
    CoercivityCertificate,
    CouplingSchedule,
    ErrorSchedule,
    Functional,
    FunctionalFamily,
    Point,
    prox_search_radius,
)
from .prox import InnerSolverConfig, ProxResult, check_relaxed_inequality, moreau_yosida, relaxed_step
from .scheme import RecoveryData, Trajectory, gronwall_bound, run_refinement, run_single

__version__ = "0.1.0"

__all__ = [
    "CoercivityCertificate",
    "CouplingSchedule",
    "ErrorSchedule",
    "Functional",
    "FunctionalFamily",
    "InnerSolverConfig",
    "Point",
    "ProxResult",
    "RecoveryData",
    "Trajectory",
    "check_relaxed_inequality",
    "gronwall_bound",
    "moreau_yosida",
    "prox_search_radius",
    "relaxed_step",
    "run_refinement",
    "run_single",
]
