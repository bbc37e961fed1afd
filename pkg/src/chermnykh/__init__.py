"""Equilibria, linear stability, normal forms and zero-velocity curves for the
restricted three-body problem with a radiating primary, an oblate secondary
and a Miyamoto-Nagai belt."""

__version__ = "0.1.0"

from .equilibria import all_equilibria, collinear_points, refine_equilibrium, triangular_points
from .errors import ChermnykhError
from .integrate import Trajectory, drift_report, integrate_orbit
from .linearize import coefficients_exact, critical_mass_numeric, stability_analysis
from .model import PhaseState, SystemParams, build_system, classical, effective_potential, jacobi_constant
from .normalform import build_transform, linear_orbit
from .zvc import ContourSet, critical_levels, region_classify, zvc_contours

__all__ = [
    "ChermnykhError",
    "ContourSet",
    "PhaseState",
    "SystemParams",
    "Trajectory",
    "all_equilibria",
    "build_system",
    "build_transform",
    "classical",
    "coefficients_exact",
    "collinear_points",
    "critical_levels",
    "critical_mass_numeric",
    "drift_report",
    "effective_potential",
    "integrate_orbit",
    "jacobi_constant",
    "linear_orbit",
    "refine_equilibrium",
    "region_classify",
    "stability_analysis",
    "triangular_points",
    "zvc_contours",
]
