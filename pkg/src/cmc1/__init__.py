"""Hyperbolic Gauss maps of CMC-1 surfaces in hyperbolic space and CMC-1 faces in de Sitter space.

Value distribution (exceptional and totally ramified values), dual data,
Schwarzian and Frobenius analysis of the defining ODE, frame development
with monodromy checks, and mesh export.
"""

from .algebra import INF, Polynomial, RationalMap, RootFindingError, branch_points, mobius, roots
from .catalog import build, catalog_list, lookup
from .gaussian import GaussianRational
from .ramify import (
    DivisorData,
    PuncturedSphere,
    divisor_consistency,
    exceptional_values,
    face_inequality,
    max_exceptional_bound,
    nu_value,
    osserman_bound,
    totally_ramified_values,
)
from .surface import MeroDifferential, SurfaceData, dual_omega, dual_total_curvature, schwarzian, verify_schwarz

__version__ = "0.1.0"

__all__ = [
    "INF",
    "DivisorData",
    "GaussianRational",
    "MeroDifferential",
    "Polynomial",
    "PuncturedSphere",
    "RationalMap",
    "RootFindingError",
    "SurfaceData",
    "branch_points",
    "build",
    "catalog_list",
    "divisor_consistency",
    "dual_omega",
    "dual_total_curvature",
    "exceptional_values",
    "face_inequality",
    "lookup",
    "max_exceptional_bound",
    "mobius",
    "nu_value",
    "osserman_bound",
    "roots",
    "schwarzian",
    "totally_ramified_values",
    "verify_schwarz",
]
