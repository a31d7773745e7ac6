"""Vanishing-viscosity limits of scalar conservation laws on bounded domains.

Viscous and inviscid solvers, entropy-solution verifiers (interior,
boundary and initial-trace clauses), kinetic and compensated-compactness
diagnostics, and an epsilon-sweep harness.
"""

from .compactness import DefectSequence, FijField, divcurl_defect, entropy_production_split, tartar_defect
from .entropy import (
    BoundaryEntropyPair,
    KruzhkovPair,
    SmoothEntropyPair,
    eval_boundary_pair,
    eval_limit_flux,
    kruzhkov_flux,
)
from .harness import SweepConfig, SweepReport, emit_report, run_sweep, verify_field
from .initial_data import (
    InitialCondition,
    MollifiedDatum,
    make_initial_condition,
    mollify_dirichlet,
    verify_initial_bounds,
)
from .kinetic import (
    CGrid,
    ChiField,
    DefectDensity,
    chi,
    chi_integral_identity,
    kinetic_weak_residual,
    measure_bound_check,
    nondegeneracy_measure,
)
from .model import (
    FluxModel,
    ProblemSpec,
    SpatialDomain,
    ViscosityModel,
    check_hypothesis,
    flux_catalog,
    make_flux,
    make_viscosity,
)
from .otto import (
    boundary_flux_limit,
    boundary_inequality_check,
    initial_trace_check,
    interior_entropy_residual,
    verify_entropy_solution,
)
from .reference import exact_burgers_ibvp, exact_burgers_riemann, godunov_flux, solve_inviscid
from .testfunctions import Bump, TestFunctionFamily
from .viscous import SpaceTimeField, check_energy_estimate, check_max_principle, solve_viscous

__version__ = "0.1.0"

__all__ = [
    "BoundaryEntropyPair",
    "Bump",
    "CGrid",
    "ChiField",
    "DefectDensity",
    "DefectSequence",
    "FijField",
    "FluxModel",
    "InitialCondition",
    "KruzhkovPair",
    "MollifiedDatum",
    "ProblemSpec",
    "SmoothEntropyPair",
    "SpaceTimeField",
    "SpatialDomain",
    "SweepConfig",
    "SweepReport",
    "TestFunctionFamily",
    "ViscosityModel",
    "boundary_flux_limit",
    "boundary_inequality_check",
    "check_energy_estimate",
    "check_hypothesis",
    "check_max_principle",
    "chi",
    "chi_integral_identity",
    "divcurl_defect",
    "emit_report",
    "entropy_production_split",
    "eval_boundary_pair",
    "eval_limit_flux",
    "exact_burgers_ibvp",
    "exact_burgers_riemann",
    "flux_catalog",
    "godunov_flux",
    "initial_trace_check",
    "interior_entropy_residual",
    "kinetic_weak_residual",
    "kruzhkov_flux",
    "make_flux",
    "make_initial_condition",
    "make_viscosity",
    "measure_bound_check",
    "mollify_dirichlet",
    "nondegeneracy_measure",
    "run_sweep",
    "solve_inviscid",
    "solve_viscous",
    "tartar_defect",
    "verify_entropy_solution",
    "verify_field",
    "verify_initial_bounds",
]
