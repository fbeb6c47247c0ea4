"""Spectral solver for the Dirac eigenvalue problem with an F^alpha-derivative."""

__version__ = "0.1.0"

from .coeff_lang import Expr, eval_coefficient, parse_coefficient, render
from .dirac_system import DiracProblem, State2, Trajectory, inner_product, lagrange_defect, rhs
from .fractal_core import Grid, ScalingModel, falpha_integral, make_uniform_grid, staircase_eval
from .integrator import IntegratorConfig, Method, frk4_step, propagate_phi, propagate_psi
from .spectral import (
    Eigenpair,
    Spectrum,
    beta_constant,
    characteristic,
    characteristic_via_psi,
    convergence_study,
    orthogonality_matrix,
    refine_eigenvalue,
    scan_characteristic,
    solve_spectrum,
    weight_number,
    weight_slope_defect,
    wronskian_profile,
)
