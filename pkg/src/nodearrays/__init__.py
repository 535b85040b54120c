"""Node arrays for multivariate polynomial interpolation.

Generators (Fekete, Leja, Padua, intertwined and Bos arrays), Vandermonde
log-determinants and FLIPs, Lebesgue constants, transfinite-diameter and
equilibrium-measure diagnostics, Bergman functions and Kergin interpolation.
"""

from .basis import GradedMonomialBasis, auto_basis, basis_vector, dim_pn, ln_sum
from .bergman import (OrthonormalBasis, bergman_function, bergman_weakstar_probe,
                      bm_constant, bm_measure_construct, gram_matrix, orthonormalize)
from .diagnostics import (DiscreteMeasure, EquilibriumReference, GrowthReport,
                          bos_vdm_limit, empirical_measure, growth_report, l_functional,
                          lebesgue_constant, lebesgue_function, moment_distance,
                          tdiam_ball_closed_form, tdiam_simplex_closed_form,
                          triangular_g_polynomials, vk_estimator)
from .interp import Interpolant, holo_convergence_probe, lagrange_interpolate, sup_error
from .kergin import (PolynomialJet, RidgeJet, kergin_algebra_checks, kergin_eval,
                     kergin_interpolation_check, kergin_polynomial, ridge_identity_check)
from .meshes import (Mesh, disk_boundary_mesh, interval_mesh, product_mesh,
                     real_disk_mesh, simplex_mesh, square_mesh)
from .points import (LejaSequence, RadialDistribution, approx_fekete_greedy, bos_array,
                     discrete_leja, fekete_bruteforce, intertwine, leja_disk_exact,
                     padua_flip_kernel, padua_points, r_leja)
from .vandermonde import (DegenerateStageError, LogAbsDet, NodeArrayStage, flip_values,
                          log_abs_vdm, tdiam_estimate, weighted_log_abs_vdm)

__version__ = "0.1.0"

__all__ = [
    "GradedMonomialBasis", "auto_basis", "basis_vector", "dim_pn", "ln_sum",
    "OrthonormalBasis", "bergman_function", "bergman_weakstar_probe", "bm_constant",
    "bm_measure_construct", "gram_matrix", "orthonormalize", "DiscreteMeasure",
    "EquilibriumReference", "GrowthReport", "bos_vdm_limit", "empirical_measure",
    "growth_report", "l_functional", "lebesgue_constant", "lebesgue_function",
    "moment_distance", "tdiam_ball_closed_form", "tdiam_simplex_closed_form",
    "triangular_g_polynomials", "vk_estimator", "Interpolant", "holo_convergence_probe",
    "lagrange_interpolate", "sup_error", "PolynomialJet", "RidgeJet",
    "kergin_algebra_checks", "kergin_eval", "kergin_interpolation_check",
    "kergin_polynomial", "ridge_identity_check", "Mesh", "disk_boundary_mesh",
    "interval_mesh", "product_mesh", "real_disk_mesh", "simplex_mesh", "square_mesh",
    "LejaSequence", "RadialDistribution", "approx_fekete_greedy", "bos_array",
    "discrete_leja", "fekete_bruteforce", "intertwine", "leja_disk_exact",
    "padua_flip_kernel", "padua_points", "r_leja", "DegenerateStageError", "LogAbsDet",
    "NodeArrayStage", "flip_values", "log_abs_vdm", "tdiam_estimate",
    "weighted_log_abs_vdm", "__version__",
]
