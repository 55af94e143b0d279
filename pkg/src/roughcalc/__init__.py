"""Rough singular integrals, potentials, maximal functions and function-space norms on uniform grids."""
from .grid import GridSpec, InequalityParams, SampledField, make_bump, make_bump_sum, numeric_gradient
from .sphere import SphereKernel, make_rough_kernel, project_zero_mean, sphere_lp_norm, sphere_weak_norm
from .operators import (
    AnnularQuadrature,
    generalized_singular_integral,
    heat_convolve,
    maximal_function,
    maximal_truncated,
    riesz_potential,
    singular_integral,
    truncated_integral,
)
from .norms import (
    YoungFunction,
    besov_thermic_norm,
    classical_lorentz_norm,
    lp_norm,
    luxemburg_norm,
    morrey_norm,
    rearrangement,
    rescaled_young,
    weak_lorentz_norm,
    weighted_lp_norm,
)
from .weights import Weight, ap_constant, bp_constant
from .verify import InequalityReport, run_suite

__version__ = "0.1.0"
