"""anisotable: Monte Carlo toolkit for non-symmetric strictly stable processes
killed outside scale-invariant fat cones."""

__version__ = "0.1.0"

from ._backend import HAVE_NUMBA, backend_name
from .model import (
    ConstantDensity,
    HalfspaceExponents,
    HemisphereDensity,
    ProjectionCoeffs,
    StableModel,
    TabulatedDensity,
    dual,
    halfspace_exponents,
    levy_density,
    model_from_dict,
    model_to_dict,
    positivity_parameter,
    projection_coefficients,
    pruitt_h,
    tabulated_from_function,
    validate,
)
from .geometry import (
    CircularCone,
    ComplementHyperplane,
    FullSpace,
    HalfSpace,
    boundary_distance,
    contains,
    domain_from_dict,
    domain_to_dict,
    fat_witness,
    kappa_estimate,
    reference_point,
)
from .sampling import (
    ExitBatch,
    SchemeParams,
    run_paths,
    sample_direction,
    sample_increment,
    sample_increment_1d_exact,
    sample_path_exit,
    scheme_bias_probe,
)
