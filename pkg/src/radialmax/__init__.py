"""Spherical maximal functions over fractal sets of dilations, restricted to radial functions.

Dilation sets are finite unions of dyadic cells of ``[1, 2]``; the package
estimates their covering spectra, builds the predicted ``L^p -> L^q`` type
regions, evaluates spherical averages of radial functions and runs the
numerical experiments that probe the region boundaries.
"""

__version__ = "0.1.0"

from ._validation import (  # noqa: E402
    CaseError,
    ConvergenceError,
    DomainError,
    EmptyWindowError,
    FitError,
    ModeError,
    ParameterError,
    RadialMaxError,
    RangeError,
)
from .dilation_sets import AnalyticProfile, DilationSet, SetSpec, WindowSpec, coarsen, generate, restrict  # noqa: E402
from .estimators import CoveringSpectrum, MaximalOperator, RadialTypeSet  # noqa: E402
from .fitting import ExponentFit, fit_exponent  # noqa: E402
from .maximal_ops import RadialGrid, decomposition_pieces, domination_check, maximal_value  # noqa: E402
from .radial_averages import RadialFunction, c_d, kernel, sphere_average, sphere_average_mc, stein_function  # noqa: E402
from .spectra import (  # noqa: E402
    CoveringProfile,
    assouad_spectrum_estimate,
    covering_profile,
    minkowski_estimate,
    nu_sharp_estimate,
    quasi_assouad_estimate,
)
from .type_sets import (  # noqa: E402
    ClosedFormNuSharp,
    ExponentPair,
    TypeRegion,
    closure_boundary,
    endpoint_classify,
    quadrangle_vertices_general,
    quadrangle_vertices_radial,
    region_membership,
    triangle_vertices,
)
