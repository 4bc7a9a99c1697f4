"""Exact norms on step functions for Wiener amalgam, Morrey and Fofana spaces,
and two-sided estimates of the norm of their pre-dual."""
from .corefn import (
    INF,
    PRECISION_BITS,
    Box,
    DimensionError,
    Exponents,
    SimpleFunction,
    conjugate,
    dilate,
    disjointify,
    indicator,
    integrate,
    linear_combine,
    multiply,
    pairing,
    support_extent,
)
from .norms import NormEstimate, amalgam_norm, holder_check, lebesgue_norm, morrey_norm, weak_norm
from .fofana import GridConfig, PhiPoint, ScaleGrid, auto_grid, fofana_norm, phi_curve
from .hspace import (
    HDecomposition,
    SandwichResult,
    dual_lower_bound,
    hnorm_sandwich,
    pairing_bound_check,
    scale_optimized_bound,
    synthesize,
    trivial_decomposition,
    validate,
    zorko_to_h,
)

__version__ = "0.1.0"
