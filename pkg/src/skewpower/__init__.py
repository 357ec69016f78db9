"""Skew polynomial and truncated skew power series rings over filtered rings,
with a finite-ring ideal laboratory for checking prime contraction results."""

from .builders import (
    QuantumMatrixSpec,
    build_delta_tau_minus_id,
    build_quantum_matrices,
    build_quantum_plane,
    build_swap_product,
    build_truncpoly,
    build_zmod,
)
from .filtered import (
    INF,
    FilteredRing,
    GradedElement,
    ProductRing,
    RingError,
    SkewData,
    SkewDataError,
    TruncPoly,
    ValidationReport,
    ZMod,
    leading_form,
    validate_skew_data,
    valuation,
)
from .series import (
    PrecisionError,
    SeriesRing,
    TruncSeries,
    as_filtered_ring,
    conjugate_by_z,
    convert_side_series,
    extend_tau_series,
    invert_one_plus,
    j_valuation,
    limit_of_sequence,
    ts_mul,
)
from .skewpoly import SkewPoly, SkewPolyRing, convert_side, spoly_apply_extended_tau, spoly_mul, theta

__all__ = [
    "INF",
    "FilteredRing",
    "GradedElement",
    "PrecisionError",
    "ProductRing",
    "QuantumMatrixSpec",
    "RingError",
    "SeriesRing",
    "SkewData",
    "SkewDataError",
    "SkewPoly",
    "SkewPolyRing",
    "TruncPoly",
    "TruncSeries",
    "ValidationReport",
    "ZMod",
    "as_filtered_ring",
    "build_delta_tau_minus_id",
    "build_quantum_matrices",
    "build_quantum_plane",
    "build_swap_product",
    "build_truncpoly",
    "build_zmod",
    "conjugate_by_z",
    "convert_side",
    "convert_side_series",
    "extend_tau_series",
    "invert_one_plus",
    "j_valuation",
    "leading_form",
    "limit_of_sequence",
    "spoly_apply_extended_tau",
    "spoly_mul",
    "theta",
    "ts_mul",
    "validate_skew_data",
    "valuation",
]
