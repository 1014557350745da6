"""Subspace-restriction statistics of GL_n(F_q), S_n and Sp_2n(F_q).

Exact moments by enumeration, Monte Carlo estimates with per-sample seeds,
and expansions of products of the statistics in the character-polynomial
basis.
"""

from .charpoly import CharPoly, ExpansionError, cp_eval, product_expand, verify_expansion
from .conjugacy import (
    ClassInfo,
    ClassSpecError,
    ConjClassLabel,
    LabelError,
    PolyFq,
    enumerate_classes,
    invariant_factors,
    parse_class_spec,
)
from .families import AmbientFamily, gl_family, make_family, sp_family, sym_family, transitivity_check
from .field import FieldElement, FieldError, FieldSpec, field_enumerate, field_inv, field_make
from .linalg import (
    EnumerationCapError,
    MatrixFq,
    Subspace,
    enumerate_gl,
    enumerate_grassmannian,
    gaussian_binomial,
    gl_order,
    random_gl,
    restrict,
    rref,
)
from .stats import (
    MomentResult,
    ScanResult,
    Statistic,
    closed_form_expectation,
    evaluate_X,
    exact_expectation,
    exact_joint_moment,
    mc_estimate,
    stability_scan,
    stable_value,
)

__version__ = "0.1.0"

__all__ = [
    "AmbientFamily",
    "CharPoly",
    "ClassInfo",
    "ClassSpecError",
    "ConjClassLabel",
    "EnumerationCapError",
    "ExpansionError",
    "FieldElement",
    "FieldError",
    "FieldSpec",
    "LabelError",
    "MatrixFq",
    "MomentResult",
    "PolyFq",
    "ScanResult",
    "Statistic",
    "Subspace",
    "closed_form_expectation",
    "cp_eval",
    "enumerate_classes",
    "enumerate_gl",
    "enumerate_grassmannian",
    "evaluate_X",
    "exact_expectation",
    "exact_joint_moment",
    "field_enumerate",
    "field_inv",
    "field_make",
    "gaussian_binomial",
    "gl_family",
    "gl_order",
    "invariant_factors",
    "make_family",
    "mc_estimate",
    "parse_class_spec",
    "product_expand",
    "random_gl",
    "restrict",
    "rref",
    "sp_family",
    "stability_scan",
    "stable_value",
    "sym_family",
    "transitivity_check",
    "verify_expansion",
]
