"""Interpolation-theoretic diagnostics for paratangent fullness and flatness.

The building blocks are multivariate Vandermonde matrices over exact
rationals (``fractions.Fraction``) or doubles, unisolvent node selection,
iterated function systems for classical fractals, and the two diagnostics
built on them: the fullness check for accumulating node sets and the
flatness estimator for function values on such sets.
"""

from .multiindex import MultiIndex, IndexSet, enumerate_indices, dimension, degree_sum_all_forms, monomial_eval
from .vandermonde import (
    NodeSet,
    VMatrix,
    SingularMatrixError,
    build,
    determinant,
    normalized_determinant,
    affine_image_determinant_check,
    inverse_row_scales,
)
from .nodesets import (
    Polynomial,
    HdegResult,
    SelectionFailure,
    UnisolvenceError,
    hdeg,
    select_unisolvent,
    interpolate,
    evaluate_polynomial,
)
from .ifs import (
    AffineMap,
    IfsSystem,
    NodalSequence,
    fixed_point,
    compose,
    williams_points,
    iterate_word,
    catalog,
)
from .analysis import (
    FullnessReport,
    FlatnessReport,
    JetEstimate,
    similarity_invariant,
    check_fullness,
    estimate_scaling_exponent,
    flatness_order,
    factored_bound,
    estimate_jet,
)

__version__ = "0.1.0"
