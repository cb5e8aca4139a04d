"""proddecomp: unique product decompositions of bipartite state operators.

Construction of weighted sums of product projectors, their tripartite
purifications, blind extraction from the operator alone, and certification
that two decompositions agree up to permutation and per-ket phases.
"""

from .decomp import (
    BI_PROFILES,
    TRI_PROFILES,
    DegeneracyReport,
    ExtractionReport,
    MatchResult,
    TermCertificate,
    check_product_hypotheses,
    check_tri_hypotheses,
    demo_degeneracy,
    extract_decomposition,
    generate_instance,
    generate_tri_instance,
    is_factorable,
    match_bidecomposition,
    match_tridecomposition,
    phase_permuted_twin,
    schmidt_values,
    split_pair_terms,
)
from .errors import (
    DegenerateInput,
    DimensionMismatch,
    FileError,
    HypothesisViolation,
    NotExtractable,
    OperatorMismatch,
    ProddecompError,
)
from .purification import UnitaryMatrix, apply_on_factor, purify, relating_unitary
from .subspace import (
    DEFAULT_TOL,
    SubspaceBasis,
    ToleranceConfig,
    dual_basis,
    fix_phase,
    is_collinear,
    is_noncollinear_set,
    rank_and_independence,
    support_and_null,
)
from .tensor import (
    FactoredDims,
    Ket,
    ProductDecomposition,
    ProductTerm,
    StateOperator,
    TriDecomposition,
    TriTerm,
    bipartite_matrix,
    build_rho,
    build_tri_vector,
    frobenius,
    partial_trace,
    rho_matrix,
    tensor_product,
)

__version__ = "0.1.0"

__all__ = [
    "BI_PROFILES",
    "TRI_PROFILES",
    "DEFAULT_TOL",
    "DegenerateInput",
    "DegeneracyReport",
    "DimensionMismatch",
    "ExtractionReport",
    "FactoredDims",
    "FileError",
    "HypothesisViolation",
    "Ket",
    "MatchResult",
    "NotExtractable",
    "OperatorMismatch",
    "ProddecompError",
    "ProductDecomposition",
    "ProductTerm",
    "StateOperator",
    "SubspaceBasis",
    "TermCertificate",
    "ToleranceConfig",
    "TriDecomposition",
    "TriTerm",
    "UnitaryMatrix",
    "apply_on_factor",
    "bipartite_matrix",
    "build_rho",
    "build_tri_vector",
    "check_product_hypotheses",
    "check_tri_hypotheses",
    "demo_degeneracy",
    "dual_basis",
    "extract_decomposition",
    "fix_phase",
    "frobenius",
    "generate_instance",
    "generate_tri_instance",
    "is_collinear",
    "is_factorable",
    "is_noncollinear_set",
    "match_bidecomposition",
    "match_tridecomposition",
    "partial_trace",
    "phase_permuted_twin",
    "purify",
    "rank_and_independence",
    "relating_unitary",
    "rho_matrix",
    "schmidt_values",
    "split_pair_terms",
    "support_and_null",
    "tensor_product",
]
