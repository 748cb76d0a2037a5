"""Separable neighborhoods of the identity in tensor products of matrix
algebras: cb-norm sandwiches, entanglement witnesses, and the rank
formula constants, all with checkable certificates."""

from .algebra import (
    BipartiteElement,
    FdAlgebra,
    assemble,
    bipartite_identity,
    identity_minus,
    split_components,
)
from .cbnorm import CbNormResult, MajorizingPair, amplification_norm, cb_norm, cb_upper_sdp
from .errors import (
    ConvergenceError,
    DimensionError,
    HermiticityError,
    LinearityError,
    PositivityError,
    SchemaError,
    SepballError,
    SingularityError,
    SizeCapError,
)
from .maps import (
    LinearMapRep,
    SearchBudget,
    amplify,
    apply_map,
    apply_to_second_leg,
    certify_positive_map,
    choi_of_map,
    classify_map,
    embedded_transpose,
    hat_functional,
    identity_map,
    is_completely_positive,
    reduction_map,
    transpose_map,
    unitalize,
)
from .sdp import SdpOptions, SdpProblem, SdpSolution, hermitian_basis, solve
from .separability import (
    ScanReport,
    SepVerdict,
    WitnessData,
    dilation_embed,
    entanglement_witness,
    extremal_direction,
    extremal_entangled,
    ppt_check,
    sep_ball_scan,
)
from .theorems import (
    KappaReport,
    RankFormulaReport,
    eta_certificate,
    gamma_certificate,
    kappa_matrix_check,
    rank_formula_report,
    symbolic_rank_values,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteElement",
    "CbNormResult",
    "ConvergenceError",
    "DimensionError",
    "FdAlgebra",
    "HermiticityError",
    "KappaReport",
    "LinearMapRep",
    "LinearityError",
    "MajorizingPair",
    "PositivityError",
    "RankFormulaReport",
    "ScanReport",
    "SchemaError",
    "SdpOptions",
    "SdpProblem",
    "SdpSolution",
    "SearchBudget",
    "SepVerdict",
    "SepballError",
    "SingularityError",
    "SizeCapError",
    "WitnessData",
    "amplification_norm",
    "amplify",
    "apply_map",
    "apply_to_second_leg",
    "assemble",
    "bipartite_identity",
    "cb_norm",
    "cb_upper_sdp",
    "certify_positive_map",
    "choi_of_map",
    "classify_map",
    "dilation_embed",
    "embedded_transpose",
    "entanglement_witness",
    "eta_certificate",
    "extremal_direction",
    "extremal_entangled",
    "gamma_certificate",
    "hat_functional",
    "hermitian_basis",
    "identity_map",
    "identity_minus",
    "is_completely_positive",
    "kappa_matrix_check",
    "ppt_check",
    "rank_formula_report",
    "reduction_map",
    "sep_ball_scan",
    "solve",
    "split_components",
    "symbolic_rank_values",
    "transpose_map",
    "unitalize",
]
