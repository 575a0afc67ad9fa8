"""Minimum-cost discrimination of quantum states.

Symmetric pure-state families, the square-root measurement, Helstrom
optimality checks, analytic cost bounds, a numerical oracle and sequences of
local systems.
"""
from .bounds import BoundReport, bound_min_cost
from .costs import (
    CirculantCost,
    average_cost,
    circulant_cost,
    circulant_eigenvalues,
    circulant_structure,
    constant_row_decompose,
    min_error_cost,
    mixed_error_to_pure_cost,
    n4_negativity_check,
    outcome_probabilities,
    symmetric_circulant,
)
from .ensembles import (
    Ensemble,
    GramSpectrum,
    MixtureSpec,
    SymmetricFamily,
    coherent_symmetric_family,
    gram,
    mix_symmetric,
    symmetric_from_coeffs,
)
from .errors import (
    CutoffTooSmall,
    DegenerateInput,
    DimensionExceedsN,
    DimensionMismatch,
    EnvelopeNotNSD,
    InvalidEnsemble,
    InvalidMixture,
    InvalidPovm,
    MincostError,
    NegativeEigenvalue,
    NoConvergence,
    NotHermitian,
    NotMonotoneRange,
    NotNormalized,
    NotSquare,
    ScenarioParseError,
    TableOutOfRange,
    UnsupportedPriors,
)
from .helstrom import HelstromReport, check_optimality, pairwise_condition, risk_operators
from .oracle import OracleConfig, OracleResult, minimize_cost, minimize_over_product_povms
from .povm import Povm, tensor_povm
from .sequences import (
    GlobalCostFunction,
    SequenceEnsemble,
    build_global_cost,
    convexity_bounds,
    elimination_check,
    linear_case_minimum,
    pbr_basis,
    reduce_to_subsystems,
    zero_plus_alphabet,
)
from .srm import (
    SrmResult,
    min_error_symmetric,
    srm_cost_circulant,
    srm_general,
    srm_offset_probabilities,
    srm_symmetric,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "CirculantCost",
    "CutoffTooSmall",
    "DegenerateInput",
    "DimensionExceedsN",
    "DimensionMismatch",
    "Ensemble",
    "EnvelopeNotNSD",
    "GlobalCostFunction",
    "GramSpectrum",
    "HelstromReport",
    "InvalidEnsemble",
    "InvalidMixture",
    "InvalidPovm",
    "MincostError",
    "MixtureSpec",
    "NegativeEigenvalue",
    "NoConvergence",
    "NotHermitian",
    "NotMonotoneRange",
    "NotNormalized",
    "NotSquare",
    "OracleConfig",
    "OracleResult",
    "Povm",
    "ScenarioParseError",
    "SequenceEnsemble",
    "SrmResult",
    "SymmetricFamily",
    "TableOutOfRange",
    "UnsupportedPriors",
    "average_cost",
    "bound_min_cost",
    "build_global_cost",
    "check_optimality",
    "circulant_cost",
    "circulant_eigenvalues",
    "circulant_structure",
    "coherent_symmetric_family",
    "constant_row_decompose",
    "convexity_bounds",
    "elimination_check",
    "gram",
    "linear_case_minimum",
    "min_error_cost",
    "min_error_symmetric",
    "minimize_cost",
    "minimize_over_product_povms",
    "mix_symmetric",
    "mixed_error_to_pure_cost",
    "n4_negativity_check",
    "outcome_probabilities",
    "pairwise_condition",
    "pbr_basis",
    "reduce_to_subsystems",
    "risk_operators",
    "srm_cost_circulant",
    "srm_general",
    "srm_offset_probabilities",
    "srm_symmetric",
    "symmetric_circulant",
    "symmetric_from_coeffs",
    "tensor_povm",
    "zero_plus_alphabet",
]
