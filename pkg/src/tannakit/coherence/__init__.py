"""Finite coherence data for semigroup actions on evaluation categories."""

from .core import (
    BlockFunctor,
    EvalCategory,
    Morphism,
    NatIso,
    QQCoeffs,
    RatCoeffs,
    check_functor_laws,
    check_naturality,
    coeffs_for,
    compare,
    hcompose,
    nat_identity,
    nat_inverse,
    vcompose,
    whisker,
    whisker_left,
    whisker_right,
)
from .action import (
    AbelianAction,
    ActionData,
    check_action_morphism,
    check_data_naturality,
    check_extended_morphism,
    check_hexagon,
    check_torsion,
    check_torsion_exchange,
    data_equal,
    extend_iso,
    replace_functor,
    restrict,
    transport,
    verify_associativity,
)
from .freeprod import (
    FreeProductAction,
    combine_free_product,
    restrict_free_product,
    restriction_is_identity,
    verify_fp_associativity,
)
from .io import action_from_json, action_to_json

__all__ = [
    "BlockFunctor", "EvalCategory", "Morphism", "NatIso", "QQCoeffs", "RatCoeffs",
    "check_functor_laws", "check_naturality", "coeffs_for", "compare", "hcompose",
    "nat_identity", "nat_inverse", "vcompose", "whisker", "whisker_left", "whisker_right",
    "AbelianAction", "ActionData", "check_action_morphism", "check_data_naturality",
    "check_extended_morphism", "check_hexagon", "check_torsion", "check_torsion_exchange",
    "data_equal", "extend_iso", "replace_functor", "restrict", "transport", "verify_associativity",
    "FreeProductAction", "combine_free_product", "restrict_free_product",
    "restriction_is_identity", "verify_fp_associativity",
    "action_from_json", "action_to_json",
]
