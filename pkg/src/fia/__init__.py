"""Exact incidence-algebra toolkit for finite posets.

Builds the algebra of interval functions over Q, Z or a prime field,
studies its derivations (Leibniz maps, inner maps, diagonal maps from
additive-on-chains data) and checks, by exhaustive or sampled probing,
that maps which look like derivations pointwise really are derivations.
"""

from .fialg import (
    AlgebraError,
    FiElement,
    convolve,
    delta,
    element,
    element_from_json,
    moebius,
    restrict,
    sandwich,
    subset_idempotent,
    unit,
    zero,
    zeta,
)
from .deriv import (
    Decomposition,
    LinearEndo,
    TransitiveMap,
    coboundary,
    decompose,
    derivation_basis,
    endo_from_json,
    h1_dimension,
    idempotent_identity_check,
    inner,
    inner_basis,
    is_cocycle,
    is_derivation,
    sigma_endo,
    transitive_map,
)
from .locder import (
    CapExceededError,
    LemmaReport,
    LocalCheckReport,
    TheoremReport,
    Witness,
    check_local_exhaustive,
    check_local_spanning,
    lemma_conformance,
    theorem_verify_enumerate,
    theorem_verify_random,
    witness_for,
)
from .poset import Poset, PosetError, PosetParseError, parse_poset, random_poset
from .scalars import GF, QQ, ZZ, CoeffRing, RingError, Scalar, parse_ring

__version__ = "0.1.0"

__all__ = [
    "AlgebraError",
    "CapExceededError",
    "CoeffRing",
    "Decomposition",
    "FiElement",
    "GF",
    "LemmaReport",
    "LinearEndo",
    "LocalCheckReport",
    "Poset",
    "PosetError",
    "PosetParseError",
    "QQ",
    "RingError",
    "Scalar",
    "TheoremReport",
    "TransitiveMap",
    "Witness",
    "ZZ",
    "check_local_exhaustive",
    "check_local_spanning",
    "coboundary",
    "convolve",
    "decompose",
    "delta",
    "derivation_basis",
    "element",
    "element_from_json",
    "endo_from_json",
    "h1_dimension",
    "idempotent_identity_check",
    "inner",
    "inner_basis",
    "is_cocycle",
    "is_derivation",
    "lemma_conformance",
    "moebius",
    "parse_poset",
    "parse_ring",
    "random_poset",
    "restrict",
    "sandwich",
    "sigma_endo",
    "subset_idempotent",
    "theorem_verify_enumerate",
    "theorem_verify_random",
    "transitive_map",
    "unit",
    "witness_for",
    "zero",
    "zeta",
]
