"""Ovoid codes over GF(2^m): construction, exhaustive certification of code
parameters, point-set geometry in PG(3, q), derived 3-designs, and
projective-semilinear equivalence probing."""

__version__ = "0.1.0"

from .gf import FieldContext, TowerContext, field, tower
from .cyclotomy import CyclotomicSystem, check_scaling_multiset, count_trace_zero, gaussian_periods
from .cycliccode import (
    LinearCode,
    build_cyclic_code,
    dual_distribution_closed_form,
    dual_min_distance,
    dual_weight_closed_form,
    griesmer_check,
    macwilliams_transform,
    weight_distribution_enumeration,
    weight_distribution_periods,
)
from .projgeo import (
    CapCertificate,
    ProjPointSet,
    certify_cap,
    elliptic_quadric,
    points_from_code,
    tits_ovoid,
)
from .designs import (
    BlockDesign,
    complement_design,
    dual_weight4_supports,
    supports_of_weight,
    verify_design,
)
from .equivgroup import EquivalenceReport, Fingerprint, fingerprint, search_equivalence

__all__ = [
    "FieldContext",
    "TowerContext",
    "field",
    "tower",
    "CyclotomicSystem",
    "gaussian_periods",
    "count_trace_zero",
    "check_scaling_multiset",
    "LinearCode",
    "build_cyclic_code",
    "weight_distribution_enumeration",
    "weight_distribution_periods",
    "macwilliams_transform",
    "dual_weight_closed_form",
    "dual_distribution_closed_form",
    "dual_min_distance",
    "griesmer_check",
    "ProjPointSet",
    "CapCertificate",
    "elliptic_quadric",
    "tits_ovoid",
    "points_from_code",
    "certify_cap",
    "BlockDesign",
    "supports_of_weight",
    "verify_design",
    "complement_design",
    "dual_weight4_supports",
    "Fingerprint",
    "EquivalenceReport",
    "fingerprint",
    "search_equivalence",
]
