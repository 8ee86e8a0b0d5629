"""Exact-arithmetic nef certification for symmetric divisors on moduli of curves.

The package decides, with certificates, whether a symmetric divisor
``a*lambda - sum b_i delta_i`` on the genus-g moduli space satisfies the
boundary-curve inequalities and can be proven nef by averaging its genus-0
restrictions into ``c*K + effective`` form, recursing into boundary strata
when needed.  It also enumerates the extremal rays of the corresponding
symmetric genus-0 cone and verifies them one by one.

All arithmetic is exact rational; there are no tolerances anywhere.
"""

from nefcert.divisor_algebra import (
    BoundaryClass,
    BVector,
    DomainError,
    Profile,
    Rational,
    SymDivisorMg,
    WeightedDivisor,
    canonicalize,
    fold_index,
    orbit_multiplicity,
)
from nefcert.intersection import (
    EVector,
    FPartition,
    LabelledExpression,
    LabelledFCurve,
    check_f_divisor_mg,
    enumerate_f_partitions,
    f_intersection_sym_e,
    labelled_intersection,
)
from nefcert.pullback import child_profiles, flag_pullback, restrict
from nefcert.averages import (
    AverageKind,
    CAveraged,
    big_c_average_closed,
    c_average,
    mixed_c_average_closed,
    psi_coefficient,
    second_c_average_closed,
)
from nefcert.criteria import (
    CriterionVerdict,
    criterion_b0,
    criterion_b1,
    criterion_bm,
    criterion_induct,
    criterion_level0,
    step0_constant,
    zero_propagation,
)
from nefcert.nef_engine import (
    Certificate,
    EngineConfig,
    NotFDivisorError,
    certify_nef,
    certify_node,
    necessary_classes,
    validate_certificate,
)
from nefcert.cone_enum import (
    FacetMatrix,
    RaySet,
    extremal_rays,
    facet_matrix,
    lift_to_mg,
    verify_genus,
)

__version__ = "0.1.0"

__all__ = [
    "AverageKind",
    "BoundaryClass",
    "BVector",
    "CAveraged",
    "Certificate",
    "CriterionVerdict",
    "DomainError",
    "EngineConfig",
    "EVector",
    "FacetMatrix",
    "FPartition",
    "LabelledExpression",
    "LabelledFCurve",
    "NotFDivisorError",
    "Profile",
    "Rational",
    "RaySet",
    "SymDivisorMg",
    "WeightedDivisor",
    "big_c_average_closed",
    "c_average",
    "canonicalize",
    "certify_nef",
    "certify_node",
    "check_f_divisor_mg",
    "child_profiles",
    "criterion_b0",
    "criterion_b1",
    "criterion_bm",
    "criterion_induct",
    "criterion_level0",
    "enumerate_f_partitions",
    "extremal_rays",
    "f_intersection_sym_e",
    "facet_matrix",
    "flag_pullback",
    "fold_index",
    "labelled_intersection",
    "lift_to_mg",
    "mixed_c_average_closed",
    "necessary_classes",
    "orbit_multiplicity",
    "psi_coefficient",
    "restrict",
    "second_c_average_closed",
    "step0_constant",
    "validate_certificate",
    "verify_genus",
    "zero_propagation",
]
