"""Exact computation in lamplighter-type groups Z_n wr Z^k.

Construct and validate automorphisms, compute Reidemeister numbers with
replayable certificates, classify which (n, k) force infinitely many
twisted-conjugacy classes, and cross-check everything on finite quotients
by brute force.
"""

from .group import (
    GroupElement,
    GroupParams,
    IncompatibleParams,
    Torsion,
    alpha_shift,
    project_element,
    project_torsion,
    twisted_conjugate,
)
from .matrix import (
    det,
    identity,
    inverse_unimodular,
    is_unimodular,
    mat_mul,
    mat_vec,
    matrix_order,
    random_unimodular,
    smith_normal_form,
)
from .automorphism import (
    InvalidAutomorphism,
    ValidationReport,
    WreathAutomorphism,
    automorphism_from_dict,
    automorphism_to_dict,
    group_ring_inverse,
    inner,
    inverse_in_box,
    is_group_ring_unit,
    twist,
    unit_check,
)
from .reidemeister import (
    INFINITE,
    Classification,
    ExtNat,
    PreimageTemplate,
    ReidemeisterResult,
    SurjectivityCertificate,
    block_order_three,
    certificate_from_dict,
    certificate_to_dict,
    classify_r_infinity,
    count_fixed_lattice_characters,
    crt_lift_preimage,
    default_test_points,
    finite_reidemeister_automorphism,
    matrix_fixed_points_mod,
    reidemeister_abelian,
    reidemeister_number,
    replay_certificate,
    restriction_difference,
    restriction_surjectivity,
    template_preimage,
)
from .finite import (
    BudgetExceeded,
    DescentError,
    FiniteAutomorphism,
    FiniteWreathGroup,
    OracleCheck,
    TwistedClassPartition,
    build_group,
    descend_automorphism,
    fixed_conjugacy_classes,
    identity_automorphism,
    inner_twists,
    twisted_classes,
    twisted_classes_unionfind,
    verify_projection,
    verify_restriction_bound,
    verify_shift_invariance,
    verify_tbft_finite,
    zero_cocycle_automorphisms,
    zero_cocycle_catalog,
)
from .fileformat import SCHEMA_VERSION, SchemaError

__version__ = "0.1.0"

__all__ = [
    "GroupParams",
    "GroupElement",
    "Torsion",
    "IncompatibleParams",
    "alpha_shift",
    "twisted_conjugate",
    "project_torsion",
    "project_element",
    "identity",
    "det",
    "is_unimodular",
    "inverse_unimodular",
    "mat_mul",
    "mat_vec",
    "matrix_order",
    "random_unimodular",
    "smith_normal_form",
    "WreathAutomorphism",
    "ValidationReport",
    "InvalidAutomorphism",
    "inner",
    "twist",
    "unit_check",
    "is_group_ring_unit",
    "group_ring_inverse",
    "inverse_in_box",
    "automorphism_to_dict",
    "automorphism_from_dict",
    "ExtNat",
    "INFINITE",
    "reidemeister_abelian",
    "count_fixed_lattice_characters",
    "matrix_fixed_points_mod",
    "restriction_surjectivity",
    "restriction_difference",
    "template_preimage",
    "default_test_points",
    "SurjectivityCertificate",
    "PreimageTemplate",
    "crt_lift_preimage",
    "block_order_three",
    "finite_reidemeister_automorphism",
    "classify_r_infinity",
    "Classification",
    "reidemeister_number",
    "ReidemeisterResult",
    "certificate_to_dict",
    "certificate_from_dict",
    "replay_certificate",
    "FiniteWreathGroup",
    "FiniteAutomorphism",
    "TwistedClassPartition",
    "OracleCheck",
    "BudgetExceeded",
    "DescentError",
    "build_group",
    "descend_automorphism",
    "identity_automorphism",
    "twisted_classes",
    "twisted_classes_unionfind",
    "fixed_conjugacy_classes",
    "inner_twists",
    "verify_tbft_finite",
    "verify_shift_invariance",
    "verify_projection",
    "verify_restriction_bound",
    "zero_cocycle_automorphisms",
    "zero_cocycle_catalog",
    "SCHEMA_VERSION",
    "SchemaError",
    "__version__",
]
