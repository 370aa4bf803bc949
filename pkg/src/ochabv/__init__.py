"""Exact-arithmetic open-closed Hochschild cochains with brace operations,
cyclic braces, the BV operator, and the OCHA Hochschild differential."""

from .core import (
    Element,
    FieldError,
    GradedSpace,
    OrderedSetPartition,
    Permutation,
    PrimeField,
    QQ,
    RationalField,
    basis_element,
    compositions,
    element_from_coeffs,
    field_from_name,
    koszul_sign,
    subset_partitions,
    subset_split_sign,
    wedge_canonicalize,
    zero_element,
)
from .cochains import (
    CeTower,
    CochainTower,
    WindowError,
    degree_audit,
    is_normalized,
    linear_combine,
    tower_sub,
    zero_tower,
)
from .braces import (
    brace,
    brace_relation_residual,
    closed_action,
    closed_leibniz_residual,
    cup,
    gbracket,
)
from .cyclic import (
    AnchorSpec,
    SymplecticForm,
    bv_delta,
    cyclic_brace1,
    cyclic_brace2,
    cyclic_relation_residual_i,
    cyclic_relation_residual_ii,
    cyclicize,
    delta_leibniz_residual,
    interchange_residual_first,
    interchange_residual_second,
    interchange_residuals,
    is_cyclic,
    omega_audit,
)
from .oracle import OBrace, ODelta, ODiamond, pairing_oracle
from .ocha import (
    BvReport,
    CalibrationError,
    CohomologyReport,
    OchaStructure,
    build_dga_ocha,
    check_l_infinity,
    check_ocha,
    check_unital,
    cohomology,
    hochschild_delta,
    normalized_project,
    q_lemma_suite,
    shifted_space,
    bv_verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
