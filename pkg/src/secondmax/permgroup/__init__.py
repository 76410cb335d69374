"""Permutation-group kernel."""

from . import perm
from .generation import (
    GenerationCertificate,
    GenerationEstimate,
    NuEstimate,
    d_exact,
    d_lower_bound,
    derived_subgroup,
    estimate_generation_probability,
    estimate_nu,
    exact_generation_probability,
    normal_closure,
)
from .group import (
    PermGroup,
    alternating_group,
    cyclic_group,
    elementary_abelian,
    from_generators,
    symmetric_group,
)
from .maximality import (
    ChainLevel,
    ChainReport,
    MaximalityVerdict,
    is_maximal,
    is_primitive,
    minimal_block,
    verify_chain,
)
from .table import ElementTable, table_for

__all__ = [
    "ChainLevel",
    "ChainReport",
    "ElementTable",
    "GenerationCertificate",
    "GenerationEstimate",
    "MaximalityVerdict",
    "NuEstimate",
    "PermGroup",
    "alternating_group",
    "cyclic_group",
    "d_exact",
    "d_lower_bound",
    "derived_subgroup",
    "elementary_abelian",
    "estimate_generation_probability",
    "estimate_nu",
    "exact_generation_probability",
    "from_generators",
    "is_maximal",
    "is_primitive",
    "minimal_block",
    "normal_closure",
    "perm",
    "symmetric_group",
    "table_for",
    "verify_chain",
]
