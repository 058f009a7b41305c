"""Exact recovery of geometric conjugacy data for GL_n(F_q) characters.

The package computes, entirely in exact arithmetic, the parameter that
indexes an irreducible character of a finite general linear group by a
geometric conjugacy class of torus characters, using nothing but the
character's values on regular semisimple torus elements.  The layers:

cyclotomic  exact arithmetic in Q(zeta_N) on the power basis
abelian     finite abelian groups, characters, homs in exponent coordinates
tori        maximal torus types, norm maps, regularity, conjugacy deciders
sheets      character value tables (built-in GL_1/GL_2 generators, JSON IO)
recovery    sparse expansion search, class assembly, unipotence, audits
cli         deterministic command line front end
"""

from .abelian import AbChar, AbHom, FinAbGroup, GrpElt, pullback
from .cyclotomic import CycMatrix, CycNum, root, solve_exact
from .recovery import (
    ConsistencyReport,
    Expansion,
    GramReport,
    NoExpansionError,
    NonUniqueError,
    QConditionViolated,
    RecoveryInconsistencyError,
    RecoveryReport,
    gram_independence,
    is_unipotent,
    recover_E,
    sparse_decompose,
    verify_dl_consistency,
)
from .sheets import (
    CharacterSheet,
    IrrLabel,
    SheetFormatError,
    SheetRow,
    SheetValidationError,
    build_gl1_sheet,
    build_gl2_sheet,
    load_sheet,
    save_sheet,
    sheet_from_dict,
    sheet_to_dict,
    validate_sheet,
)
from .tori import (
    GeomClassId,
    GroupSpec,
    QConditionReport,
    TorusType,
    check_q_condition,
    enumerate_tori,
    geom_class_id,
    geometric_conjugate,
    is_regular,
    norm_hom,
    regular_elements,
    weyl_orbit,
)

__version__ = "0.1.0"

__all__ = [
    "AbChar", "AbHom", "FinAbGroup", "GrpElt", "pullback",
    "CycMatrix", "CycNum", "root", "solve_exact",
    "ConsistencyReport", "Expansion", "GramReport", "NoExpansionError",
    "NonUniqueError", "QConditionViolated", "RecoveryInconsistencyError",
    "RecoveryReport", "gram_independence", "is_unipotent", "recover_E",
    "sparse_decompose", "verify_dl_consistency",
    "CharacterSheet", "IrrLabel", "SheetFormatError", "SheetRow",
    "SheetValidationError", "build_gl1_sheet", "build_gl2_sheet",
    "load_sheet", "save_sheet", "sheet_from_dict", "sheet_to_dict",
    "validate_sheet",
    "GeomClassId", "GroupSpec", "QConditionReport", "TorusType",
    "check_q_condition", "enumerate_tori", "geom_class_id",
    "geometric_conjugate", "is_regular", "norm_hom", "regular_elements",
    "weyl_orbit",
    "__version__",
]
