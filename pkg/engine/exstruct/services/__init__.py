"""Services for exstruct."""

from exstruct.services.defectcore import (
    ClosureViolation,
    DefectAnalysis,
    NotASubbifunctor,
    NotFullModuleCategory,
    TheoremViolation,
    TooLarge,
)
from exstruct.services.exactfield import DimensionMismatch, Field, NoSolution, NotPrime
from exstruct.services.extconf import (
    NoCompletion,
    NotAConflation,
    NotAMorphism,
    WeakPullbackFailure,
)
from exstruct.services.funcat import InvalidAtlas, NonIntegralMultiplicity, NotNatural
from exstruct.services.pathalg import InvalidQuiver, NotAdmissible, NotHomogeneousRelation
from exstruct.services.repmod import (
    AtlasIncomplete,
    CharacteristicTooSmall,
    NotCommuting,
    RelationViolation,
)
from exstruct.services.suite import run_suite
from exstruct.services.table_cache import TableCache, get_table_cache
from exstruct.services.workspace import (
    InvariantViolation,
    ParseError,
    Workspace,
    build_workspace,
    load_workspace,
    parse_input,
)

__all__ = [
    "Field",
    "DefectAnalysis",
    "Workspace",
    "parse_input",
    "build_workspace",
    "load_workspace",
    "run_suite",
    "TableCache",
    "get_table_cache",
    # Errors
    "NotPrime",
    "DimensionMismatch",
    "NoSolution",
    "InvalidQuiver",
    "NotAdmissible",
    "NotHomogeneousRelation",
    "RelationViolation",
    "NotCommuting",
    "CharacteristicTooSmall",
    "AtlasIncomplete",
    "NotAConflation",
    "WeakPullbackFailure",
    "NotAMorphism",
    "NoCompletion",
    "NotNatural",
    "NonIntegralMultiplicity",
    "InvalidAtlas",
    "NotASubbifunctor",
    "ClosureViolation",
    "TooLarge",
    "NotFullModuleCategory",
    "TheoremViolation",
    "ParseError",
    "InvariantViolation",
]
