"""Data models for exstruct."""

from exstruct.models.input import (
    ArrowSpec,
    AtlasEntry,
    Flags,
    InputDescription,
    QuiverSpec,
    RelationSpec,
    TermSpec,
)
from exstruct.models.report import (
    AnalysisReport,
    ClosureReport,
    ConflationSummary,
    DefectReport,
    ExactStructureReport,
    LongExactReport,
    OracleReport,
    Provenance,
    RoundtripReport,
    SectionReport,
    SubstructureSummary,
    SuiteReport,
)

__all__ = [
    # Input models
    "InputDescription",
    "QuiverSpec",
    "ArrowSpec",
    "RelationSpec",
    "TermSpec",
    "AtlasEntry",
    "Flags",
    # Report models
    "Provenance",
    "AnalysisReport",
    "SubstructureSummary",
    "ConflationSummary",
    "DefectReport",
    "ClosureReport",
    "RoundtripReport",
    "OracleReport",
    "ExactStructureReport",
    "LongExactReport",
    # Verification suite
    "SectionReport",
    "SuiteReport",
]
