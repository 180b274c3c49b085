"""Report models.

Reports carry only values that are deterministic for a fixed input and seed.
Lists are emitted in canonical (sorted) order; timings go to the log.
"""

from enum import Enum

from pydantic import BaseModel, Field


class Provenance(str, Enum):
    """Where a substructure came from."""

    FROM_SERRE = "from_serre"
    ORACLE = "oracle"
    CANDIDATE = "candidate"


class LongExactReport(BaseModel):
    """Exactness of the Hom/Ext sequence along a morphism of conflations."""

    objects_checked: int
    violations: list[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


class ConflationSummary(BaseModel):
    """One realized basis class of a substructure: start -> middle -> end."""

    start: str
    end: str
    middle: list[str]
    split: bool = False


class SubstructureSummary(BaseModel):
    serre: list[str]
    provenance: Provenance
    # "end,start" -> dimension of the subspace of E(end, start)
    dims: dict[str, int] = Field(default_factory=dict)
    conflations: list[ConflationSummary] = Field(default_factory=list)


class AnalysisReport(BaseModel):
    p: int
    algebra_dim: int
    atlas: list[str]
    # hom_dims[i][j] = dim Hom(X_i, X_j); ext_dims[c][a] = dim E(X_c, X_a)
    hom_dims: list[list[int]]
    ext_dims: list[list[int]]
    division_degrees: list[int]
    simple_defects: list[str]
    serre_count: int
    substructure_count: int
    substructures: list[SubstructureSummary] = Field(default_factory=list)


class DefectReport(BaseModel):
    end: str
    start: str
    coords: list[int]
    middle: list[str]
    dims: list[int]
    factors: dict[str, int]
    column_image_dims: list[int]
    split: bool


class ClosureReport(BaseModel):
    """Outcome of checking that a substructure is a closed subbifunctor."""

    serre: list[str] | None = None
    stability_checks: int = 0
    composites_checked: int = 0
    sequences_checked: int = 0
    violations: list[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


class RoundtripReport(BaseModel):
    serre_count: int
    substructure_count: int
    oracle_count: int | None = None
    oracle_matches: bool | None = None
    monotone: bool = True
    isomorphic: bool = True
    mismatches: list[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            not self.mismatches
            and self.monotone
            and self.isomorphic
            and self.oracle_matches is not False
        )


class OracleReport(BaseModel):
    oracle_count: int
    serre_count: int
    stable_count: int
    identical: bool
    only_oracle: list[str] = Field(default_factory=list)
    only_serre: list[str] = Field(default_factory=list)


class ExactStructureReport(BaseModel):
    full_module_category: bool
    ambient_is_maximal: bool
    note: str = ""
    serre_isomorphic: bool = True
    structures: list[SubstructureSummary] = Field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.structures)


class SectionReport(BaseModel):
    """One block of the verification suite."""

    name: str
    checked: int = 0
    failed: int = 0
    diagnostics: list[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def record(self, ok: bool, diagnostic: str = "") -> None:
        self.checked += 1
        if not ok:
            self.failed += 1
            if diagnostic:
                self.diagnostics.append(diagnostic)


class SuiteReport(BaseModel):
    seed: int
    samples: int
    sections: list[SectionReport] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.sections)
