"""Input description models.

One JSON document describes the field, the bound quiver and the atlas. Integer
data is kept as given; reduction mod p happens when the workspace is built, so
the same description can be re-read over another prime.
"""

from pydantic import BaseModel, Field, field_validator, model_validator


class ArrowSpec(BaseModel):
    name: str
    source: int
    target: int


class QuiverSpec(BaseModel):
    vertices: int = Field(ge=0)
    arrows: list[ArrowSpec] = Field(default_factory=list)


class TermSpec(BaseModel):
    """coeff times the path following ``path`` left to right."""

    coeff: int = 1
    path: list[str]


class RelationSpec(BaseModel):
    terms: list[TermSpec]


class AtlasEntry(BaseModel):
    name: str
    dims: list[int]
    # arrow name -> row-major matrix of shape (dims[target], dims[source]); missing arrows act by 0
    matrices: dict[str, list[list[int]]] = Field(default_factory=dict)

    @field_validator("dims")
    @classmethod
    def non_negative(cls, dims: list[int]) -> list[int]:
        if any(d < 0 for d in dims):
            raise ValueError("dimensions must be non-negative")
        return dims


class Flags(BaseModel):
    # The atlas lists every indecomposable module
    full_module_category: bool = False
    allow_small_characteristic: bool = False


class InputDescription(BaseModel):
    p: int | None = None
    quiver: QuiverSpec
    relations: list[RelationSpec] = Field(default_factory=list)
    nilpotency_bound: int | None = None
    atlas: list[AtlasEntry]
    flags: Flags = Field(default_factory=Flags)
    samples: int | None = Field(default=None, ge=0)
    seed: int | None = None

    @model_validator(mode="after")
    def unique_atlas_names(self) -> "InputDescription":
        names = [entry.name for entry in self.atlas]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"duplicate atlas names: {', '.join(duplicates)}")
        return self
