"""Input parsing and workspace construction.

A workspace is everything one command needs: the field, the algebra, the
atlas with its category table, and the analysis service over it.
"""

import hashlib
import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path

from pydantic import ValidationError

from exstruct.core.config import Settings, get_settings
from exstruct.models.input import InputDescription
from exstruct.services.defectcore import DefectAnalysis
from exstruct.services.exactfield import DimensionMismatch, Field, NotPrime
from exstruct.services.funcat import CategoryTable
from exstruct.services.pathalg import (
    Algebra,
    Arrow,
    InvalidQuiver,
    NotAdmissible,
    NotHomogeneousRelation,
    Quiver,
    RelationSet,
    build_algebra,
)
from exstruct.services.repmod import RelationViolation, Representation
from exstruct.services.table_cache import get_table_cache

logger = logging.getLogger(__name__)


class ParseError(ValueError):
    """Raised when the input file cannot be read as an input description."""

    pass


class InvariantViolation(ValueError):
    """Raised when a well-formed description breaks a structural requirement."""

    pass


def parse_input(path: Path | str) -> InputDescription:
    """Read and validate an input JSON file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ParseError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        description = InputDescription.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise ParseError(f"{path}: {location}: {first['msg']}") from None
    if description.p is not None:
        try:
            Field(description.p)
        except NotPrime as exc:
            raise ParseError(f"{path}: p: {exc}") from None
    check_invariants(description)
    return description


def _quiver(description: InputDescription) -> Quiver:
    arrows = tuple(Arrow(a.name, a.source, a.target) for a in description.quiver.arrows)
    return Quiver(description.quiver.vertices, arrows)


def _relations(description: InputDescription, quiver: Quiver) -> RelationSet:
    bound = description.nilpotency_bound
    if bound is None:
        longest = quiver.longest_path()
        if longest is None:
            raise InvariantViolation("nilpotency_bound is required for quivers with cycles")
        bound = longest + 1
    raw = [[(t.coeff, t.path) for t in r.terms] for r in description.relations]
    return RelationSet.parse(quiver, raw, bound)


def check_invariants(description: InputDescription) -> None:
    """Quiver, relation and matrix-shape checks that need no field arithmetic."""
    try:
        quiver = _quiver(description)
        _relations(description, quiver)
    except (InvalidQuiver, NotAdmissible, NotHomogeneousRelation) as exc:
        raise InvariantViolation(str(exc)) from None
    for entry in description.atlas:
        if len(entry.dims) != quiver.vertex_count:
            raise InvariantViolation(
                f"atlas entry {entry.name!r}: {len(entry.dims)} dimensions for "
                f"{quiver.vertex_count} vertices"
            )
        for name, rows in entry.matrices.items():
            arrow = quiver.by_name.get(name)
            if arrow is None:
                raise InvariantViolation(f"atlas entry {entry.name!r}: unknown arrow {name!r}")
            expected = (entry.dims[arrow.target], entry.dims[arrow.source])
            shape = (len(rows), len(rows[0]) if rows else expected[1])
            if shape != expected or any(len(r) != expected[1] for r in rows):
                raise InvariantViolation(
                    f"atlas entry {entry.name!r}: arrow {name!r} needs shape {expected}"
                )


def input_hash(description: InputDescription, p: int) -> str:
    payload = description.model_dump_json(exclude={"samples", "seed"})
    return hashlib.sha256(f"{p}|{payload}".encode()).hexdigest()[:16]


@dataclass
class Workspace:
    description: InputDescription
    field: Field
    algebra: Algebra
    table: CategoryTable
    analysis: DefectAnalysis
    input_hash: str
    seed: int
    samples: int

    @property
    def atlas(self) -> tuple[Representation, ...]:
        return self.table.atlas


def build_workspace(
    description: InputDescription,
    settings: Settings | None = None,
    p: int | None = None,
    seed: int | None = None,
    samples: int | None = None,
    use_cache: bool = True,
) -> Workspace:
    """Reduce the description mod p and build the category table over it."""
    settings = settings or get_settings()
    p = p or description.p or settings.default_prime
    try:
        field = Field(p)
    except NotPrime as exc:
        raise ParseError(str(exc)) from None
    digest = input_hash(description, p)
    cache = get_table_cache()
    if use_cache and settings.cache_enabled:
        cache.open(settings.lancedb_path, digest)

    started = time.perf_counter()
    quiver = _quiver(description)
    algebra = build_algebra(quiver, _relations(description, quiver), field)
    atlas = []
    for entry in description.atlas:
        try:
            atlas.append(
                Representation.build(algebra, entry.dims, entry.matrices, name=entry.name)
            )
        except (DimensionMismatch, RelationViolation) as exc:
            raise InvariantViolation(str(exc)) from None
    allow_small = (
        description.flags.allow_small_characteristic or settings.allow_small_characteristic
    )
    table = CategoryTable(atlas, allow_small_characteristic=allow_small)
    seed = description.seed if seed is None else seed
    seed = settings.default_seed if seed is None else seed
    samples = description.samples if samples is None else samples
    samples = settings.default_samples if samples is None else samples
    analysis = DefectAnalysis(
        table,
        full_module_category=description.flags.full_module_category,
        seed=seed,
        settings=settings,
    )
    logger.info(
        "workspace %s: p = %d, dim A = %d, %d atlas objects in %.2fs",
        digest,
        p,
        algebra.dim,
        table.size,
        time.perf_counter() - started,
    )
    return Workspace(description, field, algebra, table, analysis, digest, seed, samples)


def load_workspace(path: Path | str, **overrides) -> Workspace:
    return build_workspace(parse_input(path), **overrides)
