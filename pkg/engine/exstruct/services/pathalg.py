"""Bound quiver algebras A = F_p Q / I.

Paths are read left to right in arrow order: the path ``(a, b)`` first follows
``a`` then ``b``, so it starts at ``source(a)`` and ends at ``target(b)``.
The ideal is built degree by degree from the relations; the basis in each
degree is the set of non-pivot paths of the reduced ideal slice.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property

import galois
import numpy as np

from exstruct.services.exactfield import Field

logger = logging.getLogger(__name__)


class InvalidQuiver(ValueError):
    """Raised for vertex indices out of range or duplicate arrow names."""

    pass


class NotAdmissible(ValueError):
    """Raised when the relations do not generate an admissible ideal."""

    pass


class NotHomogeneousRelation(ValueError):
    """Raised when a relation mixes endpoints or path lengths."""

    pass


@dataclass(frozen=True)
class Arrow:
    name: str
    source: int
    target: int


@dataclass(frozen=True, order=True)
class Path:
    """A walk in the quiver; length-0 paths are the vertex idempotents."""

    source: int
    target: int
    arrows: tuple[str, ...] = ()

    @property
    def length(self) -> int:
        return len(self.arrows)

    def then(self, other: Path) -> Path | None:
        """Concatenation ``self`` followed by ``other``, or None if not composable."""
        if self.target != other.source:
            return None
        return Path(self.source, other.target, self.arrows + other.arrows)

    def __str__(self) -> str:
        if not self.arrows:
            return f"e{self.source}"
        return "".join(self.arrows)


@dataclass(frozen=True)
class Quiver:
    vertex_count: int
    arrows: tuple[Arrow, ...] = ()

    def __post_init__(self):
        if self.vertex_count < 0:
            raise InvalidQuiver("vertex count must be non-negative")
        names = set()
        for arrow in self.arrows:
            if arrow.name in names:
                raise InvalidQuiver(f"duplicate arrow name {arrow.name!r}")
            names.add(arrow.name)
            for end in (arrow.source, arrow.target):
                if not 0 <= end < self.vertex_count:
                    raise InvalidQuiver(f"arrow {arrow.name!r} uses vertex {end} out of range")

    @cached_property
    def by_name(self) -> dict[str, Arrow]:
        return {a.name: a for a in self.arrows}

    def path(self, names: Sequence[str], source: int | None = None) -> Path:
        """Resolve a sequence of arrow names into a Path."""
        if not names:
            if source is None:
                raise InvalidQuiver("a trivial path needs an explicit vertex")
            return Path(source, source, ())
        try:
            arrows = [self.by_name[n] for n in names]
        except KeyError as exc:
            raise InvalidQuiver(f"unknown arrow {exc.args[0]!r}") from None
        for first, second in zip(arrows, arrows[1:]):
            if first.target != second.source:
                raise InvalidQuiver(f"arrows {first.name!r} and {second.name!r} do not compose")
        return Path(arrows[0].source, arrows[-1].target, tuple(names))

    def paths(self, length: int) -> list[Path]:
        """All paths of the given length, ordered by source then arrow sequence."""
        current = [Path(v, v, ()) for v in range(self.vertex_count)]
        for _ in range(length):
            current = [
                Path(p.source, a.target, p.arrows + (a.name,))
                for p in current
                for a in self.arrows
                if a.source == p.target
            ]
        return current

    def longest_path(self) -> int | None:
        """Length of the longest path, or None when the quiver has an oriented cycle."""
        length = 0
        while self.paths(length + 1):
            length += 1
            if length > self.vertex_count:
                return None
        return length


@dataclass(frozen=True)
class Relation:
    """A linear combination of parallel paths of equal length."""

    terms: tuple[tuple[int, Path], ...]

    @property
    def source(self) -> int:
        return self.terms[0][1].source

    @property
    def target(self) -> int:
        return self.terms[0][1].target

    @property
    def length(self) -> int:
        return self.terms[0][1].length


@dataclass(frozen=True)
class RelationSet:
    relations: tuple[Relation, ...]
    nilpotency: int

    @classmethod
    def parse(
        cls,
        quiver: Quiver,
        relations: Iterable[Sequence[tuple[int, Sequence[str]]]],
        nilpotency: int,
    ) -> RelationSet:
        """Build from ``[(coeff, arrow names), ...]`` lists, validating homogeneity."""
        parsed = []
        for raw in relations:
            terms = tuple((int(c), quiver.path(names)) for c, names in raw)
            if not terms:
                continue
            ends = {(p.source, p.target) for _, p in terms}
            if len(ends) > 1:
                raise NotHomogeneousRelation(f"relation mixes endpoints {sorted(ends)}")
            lengths = {p.length for _, p in terms}
            if len(lengths) > 1:
                raise NotHomogeneousRelation(f"relation mixes path lengths {sorted(lengths)}")
            if min(lengths) < 2:
                raise NotAdmissible("relations must consist of paths of length at least 2")
            parsed.append(Relation(terms))
        if nilpotency < 1:
            raise NotAdmissible("nilpotency bound must be at least 1")
        return cls(tuple(parsed), int(nilpotency))


@dataclass(frozen=True, eq=False, repr=False)
class Algebra:
    """A finite-dimensional bound quiver algebra with a path basis."""

    quiver: Quiver
    field: Field
    relations: RelationSet
    basis: tuple[Path, ...]
    # Coordinates (over ``basis``) of every non-basis path of length < N
    reductions: Mapping[Path, galois.FieldArray]

    @cached_property
    def index(self) -> dict[Path, int]:
        return {p: i for i, p in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def nilpotency(self) -> int:
        return self.relations.nilpotency

    @cached_property
    def _memos(self) -> dict[str, dict]:
        return {}

    def memo(self, name: str) -> dict:
        """A named cache of derived data, released together with the algebra."""
        return self._memos.setdefault(name, {})

    @cached_property
    def signature(self) -> str:
        """Quiver and relations as text; distinguishes algebras in cache keys."""
        arrows = ",".join(f"{a.name}:{a.source}>{a.target}" for a in self.quiver.arrows)
        relations = ";".join(
            "+".join(f"{c}*{p}" for c, p in r.terms) for r in self.relations.relations
        )
        return f"{self.field.p}|{self.quiver.vertex_count}|{arrows}|{relations}|{self.nilpotency}"

    def basis_between(self, source: int, target: int) -> list[Path]:
        """Basis paths from ``source`` to ``target`` (a basis of e_target A e_source)."""
        return [p for p in self.basis if p.source == source and p.target == target]

    def reduce(self, path: Path) -> galois.FieldArray:
        """Coordinates of a path in the basis."""
        if path.length >= self.nilpotency:
            return self.field.zero_vector(self.dim)
        if path in self.index:
            return self.field.unit_vector(self.dim, self.index[path])
        return self.reductions[path]

    def multiply(self, i: int, j: int) -> galois.FieldArray:
        """Product of basis elements i and j (i first, then j)."""
        joined = self.basis[i].then(self.basis[j])
        if joined is None:
            return self.field.zero_vector(self.dim)
        return self.reduce(joined)

    def product(self, x: np.ndarray, y: np.ndarray) -> galois.FieldArray:
        out = self.field.zero_vector(self.dim)
        for i in np.flatnonzero(x.view(np.ndarray)):
            for j in np.flatnonzero(y.view(np.ndarray)):
                out = out + x[i] * y[j] * self.multiply(int(i), int(j))
        return out

    @cached_property
    def structure_constants(self) -> galois.FieldArray:
        """Array T with T[i, j] the coordinates of basis[i] * basis[j]."""
        n = self.dim
        table = np.zeros((n, n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                table[i, j] = self.multiply(i, j).view(np.ndarray)
        return self.field.GF(table)

    def is_associative(self) -> bool:
        f = self.field
        n = self.dim
        units = [f.unit_vector(n, i) for i in range(n)]
        for i in range(n):
            for j in range(n):
                left = self.multiply(i, j)
                for k in range(n):
                    lhs = self.product(left, units[k])
                    rhs = self.product(units[i], self.multiply(j, k))
                    if not f.equal(lhs, rhs):
                        return False
        return True

    def radical_power_vanishes(self, power: int) -> bool:
        """True if every product of ``power`` arrows is zero in A."""
        return all(self.field.is_zero(self.reduce(p)) for p in self.quiver.paths(power))


def build_algebra(quiver: Quiver, relations: RelationSet, field: Field) -> Algebra:
    """Degreewise construction of A = F_p Q / I with admissibility certificate."""
    bound = relations.nilpotency
    basis: list[Path] = []
    reductions: dict[Path, galois.FieldArray] = {}
    slices: list[tuple[list[Path], list[int], galois.FieldArray]] = []

    for degree in range(bound + 1):
        paths = quiver.paths(degree)
        position = {p: i for i, p in enumerate(paths)}
        generators = []
        for relation in relations.relations:
            if relation.length > degree:
                continue
            for prefix_len in range(degree - relation.length + 1):
                suffix_len = degree - relation.length - prefix_len
                for u in _paths_ending(quiver, relation.source, prefix_len):
                    for v in _paths_starting(quiver, relation.target, suffix_len):
                        row = np.zeros(len(paths), dtype=np.int64)
                        for coeff, term in relation.terms:
                            whole = u.then(term).then(v)
                            row[position[whole]] = (row[position[whole]] + coeff) % field.p
                        generators.append(row)
        if generators:
            ideal = field.GF(np.vstack(generators))
        else:
            ideal = field.zeros(0, len(paths))
        reduced, pivots, rank = field.rref(ideal)
        if degree == bound:
            if rank != len(paths):
                survivors = [str(p) for i, p in enumerate(paths) if i not in set(pivots)]
                raise NotAdmissible(
                    f"paths of length {bound} survive the ideal: {', '.join(survivors[:5])}"
                )
            break
        slices.append((paths, pivots, reduced))
        pivot_set = set(pivots)
        basis.extend(p for i, p in enumerate(paths) if i not in pivot_set)

    basis.sort(key=lambda p: (p.length, p.source, p.target, p.arrows))
    index = {p: i for i, p in enumerate(basis)}
    for paths, pivots, reduced in slices:
        pivot_set = set(pivots)
        for row, pc in enumerate(pivots):
            coords = field.zero_vector(len(basis))
            for col, path in enumerate(paths):
                if col in pivot_set:
                    continue
                coords[index[path]] = -reduced[row, col]
            reductions[paths[pc]] = coords

    algebra = Algebra(quiver, field, relations, tuple(basis), reductions)
    logger.debug("built algebra of dimension %d (bound %d)", algebra.dim, bound)
    return algebra


def _paths_ending(quiver: Quiver, vertex: int, length: int) -> list[Path]:
    return [p for p in quiver.paths(length) if p.target == vertex]


def _paths_starting(quiver: Quiver, vertex: int, length: int) -> list[Path]:
    return [p for p in quiver.paths(length) if p.source == vertex]
