"""Quiver representations, morphism spaces, radicals and Krull-Schmidt peeling.

A representation is covariant: the matrix of an arrow ``a: s -> t`` has shape
``(dims[t], dims[s])``. A morphism is a tuple of vertex matrices of shape
``(target.dims[v], source.dims[v])``. Morphism spaces are flattened vertex by
vertex, each block row-major, so ``vec(A X B) = (A kron B^T) vec(X)``.
"""

from __future__ import annotations

import hashlib
import logging
from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType

import galois
import numpy as np

from exstruct.services.exactfield import DimensionMismatch, Field, NoSolution, as_ints
from exstruct.services.pathalg import Algebra, Path
from exstruct.services.table_cache import get_table_cache

logger = logging.getLogger(__name__)


class RelationViolation(ValueError):
    """Raised when a representation does not satisfy the algebra's relations."""

    pass


class NotCommuting(ValueError):
    """Raised when vertex maps do not commute with the arrow actions."""

    pass


class CharacteristicTooSmall(ValueError):
    """Raised when p is too small for the radical computation in use."""

    pass


class AtlasIncomplete(ValueError):
    """Raised when no atlas member splits off a nonzero remainder."""

    pass


# ==================== Representations ====================


@dataclass(frozen=True, eq=False, repr=False)
class Representation:
    """A module over a bound quiver algebra, given by vertex spaces and arrow matrices."""

    algebra: Algebra
    dims: tuple[int, ...]
    arrows: Mapping[str, galois.FieldArray]
    name: str = ""

    def __post_init__(self):
        quiver = self.algebra.quiver
        if len(self.dims) != quiver.vertex_count:
            raise DimensionMismatch(
                f"{self.label}: {len(self.dims)} dimensions for {quiver.vertex_count} vertices"
            )
        for arrow in quiver.arrows:
            matrix = self.arrows.get(arrow.name)
            expected = (self.dims[arrow.target], self.dims[arrow.source])
            if matrix is None or matrix.shape != expected:
                got = None if matrix is None else matrix.shape
                raise DimensionMismatch(
                    f"{self.label}: arrow {arrow.name!r} needs shape {expected}, got {got}"
                )
        f = self.field
        for relation in self.algebra.relations.relations:
            total = f.zeros(self.dims[relation.target], self.dims[relation.source])
            for coeff, path in relation.terms:
                total = total + f.scalar(coeff) * self.evaluate(path)
            if not f.is_zero(total):
                raise RelationViolation(f"{self.label}: relation at {relation.source} fails")

    @classmethod
    def build(
        cls,
        algebra: Algebra,
        dims: Sequence[int],
        matrices: Mapping[str, object] | None = None,
        name: str = "",
    ) -> Representation:
        """Build from integer data; arrows missing from ``matrices`` act by zero."""
        matrices = matrices or {}
        unknown = set(matrices) - set(algebra.quiver.by_name)
        if unknown:
            raise DimensionMismatch(f"{name or 'representation'}: unknown arrows {sorted(unknown)}")
        dims = tuple(int(d) for d in dims)
        if len(dims) != algebra.quiver.vertex_count:
            raise DimensionMismatch(
                f"{name or 'representation'}: {len(dims)} dimensions for "
                f"{algebra.quiver.vertex_count} vertices"
            )
        arrows = {}
        for arrow in algebra.quiver.arrows:
            shape = (dims[arrow.target], dims[arrow.source])
            data = matrices.get(arrow.name)
            if data is None:
                arrows[arrow.name] = algebra.field.zeros(*shape)
            else:
                arrows[arrow.name] = algebra.field.matrix(data, shape=shape)
        return cls(algebra, dims, MappingProxyType(arrows), name)

    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def label(self) -> str:
        return self.name or f"rep{list(self.dims)}"

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def evaluate(self, path: Path) -> galois.FieldArray:
        """Matrix of the action of a path, shape (dims[target], dims[source])."""
        f = self.field
        result = f.identity(self.dims[path.source])
        for name in path.arrows:
            result = f.mul(self.arrows[name], result)
        return result

    @cached_property
    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(f"{self.algebra.signature}|{self.dims}".encode())
        for name in sorted(self.arrows):
            digest.update(name.encode())
            digest.update(as_ints(self.arrows[name]).tobytes())
        return digest.hexdigest()[:32]

    def renamed(self, name: str) -> Representation:
        return Representation(self.algebra, self.dims, self.arrows, name)

    def __repr__(self) -> str:
        return f"Representation({self.label}, dims={list(self.dims)})"


@dataclass(frozen=True, eq=False, repr=False)
class RepMorphism:
    source: Representation
    target: Representation
    maps: tuple[galois.FieldArray, ...]

    def __post_init__(self):
        f = self.source.field
        for v, m in enumerate(self.maps):
            if m.shape != (self.target.dims[v], self.source.dims[v]):
                raise DimensionMismatch(
                    f"vertex {v}: map of shape {m.shape} between dims "
                    f"{self.source.dims[v]} -> {self.target.dims[v]}"
                )
        if len(self.maps) != len(self.source.dims):
            raise DimensionMismatch("one vertex map per vertex is required")
        for arrow in self.source.algebra.quiver.arrows:
            s, t = arrow.source, arrow.target
            lhs = f.mul(self.target.arrows[arrow.name], self.maps[s])
            rhs = f.mul(self.maps[t], self.source.arrows[arrow.name])
            if not f.equal(lhs, rhs):
                raise NotCommuting(f"map does not commute with arrow {arrow.name!r}")

    @property
    def field(self) -> Field:
        return self.source.field

    def flatten(self) -> galois.FieldArray:
        parts = [as_ints(m).reshape(-1) for m in self.maps]
        raw = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
        return self.field.GF(raw)

    def is_zero(self) -> bool:
        return all(self.field.is_zero(m) for m in self.maps)

    def __repr__(self) -> str:
        return f"RepMorphism({self.source.label} -> {self.target.label})"


def unflatten(source: Representation, target: Representation, vector: np.ndarray) -> RepMorphism:
    maps = []
    offset = 0
    for m, n in zip(source.dims, target.dims):
        block = vector[offset : offset + n * m]
        maps.append(source.field.GF(as_ints(block).reshape(n, m)))
        offset += n * m
    return RepMorphism(source, target, tuple(maps))


def identity(rep: Representation) -> RepMorphism:
    f = rep.field
    return RepMorphism(rep, rep, tuple(f.identity(d) for d in rep.dims))


def zero_morphism(source: Representation, target: Representation) -> RepMorphism:
    f = source.field
    maps = tuple(f.zeros(n, m) for m, n in zip(source.dims, target.dims))
    return RepMorphism(source, target, maps)


def compose(g: RepMorphism, f: RepMorphism) -> RepMorphism:
    """g after f."""
    if g.source.dims != f.target.dims:
        raise DimensionMismatch(f"cannot compose {g!r} after {f!r}")
    fld = f.field
    return RepMorphism(f.source, g.target, tuple(fld.mul(a, b) for a, b in zip(g.maps, f.maps)))


def add(f: RepMorphism, g: RepMorphism) -> RepMorphism:
    return RepMorphism(f.source, f.target, tuple(a + b for a, b in zip(f.maps, g.maps)))


def subtract(f: RepMorphism, g: RepMorphism) -> RepMorphism:
    return RepMorphism(f.source, f.target, tuple(a - b for a, b in zip(f.maps, g.maps)))


def is_isomorphism(f: RepMorphism) -> bool:
    fld = f.field
    return all(m.shape[0] == m.shape[1] and fld.rank(m) == m.shape[0] for m in f.maps)


def inverse(f: RepMorphism) -> RepMorphism:
    fld = f.field
    try:
        maps = tuple(fld.inverse(m) for m in f.maps)
    except (NoSolution, DimensionMismatch) as exc:
        raise NoSolution(f"{f!r} is not an isomorphism") from exc
    return RepMorphism(f.target, f.source, maps)


def same_morphism(f: RepMorphism, g: RepMorphism) -> bool:
    return all(f.field.equal(a, b) for a, b in zip(f.maps, g.maps))


# ==================== Standard modules ====================


def projective(algebra: Algebra, vertex: int) -> Representation:
    """The indecomposable projective P_v = e_v A, spanned by basis paths leaving v."""
    cached = algebra.memo("projectives")
    if vertex in cached:
        return cached[vertex]
    f = algebra.field
    n = algebra.quiver.vertex_count
    spaces = [algebra.basis_between(vertex, w) for w in range(n)]
    arrows = {}
    for arrow in algebra.quiver.arrows:
        columns = []
        rows = [algebra.index[p] for p in spaces[arrow.target]]
        for path in spaces[arrow.source]:
            extended = path.then(Path(arrow.source, arrow.target, (arrow.name,)))
            columns.append(algebra.reduce(extended)[rows])
        arrows[arrow.name] = f.hstack(
            [c.reshape(-1, 1) for c in columns], len(rows)
        ).reshape(len(rows), len(columns))
    dims = tuple(len(s) for s in spaces)
    rep = Representation(algebra, dims, MappingProxyType(arrows), f"P{vertex}")
    cached[vertex] = rep
    return rep


def simple(algebra: Algebra, vertex: int) -> Representation:
    dims = [0] * algebra.quiver.vertex_count
    dims[vertex] = 1
    return Representation.build(algebra, dims, name=f"S{vertex}")


def zero_representation(algebra: Algebra) -> Representation:
    return Representation.build(algebra, [0] * algebra.quiver.vertex_count, name="0")


@dataclass(frozen=True)
class DirectSum:
    rep: Representation
    injections: tuple[RepMorphism, ...]
    projections: tuple[RepMorphism, ...]


def direct_sum(reps: Sequence[Representation], name: str = "") -> DirectSum:
    """Direct sum with vertex spaces concatenated in the given order."""
    if not reps:
        raise DimensionMismatch("direct sum of an empty list")
    algebra = reps[0].algebra
    f = algebra.field
    n = algebra.quiver.vertex_count
    dims = tuple(sum(r.dims[v] for r in reps) for v in range(n))
    arrows = {
        a.name: f.block_diag([r.arrows[a.name] for r in reps]) for a in algebra.quiver.arrows
    }
    total = Representation(
        algebra, dims, MappingProxyType(arrows), name or "+".join(r.label for r in reps)
    )
    injections, projections = [], []
    offsets = [0] * n
    for r in reps:
        inj, proj = [], []
        for v in range(n):
            block = f.zeros(dims[v], r.dims[v])
            block[offsets[v] : offsets[v] + r.dims[v]] = f.identity(r.dims[v])
            inj.append(block)
            proj.append(block.T.copy())
            offsets[v] += r.dims[v]
        injections.append(RepMorphism(r, total, tuple(inj)))
        projections.append(RepMorphism(total, r, tuple(proj)))
    return DirectSum(total, tuple(injections), tuple(projections))


# ==================== Kernels and quotients ====================


def submodule(rep: Representation, bases: Sequence[np.ndarray], name: str = "") -> tuple[
    Representation, RepMorphism
]:
    """The subrepresentation spanned by per-vertex column bases, with its inclusion."""
    f = rep.field
    arrows = {}
    for arrow in rep.algebra.quiver.arrows:
        s, t = arrow.source, arrow.target
        image = f.mul(rep.arrows[arrow.name], bases[s])
        arrows[arrow.name] = f.mul(f.left_inverse(bases[t]), image)
    dims = tuple(b.shape[1] for b in bases)
    sub = Representation(rep.algebra, dims, MappingProxyType(arrows), name)
    return sub, RepMorphism(sub, rep, tuple(bases))


def quotient(rep: Representation, bases: Sequence[np.ndarray], name: str = "") -> tuple[
    Representation, RepMorphism
]:
    """rep / U for a subrepresentation U given by per-vertex bases, with the projection."""
    f = rep.field
    quotients = [f.quotient_basis(b, f.identity(d)) for b, d in zip(bases, rep.dims)]
    arrows = {}
    for arrow in rep.algebra.quiver.arrows:
        s, t = arrow.source, arrow.target
        arrows[arrow.name] = f.mul(
            quotients[t].projection, f.mul(rep.arrows[arrow.name], quotients[s].complement)
        )
    dims = tuple(q.dim for q in quotients)
    quo = Representation(rep.algebra, dims, MappingProxyType(arrows), name)
    return quo, RepMorphism(rep, quo, tuple(q.projection for q in quotients))


def kernel(f: RepMorphism) -> tuple[Representation, RepMorphism]:
    fld = f.field
    return submodule(f.source, [fld.kernel_basis(m) for m in f.maps])


def image(f: RepMorphism) -> tuple[Representation, RepMorphism]:
    fld = f.field
    return submodule(f.target, [fld.image_basis(m) for m in f.maps])


def cokernel(f: RepMorphism) -> tuple[Representation, RepMorphism]:
    fld = f.field
    return quotient(f.target, [fld.image_basis(m) for m in f.maps])


def factor_through_quotient(projection: RepMorphism, h: RepMorphism) -> RepMorphism:
    """The map h' with h' . projection = h, for a surjective ``projection``."""
    fld = h.field
    maps = tuple(fld.mul(hm, fld.right_inverse(pm)) for hm, pm in zip(h.maps, projection.maps))
    induced = RepMorphism(projection.target, h.target, maps)
    if not same_morphism(compose(induced, projection), h):
        raise NotCommuting("map does not vanish on the kernel of the projection")
    return induced


# ==================== Morphism spaces ====================


@dataclass(frozen=True, eq=False, repr=False)
class HomSpace:
    """Hom(source, target) with a canonical basis stored as flattened columns."""

    source: Representation
    target: Representation
    matrix: galois.FieldArray

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def field(self) -> Field:
        return self.source.field

    @cached_property
    def basis(self) -> tuple[RepMorphism, ...]:
        return tuple(
            unflatten(self.source, self.target, self.matrix[:, k]) for k in range(self.dim)
        )

    @cached_property
    def _left_inverse(self) -> galois.FieldArray:
        return self.field.left_inverse(self.matrix)

    def coordinates(self, f: RepMorphism) -> galois.FieldArray:
        return self.field.mul(self._left_inverse, f.flatten())

    def element(self, coeffs: np.ndarray) -> RepMorphism:
        return unflatten(self.source, self.target, self.field.mul(self.matrix, coeffs))

    def contains(self, f: RepMorphism) -> bool:
        return self.field.contains(self.matrix, f.flatten())

    def random(self, rng: np.random.Generator) -> RepMorphism:
        return self.element(self.field.random_vector(self.dim, rng))

    def __repr__(self) -> str:
        return f"HomSpace({self.source.label} -> {self.target.label}, dim={self.dim})"


def hom_space(source: Representation, target: Representation) -> HomSpace:
    """Basis of all commuting vertex tuples, from the kernel of the commutation system."""
    if source.algebra.quiver != target.algebra.quiver:
        raise DimensionMismatch("representations of different quivers")
    cache = get_table_cache()
    key = (source.fingerprint, target.fingerprint)
    matrix = cache.get(key, source.field)
    if matrix is None:
        matrix = _commutation_kernel(source, target)
        cache.put(key, matrix)
    return HomSpace(source, target, matrix)


def _commutation_kernel(source: Representation, target: Representation) -> galois.FieldArray:
    f = source.field
    m, n = source.dims, target.dims
    offsets = np.cumsum([0] + [a * b for a, b in zip(m, n)])
    unknowns = int(offsets[-1])
    if unknowns == 0:
        return f.zeros(0, 0)
    blocks = []
    for arrow in source.algebra.quiver.arrows:
        s, t = arrow.source, arrow.target
        rows = n[t] * m[s]
        if rows == 0:
            continue
        system = np.zeros((rows, unknowns), dtype=np.int64)
        # N_a phi_s - phi_t M_a = 0
        push = f.kron(target.arrows[arrow.name], f.identity(m[s]))
        pull = -f.kron(f.identity(n[t]), source.arrows[arrow.name].T)
        if s == t:
            system[:, offsets[s] : offsets[s + 1]] = as_ints(push + pull)
        else:
            system[:, offsets[s] : offsets[s + 1]] = as_ints(push)
            system[:, offsets[t] : offsets[t + 1]] = as_ints(pull)
        blocks.append(system)
    if not blocks:
        return f.identity(unknowns)
    return f.kernel_basis(f.GF(np.vstack(blocks)))


def solve_for_morphism(
    source: Representation,
    target: Representation,
    constraints: Sequence[tuple[RepMorphism | None, RepMorphism | None, RepMorphism]],
) -> RepMorphism | None:
    """Find h: source -> target with ``post . h . pre = rhs`` for every constraint.

    ``post`` or ``pre`` may be None for an identity. Returns None if no such h exists.
    """
    hom = hom_space(source, target)
    f = source.field
    rows = []
    rhs = []
    for post, pre, value in constraints:
        images = []
        for h in hom.basis:
            composite = h if pre is None else compose(h, pre)
            composite = composite if post is None else compose(post, composite)
            images.append(composite.flatten().reshape(-1, 1))
        rows.append(f.hstack(images, value.flatten().shape[0]))
        rhs.append(value.flatten())
    if not rows:
        return hom.element(f.zero_vector(hom.dim))
    system = f.vstack(rows, hom.dim)
    target_vector = f.GF(np.concatenate([as_ints(r) for r in rhs]))
    try:
        coeffs = f.solve(system, target_vector)
    except NoSolution:
        return None
    return hom.element(coeffs)


# ==================== Radicals ====================


@dataclass(frozen=True)
class Radical:
    """rad End(M) as columns of coordinates in ``hom``'s basis."""

    hom: HomSpace
    basis: galois.FieldArray
    method: str

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def contains(self, coords: np.ndarray) -> bool:
        return self.hom.field.contains(self.basis, coords)


def _trace_form_applies(rep: Representation, end_dim: int) -> bool:
    return rep.field.p > max(rep.total_dim, end_dim)


def end_radical(rep: Representation, allow_small_characteristic: bool = False) -> Radical:
    """Jacobson radical of End(rep)."""
    end = hom_space(rep, rep)
    f = rep.field
    if end.dim == 0:
        return Radical(end, f.zeros(0, 0), "trace")
    if _trace_form_applies(rep, end.dim):
        gram = f.zeros(end.dim, end.dim)
        for i, a in enumerate(end.basis):
            for j, b in enumerate(end.basis):
                gram[i, j] = sum(f.trace(f.mul(x, y)) for x, y in zip(a.maps, b.maps)) % f.p
        return Radical(end, f.kernel_basis(gram), "trace")
    if not allow_small_characteristic:
        raise CharacteristicTooSmall(
            f"p = {f.p} must exceed max(dim, dim End) = {max(rep.total_dim, end.dim)} "
            f"for {rep.label}; enable allow_small_characteristic for local rings"
        )
    local = _local_radical(end)
    if local is None:
        raise CharacteristicTooSmall(
            f"End({rep.label}) is not a split local ring; its radical needs p > "
            f"{max(rep.total_dim, end.dim)}"
        )
    return Radical(end, local, "local")


def is_indecomposable(rep: Representation, allow_small_characteristic: bool = False) -> bool:
    if rep.is_zero():
        return False
    end = hom_space(rep, rep)
    if _trace_form_applies(rep, end.dim):
        return end.dim - end_radical(rep).dim == 1
    if not allow_small_characteristic:
        raise CharacteristicTooSmall(
            f"p = {rep.field.p} too small to decide indecomposability of {rep.label}"
        )
    return _local_radical(end) is not None


def _scalar_part(f: RepMorphism) -> int | None:
    """The eigenvalue of an endomorphism with a single F_p eigenvalue, else None.

    Reads lambda from the minimal polynomial (t - lambda)^k of a Krylov sequence:
    with k = p^e m, the coefficient of t^(k - p^e) is -m lambda.
    """
    fld = f.field
    p = fld.p
    matrix = fld.block_diag(f.maps)
    n = matrix.shape[0]
    krylov = [fld.unit_vector(n, 0)]
    while True:
        nxt = fld.mul(matrix, krylov[-1])
        basis = fld.hstack([v.reshape(-1, 1) for v in krylov], n)
        try:
            coeffs = fld.solve(basis, nxt)
            break
        except NoSolution:
            krylov.append(nxt)
    k = len(krylov)
    step = 1
    while k % (step * p) == 0:
        step *= p
    m = k // step
    lam = int(coeffs[k - step]) * pow(m, -1, p) % p
    shifted = matrix - fld.scalar(lam) * fld.identity(n)
    power = shifted
    for _ in range(n):
        if fld.is_zero(power):
            return lam
        power = fld.mul(power, shifted)
    return lam if fld.is_zero(power) else None


def _flat_dim(rep: Representation) -> int:
    return sum(d * d for d in rep.dims)


def _local_radical(end: HomSpace) -> galois.FieldArray | None:
    """Radical of a split local End(M) as coordinate columns, or None if not local."""
    f = end.field
    rep = end.source
    ident = end.coordinates(identity(rep))
    columns = []
    for k, g in enumerate(end.basis):
        lam = _scalar_part(g)
        if lam is None:
            return None
        unit = f.unit_vector(end.dim, k)
        columns.append((unit - f.scalar(lam) * ident).reshape(-1, 1))
    ideal = f.image_basis(f.hstack(columns, end.dim))
    if ideal.shape[1] != end.dim - 1:
        return None
    members = [end.element(ideal[:, j]) for j in range(ideal.shape[1])]
    for n_elem in members:
        for g in end.basis:
            for product in (compose(n_elem, g), compose(g, n_elem)):
                if not f.contains(ideal, end.coordinates(product)):
                    return None
    power = members
    for _ in range(end.dim + 1):
        if all(x.is_zero() for x in power):
            return ideal
        power = [compose(a, b) for a in power for b in members]
        flat = [x.flatten().reshape(-1, 1) for x in power]
        span = f.image_basis(f.hstack(flat, _flat_dim(rep)))
        power = [unflatten(rep, rep, span[:, j]) for j in range(span.shape[1])]
    return None


# ==================== Krull-Schmidt ====================


@dataclass(frozen=True)
class Summand:
    index: int
    section: RepMorphism  # X_index -> B
    retraction: RepMorphism  # B -> X_index


@dataclass(frozen=True)
class Decomposition:
    """B as a sum of atlas members; retraction_i . section_j = delta_ij."""

    source: Representation
    summands: tuple[Summand, ...]

    @property
    def multiplicities(self) -> Counter:
        return Counter(s.index for s in self.summands)

    @property
    def indices(self) -> list[int]:
        return sorted(s.index for s in self.summands)


def krull_schmidt_decompose(rep: Representation, atlas: Sequence[Representation]) -> Decomposition:
    """Peel atlas summands off ``rep`` until nothing remains.

    X splits off R when some g . f with f: X -> R, g: R -> X is invertible;
    then h = (g f)^-1 g is a retraction and R = X + ker h.
    """
    remainder = rep
    into = identity(rep)  # rep -> remainder
    out = identity(rep)  # remainder -> rep
    summands: list[Summand] = []
    while not remainder.is_zero():
        split = _find_split(remainder, atlas)
        if split is None:
            raise AtlasIncomplete(
                f"no atlas member splits off the remainder with dims {list(remainder.dims)} "
                f"of {rep.label}"
            )
        index, f, g = split
        h = compose(inverse(compose(g, f)), g)
        summands.append(Summand(index, compose(out, f), compose(h, into)))
        rest, incl = kernel(h)
        fld = rep.field
        complement = subtract(identity(remainder), compose(f, h))
        proj = RepMorphism(
            remainder,
            rest,
            tuple(
                fld.mul(fld.left_inverse(i), c) for i, c in zip(incl.maps, complement.maps)
            ),
        )
        out = compose(out, incl)
        into = compose(proj, into)
        remainder = rest
    logger.debug("decomposed %s into %s", rep.label, [s.index for s in summands])
    return Decomposition(rep, tuple(summands))


def _find_split(
    remainder: Representation, atlas: Sequence[Representation]
) -> tuple[int, RepMorphism, RepMorphism] | None:
    for index, member in enumerate(atlas):
        if any(a > b for a, b in zip(member.dims, remainder.dims)):
            continue
        into = hom_space(member, remainder)
        back = hom_space(remainder, member)
        for f in into.basis:
            for g in back.basis:
                if is_isomorphism(compose(g, f)):
                    return index, f, g
    return None
