"""Ext groups, conflations and morphisms of conflations.

E(C, A) is computed from the top-based projective presentation
``0 -> Omega -> P0 -> C -> 0`` as the cokernel of restriction
``Hom(P0, A) -> Hom(Omega, A)``. A class is a coordinate vector over a fixed
complement of the boundaries; its cocycle is the corresponding map
``Omega -> A``. Conflations are short exact sequences of representations.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import galois
import numpy as np

from exstruct.models.report import LongExactReport
from exstruct.services.exactfield import NoSolution, Quotient, as_ints
from exstruct.services.repmod import (
    HomSpace,
    RepMorphism,
    Representation,
    compose,
    cokernel,
    direct_sum,
    factor_through_quotient,
    hom_space,
    identity,
    is_isomorphism,
    kernel,
    projective,
    same_morphism,
    solve_for_morphism,
    subtract,
    zero_representation,
)
from exstruct.services.table_cache import get_table_cache

logger = logging.getLogger(__name__)


class NotAConflation(ValueError):
    """Raised when a pair of maps is not a short exact sequence of the expected class."""

    pass


class WeakPullbackFailure(RuntimeError):
    """Raised when a weak pullback has no mediating map."""

    pass


class NotAMorphism(ValueError):
    """Raised when (a, b, c) does not define a morphism of conflations."""

    pass


class NoCompletion(RuntimeError):
    """Raised when a partial morphism of conflations cannot be completed."""

    pass


# ==================== Presentations ====================


@dataclass(frozen=True, eq=False, repr=False)
class ProjectivePresentation:
    """Omega -> P0 -> M with P0 a sum of vertex projectives, one per top basis vector."""

    module: Representation
    generators: tuple[tuple[int, galois.FieldArray], ...]
    cover: Representation
    surjection: RepMorphism
    syzygy: Representation
    inclusion: RepMorphism

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.generators)

    def __repr__(self) -> str:
        return f"ProjectivePresentation({self.module.label}, cover={list(self.cover.dims)})"


def map_from_cover(
    vertices: Sequence[int],
    cover: Representation,
    target: Representation,
    images: Sequence[np.ndarray],
) -> RepMorphism:
    """The map from a sum of projectives P_{v_j} sending the j-th generator e_{v_j} to images[j]."""
    algebra = cover.algebra
    f = cover.field
    maps = []
    for w in range(algebra.quiver.vertex_count):
        columns = []
        for v, image in zip(vertices, images):
            for path in algebra.basis_between(v, w):
                columns.append(f.mul(target.evaluate(path), image).reshape(-1, 1))
        maps.append(f.hstack(columns, target.dims[w]))
    return RepMorphism(cover, target, tuple(maps))


def _top_generators(module: Representation) -> list[tuple[int, galois.FieldArray]]:
    f = module.field
    generators = []
    for v in range(len(module.dims)):
        incoming = [module.arrows[a.name] for a in module.algebra.quiver.arrows if a.target == v]
        radical = f.image_basis(f.hstack(incoming, module.dims[v]))
        top = f.quotient_basis(radical, f.identity(module.dims[v]))
        generators.extend((v, top.complement[:, k]) for k in range(top.dim))
    return generators


def presentation(module: Representation) -> ProjectivePresentation:
    """Canonical projective presentation, shared by all modules with the same data."""
    memo = module.algebra.memo("presentations")
    cached = memo.get(module.fingerprint)
    if cached is not None:
        return cached
    algebra = module.algebra
    generators = _top_generators(module)
    if generators:
        cover = direct_sum([projective(algebra, v) for v, _ in generators], name="P0").rep
    else:
        cover = zero_representation(algebra)
    surjection = map_from_cover(
        [v for v, _ in generators], cover, module, [g for _, g in generators]
    )
    f = module.field
    for v, m in enumerate(surjection.maps):
        if f.rank(m) != module.dims[v]:
            raise NotAConflation(f"projective cover of {module.label} is not onto at vertex {v}")
    syzygy, inclusion = kernel(surjection)
    result = ProjectivePresentation(
        module, tuple(generators), cover, surjection, syzygy, inclusion
    )
    memo[module.fingerprint] = result
    return result


def lift_to_cover(pres: ProjectivePresentation, target: RepMorphism) -> RepMorphism:
    """h: P0 -> B with target . h = surjection, for a surjective ``target``: B -> M."""
    f = target.field
    images = []
    for v, m in pres.generators:
        try:
            images.append(f.solve(target.maps[v], m))
        except NoSolution as exc:
            raise NotAConflation(f"{target!r} is not onto at vertex {v}") from exc
    return map_from_cover(pres.vertices, pres.cover, target.source, images)


def syzygy_lift(
    c: RepMorphism, source: ProjectivePresentation, target: ProjectivePresentation
) -> RepMorphism:
    """The restriction Omega' -> Omega of a lift P0' -> P0 of c: C' -> C."""
    f = c.field
    images = []
    for v, m in source.generators:
        images.append(f.solve(target.surjection.maps[v], f.mul(c.maps[v], m)))
    top = map_from_cover(source.vertices, source.cover, target.cover, images)
    restricted = compose(top, source.inclusion)
    maps = tuple(
        f.mul(f.left_inverse(i), r) for i, r in zip(target.inclusion.maps, restricted.maps)
    )
    return RepMorphism(source.syzygy, target.syzygy, maps)


# ==================== Ext groups ====================


@dataclass(frozen=True, eq=False, repr=False)
class ExtGroup:
    """E(C, A) as cocycles Omega_C -> A modulo restrictions of maps P0 -> A."""

    source: Representation  # C
    target: Representation  # A
    presentation: ProjectivePresentation
    cocycles: HomSpace
    quotient: Quotient

    @property
    def dim(self) -> int:
        return self.quotient.dim

    @property
    def field(self):
        return self.source.field

    def cocycle(self, coords: np.ndarray) -> RepMorphism:
        return self.cocycles.element(self.field.mul(self.quotient.complement, coords))

    def classify(self, cocycle: RepMorphism) -> ExtClass:
        coords = self.field.mul(self.quotient.projection, self.cocycles.coordinates(cocycle))
        return ExtClass(self, coords)

    def element(self, coords) -> ExtClass:
        f = self.field
        if not isinstance(coords, galois.FieldArray):
            coords = f.matrix(list(coords))
        return ExtClass(self, coords.reshape(self.dim))

    def zero(self) -> ExtClass:
        return ExtClass(self, self.field.zero_vector(self.dim))

    def basis(self) -> list[ExtClass]:
        return [ExtClass(self, self.field.unit_vector(self.dim, k)) for k in range(self.dim)]

    def random(self, rng: np.random.Generator) -> ExtClass:
        return ExtClass(self, self.field.random_vector(self.dim, rng))

    def __repr__(self) -> str:
        return f"ExtGroup({self.source.label}, {self.target.label}, dim={self.dim})"


@dataclass(frozen=True, eq=False, repr=False)
class ExtClass:
    group: ExtGroup
    coords: galois.FieldArray

    @property
    def source(self) -> Representation:
        return self.group.source

    @property
    def target(self) -> Representation:
        return self.group.target

    @cached_property
    def cocycle(self) -> RepMorphism:
        return self.group.cocycle(self.coords)

    def is_zero(self) -> bool:
        return self.group.field.is_zero(self.coords)

    def __add__(self, other: ExtClass) -> ExtClass:
        return ExtClass(self.group, self.coords + other.coords)

    def scaled(self, c: int) -> ExtClass:
        return ExtClass(self.group, self.group.field.scalar(c) * self.coords)

    @property
    def key(self) -> tuple:
        return (
            self.source.fingerprint,
            self.target.fingerprint,
            tuple(int(x) for x in as_ints(self.coords)),
        )

    def __repr__(self) -> str:
        return f"ExtClass({self.source.label}, {self.target.label}, {list(as_ints(self.coords))})"


def same_class(first: ExtClass, second: ExtClass) -> bool:
    return (
        first.source.fingerprint == second.source.fingerprint
        and first.target.fingerprint == second.target.fingerprint
        and first.group.field.equal(first.coords, second.coords)
    )


def ext_group(source: Representation, target: Representation) -> ExtGroup:
    """E(source, target), memoised on the data of both arguments."""
    key = (source.fingerprint, target.fingerprint)
    memo = source.algebra.memo("ext_groups")
    cached = memo.get(key)
    if cached is not None:
        return cached
    f = source.field
    pres = presentation(source)
    cocycles = hom_space(pres.syzygy, target)
    cache = get_table_cache()
    stored = cache.get(key, f, kind="ext")
    if stored is None:
        on_cover = hom_space(pres.cover, target)
        restricted = [
            cocycles.coordinates(compose(h, pres.inclusion)).reshape(-1, 1)
            for h in on_cover.basis
        ]
        boundaries = f.hstack(restricted, cocycles.dim)
        quotient = f.quotient_basis(boundaries, f.identity(cocycles.dim))
        packed = f.hstack([quotient.complement, quotient.projection.T], cocycles.dim)
        cache.put(key, packed, kind="ext")
    else:
        q = stored.shape[1] // 2
        quotient = Quotient(complement=stored[:, :q], projection=stored[:, q:].T)
    group = ExtGroup(source, target, pres, cocycles, quotient)
    logger.debug("E(%s, %s) has dimension %d", source.label, target.label, group.dim)
    memo[key] = group
    return group


def pushout_ext(a: RepMorphism, delta: ExtClass, target: ExtGroup | None = None) -> ExtClass:
    """a_* delta in E(C, A')."""
    target = target or ext_group(delta.source, a.target)
    return target.classify(compose(a, delta.cocycle))


def pullback_ext(c: RepMorphism, delta: ExtClass, target: ExtGroup | None = None) -> ExtClass:
    """c^* delta in E(C', A) for c: C' -> C."""
    target = target or ext_group(c.source, delta.target)
    lift = syzygy_lift(c, target.presentation, delta.group.presentation)
    return target.classify(compose(delta.cocycle, lift))


def pushout_matrix(a: RepMorphism, source: ExtGroup, target: ExtGroup) -> galois.FieldArray:
    """Matrix of a_*: E(C, A) -> E(C, A')."""
    f = a.field
    columns = [pushout_ext(a, d, target).coords.reshape(-1, 1) for d in source.basis()]
    return f.hstack(columns, target.dim)


def pullback_matrix(c: RepMorphism, source: ExtGroup, target: ExtGroup) -> galois.FieldArray:
    """Matrix of c^*: E(C, A) -> E(C', A) for c: C' -> C."""
    f = c.field
    if source.dim == 0 or target.dim == 0:
        return f.zeros(target.dim, source.dim)
    lift = syzygy_lift(c, target.presentation, source.presentation)
    columns = [
        target.classify(compose(d.cocycle, lift)).coords.reshape(-1, 1) for d in source.basis()
    ]
    return f.hstack(columns, target.dim)


# ==================== Conflations ====================


@dataclass(frozen=True, eq=False, repr=False)
class ConflationClass:
    """A realization A -x-> B -y-> C of an Ext class."""

    delta: ExtClass
    middle: Representation
    inflation: RepMorphism
    deflation: RepMorphism

    def __post_init__(self):
        f = self.middle.field
        x, y = self.inflation, self.deflation
        if (
            x.source.fingerprint != self.delta.target.fingerprint
            or y.target.fingerprint != self.delta.source.fingerprint
        ):
            raise NotAConflation("end terms do not match the class")
        if not compose(y, x).is_zero():
            raise NotAConflation("deflation after inflation is not zero")
        for v in range(len(self.middle.dims)):
            rank_x = f.rank(x.maps[v])
            rank_y = f.rank(y.maps[v])
            if rank_x != x.source.dims[v] or rank_y != y.target.dims[v]:
                raise NotAConflation(f"not a short exact sequence at vertex {v}")
            if rank_x + rank_y != self.middle.dims[v]:
                raise NotAConflation(f"not exact in the middle at vertex {v}")
        if not same_class(class_of(x, y, self.delta.group), self.delta):
            raise NotAConflation("the sequence does not realize its class")

    @property
    def start(self) -> Representation:
        return self.inflation.source

    @property
    def end(self) -> Representation:
        return self.deflation.target

    def is_split(self) -> bool:
        return self.delta.is_zero()

    def __repr__(self) -> str:
        return (
            f"ConflationClass({self.start.label} -> {self.middle.label} -> {self.end.label})"
        )


def class_of(x: RepMorphism, y: RepMorphism, group: ExtGroup | None = None) -> ExtClass:
    """The class of a short exact sequence A -x-> B -y-> C, read through the presentation of C."""
    group = group or ext_group(y.target, x.source)
    f = x.field
    lifted = lift_to_cover(group.presentation, y)
    restricted = compose(lifted, group.presentation.inclusion)
    maps = []
    for xm, rm in zip(x.maps, restricted.maps):
        solution = f.mul(f.left_inverse(xm), rm)
        if not f.equal(f.mul(xm, solution), rm):
            raise NotAConflation("inflation is not a kernel of the deflation")
        maps.append(solution)
    return group.classify(RepMorphism(group.presentation.syzygy, x.source, tuple(maps)))


def realize(delta: ExtClass) -> ConflationClass:
    """s(delta): the pushout of the presentation along the cocycle (split sum for 0)."""
    group = delta.group
    c, a = group.source, group.target
    if delta.is_zero():
        total = direct_sum([a, c])
        return ConflationClass(delta, total.rep, total.injections[0], total.projections[1])
    pres = group.presentation
    total = direct_sum([pres.cover, a])
    relation = subtract(
        compose(total.injections[0], pres.inclusion),
        compose(total.injections[1], delta.cocycle),
    )
    middle, quotient_map = cokernel(relation)
    x = compose(quotient_map, total.injections[1])
    y = factor_through_quotient(quotient_map, compose(pres.surjection, total.projections[0]))
    return ConflationClass(delta, middle, x, y)


def equivalent_conflations(first: ConflationClass, second: ConflationClass) -> RepMorphism | None:
    """An isomorphism b: B1 -> B2 with b x1 = x2 and y2 b = y1, if one exists."""
    b = solve_for_morphism(
        first.middle,
        second.middle,
        [
            (None, first.inflation, second.inflation),
            (second.deflation, None, first.deflation),
        ],
    )
    if b is None or not is_isomorphism(b):
        return None
    return b


def direct_sum_class(first: ExtClass, second: ExtClass) -> ExtClass:
    """first + second in E(C1 + C2, A1 + A2)."""
    ends = direct_sum([first.source, second.source])
    starts = direct_sum([first.target, second.target])
    group = ext_group(ends.rep, starts.rep)
    total = group.zero()
    for k, delta in enumerate((first, second)):
        pulled = pullback_ext(ends.projections[k], delta)
        total = total + pushout_ext(starts.injections[k], pulled, group)
    return total


def direct_sum_conflation(first: ConflationClass, second: ConflationClass) -> ConflationClass:
    """The sum of two realizations, carrying the class first + second."""
    delta = direct_sum_class(first.delta, second.delta)
    middle = direct_sum([first.middle, second.middle])
    f = first.middle.field
    x = RepMorphism(
        delta.target,
        middle.rep,
        tuple(f.block_diag([p, q]) for p, q in zip(first.inflation.maps, second.inflation.maps)),
    )
    y = RepMorphism(
        middle.rep,
        delta.source,
        tuple(f.block_diag([p, q]) for p, q in zip(first.deflation.maps, second.deflation.maps)),
    )
    return ConflationClass(delta, middle.rep, x, y)


# ==================== Morphisms of conflations ====================


@dataclass(frozen=True, eq=False, repr=False)
class ConflationMorphism:
    """(a, b, c) between two conflations with commuting squares and a_* d1 = c^* d2."""

    source: ConflationClass
    target: ConflationClass
    a: RepMorphism
    b: RepMorphism
    c: RepMorphism

    def __post_init__(self):
        s, t = self.source, self.target
        if not same_morphism(compose(self.b, s.inflation), compose(t.inflation, self.a)):
            raise NotAMorphism("left square does not commute")
        if not same_morphism(compose(self.c, s.deflation), compose(t.deflation, self.b)):
            raise NotAMorphism("right square does not commute")
        if not same_class(pushout_ext(self.a, s.delta), pullback_ext(self.c, t.delta)):
            raise NotAMorphism("a_* delta1 differs from c^* delta2")

    def __repr__(self) -> str:
        return f"ConflationMorphism({self.source!r} => {self.target!r})"


def identity_morphism(conf: ConflationClass) -> ConflationMorphism:
    return ConflationMorphism(
        conf, conf, identity(conf.start), identity(conf.middle), identity(conf.end)
    )


@dataclass(frozen=True, eq=False)
class WeakPullback:
    """Solver for mediating maps into the square y' / b over y / c."""

    b: RepMorphism  # B' -> B
    y_prime: RepMorphism  # B' -> C'
    c: RepMorphism  # C' -> C
    y: RepMorphism  # B -> C

    def mediate(self, u: RepMorphism, v: RepMorphism) -> RepMorphism:
        """w: T -> B' with b w = u and y' w = v, for y u = c v."""
        if not same_morphism(compose(self.y, u), compose(self.c, v)):
            raise ValueError("test pair does not form a commutative square")
        w = solve_for_morphism(
            u.source, self.b.source, [(self.b, None, u), (self.y_prime, None, v)]
        )
        if w is None:
            raise WeakPullbackFailure("no mediating map exists")
        return w


def realize_pullback(
    c: RepMorphism, conf: ConflationClass
) -> tuple[ConflationMorphism, WeakPullback]:
    """The morphism (id_A, b, c): realize(c^* delta) -> conf and its weak-pullback solver."""
    pulled = realize(pullback_ext(c, conf.delta))
    b = solve_for_morphism(
        pulled.middle,
        conf.middle,
        [
            (None, pulled.inflation, conf.inflation),
            (conf.deflation, None, compose(c, pulled.deflation)),
        ],
    )
    if b is None:
        raise WeakPullbackFailure("no middle map into the pulled-back conflation")
    morphism = ConflationMorphism(pulled, conf, identity(conf.start), b, c)
    return morphism, WeakPullback(b, pulled.deflation, c, conf.deflation)


def realize_pushout(a: RepMorphism, conf: ConflationClass) -> ConflationMorphism:
    """The morphism (a, b, id_C): conf -> realize(a_* delta)."""
    pushed = realize(pushout_ext(a, conf.delta))
    b = solve_for_morphism(
        conf.middle,
        pushed.middle,
        [
            (None, conf.inflation, compose(pushed.inflation, a)),
            (pushed.deflation, None, conf.deflation),
        ],
    )
    if b is None:
        raise NoCompletion("no middle map into the pushed-out conflation")
    return ConflationMorphism(conf, pushed, a, b, identity(conf.end))


@dataclass(frozen=True)
class FactoredMorphism:
    upper: ConflationMorphism  # (a, b1, id)
    lower: ConflationMorphism  # (id, b2, c)
    delta: ExtClass  # c^* delta = a_* delta'

    @property
    def middle_map(self) -> RepMorphism:
        return compose(self.lower.b, self.upper.b)


def factor_conflation_morphism(m: ConflationMorphism) -> FactoredMorphism:
    """Split (a, b, c) through the realization of c^* delta = a_* delta'."""
    first, second = m.source, m.target
    pushed = pushout_ext(m.a, first.delta)
    pulled = pullback_ext(m.c, second.delta)
    if not same_class(pushed, pulled):
        raise NotAMorphism("a_* delta' differs from c^* delta")
    middle = realize(pulled)
    b1 = solve_for_morphism(
        first.middle,
        middle.middle,
        [
            (None, first.inflation, compose(middle.inflation, m.a)),
            (middle.deflation, None, first.deflation),
        ],
    )
    b2 = solve_for_morphism(
        middle.middle,
        second.middle,
        [
            (None, middle.inflation, second.inflation),
            (second.deflation, None, compose(m.c, middle.deflation)),
        ],
    )
    if b1 is None or b2 is None:
        raise NoCompletion("intermediate conflation admits no middle maps")
    upper = ConflationMorphism(first, middle, m.a, b1, identity(first.end))
    lower = ConflationMorphism(middle, second, identity(second.start), b2, m.c)
    return FactoredMorphism(upper, lower, pulled)


def complete_conflation_morphism(
    b: RepMorphism, c: RepMorphism, first: ConflationClass, second: ConflationClass
) -> ConflationMorphism:
    """Restrict b to the kernels to obtain a with (a, b, c) a morphism."""
    if not same_morphism(compose(c, first.deflation), compose(second.deflation, b)):
        raise NotAMorphism("c y1 differs from y2 b")
    f = b.field
    restricted = compose(b, first.inflation)
    maps = []
    for xm, rm in zip(second.inflation.maps, restricted.maps):
        solution = f.mul(f.left_inverse(xm), rm)
        if not f.equal(f.mul(xm, solution), rm):
            raise NoCompletion("b does not map the first kernel into the second")
        maps.append(solution)
    a = RepMorphism(first.start, second.start, tuple(maps))
    return ConflationMorphism(first, second, a, b, c)


# ==================== Long exact sequences ====================


def postcomposition_matrix(test: Representation, u: RepMorphism) -> galois.FieldArray:
    """Matrix of u_*: Hom(T, X) -> Hom(T, Y)."""
    source = hom_space(test, u.source)
    target = hom_space(test, u.target)
    columns = [target.coordinates(compose(u, h)).reshape(-1, 1) for h in source.basis]
    return u.field.hstack(columns, target.dim)


def connecting_matrix(test: Representation, delta: ExtClass) -> galois.FieldArray:
    """Matrix of delta_#: Hom(T, C) -> E(T, A), phi -> phi^* delta."""
    source = hom_space(test, delta.source)
    target = ext_group(test, delta.target)
    columns = [pullback_ext(h, delta, target).coords.reshape(-1, 1) for h in source.basis]
    return delta.group.field.hstack(columns, target.dim)


def check_long_exact(
    m: ConflationMorphism, test_objects: Sequence[Representation]
) -> LongExactReport:
    """Exactness of Hom(T,A) -> Hom(T,B) -> Hom(T,C) -> E(T,A) -> E(T,B) on both rows,
    and commutativity of the three ladder squares, for every test object T."""
    f = m.a.field
    violations: list[str] = []

    def exact_at(label: str, incoming: np.ndarray, outgoing: np.ndarray) -> None:
        if not f.is_zero(f.mul(outgoing, incoming)):
            violations.append(f"{label}: composite is not zero")
        elif f.rank(incoming) != incoming.shape[0] - f.rank(outgoing):
            violations.append(f"{label}: image differs from kernel")

    for test in test_objects:
        rows = []
        for row, conf in (("row 1", m.source), ("row 2", m.target)):
            x = postcomposition_matrix(test, conf.inflation)
            y = postcomposition_matrix(test, conf.deflation)
            d = connecting_matrix(test, conf.delta)
            ext_a = ext_group(test, conf.start)
            ext_b = ext_group(test, conf.middle)
            push_x = pushout_matrix(conf.inflation, ext_a, ext_b)
            name = f"{test.label}, {row}"
            exact_at(f"{name}, at Hom(T,B)", x, y)
            exact_at(f"{name}, at Hom(T,C)", y, d)
            exact_at(f"{name}, at E(T,A)", d, push_x)
            rows.append((x, y, d))
        (x1, y1, d1), (x2, y2, d2) = rows
        a_star = postcomposition_matrix(test, m.a)
        b_star = postcomposition_matrix(test, m.b)
        c_star = postcomposition_matrix(test, m.c)
        push_a = pushout_matrix(
            m.a, ext_group(test, m.source.start), ext_group(test, m.target.start)
        )
        squares = (
            ("Hom(T,a) square", f.mul(b_star, x1), f.mul(x2, a_star)),
            ("Hom(T,b) square", f.mul(c_star, y1), f.mul(y2, b_star)),
            ("connecting square", f.mul(push_a, d1), f.mul(d2, c_star)),
        )
        for label, lhs, rhs in squares:
            if not f.equal(lhs, rhs):
                violations.append(f"{test.label}: {label} does not commute")
    return LongExactReport(objects_checked=len(test_objects), violations=violations)


def split_conflation(start: Representation, end: Representation) -> ConflationClass:
    return realize(ext_group(end, start).zero())
