"""Finite-length modules over Gamma = End(X_1 + ... + X_n) for a Krull-Schmidt atlas.

A Gamma-module M assigns a space M(X_i) to every atlas index and, to every
basis morphism f: X_i -> X_j, a matrix M(f): M(X_j) -> M(X_i) of shape
``(dims[i], dims[j])``. Submodules are handled as per-index column bases in
the ambient coordinates (``Bases``); ``submodule`` and ``quotient`` turn such
bases into modules with their structure maps.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType

import galois
import numpy as np

from exstruct.services.exactfield import DimensionMismatch, Quotient, as_ints
from exstruct.services.repmod import (
    CharacteristicTooSmall,
    RepMorphism,
    Representation,
    compose,
    end_radical,
    hom_space,
    identity,
    is_indecomposable,
    is_isomorphism,
)

logger = logging.getLogger(__name__)

Bases = tuple[galois.FieldArray, ...]


class NotNatural(ValueError):
    """Raised when matrices fail to commute with the Gamma action."""

    pass


class NonIntegralMultiplicity(ValueError):
    """Raised when a radical layer is not a multiple of a simple's dimension."""

    pass


class InvalidAtlas(ValueError):
    """Raised for an atlas with decomposable or repeated members."""

    pass


# ==================== Category table ====================


class CategoryTable:
    """Hom spaces, composition constants and radicals among atlas objects."""

    def __init__(self, atlas: Sequence[Representation], allow_small_characteristic: bool = False):
        if not atlas:
            raise InvalidAtlas("the atlas is empty")
        quiver = atlas[0].algebra.quiver
        if any(x.algebra.quiver != quiver for x in atlas):
            raise InvalidAtlas("atlas members live over different algebras")
        self.atlas = tuple(atlas)
        self.algebra = atlas[0].algebra
        self.field = self.algebra.field
        self.allow_small_characteristic = allow_small_characteristic
        self.homs = [[hom_space(x, y) for y in self.atlas] for x in self.atlas]
        self.dim = sum(h.dim for row in self.homs for h in row)
        if not allow_small_characteristic and self.field.p <= self.dim:
            raise CharacteristicTooSmall(
                f"p = {self.field.p} must exceed dim Gamma = {self.dim}; "
                "enable allow_small_characteristic"
            )
        for x in self.atlas:
            if not is_indecomposable(x, allow_small_characteristic):
                raise InvalidAtlas(f"{x.label} is not indecomposable")
        for i, j in itertools.combinations(range(self.size), 2):
            if self._isomorphic(i, j):
                raise InvalidAtlas(
                    f"{self.atlas[i].label} and {self.atlas[j].label} are isomorphic"
                )
        self.radicals = [
            [
                end_radical(x, allow_small_characteristic).basis
                if i == j
                else self.field.identity(self.homs[i][j].dim)
                for j in range(self.size)
            ]
            for i, x in enumerate(self.atlas)
        ]
        self.division_degrees = tuple(
            self.homs[i][i].dim - self.radicals[i][i].shape[1] for i in range(self.size)
        )
        self._compositions: dict[tuple[int, int, int], galois.FieldArray] = {}
        self._yoneda: dict[str, GammaModule] = {}
        self._index = {x.fingerprint: i for i, x in enumerate(self.atlas)}
        logger.info("category table: %d objects, dim Gamma = %d", self.size, self.dim)

    @property
    def size(self) -> int:
        return len(self.atlas)

    @property
    def names(self) -> list[str]:
        return [x.label for x in self.atlas]

    def index_of(self, rep: Representation) -> int | None:
        return self._index.get(rep.fingerprint)

    def _isomorphic(self, i: int, j: int) -> bool:
        if self.atlas[i].dims != self.atlas[j].dims:
            return False
        # Both ends are local, so g f is a unit for some basis pair iff they are isomorphic
        return any(
            is_isomorphism(compose(g, f))
            for f in self.homs[i][j].basis
            for g in self.homs[j][i].basis
        )

    @cached_property
    def identity_coords(self) -> tuple[galois.FieldArray, ...]:
        return tuple(
            self.homs[i][i].coordinates(identity(x)) for i, x in enumerate(self.atlas)
        )

    def composition(self, i: int, j: int, k: int) -> galois.FieldArray:
        """T with T[b, a] the coordinates of g_b . f_a for f_a: X_i -> X_j, g_b: X_j -> X_k."""
        key = (i, j, k)
        if key not in self._compositions:
            first, second, result = self.homs[i][j], self.homs[j][k], self.homs[i][k]
            table = np.zeros((second.dim, first.dim, result.dim), dtype=np.int64)
            for b, g in enumerate(second.basis):
                for a, f in enumerate(first.basis):
                    table[b, a] = as_ints(result.coordinates(compose(g, f)))
            self._compositions[key] = self.field.GF(table)
        return self._compositions[key]

    def compose_coords(
        self, i: int, j: int, k: int, f: np.ndarray, g: np.ndarray
    ) -> galois.FieldArray:
        """Coordinates of g . f in Hom(X_i, X_k)."""
        table = self.composition(i, j, k)
        outer = (g[:, None] * f[None, :]).reshape(-1)
        rows = table.shape[0] * table.shape[1]
        return self.field.mul(outer, table.reshape(rows, table.shape[2]))

    def is_associative(self) -> bool:
        f = self.field
        for i, j, k, m in itertools.product(range(self.size), repeat=4):
            for a in range(self.homs[i][j].dim):
                fa = f.unit_vector(self.homs[i][j].dim, a)
                for b in range(self.homs[j][k].dim):
                    gb = f.unit_vector(self.homs[j][k].dim, b)
                    inner = self.compose_coords(i, j, k, fa, gb)
                    for c in range(self.homs[k][m].dim):
                        hc = f.unit_vector(self.homs[k][m].dim, c)
                        left = self.compose_coords(i, k, m, inner, hc)
                        right = self.compose_coords(
                            i, j, m, fa, self.compose_coords(j, k, m, gb, hc)
                        )
                        if not f.equal(left, right):
                            return False
        return True

    def is_radical(self, i: int, j: int, coords: np.ndarray) -> bool:
        return self.field.contains(self.radicals[i][j], coords)


# ==================== Modules and maps ====================


@dataclass(frozen=True, eq=False, repr=False)
class GammaModule:
    table: CategoryTable
    dims: tuple[int, ...]
    actions: Mapping[tuple[int, int], tuple[galois.FieldArray, ...]]
    name: str = ""

    @property
    def field(self):
        return self.table.field

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def act(self, i: int, j: int, coords: np.ndarray) -> galois.FieldArray:
        """M(f) for f = sum coords_k basis_k in Hom(X_i, X_j)."""
        f = self.field
        total = f.zeros(self.dims[i], self.dims[j])
        if 0 in total.shape:
            return total
        matrices = self.actions[(i, j)]
        for k in np.flatnonzero(as_ints(coords)):
            total = total + coords[k] * matrices[k]
        return total

    @cached_property
    def radical_actions(self) -> dict[tuple[int, int], list[galois.FieldArray]]:
        """M(r) for the radical basis r of every rad(X_i, X_j)."""
        out = {}
        for i, j in itertools.product(range(self.table.size), repeat=2):
            columns = self.table.radicals[i][j]
            out[(i, j)] = [self.act(i, j, columns[:, r]) for r in range(columns.shape[1])]
        return out

    def full(self) -> Bases:
        return tuple(self.field.identity(d) for d in self.dims)

    def zero_bases(self) -> Bases:
        return tuple(self.field.zeros(d, 0) for d in self.dims)

    def validate(self) -> None:
        """Check M(id) = id and M(g f) = M(f) M(g) on all basis pairs."""
        f = self.field
        table = self.table
        for i in range(table.size):
            if self.dims[i] and not f.equal(
                self.act(i, i, table.identity_coords[i]), f.identity(self.dims[i])
            ):
                raise NotNatural(f"{self.label}: identity of {table.names[i]} does not act as 1")
        for i, j, k in itertools.product(range(table.size), repeat=3):
            if not self.dims[i] or not self.dims[k]:
                continue
            composition = table.composition(i, j, k)
            for a, fa in enumerate(self.actions[(i, j)]):
                for b, gb in enumerate(self.actions[(j, k)]):
                    expected = self.act(i, k, composition[b, a])
                    if not f.equal(f.mul(fa, gb), expected):
                        raise NotNatural(
                            f"{self.label}: action is not functorial on "
                            f"{table.names[i]} -> {table.names[j]} -> {table.names[k]}"
                        )

    @property
    def label(self) -> str:
        return self.name or f"module{list(self.dims)}"

    def __repr__(self) -> str:
        return f"GammaModule({self.label})"


@dataclass(frozen=True, eq=False, repr=False)
class GammaModuleMap:
    source: GammaModule
    target: GammaModule
    maps: tuple[galois.FieldArray, ...]

    def __post_init__(self):
        f = self.source.field
        table = self.source.table
        for i, m in enumerate(self.maps):
            if m.shape != (self.target.dims[i], self.source.dims[i]):
                raise DimensionMismatch(f"index {i}: map of shape {m.shape}")
        for i, j in itertools.product(range(table.size), repeat=2):
            if not self.target.dims[i] or not self.source.dims[j]:
                continue
            for mf, nf in zip(self.source.actions[(i, j)], self.target.actions[(i, j)]):
                if not f.equal(f.mul(nf, self.maps[j]), f.mul(self.maps[i], mf)):
                    raise NotNatural(
                        f"map {self.source.label} -> {self.target.label} is not natural "
                        f"at {table.names[i]} <- {table.names[j]}"
                    )

    @property
    def field(self):
        return self.source.field

    def is_injective(self) -> bool:
        return all(self.field.rank(m) == m.shape[1] for m in self.maps)

    def is_surjective(self) -> bool:
        return all(self.field.rank(m) == m.shape[0] for m in self.maps)

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def is_zero(self) -> bool:
        return all(self.field.is_zero(m) for m in self.maps)

    def __repr__(self) -> str:
        return f"GammaModuleMap({self.source.label} -> {self.target.label})"


def compose_maps(g: GammaModuleMap, f: GammaModuleMap) -> GammaModuleMap:
    fld = f.field
    return GammaModuleMap(f.source, g.target, tuple(fld.mul(a, b) for a, b in zip(g.maps, f.maps)))


def identity_map(module: GammaModule) -> GammaModuleMap:
    return GammaModuleMap(module, module, module.full())


@dataclass(frozen=True)
class ModuleSum:
    module: GammaModule
    injections: tuple[GammaModuleMap, ...]
    projections: tuple[GammaModuleMap, ...]


def direct_sum(modules: Sequence[GammaModule]) -> ModuleSum:
    if not modules:
        raise DimensionMismatch("direct sum of an empty list")
    table = modules[0].table
    f = table.field
    dims = tuple(sum(m.dims[i] for m in modules) for i in range(table.size))
    actions = {}
    for i, j in itertools.product(range(table.size), repeat=2):
        actions[(i, j)] = tuple(
            f.block_diag([m.actions[(i, j)][k] for m in modules])
            for k in range(table.homs[i][j].dim)
        )
    total = GammaModule(
        table, dims, MappingProxyType(actions), " + ".join(m.label for m in modules)
    )
    injections, projections = [], []
    offsets = [0] * table.size
    for m in modules:
        inj = []
        for i in range(table.size):
            block = f.zeros(dims[i], m.dims[i])
            block[offsets[i] : offsets[i] + m.dims[i]] = f.identity(m.dims[i])
            inj.append(block)
            offsets[i] += m.dims[i]
        injections.append(GammaModuleMap(m, total, tuple(inj)))
        projections.append(GammaModuleMap(total, m, tuple(b.T.copy() for b in inj)))
    return ModuleSum(total, tuple(injections), tuple(projections))


# ==================== Submodules and quotients ====================


def submodule(module: GammaModule, bases: Bases, name: str = "") -> tuple[
    GammaModule, GammaModuleMap
]:
    f = module.field
    table = module.table
    lefts = [f.left_inverse(b) for b in bases]
    actions = {}
    for i, j in itertools.product(range(table.size), repeat=2):
        mats = []
        for m in module.actions[(i, j)]:
            moved = f.mul(m, bases[j])
            restricted = f.mul(lefts[i], moved)
            if not f.equal(f.mul(bases[i], restricted), moved):
                raise NotNatural(f"subspaces of {module.label} are not a submodule")
            mats.append(restricted)
        actions[(i, j)] = tuple(mats)
    dims = tuple(b.shape[1] for b in bases)
    sub = GammaModule(table, dims, MappingProxyType(actions), name)
    return sub, GammaModuleMap(sub, module, tuple(bases))


def _quotients(module: GammaModule, bases: Bases) -> list[Quotient]:
    f = module.field
    return [f.quotient_basis(b, f.identity(d)) for b, d in zip(bases, module.dims)]


def _quotient_module(
    module: GammaModule, quotients: Sequence[Quotient], name: str = ""
) -> tuple[GammaModule, GammaModuleMap]:
    f = module.field
    table = module.table
    actions = {}
    for i, j in itertools.product(range(table.size), repeat=2):
        actions[(i, j)] = tuple(
            f.mul(quotients[i].projection, f.mul(m, quotients[j].complement))
            for m in module.actions[(i, j)]
        )
    dims = tuple(q.dim for q in quotients)
    quo = GammaModule(table, dims, MappingProxyType(actions), name)
    return quo, GammaModuleMap(module, quo, tuple(q.projection for q in quotients))


def quotient(module: GammaModule, bases: Bases, name: str = "") -> tuple[
    GammaModule, GammaModuleMap
]:
    """module / U with its projection; U must be a submodule."""
    return _quotient_module(module, _quotients(module, bases), name)


def kernel(phi: GammaModuleMap) -> tuple[GammaModule, GammaModuleMap]:
    f = phi.field
    sub, incl = submodule(phi.source, tuple(f.kernel_basis(m) for m in phi.maps))
    sub.validate()
    return sub, incl


def image(phi: GammaModuleMap) -> tuple[GammaModule, GammaModuleMap]:
    f = phi.field
    sub, incl = submodule(phi.target, tuple(f.image_basis(m) for m in phi.maps))
    sub.validate()
    return sub, incl


def cokernel(phi: GammaModuleMap) -> tuple[GammaModule, GammaModuleMap]:
    f = phi.field
    quo, proj = quotient(phi.target, tuple(f.image_basis(m) for m in phi.maps))
    quo.validate()
    return quo, proj


def factor_through_quotient(projection: GammaModuleMap, h: GammaModuleMap) -> GammaModuleMap:
    """h' with h' . projection = h; raises NotNatural if h does not vanish on the kernel."""
    f = h.field
    maps = tuple(f.mul(hm, f.right_inverse(pm)) for hm, pm in zip(h.maps, projection.maps))
    induced = GammaModuleMap(projection.target, h.target, maps)
    if not all(f.equal(a, b) for a, b in zip(compose_maps(induced, projection).maps, h.maps)):
        raise NotNatural("map does not vanish on the kernel of the projection")
    return induced


def induced_cokernel_map(
    alpha: GammaModuleMap, source_projection: GammaModuleMap, target_projection: GammaModuleMap
) -> GammaModuleMap:
    """Descend alpha: N -> N' to coker -> coker' along the two cokernel projections."""
    return factor_through_quotient(source_projection, compose_maps(target_projection, alpha))


def contains_submodule(module: GammaModule, outer: Bases, inner: Bases) -> bool:
    f = module.field
    return all(f.contains(o, i) for o, i in zip(outer, inner))


def same_submodule(module: GammaModule, first: Bases, second: Bases) -> bool:
    f = module.field
    return all(f.same_span(a, b) for a, b in zip(first, second))


# ==================== Radical, socle, torsion ====================


def radical(module: GammaModule, bases: Bases | None = None) -> Bases:
    """U . rad Gamma for the submodule U (the whole module by default)."""
    f = module.field
    bases = module.full() if bases is None else bases
    table = module.table
    out = []
    for i in range(table.size):
        columns = [
            f.mul(m, bases[j])
            for j in range(table.size)
            for m in module.radical_actions[(i, j)]
            if module.dims[i] and bases[j].shape[1]
        ]
        out.append(f.image_basis(f.hstack(columns, module.dims[i])))
    return tuple(out)


def radical_filtration(module: GammaModule) -> list[Bases]:
    """M, rad M, rad^2 M, ..., 0; empty for the zero module."""
    if module.is_zero():
        return []
    chain = [module.full()]
    while any(b.shape[1] for b in chain[-1]):
        chain.append(radical(module, chain[-1]))
    return chain


def composition_factors(module: GammaModule) -> Counter:
    """Multiplicity of each atlas simple, read off the radical layers."""
    factors: Counter = Counter()
    chain = radical_filtration(module)
    degrees = module.table.division_degrees
    for upper, lower in zip(chain, chain[1:]):
        for i, (u, w) in enumerate(zip(upper, lower)):
            step = u.shape[1] - w.shape[1]
            if step % degrees[i]:
                raise NonIntegralMultiplicity(
                    f"layer of dimension {step} at {module.table.names[i]} "
                    f"is not a multiple of {degrees[i]}"
                )
            if step:
                factors[i] += step // degrees[i]
    return factors


def support(factors: Counter) -> frozenset[int]:
    return frozenset(i for i, n in factors.items() if n)


def socle(module: GammaModule) -> Bases:
    """Joint kernel of every radical action."""
    f = module.field
    table = module.table
    out = []
    for i in range(table.size):
        rows = [m for j in range(table.size) for m in module.radical_actions[(j, i)]]
        out.append(f.kernel_basis(f.vstack(rows, module.dims[i])))
    return tuple(out)


def socle_isotypic(module: GammaModule, indices: Iterable[int]) -> Bases:
    keep = set(indices)
    f = module.field
    return tuple(
        b if i in keep else f.zeros(module.dims[i], 0) for i, b in enumerate(socle(module))
    )


def torsion_part(module: GammaModule, indices: Iterable[int]) -> Bases:
    """The largest submodule whose composition factors all lie in ``indices``."""
    keep = frozenset(indices)
    f = module.field
    current = module.zero_bases()
    while True:
        quotients = _quotients(module, current)
        top, _ = _quotient_module(module, quotients)
        found = socle_isotypic(top, keep)
        if not any(b.shape[1] for b in found):
            return current
        current = tuple(
            f.image_basis(f.hstack([u, f.mul(q.complement, s)], d))
            for u, q, s, d in zip(current, quotients, found, module.dims)
        )


def generated_submodule(
    module: GammaModule, generators: Iterable[tuple[int, np.ndarray]]
) -> Bases:
    """The submodule generated by elements (index, vector)."""
    f = module.field
    table = module.table
    columns: list[list[np.ndarray]] = [[] for _ in range(table.size)]
    for i, v in generators:
        for j in range(table.size):
            if not module.dims[j]:
                continue
            for m in module.actions[(j, i)]:
                columns[j].append(f.mul(m, v).reshape(-1, 1))
    return tuple(
        f.image_basis(f.hstack(c, module.dims[j])) for j, c in enumerate(columns)
    )


def submodule_factors(module: GammaModule, bases: Bases) -> Counter:
    return composition_factors(submodule(module, bases)[0])


def random_composition_series(module: GammaModule, rng: np.random.Generator) -> Counter:
    """Factors read off a random chain of simple submodules of successive quotients."""
    f = module.field
    degrees = module.table.division_degrees
    factors: Counter = Counter()
    current = module
    while not current.is_zero():
        soc = socle(current)
        candidates = [i for i, b in enumerate(soc) if b.shape[1]]
        i = candidates[int(rng.integers(len(candidates)))]
        v = f.zero_vector(current.dims[i])
        while f.is_zero(v):
            v = f.mul(soc[i], f.random_vector(soc[i].shape[1], rng))
        simple_bases = generated_submodule(current, [(i, v)])
        size = sum(b.shape[1] for b in simple_bases)
        if size % degrees[i]:
            raise NonIntegralMultiplicity(f"simple submodule of dimension {size}")
        factors[i] += size // degrees[i]
        current, _ = quotient(current, simple_bases)
    return factors


def random_submodule(module: GammaModule, rng: np.random.Generator) -> Bases:
    f = module.field
    nonzero = [i for i, d in enumerate(module.dims) if d]
    if not nonzero:
        return module.zero_bases()
    generators = []
    for _ in range(int(rng.integers(0, 3))):
        i = nonzero[int(rng.integers(len(nonzero)))]
        generators.append((i, f.random_vector(module.dims[i], rng)))
    return generated_submodule(module, generators)


# ==================== Natural maps ====================


def module_hom_space(source: GammaModule, target: GammaModule) -> list[GammaModuleMap]:
    """Basis of natural maps, from the kernel of the naturality system."""
    f = source.field
    table = source.table
    m, n = source.dims, target.dims
    offsets = np.cumsum([0] + [a * b for a, b in zip(m, n)])
    unknowns = int(offsets[-1])
    if unknowns == 0:
        return []
    blocks = []
    for i, j in itertools.product(range(table.size), repeat=2):
        rows = n[i] * m[j]
        if rows == 0:
            continue
        for mf, nf in zip(source.actions[(i, j)], target.actions[(i, j)]):
            system = np.zeros((rows, unknowns), dtype=np.int64)
            # N(f) phi_j - phi_i M(f) = 0
            push = f.kron(nf, f.identity(m[j]))
            pull = -f.kron(f.identity(n[i]), mf.T)
            if i == j:
                system[:, offsets[i] : offsets[i + 1]] = as_ints(push + pull)
            else:
                system[:, offsets[j] : offsets[j + 1]] = as_ints(push)
                system[:, offsets[i] : offsets[i + 1]] = as_ints(pull)
            blocks.append(system)
    solutions = f.kernel_basis(f.GF(np.vstack(blocks))) if blocks else f.identity(unknowns)
    out = []
    for k in range(solutions.shape[1]):
        column = as_ints(solutions[:, k])
        maps = tuple(
            f.GF(column[offsets[i] : offsets[i + 1]].reshape(n[i], m[i]))
            for i in range(table.size)
        )
        out.append(GammaModuleMap(source, target, maps))
    return out


def find_isomorphism(
    source: GammaModule, target: GammaModule, rng: np.random.Generator, attempts: int = 32
) -> GammaModuleMap | None:
    """Some isomorphism source -> target, or None when none was found.

    The search is exhaustive over combinations of the k basis natural maps while
    p^k <= 4096. Beyond that only ``attempts`` random combinations are tried, so
    None is not a proof of non-isomorphism: the non-invertible combinations lie on
    a determinant hypersurface of degree at most dim, hit by each try with
    probability at most dim / p.
    """
    if source.dims != target.dims:
        return None
    f = source.field
    if source.is_zero():
        return GammaModuleMap(source, target, tuple(f.zeros(0, 0) for _ in source.dims))
    basis = module_hom_space(source, target)
    if not basis:
        return None

    def combine(coeffs) -> GammaModuleMap:
        maps = []
        for i in range(source.table.size):
            total = f.zeros(target.dims[i], source.dims[i])
            for c, phi in zip(coeffs, basis):
                total = total + f.scalar(int(c)) * phi.maps[i]
            maps.append(total)
        return GammaModuleMap(source, target, tuple(maps))

    for phi in basis:
        if phi.is_isomorphism():
            return phi
    if f.p ** len(basis) <= 4096:
        candidates = itertools.product(range(f.p), repeat=len(basis))
    else:
        candidates = (rng.integers(0, f.p, size=len(basis)) for _ in range(attempts))
    for coeffs in candidates:
        phi = combine(coeffs)
        if phi.is_isomorphism():
            return phi
    return None


# ==================== Representable functors ====================


def _postcomposition_columns(
    table: CategoryTable, i: int, y: RepMorphism
) -> galois.FieldArray:
    source = hom_space(table.atlas[i], y.source)
    target = hom_space(table.atlas[i], y.target)
    columns = [target.coordinates(compose(y, h)).reshape(-1, 1) for h in source.basis]
    return table.field.hstack(columns, target.dim)


def yoneda_module(table: CategoryTable, rep: Representation) -> GammaModule:
    """Hom(-, rep) restricted to the atlas, acting by precomposition."""
    cached = table._yoneda.get(rep.fingerprint)
    if cached is not None:
        return cached
    f = table.field
    into = [hom_space(x, rep) for x in table.atlas]
    actions = {}
    for i, j in itertools.product(range(table.size), repeat=2):
        mats = []
        for morphism in table.homs[i][j].basis:
            columns = [
                into[i].coordinates(compose(h, morphism)).reshape(-1, 1) for h in into[j].basis
            ]
            mats.append(f.hstack(columns, into[i].dim))
        actions[(i, j)] = tuple(mats)
    module = GammaModule(
        table, tuple(h.dim for h in into), MappingProxyType(actions), f"Hom(-,{rep.label})"
    )
    module.validate()
    table._yoneda[rep.fingerprint] = module
    return module


def yoneda_map(table: CategoryTable, y: RepMorphism) -> GammaModuleMap:
    """Hom(-, y): Hom(-, B) -> Hom(-, C)."""
    maps = tuple(_postcomposition_columns(table, i, y) for i in range(table.size))
    return GammaModuleMap(yoneda_module(table, y.source), yoneda_module(table, y.target), maps)


def yoneda_image(table: CategoryTable, y: RepMorphism) -> Bases:
    """Image of Hom(-, y) inside Hom(-, C), without building Hom(-, B)."""
    f = table.field
    return tuple(
        f.image_basis(_postcomposition_columns(table, i, y)) for i in range(table.size)
    )
