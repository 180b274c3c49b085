"""Defects of conflations and the correspondence between closed substructures
of E and Serre subsets of the simple defects.

The defect of a conflation A -> B -y-> C is the cokernel of Hom(-, y). Its
second construction is the image of the connecting map Hom(-, C) -> E(-, A),
phi -> phi^* delta, inside the Ext column of A. A simple functor S_c is a
defect of some conflation exactly when E(X_c, X_a) is nonzero for some atlas
index a. A substructure F is stored as one subspace of E(X_c, X_a) per atlas
pair; F(S) is read off the S-torsion parts of the Ext columns.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType

import galois
import networkx as nx
import numpy as np

from exstruct.core.config import Settings, get_settings
from exstruct.models.report import (
    ClosureReport,
    ConflationSummary,
    ExactStructureReport,
    Provenance,
    RoundtripReport,
    SubstructureSummary,
)
from exstruct.services.exactfield import as_ints
from exstruct.services.extconf import (
    ConflationClass,
    ConflationMorphism,
    ExtClass,
    ExtGroup,
    FactoredMorphism,
    class_of,
    complete_conflation_morphism,
    connecting_matrix,
    ext_group,
    factor_conflation_morphism,
    pullback_ext,
    pullback_matrix,
    pushout_ext,
    pushout_matrix,
    realize,
)
from exstruct.services.funcat import (
    Bases,
    CategoryTable,
    GammaModule,
    GammaModuleMap,
    NotNatural,
    composition_factors,
    factor_through_quotient,
    find_isomorphism,
    generated_submodule,
    identity_map,
    induced_cokernel_map,
    quotient,
    same_submodule,
    submodule_factors,
    support,
    torsion_part,
    yoneda_image,
    yoneda_map,
    yoneda_module,
)
from exstruct.services.repmod import (
    Decomposition,
    RepMorphism,
    Representation,
    compose,
    hom_space,
    krull_schmidt_decompose,
    solve_for_morphism,
)
from exstruct.services.repmod import kernel as rep_kernel

logger = logging.getLogger(__name__)

Pair = tuple[int, int]  # (c, a): the group E(X_c, X_a)


class NotASubbifunctor(ValueError):
    """Raised when a subspace family is not stable under pushouts and pullbacks."""

    pass


class ClosureViolation(RuntimeError):
    """Raised when a composite of two deflations of a substructure leaves it."""

    pass


class TooLarge(ValueError):
    """Raised when an exhaustive sweep exceeds its configured guard."""

    pass


class NotFullModuleCategory(ValueError):
    """Raised when an exact-structure claim needs the whole module category."""

    pass


class TheoremViolation(RuntimeError):
    """Raised when two independent computations that must agree do not."""

    pass


# ==================== Domain types ====================


@dataclass(frozen=True, eq=False, repr=False)
class Defect:
    origin: ConflationClass
    module: GammaModule
    projection: GammaModuleMap  # Hom(-, C) -> module
    factors: Counter

    @property
    def support(self) -> frozenset[int]:
        return support(self.factors)

    def is_zero(self) -> bool:
        return self.module.is_zero()

    def __repr__(self) -> str:
        return f"Defect({self.origin!r}, dims={list(self.module.dims)})"


@dataclass(frozen=True, eq=False, repr=False)
class DefectIsomorphism:
    """The defect embedded into E(-, A), with image the submodule generated by delta."""

    defect: Defect
    embedding: GammaModuleMap
    image: Bases


@dataclass(frozen=True, eq=False, repr=False)
class ExtColumn:
    """E(-, A) on the atlas, acting by pullback."""

    start: Representation
    groups: tuple[ExtGroup, ...]
    module: GammaModule


@dataclass(frozen=True, eq=False, repr=False)
class Substructure:
    """A subspace of every nonzero E(X_c, X_a), as a canonical column basis."""

    subspaces: Mapping[Pair, galois.FieldArray]
    provenance: Provenance
    serre: frozenset[int] | None = None

    @cached_property
    def key(self) -> tuple:
        return tuple(
            (pair, as_ints(basis).shape, as_ints(basis).tobytes())
            for pair, basis in sorted(self.subspaces.items())
        )

    @property
    def dims(self) -> dict[Pair, int]:
        return {pair: basis.shape[1] for pair, basis in sorted(self.subspaces.items())}

    def basis(self, pair: Pair) -> galois.FieldArray | None:
        return self.subspaces.get(pair)

    def __repr__(self) -> str:
        return f"Substructure({self.provenance.value}, {self.dims})"


@dataclass(frozen=True, eq=False, repr=False)
class CompositeClass:
    """The class of K -> B' -(y y')-> C and its pushouts onto the summands of K."""

    first: ConflationClass  # A -> B -y-> C
    second: ConflationClass  # A' -> B' -y'-> B
    inflation: RepMorphism  # K -> B'
    deflation: RepMorphism  # y y'
    delta: ExtClass  # in E(C, K)
    decomposition: Decomposition
    components: tuple[tuple[int, ExtClass], ...]


@dataclass
class CompositeSequenceCheck:
    """0 -> ker f -> L -f-> M -g-> N -> 0 for two composable deflations."""

    kernel_dims: list[int]
    dims: dict[str, list[int]]
    factors: dict[str, Counter]
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


@dataclass(frozen=True, eq=False)
class TransportWitness:
    """Morphism (a, b, c) from the realization of delta' to that of delta inducing theta."""

    theta: GammaModuleMap
    morphism: ConflationMorphism
    factored: FactoredMorphism


# ==================== Analysis service ====================


class DefectAnalysis:
    """Defect computations over one category table, with all caches it needs."""

    def __init__(
        self,
        table: CategoryTable,
        full_module_category: bool = False,
        seed: int | None = None,
        settings: Settings | None = None,
    ):
        self.table = table
        self.field = table.field
        self.full_module_category = full_module_category
        self.settings = settings or get_settings()
        self.seed = self.settings.default_seed if seed is None else seed
        self._realizations: dict[tuple, ConflationClass] = {}
        self._defects: dict[tuple, Defect] = {}
        self._columns: dict[str, ExtColumn] = {}
        self._decompositions: dict[str, Decomposition] = {}
        self._composites: dict[tuple, CompositeClass] = {}
        self._pushouts: dict[tuple, galois.FieldArray] = {}
        self._from_serre: dict[frozenset[int], Substructure] = {}

    @property
    def atlas(self) -> tuple[Representation, ...]:
        return self.table.atlas

    @property
    def names(self) -> list[str]:
        return self.table.names

    # ==================== Ext tables ====================

    def ext(self, c: int, a: int) -> ExtGroup:
        return ext_group(self.atlas[c], self.atlas[a])

    @cached_property
    def ext_dims(self) -> list[list[int]]:
        n = self.table.size
        return [[self.ext(c, a).dim for a in range(n)] for c in range(n)]

    @cached_property
    def pairs(self) -> list[Pair]:
        """Atlas pairs (c, a) with E(X_c, X_a) nonzero, sorted."""
        n = self.table.size
        return [(c, a) for c in range(n) for a in range(n) if self.ext_dims[c][a]]

    @property
    def total_ext_dim(self) -> int:
        return sum(sum(row) for row in self.ext_dims)

    def decompose(self, rep: Representation) -> Decomposition:
        cached = self._decompositions.get(rep.fingerprint)
        if cached is None:
            cached = krull_schmidt_decompose(rep, self.atlas)
            self._decompositions[rep.fingerprint] = cached
        return cached

    def realization(self, delta: ExtClass) -> ConflationClass:
        cached = self._realizations.get(delta.key)
        if cached is None:
            cached = realize(delta)
            self._realizations[delta.key] = cached
        return cached

    def ext_column(self, start: Representation) -> ExtColumn:
        cached = self._columns.get(start.fingerprint)
        if cached is not None:
            return cached
        table = self.table
        groups = tuple(ext_group(x, start) for x in self.atlas)
        actions = {}
        for i, j in itertools.product(range(table.size), repeat=2):
            actions[(i, j)] = tuple(
                pullback_matrix(g, groups[j], groups[i]) for g in table.homs[i][j].basis
            )
        module = GammaModule(
            table,
            tuple(g.dim for g in groups),
            MappingProxyType(actions),
            f"E(-,{start.label})",
        )
        module.validate()
        column = ExtColumn(start, groups, module)
        self._columns[start.fingerprint] = column
        return column

    def pushout_action(self, c: int, a: int, target: int, k: int) -> galois.FieldArray:
        """Matrix of (f_k)_*: E(X_c, X_a) -> E(X_c, X_target) for the k-th basis map."""
        key = (c, a, target, k)
        if key not in self._pushouts:
            morphism = self.table.homs[a][target].basis[k]
            self._pushouts[key] = pushout_matrix(morphism, self.ext(c, a), self.ext(c, target))
        return self._pushouts[key]

    def pullback_action(self, source: int, c: int, a: int, k: int) -> galois.FieldArray:
        """Matrix of g_k^*: E(X_c, X_a) -> E(X_source, X_a)."""
        return self.ext_column(self.atlas[a]).module.actions[(source, c)][k]

    # ==================== Defects ====================

    def defect(self, conf: ConflationClass) -> Defect:
        """coker Hom(-, y), with its composition factors.

        Its dimension vector is checked against the image of delta_#, which is
        the second construction of the same module.
        """
        table = self.table
        represented = yoneda_module(table, conf.end)
        module, projection = quotient(
            represented, yoneda_image(table, conf.deflation), name=f"defect of {conf!r}"
        )
        ranks = tuple(self.field.rank(connecting_matrix(x, conf.delta)) for x in self.atlas)
        if ranks != tuple(module.dims):
            raise TheoremViolation(
                f"{conf!r}: defect dimensions {tuple(module.dims)} differ from im delta_# {ranks}"
            )
        factors = composition_factors(module)
        self.decompose(conf.middle)  # the middle term must split over the atlas
        return Defect(conf, module, projection, factors)

    def defect_of(self, delta: ExtClass) -> Defect:
        cached = self._defects.get(delta.key)
        if cached is None:
            cached = self.defect(self.realization(delta))
            self._defects[delta.key] = cached
        return cached

    def connecting_map(self, conf: ConflationClass) -> GammaModuleMap:
        """delta_#: Hom(-, C) -> E(-, A)."""
        column = self.ext_column(conf.start)
        maps = tuple(connecting_matrix(x, conf.delta) for x in self.atlas)
        return GammaModuleMap(yoneda_module(self.table, conf.end), column.module, maps)

    def defect_isomorphism(self, defect: Defect) -> DefectIsomorphism:
        """Descend delta_# to the defect; it must be injective with image Gamma delta."""
        conf = defect.origin
        sharp = self.connecting_map(conf)
        try:
            embedding = factor_through_quotient(defect.projection, sharp)
        except NotNatural as exc:
            raise TheoremViolation(
                f"{conf!r}: delta_# does not vanish on the image of Hom(-, y)"
            ) from exc
        if not embedding.is_injective():
            raise TheoremViolation(f"{conf!r}: the defect does not embed into E(-, A)")
        image = tuple(self.field.image_basis(m) for m in sharp.maps)
        c = self.table.index_of(conf.end)
        if c is not None:
            column = self.ext_column(conf.start)
            generated = generated_submodule(column.module, [(c, conf.delta.coords)])
            if not same_submodule(column.module, generated, image):
                raise TheoremViolation(f"{conf!r}: image of delta_# differs from Gamma delta")
        return DefectIsomorphism(defect, embedding, image)

    def induced_defect_map(self, m: ConflationMorphism) -> GammaModuleMap:
        """The map of defects induced by Hom(-, c)."""
        first = self.defect(m.source)
        second = self.defect(m.target)
        return induced_cokernel_map(
            yoneda_map(self.table, m.c), first.projection, second.projection
        )

    # ==================== Simple defects and Serre subsets ====================

    @cached_property
    def simple_defects(self) -> tuple[int, ...]:
        """Indices c with S_c in def E, computed two ways that must agree."""
        by_ext = {c for c, _ in self.pairs}
        by_columns: set[int] = set()
        for x in self.atlas:
            by_columns |= support(composition_factors(self.ext_column(x).module))
        if by_ext != by_columns:
            raise TheoremViolation(
                f"simple defects differ: Ext criterion {sorted(by_ext)}, "
                f"column factors {sorted(by_columns)}"
            )
        return tuple(sorted(by_ext))

    def serre_subsets(self) -> list[frozenset[int]]:
        simple = self.simple_defects
        return [
            frozenset(chosen)
            for size in range(len(simple) + 1)
            for chosen in itertools.combinations(simple, size)
        ]

    def serre_label(self, subset: Iterable[int] | None) -> list[str]:
        if subset is None:
            return []
        return [self.names[i] for i in sorted(subset)]

    def serre_poset(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        subsets = self.serre_subsets()
        for s in subsets:
            graph.add_node(s, label=",".join(self.serre_label(s)) or "0")
        for s, t in itertools.permutations(subsets, 2):
            if s < t:
                graph.add_edge(s, t)
        return graph

    # ==================== Substructures ====================

    def make_substructure(
        self,
        subspaces: Mapping[Pair, np.ndarray],
        provenance: Provenance,
        serre: frozenset[int] | None = None,
    ) -> Substructure:
        f = self.field
        canonical = {}
        for c, a in self.pairs:
            basis = subspaces.get((c, a))
            if basis is None:
                basis = f.zeros(self.ext_dims[c][a], 0)
            canonical[(c, a)] = f.image_basis(basis)
        return Substructure(MappingProxyType(canonical), provenance, serre)

    def full_substructure(self) -> Substructure:
        f = self.field
        return self.make_substructure(
            {(c, a): f.identity(self.ext_dims[c][a]) for c, a in self.pairs},
            Provenance.CANDIDATE,
        )

    def contains(self, outer: Substructure, inner: Substructure) -> bool:
        return all(
            self.field.contains(outer.subspaces[pair], inner.subspaces[pair])
            for pair in self.pairs
        )

    def member(self, sub: Substructure, pair: Pair, coords: np.ndarray) -> bool:
        basis = sub.basis(pair)
        if basis is None:
            return self.field.is_zero(coords)
        return self.field.contains(basis, coords)

    def defect_membership(self, pair: Pair, coords: np.ndarray, serre: Iterable[int]) -> bool:
        """The pointwise definition: delta belongs to F(S) iff its defect has factors in S."""
        c, a = pair
        delta = self.ext(c, a).element(coords)
        return self.defect_of(delta).support <= frozenset(serre)

    def substructure_from_serre(self, serre: Iterable[int]) -> Substructure:
        """F(S): evaluations of the S-torsion parts of the Ext columns."""
        serre = frozenset(serre)
        cached = self._from_serre.get(serre)
        if cached is not None:
            return cached
        subspaces = {}
        for a, x in enumerate(self.atlas):
            column = self.ext_column(x)
            if column.module.is_zero():
                continue
            torsion = torsion_part(column.module, serre)
            for c in range(self.table.size):
                if self.ext_dims[c][a]:
                    subspaces[(c, a)] = torsion[c]
        result = self.make_substructure(subspaces, Provenance.FROM_SERRE, serre)
        self._spot_check(result, serre)
        self._from_serre[serre] = result
        return result

    def _spot_check(self, sub: Substructure, serre: frozenset[int]) -> None:
        f = self.field
        rng = np.random.default_rng([self.seed, len(serre), *sorted(serre)])
        checks = self.settings.spot_checks
        for pair in self.pairs:
            basis = sub.subspaces[pair]
            total = self.ext_dims[pair[0]][pair[1]]
            samples: list[tuple[np.ndarray, bool]] = []
            if basis.shape[1]:
                for _ in range(checks):
                    v = f.mul(basis, f.random_vector(basis.shape[1], rng))
                    if not f.is_zero(v):
                        samples.append((v, True))
            if basis.shape[1] < total:
                for _ in range(checks):
                    v = f.random_vector(total, rng)
                    if not f.contains(basis, v):
                        samples.append((v, False))
            for v, expected in samples:
                if self.defect_membership(pair, v, serre) != expected:
                    raise TheoremViolation(
                        f"F({self.serre_label(serre)}) at {self._pair_label(pair)}: torsion "
                        f"membership {expected} disagrees with the defect of {list(as_ints(v))}"
                    )

    def _pair_label(self, pair: Pair) -> str:
        c, a = pair
        return f"E({self.names[c]},{self.names[a]})"

    def _stability(self, sub: Substructure) -> tuple[list[str], int]:
        f = self.field
        table = self.table
        violations = []
        checked = 0
        for (c, a), basis in sorted(sub.subspaces.items()):
            if not basis.shape[1]:
                continue
            for target in range(table.size):
                if not self.ext_dims[c][target]:
                    continue
                for k in range(table.homs[a][target].dim):
                    checked += 1
                    moved = f.mul(self.pushout_action(c, a, target, k), basis)
                    if not f.contains(sub.subspaces[(c, target)], moved):
                        violations.append(
                            f"pushout along {self.names[a]} -> {self.names[target]} "
                            f"(basis map {k}) moves {self._pair_label((c, a))} "
                            f"outside {self._pair_label((c, target))}"
                        )
            for source in range(table.size):
                if not self.ext_dims[source][a]:
                    continue
                for k in range(table.homs[source][c].dim):
                    checked += 1
                    moved = f.mul(self.pullback_action(source, c, a, k), basis)
                    if not f.contains(sub.subspaces[(source, a)], moved):
                        violations.append(
                            f"pullback along {self.names[source]} -> {self.names[c]} "
                            f"(basis map {k}) moves {self._pair_label((c, a))} "
                            f"outside {self._pair_label((source, a))}"
                        )
        return violations, checked

    def check_stability(self, sub: Substructure) -> list[str]:
        return self._stability(sub)[0]

    def serre_from_substructure(self, sub: Substructure) -> frozenset[int]:
        """def F: the factor support of the submodules of the columns generated by F."""
        violations = self.check_stability(sub)
        if violations:
            raise NotASubbifunctor(f"{violations[0]} ({len(violations)} violations)")
        result: set[int] = set()
        for a, x in enumerate(self.atlas):
            generators = [
                (c, sub.subspaces[(c, a)][:, k])
                for c in range(self.table.size)
                if (c, a) in sub.subspaces
                for k in range(sub.subspaces[(c, a)].shape[1])
            ]
            if not generators:
                continue
            column = self.ext_column(x)
            bases = generated_submodule(column.module, generators)
            result |= support(submodule_factors(column.module, bases))
        return frozenset(result)

    def substructure_poset(self, subs: list[Substructure]) -> nx.DiGraph:
        graph = nx.DiGraph()
        for s in subs:
            graph.add_node(s.key, label=self.substructure_label(s))
        for s, t in itertools.permutations(subs, 2):
            if s.key != t.key and self.contains(t, s):
                graph.add_edge(s.key, t.key)
        return graph

    def substructure_label(self, sub: Substructure) -> str:
        simple = self.simple_defects
        mask = "".join(
            "1" if sub.serre is not None and i in sub.serre else "0" for i in simple
        )
        dims = " ".join(
            f"{self.names[c]},{self.names[a]}:{d}" for (c, a), d in sub.dims.items()
        )
        return f"{mask or '-'} {dims}".strip()

    # ==================== Composite deflations ====================

    def middle_subspace(
        self, conf: ConflationClass, target: int, sub: Substructure
    ) -> tuple[ExtGroup, galois.FieldArray]:
        """F(B, X_target) inside E(B, X_target), via the atlas decomposition of B."""
        f = self.field
        group = ext_group(conf.middle, self.atlas[target])
        columns = []
        for summand in self.decompose(conf.middle).summands:
            pair = (summand.index, target)
            basis = sub.basis(pair)
            if basis is None:
                continue
            part_group = self.ext(*pair)
            for k in range(basis.shape[1]):
                pulled = pullback_ext(summand.retraction, part_group.element(basis[:, k]), group)
                columns.append(pulled.coords.reshape(-1, 1))
        return group, f.image_basis(f.hstack(columns, group.dim))

    def composite_class(self, delta: ExtClass, second: ExtClass) -> CompositeClass:
        """Class of the composite of the deflations realizing delta and second.

        ``second`` must live in E(B, A') for the middle term B of delta's realization.
        """
        key = (delta.key, second.key)
        cached = self._composites.get(key)
        if cached is not None:
            return cached
        first_conf = self.realization(delta)
        second_conf = self.realization(second)
        if second_conf.end.fingerprint != first_conf.middle.fingerprint:
            raise ValueError("the second class must end at the middle term of the first")
        deflation = compose(first_conf.deflation, second_conf.deflation)
        start, inclusion = rep_kernel(deflation)
        composite = class_of(inclusion, deflation, ext_group(first_conf.end, start))
        decomposition = self.decompose(start)
        components = tuple(
            (s.index, pushout_ext(s.retraction, composite)) for s in decomposition.summands
        )
        result = CompositeClass(
            first_conf, second_conf, inclusion, deflation, composite, decomposition, components
        )
        self._composites[key] = result
        return result

    def composite_conflation(self, composite: CompositeClass) -> ConflationClass:
        return ConflationClass(
            composite.delta, composite.second.middle, composite.inflation, composite.deflation
        )

    def _composable_pairs(
        self,
        sub: Substructure,
        exhaustive: bool,
        rng: np.random.Generator | None = None,
        samples: int = 0,
    ) -> Iterator[tuple[Pair, ExtClass, ExtClass]]:
        f = self.field
        nonzero = [pair for pair in self.pairs if sub.subspaces[pair].shape[1]]
        if not nonzero:
            return
        if exhaustive:
            for pair in nonzero:
                group = self.ext(*pair)
                for v in f.subspace_elements(sub.subspaces[pair], projective=True):
                    delta = group.element(v)
                    conf = self.realization(delta)
                    for target in range(self.table.size):
                        middle, basis = self.middle_subspace(conf, target, sub)
                        for w in f.subspace_elements(basis, projective=True):
                            yield pair, delta, middle.element(w)
            return
        for _ in range(samples):
            pair = nonzero[int(rng.integers(len(nonzero)))]
            basis = sub.subspaces[pair]
            v = f.zero_vector(basis.shape[0])
            while f.is_zero(v):
                v = f.mul(basis, f.random_vector(basis.shape[1], rng))
            delta = self.ext(*pair).element(v)
            target = int(rng.integers(self.table.size))
            middle, mbasis = self.middle_subspace(self.realization(delta), target, sub)
            w = f.mul(mbasis, f.random_vector(mbasis.shape[1], rng))
            yield pair, delta, middle.element(w)

    def _closure_witness(self, sub: Substructure, pair: Pair, composite: CompositeClass) -> str:
        c = pair[0]
        for index, part in composite.components:
            if not self.member(sub, (c, index), part.coords):
                return (
                    f"composite of deflations onto {self.names[c]} through "
                    f"{composite.first.middle.label} has component in "
                    f"{self._pair_label((c, index))} outside the substructure"
                )
        return ""

    def is_closed(self, sub: Substructure) -> bool:
        """Exhaustive closure of F-deflations under composition (small fields only)."""
        for pair, delta, second in self._composable_pairs(sub, exhaustive=True):
            if self._closure_witness(sub, pair, self.composite_class(delta, second)):
                return False
        return True

    def composite_sequence(self, delta: ExtClass, second: ExtClass) -> CompositeSequenceCheck:
        """Exactness of 0 -> ker f -> L -> M -> N -> 0 for the deflations y' and y."""
        f = self.field
        table = self.table
        composite = self.composite_class(delta, second)
        y = composite.first.deflation
        y_prime = composite.second.deflation
        at_b = yoneda_module(table, y.source)
        at_c = yoneda_module(table, y.target)
        lower, q_lower = quotient(at_b, yoneda_image(table, y_prime), name="L")
        middle, q_middle = quotient(at_c, yoneda_image(table, composite.deflation), name="M")
        upper, q_upper = quotient(at_c, yoneda_image(table, y), name="N")
        f_map = induced_cokernel_map(yoneda_map(table, y), q_lower, q_middle)
        g_map = induced_cokernel_map(identity_map(at_c), q_middle, q_upper)
        check = CompositeSequenceCheck(
            kernel_dims=[],
            dims={"L": list(lower.dims), "M": list(middle.dims), "N": list(upper.dims)},
            factors={
                "L": composition_factors(lower),
                "M": composition_factors(middle),
                "N": composition_factors(upper),
            },
        )
        for i in range(table.size):
            fm, gm = f_map.maps[i], g_map.maps[i]
            rank_f, rank_g = f.rank(fm), f.rank(gm)
            check.kernel_dims.append(lower.dims[i] - rank_f)
            if rank_g != upper.dims[i]:
                check.violations.append(f"g is not onto at {self.names[i]}")
            if not f.is_zero(f.mul(gm, fm)):
                check.violations.append(f"g f is not zero at {self.names[i]}")
            elif rank_f + rank_g != middle.dims[i]:
                check.violations.append(f"image of f differs from kernel of g at {self.names[i]}")
        if not support(check.factors["M"]) <= support(check.factors["L"]) | support(
            check.factors["N"]
        ):
            check.violations.append("factors of M are not covered by those of L and N")
        return check

    def verify_closed(
        self,
        sub: Substructure,
        samples: int | None = None,
        seed: int | None = None,
        exhaustive: bool = False,
        with_sequence: bool = True,
    ) -> ClosureReport:
        """Stability, closure under composition of deflations, and the composite defect sequence."""
        violations, checked = self._stability(sub)
        if violations:
            raise NotASubbifunctor(f"{violations[0]} ({len(violations)} violations)")
        report = ClosureReport(
            serre=self.serre_label(sub.serre) if sub.serre is not None else None,
            stability_checks=checked,
        )
        serre = self.serre_from_substructure(sub)
        samples = self.settings.default_samples if samples is None else samples
        rng = np.random.default_rng(self.seed if seed is None else seed)
        for pair, delta, second in self._composable_pairs(sub, exhaustive, rng, samples):
            composite = self.composite_class(delta, second)
            witness = self._closure_witness(sub, pair, composite)
            if witness:
                raise ClosureViolation(witness)
            composite_defect = self.defect(self.composite_conflation(composite))
            if not composite_defect.support <= serre:
                raise ClosureViolation(
                    f"composite deflation onto {self.names[pair[0]]} has defect factors "
                    f"{self.serre_label(composite_defect.support)} outside "
                    f"{self.serre_label(serre)}"
                )
            report.composites_checked += 1
            if with_sequence:
                sequence = self.composite_sequence(delta, second)
                report.sequences_checked += 1
                report.violations.extend(sequence.violations)
        return report

    # ==================== Oracle ====================

    def check_oracle_guard(self) -> None:
        s = self.settings
        if self.field.p > s.oracle_max_prime or self.total_ext_dim > s.oracle_max_ext_dim:
            raise TooLarge(
                f"oracle needs p <= {s.oracle_max_prime} and total Ext dimension <= "
                f"{s.oracle_max_ext_dim}; have p = {self.field.p}, {self.total_ext_dim}"
            )

    def oracle_sweep(self) -> tuple[list[Substructure], list[Substructure]]:
        """All stable subspace families, and those closed under composition."""
        self.check_oracle_guard()
        f = self.field
        choices = [list(f.all_subspaces(self.ext_dims[c][a])) for c, a in self.pairs]
        stable, closed = [], []
        for combination in itertools.product(*choices):
            sub = self.make_substructure(dict(zip(self.pairs, combination)), Provenance.ORACLE)
            if self.check_stability(sub):
                continue
            stable.append(sub)
            if self.is_closed(sub):
                closed.append(sub)
        logger.info("oracle: %d stable families, %d closed", len(stable), len(closed))
        return stable, sorted(closed, key=lambda s: s.key)

    def enumerate_substructures_oracle(self) -> list[Substructure]:
        return self.oracle_sweep()[1]

    # ==================== Correspondence checks ====================

    def theorem_roundtrip(self, with_oracle: bool | None = None) -> RoundtripReport:
        subsets = self.serre_subsets()
        images = [self.substructure_from_serre(s) for s in subsets]
        report = RoundtripReport(serre_count=len(subsets), substructure_count=len(images))
        for s, sub in zip(subsets, images):
            back = self.serre_from_substructure(sub)
            if back != s:
                report.mismatches.append(
                    f"def F({self.serre_label(s)}) = {self.serre_label(back)}"
                )
        for (s, first), (t, second) in itertools.permutations(zip(subsets, images), 2):
            if (s <= t) != self.contains(second, first):
                report.monotone = False
        keys = {sub.key for sub in images}
        report.isomorphic = len(keys) == len(images) and nx.is_isomorphic(
            nx.transitive_reduction(self.serre_poset()),
            nx.transitive_reduction(self.substructure_poset(images)),
        )
        if with_oracle is None:
            try:
                self.check_oracle_guard()
                with_oracle = True
            except TooLarge:
                with_oracle = False
        if with_oracle:
            oracle = self.enumerate_substructures_oracle()
            report.oracle_count = len(oracle)
            report.oracle_matches = {sub.key for sub in oracle} == keys
            for sub in oracle:
                back = self.substructure_from_serre(self.serre_from_substructure(sub))
                if back.key != sub.key:
                    report.mismatches.append(f"F(def F) differs from F for {sub!r}")
        return report

    def summarize(self, sub: Substructure) -> SubstructureSummary:
        conflations = []
        dims = {}
        for (c, a), basis in sorted(sub.subspaces.items()):
            dims[f"{self.names[c]},{self.names[a]}"] = basis.shape[1]
            group = self.ext(c, a)
            for k in range(basis.shape[1]):
                conf = self.realization(group.element(basis[:, k]))
                middle = sorted(self.names[i] for i in self.decompose(conf.middle).indices)
                conflations.append(
                    ConflationSummary(
                        start=self.names[a], end=self.names[c], middle=middle,
                        split=conf.is_split(),
                    )
                )
        return SubstructureSummary(
            serre=self.serre_label(sub.serre),
            provenance=sub.provenance,
            dims=dims,
            conflations=conflations,
        )

    def exact_structure_report(self, require_full: bool = False) -> ExactStructureReport:
        """Each F(S) as a relative exact structure, with the ambient as the maximal one."""
        if not self.full_module_category and require_full:
            raise NotFullModuleCategory(
                "the atlas is not declared to list every indecomposable module"
            )
        subsets = self.serre_subsets()
        structures = [self.substructure_from_serre(s) for s in subsets]
        if self.full_module_category:
            note = "ambient E is the class of all short exact sequences, the maximal structure"
        else:
            note = "substructures of the given E; no claim about a maximal exact structure"
        return ExactStructureReport(
            full_module_category=self.full_module_category,
            ambient_is_maximal=self.full_module_category,
            note=note,
            serre_isomorphic=self._order_isomorphic(subsets, structures),
            structures=[self.summarize(s) for s in structures],
        )

    def _order_isomorphic(
        self, subsets: list[frozenset[int]], structures: list[Substructure]
    ) -> bool:
        """S -> F(S) is injective and S <= T exactly when F(S) <= F(T)."""
        if len({s.key for s in structures}) != len(subsets):
            return False
        pairs = itertools.product(zip(subsets, structures), repeat=2)
        return all((s <= t) == self.contains(ft, fs) for (s, fs), (t, ft) in pairs)

    # ==================== Transport and effaceability ====================

    def transport_defect_isomorphism(
        self, delta: ExtClass, other: ExtClass, rng: np.random.Generator
    ) -> TransportWitness | None:
        """For isomorphic defects of delta and other (ending at an atlas object), build
        (a, b, c): realize(other) -> realize(delta) with c^* delta = a_* other."""
        target = self.defect_of(delta)
        source = self.defect_of(other)
        c_index = self.table.index_of(other.source)
        if c_index is None:
            raise ValueError("the second class must end at an atlas object")
        theta = find_isomorphism(source.module, target.module, rng)
        if theta is None:
            return None
        f = self.field
        top = f.mul(source.projection.maps[c_index], self.table.identity_coords[c_index])
        image = f.mul(theta.maps[c_index], top)
        lift = f.solve(target.projection.maps[c_index], image)
        c = hom_space(self.atlas[c_index], delta.source).element(lift)
        first, second = target.origin, source.origin
        b = solve_for_morphism(
            second.middle,
            first.middle,
            [(first.deflation, None, compose(c, second.deflation))],
        )
        if b is None:
            raise TheoremViolation("no middle map lifts the defect isomorphism")
        morphism = complete_conflation_morphism(b, c, second, first)
        return TransportWitness(theta, morphism, factor_conflation_morphism(morphism))

    def effaceability_witness(self, delta: ExtClass) -> bool:
        """The deflation realizing delta lies in the radical: S_c(y) = 0."""
        c = self.table.index_of(delta.source)
        if c is None:
            raise ValueError("the class must end at an atlas object")
        conf = self.realization(delta)
        for summand in self.decompose(conf.middle).summands:
            restricted = compose(conf.deflation, summand.section)
            coords = self.table.homs[summand.index][c].coordinates(restricted)
            if not self.table.is_radical(summand.index, c, coords):
                return False
        return True

