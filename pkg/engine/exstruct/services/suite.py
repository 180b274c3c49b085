"""Randomized verification suite over one workspace.

Each section samples from a seeded generator and records pass/fail counts with
diagnostics; nothing here raises for a failed check.
"""

import itertools
import logging
import time

import numpy as np

from exstruct.models.report import Provenance, SectionReport, SuiteReport
from exstruct.services.defectcore import (
    ClosureViolation,
    DefectAnalysis,
    NotASubbifunctor,
    Substructure,
    TheoremViolation,
    TooLarge,
)
from exstruct.services.extconf import (
    ExtClass,
    NoCompletion,
    NotAMorphism,
    WeakPullbackFailure,
    check_long_exact,
    direct_sum_class,
    direct_sum_conflation,
    equivalent_conflations,
    pushout_ext,
    realize_pullback,
    realize_pushout,
)
from exstruct.services.funcat import (
    GammaModuleMap,
    NotNatural,
    direct_sum,
    factor_through_quotient,
    yoneda_map,
    yoneda_module,
)
from exstruct.services.repmod import compose, hom_space, identity, is_isomorphism
from exstruct.services.repmod import direct_sum as rep_direct_sum

logger = logging.getLogger(__name__)


class VerificationSuite:
    """Runs every check section against a DefectAnalysis."""

    def __init__(self, analysis: DefectAnalysis, seed: int, samples: int):
        self.analysis = analysis
        self.seed = seed
        self.samples = samples
        self.rng = np.random.default_rng(seed)

    # ==================== Sampling ====================

    def random_class(self, nonzero: bool = True) -> ExtClass | None:
        analysis = self.analysis
        if not analysis.pairs:
            return None
        c, a = analysis.pairs[int(self.rng.integers(len(analysis.pairs)))]
        group = analysis.ext(c, a)
        delta = group.random(self.rng)
        while nonzero and delta.is_zero():
            delta = group.random(self.rng)
        return delta

    def random_atlas_map(self, target_index: int | None = None, source_index: int | None = None):
        """A random nonzero map between atlas members, or None when every Hom is zero."""
        table = self.analysis.table
        options = [
            (i, j)
            for i in range(table.size)
            for j in range(table.size)
            if table.homs[i][j].dim
            and (target_index is None or j == target_index)
            and (source_index is None or i == source_index)
        ]
        if not options:
            return None
        i, j = options[int(self.rng.integers(len(options)))]
        space = table.homs[i][j]
        morphism = space.random(self.rng)
        while morphism.is_zero():
            morphism = space.random(self.rng)
        return morphism

    def isomorphic_partner(self, delta: ExtClass, attempts: int = 64) -> ExtClass:
        """alpha_* i_* delta in E(C, A + X) for a random atlas X and automorphism alpha.

        Its defect is isomorphic to that of delta, but the transporting morphism
        has a non-square left component.
        """
        analysis = self.analysis
        extra = analysis.atlas[int(self.rng.integers(analysis.table.size))]
        total = rep_direct_sum([delta.target, extra])
        endomorphisms = hom_space(total.rep, total.rep)
        alpha = identity(total.rep)
        for _ in range(attempts):
            candidate = endomorphisms.random(self.rng)
            if is_isomorphism(candidate):
                alpha = candidate
                break
        return pushout_ext(compose(alpha, total.injections[0]), delta)

    # ==================== Sections ====================

    def defect_duality(self) -> SectionReport:
        section = SectionReport(name="defect duality")
        for _ in range(2 * self.samples):
            delta = self.random_class()
            if delta is None:
                break
            try:
                defect = self.analysis.defect_of(delta)
                self.analysis.defect_isomorphism(defect)
                section.record(True)
            except TheoremViolation as exc:
                section.record(False, str(exc))
        return section

    def pullback_pushout(self) -> SectionReport:
        """Induced defect maps are injective along pullbacks and onto along pushouts."""
        section = SectionReport(name="pullback and pushout")
        analysis = self.analysis
        for _ in range(self.samples):
            delta = self.random_class()
            if delta is None:
                break
            c_index = analysis.table.index_of(delta.source)
            a_index = analysis.table.index_of(delta.target)
            conf = analysis.realization(delta)
            into = self.random_atlas_map(target_index=c_index)
            if into is not None:
                try:
                    morphism, _ = realize_pullback(into, conf)
                    ok = analysis.induced_defect_map(morphism).is_injective()
                    section.record(ok, f"pullback of {delta!r} along {into!r} is not injective")
                except (WeakPullbackFailure, NotAMorphism, NotNatural) as exc:
                    section.record(False, f"pullback of {delta!r}: {exc}")
            out = self.random_atlas_map(source_index=a_index)
            if out is not None:
                try:
                    morphism = realize_pushout(out, conf)
                    ok = analysis.induced_defect_map(morphism).is_surjective()
                    section.record(ok, f"pushout of {delta!r} along {out!r} is not onto")
                except (NoCompletion, NotAMorphism, NotNatural) as exc:
                    section.record(False, f"pushout of {delta!r}: {exc}")
        return section

    def composite_sequences(self) -> SectionReport:
        section = SectionReport(name="composite deflation sequence")
        analysis = self.analysis
        full = analysis.full_substructure()
        for _, delta, second in analysis._composable_pairs(
            full, exhaustive=False, rng=self.rng, samples=self.samples
        ):
            check = analysis.composite_sequence(delta, second)
            section.record(check.passed, "; ".join(check.violations))
        return section

    def additivity(self) -> SectionReport:
        """defect(delta1 + delta2) is isomorphic to defect(delta1) + defect(delta2)."""
        section = SectionReport(name="additivity")
        analysis = self.analysis
        f = analysis.field
        table = analysis.table
        for _ in range(self.samples):
            first, second = self.random_class(), self.random_class()
            if first is None:
                break
            total = direct_sum_class(first, second)
            conf = analysis.realization(total)
            summed = direct_sum_conflation(
                analysis.realization(first), analysis.realization(second)
            )
            if equivalent_conflations(conf, summed) is None:
                section.record(False, f"realizations of {first!r} + {second!r} differ")
                continue
            defect = analysis.defect(conf)
            parts = [analysis.defect_of(first), analysis.defect_of(second)]
            target = direct_sum([p.module for p in parts])
            ends = rep_direct_sum([first.source, second.source])
            maps = []
            for i in range(table.size):
                block = f.zeros(target.module.dims[i], defect.projection.source.dims[i])
                for k, part in enumerate(parts):
                    along = yoneda_map(table, ends.projections[k]).maps[i]
                    block = block + f.mul(
                        target.injections[k].maps[i], f.mul(part.projection.maps[i], along)
                    )
                maps.append(block)
            try:
                h = GammaModuleMap(yoneda_module(table, ends.rep), target.module, tuple(maps))
                ok = factor_through_quotient(defect.projection, h).is_isomorphism()
            except NotNatural:
                ok = False
            expected = parts[0].factors + parts[1].factors
            section.record(
                ok and defect.factors == expected,
                f"defect of {first!r} + {second!r} is not the sum of the defects",
            )
        return section

    def simple_defects(self) -> SectionReport:
        """Both criteria agree, and each nonzero class has its end in its support."""
        section = SectionReport(name="simple defects")
        analysis = self.analysis
        try:
            simple = set(analysis.simple_defects)
            section.record(True)
        except TheoremViolation as exc:
            section.record(False, str(exc))
            return section
        for c, a in analysis.pairs:
            for delta in analysis.ext(c, a).basis():
                defect = analysis.defect_of(delta)
                section.record(
                    c in defect.support and defect.support <= simple,
                    f"defect of {delta!r} has support {sorted(defect.support)}",
                )
                section.record(
                    analysis.effaceability_witness(delta),
                    f"deflation realizing {delta!r} is not radical",
                )
        return section

    def _candidate_families(self) -> list[Substructure]:
        analysis = self.analysis
        f = analysis.field
        candidates: list[Substructure] = []
        if all(analysis.ext_dims[c][a] <= 1 for c, a in analysis.pairs) and len(
            analysis.pairs
        ) <= analysis.settings.oracle_max_ext_dim:
            for chosen in itertools.product((False, True), repeat=len(analysis.pairs)):
                candidates.append(
                    analysis.make_substructure(
                        {
                            pair: f.identity(1) if keep else f.zeros(1, 0)
                            for pair, keep in zip(analysis.pairs, chosen)
                        },
                        Provenance.CANDIDATE,
                    )
                )
            return candidates
        for _ in range(analysis.settings.negative_controls):
            subspaces = {}
            for c, a in analysis.pairs:
                n = analysis.ext_dims[c][a]
                k = int(self.rng.integers(n + 1))
                subspaces[(c, a)] = f.random_matrix(n, k, self.rng)
            candidates.append(analysis.make_substructure(subspaces, Provenance.CANDIDATE))
        images = [analysis.substructure_from_serre(s) for s in analysis.serre_subsets()]
        for first, second in itertools.combinations(images, 2):
            candidates.append(
                analysis.make_substructure(
                    {
                        pair: f.subspace_sum(first.subspaces[pair], second.subspaces[pair])
                        for pair in analysis.pairs
                    },
                    Provenance.CANDIDATE,
                )
            )
        return candidates

    def negative_controls(self) -> SectionReport:
        """Families outside the image of F must be rejected."""
        section = SectionReport(name="negative controls")
        analysis = self.analysis
        serre_keys = {analysis.substructure_from_serre(s).key for s in analysis.serre_subsets()}
        try:
            analysis.check_oracle_guard()
            exhaustive = True
        except TooLarge:
            exhaustive = False
        invalid = 0
        for candidate in self._candidate_families():
            if candidate.key in serre_keys:
                continue
            unstable = bool(analysis.check_stability(candidate))
            if not unstable and not exhaustive:
                logger.debug("skipping stable candidate %r without exhaustive closure", candidate)
                continue
            invalid += 1
            try:
                analysis.verify_closed(
                    candidate, samples=self.samples, seed=self.seed, exhaustive=exhaustive,
                    with_sequence=False,
                )
                section.record(False, f"{candidate!r} passed as closed")
            except NotASubbifunctor:
                section.record(unstable, f"{candidate!r} reported unstable")
            except ClosureViolation:
                section.record(not unstable, f"{candidate!r} reported stable")
        if not invalid:
            # every candidate family was closed
            section.record(True)
        return section

    def roundtrip(self) -> SectionReport:
        section = SectionReport(name="serre correspondence")
        try:
            report = self.analysis.theorem_roundtrip()
        except TheoremViolation as exc:
            section.record(False, str(exc))
            return section
        section.record(report.monotone, "F is not an order embedding")
        section.record(report.isomorphic, "the two lattices are not isomorphic")
        section.record(not report.mismatches, "; ".join(report.mismatches))
        if report.oracle_matches is not None:
            section.record(report.oracle_matches, "oracle substructures differ from F(S)")
        return section

    def exact_structures(self) -> SectionReport:
        section = SectionReport(name="exact structures")
        analysis = self.analysis
        report = analysis.exact_structure_report()
        section.record(report.serre_isomorphic, "S -> F(S) is not an order isomorphism")
        try:
            analysis.check_oracle_guard()
            exhaustive = True
        except TooLarge:
            exhaustive = False
        for subset in analysis.serre_subsets():
            sub = analysis.substructure_from_serre(subset)
            label = analysis.serre_label(subset)
            try:
                closure = analysis.verify_closed(
                    sub, samples=max(1, self.samples // 4), seed=self.seed, exhaustive=exhaustive,
                    with_sequence=not exhaustive,
                )
                section.record(closure.passed, f"F({label}): {'; '.join(closure.violations)}")
            except (NotASubbifunctor, ClosureViolation) as exc:
                section.record(False, f"F({label}): {exc}")
        return section

    def defect_transport(self) -> SectionReport:
        """Classes with isomorphic defects are linked by a morphism of conflations."""
        section = SectionReport(name="isomorphic defects")
        analysis = self.analysis
        for k in range(self.samples):
            delta = self.random_class()
            if delta is None:
                break
            if k % 2:
                other = self.isomorphic_partner(delta)
            else:
                other = delta.scaled(int(self.rng.integers(1, analysis.field.p)))
            try:
                witness = analysis.transport_defect_isomorphism(delta, other, self.rng)
                section.record(witness is not None, f"no isomorphism found for {delta!r}")
            except (TheoremViolation, NoCompletion, NotAMorphism) as exc:
                section.record(False, f"{delta!r}: {exc}")
        return section

    def long_exact(self) -> SectionReport:
        section = SectionReport(name="long exact sequence")
        analysis = self.analysis
        for _ in range(max(1, self.samples // 10)):
            delta = self.random_class()
            if delta is None:
                break
            c_index = analysis.table.index_of(delta.source)
            into = self.random_atlas_map(target_index=c_index)
            if into is None:
                continue
            morphism, _ = realize_pullback(into, analysis.realization(delta))
            report = check_long_exact(morphism, analysis.atlas)
            section.record(report.passed, "; ".join(report.violations))
        return section

    def run(self) -> SuiteReport:
        report = SuiteReport(seed=self.seed, samples=self.samples)
        sections = (
            self.simple_defects,
            self.defect_duality,
            self.pullback_pushout,
            self.composite_sequences,
            self.additivity,
            self.roundtrip,
            self.exact_structures,
            self.negative_controls,
            self.defect_transport,
            self.long_exact,
        )
        for run_section in sections:
            started = time.perf_counter()
            section = run_section()
            logger.info(
                "%s: %d checked, %d failed in %.2fs",
                section.name,
                section.checked,
                section.failed,
                time.perf_counter() - started,
            )
            report.sections.append(section)
        return report


def run_suite(analysis: DefectAnalysis, seed: int, samples: int) -> SuiteReport:
    return VerificationSuite(analysis, seed, samples).run()
