from pathlib import Path

import networkx as nx
import numpy as np
import pytest

from exstruct.models.report import Provenance
from exstruct.services import defectcore
from exstruct.services.defectcore import (
    ClosureViolation,
    NotASubbifunctor,
    NotFullModuleCategory,
    TheoremViolation,
    TooLarge,
)
from exstruct.services.extconf import pullback_ext, pushout_ext, realize_pullback, same_class
from exstruct.services.repmod import compose, direct_sum, identity, is_isomorphism, subtract
from exstruct.services.workspace import build_workspace, parse_input


def idx(workspace, name):
    return workspace.table.names.index(name)


def family(workspace, pairs):
    """The subspace family spanned by the named one-dimensional Ext groups."""
    analysis = workspace.analysis
    f = workspace.field
    chosen = {(idx(workspace, c), idx(workspace, a)) for c, a in pairs}
    return analysis.make_substructure(
        {pair: f.identity(1) if pair in chosen else f.zeros(1, 0) for pair in analysis.pairs},
        Provenance.CANDIDATE,
    )


# A3 extension classes by (end, start)
E1, E2, E3, E4, E5 = ("S1", "S2"), ("S1", "P2"), ("S2", "S3"), ("I2", "S3"), ("I2", "P2")


def test_simple_defects(ss, a2, dual, a3):
    assert ss.analysis.simple_defects == ()
    assert a2.analysis.serre_label(a2.analysis.simple_defects) == ["S1"]
    assert dual.analysis.serre_label(dual.analysis.simple_defects) == ["S"]
    assert a3.analysis.serre_label(a3.analysis.simple_defects) == ["S1", "I2", "S2"]


def test_defect_of_almost_split_class_a2(a2):
    analysis = a2.analysis
    delta = analysis.ext(idx(a2, "S1"), idx(a2, "S2")).basis()[0]
    defect = analysis.defect_of(delta)
    assert defect.module.dims == (1, 0, 0)
    assert defect.factors == {idx(a2, "S1"): 1}
    embedded = analysis.defect_isomorphism(defect)
    assert embedded.embedding.is_injective()
    assert [b.shape[1] for b in embedded.image] == [1, 0, 0]


def test_defect_of_split_class_is_zero(a2):
    analysis = a2.analysis
    delta = analysis.ext(idx(a2, "S1"), idx(a2, "S2")).zero()
    assert analysis.defect_of(delta).is_zero()


def test_defect_is_checked_against_the_connecting_map(a2, monkeypatch):
    analysis = a2.analysis
    conf = analysis.realization(analysis.ext(idx(a2, "S1"), idx(a2, "S2")).basis()[0])
    f = a2.field
    monkeypatch.setattr(defectcore, "connecting_matrix", lambda x, delta: f.zeros(1, 1))
    with pytest.raises(TheoremViolation, match="im delta_#"):
        analysis.defect(conf)


def test_ext_column(a2):
    column = a2.analysis.ext_column(a2.atlas[idx(a2, "S2")])
    assert column.module.dims == (1, 0, 0)


@pytest.mark.parametrize(
    ("pair", "support"),
    [
        (E1, {"S1"}),
        (E2, {"S1", "I2"}),
        (E3, {"S2"}),
        (E4, {"I2", "S2"}),
        (E5, {"I2"}),
    ],
)
def test_defect_supports_a3(a3, pair, support):
    analysis = a3.analysis
    delta = analysis.ext(idx(a3, pair[0]), idx(a3, pair[1])).basis()[0]
    defect = analysis.defect_of(delta)
    assert set(analysis.serre_label(defect.support)) == support
    analysis.defect_isomorphism(defect)
    assert analysis.effaceability_witness(delta)


def test_substructures_from_serre_a3(a3):
    analysis = a3.analysis
    expected = {
        (): set(),
        ("S1",): {E1},
        ("I2",): {E5},
        ("S2",): {E3},
        ("S1", "I2"): {E1, E2, E5},
        ("S1", "S2"): {E1, E3},
        ("I2", "S2"): {E3, E4, E5},
        ("S1", "I2", "S2"): {E1, E2, E3, E4, E5},
    }
    for names, pairs in expected.items():
        sub = analysis.substructure_from_serre({idx(a3, n) for n in names})
        assert sub.key == family(a3, pairs).key
        assert analysis.serre_from_substructure(sub) == {idx(a3, n) for n in names}


def test_roundtrip_counts(ss, a2, dual, a3):
    for workspace, count in ((ss, 1), (a2, 2), (dual, 2), (a3, 8)):
        report = workspace.analysis.theorem_roundtrip()
        assert report.serre_count == count
        assert report.passed, report.mismatches


def test_oracle_a3_p2(a3_p2):
    analysis = a3_p2.analysis
    stable, closed = analysis.oracle_sweep()
    assert len(stable) == 13
    assert len(closed) == 8
    serre = {analysis.substructure_from_serre(s).key for s in analysis.serre_subsets()}
    assert {sub.key for sub in closed} == serre


def test_oracle_small_fixtures(a2_p2, dual_p2):
    for workspace in (a2_p2, dual_p2):
        report = workspace.analysis.theorem_roundtrip(with_oracle=True)
        assert report.oracle_count == 2
        assert report.oracle_matches


def test_oracle_guard(a3):
    with pytest.raises(TooLarge):
        a3.analysis.enumerate_substructures_oracle()


def test_unstable_family_rejected(a3):
    sub = family(a3, {E2})
    assert a3.analysis.check_stability(sub)
    with pytest.raises(NotASubbifunctor):
        a3.analysis.serre_from_substructure(sub)
    with pytest.raises(NotASubbifunctor):
        a3.analysis.verify_closed(sub, samples=1)


def test_stable_family_that_is_not_closed(a3_p2):
    sub = family(a3_p2, {E1, E2, E3, E5})
    analysis = a3_p2.analysis
    assert analysis.check_stability(sub) == []
    assert not analysis.is_closed(sub)
    with pytest.raises(ClosureViolation):
        analysis.verify_closed(sub, exhaustive=True, with_sequence=False)


def test_closed_substructures_verify(a3):
    analysis = a3.analysis
    for subset in analysis.serre_subsets():
        report = analysis.verify_closed(
            analysis.substructure_from_serre(subset), samples=4, seed=1
        )
        assert report.passed, report.violations


def test_composite_of_deflations(a3):
    analysis = a3.analysis
    delta = analysis.ext(idx(a3, "S1"), idx(a3, "S2")).basis()[0]
    conf = analysis.realization(delta)
    group, basis = analysis.middle_subspace(conf, idx(a3, "P2"), analysis.full_substructure())
    assert basis.shape[1] == 1
    second = group.element(basis[:, 0])
    composite = analysis.composite_class(delta, second)
    assert sorted(i for i, _ in composite.components) == sorted(
        [idx(a3, "S2"), idx(a3, "P2")]
    )
    parts = {i: part for i, part in composite.components}
    assert not parts[idx(a3, "P2")].is_zero()
    check = analysis.composite_sequence(delta, second)
    assert check.passed, check.violations
    assert set(analysis.serre_label(check.factors["M"])) == {"S1", "I2"}


def test_transport_defect_isomorphism(a3):
    analysis = a3.analysis
    rng = np.random.default_rng(5)
    for c, a in analysis.pairs:
        delta = analysis.ext(c, a).basis()[0]
        witness = analysis.transport_defect_isomorphism(delta, delta.scaled(3), rng)
        assert witness is not None
        assert witness.theta.is_isomorphism()


def test_transport_through_a_direct_sum(a3):
    analysis = a3.analysis
    s2, i2 = idx(a3, "S2"), idx(a3, "I2")
    delta = analysis.ext(*(idx(a3, n) for n in E1)).basis()[0]
    total = direct_sum([analysis.atlas[s2], analysis.atlas[i2]])
    h = a3.table.homs[s2][i2].basis[0]
    shear = compose(total.injections[1], compose(h, total.projections[0]))
    alpha = subtract(identity(total.rep), shear)
    assert is_isomorphism(alpha)
    other = pushout_ext(compose(alpha, total.injections[0]), delta)

    witness = analysis.transport_defect_isomorphism(delta, other, np.random.default_rng(1))
    assert witness is not None
    a, c = witness.morphism.a, witness.morphism.c
    assert a.source.dims == total.rep.dims
    assert a.target.dims == analysis.atlas[s2].dims
    assert same_class(pushout_ext(a, other), pullback_ext(c, delta))
    assert is_isomorphism(c)


def test_induced_defect_maps(a3):
    analysis = a3.analysis
    c = idx(a3, "I2")
    conf = analysis.realization(analysis.ext(c, idx(a3, "S3")).basis()[0])
    for g in a3.table.homs[idx(a3, "S2")][c].basis:
        morphism, _ = realize_pullback(g, conf)
        assert analysis.induced_defect_map(morphism).is_injective()


def test_exact_structure_report(a2, a3):
    assert a2.analysis.exact_structure_report(require_full=True).count == 2
    report = a3.analysis.exact_structure_report(require_full=True)
    assert report.count == 8
    assert report.ambient_is_maximal
    assert report.serre_isomorphic


def test_serre_order_isomorphism_detects_reversal(a2):
    analysis = a2.analysis
    subsets = analysis.serre_subsets()
    structures = [analysis.substructure_from_serre(s) for s in subsets]
    assert analysis._order_isomorphic(subsets, structures)
    assert not analysis._order_isomorphic(subsets, structures[::-1])


def test_exact_structures_need_full_category(settings):
    fixture = Path(__file__).resolve().parent.parent / "fixtures" / "a2.json"
    description = parse_input(fixture)
    description.flags.full_module_category = False
    workspace = build_workspace(description, settings=settings, use_cache=False)
    with pytest.raises(NotFullModuleCategory):
        workspace.analysis.exact_structure_report(require_full=True)
    report = workspace.analysis.exact_structure_report()
    assert not report.ambient_is_maximal
    assert report.count == 2


def test_serre_poset(a3):
    graph = a3.analysis.serre_poset()
    assert graph.number_of_nodes() == 8
    assert nx.transitive_reduction(graph).number_of_edges() == 12
