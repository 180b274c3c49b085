import gc
import weakref

import numpy as np
import pytest

from exstruct.services.exactfield import Field
from exstruct.services.extconf import (
    ConflationClass,
    ConflationMorphism,
    NotAConflation,
    NotAMorphism,
    check_long_exact,
    class_of,
    complete_conflation_morphism,
    direct_sum_class,
    equivalent_conflations,
    ext_group,
    factor_conflation_morphism,
    identity_morphism,
    presentation,
    pullback_ext,
    pushout_ext,
    realize,
    realize_pullback,
    realize_pushout,
    same_class,
    split_conflation,
)
from exstruct.services.pathalg import Arrow, Quiver, RelationSet, build_algebra
from exstruct.services.repmod import (
    add,
    compose,
    hom_space,
    identity,
    is_isomorphism,
    same_morphism,
    simple,
    solve_for_morphism,
    zero_morphism,
)


def atlas_member(workspace, name):
    return workspace.atlas[workspace.table.names.index(name)]


def test_ext_dimensions_a2(a2):
    s1, p1, s2 = (atlas_member(a2, n) for n in ("S1", "P1", "S2"))
    assert ext_group(s1, s2).dim == 1
    assert ext_group(s2, s1).dim == 0
    assert ext_group(s1, p1).dim == 0
    assert ext_group(p1, s2).dim == 0


def test_ext_dimensions_a3(a3):
    dims = {
        (c, a): a3.analysis.ext_dims[c][a]
        for c in range(a3.table.size)
        for a in range(a3.table.size)
        if a3.analysis.ext_dims[c][a]
    }
    names = a3.table.names
    assert {(names[c], names[a]) for c, a in dims} == {
        ("S1", "S2"),
        ("S2", "S3"),
        ("S1", "P2"),
        ("I2", "S3"),
        ("I2", "P2"),
    }
    assert set(dims.values()) == {1}


def test_realization_of_nonsplit_class(a2):
    s1, s2 = atlas_member(a2, "S1"), atlas_member(a2, "S2")
    delta = ext_group(s1, s2).basis()[0]
    conf = realize(delta)
    assert conf.middle.dims == (1, 1)
    assert not conf.is_split()
    assert a2.analysis.decompose(conf.middle).indices == [a2.table.names.index("P1")]
    assert same_class(class_of(conf.inflation, conf.deflation), delta)


def test_realization_of_zero_is_split(a2):
    s1, s2 = atlas_member(a2, "S1"), atlas_member(a2, "S2")
    conf = split_conflation(s2, s1)
    assert conf.is_split()
    assert sorted(a2.analysis.decompose(conf.middle).indices) == [0, 2]


def test_scaled_classes_are_not_equivalent(a2):
    s1, s2 = atlas_member(a2, "S1"), atlas_member(a2, "S2")
    delta = ext_group(s1, s2).basis()[0]
    conf = realize(delta)
    b = equivalent_conflations(conf, realize(delta))
    assert b is not None and is_isomorphism(b)
    assert equivalent_conflations(conf, realize(delta.scaled(2))) is None


def test_bad_sequence_rejected(a2):
    s1, s2 = atlas_member(a2, "S1"), atlas_member(a2, "S2")
    conf = realize(ext_group(s1, s2).basis()[0])
    with pytest.raises(NotAConflation):
        ConflationClass(
            conf.delta, conf.middle, conf.inflation, zero_morphism(conf.middle, conf.end)
        )


def test_pullback_along_deflation_splits(a2):
    s1, s2 = atlas_member(a2, "S1"), atlas_member(a2, "S2")
    conf = realize(ext_group(s1, s2).basis()[0])
    assert pullback_ext(conf.deflation, conf.delta).is_zero()
    assert pushout_ext(conf.inflation, conf.delta).is_zero()


def test_pushout_along_automorphism_is_nonzero(a3):
    delta = a3.analysis.ext(0, 3).basis()[0]
    pushed = pushout_ext(hom_space(delta.target, delta.target).basis[0], delta)
    assert not pushed.is_zero()


def test_direct_sum_class_dimensions(a2):
    s1, s2 = atlas_member(a2, "S1"), atlas_member(a2, "S2")
    delta = ext_group(s1, s2).basis()[0]
    total = direct_sum_class(delta, delta)
    assert total.group.dim == 4
    assert realize(total).middle.dims == (2, 2)


def test_pullback_and_pushout_morphisms(a3):
    analysis = a3.analysis
    names = a3.table.names
    c, a = names.index("I2"), names.index("P2")
    conf = analysis.realization(analysis.ext(c, a).basis()[0])
    into = a3.table.homs[names.index("S2")][c]
    for g in into.basis:
        morphism, solver = realize_pullback(g, conf)
        w = solver.mediate(morphism.b, morphism.source.deflation)
        assert w.source.fingerprint == morphism.source.middle.fingerprint
    out = a3.table.homs[a][names.index("P1")]
    for g in out.basis:
        morphism = realize_pushout(g, conf)
        assert morphism.target.start.fingerprint == a3.atlas[names.index("P1")].fingerprint


def test_long_exact_sequence_along_identity(a3):
    analysis = a3.analysis
    for c, a in analysis.pairs:
        conf = analysis.realization(analysis.ext(c, a).basis()[0])
        report = check_long_exact(identity_morphism(conf), analysis.atlas)
        assert report.passed, report.violations
        assert report.objects_checked == a3.table.size


def test_factorization_of_identity(a2):
    s1, s2 = atlas_member(a2, "S1"), atlas_member(a2, "S2")
    conf = realize(ext_group(s1, s2).basis()[0])
    factored = factor_conflation_morphism(identity_morphism(conf))
    assert is_isomorphism(factored.middle_map)
    assert same_class(factored.delta, conf.delta)


def test_pullback_and_pushout_are_functorial(a3):
    table = a3.table
    n = table.size
    for c in range(n):
        for a in range(n):
            for delta in ext_group(a3.atlas[c], a3.atlas[a]).basis():
                for x in range(n):
                    for y in range(n):
                        for g in table.homs[x][c].basis:
                            for h in table.homs[y][x].basis:
                                assert same_class(
                                    pullback_ext(compose(g, h), delta),
                                    pullback_ext(h, pullback_ext(g, delta)),
                                )
                        for g in table.homs[a][x].basis:
                            for h in table.homs[x][y].basis:
                                assert same_class(
                                    pushout_ext(compose(h, g), delta),
                                    pushout_ext(h, pushout_ext(g, delta)),
                                )


def random_conflation_morphism(workspace, rng, zero_left=False):
    """(a, b, c): realize(c^* delta) -> realize(a_* delta) for random atlas maps a and c."""
    analysis, table = workspace.analysis, workspace.table
    c_index, a_index = analysis.pairs[int(rng.integers(len(analysis.pairs)))]
    delta = analysis.ext(c_index, a_index).random(rng)
    x = int(rng.choice([i for i in range(table.size) if table.homs[i][c_index].dim]))
    y = int(rng.choice([j for j in range(table.size) if table.homs[a_index][j].dim]))
    c = table.homs[x][c_index].random(rng)
    if zero_left:
        a = zero_morphism(delta.target, workspace.atlas[y])
    else:
        a = table.homs[a_index][y].random(rng)
    first = realize(pullback_ext(c, delta))
    second = realize(pushout_ext(a, delta))
    b = solve_for_morphism(
        first.middle,
        second.middle,
        [
            (None, first.inflation, compose(second.inflation, a)),
            (second.deflation, None, compose(c, first.deflation)),
        ],
    )
    assert b is not None
    return ConflationMorphism(first, second, a, b, c)


def test_pushout_and_pullback_commute(a3):
    table = a3.table
    rng = np.random.default_rng(0)
    for _ in range(100):
        c_index, a_index = a3.analysis.pairs[int(rng.integers(len(a3.analysis.pairs)))]
        delta = a3.analysis.ext(c_index, a_index).random(rng)
        x = int(rng.choice([i for i in range(table.size) if table.homs[i][c_index].dim]))
        y = int(rng.choice([j for j in range(table.size) if table.homs[a_index][j].dim]))
        c = table.homs[x][c_index].random(rng)
        a = table.homs[a_index][y].random(rng)
        assert same_class(
            pushout_ext(a, pullback_ext(c, delta)), pullback_ext(c, pushout_ext(a, delta))
        )


def test_factorization_of_random_morphisms(a3):
    rng = np.random.default_rng(1)
    for _ in range(50):
        m = random_conflation_morphism(a3, rng)
        factored = factor_conflation_morphism(m)
        assert same_class(factored.delta, pullback_ext(m.c, m.target.delta))
        assert same_class(factored.delta, pushout_ext(m.a, m.source.delta))
        b = factored.middle_map
        assert same_morphism(compose(b, m.source.inflation), compose(m.target.inflation, m.a))
        assert same_morphism(compose(m.target.deflation, b), compose(m.c, m.source.deflation))


def test_factorization_with_zero_left_map(a3):
    rng = np.random.default_rng(2)
    for _ in range(10):
        m = random_conflation_morphism(a3, rng, zero_left=True)
        factored = factor_conflation_morphism(m)
        assert factored.delta.is_zero()
        assert factored.upper.target.is_split()


def test_complete_conflation_morphism(a3):
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = random_conflation_morphism(a3, rng)
        completed = complete_conflation_morphism(m.b, m.c, m.source, m.target)
        assert same_morphism(completed.a, m.a)


def test_complete_conflation_morphism_rejects_noncommuting_square(a2):
    s1, s2 = atlas_member(a2, "S1"), atlas_member(a2, "S2")
    conf = realize(ext_group(s1, s2).basis()[0])
    completed = complete_conflation_morphism(identity(conf.middle), identity(conf.end), conf, conf)
    assert same_morphism(completed.a, identity(conf.start))
    doubled = add(identity(conf.end), identity(conf.end))
    with pytest.raises(NotAMorphism):
        complete_conflation_morphism(identity(conf.middle), doubled, conf, conf)


def test_pullback_along_zero_splits(a2):
    s1, s2 = atlas_member(a2, "S1"), atlas_member(a2, "S2")
    conf = realize(ext_group(s1, s2).basis()[0])
    for x, rep in enumerate(a2.atlas):
        morphism, _ = realize_pullback(zero_morphism(rep, s1), conf)
        assert morphism.source.is_split()
        expected = sorted([a2.table.names.index("S2"), x])
        assert sorted(a2.analysis.decompose(morphism.source.middle).indices) == expected


def test_pullback_along_the_projective_cover_splits(a2):
    s1, p1 = atlas_member(a2, "S1"), atlas_member(a2, "P1")
    delta = ext_group(s1, atlas_member(a2, "S2")).basis()[0]
    cover = hom_space(p1, s1).basis[0]
    assert pullback_ext(cover, delta).is_zero()
    morphism, _ = realize_pullback(cover, realize(delta))
    assert morphism.source.is_split()


def test_memoised_groups_are_released_with_the_algebra():
    quiver = Quiver(2, (Arrow("a", 0, 1),))
    algebra = build_algebra(quiver, RelationSet.parse(quiver, [], 2), Field(5))
    s0, s1 = simple(algebra, 0), simple(algebra, 1)
    group = ext_group(s0, s1)
    assert group.dim == 1
    assert ext_group(simple(algebra, 0), simple(algebra, 1)) is group
    assert presentation(s0) is group.presentation
    released = weakref.ref(algebra)
    del algebra, s0, s1, group
    gc.collect()
    assert released() is None
