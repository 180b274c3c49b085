import itertools
from collections import Counter

import numpy as np
import pytest

from exstruct.services.exactfield import Field
from exstruct.services.pathalg import Arrow, Quiver, RelationSet, build_algebra
from exstruct.services.repmod import (
    AtlasIncomplete,
    CharacteristicTooSmall,
    RelationViolation,
    Representation,
    cokernel,
    compose,
    direct_sum,
    end_radical,
    hom_space,
    identity,
    is_indecomposable,
    kernel,
    krull_schmidt_decompose,
    projective,
    same_morphism,
    simple,
    solve_for_morphism,
)

QUIVER = Quiver(3, (Arrow("a", 0, 1), Arrow("b", 1, 2)))
LOOP = Quiver(1, (Arrow("x", 0, 0),))


@pytest.fixture(scope="module")
def a3():
    return build_algebra(QUIVER, RelationSet.parse(QUIVER, [], 3), Field(11))


@pytest.fixture(scope="module")
def dual2():
    return build_algebra(LOOP, RelationSet.parse(LOOP, [[(1, ["x", "x"])]], 2), Field(2))


def test_projectives_have_path_dimensions(a3):
    assert projective(a3, 0).dims == (1, 1, 1)
    assert projective(a3, 1).dims == (0, 1, 1)
    assert projective(a3, 2).dims == (0, 0, 1)


def test_relations_checked_on_build(dual2):
    Representation.build(dual2, [2], {"x": [[0, 0], [1, 0]]})
    with pytest.raises(RelationViolation):
        Representation.build(dual2, [2], {"x": [[1, 0], [0, 1]]})


def test_hom_dimensions(a3):
    p0, p1 = projective(a3, 0), projective(a3, 1)
    s0, s2 = simple(a3, 0), simple(a3, 2)
    assert hom_space(p1, p0).dim == 1
    assert hom_space(p0, p1).dim == 0
    assert hom_space(p0, s0).dim == 1
    assert hom_space(s2, p0).dim == 1
    assert hom_space(p0, p0).dim == 1


def test_kernel_and_cokernel_of_projection(a3):
    p0 = projective(a3, 0)
    top = hom_space(p0, simple(a3, 0)).basis[0]
    rad, inclusion = kernel(top)
    assert rad.dims == (0, 1, 1)
    assert compose(top, inclusion).is_zero()
    quo, _ = cokernel(inclusion)
    assert quo.dims == (1, 0, 0)


def test_solve_for_morphism_finds_lift(a3):
    p0, p1 = projective(a3, 0), projective(a3, 1)
    inclusion = hom_space(p1, p0).basis[0]
    h = solve_for_morphism(p1, p0, [(None, None, inclusion)])
    assert h is not None
    assert hom_space(p1, p0).contains(h)
    assert solve_for_morphism(p0, p1, [(inclusion, None, identity(p0))]) is None


def test_radical_and_indecomposability(a3):
    p0 = projective(a3, 0)
    assert is_indecomposable(p0)
    assert end_radical(p0).dim == 0
    total = direct_sum([p0, simple(a3, 1)]).rep
    assert not is_indecomposable(total)


def test_small_characteristic_needs_flag(dual2):
    p = Representation.build(dual2, [2], {"x": [[0, 0], [1, 0]]})
    with pytest.raises(CharacteristicTooSmall):
        end_radical(p)
    radical = end_radical(p, allow_small_characteristic=True)
    assert radical.method == "local"
    assert radical.dim == 1
    assert is_indecomposable(p, allow_small_characteristic=True)


def test_krull_schmidt(a3):
    atlas = [projective(a3, 0), projective(a3, 1), simple(a3, 0), simple(a3, 1)]
    total = direct_sum([atlas[2], atlas[0], atlas[2], atlas[3]]).rep
    decomposition = krull_schmidt_decompose(total, atlas)
    assert decomposition.multiplicities == {0: 1, 2: 2, 3: 1}
    for s in decomposition.summands:
        assert same_morphism(compose(s.retraction, s.section), identity(atlas[s.index]))
    with pytest.raises(AtlasIncomplete):
        krull_schmidt_decompose(simple(a3, 2), atlas)


@pytest.fixture(scope="module")
def a3_atlas(a3):
    injective = Representation.build(a3, [1, 1, 0], {"a": [[1]]}, name="I1")
    return [*(projective(a3, v) for v in range(3)), simple(a3, 0), simple(a3, 1), injective]


def test_hom_is_additive_in_both_arguments(a3_atlas):
    for x, y, z in itertools.product(a3_atlas, repeat=3):
        total = direct_sum([x, y]).rep
        assert hom_space(total, z).dim == hom_space(x, z).dim + hom_space(y, z).dim
        assert hom_space(z, total).dim == hom_space(z, x).dim + hom_space(z, y).dim


def test_krull_schmidt_ignores_atlas_order(a3_atlas):
    parts = [a3_atlas[5], a3_atlas[0], a3_atlas[4], a3_atlas[5], a3_atlas[2]]
    total = direct_sum(parts).rep
    expected = Counter(p.fingerprint for p in parts)
    rng = np.random.default_rng(0)
    for _ in range(6):
        order = [a3_atlas[k] for k in rng.permutation(len(a3_atlas))]
        decomposition = krull_schmidt_decompose(total, order)
        assert Counter(order[s.index].fingerprint for s in decomposition.summands) == expected


def test_maps_between_non_isomorphic_members_are_radical(a3_atlas):
    for x, y in itertools.permutations(a3_atlas, 2):
        radical = end_radical(x)
        end = hom_space(x, x)
        for f in hom_space(x, y).basis:
            for g in hom_space(y, x).basis:
                assert radical.contains(end.coordinates(compose(g, f)))
