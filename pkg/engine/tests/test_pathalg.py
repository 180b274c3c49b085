import pytest

from exstruct.services.exactfield import Field
from exstruct.services.pathalg import (
    Arrow,
    InvalidQuiver,
    NotAdmissible,
    NotHomogeneousRelation,
    Quiver,
    RelationSet,
    build_algebra,
)

F = Field(5)

LINEAR_A3 = Quiver(3, (Arrow("a", 0, 1), Arrow("b", 1, 2)))
LOOP = Quiver(1, (Arrow("x", 0, 0),))
SQUARE = Quiver(
    4, (Arrow("a", 0, 1), Arrow("b", 1, 3), Arrow("c", 0, 2), Arrow("d", 2, 3))
)


def test_path_algebra_of_linear_quiver():
    algebra = build_algebra(LINEAR_A3, RelationSet.parse(LINEAR_A3, [], 3), F)
    assert algebra.dim == 6
    assert [str(p) for p in algebra.basis_between(0, 2)] == ["ab"]
    assert algebra.is_associative()
    assert algebra.radical_power_vanishes(3)
    assert not algebra.radical_power_vanishes(2)


def test_zero_relation_kills_long_path():
    relations = RelationSet.parse(LINEAR_A3, [[(1, ["a", "b"])]], 2)
    algebra = build_algebra(LINEAR_A3, relations, F)
    assert algebra.dim == 5
    assert F.is_zero(algebra.reduce(LINEAR_A3.path(["a", "b"])))


def test_dual_numbers():
    relations = RelationSet.parse(LOOP, [[(1, ["x", "x"])]], 2)
    algebra = build_algebra(LOOP, relations, F)
    assert algebra.dim == 2
    assert algebra.is_associative()
    x = algebra.index[LOOP.path(["x"])]
    assert F.is_zero(algebra.multiply(x, x))
    constants = algebra.structure_constants
    assert constants.shape == (2, 2, 2)
    assert F.is_zero(constants[x, x])
    assert F.equal(constants[1 - x, x], algebra.multiply(1 - x, x))


def test_commutativity_relation_identifies_paths():
    relations = RelationSet.parse(SQUARE, [[(1, ["a", "b"]), (-1, ["c", "d"])]], 3)
    algebra = build_algebra(SQUARE, relations, F)
    assert algebra.dim == 4 + 4 + 1
    assert F.equal(
        algebra.reduce(SQUARE.path(["a", "b"])), algebra.reduce(SQUARE.path(["c", "d"]))
    )


def test_relation_of_length_one_is_not_admissible():
    with pytest.raises(NotAdmissible):
        RelationSet.parse(LINEAR_A3, [[(1, ["a"])]], 3)


def test_missing_relation_is_not_admissible():
    with pytest.raises(NotAdmissible):
        build_algebra(LOOP, RelationSet.parse(LOOP, [], 2), F)


def test_mixed_relations_rejected():
    with pytest.raises(NotHomogeneousRelation):
        RelationSet.parse(SQUARE, [[(1, ["a", "b"]), (1, ["c"])]], 3)
    with pytest.raises(NotHomogeneousRelation):
        RelationSet.parse(SQUARE, [[(1, ["a", "b"]), (1, ["a"])]], 3)


def test_invalid_quivers():
    with pytest.raises(InvalidQuiver):
        Quiver(2, (Arrow("a", 0, 2),))
    with pytest.raises(InvalidQuiver):
        Quiver(2, (Arrow("a", 0, 1), Arrow("a", 1, 0)))
    with pytest.raises(InvalidQuiver):
        LINEAR_A3.path(["b", "a"])


def test_longest_path():
    assert LINEAR_A3.longest_path() == 2
    assert LOOP.longest_path() is None
