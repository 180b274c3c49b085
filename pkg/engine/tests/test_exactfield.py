import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exstruct.services.exactfield import DimensionMismatch, Field, NoSolution, NotPrime

F = Field(7)

dims = st.integers(min_value=0, max_value=5)


@st.composite
def matrices(draw, rows=dims, cols=dims):
    r, c = draw(rows), draw(cols)
    entries = draw(st.lists(st.integers(0, 6), min_size=r * c, max_size=r * c))
    return F.matrix(np.asarray(entries, dtype=np.int64).reshape(r, c), shape=(r, c))


@given(matrices())
def test_rank_nullity(m):
    kernel = F.kernel_basis(m)
    assert F.rank(m) + kernel.shape[1] == m.shape[1]
    assert F.is_zero(F.mul(m, kernel))


@given(matrices(), st.data())
def test_solve_returns_exact_solution(m, data):
    x = F.matrix(data.draw(st.lists(st.integers(0, 6), min_size=m.shape[1], max_size=m.shape[1])))
    b = F.mul(m, x.reshape(m.shape[1]))
    assert F.equal(F.mul(m, F.solve(m, b)), b)


@given(matrices(), matrices())
def test_sum_and_intersection_dimensions(u, v):
    if u.shape[0] != v.shape[0]:
        v = F.zeros(u.shape[0], 0)
    total = F.subspace_sum(u, v).shape[1]
    meet = F.subspace_intersection(u, v).shape[1]
    assert total + meet == F.rank(u) + F.rank(v)


@settings(max_examples=50)
@given(matrices())
def test_image_basis_is_canonical(m):
    basis = F.image_basis(m)
    assert F.equal(F.image_basis(basis), basis)
    assert F.same_span(basis, m)


def test_not_prime():
    with pytest.raises(NotPrime):
        Field(4)
    with pytest.raises(NotPrime):
        Field(1)


def test_matrix_reduces_mod_p():
    m = F.matrix([[8, -1], [14, 3]])
    assert F.equal(m, F.matrix([[1, 6], [0, 3]]))


def test_matrix_shape_checks():
    assert F.matrix([], shape=(0, 3)).shape == (0, 3)
    with pytest.raises(DimensionMismatch):
        F.matrix([[1, 2]], shape=(2, 1))


def test_inconsistent_system():
    m = F.matrix([[1, 0], [0, 0]])
    with pytest.raises(NoSolution):
        F.solve(m, F.matrix([0, 1]))


def test_inverse_and_singular():
    m = F.matrix([[2, 1], [1, 1]])
    assert F.equal(F.mul(m, F.inverse(m)), F.identity(2))
    with pytest.raises(NoSolution):
        F.inverse(F.matrix([[1, 2], [2, 4]]))


def test_left_and_right_inverse():
    basis = F.matrix([[1, 0], [2, 1], [0, 3]])
    assert F.equal(F.mul(F.left_inverse(basis), basis), F.identity(2))
    assert F.equal(F.mul(basis.T, F.right_inverse(basis.T)), F.identity(2))


@pytest.mark.parametrize(
    ("p", "n", "count"),
    [(2, 0, 1), (2, 1, 2), (2, 2, 5), (3, 2, 6), (2, 3, 16)],
)
def test_all_subspaces_counts(p, n, count):
    field = Field(p)
    subspaces = list(field.all_subspaces(n))
    assert len(subspaces) == count
    assert len({field.key(s) for s in subspaces}) == count
    assert all(field.equal(field.image_basis(s), s) for s in subspaces)


def test_projective_elements():
    field = Field(3)
    basis = field.identity(2)
    assert len(list(field.subspace_elements(basis))) == 9
    assert len(list(field.subspace_elements(basis, projective=True))) == 4


def test_quotient_basis_projection():
    ambient = F.identity(3)
    sub = F.matrix([[1], [1], [0]])
    quotient = F.quotient_basis(sub, ambient)
    assert quotient.dim == 2
    assert F.is_zero(F.mul(quotient.projection, sub))
    assert F.equal(F.mul(quotient.projection, quotient.complement), F.identity(2))


def test_empty_shapes():
    assert F.mul(F.zeros(2, 0), F.zeros(0, 3)).shape == (2, 3)
    assert F.rank(F.zeros(0, 4)) == 0
    assert F.kernel_basis(F.zeros(0, 2)).shape == (2, 2)
    assert F.hstack([], 3).shape == (3, 0)


@st.composite
def column_triples(draw):
    p = draw(st.sampled_from([2, 5]))
    field = Field(p)

    def basis():
        k = draw(st.integers(0, 4))
        entries = draw(st.lists(st.integers(0, p - 1), min_size=6 * k, max_size=6 * k))
        return field.matrix(np.asarray(entries, dtype=np.int64).reshape(6, k), shape=(6, k))

    return field, basis(), basis(), basis()


@settings(max_examples=200, deadline=None)
@given(column_triples())
def test_modular_law(triple):
    field, a, b, c = triple
    c = field.subspace_sum(a, c)
    lhs = field.subspace_intersection(field.subspace_sum(a, b), c)
    rhs = field.subspace_sum(a, field.subspace_intersection(b, c))
    assert field.same_span(lhs, rhs)
