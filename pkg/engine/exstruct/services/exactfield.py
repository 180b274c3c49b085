"""Exact dense linear algebra over a prime field.

Matrices are ``galois`` field arrays. A subspace of F_p^n is stored as an
n x k matrix whose columns form a basis; vectors are one-dimensional arrays.
All results are canonical (reduced row echelon based), so two runs on the same
input produce bit-identical bases.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import galois
import numpy as np

logger = logging.getLogger(__name__)


class NotPrime(ValueError):
    """Raised when a field is requested for a modulus that is not prime."""

    pass


class DimensionMismatch(ValueError):
    """Raised when matrix shapes are incompatible for an operation."""

    pass


class NoSolution(ValueError):
    """Raised when a linear system is inconsistent."""

    pass


@dataclass(frozen=True)
class Quotient:
    """A complement of U inside V together with the projection V -> V/U.

    ``projection @ v`` gives the coordinates of ``v + U`` with respect to the
    columns of ``complement``. Only meaningful for vectors of V.
    """

    complement: galois.FieldArray  # n x q
    projection: galois.FieldArray  # q x n

    @property
    def dim(self) -> int:
        return self.complement.shape[1]


def as_ints(matrix: np.ndarray) -> np.ndarray:
    """Plain int64 copy of a field array (for hashing and serialisation)."""
    return np.asarray(matrix.view(np.ndarray), dtype=np.int64)


class Field:
    """The prime field F_p with matrix helpers."""

    def __init__(self, p: int):
        if p < 2 or not galois.is_prime(p):
            raise NotPrime(f"{p} is not prime")
        self.p = int(p)
        self.GF = galois.GF(self.p)

    def __repr__(self) -> str:
        return f"Field({self.p})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("Field", self.p))

    # ==================== Construction ====================

    def matrix(self, data, shape: tuple[int, int] | None = None) -> galois.FieldArray:
        """Field matrix from integer data, reduced mod p.

        ``shape`` is required when a dimension is zero, since ``[]`` alone does
        not say how many columns a 0-row matrix has.
        """
        raw = np.asarray(data, dtype=object)
        if shape is not None:
            if 0 in shape:
                if raw.size:
                    raise DimensionMismatch(f"expected an empty {shape} matrix, got data")
                return self.zeros(*shape)
            if raw.shape != tuple(shape):
                raise DimensionMismatch(f"expected shape {tuple(shape)}, got {raw.shape}")
        raw = np.asarray([int(x) % self.p for x in raw.ravel()], dtype=np.int64).reshape(raw.shape)
        return self.GF(raw)

    def zeros(self, rows: int, cols: int) -> galois.FieldArray:
        return self.GF.Zeros((rows, cols))

    def zero_vector(self, n: int) -> galois.FieldArray:
        return self.GF.Zeros(n)

    def identity(self, n: int) -> galois.FieldArray:
        return self.GF.Identity(n)

    def unit_vector(self, n: int, i: int) -> galois.FieldArray:
        v = self.GF.Zeros(n)
        v[i] = 1
        return v

    def scalar(self, c: int) -> galois.FieldArray:
        return self.GF(int(c) % self.p)

    def hstack(self, blocks: Sequence[np.ndarray], rows: int) -> galois.FieldArray:
        """Concatenate column blocks; ``rows`` fixes the shape when ``blocks`` is empty."""
        if not blocks:
            return self.zeros(rows, 0)
        return self.GF(np.hstack([as_ints(b) for b in blocks]))

    def vstack(self, blocks: Sequence[np.ndarray], cols: int) -> galois.FieldArray:
        if not blocks:
            return self.zeros(0, cols)
        return self.GF(np.vstack([as_ints(b) for b in blocks]))

    def block_diag(self, blocks: Sequence[np.ndarray]) -> galois.FieldArray:
        rows = sum(b.shape[0] for b in blocks)
        cols = sum(b.shape[1] for b in blocks)
        out = np.zeros((rows, cols), dtype=np.int64)
        r = c = 0
        for b in blocks:
            out[r : r + b.shape[0], c : c + b.shape[1]] = as_ints(b)
            r += b.shape[0]
            c += b.shape[1]
        return self.GF(out)

    def random_vector(self, n: int, rng: np.random.Generator) -> galois.FieldArray:
        return self.GF(rng.integers(0, self.p, size=n, dtype=np.int64))

    def random_matrix(self, rows: int, cols: int, rng: np.random.Generator) -> galois.FieldArray:
        return self.GF(rng.integers(0, self.p, size=(rows, cols), dtype=np.int64))

    # ==================== Arithmetic ====================

    def mul(self, a: np.ndarray, b: np.ndarray) -> galois.FieldArray:
        """Matrix product with shape checking (handles empty dimensions)."""
        if a.shape[-1] != b.shape[0]:
            raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
        out_shape = a.shape[:-1] + b.shape[1:]
        if 0 in a.shape or 0 in b.shape:
            return self.GF.Zeros(out_shape)
        return a @ b

    def kron(self, a: np.ndarray, b: np.ndarray) -> galois.FieldArray:
        ra, ca = a.shape
        rb, cb = b.shape
        if 0 in (ra, ca, rb, cb):
            return self.zeros(ra * rb, ca * cb)
        product = a[:, None, :, None] * b[None, :, None, :]
        return product.reshape(ra * rb, ca * cb)

    def is_zero(self, a: np.ndarray) -> bool:
        return not np.count_nonzero(a.view(np.ndarray))

    def equal(self, a: np.ndarray, b: np.ndarray) -> bool:
        return a.shape == b.shape and np.array_equal(a.view(np.ndarray), b.view(np.ndarray))

    def trace(self, a: np.ndarray) -> int:
        return int(np.diagonal(as_ints(a)).sum() % self.p)

    # ==================== Elimination ====================

    def rref(self, m: np.ndarray) -> tuple[galois.FieldArray, list[int], int]:
        """Reduced row echelon form, pivot columns and rank."""
        rows, cols = m.shape
        if rows == 0 or cols == 0:
            return self.zeros(rows, cols), [], 0
        reduced = self.GF(as_ints(m)).row_reduce()
        raw = reduced.view(np.ndarray)
        pivots: list[int] = []
        for r in range(rows):
            nonzero = np.flatnonzero(raw[r])
            if nonzero.size == 0:
                break
            pivots.append(int(nonzero[0]))
        return reduced, pivots, len(pivots)

    def rank(self, m: np.ndarray) -> int:
        return self.rref(m)[2]

    def kernel_basis(self, m: np.ndarray) -> galois.FieldArray:
        """Columns spanning {x : m x = 0}, one per free column of the rref."""
        rows, cols = m.shape
        reduced, pivots, rank = self.rref(m)
        pivot_set = set(pivots)
        free = [c for c in range(cols) if c not in pivot_set]
        basis = self.zeros(cols, len(free))
        for k, f in enumerate(free):
            basis[f, k] = 1
            for r, pc in enumerate(pivots):
                basis[pc, k] = -reduced[r, f]
        return basis

    def image_basis(self, m: np.ndarray) -> galois.FieldArray:
        """Canonical column basis of the column space (rref of the transpose)."""
        rows, cols = m.shape
        reduced, _, rank = self.rref(m.T)
        return self.GF(as_ints(reduced[:rank]).T.reshape(rows, rank))

    def solve(self, m: np.ndarray, b: np.ndarray) -> galois.FieldArray:
        """A particular solution x of m x = b (free variables set to zero).

        ``b`` may be a vector or a matrix of right-hand sides.
        """
        vector = b.ndim == 1
        rhs = b.reshape(-1, 1) if vector else b
        if m.shape[0] != rhs.shape[0]:
            raise DimensionMismatch(f"system {m.shape} with right-hand side {b.shape}")
        n = m.shape[1]
        if m.shape[0] == 0:
            x = self.zeros(n, rhs.shape[1])
        else:
            augmented = self.hstack([m, rhs], m.shape[0])
            reduced, pivots, _ = self.rref(augmented)
            if pivots and pivots[-1] >= n:
                raise NoSolution("inconsistent linear system")
            x = self.zeros(n, rhs.shape[1])
            for r, pc in enumerate(pivots):
                x[pc] = reduced[r, n:]
        return x.reshape(n) if vector else x

    def inverse(self, m: np.ndarray) -> galois.FieldArray:
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"cannot invert a {m.shape} matrix")
        if self.rank(m) != m.shape[0]:
            raise NoSolution("matrix is singular")
        return self.solve(m, self.identity(m.shape[0]))

    def left_inverse(self, basis: np.ndarray) -> galois.FieldArray:
        """L with L @ basis = I for a matrix of full column rank."""
        n, k = basis.shape
        if k == 0:
            return self.zeros(0, n)
        return self.solve(basis.T, self.identity(k)).T

    def right_inverse(self, m: np.ndarray) -> galois.FieldArray:
        """R with m @ R = I for a matrix of full row rank."""
        return self.left_inverse(m.T).T

    # ==================== Subspaces ====================

    def contains(self, basis: np.ndarray, v: np.ndarray) -> bool:
        cols = v.reshape(-1, 1) if v.ndim == 1 else v
        if cols.shape[1] == 0:
            return True
        return self.rank(self.hstack([basis, cols], basis.shape[0])) == self.rank(basis)

    def same_span(self, u: np.ndarray, v: np.ndarray) -> bool:
        return self.equal(self.image_basis(u), self.image_basis(v))

    def subspace_sum(self, u: np.ndarray, v: np.ndarray) -> galois.FieldArray:
        if u.shape[0] != v.shape[0]:
            raise DimensionMismatch(f"subspaces of F^{u.shape[0]} and F^{v.shape[0]}")
        return self.image_basis(self.hstack([u, v], u.shape[0]))

    def subspace_intersection(self, u: np.ndarray, v: np.ndarray) -> galois.FieldArray:
        if u.shape[0] != v.shape[0]:
            raise DimensionMismatch(f"subspaces of F^{u.shape[0]} and F^{v.shape[0]}")
        u = self.image_basis(u)
        v = self.image_basis(v)
        relations = self.kernel_basis(self.hstack([u, -v], u.shape[0]))
        return self.image_basis(self.mul(u, relations[: u.shape[1]]))

    def quotient_basis(self, u: np.ndarray, v: np.ndarray) -> Quotient:
        """Complement of span(u) in span(v) and the projection onto V/U.

        Requires span(u) to lie inside span(v); the complement is chosen among
        the columns of v, earliest first.
        """
        n = v.shape[0]
        if u.shape[0] != n:
            raise DimensionMismatch(f"subspaces of F^{u.shape[0]} and F^{n}")
        ub = self.image_basis(u)
        _, pivots, _ = self.rref(self.hstack([ub, v], n))
        chosen = [p - ub.shape[1] for p in pivots if p >= ub.shape[1]]
        complement = self.GF(as_ints(v)[:, chosen].reshape(n, len(chosen)))
        full = self.hstack([ub, complement], n)
        if self.rank(full) != full.shape[1]:
            raise DimensionMismatch("subspace is not contained in the ambient space")
        projection = self.left_inverse(full)[ub.shape[1] :]
        return Quotient(complement=complement, projection=projection)

    def all_subspaces(self, n: int) -> Iterator[galois.FieldArray]:
        """Every subspace of F_p^n exactly once, as a canonical column basis."""
        for k in range(n + 1):
            for pivots in itertools.combinations(range(n), k):
                free = [
                    (r, c)
                    for r, pc in enumerate(pivots)
                    for c in range(pc + 1, n)
                    if c not in pivots
                ]
                for values in itertools.product(range(self.p), repeat=len(free)):
                    rows = np.zeros((k, n), dtype=np.int64)
                    for r, pc in enumerate(pivots):
                        rows[r, pc] = 1
                    for (r, c), value in zip(free, values):
                        rows[r, c] = value
                    yield self.GF(rows.T.reshape(n, k))

    def subspace_elements(self, basis: np.ndarray, projective: bool = False):
        """Enumerate the vectors of span(basis); with ``projective`` only one per line.

        The zero vector is skipped in projective mode.
        """
        n, k = basis.shape
        for coeffs in itertools.product(range(self.p), repeat=k):
            if projective:
                nonzero = [c for c in coeffs if c]
                if not nonzero or nonzero[0] != 1:
                    continue
            yield self.mul(basis, self.GF(np.asarray(coeffs, dtype=np.int64).reshape(k)))

    def key(self, m: np.ndarray) -> tuple:
        """Hashable canonical form of a matrix."""
        return (m.shape, as_ints(m).tobytes())
