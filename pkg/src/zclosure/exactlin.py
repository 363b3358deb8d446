"""Exact rational linear algebra.

Everything here is computed over `fractions.Fraction`; there is no floating
point anywhere in the package.  Subspaces are kept in reduced row echelon form
so that equality of spans is literal structural equality.

The one non-textbook operation is `stable_identity`: for a stable matrix M
(rank M = rank M^2) it builds the idempotent P with PM = MP = M by changing
basis to [image basis | kernel basis] and conjugating diag(I_r, 0) back.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionError, PreconditionError

Vector = tuple[Fraction, ...]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def vec(entries: Iterable) -> Vector:
    return tuple(_frac(x) for x in entries)


class Matrix:
    """Immutable dense matrix of Fractions."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence]):
        rows = tuple(vec(r) for r in entries)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise DimensionError("ragged matrix rows")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", len(rows[0]) if rows else 0)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @staticmethod
    def identity(d: int) -> "Matrix":
        return Matrix([[Fraction(int(i == j)) for j in range(d)] for i in range(d)])

    @staticmethod
    def zeros(r: int, c: int | None = None) -> "Matrix":
        c = r if c is None else c
        return Matrix([[Fraction(0)] * c for _ in range(r)])

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in row) for row in self.entries)
        return f"Matrix[{body}]"

    def __mul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        ot = tuple(zip(*other.entries)) if other.entries else ()
        return Matrix(
            [
                [sum(a * b for a, b in zip(row, col)) for col in ot]
                for row in self.entries
            ]
        )

    def matvec(self, v: Sequence) -> Vector:
        v = vec(v)
        if len(v) != self.cols:
            raise DimensionError("matvec length mismatch")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.entries)

    def transpose(self) -> "Matrix":
        return Matrix(list(zip(*self.entries))) if self.entries else self

    def scale(self, c) -> "Matrix":
        c = _frac(c)
        return Matrix([[c * x for x in row] for row in self.entries])

    def add(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("matrix addition shape mismatch")
        return Matrix(
            [
                [a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.entries, other.entries)
            ]
        )

    def columns(self) -> list[Vector]:
        return [tuple(row[j] for row in self.entries) for j in range(self.cols)]

    def flat(self) -> Vector:
        return tuple(x for row in self.entries for x in row)


def rref(vectors: Iterable[Sequence]) -> list[Vector]:
    """Reduced row echelon form; pivot = first nonzero entry in column order.

    Returns the nonzero rows, pivots normalized to 1 and eliminated from all
    other rows, rows ordered by pivot column.  This is the unique canonical
    basis of the span, so two RREFs are equal iff the spans are equal.
    """
    work = [list(vec(v)) for v in vectors]
    if not work:
        return []
    ncols = len(work[0])
    if any(len(r) != ncols for r in work):
        raise DimensionError("rref: inconsistent vector lengths")
    out: list[list[Fraction]] = []
    pivots: list[int] = []
    for row in work:
        # reduce against existing pivots
        for prow, pcol in zip(out, pivots):
            c = row[pcol]
            if c:
                for k in range(pcol, ncols):
                    row[k] -= c * prow[k]
        pcol = next((k for k, x in enumerate(row) if x), None)
        if pcol is None:
            continue
        inv = row[pcol]
        if inv != 1:
            for k in range(pcol, ncols):
                row[k] /= inv
        # eliminate the new pivot from earlier rows
        for prow in out:
            c = prow[pcol]
            if c:
                for k in range(pcol, ncols):
                    prow[k] -= c * row[k]
        out.append(row)
        pivots.append(pcol)
    order = sorted(range(len(out)), key=lambda i: pivots[i])
    return [tuple(out[i]) for i in order]


def _pivot_columns(basis: Sequence[Vector]) -> list[int]:
    return [next(k for k, x in enumerate(row) if x) for row in basis]


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^n held as its canonical RREF basis (no zero rows)."""

    ambient_dim: int
    basis: tuple[Vector, ...]

    @staticmethod
    def from_vectors(ambient_dim: int, vectors: Iterable[Sequence]) -> "Subspace":
        rows = rref(vectors)
        for r in rows:
            if len(r) != ambient_dim:
                raise DimensionError("vector length does not match ambient dimension")
        return Subspace(ambient_dim, tuple(rows))

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, ())

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        return Subspace.from_vectors(
            ambient_dim, Matrix.identity(ambient_dim).entries
        )

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence) -> bool:
        row = list(vec(v))
        if len(row) != self.ambient_dim:
            raise DimensionError("vector length does not match ambient dimension")
        for prow in self.basis:
            pcol = next(k for k, x in enumerate(prow) if x)
            c = row[pcol]
            if c:
                for k in range(pcol, self.ambient_dim):
                    row[k] -= c * prow[k]
        return not any(row)

    def sum(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        return Subspace.from_vectors(self.ambient_dim, list(self.basis) + list(other.basis))

    def intersection(self, other: "Subspace") -> "Subspace":
        """Kernel of the stacked-basis system: v in both spans iff
        v = x.B1 = y.B2 for some coefficients (x, y)."""
        self._check_ambient(other)
        if not self.basis or not other.basis:
            return Subspace.zero(self.ambient_dim)
        # columns of the system are [B1^T | -B2^T]; kernel vectors give (x, y)
        n1, n2 = len(self.basis), len(other.basis)
        system = Matrix(
            [
                [self.basis[i][k] for i in range(n1)]
                + [-other.basis[j][k] for j in range(n2)]
                for k in range(self.ambient_dim)
            ]
        )
        sols = kernel_basis(system)
        vecs = []
        for s in sols:
            x = s[:n1]
            v = [Fraction(0)] * self.ambient_dim
            for c, row in zip(x, self.basis):
                if c:
                    for k in range(self.ambient_dim):
                        v[k] += c * row[k]
            vecs.append(v)
        return Subspace.from_vectors(self.ambient_dim, vecs)

    def _check_ambient(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionError("subspaces live in different ambient spaces")


def rank(m: Matrix) -> int:
    return len(rref(m.entries))


def kernel_basis(m: Matrix) -> list[Vector]:
    """Canonical basis of {v : m v = 0} (RREF of the standard free-variable
    parametrization)."""
    rows = rref(m.entries)
    n = m.cols
    pivots = _pivot_columns(rows)
    pivot_set = set(pivots)
    free = [j for j in range(n) if j not in pivot_set]
    out = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            v[p] = -row[f]
        out.append(v)
    return rref(out)


def rank_decomp(m: Matrix) -> tuple[int, Subspace, Subspace]:
    """(rank, image, kernel) of a square matrix; image spanned by columns."""
    if not m.is_square:
        raise DimensionError("rank_decomp needs a square matrix")
    image = Subspace.from_vectors(m.rows, m.columns())
    ker = Subspace(m.cols, tuple(kernel_basis(m)))
    return image.dim, image, ker


def is_stable(m: Matrix) -> bool:
    """rank(M) = rank(M^2); debug builds also check im(M) ∩ ker(M) = {0}."""
    if not m.is_square:
        raise DimensionError("is_stable needs a square matrix")
    r1 = rank(m)
    r2 = rank(m * m)
    stable = r1 == r2
    if __debug__:
        _, image, ker = rank_decomp(m)
        assert stable == (image.intersection(ker).dim == 0)
    return stable


def invert(m: Matrix) -> Matrix:
    if not m.is_square:
        raise DimensionError("invert needs a square matrix")
    d = m.rows
    aug = rref([list(row) + list(Matrix.identity(d).entries[i]) for i, row in enumerate(m.entries)])
    if len(aug) < d or _pivot_columns(aug) != list(range(d)):
        raise PreconditionError("matrix is singular")
    return Matrix([row[d:] for row in aug])


def stable_identity(m: Matrix) -> Matrix:
    """The projector P = Y diag(I_r, 0) Y^{-1}, Y = [image basis | kernel basis].

    P is the identity element of the closed group generated by a stable M:
    P^2 = P, PM = MP = M, im(P) = im(M), ker(P) = ker(M).
    """
    if not m.is_square:
        raise DimensionError("stable_identity needs a square matrix")
    r, image, ker = rank_decomp(m)
    if image.intersection(ker).dim != 0:
        raise PreconditionError("stable_identity requires a stable matrix")
    d = m.rows
    cols = list(image.basis) + list(ker.basis)
    y = Matrix(list(zip(*cols))) if cols else Matrix.identity(d)
    diag = Matrix([[Fraction(int(i == j and i < r)) for j in range(d)] for i in range(d)])
    p = y * diag * invert(y)
    if __debug__:
        assert p * p == p
        assert p * m == m and m * p == m
    return p
