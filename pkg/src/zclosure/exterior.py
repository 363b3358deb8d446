"""Exterior algebra over Q^d with sparse subset-indexed coordinates.

Coordinates are keyed by strictly increasing tuples of 0-based axis indices;
the empty tuple is the scalar unit of grade 0.  Signs come from the parity of
the inversion count when merging index tuples.  Only what the factorization
tree construction needs: the subspace embedding, wedge products of
decomposables, trivial-intersection tests and the left-to-right greedy basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DimensionError, PreconditionError
from .exactlin import Subspace, vec

Key = tuple[int, ...]


def _merge_sign(a: Key, b: Key) -> tuple[Key, int]:
    """Concatenate-and-sort two disjoint keys; sign = (-1)^inversions."""
    inv = 0
    for x in a:
        for y in b:
            if x > y:
                inv += 1
    return tuple(sorted(a + b)), -1 if inv % 2 else 1


@dataclass(frozen=True)
class ExtVector:
    """Element of Λ(Q^dim); zero coefficients are never stored."""

    dim: int
    coords: dict[Key, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, v in self.coords.items():
            v = Fraction(v)
            if v:
                clean[tuple(k)] = v
        object.__setattr__(self, "coords", clean)

    @property
    def is_zero(self) -> bool:
        return not self.coords

    @property
    def grade(self) -> int | None:
        """Common grade of the support, None if mixed or zero."""
        grades = {len(k) for k in self.coords}
        return grades.pop() if len(grades) == 1 else None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExtVector)
            and self.dim == other.dim
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((self.dim, tuple(sorted(self.coords.items()))))

    def scale(self, c) -> "ExtVector":
        c = Fraction(c)
        return ExtVector(self.dim, {k: c * v for k, v in self.coords.items()})

    def add(self, other: "ExtVector") -> "ExtVector":
        if self.dim != other.dim:
            raise DimensionError("exterior vectors from different ambient spaces")
        coords = dict(self.coords)
        for k, v in other.coords.items():
            coords[k] = coords.get(k, Fraction(0)) + v
        return ExtVector(self.dim, coords)

    @staticmethod
    def unit(dim: int) -> "ExtVector":
        return ExtVector(dim, {(): Fraction(1)})

    @staticmethod
    def from_vector(v) -> "ExtVector":
        v = vec(v)
        return ExtVector(len(v), {(i,): x for i, x in enumerate(v) if x})


def wedge(a: ExtVector, b: ExtVector) -> ExtVector:
    if a.dim != b.dim:
        raise DimensionError("wedge of vectors from different ambient spaces")
    coords: dict[Key, Fraction] = {}
    for ka, va in a.coords.items():
        sa = set(ka)
        for kb, vb in b.coords.items():
            if sa & set(kb):
                continue
            key, sign = _merge_sign(ka, kb)
            coords[key] = coords.get(key, Fraction(0)) + sign * va * vb
    return ExtVector(a.dim, coords)


def _key_order(k: Key) -> tuple:
    return (len(k), k)


def iota(w: Subspace) -> ExtVector:
    """Wedge of the canonical RREF basis, scaled so the lexicographically
    first nonzero coordinate is 1.  The zero subspace maps to the grade-0
    unit (empty wedge)."""
    out = ExtVector.unit(w.ambient_dim)
    for row in w.basis:
        out = wedge(out, ExtVector.from_vector(row))
    if out.is_zero:
        # cannot happen for an RREF basis; guard for corrupted input
        raise PreconditionError("iota of a dependent basis")
    first = min(out.coords, key=_key_order)
    c = out.coords[first]
    return out if c == 1 else out.scale(1 / c)


def trivially_intersects(w1: Subspace, w2: Subspace) -> bool:
    """W1 ∩ W2 = {0} iff ι(W1) ∧ ι(W2) != 0."""
    if w1.ambient_dim != w2.ambient_dim:
        raise DimensionError("subspaces live in different ambient spaces")
    return not wedge(iota(w1), iota(w2)).is_zero


class _ExtSpan:
    """Incremental row reduction over the subset-keyed coordinates."""

    def __init__(self):
        self.rows: list[dict[Key, Fraction]] = []
        self.pivots: list[Key] = []

    def _reduce(self, coords: dict[Key, Fraction]) -> dict[Key, Fraction]:
        coords = dict(coords)
        for row, piv in zip(self.rows, self.pivots):
            c = coords.get(piv)
            if c:
                for k, v in row.items():
                    nv = coords.get(k, Fraction(0)) - c * v
                    if nv:
                        coords[k] = nv
                    else:
                        coords.pop(k, None)
        return coords

    def insert(self, v: ExtVector) -> bool:
        coords = self._reduce(v.coords)
        if not coords:
            return False
        piv = min(coords, key=_key_order)
        c = coords[piv]
        self.rows.append({k: x / c for k, x in coords.items()})
        self.pivots.append(piv)
        return True

def greedy_basis(vs: list[ExtVector]) -> list[int]:
    """1-based indices of the left-to-right maximal independent subsequence.

    Index p is kept iff vs[p-1] is not a linear combination of vs[:p-1]; the
    first index is always kept (for nonzero input).
    """
    if not vs:
        raise PreconditionError("greedy_basis of an empty list")
    dims = {v.dim for v in vs}
    if len(dims) != 1:
        raise DimensionError("greedy_basis over mixed ambient dimensions")
    span = _ExtSpan()
    out = []
    for i, v in enumerate(vs):
        if span.insert(v):
            out.append(i + 1)
    return out


def combination(targets: list[ExtVector], v: ExtVector) -> list[Fraction] | None:
    """Coefficients c with sum(c_i * targets[i]) = v, or None if v is outside
    the span.  Unique when the targets are independent (the greedy case)."""
    keys = sorted(
        {k for t in targets for k in t.coords} | set(v.coords), key=_key_order
    )
    n = len(targets)
    from .exactlin import rref as _rref

    aug = _rref(
        [
            [t.coords.get(k, Fraction(0)) for t in targets]
            + [v.coords.get(k, Fraction(0))]
            for k in keys
        ]
    )
    coeffs = [Fraction(0)] * n
    for row in aug:
        piv = next(i for i, x in enumerate(row) if x)
        if piv == n:
            return None
        coeffs[piv] = row[n]
    return coeffs
