"""Shared generators for the property tests."""
from __future__ import annotations

import random
from fractions import Fraction

from zclosure.exactlin import Matrix, rank
from zclosure.lang import MorphismPair


def random_matrix(rng: random.Random, d: int, lo: int = -2, hi: int = 2) -> Matrix:
    return Matrix(
        [[Fraction(rng.randint(lo, hi)) for _ in range(d)] for _ in range(d)]
    )


def random_rank_sequence(rng: random.Random, d: int, r: int, length: int):
    """M_i = B_i A_i shares rank-r structure; rejection keeps the product at
    rank r (adjacent r x r middles must be invertible)."""
    while True:
        ms = []
        for _ in range(length):
            a = [[Fraction(rng.randint(-2, 2)) for _ in range(d)] for _ in range(r)]
            b = [[Fraction(rng.randint(-2, 2)) for _ in range(r)] for _ in range(d)]
            ms.append(Matrix(b) * Matrix(a))
        if any(rank(m) != r for m in ms):
            continue
        prod = ms[0]
        for m in ms[1:]:
            prod = prod * m
        if rank(prod) == r:
            return ms


def powers_morphism(eta: int = 0) -> MorphismPair:
    """d=1 pair: a doubles, b halves."""
    return MorphismPair(
        ("a", "b"), 1,
        {"a": Matrix([[2]]), "b": Matrix([[Fraction(1, 2)]])},
        {"a": 1, "b": -1},
        eta,
    )


def unipotent_morphism(eta: int = 0) -> MorphismPair:
    """d=2 pair with the upper/lower unipotent generators."""
    return MorphismPair(
        ("a", "b"), 2,
        {"a": Matrix([[1, 1], [0, 1]]), "b": Matrix([[1, 0], [1, 1]])},
        {"a": 1, "b": -1},
        eta,
    )
