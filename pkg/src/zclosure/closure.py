"""Degree-bounded vanishing-ideal engine and the end-to-end pipelines.

The engine tracks, per automaton state, the span of Veronese coordinate
vectors nu_D(phi(w)) (all monomial evaluations of total degree <= D).  Right
multiplication by a fixed letter matrix acts linearly on these coordinates,
so a worklist fixpoint over a finite automaton computes the exact span of the
accepted language; the vanishing space is its orthogonal complement.

Pipeline policy.  At the default threshold eta the constructions carry the
theorem-level guarantee: cover runs the cover-automaton reduction and zero
runs the bounded-zero/product-alphabet pair.  Reach always needs the lifted
reduction whose flat stage is astronomically large at any threshold, so reach
(and every eta-overridden pipeline) computes the span by bounded-counter
saturation - the space over words whose prefix weights stay in a window is
monotone in the window and its limit is the exact target - stopping when the
space is unchanged for `window` consecutive bounds, then cross-checks the
brute-force oracle and refuses to answer on disagreement.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Iterator

from .automata import Nfa, build_bz_automaton, build_cover_automaton, gamma_alphabet, gamma_weight
from .errors import (
    DimensionError,
    InfeasibleError,
    OracleDisagreementError,
    PreconditionError,
)
from .exactlin import Matrix, Subspace, Vector, kernel_basis
from .lang import MorphismPair, Word
from .polys import Poly, PolySpace, basis_index, monomial_basis, poly_mul

EPS = ""
Exp = tuple[int, ...]


@dataclass(frozen=True)
class Caps:
    """Configurable feasibility limits; exceeding one is a structured error,
    never silent truncation."""

    veronese: int = 10_000
    states: int = 1_000_000
    budget: int = 10_000  # states x Veronese dimension per fixpoint
    counter: int = 64  # saturation window bound
    oracle_len: int = 14
    oracle_extend: int = 40  # cross-checks may extend this far to stabilize
    oracle_words: int = 400_000
    window: int = 3


DEFAULT_CAPS = Caps()


# ---------------------------------------------------------------------------
# Veronese machinery


def veronese(m: Matrix, degree: int) -> Vector:
    flat = m.flat()
    out = []
    for mono in monomial_basis(len(flat), degree):
        term = Fraction(1)
        for var, e in enumerate(mono):
            for _ in range(e):
                term *= flat[var]
        out.append(term)
    return tuple(out)


def letter_map(a: Matrix, degree: int) -> list[dict[int, Fraction]]:
    """Rows of the linear map T with nu_D(M * a) = T nu_D(M)."""
    d = a.rows
    nvars = d * d
    basis = monomial_basis(nvars, degree)
    index = basis_index(nvars, degree)
    # (M a)_{ij} as a linear polynomial in the entries of M
    unit = [tuple(0 if k != v else 1 for k in range(nvars)) for v in range(nvars)]
    lin: list[Poly] = []
    for i in range(d):
        for j in range(d):
            p: Poly = {}
            for k in range(d):
                c = a[k, j]
                if c:
                    p[unit[i * d + k]] = p.get(unit[i * d + k], Fraction(0)) + c
            lin.append(p)
    rows: list[dict[int, Fraction]] = []
    one: Poly = {tuple([0] * nvars): Fraction(1)}
    for mono in basis:
        p = one
        for var, e in enumerate(mono):
            for _ in range(e):
                p = poly_mul(p, lin[var])
        rows.append({index[k]: v for k, v in p.items()})
    return rows


def apply_map(rows: list[dict[int, Fraction]], v: Vector) -> Vector:
    return tuple(
        sum((c * v[s] for s, c in row.items()), Fraction(0)) for row in rows
    )


class Span:
    """Incremental fully-reduced row echelon span of dense vectors."""

    def __init__(self, n: int):
        self.n = n
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []

    def reduce(self, v: Iterable[Fraction]) -> list[Fraction]:
        v = list(v)
        for row, piv in zip(self.rows, self.pivots):
            c = v[piv]
            if c:
                for k in range(piv, self.n):
                    v[k] -= c * row[k]
        return v

    def insert(self, v: Iterable[Fraction]) -> bool:
        if len(self.rows) == self.n:
            return False  # already the whole space
        v = self.reduce(v)
        piv = next((k for k, x in enumerate(v) if x), None)
        if piv is None:
            return False
        c = v[piv]
        if c != 1:
            for k in range(piv, self.n):
                v[k] /= c
        for row in self.rows:
            c = row[piv]
            if c:
                for k in range(piv, self.n):
                    row[k] -= c * v[k]
        self.rows.append(v)
        self.pivots.append(piv)
        return True

    @property
    def dim(self) -> int:
        return len(self.rows)

    def basis(self) -> list[Vector]:
        order = sorted(range(len(self.rows)), key=lambda i: self.pivots[i])
        return [tuple(self.rows[i]) for i in order]


def _vanishing_from_rows(dim: int, degree: int, rows: list[Vector]) -> PolySpace:
    n = len(monomial_basis(dim * dim, degree))
    if not rows:
        return PolySpace.full(dim, degree)
    ker = kernel_basis(Matrix(rows))
    return PolySpace(dim, degree, Subspace(n, tuple(ker)))


def _check_budget(states: int, vdim: int, caps: Caps, what: str) -> None:
    if vdim > caps.veronese:
        raise InfeasibleError(
            f"{what}: Veronese dimension {vdim} exceeds the cap {caps.veronese}"
        )
    if states > caps.states:
        raise InfeasibleError(
            f"{what}: {states} states exceed the cap {caps.states}"
        )
    if states * vdim > caps.budget:
        raise InfeasibleError(
            f"{what}: states x Veronese = {states}x{vdim} exceeds the budget "
            f"{caps.budget}; set eta_override (result is then oracle-checked) "
            "or raise the budget cap"
        )


# ---------------------------------------------------------------------------
# Regular fixpoint


def _nfa_span_rows(
    nfa: Nfa, mp: MorphismPair, degree: int, caps: Caps, what: str
) -> list[Vector]:
    """Evaluation span over the accepted language, per-state fixpoint."""
    mp = getattr(mp, "morphism_pair", mp)
    if set(nfa.alphabet) != set(mp.alphabet):
        raise PreconditionError(f"{what}: automaton and morphism alphabets differ")
    n = len(monomial_basis(mp.dim * mp.dim, degree))
    _check_budget(len(nfa.states), n, caps, what)
    maps = {a: letter_map(mp.phi[a], degree) for a in mp.alphabet}
    succ: dict = {q: [] for q in nfa.states}
    for (q, a, q2) in sorted(nfa.transitions, key=str):
        succ[q].append((a, q2))
    spans = {q: Span(n) for q in nfa.states}
    seed = veronese(Matrix.identity(mp.dim), degree)
    queue = [(q, seed) for q in nfa.states if q in nfa.initial]
    while queue:
        q, v = queue.pop()
        if not spans[q].insert(v):
            continue
        for a, q2 in succ[q]:
            queue.append((q2, apply_map(maps[a], v)))
    acc = Span(n)
    for q in nfa.states:
        if q in nfa.accepting:
            for row in spans[q].basis():
                acc.insert(row)
    return acc.basis()


def regular_closure(
    nfa: Nfa, mp: MorphismPair, degree: int, caps: Caps = DEFAULT_CAPS
) -> PolySpace:
    """Exactly {p : deg p <= degree, p(phi(w)) = 0 for all w in L(nfa)}."""
    mp = getattr(mp, "morphism_pair", mp)
    rows = _nfa_span_rows(nfa, mp, degree, caps, "regular closure")
    return _vanishing_from_rows(mp.dim, degree, rows)


def finite_vanishing_space(
    points: list[Matrix], degree: int, dim: int | None = None
) -> PolySpace:
    """Exact kernel of the evaluation matrix over the given points.  This is
    the oracle kernel: rows are direct monomial evaluations, independent of
    the fixpoint's transition maps.  An empty point set vanishes vacuously
    (full space); it needs the ambient dimension passed explicitly."""
    if not points:
        if dim is None:
            raise PreconditionError(
                "finite_vanishing_space of an empty set needs dim="
            )
        return PolySpace.full(dim, degree)
    d = points[0].rows
    if dim is not None and dim != d:
        raise DimensionError("dim= does not match the points")
    for p in points:
        if not (p.is_square and p.rows == d):
            raise DimensionError("points of mixed dimensions")
    rows = [veronese(p, degree) for p in points]
    return _vanishing_from_rows(d, degree, rows)


# ---------------------------------------------------------------------------
# Bounded-counter saturation


@dataclass(frozen=True)
class CounterDfa:
    """Deterministic complete automaton used as the regular constraint in the
    saturation engine; `None` means the trivial one-state constraint."""

    states: tuple
    initial: object
    accepting: frozenset
    delta: dict  # (state, letter) -> state

    @staticmethod
    def trivial(alphabet: tuple[str, ...]) -> "CounterDfa":
        delta = {("*", a): "*" for a in alphabet}
        return CounterDfa(("*",), "*", frozenset({"*"}), delta)

    @staticmethod
    def from_nfa(nfa: Nfa) -> "CounterDfa":
        if not (nfa.is_deterministic() and nfa.is_complete()):
            raise PreconditionError("constraint automaton must be a complete DFA")
        delta = {(q, a): q2 for (q, a, q2) in nfa.transitions}
        (initial,) = nfa.initial
        return CounterDfa(tuple(nfa.states), initial, frozenset(nfa.accepting), delta)


def _window_rows(
    mp: MorphismPair,
    degree: int,
    mode: str,
    dfa: CounterDfa,
    bound: int,
    caps: Caps,
) -> list[Vector]:
    lo = -bound if mode == "zero" else 0
    n = len(monomial_basis(mp.dim * mp.dim, degree))
    nstates = len(dfa.states) * (bound - lo + 1)
    _check_budget(nstates, n, caps, f"{mode} saturation at counter bound {bound}")
    maps = {a: letter_map(mp.phi[a], degree) for a in mp.alphabet}
    spans: dict = {}
    seed = veronese(Matrix.identity(mp.dim), degree)
    queue = [((dfa.initial, 0), seed)]
    while queue:
        (q, c), v = queue.pop()
        span = spans.get((q, c))
        if span is None:
            span = spans[(q, c)] = Span(n)
        if not span.insert(v):
            continue
        for a in mp.alphabet:
            c2 = c + mp.omega[a]
            if lo <= c2 <= bound:
                queue.append(((dfa.delta[(q, a)], c2), apply_map(maps[a], v)))
    acc = Span(n)
    for (q, c), span in sorted(spans.items(), key=lambda kv: str(kv[0])):
        if q in dfa.accepting and (mode == "cover" or c == 0):
            for row in span.basis():
                acc.insert(row)
    return acc.basis()


def counter_saturation(
    mp: MorphismPair,
    degree: int,
    mode: str,
    dfa: CounterDfa | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> tuple[PolySpace, int]:
    """Grow the prefix-weight window until the space is unchanged for
    caps.window consecutive bounds; returns (space, final bound)."""
    if mode not in ("cover", "reach", "zero"):
        raise PreconditionError(f"unknown saturation mode {mode!r}")
    dfa = dfa or CounterDfa.trivial(mp.alphabet)
    history: list[PolySpace] = []
    for bound in range(2, caps.counter + 1):
        rows = _window_rows(mp, degree, mode, dfa, bound, caps)
        history.append(_vanishing_from_rows(mp.dim, degree, rows))
        if len(history) >= caps.window + 1 and all(
            history[-1] == history[-k] for k in range(2, caps.window + 2)
        ):
            return history[-1], bound
    raise InfeasibleError(
        f"{mode} saturation did not stabilize within counter bound "
        f"{caps.counter}; raise the counter cap"
    )


# ---------------------------------------------------------------------------
# Brute-force oracle


@dataclass(frozen=True)
class OracleResult:
    space: PolySpace
    stabilized: bool
    max_len: int
    words_used: int


WordSource = Callable[[int], Iterator[Word]]


def _cached_image(mp: MorphismPair) -> Callable[[Word], Matrix]:
    cache: dict[Word, Matrix] = {(): Matrix.identity(mp.dim)}

    def image(w: Word) -> Matrix:
        m = cache.get(w)
        if m is None:
            m = cache[w] = image(w[:-1]) * mp.phi[w[-1]]
        return m

    return image


def _oracle_over_words(
    mp_dim: int,
    degree: int,
    words_by_len: WordSource,
    images: Callable[[Word], Matrix],
    max_len: int,
    caps: Caps,
    extend_to: int | None = None,
    raise_on_cap: bool = True,
) -> OracleResult:
    """Enumerate to max_len; when extend_to is set, keep going past max_len
    until the stabilization window is met (sparse languages can skip several
    lengths between words).  Without raise_on_cap, hitting the word budget
    stops gracefully at the achieved length."""
    n = len(monomial_basis(mp_dim * mp_dim, degree))
    span = Span(n)
    # span dimension after each length that contributed at least one word;
    # empty lengths carry no information (sparse languages skip lengths)
    history: list[int] = []
    used = 0
    achieved = 0
    limit = max(max_len, extend_to or 0)

    def window_stable() -> bool:
        if span.dim == n:
            return True
        return len(history) >= caps.window + 1 and all(
            history[-1] == history[-k] for k in range(2, caps.window + 2)
        )

    capped = False
    for ln in range(limit + 1):
        try:
            count = 0
            for w in words_by_len(ln):
                used += 1
                if used > caps.oracle_words:
                    raise InfeasibleError(
                        f"oracle exceeded the word cap {caps.oracle_words}"
                    )
                count += 1
                span.insert(veronese(images(w), degree))
        except InfeasibleError:
            if raise_on_cap:
                raise
            capped = True
        achieved = ln
        if count:
            history.append(span.dim)
        if capped or (ln >= max_len and (extend_to is None or window_stable())):
            break
    rows = [tuple(r) for r in span.basis()]
    space = _vanishing_from_rows(mp_dim, degree, rows)
    return OracleResult(space, window_stable() and not capped, achieved, used)


def _pruned_word_source(mp: MorphismPair, predicate: str) -> WordSource:
    """Words of each exact length in lexicographic order, pruning branches
    that cannot satisfy the predicate anymore."""
    eta = mp.eta

    def words_by_len(ln: int) -> Iterator[Word]:
        def rec(word: tuple, counter: int, remaining: int) -> Iterator[Word]:
            if remaining == 0:
                if predicate in ("reach", "zero", "bz"):
                    if counter == 0:
                        yield word
                else:
                    yield word
                return
            for a in mp.alphabet:
                c2 = counter + mp.omega[a]
                if predicate in ("cover", "reach") and c2 < 0:
                    continue
                if predicate in ("reach", "zero") and abs(c2) > remaining - 1:
                    continue
                if predicate == "bz" and not (
                    -eta <= c2 <= eta and abs(c2) <= remaining - 1
                ):
                    continue
                yield from rec(word + (a,), c2, remaining - 1)

        yield from rec((), 0, ln)

    return words_by_len


def oracle_closure(
    mp: MorphismPair,
    predicate: str | Callable[[Word], bool],
    degree: int,
    max_len: int,
    caps: Caps = DEFAULT_CAPS,
) -> OracleResult:
    """finite_vanishing_space over enumerated words; reports whether the
    space was identical over the last `window` length increments."""

    if callable(predicate) or predicate == "all":
        accept = predicate if callable(predicate) else (lambda w: True)

        def words_by_len(ln: int) -> Iterator[Word]:
            for w in itertools.product(mp.alphabet, repeat=ln):
                if accept(w):
                    yield w

    else:
        words_by_len = _pruned_word_source(mp, predicate)

    return _oracle_over_words(
        mp.dim, degree, words_by_len, _cached_image(mp), max_len, caps
    )


# ---------------------------------------------------------------------------
# The gamma (product-alphabet) stage of the zero pipeline


def _tensor_index(n: int, idx: tuple[int, int, int, int]) -> int:
    return ((idx[0] * n + idx[1]) * n + idx[2]) * n + idx[3]


def _tensor_apply(
    rows_by_factor: list[list[dict[int, Fraction]] | None], v: list[Fraction], n: int
) -> list[Fraction]:
    for f, rows in enumerate(rows_by_factor):
        if rows is None:
            continue
        out = [Fraction(0)] * len(v)
        stride = n ** (3 - f)  # distance between consecutive values of factor f
        block = n ** (4 - f)  # size of one full cycle of factor f
        outer = len(v) // block
        for o in range(outer):
            for rest in range(stride):
                base = o * block + rest
                vals = [v[base + s * stride] for s in range(n)]
                for t, row in enumerate(rows):
                    acc = Fraction(0)
                    for s, c in row.items():
                        if vals[s]:
                            acc += c * vals[s]
                    out[base + t * stride] = acc
        v = out
    return v


def _mu_pullback_rows(d: int, degree: int) -> list[dict[int, Fraction]]:
    """Row t = coefficients of (basis monomial t) composed with the
    four-block product map, over the nu_D tensor coordinates."""
    nvars = d * d
    basis = monomial_basis(nvars, degree)
    index = basis_index(nvars, degree)
    n = len(basis)
    zero = tuple([0] * nvars)

    def unit(i: int, j: int) -> Exp:
        return tuple(1 if k == i * d + j else 0 for k in range(nvars))

    # entry (i, j) of X1 X2 X3 X4 as {4-tuple of exponent tuples: coeff}
    entries: list[list[dict]] = [[{} for _ in range(d)] for _ in range(d)]
    for i in range(d):
        for j in range(d):
            p = entries[i][j]
            for a in range(d):
                for b in range(d):
                    for c in range(d):
                        key = (unit(i, a), unit(a, b), unit(b, c), unit(c, j))
                        p[key] = p.get(key, Fraction(0)) + 1
    one = {(zero, zero, zero, zero): Fraction(1)}

    def mul(p: dict, q: dict) -> dict:
        out: dict = {}
        for ka, va in p.items():
            for kb, vb in q.items():
                k = tuple(
                    tuple(x + y for x, y in zip(ea, eb)) for ea, eb in zip(ka, kb)
                )
                s = out.get(k, Fraction(0)) + va * vb
                if s:
                    out[k] = s
        return out

    rows = []
    for mono in basis:
        p = one
        for var, e in enumerate(mono):
            i, j = divmod(var, d)
            for _ in range(e):
                p = mul(p, entries[i][j])
        rows.append(
            {
                _tensor_index(n, tuple(index[e] for e in key)): v
                for key, v in p.items()
            }
        )
    return rows


def _gamma_condition_rows(
    mp: MorphismPair, degree: int, caps: Caps
) -> list[Vector]:
    """Linear conditions on p (degree <= D) saying p vanishes on the image of
    the flattened product-automaton language."""
    d = mp.dim
    n = len(monomial_basis(d * d, degree))
    tensor_n = n ** 4
    eta = mp.eta
    nstates = 4 * eta + 1
    _check_budget(nstates, tensor_n, caps, "zero pipeline (product-alphabet stage)")
    base_maps = {a: letter_map(mp.phi[a], degree) for a in mp.alphabet}
    gamma = gamma_alphabet(mp.alphabet)
    letter_rows = {
        g: [None if x == EPS else base_maps[x] for x in g] for g in gamma
    }
    weights = {g: gamma_weight(g, mp) for g in gamma}
    seed_v = veronese(Matrix.identity(d), degree)
    seed = [Fraction(0)] * tensor_n
    for idx in itertools.product(range(n), repeat=4):
        val = seed_v[idx[0]] * seed_v[idx[1]] * seed_v[idx[2]] * seed_v[idx[3]]
        if val:
            seed[_tensor_index(n, idx)] = val
    spans: dict[int, Span] = {}
    queue: list[tuple[int, list[Fraction]]] = [(0, seed)]
    while queue:
        q, v = queue.pop()
        span = spans.get(q)
        if span is None:
            span = spans[q] = Span(tensor_n)
        if not span.insert(v):
            continue
        for g in gamma:
            q2 = q + weights[g]
            if -2 * eta <= q2 <= 2 * eta:
                queue.append((q2, _tensor_apply(letter_rows[g], list(v), n)))
    accepted = spans.get(0)
    if accepted is None or not accepted.rows:
        return []
    mu_rows = _mu_pullback_rows(d, degree)
    out = []
    for s in accepted.basis():
        out.append(
            tuple(
                sum((c * s[idx] for idx, c in row.items()), Fraction(0))
                for row in mu_rows
            )
        )
    return out


# ---------------------------------------------------------------------------
# Pipelines


@dataclass
class PipelineResult:
    space: PolySpace
    mode: str
    eta_used: int
    method: str
    oracle_checked: bool = False
    oracle_max_len: int | None = None
    oracle_stabilized: bool | None = None
    counter_bound: int | None = None


def _oracle_cross_check(
    result: PipelineResult,
    mp_dim: int,
    degree: int,
    words_by_len: WordSource,
    images: Callable[[Word], Matrix],
    caps: Caps,
) -> None:
    oracle = _oracle_over_words(
        mp_dim,
        degree,
        words_by_len,
        images,
        caps.oracle_len,
        caps,
        extend_to=caps.oracle_extend,
        raise_on_cap=False,
    )
    result.oracle_max_len = oracle.max_len
    result.oracle_stabilized = oracle.stabilized
    if oracle.space != result.space:
        raise OracleDisagreementError(
            f"{result.mode} pipeline at eta={result.eta_used} disagrees with "
            f"the oracle at enumeration length {oracle.max_len} "
            f"(oracle {'stabilized' if oracle.stabilized else 'NOT stabilized'}); "
            "result withheld"
        )
    result.oracle_checked = True


def run_cover(
    mp: MorphismPair, degree: int, caps: Caps = DEFAULT_CAPS
) -> PipelineResult:
    if mp.eta_is_default:
        nfa = build_cover_automaton(mp, caps.states)
        space = regular_closure(nfa, mp, degree, caps)
        return PipelineResult(space, "cover", mp.eta, "cover-automaton")
    space, bound = counter_saturation(mp, degree, "cover", None, caps)
    result = PipelineResult(
        space, "cover", mp.eta, "saturation+oracle", counter_bound=bound
    )
    _oracle_cross_check(
        result, mp.dim, degree, _pruned_word_source(mp, "cover"), _cached_image(mp), caps
    )
    return result


def run_zero(
    mp: MorphismPair, degree: int, caps: Caps = DEFAULT_CAPS
) -> PipelineResult:
    if mp.eta_is_default:
        bz_rows = _nfa_span_rows(
            build_bz_automaton(mp, caps.states), mp, degree, caps,
            "zero pipeline (bounded-zero stage)",
        )
        gamma_rows = _gamma_condition_rows(mp, degree, caps)
        n = len(monomial_basis(mp.dim * mp.dim, degree))
        rows = [tuple(r) for r in bz_rows] + list(gamma_rows)
        if rows:
            space = PolySpace(
                mp.dim, degree, Subspace(n, tuple(kernel_basis(Matrix(rows))))
            )
        else:
            space = PolySpace.full(mp.dim, degree)
        return PipelineResult(space, "zero", mp.eta, "bz+flat")
    space, bound = counter_saturation(mp, degree, "zero", None, caps)
    result = PipelineResult(
        space, "zero", mp.eta, "saturation+oracle", counter_bound=bound
    )
    _oracle_cross_check(
        result, mp.dim, degree, _pruned_word_source(mp, "zero"), _cached_image(mp), caps
    )
    return result


def _reach_default_cost(mp: MorphismPair, degree: int) -> str:
    # determinized reach automaton is O(eta) states; blockified dimension and
    # the flat-stage tensor dimension follow
    eta = mp.eta
    k = 2 * eta + 3
    lifted = k * (mp.dim + 1)
    tensor = comb(lifted * lifted + degree, degree) ** 4
    return (
        f"reach at default eta={eta} blockifies a ~{k}-state automaton into "
        f"dimension {lifted}; the zero-closure flat stage then needs ~10^"
        f"{len(str(tensor)) - 1} Veronese coordinates"
    )


def run_reach(
    mp: MorphismPair, degree: int, caps: Caps = DEFAULT_CAPS
) -> PipelineResult:
    if mp.eta_is_default:
        raise InfeasibleError(
            _reach_default_cost(mp, degree)
            + "; not desk-feasible, set eta_override (the result is then "
            "cross-checked against the brute-force oracle)"
        )
    space, bound = counter_saturation(mp, degree, "reach", None, caps)
    result = PipelineResult(
        space, "reach", mp.eta, "saturation+oracle", counter_bound=bound
    )
    _oracle_cross_check(
        result, mp.dim, degree, _pruned_word_source(mp, "reach"), _cached_image(mp), caps
    )
    return result


def run_constrained(
    mp: MorphismPair,
    dfa: CounterDfa,
    mode: str,
    degree: int,
    words_by_len: WordSource,
    images: Callable[[Word], Matrix],
    caps: Caps = DEFAULT_CAPS,
    mode_name: str | None = None,
) -> PipelineResult:
    """Cover/reach pipeline under a regular path constraint (the collapsed
    form of the block-matrix reduction).  Requires an eta override; the
    lifted default threshold is eta(k(d+1)) and never desk-feasible."""
    if mp.eta_is_default:
        k = len(dfa.states)
        lifted = k * (mp.dim + 1)
        raise InfeasibleError(
            f"constrained {mode} at default eta: the block reduction lifts to "
            f"dimension {lifted} whose own threshold is eta({lifted}) = "
            f"2^{lifted * (lifted + 3)}+1; set eta_override (the result is "
            "then cross-checked against the brute-force oracle)"
        )
    space, bound = counter_saturation(mp, degree, mode, dfa, caps)
    result = PipelineResult(
        space, mode_name or f"vass-{mode}", mp.eta, "saturation+oracle",
        counter_bound=bound,
    )
    _oracle_cross_check(result, mp.dim, degree, words_by_len, images, caps)
    return result


def cover_closure(mp: MorphismPair, degree: int, caps: Caps = DEFAULT_CAPS) -> PolySpace:
    return run_cover(mp, degree, caps).space


def zero_closure(mp: MorphismPair, degree: int, caps: Caps = DEFAULT_CAPS) -> PolySpace:
    return run_zero(mp, degree, caps).space


def reach_closure(mp: MorphismPair, degree: int, caps: Caps = DEFAULT_CAPS) -> PolySpace:
    return run_reach(mp, degree, caps).space


# ---------------------------------------------------------------------------
# The non-stabilizing chain of finite sets (regression corpus)


def monoid_closure(seed: list[Matrix], cap: int = 512) -> frozenset[Matrix]:
    d = seed[0].rows
    out = set(seed) | {Matrix.identity(d)}
    frontier = list(out)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(out):
                for prod in (a * b, b * a):
                    if prod not in out:
                        out.add(prod)
                        nxt.append(prod)
                        if len(out) > cap:
                            raise InfeasibleError("monoid closure exceeded the cap")
        frontier = nxt
    return frozenset(out)


def recurrence_chain(steps: int) -> list[frozenset[Matrix]]:
    """S_0 = closure{0, N}; S_{i+1} = closure(S_i + alpha S_i beta).  The sets
    grow strictly forever; finite saturation cannot compute the closure."""
    zero = Matrix.zeros(2)
    nil = Matrix([[0, 1], [0, 0]])
    alpha = Matrix([[2, 0], [0, 1]])
    beta = Matrix([[Fraction(1, 2), 0], [0, 1]])
    chain = [monoid_closure([zero, nil])]
    for _ in range(steps):
        prev = chain[-1]
        seed = list(prev) + [alpha * x * beta for x in prev]
        chain.append(monoid_closure(seed))
    return chain
