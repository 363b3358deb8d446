"""Block-matrix reductions: folding a regular constraint (or a 1-VASS's
state structure) into the morphism, and extracting the constrained closure
back out of the lifted one.

For a complete DFA with k states, each letter lifts to a k(d+1)-dimensional
block matrix whose (i, j) block is [[phi(a), 0], [0, 1]] exactly when the DFA
moves i -> j on a; the bottom-right 1 distinguishes a present transition with
a zero matrix from an absent transition.  For a word w the lifted image has
at most one nonzero block in block-row 1, at column delta(q1, w), so summing
the accepting block-row-1 blocks recovers phi(w) together with an indicator.
Extraction works at the coefficient level: a candidate p of degree <= D over
the d x d entries pulls back to the homogenization sum_a c_a iota^(D-|a|) T^a
over the lifted entries, which vanishes on the lifted space iff p vanishes on
the state-filtered language.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .automata import Nfa
from .closure import (
    Caps,
    DEFAULT_CAPS,
    CounterDfa,
    PipelineResult,
    WordSource,
    _cached_image,
    run_constrained,
)
from .errors import PreconditionError, SchemaError
from .exactlin import Matrix, Subspace, Vector, kernel_basis
from .lang import MorphismPair
from .polys import Poly, PolySpace, monomial_basis, poly_mul, poly_to_vector

DEAD = "_dead"


@dataclass(frozen=True)
class BlockMorphism:
    base: MorphismPair
    dfa: Nfa
    state_order: tuple  # initial state first
    lifted: dict[str, Matrix]

    @property
    def dim(self) -> int:
        return len(self.state_order) * (self.base.dim + 1)

    @property
    def morphism_pair(self) -> MorphismPair:
        return MorphismPair(
            self.base.alphabet, self.dim, self.lifted, self.base.omega, self.base.eta
        )


def blockify_regular(mp: MorphismPair, dfa: Nfa) -> BlockMorphism:
    """The automaton must be deterministic but may be partial: an absent
    transition leaves the whole block zero, which the bottom-right indicator
    entry distinguishes from a present transition with a zero matrix."""
    if set(dfa.alphabet) != set(mp.alphabet):
        raise PreconditionError("DFA alphabet differs from the morphism alphabet")
    if not dfa.is_deterministic():
        raise PreconditionError("constraint automaton must be deterministic; "
                                "determinize first")
    (initial,) = dfa.initial
    rest = sorted((q for q in dfa.states if q != initial), key=str)
    order = (initial,) + tuple(rest)
    pos = {q: i for i, q in enumerate(order)}
    k, d = len(order), mp.dim
    b = d + 1
    delta = {(q, a): q2 for (q, a, q2) in dfa.transitions}
    lifted = {}
    for a in mp.alphabet:
        m = [[Fraction(0)] * (k * b) for _ in range(k * b)]
        phi = mp.phi[a]
        for q in order:
            if (q, a) not in delta:
                continue
            i, j = pos[q], pos[delta[(q, a)]]
            for r in range(d):
                for c in range(d):
                    m[i * b + r][j * b + c] = phi[r, c]
            m[i * b + d][j * b + d] = Fraction(1)
        lifted[a] = Matrix(m)
    return BlockMorphism(mp, dfa, order, lifted)


def _pullback_vectors(bm: BlockMorphism, degree: int) -> list[Vector]:
    """For each degree-<=D monomial over the base entries, the coefficient
    vector of its indicator-homogenized pullback over the lifted entries."""
    d = bm.base.dim
    b = d + 1
    kdim = bm.dim
    nvars_lifted = kdim * kdim
    accepting_pos = [
        i for i, q in enumerate(bm.state_order) if q in bm.dfa.accepting
    ]

    def lifted_var(r: int, c: int) -> Exp:
        out = [0] * nvars_lifted
        out[r * kdim + c] = 1
        return tuple(out)

    # T_{rc} and iota as linear polynomials over the lifted entries
    t_forms = [[{} for _ in range(d)] for _ in range(d)]
    iota_form: Poly = {}
    for i in accepting_pos:
        for r in range(d):
            for c in range(d):
                key = lifted_var(r, i * b + c)
                t_forms[r][c][key] = t_forms[r][c].get(key, Fraction(0)) + 1
        key = lifted_var(d, i * b + d)
        iota_form[key] = iota_form.get(key, Fraction(0)) + 1

    one: Poly = {tuple([0] * nvars_lifted): Fraction(1)}
    out = []
    for mono in monomial_basis(d * d, degree):
        p = one
        for var, e in enumerate(mono):
            r, c = divmod(var, d)
            for _ in range(e):
                p = poly_mul(p, t_forms[r][c])
        for _ in range(degree - sum(mono)):
            p = poly_mul(p, iota_form)
        out.append(poly_to_vector(p, nvars_lifted, degree))
    return out


Exp = tuple[int, ...]


def extract_block_closure(
    space: PolySpace, bm: BlockMorphism, degree: int
) -> PolySpace:
    """From the degree-<=D vanishing space of the lifted language, the exact
    degree-<=D vanishing space of the state-filtered base language."""
    if space.degree != degree:
        raise PreconditionError("space degree differs from the requested degree")
    if space.dim != bm.dim:
        raise PreconditionError("space dimension differs from the lifted dimension")
    d = bm.base.dim
    n_base = len(monomial_basis(d * d, degree))
    pullbacks = _pullback_vectors(bm, degree)
    # evaluation span of the lifted language = complement of its vanishing space
    if space.vanishing_basis.basis:
        eval_rows = kernel_basis(Matrix(space.vanishing_basis.basis))
    else:
        eval_rows = [tuple(r) for r in Matrix.identity(space.vanishing_basis.ambient_dim).entries]
    if not eval_rows:
        return PolySpace.full(d, degree)
    constraint = Matrix(
        [
            [sum((a * b for a, b in zip(s, pb)), Fraction(0)) for pb in pullbacks]
            for s in eval_rows
        ]
    )
    return PolySpace(d, degree, Subspace(n_base, tuple(kernel_basis(constraint))))


# ---------------------------------------------------------------------------
# 1-VASS instances


@dataclass(frozen=True)
class Vass:
    states: tuple[str, ...]
    initial: str
    accepting: tuple[str, ...]
    transitions: tuple[tuple[str, str, int, str], ...]  # (from, letter, weight, to)

    def __post_init__(self):
        states = set(self.states)
        if self.initial not in states or not set(self.accepting) <= states:
            raise SchemaError("vass initial/accepting must be declared states")
        for (src, _letter, weight, dst) in self.transitions:
            if src not in states or dst not in states:
                raise SchemaError("vass transition references unknown state")
            if weight not in (-1, 0, 1):
                raise SchemaError(
                    f"vass transition weight {weight!r} is not in {{-1,0,1}}; "
                    "zero tests and general weights are out of scope (decompose "
                    "runs at zero tests upstream, or normalize weights)"
                )


def vass_to_constrained(vass: Vass, mp: MorphismPair) -> tuple[MorphismPair, CounterDfa]:
    """The state-elimination recipe: transitions become letters carrying their
    weights, the path language becomes a complete DFA constraint, and the
    matrices come from the original letters."""
    letters = tuple(f"t{i}" for i in range(len(vass.transitions)))
    phi = {}
    omega = {}
    for name, (_, letter, weight, _) in zip(letters, vass.transitions):
        if letter not in mp.phi:
            raise SchemaError(f"vass transition uses unknown letter {letter!r}")
        phi[name] = mp.phi[letter]
        omega[name] = weight
    mp_t = MorphismPair(letters, mp.dim, phi, omega, mp.eta)
    delta = {}
    for q in vass.states + (DEAD,):
        for name, (src, _, _, dst) in zip(letters, vass.transitions):
            delta[(q, name)] = dst if q == src else DEAD
    dfa = CounterDfa(
        states=vass.states + (DEAD,),
        initial=vass.initial,
        accepting=frozenset(vass.accepting),
        delta=delta,
    )
    return mp_t, dfa


def vass_paths_nfa(vass: Vass, mp: MorphismPair) -> Nfa:
    """Label-level NFA of the VASS's underlying graph (weights dropped)."""
    return Nfa(
        states=tuple(vass.states),
        alphabet=tuple(mp.alphabet),
        initial=frozenset({vass.initial}),
        accepting=frozenset(vass.accepting),
        transitions=frozenset(
            (src, letter, dst) for (src, letter, _w, dst) in vass.transitions
        ),
    )


def vass_words_by_len(vass: Vass, mode: str) -> WordSource:
    """Enumerates accepted transition words (cover: prefix weights >= 0;
    reach: additionally total weight 0) in length-then-lexicographic order."""
    letters = tuple(f"t{i}" for i in range(len(vass.transitions)))
    by_source: dict[str, list[tuple[str, int, str]]] = {}
    for name, (src, _, weight, dst) in zip(letters, vass.transitions):
        by_source.setdefault(src, []).append((name, weight, dst))

    def words_by_len(ln: int):
        level = [((), vass.initial, 0)]
        for _ in range(ln):
            nxt = []
            for word, q, c in level:
                for (name, weight, dst) in by_source.get(q, []):
                    if c + weight >= 0:
                        nxt.append((word + (name,), dst, c + weight))
            level = nxt
        for word, q, c in level:
            if q in vass.accepting and (mode == "cover" or c == 0):
                yield word

    return words_by_len


def run_vass(
    vass: Vass,
    mp: MorphismPair,
    mode: str,
    degree: int,
    caps: Caps = DEFAULT_CAPS,
) -> PipelineResult:
    if mode not in ("cover", "reach"):
        raise PreconditionError(f"unknown vass mode {mode!r}")
    mp_t, dfa = vass_to_constrained(vass, mp)
    return run_constrained(
        mp_t,
        dfa,
        mode,
        degree,
        vass_words_by_len(vass, mode),
        _cached_image(mp_t),
        caps,
        mode_name=f"vass-{mode}",
    )
