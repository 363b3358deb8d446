"""Finite automata over parameterized alphabets, plus the four counter
constructions and the zero-closure witness builder.

States can be any hashable values; `states` fixes the canonical order.  There
are no epsilon transitions.  The counter constructions:

    cover : states {0..eta-1} + inf; tracks prefix weight up to eta, then
            saturates in an all-accepting sink.
    reach : states ({0..eta-1} x {0,1}) + inf; the bit records whether the
            weight has been above the threshold.
    zero  : over the product alphabet Gamma = (Sigma+eps)^4 \\ {eps^4};
            states -2eta..2eta, 0 initial and uniquely accepting.
    bz    : states -eta..eta; accepts exactly the bounded zero language.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import (
    InfeasibleError,
    InternalInvariantError,
    PreconditionError,
)
from .exactlin import is_stable
from .facttree import extract_stable_factor
from .lang import MorphismPair, Word, classify_word

INF = "inf"
EPS = ""

GammaLetter = tuple[str, str, str, str]


@dataclass(frozen=True)
class Nfa:
    states: tuple
    alphabet: tuple
    initial: frozenset
    accepting: frozenset
    transitions: frozenset  # (state, letter, state)

    def __post_init__(self):
        states = set(self.states)
        letters = set(self.alphabet)
        for q, a, q2 in self.transitions:
            if q not in states or q2 not in states or a not in letters:
                raise PreconditionError("transition references unknown state/letter")
        if not (self.initial <= states and self.accepting <= states):
            raise PreconditionError("initial/accepting references unknown state")

    def step(self, current: frozenset, letter) -> frozenset:
        return frozenset(q2 for (q, a, q2) in self.transitions if a == letter and q in current)

    def accepts(self, word) -> bool:
        current = self.initial
        for a in word:
            current = self.step(current, a)
            if not current:
                return False
        return bool(current & self.accepting)

    def successors(self, q):
        out: dict = {}
        for (p, a, p2) in self.transitions:
            if p == q:
                out.setdefault(a, set()).add(p2)
        return out

    def is_deterministic(self) -> bool:
        seen = set()
        for (q, a, _) in self.transitions:
            if (q, a) in seen:
                return False
            seen.add((q, a))
        return len(self.initial) == 1

    def is_complete(self) -> bool:
        pairs = {(q, a) for (q, a, _) in self.transitions}
        return all((q, a) in pairs for q in self.states for a in self.alphabet)

    def to_json(self) -> dict:
        return {
            "states": [state_name(q) for q in self.states],
            "alphabet": [letter_name(a) for a in self.alphabet],
            "initial": sorted(state_name(q) for q in self.initial),
            "accepting": sorted(state_name(q) for q in self.accepting),
            "transitions": sorted(
                [state_name(q), letter_name(a), state_name(q2)]
                for (q, a, q2) in self.transitions
            ),
        }


def state_name(q) -> str:
    if isinstance(q, tuple):
        return "(" + ",".join(state_name(x) for x in q) + ")"
    if isinstance(q, frozenset):
        return "{" + ",".join(sorted(state_name(x) for x in q)) + "}"
    return str(q)


def letter_name(a) -> str:
    if isinstance(a, tuple):
        return "(" + ",".join(x if x else "~" for x in a) + ")"
    return str(a)


def determinize(nfa: Nfa, max_states: int = 10**6) -> Nfa:
    """Subset construction over reachable subsets only.  Subset states are
    canonical sorted tuples; the empty tuple is the dead state."""

    def canon(s: frozenset) -> tuple:
        return tuple(sorted(s, key=state_name))

    start = canon(nfa.initial)
    states = {start}
    order = [start]
    transitions = set()
    frontier = [start]
    while frontier:
        cur = frontier.pop()
        cur_set = frozenset(cur)
        for a in nfa.alphabet:
            nxt = canon(nfa.step(cur_set, a))
            transitions.add((cur, a, nxt))
            if nxt not in states:
                states.add(nxt)
                order.append(nxt)
                frontier.append(nxt)
                if len(states) > max_states:
                    raise InfeasibleError(
                        f"determinization exceeded {max_states} states"
                    )
    accepting = frozenset(s for s in states if set(s) & nfa.accepting)
    return Nfa(
        states=tuple(order),
        alphabet=nfa.alphabet,
        initial=frozenset({start}),
        accepting=accepting,
        transitions=frozenset(transitions),
    )


def product(a: Nfa, b: Nfa) -> Nfa:
    """Synchronous product on the common alphabet (language intersection)."""
    if set(a.alphabet) != set(b.alphabet):
        raise PreconditionError("product requires identical alphabets")
    states = tuple(itertools.product(a.states, b.states))
    transitions = set()
    b_succ = {q: b.successors(q) for q in b.states}
    for (p, letter, p2) in a.transitions:
        for q in b.states:
            for q2 in b_succ[q].get(letter, ()):
                transitions.add(((p, q), letter, (p2, q2)))
    return Nfa(
        states=states,
        alphabet=a.alphabet,
        initial=frozenset(itertools.product(a.initial, b.initial)),
        accepting=frozenset(itertools.product(a.accepting, b.accepting)),
        transitions=frozenset(transitions),
    )


def _check_state_cap(n: int, max_states: int, what: str) -> None:
    if n > max_states:
        raise InfeasibleError(
            f"{what} needs {n} states, over the cap {max_states}; "
            "set eta_override to a small value (guarantees then rest on the "
            "oracle cross-check) or raise the cap"
        )


def build_cover_automaton(mp: MorphismPair, max_states: int = 10**6) -> Nfa:
    eta = mp.eta
    _check_state_cap(eta + 1, max_states, "cover automaton")
    states: tuple = tuple(range(eta)) + (INF,)
    transitions = set()
    for c in range(eta):
        for a in mp.alphabet:
            c2 = c + mp.omega[a]
            if 0 <= c2 < eta:
                transitions.add((c, a, c2))
            if c == eta - 1 and mp.omega[a] == 1:
                transitions.add((c, a, INF))
    for a in mp.alphabet:
        transitions.add((INF, a, INF))
    return Nfa(
        states=states,
        alphabet=tuple(mp.alphabet),
        initial=frozenset({0}),
        accepting=frozenset(states),
        transitions=frozenset(transitions),
    )


def build_reach_automaton(mp: MorphismPair, max_states: int = 10**6) -> Nfa:
    eta = mp.eta
    _check_state_cap(2 * eta + 1, max_states, "reach automaton")
    counting = [(c, b) for c in range(eta) for b in (0, 1)]
    states: tuple = tuple(counting) + (INF,)
    transitions = set()
    for (c, b) in counting:
        for a in mp.alphabet:
            c2 = c + mp.omega[a]
            if 0 <= c2 < eta:
                transitions.add(((c, b), a, (c2, b)))
    for a in mp.alphabet:
        transitions.add((INF, a, INF))
        if mp.omega[a] == 1:
            transitions.add(((eta - 1, 0), a, INF))
        if mp.omega[a] == -1:
            transitions.add((INF, a, (eta - 1, 1)))
    return Nfa(
        states=states,
        alphabet=tuple(mp.alphabet),
        initial=frozenset({(0, 0)}),
        accepting=frozenset({(0, 0), (0, 1)}),
        transitions=frozenset(transitions),
    )


def gamma_alphabet(alphabet: tuple[str, ...]) -> tuple[GammaLetter, ...]:
    base = (EPS,) + tuple(alphabet)
    return tuple(
        g for g in itertools.product(base, repeat=4) if any(x != EPS for x in g)
    )


def gamma_weight(g: GammaLetter, mp: MorphismPair) -> int:
    return sum(mp.omega[x] for x in g if x != EPS)


def build_zero_automaton(mp: MorphismPair, max_states: int = 10**6) -> Nfa:
    eta = mp.eta
    _check_state_cap(4 * eta + 1, max_states, "zero automaton")
    states = tuple(range(-2 * eta, 2 * eta + 1))
    gamma = gamma_alphabet(mp.alphabet)
    transitions = set()
    for q in states:
        for g in gamma:
            q2 = q + gamma_weight(g, mp)
            if -2 * eta <= q2 <= 2 * eta:
                transitions.add((q, g, q2))
    return Nfa(
        states=states,
        alphabet=gamma,
        initial=frozenset({0}),
        accepting=frozenset({0}),
        transitions=frozenset(transitions),
    )


def build_bz_automaton(mp: MorphismPair, max_states: int = 10**6) -> Nfa:
    eta = mp.eta
    _check_state_cap(2 * eta + 1, max_states, "bounded-zero automaton")
    states = tuple(range(-eta, eta + 1))
    transitions = set()
    for q in states:
        for a in mp.alphabet:
            q2 = q + mp.omega[a]
            if -eta <= q2 <= eta:
                transitions.add((q, a, q2))
    return Nfa(
        states=states,
        alphabet=tuple(mp.alphabet),
        initial=frozenset({0}),
        accepting=frozenset({0}),
        transitions=frozenset(transitions),
    )


def flatten(ws) -> tuple[tuple[Word, Word, Word, Word], Word]:
    """prod (componentwise concatenation) and flat (components in order)."""
    comps: list[list[str]] = [[], [], [], []]
    for g in ws:
        for i, x in enumerate(g):
            if x != EPS:
                comps[i].append(x)
    prod = tuple(tuple(c) for c in comps)
    flat = tuple(x for c in comps for x in c)
    return prod, flat  # type: ignore[return-value]


def recover_cover_factorization(
    w, mp: MorphismPair
) -> tuple[Word, Word, Word]:
    """For w accepted by the cover automaton but outside the cover language,
    return (w1, u, w2) with w = w1 u w2, phi(u) stable, omega(u) > 0 and all
    prefixes of w1 u nonnegative."""
    w = mp.check_word(w)
    total = 0
    v_end = None
    for i, a in enumerate(w):
        total += mp.omega[a]
        if total == mp.eta:
            v_end = i + 1
            break
    if v_end is None:
        raise PreconditionError("word never reaches the threshold")
    i, j = extract_stable_factor(w[:v_end], mp, 1)
    return w[:i], w[i:j], w[j:]


def _run_weights(word, mp: MorphismPair) -> list[int]:
    out = [0]
    for a in word:
        out.append(out[-1] + mp.omega[a])
    return out


def construct_zero_witness(
    w, mp: MorphismPair
) -> tuple[tuple[GammaLetter, ...], tuple[GammaLetter, ...]]:
    """Witness pair (W, U) with W U^k accepted by the zero automaton for all
    k and flat(W U^k) a pumped version of w.  Input must be a zero-weight
    word that is not bounded-zero."""
    w = mp.check_word(w)
    cls = classify_word(w, mp)
    if not (cls.in_LZ and not cls.in_LBZ):
        raise PreconditionError("witness needs a word in the zero language "
                                "but outside the bounded-zero language")
    eta = mp.eta
    pw = _run_weights(w, mp)

    # shortest prefix x with |weight| = eta fixes the orientation
    x_end = next(i for i, c in enumerate(pw) if abs(c) == eta)
    sign = 1 if pw[x_end] == eta else -1

    # shortest zero-weight prefix extending x, then its shortest suffix of
    # weight -sign*eta
    p_end = next(i for i in range(x_end + 1, len(pw)) if pw[i] == 0)
    y_start = max(
        i for i in range(x_end, p_end) if pw[p_end] - pw[i] == -sign * eta
    )
    x = w[:x_end]
    w1 = w[x_end:y_start]
    y = w[y_start:p_end]
    w2 = w[p_end:]

    i1, j1 = extract_stable_factor(x, mp, sign)
    x1, u, x2 = x[:i1], x[i1:j1], x[j1:]
    i2, j2 = extract_stable_factor(y, mp, -sign)
    y2, v, y1 = y[:i2], y[i2:j2], y[j2:]
    wu, wv = mp.weight(u), mp.weight(v)

    letters: list[GammaLetter] = []
    counter = 0

    def emit(slot: int, word) -> None:
        nonlocal counter
        for a in word:
            g = [EPS, EPS, EPS, EPS]
            g[slot] = a
            letters.append(tuple(g))  # type: ignore[arg-type]
            counter += mp.omega[a]
            if not -2 * eta <= counter <= 2 * eta:
                raise InternalInvariantError(
                    "witness run left the counter range; this is a bug"
                )

    # phase 1: x1 u | x2 | y2 v | y1 into the four slots
    emit(0, x1 + u)
    emit(1, x2)
    emit(2, y2 + v)
    emit(3, y1)
    if counter != 0:
        raise InternalInvariantError("phase 1 must end at counter 0")

    # phase 2: w1 then w2 letterwise, inserting u/v whenever the counter hits
    # the trigger value -omega(u) resp. -omega(v)
    m0 = n0 = 0
    for slot, word in ((1, w1), (3, w2)):
        for a in word:
            emit(slot, (a,))
            if counter == -wu:
                emit(0, u)
                m0 += 1
            elif counter == -wv:
                emit(2, v)
                n0 += 1

    # phase 3: pad with whole u/v blocks to reach m*wu + n*wv = 0
    g = _gcd(abs(wu), abs(wv))
    m_base, n_base = abs(wv) // g, abs(wu) // g
    t = 1
    while t * m_base < m0 or t * n_base < n0:
        t += 1
    m, n = t * m_base, t * n_base
    letters.extend(_greedy_blocks(mp, u, v, m - m0, n - n0, counter, eta))

    witness = tuple(letters)
    pump = tuple(_greedy_blocks(mp, u, v, m, n, 0, eta))
    return witness, pump


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _greedy_blocks(mp: MorphismPair, u, v, mu: int, nv: int, counter: int, eta: int):
    """Read mu copies of u (slot 0) and nv copies of v (slot 2), choosing the
    factor that pushes the counter toward zero; the counter must stay within
    the zero automaton's range."""
    wu, wv = mp.weight(u), mp.weight(v)
    pos_block, neg_block = ((0, u), (2, v)) if wu > 0 else ((2, v), (0, u))
    pos_left = mu if wu > 0 else nv
    neg_left = nv if wu > 0 else mu
    out: list[GammaLetter] = []

    def emit(slot: int, word) -> None:
        nonlocal counter
        for a in word:
            g = [EPS, EPS, EPS, EPS]
            g[slot] = a
            out.append(tuple(g))  # type: ignore[arg-type]
            counter += mp.omega[a]
            if not -2 * eta <= counter <= 2 * eta:
                raise InternalInvariantError(
                    "witness run left the counter range; this is a bug"
                )

    while pos_left or neg_left:
        if pos_left and (counter <= 0 or not neg_left):
            emit(*pos_block)
            pos_left -= 1
        else:
            emit(*neg_block)
            neg_left -= 1
    return out


def stable_letterwise(mp: MorphismPair, word) -> bool:
    """Convenience used by tests: is the image of the word stable?"""
    return is_stable(mp.image(word))
