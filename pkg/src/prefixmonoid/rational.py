"""Rational subsets of free groups.

A ``RationalSet`` wraps an automaton that accepts only freely reduced words
and whose language is the reduced-word image of some rational language.
``benois_reduce`` produces one from an arbitrary automaton and remembers,
for every transition it creates, a path in the source automaton.  That lets
``member_path`` turn an accepted reduced word back into a source path, which
for a monoid automaton is a factorisation into generators.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .config import DEFAULT_LIMITS, Limits
from .errors import ResourceExceeded
from .fsa import (
    AlphabetMismatch,
    Fsa,
    canonical_alphabet,
    complete_dfa,
    determinize,
    empty_fsa,
    fsa_monoid,
    intersect_fsa,
    minimize,
    trim,
)
from .words import Word, free_reduce, gen_key, invert


def reduced_word_dfa(alphabet: Iterable) -> Fsa:
    """DFA accepting exactly the freely reduced words; state 0 is 'nothing read'."""
    alpha = canonical_alphabet(alphabet)
    letters = [(g, s) for g in alpha for s in (1, -1)]
    index = {a: i + 1 for i, a in enumerate(letters)}
    transitions = []
    for last in [None] + letters:
        p = 0 if last is None else index[last]
        for a in letters:
            if last is not None and last[0] == a[0] and last[1] == -a[1]:
                continue
            transitions.append((p, a, index[a]))
    return Fsa.build(len(letters) + 1, alpha, transitions, (0,), range(len(letters) + 1))


def lift(f: Fsa, alphabet: Iterable) -> Fsa:
    return f.with_alphabet(alphabet)


def _align(*fsas: Fsa) -> list:
    alpha = set()
    for f in fsas:
        alpha |= set(f.alphabet)
    return [f.with_alphabet(alpha) for f in fsas]


@dataclass(frozen=True)
class RationalSet:
    automaton: Fsa
    reduced_flag: bool = True
    # transition of ``automaton`` -> (pair, source edge) so paths can be expanded
    origin: dict | None = field(default=None, compare=False, hash=False, repr=False)
    justification: dict | None = field(default=None, compare=False, hash=False, repr=False)
    source: Fsa | None = field(default=None, compare=False, hash=False, repr=False)

    @property
    def group_alphabet(self) -> tuple:
        return self.automaton.alphabet

    def size(self) -> int:
        return self.automaton.size()

    def is_empty(self) -> bool:
        return self.automaton.is_empty()

    def words(self, max_len: int) -> set:
        return self.automaton.words(max_len)

    def __contains__(self, w: Word) -> bool:
        return member(self, w)


def _saturate(a: Fsa) -> dict:
    """Pairs (p, q) joined by a path whose label freely reduces to the empty word.

    Each pair maps to how it was first derived, which is enough to rebuild a path.
    """
    just: dict = {}
    r_out: dict = {}
    r_in: dict = {}
    into: dict = {}  # q -> edges (p, x, q)
    for e in a.transitions:
        into.setdefault(e[2], []).append(e)
    queue = deque()

    def add(pair, why):
        if pair in just:
            return
        just[pair] = why
        r_out.setdefault(pair[0], set()).add(pair[1])
        r_in.setdefault(pair[1], set()).add(pair[0])
        queue.append(pair)

    for p in range(a.n):
        add((p, p), ("id",))
    for e in a.transitions:
        if e[1] is None:
            add((e[0], e[2]), ("edge", e))
    while queue:
        p, q = queue.popleft()
        for s in list(r_out.get(q, ())):
            add((p, s), ("comp", (p, q), (q, s)))
        for r in list(r_in.get(p, ())):
            add((r, q), ("comp", (r, p), (p, q)))
        for e1 in into.get(p, ()):
            if e1[1] is None:
                continue
            inv = (e1[1][0], -e1[1][1])
            for label, s in a.out[q]:
                if label == inv:
                    add((e1[0], s), ("cancel", e1, (p, q), (q, label, s)))
    return just


def benois_reduce(a: Fsa, limits: Limits = DEFAULT_LIMITS) -> RationalSet:
    """Automaton for {red(w) : w in L(a)}, with path provenance."""
    if a.size() > limits.automaton_cap:
        raise ResourceExceeded(f"automaton with {a.size()} states+edges exceeds cap {limits.automaton_cap}")
    just = _saturate(a)
    r_out: dict = {}
    for p, q in just:
        r_out.setdefault(p, []).append(q)
    # epsilon-free closure automaton, then product with the reduced-word DFA
    red = reduced_word_dfa(a.alphabet)
    red_delta = {(p, x): q for p, x, q in red.transitions}
    final_pair = {}
    for p in range(a.n):
        for q in r_out.get(p, ()):
            if q in a.final:
                final_pair.setdefault(p, (p, q))
    index: dict = {}
    queue = deque()
    for s in sorted(a.initial):
        index[(s, 0)] = len(index)
        queue.append((s, 0))
    transitions = []
    origin = {}
    while queue:
        p, d = queue.popleft()
        for mid in sorted(r_out.get(p, ())):
            for label, q in a.out[mid]:
                if label is None:
                    continue
                nd = red_delta.get((d, label))
                if nd is None:
                    continue
                if (q, nd) not in index:
                    index[(q, nd)] = len(index)
                    queue.append((q, nd))
                t = (index[(p, d)], label, index[(q, nd)])
                if t not in origin:
                    origin[t] = ((p, mid), (mid, label, q))
                    transitions.append(t)
        if len(index) + len(transitions) > limits.automaton_cap:
            raise ResourceExceeded(f"reduced automaton exceeds cap {limits.automaton_cap}")
    final = [i for (p, d), i in index.items() if p in final_pair]
    raw = Fsa.build(max(len(index), 1), a.alphabet, transitions, [index[(s, 0)] for s in a.initial], final)
    # drop dead states but keep numbering stable enough to remap provenance
    useful = raw.reachable() & raw.coreachable()
    renum = {s: i for i, s in enumerate(sorted(useful))}
    state_of = {i: p for (p, d), i in index.items()}
    kept = [(renum[p], x, renum[q]) for p, x, q in transitions if p in renum and q in renum]
    out_origin = {(renum[p], x, renum[q]): origin[(p, x, q)] for p, x, q in transitions if p in renum and q in renum}
    initial = [renum[index[(s, 0)]] for s in a.initial if index[(s, 0)] in renum]
    final_map = {renum[i]: final_pair[state_of[i]] for i in final if i in renum}
    if not renum:
        return RationalSet(empty_fsa(a.alphabet))
    out = Fsa.build(len(renum), a.alphabet, kept, initial, final_map)
    return RationalSet(out, True, origin={"edges": out_origin, "final": final_map},
                       justification=just, source=a)


def _expand_pair(just: dict, pair) -> list:
    out = []
    stack = [("pair", pair)]
    while stack:
        kind, item = stack.pop()
        if kind == "edge":
            out.append(item)
            continue
        why = just[item]
        if why[0] == "edge":
            out.append(why[1])
        elif why[0] == "comp":
            stack.append(("pair", why[2]))
            stack.append(("pair", why[1]))
        elif why[0] == "cancel":
            stack.append(("edge", why[3]))
            stack.append(("pair", why[2]))
            stack.append(("edge", why[1]))
    return out


def accepting_path(f: Fsa, w: Word) -> list | None:
    """Some accepting path (list of transitions) of an epsilon-free automaton for ``w``."""
    layer = {s: None for s in f.initial}
    history = [layer]
    for letter in w.letters:
        nxt: dict = {}
        for p in layer:
            for label, q in f.out[p]:
                if label == letter and q not in nxt:
                    nxt[q] = (p, label, q)
        if not nxt:
            return None
        history.append(nxt)
        layer = nxt
    ends = sorted(s for s in layer if s in f.final)
    if not ends:
        return None
    path = []
    s = ends[0]
    for level in range(len(history) - 1, 0, -1):
        t = history[level][s]
        path.append(t)
        s = t[0]
    path.reverse()
    return path


def member(r: RationalSet, w: Word) -> bool:
    return r.automaton.accepts(free_reduce(w))


def member_path(r: RationalSet, w: Word) -> list | None:
    """A path in the source automaton whose label equals ``w`` in the free group."""
    if r.origin is None:
        raise ValueError("rational set has no provenance")
    path = accepting_path(r.automaton, free_reduce(w))
    if path is None:
        return None
    edges = r.origin["edges"]
    out: list = []
    for t in path:
        pair, e = edges[t]
        out += _expand_pair(r.justification, pair)
        out.append(e)
    end = path[-1][2] if path else min(s for s in r.automaton.initial if s in r.automaton.final)
    out += _expand_pair(r.justification, r.origin["final"][end])
    return out


def path_label(path: list) -> Word:
    return Word(x for _, x, _ in path if x is not None)


# ----- constructors ----------------------------------------------------------------------

@dataclass
class MonoidSet:
    """Submonoid of a free group generated by finitely many words, with factorisations."""

    gens: list
    rational: RationalSet
    tags: dict

    def __contains__(self, w: Word) -> bool:
        return member(self.rational, w)

    def factorise(self, w: Word) -> list | None:
        """Indices of generators whose product equals ``w``, or None."""
        path = member_path(self.rational, w)
        if path is None:
            return None
        return [self.tags[e] for e in path if e in self.tags]


def monoid_set(gens: Iterable[Word], alphabet: Iterable = (), limits: Limits = DEFAULT_LIMITS) -> MonoidSet:
    gens = [free_reduce(g) for g in gens]
    auto, tags = fsa_monoid(gens, alphabet)
    return MonoidSet(gens, benois_reduce(auto, limits), tags)


def rational_from_fsa(a: Fsa, limits: Limits = DEFAULT_LIMITS) -> RationalSet:
    return benois_reduce(a, limits)


def rational_of_words(words: Iterable[Word], alphabet: Iterable = ()) -> RationalSet:
    from .fsa import fsa_from_words

    return benois_reduce(fsa_from_words([free_reduce(w) for w in words], alphabet))


def all_elements(alphabet: Iterable) -> RationalSet:
    return RationalSet(reduced_word_dfa(alphabet))


# ----- Boolean operations ----------------------------------------------------------------

def _require(*rs: RationalSet):
    for r in rs:
        if not r.reduced_flag:
            raise ValueError("rational set is not saturated")


def intersect(r1: RationalSet, r2: RationalSet, limits: Limits = DEFAULT_LIMITS) -> RationalSet:
    _require(r1, r2)
    if r1.group_alphabet != r2.group_alphabet:
        raise AlphabetMismatch("rational sets over different alphabets")
    f = trim(intersect_fsa(r1.automaton, r2.automaton))
    if f.size() > limits.automaton_cap:
        raise ResourceExceeded(f"intersection exceeds cap {limits.automaton_cap}")
    return RationalSet(f)


def complement(r: RationalSet) -> RationalSet:
    _require(r)
    letters = [(g, s) for g in r.group_alphabet for s in (1, -1)]
    d = complete_dfa(determinize(r.automaton), letters)
    flipped = Fsa.build(d.n, d.alphabet, d.transitions, d.initial, set(range(d.n)) - set(d.final))
    return RationalSet(trim(intersect_fsa(flipped, reduced_word_dfa(r.group_alphabet))))


def normalize(r: RationalSet) -> Fsa:
    """Canonical minimal DFA of the reduced-word language (for equality tests)."""
    return minimize(r.automaton)


def same_set(r1: RationalSet, r2: RationalSet) -> bool:
    a, b = _align(r1.automaton, r2.automaton)
    return minimize(a).to_text() == minimize(b).to_text()


def with_alphabet(r: RationalSet, alphabet: Iterable) -> RationalSet:
    return RationalSet(r.automaton.with_alphabet(alphabet), r.reduced_flag, r.origin, r.justification, r.source)


def compact(r: RationalSet) -> RationalSet:
    """Minimised copy (drops provenance); used inside engines to curb growth."""
    return RationalSet(minimize(r.automaton))


def empty_set(alphabet: Iterable) -> RationalSet:
    return RationalSet(empty_fsa(alphabet))


__all__ = [
    "RationalSet", "MonoidSet", "benois_reduce", "member", "member_path", "path_label", "monoid_set",
    "intersect", "complement", "normalize", "same_set", "reduced_word_dfa", "rational_of_words",
    "all_elements", "compact", "empty_set", "with_alphabet", "accepting_path",
]
