"""Rewriting rational subsets of a subgroup into its generators and back.

``herbst_rewrite`` turns an automaton over X, whose image lies in a subgroup A,
into an automaton over A's generators with the same image.  It goes through a
rational expression (state elimination, ascending state index) and recurses
on star height: a star-product ``w1 T1* w2 ... wn Tn* w(n+1)`` equals
``S1* ... Sn* (w1...w(n+1))`` where ``Si = (w1...wi) Ti (w1...wi)^-1``, and
each Si has smaller star height than the product it came from.

Expanding an expression into star-products can blow up exponentially.  When
it passes ``limits.herbst_terms`` the rewrite falls back to coset labelling:
in a trim automaton whose image lies in A, all words reaching a state q lie in
one right coset A g_q, so each edge p -x-> q can be relabelled by a witness
for g_p x g_q^-1 and each final state f by a witness for g_f.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .config import DEFAULT_LIMITS, Limits
from .errors import HerbstError, ResourceExceeded
from .fsa import (
    minimize,
    Fsa,
    empty_fsa,
    epsilon_fsa,
    fsa_concat,
    fsa_from_words,
    fsa_relabel,
    fsa_star,
    fsa_union,
    remove_eps,
    trim,
)
from .rational import RationalSet, benois_reduce
from .stallings import StallingsGraph, subgroup_member, y_gen
from .words import Word, free_reduce, invert, product


# ----- rational expressions --------------------------------------------------------------

@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Eps:
    pass


@dataclass(frozen=True)
class Sym:
    word: Word


@dataclass(frozen=True)
class Cat:
    left: object
    right: object


@dataclass(frozen=True)
class Alt:
    left: object
    right: object


@dataclass(frozen=True)
class Star:
    inner: object


EMPTY, EPS = Empty(), Eps()


def cat(a, b):
    if a == EMPTY or b == EMPTY:
        return EMPTY
    if a == EPS:
        return b
    if b == EPS:
        return a
    if isinstance(a, Sym) and isinstance(b, Sym):
        return Sym(a.word + b.word)
    return Cat(a, b)


def alt(a, b):
    if a == EMPTY:
        return b
    if b == EMPTY or a == b:
        return a
    return Alt(a, b)


def star(a):
    if a in (EMPTY, EPS):
        return EPS
    if isinstance(a, Star):
        return a
    return Star(a)


def star_height(e) -> int:
    if isinstance(e, Star):
        return 1 + star_height(e.inner)
    if isinstance(e, (Cat, Alt)):
        return max(star_height(e.left), star_height(e.right))
    return 0


def to_expression(f: Fsa):
    """State elimination in ascending state order."""
    f = trim(f)
    if f.is_empty():
        return EMPTY
    n = f.n
    start, end = n, n + 1
    table: dict = {}

    def put(p, q, e):
        table[(p, q)] = alt(table.get((p, q), EMPTY), e)

    for p, label, q in sorted(f.transitions, key=lambda t: (t[0], t[2], str(t[1]))):
        put(p, q, EPS if label is None else Sym(Word([label])))
    for s in sorted(f.initial):
        put(start, s, EPS)
    for s in sorted(f.final):
        put(s, end, EPS)
    for k in range(n):
        loop = star(table.pop((k, k), EMPTY))
        ins = [(p, e) for (p, q), e in table.items() if q == k]
        outs = [(q, e) for (p, q), e in table.items() if p == k]
        for p, _ in ins:
            del table[(p, k)]
        for q, _ in outs:
            del table[(k, q)]
        for p, ein in ins:
            for q, eout in outs:
                put(p, q, cat(cat(ein, loop), eout))
    return table.get((start, end), EMPTY)


def star_products(e, cap: int) -> list:
    """Expand ``e`` into a union of sequences of Words and Star nodes."""
    if e == EMPTY:
        return []
    if e == EPS:
        return [()]
    if isinstance(e, Sym):
        return [(e.word,)]
    if isinstance(e, Star):
        return [(e,)]
    if isinstance(e, Alt):
        out = star_products(e.left, cap) + star_products(e.right, cap)
    else:
        left, right = star_products(e.left, cap), star_products(e.right, cap)
        if len(left) * len(right) > cap:
            raise ResourceExceeded(f"rational expression expands past {cap} terms")
        out = [_join(a, b) for a in left for b in right]
    if len(out) > cap:
        raise ResourceExceeded(f"rational expression expands past {cap} terms")
    return out


def _join(a: tuple, b: tuple) -> tuple:
    if a and b and isinstance(a[-1], Word) and isinstance(b[0], Word):
        return a[:-1] + (a[-1] + b[0],) + b[1:]
    return a + b


# ----- rewriting -------------------------------------------------------------------------

def _y_alphabet(graph: StallingsGraph) -> list:
    return [y_gen(i + 1) for i in range(len(graph.gens))]


def _witness(graph: StallingsGraph, w: Word) -> Word:
    x = subgroup_member(graph, w)
    if x is None:
        raise HerbstError(f"{free_reduce(w)} is not in the subgroup generated by {[str(g) for g in graph.gens]}")
    return x


def _rewrite_expr(e, graph: StallingsGraph, ys: list, limits: Limits, budget: list) -> Fsa:
    parts = []
    for seq in star_products(e, limits.herbst_terms):
        budget[0] += 1
        if budget[0] > limits.herbst_terms:
            raise ResourceExceeded(f"Herbst rewriting exceeded {limits.herbst_terms} star-products")
        pieces = []
        prefix = Word()
        for item in seq:
            if isinstance(item, Word):
                prefix = product(prefix, item)
            else:
                conj = cat(cat(Sym(prefix), item.inner), Sym(invert(prefix)))
                pieces.append(fsa_star(_rewrite_expr(conj, graph, ys, limits, budget)))
        tail = fsa_from_words([_witness(graph, prefix)], ys)
        parts.append(fsa_concat(*pieces, tail) if pieces else tail)
    if not parts:
        return empty_fsa(ys)
    # only the language over the y letters matters, so shrink before nesting
    return minimize(fsa_union(*parts) if len(parts) > 1 else parts[0])


def herbst_rewrite_cosets(a: Fsa, graph: StallingsGraph) -> Fsa:
    """Coset-labelling rewrite; linear in the size of ``a``."""
    ys = _y_alphabet(graph)
    a = trim(a)
    if a.is_empty():
        return empty_fsa(ys)
    # representatives g_q along a breadth-first tree from a fresh start state
    start = a.n
    rep = {start: Word()}
    queue = deque([start])
    out_edges = {start: [(None, i) for i in sorted(a.initial)]}
    while queue:
        p = queue.popleft()
        for label, q in out_edges.get(p, a.out[p] if p < a.n else []):
            if q not in rep:
                rep[q] = rep[p] if label is None else free_reduce(rep[p] + Word([label]))
                queue.append(q)
    transitions = []
    fresh = a.n + 1

    def chain(p, w: Word, q):
        nonlocal fresh
        letters = list(w.letters)
        if not letters:
            transitions.append((p, None, q))
            return
        cur = p
        for i, x in enumerate(letters):
            nxt = q if i == len(letters) - 1 else fresh
            if nxt == fresh:
                fresh += 1
            transitions.append((cur, x, nxt))
            cur = nxt

    for i in sorted(a.initial):
        chain(start, _witness(graph, invert(rep[i])), i)
    for p, label, q in a.transitions:
        step = rep[p] if label is None else rep[p] + Word([label])
        chain(p, _witness(graph, product(step, invert(rep[q]))), q)
    final = fresh
    fresh += 1
    for f in sorted(a.final):
        chain(f, _witness(graph, rep[f]), final)
    return trim(Fsa.build(fresh, ys, transitions, [start], [final]))


def herbst_rewrite(a: Fsa, graph: StallingsGraph, limits: Limits = DEFAULT_LIMITS, method: str = "auto") -> Fsa:
    """Automaton over ``y{i}`` whose image (via the graph's generators) equals the image of ``a``.

    ``method`` is ``expression`` (star-height recursion), ``cosets``, or
    ``auto`` (expression, falling back to cosets past the term cap).
    """
    if method == "cosets":
        return herbst_rewrite_cosets(a, graph)
    ys = _y_alphabet(graph)
    expr = to_expression(remove_eps(a))
    try:
        out = _rewrite_expr(expr, graph, ys, limits, [0])
    except ResourceExceeded:
        if method == "expression":
            raise
        return herbst_rewrite_cosets(a, graph)
    return trim(out) if out.transitions else out


def herbst_embed(b: Fsa, assignment: Mapping, alphabet=None) -> Fsa:
    """Replace each ``y`` transition by the letters of ``assignment[y]``."""
    images = {y: free_reduce(w) for y, w in assignment.items()}
    return fsa_relabel(b, images, alphabet)


def image_under_iso(r: RationalSet, graph: StallingsGraph, targets: Sequence[Word], alphabet=None,
                    limits: Limits = DEFAULT_LIMITS) -> RationalSet:
    """Image of ``r`` (inside the subgroup of ``graph``) under gens[i] -> targets[i]."""
    if len(targets) != len(graph.gens):
        raise ValueError("generator pairing has unequal lengths")
    rewritten = herbst_rewrite(r.automaton, graph, limits)
    assignment = {y_gen(i + 1): t for i, t in enumerate(targets)}
    alpha = set(alphabet) if alphabet is not None else set(r.group_alphabet)
    for t in targets:
        alpha |= t.generators()
    return benois_reduce(herbst_embed(rewritten, assignment, alpha), limits)


__all__ = [
    "herbst_rewrite", "herbst_rewrite_cosets", "herbst_embed", "image_under_iso", "to_expression", "star_products", "star_height",
]
