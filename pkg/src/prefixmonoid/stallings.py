"""Folded core graphs of finitely generated subgroups of a free group.

Every edge carries a word over the subgroup generators ``y{1}, y{2}, ...``
(its provenance).  The invariant maintained through folding is that reading
any closed path at the basepoint gives, after substituting the generators,
the same free-group element as the path's label.  So a loop read off for a
reduced word is a witness expressing that word in the generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .fsa import Fsa, intersect_fsa, trim
from .rational import RationalSet, intersect, reduced_word_dfa
from .words import Word, free_reduce, invert, product, substitute

BASE = 0


def y_gen(i: int) -> tuple:
    """Name of the ``i``-th subgroup generator (1-based)."""
    return ("y", i)


@dataclass(frozen=True)
class StallingsGraph:
    gens: tuple  # reduced generator words, in the caller's order
    alphabet: tuple
    vertices: frozenset
    # positive edges (u, generator, v) -> provenance word over y{i}
    edges: dict = field(hash=False, compare=False)
    basepoint: int = BASE

    @property
    def assignment(self) -> dict:
        return {y_gen(i + 1): g for i, g in enumerate(self.gens)}

    def half_edges(self) -> dict:
        """(vertex, letter) -> (target, provenance) in both orientations."""
        out = {}
        for (u, g, v), p in self.edges.items():
            out[(u, (g, 1))] = (v, p)
            out[(v, (g, -1))] = (u, invert(p))
        return out

    def rank(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    def language(self) -> Fsa:
        """Automaton reading basepoint loops in both edge orientations (not yet reduced)."""
        index = {v: i for i, v in enumerate(sorted(self.vertices))}
        transitions = []
        for (u, g, v) in self.edges:
            transitions.append((index[u], (g, 1), index[v]))
            transitions.append((index[v], (g, -1), index[u]))
        b = index[self.basepoint]
        return Fsa.build(len(index), self.alphabet, transitions, (b,), (b,))

    def reduced_language(self) -> RationalSet:
        f = trim(intersect_fsa(self.language(), reduced_word_dfa(self.alphabet)))
        return RationalSet(f)


def stallings(gens: Iterable[Word], alphabet: Iterable = ()) -> StallingsGraph:
    gens = tuple(free_reduce(g) for g in gens)
    alpha = set(alphabet)
    for g in gens:
        alpha |= g.generators()
    from .fsa import canonical_alphabet

    alpha = canonical_alphabet(alpha)
    edges: dict = {}
    n = 1
    for i, w in enumerate(gens):
        if not w:
            continue
        prev = BASE
        for k, (g, s) in enumerate(w.letters):
            nxt = BASE if k == len(w) - 1 else n
            if nxt != BASE:
                n += 1
            prov = Word([(y_gen(i + 1), 1)]) if k == 0 else Word()
            if s > 0:
                key, p = (prev, g, nxt), prov
            else:
                key, p = (nxt, g, prev), invert(prov)
            if key not in edges:
                edges[key] = p
            prev = nxt
    vertices = set(range(n))
    _fold(edges, vertices)
    _core(edges, vertices)
    return StallingsGraph(gens, alpha, frozenset(vertices), edges)


def _find_fold(edges: dict, vertices: set):
    seen: dict = {}
    for (u, g, v), p in edges.items():
        for key, target, prov in (((u, g, 1), v, p), ((v, g, -1), u, invert(p))):
            if key in seen:
                other = seen[key]
                return key[0], other, (target, prov)
            seen[key] = (target, prov)
    return None


def _fold(edges: dict, vertices: set) -> None:
    while True:
        hit = _find_fold(edges, vertices)
        if hit is None:
            return
        _, (v1, q1), (v2, q2) = hit
        if v1 == v2:
            # parallel edges with the same label: both carry the same element
            _drop_parallel(edges)
            continue
        if v2 == BASE:
            keep, drop, c = v2, v1, product(invert(q2), q1)
        else:
            keep, drop, c = v1, v2, product(invert(q1), q2)
        _merge(edges, vertices, keep, drop, c)


def _drop_parallel(edges: dict) -> None:
    seen = {}
    for key in list(edges):
        u, g, v = key
        for half in ((u, g, 1), (v, g, -1)):
            if half in seen and seen[half] != key:
                del edges[key]
                return
        seen[(u, g, 1)] = key
        seen[(v, g, -1)] = key


def _merge(edges: dict, vertices: set, keep: int, drop: int, c: Word) -> None:
    """Identify ``drop`` with ``keep``; ``c`` corrects provenance at ``drop``."""
    cinv = invert(c)
    moved = {}
    for key in list(edges):
        u, g, v = key
        if u != drop and v != drop:
            continue
        p = edges.pop(key)
        if u == drop:
            p = product(c, p)
            u = keep
        if v == drop:
            p = product(p, cinv)
            v = keep
        moved[(u, g, v)] = p
    for key, p in moved.items():
        # an identical key already present carries the same element
        edges.setdefault(key, p)
    vertices.discard(drop)


def _core(edges: dict, vertices: set) -> None:
    while True:
        degree = {v: 0 for v in vertices}
        for (u, _, v) in edges:
            degree[u] += 1
            degree[v] += 1
        leaves = [v for v, d in degree.items() if d <= 1 and v != BASE]
        if not leaves:
            return
        for v in leaves:
            vertices.discard(v)
            for key in [k for k in edges if k[0] == v or k[2] == v]:
                del edges[key]


def subgroup_member(graph: StallingsGraph, w: Word) -> Word | None:
    """Witness word over ``y{i}`` for ``w`` if it lies in the subgroup, else None."""
    half = graph.half_edges()
    v = graph.basepoint
    prov: list = []
    for letter in free_reduce(w).letters:
        step = half.get((v, letter))
        if step is None:
            return None
        v, p = step
        prov.extend(p.letters)
    if v != graph.basepoint:
        return None
    return free_reduce(Word(prov))


def in_subgroup(graph: StallingsGraph, w: Word) -> bool:
    return subgroup_member(graph, w) is not None


def evaluate(graph: StallingsGraph, witness: Word) -> Word:
    return free_reduce(substitute(witness, graph.assignment))


def subgroup_intersect(r: RationalSet, graph: StallingsGraph) -> RationalSet:
    """Elements of the rational set that lie in the subgroup."""
    lang = graph.reduced_language()
    alpha = set(r.group_alphabet) | set(lang.group_alphabet)
    a = RationalSet(r.automaton.with_alphabet(alpha))
    b = RationalSet(lang.automaton.with_alphabet(alpha))
    return intersect(a, b)


__all__ = [
    "StallingsGraph", "stallings", "subgroup_member", "in_subgroup", "evaluate", "subgroup_intersect", "y_gen",
]
