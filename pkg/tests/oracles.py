"""Brute-force references used by the tests; deliberately naive."""

import itertools
import random

from prefixmonoid.fsa import Fsa
from prefixmonoid.words import Word


def _append_reduced(red: tuple, letter) -> tuple:
    if red and red[-1][0] == letter[0] and red[-1][1] == -letter[1]:
        return red[:-1]
    return red + (letter,)


def reductions(fsa: Fsa, max_path: int, max_red: int) -> dict:
    """Reduced words (length <= max_red) reached by accepted paths with at most max_path letters.

    Maps each reduced word to the length of the shortest path found.  A partial
    path is pruned once its reduced form is too long to shrink back in time.
    """
    found: dict = {}
    start = fsa.eps_closure(fsa.initial)
    frontier = {(s, ()) for s in start}
    seen = set(frontier)
    for k in range(max_path + 1):
        nxt = set()
        for state, red in frontier:
            if state in fsa.final and len(red) <= max_red:
                found.setdefault(Word(red), k)
            if k == max_path:
                continue
            for label, q in fsa.out[state]:
                if label is None:
                    continue
                new_red = _append_reduced(red, label)
                if len(new_red) > max_red + (max_path - k - 1):
                    continue
                for q2 in fsa.eps_closure([q]):
                    item = (q2, new_red)
                    if item not in seen:
                        seen.add(item)
                        nxt.add(item)
        frontier = nxt
    return found


def random_fsa(rng: random.Random, gens, max_states: int = 6, density: float = 1.6, eps: float = 0.1) -> Fsa:
    n = rng.randint(1, max_states)
    letters = [(g, s) for g in gens for s in (1, -1)]
    transitions = set()
    for p in range(n):
        for _ in range(rng.randint(0, round(2 * density))):
            transitions.add((p, rng.choice(letters), rng.randrange(n)))
        if rng.random() < eps:
            transitions.add((p, None, rng.randrange(n)))
    initial = [0]
    final = rng.sample(range(n), rng.randint(1, n))
    return Fsa.build(n, tuple(gens), sorted(transitions, key=repr), initial, final)


def reduced_words(gens, max_len: int) -> list:
    out = [Word()]
    layer = [()]
    letters = [(g, s) for g in gens for s in (1, -1)]
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for x in letters:
                if w and w[-1][0] == x[0] and w[-1][1] == -x[1]:
                    continue
                nxt.append(w + (x,))
        out.extend(Word(w) for w in nxt)
        layer = nxt
    return out


def subgroup_ball(gens, max_factors: int) -> set:
    """Reduced forms of products of at most max_factors generators or inverses."""
    from prefixmonoid.words import free_reduce, invert, product
    steps = list(gens) + [invert(g) for g in gens]
    out = {Word()}
    frontier = {Word()}
    for _ in range(max_factors):
        frontier = {free_reduce(product(w, s)) for w in frontier for s in steps} - out
        out |= frontier
    return out


def monoid_ball(gens, max_factors: int) -> set:
    from prefixmonoid.words import free_reduce, product
    out = {Word()}
    frontier = {Word()}
    for _ in range(max_factors):
        frontier = {free_reduce(product(w, s)) for w in frontier for s in gens} - out
        out |= frontier
    return out


# ----- finite permutation quotients --------------------------------------------------------

def perm_mul(p: tuple, q: tuple) -> tuple:
    """Apply p, then q."""
    return tuple(q[i] for i in p)


def perm_inv(p: tuple) -> tuple:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def perm_eval(w: Word, images: dict, n: int) -> tuple:
    cur = tuple(range(n))
    for g, s in w.letters:
        cur = perm_mul(cur, images[g] if s > 0 else perm_inv(images[g]))
    return cur


def quotients(gens, relators, n: int, count: int, rng: random.Random, fixed: dict | None = None) -> list:
    """Up to ``count`` random maps gens -> S_n killing every relator."""
    out = []
    for _ in range(count * 400):
        images = dict(fixed or {})
        for g in gens:
            if g not in images:
                p = list(range(n))
                rng.shuffle(p)
                images[g] = tuple(p)
        if all(perm_eval(r, images, n) == tuple(range(n)) for r in relators):
            out.append(images)
            if len(out) == count:
                break
    return out


# ----- shortest preimages under free reduction ---------------------------------------------

INF = float("inf")


def trivial_path_lengths(fsa: Fsa) -> list:
    """E[p][q]: fewest letters on a path p -> q whose label freely reduces to 1.

    Fixpoint of E(p,p) = 0, eps edges, E(p,q) <= E(p,r) + E(r,q) and
    E(p,q) <= 1 + E(p',q') + 1 for p -x-> p', q' -x^-1-> q.
    """
    n = fsa.n
    E = [[INF] * n for _ in range(n)]
    for p in range(n):
        E[p][p] = 0
    edges = [(p, label, q) for p in range(n) for label, q in fsa.out[p]]
    for p, label, q in edges:
        if label is None:
            E[p][q] = 0
    letters = [e for e in edges if e[1] is not None]
    changed = True
    while changed:
        changed = False
        for p, x, p2 in letters:
            for q2, y, q in letters:
                if y == (x[0], -x[1]) and E[p2][q2] + 2 < E[p][q]:
                    E[p][q] = E[p2][q2] + 2
                    changed = True
        for r in range(n):
            for p in range(n):
                if E[p][r] == INF:
                    continue
                for q in range(n):
                    if E[p][r] + E[r][q] < E[p][q]:
                        E[p][q] = E[p][r] + E[r][q]
                        changed = True
    return E


def shortest_preimage(fsa: Fsa, r: Word, E: list | None = None) -> float:
    """Length of the shortest accepted word that freely reduces to the reduced word r (inf if none)."""
    E = trivial_path_lengths(fsa) if E is None else E
    n = fsa.n
    dist = [INF] * n
    for s in fsa.initial:
        for q in range(n):
            dist[q] = min(dist[q], E[s][q])
    for letter in r.letters:
        nxt = [INF] * n
        for p in range(n):
            if dist[p] == INF:
                continue
            for label, q in fsa.out[p]:
                if label == letter:
                    for q2 in range(n):
                        nxt[q2] = min(nxt[q2], dist[p] + 1 + E[q][q2])
        dist = nxt
    return min((dist[f] for f in fsa.final), default=INF)


# ----- bounded product search with a caller-supplied prune -----------------------------------

def product_search(gens, model, target: Word, depth: int, viable=lambda w, depth: True):
    """Generator indices whose product equals ``target``, at most ``depth`` factors, else None.

    Peels generators off the left.  ``viable(rest, depth)`` may reject a
    remainder that can no longer be a product of ``depth`` generators; it must
    never reject a genuine one.
    """
    from prefixmonoid.words import free_reduce, invert, product
    inverses = [invert(g) for g in gens]
    dead = set()

    def go(w: Word, k: int):
        if model.is_trivial(w):
            return []
        if k == 0 or not viable(w, k):
            return None
        key = (model.invariant(w), k)
        if key in dead:
            return None
        for i, g in enumerate(inverses):
            got = go(free_reduce(product(g, w)), k - 1)
            if got is not None:
                return [i] + got
        dead.add(key)
        return None

    return go(free_reduce(target), depth)
