"""Splitting a relator into invertible pieces.

Two algorithms: the Adjan overlap algorithm (run literally on sets of words)
and the Benois pieces algorithm, which cuts after a prefix ``p`` exactly when
``p^-1`` lies in the submonoid of the free group generated by the reduced
prefixes of ``w`` and ``w^-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .rational import monoid_set
from .words import Word, free_reduce, invert, is_cyclically_reduced, prefixes, product, sort_key


class FactorisationError(ValueError):
    pass


@dataclass(frozen=True)
class Factorisation:
    relator: Word
    cut_points: tuple
    kind: str = "user"
    certificates: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        cuts = self.cut_points
        if any(not 0 < k < len(self.relator) for k in cuts) or list(cuts) != sorted(set(cuts)):
            raise FactorisationError(f"bad cut points {cuts} for a word of length {len(self.relator)}")

    @property
    def pieces(self) -> list:
        bounds = [0, *self.cut_points, len(self.relator)]
        return [self.relator[bounds[i]:bounds[i + 1]] for i in range(len(bounds) - 1)]

    def __str__(self) -> str:
        return "(" + ")(".join(str(p) for p in self.pieces) + ")"

    @classmethod
    def from_pieces(cls, pieces: Iterable[Word], kind: str = "user") -> "Factorisation":
        pieces = list(pieces)
        if any(len(p) == 0 for p in pieces):
            raise FactorisationError("empty piece")
        cuts, pos = [], 0
        for p in pieces[:-1]:
            pos += len(p)
            cuts.append(pos)
        relator = Word(x for p in pieces for x in p.letters)
        return cls(relator, tuple(cuts), kind)


def trivial_factorisation(w: Word) -> Factorisation:
    return Factorisation(w, (), "user")


# ----- Adjan overlap ---------------------------------------------------------------------

def _adjan_step(current: frozenset) -> frozenset:
    nxt = set()
    words = list(current)
    for u in words:
        others = [v for v in words if v != u]
        if not any(v[:len(u)] == u or (len(u) <= len(v) and v[len(v) - len(u):] == u) for v in others):
            nxt.add(u)  # rule (i)
    for x in words:
        for y in words:
            # rule (ii): u is a prefix of x and a suffix of y, not both equal to u
            for k in range(1, min(len(x), len(y)) + 1):
                u = x[:k]
                if y[len(y) - k:] == u and (k < len(x) or k < len(y)):
                    nxt.add(u)
            # rule (iii): x = u v with v non-empty and v a prefix of y
            for k in range(1, len(x)):
                v = x[k:]
                if y[:len(v)] == v:
                    nxt.add(x[:k])
            # rule (iv): x = v' u with v' non-empty and v' a suffix of y
            for k in range(1, len(x)):
                vp = x[:k]
                if len(vp) <= len(y) and y[len(y) - k:] == vp:
                    nxt.add(x[k:])
    return frozenset(nxt)


def adjan_overlap(relators: Iterable[Word], max_rounds: int = 1000) -> set:
    """Iterate the four overlap rules from ``relators`` until the set repeats."""
    current = frozenset(relators)
    if any(len(w) == 0 for w in current):
        raise FactorisationError("relators must be non-empty")
    history = [current]
    for _ in range(max_rounds):
        nxt = _adjan_step(current)
        if nxt == current:
            return set(current)
        if nxt in history:
            raise FactorisationError("overlap rules cycle without stabilising")
        history.append(nxt)
        current = nxt
    raise FactorisationError("overlap rules did not stabilise")


def adjan_factorisation(w: Word) -> Factorisation:
    """Factorisation of ``w`` induced by the overlap set.

    Pieces are the overlap words other than ``w`` itself; ``w`` is tiled left
    to right preferring the longest piece, backtracking when stuck.  Without
    pieces, or without any tiling, the whole word is one piece.
    """
    gamma = adjan_overlap([w])
    pieces = sorted((p for p in gamma if p != w), key=lambda p: (-len(p), sort_key(p)))
    tiling = _tile(w, pieces) if pieces else None
    if not tiling:
        return Factorisation(w, (), "adjan")
    f = Factorisation.from_pieces(tiling, "adjan")
    return Factorisation(w, f.cut_points, "adjan")


def _tile(w: Word, pieces: list) -> list | None:
    memo: dict = {}

    def go(pos):
        if pos == len(w):
            return []
        if pos in memo:
            return memo[pos]
        memo[pos] = None
        for p in pieces:
            if w[pos:pos + len(p)] == p:
                rest = go(pos + len(p))
                if rest is not None:
                    memo[pos] = [p] + rest
                    break
        return memo[pos]

    return go(0)


# ----- Benois pieces ---------------------------------------------------------------------

def benois_generators(w: Word) -> list:
    """Reduced non-empty words of pref(w) and pref(w^-1), deduplicated."""
    out, seen = [], set()
    for p in prefixes(w) + prefixes(invert(w)):
        r = free_reduce(p)
        if r and r not in seen:
            seen.add(r)
            out.append(r)
    return out


def benois_pieces(w: Word) -> Factorisation:
    if len(w) == 0:
        raise FactorisationError("relator must be non-empty")
    gens = benois_generators(w)
    monoid = monoid_set(gens, w.generators())
    cuts = []
    certs = {}
    for k in range(1, len(w)):
        target = invert(w[:k])
        idx = monoid.factorise(target)
        if idx is not None:
            cuts.append(k)
            certs[k] = [gens[i] for i in idx]
    return Factorisation(w, tuple(cuts), "benois", certs)


def verify_certificates(f: Factorisation) -> bool:
    allowed = set(benois_generators(f.relator))
    for k, ws in f.certificates.items():
        if any(x not in allowed for x in ws):
            return False
        if product(*ws) != free_reduce(invert(f.relator[:k])):
            return False
    return True


def refines(finer: Factorisation, coarser: Factorisation) -> bool:
    if finer.relator != coarser.relator:
        raise FactorisationError("factorisations of different relators")
    return set(coarser.cut_points) <= set(finer.cut_points)


__all__ = [
    "Factorisation", "FactorisationError", "adjan_overlap", "adjan_factorisation", "benois_pieces",
    "benois_generators", "verify_certificates", "refines", "is_cyclically_reduced", "trivial_factorisation",
]
