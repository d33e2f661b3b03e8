"""Brute-force verification: breadth-first search over products of generators.

The search runs independently of the deciders.  It only needs a model handle
that answers ``invariant`` and ``is_trivial``; when the model's invariant is
not a complete normal form, elements sharing an invariant are told apart with
``is_trivial`` checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .config import DEFAULT_LIMITS, Limits
from .groups import GroupHandle
from .words import Word, free_reduce, invert, product


@dataclass
class OracleResult:
    found: bool
    witness: list | None = None  # generator indices, left to right
    explored: int = 0
    exhausted: bool = False  # True when the whole ball up to the bound was explored

    @property
    def answer(self) -> str:
        return "yes" if self.found else "not-found"


@dataclass
class Ball:
    """Distinct elements reachable as products of at most ``max_len`` generators."""

    gens: list
    model: GroupHandle
    max_len: int
    elements: dict = field(default_factory=dict)  # invariant -> list of (word, witness)
    explored: int = 0
    exhausted: bool = True

    def _bucket_find(self, bucket: list, w: Word):
        if self.model.canonical:
            return bucket[0] if bucket else None
        for item in bucket:
            if self.model.is_trivial(product(item[0], invert(w))):
                return item
        return None

    def lookup(self, w: Word):
        """Witness (list of generator indices) if ``w`` lies in the ball, else None."""
        bucket = self.elements.get(self.model.invariant(free_reduce(w)), [])
        hit = self._bucket_find(bucket, w)
        return None if hit is None else list(hit[1])

    def __len__(self) -> int:
        return sum(len(b) for b in self.elements.values())


def explore(gens: Sequence[Word], model: GroupHandle, max_len: int, limits: Limits = DEFAULT_LIMITS,
            target: Word | None = None) -> tuple:
    """Breadth-first enumeration by number of factors; stops early on ``target``.

    Returns (ball, witness-or-None).  Hitting ``limits.oracle_nodes`` candidate
    evaluations stops the search and marks the ball as not exhausted.
    """
    gens = [free_reduce(g) for g in gens]
    ball = Ball(gens, model, max_len)
    target_inv = None if target is None else model.invariant(free_reduce(target))

    def add(w: Word, wit: tuple):
        key = model.invariant(w)
        bucket = ball.elements.setdefault(key, [])
        if ball._bucket_find(bucket, w) is not None:
            return False
        bucket.append((w, wit))
        return True

    def hits(w: Word) -> bool:
        if target is None or model.invariant(w) != target_inv:
            return False
        return model.canonical or model.is_trivial(product(w, invert(target)))

    identity = Word()
    add(identity, ())
    if hits(identity):
        return ball, []
    frontier = [(identity, ())]
    for _ in range(max_len):
        nxt = []
        for w, wit in frontier:
            for i, g in enumerate(gens):
                if ball.explored >= limits.oracle_nodes:
                    ball.exhausted = False
                    return ball, None
                ball.explored += 1
                cand = product(w, g)
                if add(cand, wit + (i,)):
                    if hits(cand):
                        return ball, list(wit + (i,))
                    nxt.append((cand, wit + (i,)))
        frontier = nxt
        if not frontier:
            break
    return ball, None


def oracle_member(gens: Sequence[Word], model: GroupHandle, query: Word, max_len: int,
                  limits: Limits = DEFAULT_LIMITS) -> OracleResult:
    """Is ``query`` a product of at most ``max_len`` of the generators?"""
    model.check_word(query)
    ball, wit = explore(gens, model, max_len, limits, target=query)
    if wit is not None:
        return OracleResult(True, wit, ball.explored)
    return OracleResult(False, None, ball.explored, ball.exhausted)


def evaluate(gens: Sequence[Word], witness: Sequence[int]) -> Word:
    return product(*[gens[i] for i in witness]) if witness else Word()


__all__ = ["oracle_member", "explore", "Ball", "OracleResult", "evaluate"]
