"""Submonoid membership in amalgamated free products.

``member_thmA`` reduces the query and tests every syllable against the
submonoid on its side; it needs A inside both submonoids.  ``member_thmB``
instead threads a chain of rational subsets of A through the syllables, so
it only needs free factors (rational sets, Stallings graphs, Herbst rewriting).
"""

from __future__ import annotations

from typing import Callable, Sequence

from .config import DEFAULT_LIMITS, Limits
from .errors import Unsupported
from .fsa import epsilon_fsa, fsa_concat, fsa_from_words, fsa_monoid, fsa_reverse_invert
from .groups import AmalgamHandle, FreeHandle, GroupHandle, SyllableForm
from .herbst import image_under_iso
from .rational import RationalSet, benois_reduce, compact, member, monoid_set
from .stallings import subgroup_intersect
from .words import Word, invert

ALL = "all"  # the whole factor lies in the submonoid


def submonoid_decider(handle: GroupHandle, gens, limits: Limits = DEFAULT_LIMITS) -> Callable[[Word], bool]:
    """Membership test for Mon<gens> inside ``handle``.

    ``gens`` may be a list of words (free handles only), ``ALL``, or a ready-made
    predicate.
    """
    if gens == ALL:
        return lambda w: True
    if callable(gens):
        return gens
    if isinstance(handle, FreeHandle):
        ms = monoid_set([handle.to_basis(g) for g in gens], handle.basis, limits)
        return lambda w: handle.to_basis(w) in ms
    raise Unsupported(f"no submonoid membership procedure for a {handle.kind} factor")


def a_inclusion_failures(spec: AmalgamHandle, MB, MC, limits: Limits = DEFAULT_LIMITS) -> list:
    """Generators of A (or their inverses) missing from either submonoid; empty means A is inside both."""
    in_b = submonoid_decider(spec.B, MB, limits)
    in_c = submonoid_decider(spec.C, MC, limits)
    bad = []
    for alpha, beta in zip(spec.A_in_B, spec.A_in_C):
        for w in (alpha, invert(alpha)):
            if not in_b(w):
                bad.append(("B", w))
        for w in (beta, invert(beta)):
            if not in_c(w):
                bad.append(("C", w))
    return bad


def member_thmA(spec: AmalgamHandle, MB, MC, query, limits: Limits = DEFAULT_LIMITS) -> bool:
    """Query lies in Mon<MB u MC> iff each syllable of its reduced form lies in its side's submonoid.

    Valid when A is contained in both submonoids (see ``a_inclusion_failures``).
    """
    form = spec.reduce_form(query)
    deciders = {"B": submonoid_decider(spec.B, MB, limits), "C": submonoid_decider(spec.C, MC, limits)}
    return all(deciders[side](w) for side, w in form.syllables)


# ----- Theorem B -------------------------------------------------------------------------

class _FreeSide:
    """Rational-set plumbing for one free factor, in its basis letters."""

    def __init__(self, spec: AmalgamHandle, side: str, gens: Sequence[Word], limits: Limits):
        self.handle: FreeHandle = spec.factor[side]
        self.alphabet = self.handle.basis
        self.sub = spec.sub[side]
        other = spec.factor["C" if side == "B" else "B"]
        self.targets = [other.to_basis(w) for w in spec.images[side]]
        basis_gens = [self.handle.to_basis(g) for g in gens]
        self.monoid, _ = fsa_monoid(basis_gens, self.alphabet)
        self.monoid = self.monoid.with_alphabet(self.alphabet)
        self.monoid_inv = fsa_reverse_invert(self.monoid)
        self.limits = limits

    def word_fsa(self, w: Word):
        return fsa_from_words([self.handle.to_basis(w)], self.alphabet).with_alphabet(self.alphabet)

    def step(self, q: RationalSet, syllable: Word) -> RationalSet:
        """(M_side)^-1 * q * syllable, intersected with A (still in this side's letters)."""
        f = fsa_concat(self.monoid_inv, q.automaton.over(self.alphabet), self.word_fsa(syllable))
        r = benois_reduce(f, self.limits)
        return compact(subgroup_intersect(r, self.sub.graph))

    def transport(self, q: RationalSet, other_alphabet) -> RationalSet:
        if q.is_empty():
            return RationalSet(fsa_from_words([], other_alphabet))
        img = image_under_iso(q, self.sub.graph, self.targets, other_alphabet, self.limits)
        return compact(RationalSet(img.automaton.over(other_alphabet)))


def q_chain(spec: AmalgamHandle, MB, MC, form: SyllableForm, limits: Limits = DEFAULT_LIMITS) -> list:
    """The sets Q_0, Q_1, ... for the alternating form (b1, c1, ..., bn, cn), each in its side's letters."""
    sides = {"B": _FreeSide(spec, "B", MB, limits), "C": _FreeSide(spec, "C", MC, limits)}
    parts = form.alternating()
    n = len(parts) // 2
    qs = [RationalSet(epsilon_fsa(sides["B"].alphabet))]
    current = qs[0]
    for k in range(n):
        qb = sides["B"].step(current, parts[2 * k])
        qs.append(qb)
        current = sides["B"].transport(qb, sides["C"].alphabet)
        if k == n - 1:
            qs[-1] = (qb, current)
            break
        qc = sides["C"].step(current, parts[2 * k + 1])
        qs.append(qc)
        current = sides["C"].transport(qc, sides["B"].alphabet)
    return qs


def member_thmB(spec: AmalgamHandle, MB: Sequence[Word], MC: Sequence[Word], query,
                limits: Limits = DEFAULT_LIMITS) -> bool:
    """Decide via the Q-chain: the last C-syllable must lie in Q_{2n-1}^-1 (M cap C)."""
    if not spec.coset_forms:
        raise Unsupported("the rational-set method needs free factors on both sides")
    form = spec.reduce_form(query)
    parts = form.alternating()
    qs = q_chain(spec, MB, MC, form, limits)
    _, last_q = qs[-1]
    side_c = _FreeSide(spec, "C", MC, limits)
    f = fsa_concat(fsa_reverse_invert(last_q.automaton.over(side_c.alphabet)), side_c.monoid)
    return member(benois_reduce(f, limits), spec.C.to_basis(parts[-1]))


def submonoid_member(spec: AmalgamHandle, gens: Sequence[Word], query, limits: Limits = DEFAULT_LIMITS) -> tuple:
    """Decide membership in Mon<gens>, each generator a word of one factor; returns (answer, method)."""
    MB, MC = [], []
    for g in gens:
        used = g.generators()
        if used <= set(spec.B.gens):
            MB.append(g)
        elif used <= set(spec.C.gens):
            MC.append(g)
        else:
            raise Unsupported(f"generator {g} mixes letters of both factors")
    try:
        failures = a_inclusion_failures(spec, MB, MC, limits)
    except Unsupported:
        failures = None
    if failures == []:
        return member_thmA(spec, MB, MC, query, limits), "theorem-A"
    if spec.coset_forms:
        return member_thmB(spec, MB, MC, query, limits), "theorem-B"
    raise Unsupported("A is not inside both submonoids and the factors are not both free")


__all__ = ["submonoid_member", "member_thmA", "member_thmB", "submonoid_decider", "a_inclusion_failures", "q_chain", "ALL"]
