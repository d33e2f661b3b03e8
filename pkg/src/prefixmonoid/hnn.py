"""Submonoid membership in HNN extensions over a free base.

``member_thmC`` handles submonoids generated by a subset of the base together
with t and t^-1.  ``member_thmD`` handles

    M = Mon< W0, W1 t, ..., Wd t^d, t W'1, ..., t^d W'd >

by splitting M into the sets D_m of elements with m letters t (the N-set
family below) and running a chain of rational subsets of the associated
subgroup through the syllables of the query.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .config import DEFAULT_LIMITS, Limits
from .errors import Unsupported
from .fsa import Fsa, epsilon_fsa, fsa_concat, fsa_from_words, fsa_monoid, fsa_reverse_invert
from .groups import FreeHandle, HnnHandle
from .herbst import image_under_iso
from .rational import RationalSet, benois_reduce, compact, member, monoid_set
from .stallings import subgroup_intersect
from .words import Word, free_reduce, invert, sort_key


def _free_base(spec: HnnHandle) -> FreeHandle:
    if not isinstance(spec.base, FreeHandle):
        raise Unsupported("rational-set methods need a free base group")
    return spec.base


# ----- Theorem C -------------------------------------------------------------------------

def ab_inclusion_failures(spec: HnnHandle, T_gens: Sequence[Word], limits: Limits = DEFAULT_LIMITS) -> list:
    base = _free_base(spec)
    ms = monoid_set([base.to_basis(g) for g in T_gens], base.basis, limits)
    bad = []
    for g in spec.A_gens + spec.B_gens:
        for w in (g, invert(g)):
            if base.to_basis(w) not in ms:
                bad.append(w)
    return bad


def member_thmC(spec: HnnHandle, T_gens: Sequence[Word], query, limits: Limits = DEFAULT_LIMITS) -> bool:
    """Membership in Mon<T_gens, t, t^-1>, assuming A and B lie in Mon<T_gens>."""
    base = _free_base(spec)
    ms = monoid_set([base.to_basis(g) for g in T_gens], base.basis, limits)
    form = spec.britton_reduce(query)
    return all(base.to_basis(g) in ms for g in form.syllables)


# ----- the N-set family ------------------------------------------------------------------

def count_sequences(m: int, d: int) -> int:
    """C_0 = 1 and C_m = sum over 1 <= mu <= min(d, m) of 2 C_{m-mu}."""
    counts = [1]
    for k in range(1, m + 1):
        counts.append(sum(2 * counts[k - mu] for mu in range(1, min(d, k) + 1)))
    return counts[m]


@dataclass(frozen=True)
class WSets:
    """The finite sets W0, W1..Wd and W'1..W'd (as tuples of words)."""

    w0: tuple
    w: tuple  # w[mu - 1] = W_mu
    w_prime: tuple  # w_prime[mu - 1] = W'_mu

    @classmethod
    def make(cls, w0, w: Mapping | Sequence = (), w_prime: Mapping | Sequence = (), d: int | None = None):
        def as_list(x):
            if isinstance(x, Mapping):
                top = max(x, default=0)
                return [x.get(mu, ()) for mu in range(1, top + 1)]
            return list(x)

        ws, wps = as_list(w), as_list(w_prime)
        d = max(len(ws), len(wps)) if d is None else d
        ws += [()] * (d - len(ws))
        wps += [()] * (d - len(wps))
        norm = lambda s: tuple(sorted({free_reduce(x) for x in s}, key=sort_key))
        return cls(norm(w0), tuple(norm(s) for s in ws), tuple(norm(s) for s in wps))

    @property
    def d(self) -> int:
        return len(self.w)

    def inverted(self) -> "WSets":
        """Sets for the mirrored monoid of the inversion identity."""
        inv = lambda s: tuple(invert(x) for x in s)
        return WSets.make(inv(self.w0), [inv(s) for s in self.w_prime], [inv(s) for s in self.w], self.d)


# A set in a sequence is described symbolically so sequences can share work:
#   ("mon",)            Mon<W0>
#   ("monW", mu)        Mon<W0> W_mu
#   ("one",)            {1}
#   ("pre", mu, inner)  W'_mu * inner
MON, ONE = ("mon",), ("one",)


@dataclass
class NSetFamily:
    m: int
    count: int  # C_m from the recursion
    sequences: tuple  # each a tuple of m+1 set descriptors
    builder: "NSetBuilder" = field(repr=False)

    def automaton(self, i: int, j: int) -> RationalSet:
        """N_{m,i}^{(j)} (j is 1-based) as a saturated rational set."""
        return self.builder.rational(self.sequences[j - 1][i])

    def nonempty(self) -> list:
        return [s for s in self.sequences if all(not self.builder.rational(x).is_empty() for x in s)]


class NSetBuilder:
    """Builds and memoizes the sequence family for one choice of W-sets."""

    def __init__(self, base: FreeHandle, wsets: WSets, limits: Limits = DEFAULT_LIMITS):
        self.base, self.wsets, self.limits = base, wsets, limits
        self.alphabet = base.basis
        self._families: dict = {}
        self._rational: dict = {}
        # Theorem D chain results, shared between queries (see member_thmD)
        self.chain_steps: dict = {}
        self.chain_finals: dict = {}
        self._lock = threading.Lock()

    def _words(self, ws) -> Fsa:
        return fsa_from_words([self.base.to_basis(x) for x in ws], self.alphabet).over(self.alphabet)

    def fsa(self, desc) -> Fsa:
        if desc == ONE:
            return epsilon_fsa(self.alphabet)
        mon = fsa_monoid([self.base.to_basis(x) for x in self.wsets.w0], self.alphabet)[0].over(self.alphabet)
        if desc == MON:
            return mon
        if desc[0] == "monW":
            return fsa_concat(mon, self._words(self.wsets.w[desc[1] - 1]))
        if desc[0] == "pre":
            return fsa_concat(self._words(self.wsets.w_prime[desc[1] - 1]), self.fsa(desc[2]))
        raise ValueError(f"unknown set descriptor {desc}")

    def rational(self, desc) -> RationalSet:
        got = self._rational.get(desc)
        if got is None:
            got = compact(benois_reduce(self.fsa(desc), self.limits))
            with self._lock:
                self._rational.setdefault(desc, got)
        return got

    def family(self, m: int) -> NSetFamily:
        got = self._families.get(m)
        if got is not None:
            return got
        d = self.wsets.d
        if m == 0:
            seqs = ((MON,),)
        else:
            out = []
            for mu in range(1, min(d, m) + 1):
                for tail in self.family(m - mu).sequences:
                    out.append((("monW", mu),) + (ONE,) * (mu - 1) + tail)
                for tail in self.family(m - mu).sequences:
                    out.append((MON,) + (ONE,) * (mu - 1) + (("pre", mu, tail[0]),) + tail[1:])
            seqs = tuple(out)
        fam = NSetFamily(m, count_sequences(m, d), seqs, self)
        with self._lock:
            self._families.setdefault(m, fam)
        return self._families[m]


def build_nsets(base: FreeHandle, wsets: WSets, m: int, limits: Limits = DEFAULT_LIMITS) -> NSetFamily:
    return NSetBuilder(base, wsets, limits).family(m)


# ----- Theorem D -------------------------------------------------------------------------

class _Chain:
    """Q-chain steps in basis letters of the base group."""

    def __init__(self, spec: HnnHandle, builder: NSetBuilder, limits: Limits):
        self.spec, self.builder, self.limits = spec, builder, limits
        self.base = builder.base
        self.alphabet = builder.alphabet
        self.graph_a = spec.sub_A.graph
        self.targets = [self.base.to_basis(v) for v in spec.B_gens]

    def step(self, q: RationalSet, desc, g: Word) -> RationalSet:
        n_inv = fsa_reverse_invert(self.builder.rational(desc).automaton.over(self.alphabet))
        g_fsa = fsa_from_words([self.base.to_basis(g)], self.alphabet).over(self.alphabet)
        r = benois_reduce(fsa_concat(n_inv, q.automaton.over(self.alphabet), g_fsa), self.limits)
        inside = subgroup_intersect(r, self.graph_a)
        if inside.is_empty():
            return RationalSet(fsa_from_words([], self.alphabet))
        img = image_under_iso(compact(inside), self.graph_a, self.targets, self.alphabet, self.limits)
        return compact(RationalSet(img.automaton.over(self.alphabet)))

    def final(self, q: RationalSet, desc, g: Word) -> bool:
        f = fsa_concat(fsa_reverse_invert(q.automaton.over(self.alphabet)),
                       self.builder.rational(desc).automaton.over(self.alphabet))
        return member(benois_reduce(f, self.limits), self.base.to_basis(g))


def member_thmD(spec: HnnHandle, wsets: WSets, query, limits: Limits = DEFAULT_LIMITS,
                builder: NSetBuilder | None = None) -> bool:
    """Membership of the query in Mon<W0, W_mu t^mu, t^mu W'_mu>.

    Chain steps are memoized on the builder, keyed by (Q-set, descriptor,
    syllable): a step depends on nothing else, so sequences and later queries
    reaching equal sets (same minimal automaton) share the work.
    """
    base = _free_base(spec)
    form = spec.britton_reduce(query)
    if any(e < 0 for e in form.signs):
        return False
    n = len(form.signs)
    builder = builder or NSetBuilder(base, wsets, limits)
    chain = _Chain(spec, builder, limits)
    g = [base.to_basis(x) for x in form.syllables]
    tag = (spec.t, tuple(spec.A_gens), tuple(spec.B_gens))
    steps, finals = builder.chain_steps, builder.chain_finals
    start = RationalSet(epsilon_fsa(chain.alphabet))
    for seq in builder.family(n).sequences:
        q, key = start, "start"
        for i in range(n):
            memo_key = (tag, key, seq[i], g[i])
            if memo_key not in steps:
                q2 = chain.step(q, seq[i], form.syllables[i])
                steps[memo_key] = (q2, None if q2.is_empty() else q2.automaton.to_text())
            q, key = steps[memo_key]
            if key is None:
                break
        if key is None:
            continue
        final_key = (tag, key, seq[n], g[n])
        if final_key not in finals:
            finals[final_key] = chain.final(q, seq[n], form.syllables[n])
        if finals[final_key]:
            return True
    return False


def member_thmD_inverted(spec: HnnHandle, wsets: WSets, query, limits: Limits = DEFAULT_LIMITS,
                         builder: NSetBuilder | None = None) -> bool:
    """Membership in Mon<W0, W_mu t^-mu, t^-mu W'_mu>, via the inversion identity.

    ``builder``, if given, must be built for ``wsets.inverted()``.
    """
    return member_thmD(spec, wsets.inverted(), invert(query), limits, builder)


# ----- generating-set dispatch ------------------------------------------------------------

def _t_shape(w: Word, t) -> tuple:
    """(left, power, right) with w = left t^power right and left, right t-free; None otherwise."""
    letters = w.letters
    pos = [i for i, (g, _) in enumerate(letters) if g == t]
    if not pos:
        return w, 0, Word()
    lo, hi = pos[0], pos[-1]
    signs = {letters[i][1] for i in pos}
    if hi - lo + 1 != len(pos) or len(signs) != 1:
        return None
    return w[:lo], signs.pop() * len(pos), w[hi + 1:]


def submonoid_member(spec: HnnHandle, gens: Sequence[Word], query, limits: Limits = DEFAULT_LIMITS) -> tuple:
    """Decide membership in Mon<gens>; returns (answer, method).

    Generators must each be a base word, ``b t^k`` or ``t^k b`` with one sign of k
    throughout, or the set must be base words plus both t and t^-1.
    """
    t = spec.t
    gens = [free_reduce(g) for g in gens]
    tt, ti = Word([(t, 1)]), Word([(t, -1)])
    if tt in gens and ti in gens:
        rest = [g for g in gens if not g.generators() & {t}]
        if len(rest) + 2 == len(set(gens)):
            if ab_inclusion_failures(spec, rest, limits):
                raise Unsupported("generators include t and t^-1 but A, B are not inside the base submonoid")
            return member_thmC(spec, rest, query, limits), "theorem-C"
    shapes = [_t_shape(g, t) for g in gens]
    if any(s is None for s in shapes):
        raise Unsupported("a generator has t-letters split by base letters; only W t^k and t^k W' shapes are handled")
    signs = {1 if k > 0 else -1 for _, k, _ in shapes if k}
    if len(signs) > 1:
        raise Unsupported("mixed generating set: generators use both t and t^-1, "
                          "which the rational-set method cannot handle")
    negative = signs == {-1}
    w0, w, wp = [], {}, {}
    for left, k, right in shapes:
        mu = abs(k)
        if mu == 0:
            w0.append(left)
        elif not right:
            w.setdefault(mu, []).append(left)
        elif not left:
            wp.setdefault(mu, []).append(right)
        else:
            raise Unsupported("a generator has base letters on both sides of its t-power")
    wsets = WSets.make(w0, w, wp)
    if negative:
        return member_thmD_inverted(spec, wsets, query, limits), "theorem-D-inverted"
    return member_thmD(spec, wsets, query, limits), "theorem-D"


__all__ = [
    "submonoid_member", "member_thmC", "member_thmD", "member_thmD_inverted", "build_nsets", "NSetBuilder", "NSetFamily",
    "WSets", "count_sequences", "ab_inclusion_failures",
]
