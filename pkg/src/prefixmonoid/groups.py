"""Group handles: the word problem and subgroup membership for supported groups.

A handle knows its generators and answers ``is_trivial``.  ``subgroup(gens)``
returns an object whose ``member(w)`` gives a witness word over ``y{i}``
(the i-th listed generator) or None.  ``invariant(w)`` is hashable and equal
for equal elements; when ``canonical`` is set it is a complete normal form.

``one_relator_handle`` turns a one-relator presentation into a handle when it
falls into one of the shapes handled here: free (a letter occurring once),
cyclic, a free product with a free factor, cyclically pinched, conjugacy
pinched, or an HNN extension over a free base obtained from the stable-letter
rewriting, possibly after a change of variables that makes an exponent sum zero.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

from .errors import Unsupported
from .stallings import stallings, subgroup_member, y_gen
from .words import (
    Word,
    cyclic_reduce,
    exponent_sum,
    free_reduce,
    gen_key,
    gen_name,
    invert,
    occurrences,
    product,
    rho,
    substitute,
)

CAPABILITIES = ("word-problem", "A-membership", "express-in-generators", "rational-intersection")


def _power(letter_gen, k: int) -> Word:
    return Word([(letter_gen, 1 if k > 0 else -1)] * abs(k))


class GroupHandle:
    kind = "abstract"
    gens: tuple = ()
    relators: tuple = ()
    canonical = False

    @property
    def capabilities(self) -> frozenset:
        return frozenset({"word-problem"})

    def check_word(self, w: Word) -> None:
        extra = w.generators() - set(self.gens)
        if extra:
            names = ", ".join(sorted(str(g) for g in extra))
            raise ValueError(f"letters outside the group's alphabet: {names}")

    def is_trivial(self, w: Word) -> bool:
        raise NotImplementedError

    def equal(self, u: Word, v: Word) -> bool:
        return self.is_trivial(product(u, invert(v)))

    def invariant(self, w: Word):
        raise NotImplementedError

    def subgroup(self, gens: Sequence[Word]):
        gens = [free_reduce(g) for g in gens]
        if not gens:
            return TrivialSubgroup(self)
        if len(gens) == 1 and self.relators is not None:
            return AbelianCyclicSubgroup(self, gens[0])
        raise Unsupported(f"subgroup membership is unavailable in a {self.kind} handle")


class TrivialSubgroup:
    def __init__(self, handle: GroupHandle):
        self.handle = handle
        self.gens: list = []

    def member(self, w: Word):
        return Word() if self.handle.is_trivial(w) else None


# ----- free groups -----------------------------------------------------------------------

class FreeHandle(GroupHandle):
    """Free group on ``basis``; any other generator is an explicit word in the basis."""

    canonical = True

    def __init__(self, gens: Iterable, basis: Iterable | None = None, images: Mapping | None = None,
                 relators: Sequence[Word] = ()):
        self.gens = tuple(gens)
        self.basis = tuple(self.gens if basis is None else basis)
        self.images = {g: free_reduce(w) for g, w in (images or {}).items()}
        self.relators = tuple(relators)
        self.kind = "one-relator-free-detected" if self.images or self.relators else "free"
        missing = set(self.gens) - set(self.basis) - set(self.images)
        if missing:
            raise ValueError(f"generators without a basis image: {sorted(map(str, missing))}")

    @property
    def capabilities(self) -> frozenset:
        return frozenset(CAPABILITIES)

    def to_basis(self, w: Word) -> Word:
        if not self.images:
            return free_reduce(w)
        out = []
        for g, e in w.letters:
            if g in self.images:
                img = self.images[g]
                out.extend(img.letters if e > 0 else invert(img).letters)
            else:
                out.append((g, e))
        return free_reduce(Word(out))

    def is_trivial(self, w: Word) -> bool:
        return not self.to_basis(w)

    def invariant(self, w: Word):
        return self.to_basis(w)

    def subgroup(self, gens: Sequence[Word]):
        return FreeSubgroup(self, gens)


class FreeSubgroup:
    def __init__(self, handle: FreeHandle, gens: Sequence[Word]):
        self.handle = handle
        self.gens = [free_reduce(g) for g in gens]
        self.basis_gens = [handle.to_basis(g) for g in self.gens]
        self.graph = stallings(self.basis_gens, handle.basis)
        self._half = self.graph.half_edges()
        self._tree = self._spanning_paths()

    def _spanning_paths(self) -> dict:
        paths = {self.graph.basepoint: Word()}
        queue = deque([self.graph.basepoint])
        ordered = sorted(self._half.items(), key=lambda kv: (kv[0][0], gen_key(kv[0][1][0]), kv[0][1][1]))
        by_vertex: dict = {}
        for (v, letter), (target, _) in ordered:
            by_vertex.setdefault(v, []).append((letter, target))
        while queue:
            v = queue.popleft()
            for letter, target in by_vertex.get(v, ()):
                if target not in paths:
                    paths[target] = paths[v] + Word([letter])
                    queue.append(target)
        return paths

    def member(self, w: Word):
        return subgroup_member(self.graph, self.handle.to_basis(w))

    def member_basis(self, b: Word):
        return subgroup_member(self.graph, b)

    def right_rep_basis(self, b: Word) -> Word:
        """Canonical representative (in basis letters) of the coset A*b."""
        b = free_reduce(b)
        v, pos = self.graph.basepoint, 0
        while pos < len(b):
            step = self._half.get((v, b.letters[pos]))
            if step is None:
                break
            v = step[0]
            pos += 1
        return free_reduce(self._tree[v] + b[pos:])


# ----- cyclic groups ---------------------------------------------------------------------

class CyclicHandle(GroupHandle):
    kind = "cyclic"
    canonical = True

    def __init__(self, z, order: int, relators: Sequence[Word] | None = None):
        if order < 1:
            raise ValueError("order must be positive")
        self.z, self.order = z, order
        self.gens = (z,)
        self.relators = tuple(relators) if relators is not None else (_power(z, order),)

    @property
    def capabilities(self) -> frozenset:
        return frozenset({"word-problem", "A-membership", "express-in-generators"})

    def exponent(self, w: Word) -> int:
        return exponent_sum(w, self.z) % self.order

    def is_trivial(self, w: Word) -> bool:
        return self.exponent(w) == 0

    def invariant(self, w: Word):
        return self.exponent(w)

    def subgroup(self, gens: Sequence[Word]):
        return CyclicSubgroup(self, gens)


class CyclicSubgroup:
    def __init__(self, handle: CyclicHandle, gens: Sequence[Word]):
        self.handle = handle
        self.gens = list(gens)
        n = handle.order
        steps = []
        for i, g in enumerate(gens):
            k = handle.exponent(g)
            steps.append((k, Word([(y_gen(i + 1), 1)])))
            steps.append(((-k) % n, Word([(y_gen(i + 1), -1)])))
        # breadth-first over residues gives a short witness for every reachable residue
        self.witness = {0: Word()}
        queue = deque([0])
        while queue:
            r = queue.popleft()
            for k, y in steps:
                s = (r + k) % n
                if s not in self.witness:
                    self.witness[s] = self.witness[r] + y
                    queue.append(s)
        self.step = gcd(n, *[handle.exponent(g) for g in gens]) if gens else n

    def member(self, w: Word):
        return self.witness.get(self.handle.exponent(w))


# ----- abelianization-based membership in a cyclic subgroup ------------------------------

def _abelian_vector(w: Word, index: dict) -> list:
    v = [0] * len(index)
    for g, e in w.letters:
        v[index[g]] += e
    return v


def abelian_power_solve(gens: Sequence, relators: Sequence[Word], g: Word, z: Word) -> int | None:
    """The unique k with ab(g) = k*ab(z) modulo the relator lattice, if it exists.

    Relators with a unit coefficient are eliminated first; afterwards at most
    one relator may remain.  Raises Unsupported when k is not determined.
    """
    index = {x: i for i, x in enumerate(gens)}
    target = _abelian_vector(g, index)
    direction = _abelian_vector(z, index)
    rels = [_abelian_vector(r, index) for r in relators]
    rels = [r for r in rels if any(r)]
    while len(rels) > 1:
        pivot = None
        for ri, r in enumerate(rels):
            for ci, c in enumerate(r):
                if abs(c) == 1:
                    pivot = (ri, ci)
                    break
            if pivot:
                break
        if pivot is None:
            raise Unsupported("abelianization has no unit pivot for eliminating relators")
        ri, ci = pivot
        r = rels.pop(ri)
        c = r[ci]

        def eliminate(v):
            f = v[ci] * c  # c is +-1, so this is v[ci] / c
            return [a - f * b for a, b in zip(v, r)]

        rels = [x for x in (eliminate(x) for x in rels) if any(x)]
        target, direction = eliminate(target), eliminate(direction)
    rel = rels[0] if rels else [0] * len(index)
    if not any(direction):
        raise Unsupported("the cyclic generator vanishes in the abelianization")
    if not any(rel):
        return _ratio(target, direction)
    # is rel a multiple of direction?
    dets = [(i, j) for i in range(len(rel)) for j in range(i + 1, len(rel))
            if direction[i] * rel[j] - direction[j] * rel[i] != 0]
    if not dets:
        raise Unsupported("relator abelianizes onto the cyclic subgroup; the power is not determined")
    i, j = dets[0]
    det = direction[i] * rel[j] - direction[j] * rel[i]
    k = Fraction(target[i] * rel[j] - target[j] * rel[i], det)
    m = Fraction(direction[i] * target[j] - direction[j] * target[i], det)
    if k.denominator != 1 or m.denominator != 1:
        return None
    k, m = int(k), int(m)
    if any(a != k * b + m * c for a, b, c in zip(target, direction, rel)):
        return None
    return k


def _ratio(target: list, direction: list) -> int | None:
    k = None
    for a, b in zip(target, direction):
        if b == 0:
            if a != 0:
                return None
            continue
        if a % b:
            return None
        if k is None:
            k = a // b
        elif k != a // b:
            return None
    return k


def _hermite_rows(rows: list) -> list:
    """Integer row echelon basis of the lattice spanned by ``rows``, pivots positive."""
    rows = [list(r) for r in rows if any(r)]
    out = []
    col = 0
    width = len(rows[0]) if rows else 0
    while rows and col < width:
        live = [r for r in rows if r[col]]
        if not live:
            col += 1
            continue
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            head = live[0]
            nxt = [head]
            for r in live[1:]:
                q = r[col] // head[col]
                r = [a - q * b for a, b in zip(r, head)]
                if any(r):
                    nxt.append(r)
            rows = [r for r in rows if not r[col]] + nxt
            live = [r for r in nxt if r[col]]
        head = live[0]
        if head[col] < 0:
            head = [-a for a in head]
        out.append((col, head))
        rows = [r for r in rows if not r[col] and any(r)]
        col += 1
    return out


class AbelianClass:
    """Image of a word in the abelianization Z^n / <relator vectors>, as a canonical vector."""

    def __init__(self, gens: Sequence, relators: Sequence[Word]):
        self.index = {x: i for i, x in enumerate(gens)}
        self.rows = _hermite_rows([_abelian_vector(r, self.index) for r in relators])

    def __call__(self, w: Word) -> tuple:
        v = _abelian_vector(w, self.index)
        for col, row in self.rows:
            q = v[col] // row[col]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return tuple(v)


class AbelianCyclicSubgroup:
    """Membership in a cyclic subgroup <z> using the abelianization to find the power."""

    def __init__(self, handle: GroupHandle, z: Word):
        self.handle = handle
        self.gens = [z]
        self.z = z

    def member(self, w: Word):
        h = self.handle
        k = abelian_power_solve(h.gens, h.relators, w, self.z)
        if k is None:
            return None
        if not h.is_trivial(product(w, invert(self.z ** k if k >= 0 else invert(self.z) ** -k))):
            return None
        return _power(y_gen(1), k)


# ----- amalgamated free products ---------------------------------------------------------

@dataclass(frozen=True)
class SyllableForm:
    syllables: tuple  # ((side, Word), ...) with side in {"B", "C"}, sides alternating
    reduced_flag: bool = False

    def alternating(self) -> list:
        """(u1, v1, ..., uk, vk) starting on the B side, padding with empty words."""
        out = []
        expect = "B"
        for side, w in self.syllables:
            if side != expect:
                out.append(Word())
                expect = "C" if expect == "B" else "B"
            out.append(w)
            expect = "C" if expect == "B" else "B"
        if len(out) % 2:
            out.append(Word())
        return out

    def word(self) -> Word:
        return Word(x for _, w in self.syllables for x in w.letters)

    def __len__(self) -> int:
        return len(self.syllables)

    def __str__(self) -> str:
        return " | ".join(f"{s}:{w}" for s, w in self.syllables) or "B:1"


class AmalgamHandle(GroupHandle):
    kind = "amalgam"

    def __init__(self, B: GroupHandle, C: GroupHandle, A_in_B: Sequence[Word], A_in_C: Sequence[Word],
                 relators: Sequence[Word] | None = None):
        if len(A_in_B) != len(A_in_C):
            raise ValueError("amalgamation lists have unequal lengths")
        clash = set(B.gens) & set(C.gens)
        if clash:
            raise ValueError(f"factors share generators: {sorted(map(str, clash))}")
        self.B, self.C = B, C
        self.A_in_B = [free_reduce(w) for w in A_in_B]
        self.A_in_C = [free_reduce(w) for w in A_in_C]
        for w in self.A_in_B:
            B.check_word(w)
        for w in self.A_in_C:
            C.check_word(w)
        self.gens = B.gens + C.gens
        self.relators = tuple(relators) if relators is not None else None
        self.sub = {"B": B.subgroup(self.A_in_B), "C": C.subgroup(self.A_in_C)}
        self.factor = {"B": B, "C": C}
        self.images = {"B": self.A_in_C, "C": self.A_in_B}  # targets when crossing from that side
        self._side = {g: "B" for g in B.gens}
        self._side.update({g: "C" for g in C.gens})
        self.trivial_A = not any(self.A_in_B)
        self.coset_forms = all(isinstance(f, FreeHandle) for f in (B, C))
        self.canonical = (self.trivial_A and B.canonical and C.canonical) or self.coset_forms
        self._abelian = None

    @property
    def capabilities(self) -> frozenset:
        caps = {"word-problem", "A-membership", "express-in-generators"}
        if self.coset_forms:
            caps.add("rational-intersection")
        return frozenset(caps)

    def side_of(self, gen) -> str:
        return self._side[gen]

    def syllables(self, w: Word) -> list:
        out: list = []
        for letter in w.letters:
            side = self._side.get(letter[0])
            if side is None:
                raise ValueError(f"letter {letter} is in neither factor")
            if out and out[-1][0] == side:
                out[-1][1].append(letter)
            else:
                out.append((side, [letter]))
        return [(s, free_reduce(Word(ls))) for s, ls in out]

    def cross(self, side: str, w: Word) -> Word | None:
        """If ``w`` lies in A on ``side``, the same element written on the other side."""
        wit = self.sub[side].member(w)
        if wit is None:
            return None
        targets = self.images[side]
        return free_reduce(substitute(wit, {y_gen(i + 1): t for i, t in enumerate(targets)}))

    def reduce_form(self, w) -> SyllableForm:
        syl = list(w.syllables) if isinstance(w, SyllableForm) else self.syllables(w)
        syl = [(s, free_reduce(x)) for s, x in syl]
        changed = True
        while changed:
            changed = False
            for i, (side, x) in enumerate(syl):
                if self.factor[side].is_trivial(x):
                    syl = self._remove(syl, i)
                    changed = True
                    break
            if changed or len(syl) < 2:
                continue
            for i, (side, x) in enumerate(syl):
                img = self.cross(side, x)
                if img is None:
                    continue
                other = "C" if side == "B" else "B"
                if i > 0:
                    syl[i - 1] = (other, free_reduce(syl[i - 1][1] + img))
                else:
                    syl[i + 1] = (other, free_reduce(img + syl[i + 1][1]))
                syl = self._remove(syl, i)
                changed = True
                break
        if not syl:
            syl = [("B", Word())]
        elif len(syl) == 1 and syl[0][0] == "C":
            img = self.cross("C", syl[0][1])
            if img is not None:
                syl = [("B", img)]
        return SyllableForm(tuple(syl), True)

    @staticmethod
    def _remove(syl: list, i: int) -> list:
        """Drop syllable i and fuse the neighbours it separated."""
        out = syl[:i] + syl[i + 1:]
        if 0 < i < len(syl) - 1:
            left, right = out[i - 1], out[i]
            out[i - 1:i + 1] = [(left[0], free_reduce(left[1] + right[1]))]
        return out

    def is_trivial(self, w: Word) -> bool:
        f = self.reduce_form(w)
        return len(f) == 1 and self.factor[f.syllables[0][0]].is_trivial(f.syllables[0][1])

    def invariant(self, w: Word):
        f = self.reduce_form(w)
        if self.trivial_A and self.B.canonical and self.C.canonical:
            return tuple((s, self.factor[s].invariant(x)) for s, x in f.syllables)
        if self.coset_forms:
            return self._coset_form(f)
        sides = tuple(s for s, _ in f.syllables)
        if self.relators is None:
            return sides
        if self._abelian is None:
            self._abelian = AbelianClass(self.gens, self.relators)
        return sides, self._abelian(w)

    def _coset_form(self, f: SyllableForm) -> tuple:
        out = []
        carry = Word()
        syl = f.syllables
        for i in range(len(syl) - 1, -1, -1):
            side, x = syl[i]
            fac = self.factor[side]
            cur = free_reduce(fac.to_basis(x) + carry)
            if i == 0:
                out.append((side, cur))
                break
            sub = self.sub[side]
            rep = sub.right_rep_basis(cur)
            a = free_reduce(cur + invert(rep))
            wit = sub.member_basis(a)
            other = "C" if side == "B" else "B"
            targets = self.images[side]
            carry = self.factor[other].to_basis(substitute(wit, {y_gen(j + 1): t for j, t in enumerate(targets)}))
            out.append((side, rep))
        return tuple(reversed(out))

    def subgroup(self, gens: Sequence[Word]):
        gens = [free_reduce(g) for g in gens]
        if not gens:
            return TrivialSubgroup(self)
        if len(gens) == 1 and self.relators is not None:
            return AbelianCyclicSubgroup(self, gens[0])
        raise Unsupported("subgroup membership in an amalgam is only available for cyclic subgroups")


def free_product(B: GroupHandle, C: GroupHandle, relators: Sequence[Word] | None = None) -> AmalgamHandle:
    return AmalgamHandle(B, C, [], [], relators)


# ----- HNN extensions --------------------------------------------------------------------

@dataclass(frozen=True)
class BrittonForm:
    syllables: tuple  # g0, g1, ..., gn (base words)
    signs: tuple  # e1, ..., en
    reduced_flag: bool = False

    def word(self, t) -> Word:
        out = list(self.syllables[0].letters)
        for e, g in zip(self.signs, self.syllables[1:]):
            out.append((t, e))
            out.extend(g.letters)
        return Word(out)

    def __str__(self) -> str:
        parts = [str(self.syllables[0])]
        for e, g in zip(self.signs, self.syllables[1:]):
            parts.append("t" if e > 0 else "T")
            parts.append(str(g))
        return " ".join(parts)


class HnnHandle(GroupHandle):
    """Base group with stable letter ``t`` and t^-1 A_gens[i] t = B_gens[i]."""

    kind = "hnn"

    def __init__(self, base: GroupHandle, t, A_gens: Sequence[Word], B_gens: Sequence[Word],
                 relators: Sequence[Word] | None = None):
        if len(A_gens) != len(B_gens):
            raise ValueError("associated subgroup lists have unequal lengths")
        if t in base.gens:
            raise ValueError(f"stable letter {t} clashes with a base generator")
        self.base, self.t = base, t
        self.A_gens = [free_reduce(w) for w in A_gens]
        self.B_gens = [free_reduce(w) for w in B_gens]
        for w in self.A_gens + self.B_gens:
            base.check_word(w)
        self.gens = base.gens + (t,)
        self.relators = tuple(relators) if relators is not None else None
        self.sub_A = base.subgroup(self.A_gens)
        self.sub_B = base.subgroup(self.B_gens)
        self.canonical = isinstance(base, FreeHandle)

    @property
    def capabilities(self) -> frozenset:
        caps = {"word-problem", "A-membership", "express-in-generators"}
        if isinstance(self.base, FreeHandle):
            caps.add("rational-intersection")
        return frozenset(caps)

    def phi(self, a: Word) -> Word | None:
        wit = self.sub_A.member(a)
        if wit is None:
            return None
        return free_reduce(substitute(wit, {y_gen(i + 1): v for i, v in enumerate(self.B_gens)}))

    def phi_inverse(self, b: Word) -> Word | None:
        wit = self.sub_B.member(b)
        if wit is None:
            return None
        return free_reduce(substitute(wit, {y_gen(i + 1): u for i, u in enumerate(self.A_gens)}))

    def split(self, w: Word) -> tuple:
        syl, signs, cur = [], [], []
        for g, e in w.letters:
            if g == self.t:
                syl.append(free_reduce(Word(cur)))
                signs.append(e)
                cur = []
            else:
                cur.append((g, e))
        syl.append(free_reduce(Word(cur)))
        return syl, signs

    def britton_reduce(self, w) -> BrittonForm:
        if isinstance(w, BrittonForm):
            syl_in, signs_in = list(w.syllables), list(w.signs)
        else:
            syl_in, signs_in = self.split(w)
        syl = [syl_in[0]]
        signs: list = []
        for e, g in zip(signs_in, syl_in[1:]):
            if signs and signs[-1] == -e:
                mid = syl[-1]
                img = self.phi(mid) if signs[-1] < 0 else self.phi_inverse(mid)
                if img is not None:
                    signs.pop()
                    syl.pop()
                    syl[-1] = free_reduce(syl[-1] + img + g)
                    continue
            signs.append(e)
            syl.append(g)
        return BrittonForm(tuple(syl), tuple(signs), True)

    def is_trivial(self, w: Word) -> bool:
        f = self.britton_reduce(w)
        return not f.signs and self.base.is_trivial(f.syllables[0])

    def invariant(self, w: Word):
        f = self.britton_reduce(w)
        if not isinstance(self.base, FreeHandle):
            return f.signs
        base = self.base
        out = []
        carry = Word()
        for i in range(len(f.signs), 0, -1):
            cur = free_reduce(base.to_basis(f.syllables[i]) + carry)
            # t^-1 a = phi(a) t^-1 and t b = phi^-1(b) t
            sub, targets = (self.sub_A, self.B_gens) if f.signs[i - 1] < 0 else (self.sub_B, self.A_gens)
            rep = sub.right_rep_basis(cur)
            wit = sub.member_basis(free_reduce(cur + invert(rep)))
            carry = base.to_basis(substitute(wit, {y_gen(j + 1): v for j, v in enumerate(targets)}))
            out.append(rep)
        out.append(free_reduce(base.to_basis(f.syllables[0]) + carry))
        return f.signs, tuple(reversed(out))


# ----- renamed generators ----------------------------------------------------------------

class TranslatedHandle(GroupHandle):
    """A handle seen through a substitution of its generators."""

    def __init__(self, inner: GroupHandle, gens: Iterable, images: Mapping, relators: Sequence[Word] | None = None):
        self.inner = inner
        self.gens = tuple(gens)
        self.images = {g: free_reduce(w) for g, w in images.items()}
        for g in self.gens:
            if g not in self.images:
                if g not in inner.gens:
                    raise ValueError(f"generator {g} has no image")
                self.images[g] = Word([(g, 1)])
        self.relators = tuple(relators) if relators is not None else None
        self.kind = inner.kind
        self.canonical = inner.canonical

    @property
    def capabilities(self) -> frozenset:
        return self.inner.capabilities

    def translate(self, w: Word) -> Word:
        return free_reduce(substitute(w, self.images))

    def is_trivial(self, w: Word) -> bool:
        return self.inner.is_trivial(self.translate(w))

    def invariant(self, w: Word):
        return self.inner.invariant(self.translate(w))

    def subgroup(self, gens: Sequence[Word]):
        gens = [free_reduce(g) for g in gens]
        if isinstance(self.inner, (FreeHandle, CyclicHandle)) or not gens:
            inner_sub = self.inner.subgroup([self.translate(g) for g in gens])
            return _TranslatedSubgroup(self, inner_sub, gens)
        return super().subgroup(gens)


class _TranslatedSubgroup:
    def __init__(self, handle: TranslatedHandle, inner_sub, gens):
        self.handle, self.inner_sub, self.gens = handle, inner_sub, gens

    def member(self, w: Word):
        return self.inner_sub.member(self.handle.translate(w))


def unwrap(handle: GroupHandle) -> tuple:
    """(inner handle, substitution into its letters) for translated handles."""
    images: dict = {}
    while isinstance(handle, TranslatedHandle):
        if images:
            images = {g: free_reduce(substitute(w, handle.images)) for g, w in images.items()}
        else:
            images = dict(handle.images)
        handle = handle.inner
    return handle, images


def as_free(handle: GroupHandle) -> FreeHandle | None:
    """A translated free group flattened into a single FreeHandle (None if not free)."""
    inner, images = unwrap(handle)
    if not isinstance(inner, FreeHandle):
        return None
    if inner is handle:
        return handle
    flat = {g: inner.to_basis(images.get(g, Word([(g, 1)]))) for g in handle.gens}
    return FreeHandle(handle.gens, inner.basis, flat, handle.relators or ())


# ----- one-relator presentations ---------------------------------------------------------

MAX_DEPTH = 8


def single_occurrence_letters(w: Word) -> list:
    return [g for g in sorted(w.generators(), key=gen_key) if occurrences(w, g) == 1]


def tietze_free(gens: Sequence, relator: Word, x) -> FreeHandle:
    """Eliminate ``x`` (occurring once in ``relator``): P x^e S = 1 gives x = (P^-1 S^-1)^e."""
    pos = next(i for i, (g, _) in enumerate(relator.letters) if g == x)
    e = relator.letters[pos][1]
    image = product(invert(relator[:pos]), invert(relator[pos + 1:]))
    if e < 0:
        image = invert(image)
    basis = [g for g in gens if g != x]
    return FreeHandle(gens, basis, {x: image}, (relator,))


def rotations(w: Word) -> list:
    return [w[k:] + w[:k] for k in range(len(w))]


def pinch_split(w: Word):
    """(u, v) with w = u v^-1 and u, v on disjoint non-empty alphabets, trying rotations."""
    for r in rotations(w):
        for k in range(1, len(r)):
            u, rest = r[:k], r[k:]
            if not (u.generators() & rest.generators()):
                return r, u, invert(rest)
    return None


def conjugacy_split(w: Word):
    """(t, u, v) with a rotation of w equal to t^-1 u t v^-1, u and v non-empty and t-free."""
    for t in sorted(w.generators(), key=gen_key):
        if occurrences(w, t) != 2 or exponent_sum(w, t) != 0:
            continue
        for r in rotations(w):
            if r.letters[0] != (t, -1):
                continue
            j = next(i for i in range(1, len(r)) if r.letters[i][0] == t)
            u, v = r[1:j], invert(r[j + 1:])
            if u and v:
                return t, u, v
    return None


def rho_hnn(gens: Sequence, relator: Word, t, depth: int = 0):
    """HNN extension for a relator with zero exponent sum in ``t``.

    Returns (handle over subscripted letters and t, images of ``gens``).  The
    base is the one-relator group on the window letters; generators of ``gens``
    absent from the relator become free base letters with subscript 0.
    """
    image = rho(relator, t)
    window = image.window()
    extra = [(g if isinstance(g, str) else gen_name(g), 0) for g in gens if g != t and g not in relator.generators()]
    base = as_free(one_relator_handle(window + extra, image.image, depth + 1))
    if base is None:
        raise Unsupported("stable-letter rewriting gives a base that is not recognisably free")
    A_gens, B_gens = [], []
    for x in sorted(image.bounds, key=str):
        lo, hi = image.bounds[x]
        for l in range(lo, hi):
            A_gens.append(Word([((x, l), 1)]))
            B_gens.append(Word([((x, l + 1), 1)]))
    hnn = HnnHandle(base, t, A_gens, B_gens)
    images = {}
    for g in gens:
        if g == t:
            images[g] = Word([(t, 1)])
            continue
        name = g if isinstance(g, str) else gen_name(g)
        mu = image.bounds.get(name, (0, 0))[0]
        images[g] = _power(t, mu) + Word([((name, mu), 1)]) + _power(t, -mu)
    return hnn, images


def one_relator_handle(gens: Sequence, relator: Word, depth: int = 0) -> GroupHandle:
    """Handle for Gp<gens | relator>; raises Unsupported outside the shapes handled."""
    gens = tuple(gens)
    relator = free_reduce(relator)
    if relator.generators() - set(gens):
        raise ValueError("relator uses letters outside the generators")
    if depth > MAX_DEPTH:
        raise Unsupported("one-relator decomposition exceeded its depth cap")
    core = cyclic_reduce(relator)[1]
    rels = (relator,)
    if not core:
        return FreeHandle(gens, gens, relators=rels)
    used = [g for g in gens if g in core.generators()]
    unused = [g for g in gens if g not in core.generators()]
    if unused:
        inner = one_relator_handle(used, core, depth)
        if isinstance(inner, FreeHandle):
            return FreeHandle(gens, inner.basis + tuple(unused), inner.images, rels)
        return free_product(FreeHandle(unused), inner, rels)
    once = single_occurrence_letters(core)
    if once:
        h = tietze_free(gens, core, once[-1])
        return FreeHandle(gens, h.basis, h.images, rels)
    if len(used) == 1:
        return CyclicHandle(used[0], abs(exponent_sum(core, used[0])), rels)
    split = pinch_split(core)
    if split is not None:
        _, u, v = split
        B = FreeHandle(tuple(g for g in gens if g in u.generators()))
        C = FreeHandle(tuple(g for g in gens if g in v.generators()))
        return AmalgamHandle(B, C, [u], [v], rels)
    conj = conjugacy_split(core)
    if conj is not None:
        t, u, v = conj
        base = FreeHandle(tuple(g for g in gens if g != t))
        return HnnHandle(base, t, [u], [v], rels)
    for t in gens:
        if exponent_sum(core, t) == 0:
            try:
                hnn, images = rho_hnn(gens, core, t, depth)
            except Unsupported:
                continue
            return TranslatedHandle(hnn, gens, images, rels)
    return _change_of_variables(gens, core, rels, depth)


def _change_of_variables(gens: tuple, core: Word, rels: tuple, depth: int) -> GroupHandle:
    """Nielsen move x -> x y^-q shrinking the larger exponent sum, then recurse."""
    sums = {g: exponent_sum(core, g) for g in gens}
    nonzero = sorted((g for g in gens if sums[g]), key=lambda g: (abs(sums[g]), gen_key(g)))
    if len(nonzero) < 2:
        raise Unsupported("no change of variables applies")
    x, y = nonzero[0], nonzero[-1]
    q = sums[y] // sums[x]
    # the new letter x' = x y^q, so x = x' y^-q and y's exponent sum becomes sums[y] mod sums[x]
    image_x = free_reduce(Word([(x, 1)]) + _power(y, -q))
    images = {g: Word([(g, 1)]) for g in gens}
    images[x] = image_x
    new_core = cyclic_reduce(free_reduce(substitute(core, images)))[1]
    inner = one_relator_handle(gens, new_core, depth + 1)
    return TranslatedHandle(inner, gens, images, rels)


__all__ = [
    "GroupHandle", "FreeHandle", "CyclicHandle", "AmalgamHandle", "HnnHandle", "TranslatedHandle",
    "SyllableForm", "BrittonForm", "one_relator_handle", "free_product", "rho_hnn", "unwrap",
    "abelian_power_solve", "as_free", "pinch_split", "conjugacy_split", "tietze_free", "single_occurrence_letters",
]
