"""Prefix membership for one-relator groups in the decidable classes.

The prefix monoid P_w of Gp<X | w=1> is the submonoid generated by the
prefixes of w.  ``classify`` lists the classes a presentation belongs to;
``solver_for`` builds the decomposition attached to one class tag (a free
product, an amalgam tower, an amalgam of free groups or an HNN extension over
a free base) and wraps the matching membership engine.
"""

from __future__ import annotations

import heapq
import itertools
import threading
from dataclasses import dataclass, field
from typing import Callable

from .amalgam import ALL, member_thmA, member_thmB, submonoid_decider
from .config import DEFAULT_LIMITS, Limits
from .errors import Unsupported
from .factorise import Factorisation, FactorisationError, benois_pieces, refines
from .groups import (
    AmalgamHandle,
    FreeHandle,
    GroupHandle,
    HnnHandle,
    TranslatedHandle,
    abelian_power_solve,
    free_product,
    one_relator_handle,
    rho_hnn,
)
from .hnn import NSetBuilder, WSets, member_thmD
from .rational import monoid_set
from .words import (
    Word,
    exponent_sum,
    free_reduce,
    gen_key,
    gen_name,
    invert,
    is_cyclically_reduced,
    is_reduced,
    occurrences,
    prefix_sign,
    prefixes,
    product,
    rho,
    rho_letters,
)

FLAVORS = ("group", "inverse-monoid")
CLASS_ORDER = ("marker", "disjoint", "cyc-pinched", "conj-pinched", "posneg", "adjan", "ohare")


@dataclass(frozen=True)
class Presentation:
    alphabet: tuple
    relator: Word
    flavor: str = "group"

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        object.__setattr__(self, "alphabet", alphabet)
        if not alphabet or len(set(alphabet)) != len(alphabet):
            raise ValueError("alphabet must be non-empty and duplicate-free")
        if self.flavor not in FLAVORS:
            raise ValueError(f"flavor must be one of {FLAVORS}")
        if not self.relator:
            raise ValueError("relator must be non-empty")
        self.check_query(self.relator)

    @classmethod
    def of(cls, gens: str, relator: str, flavor: str = "group") -> "Presentation":
        """``Presentation.of("a b", "aba")``; single-letter names may also be run together."""
        names = gens.split() if " " in gens.strip() else list(gens.strip())
        return cls(tuple(names), Word.parse(relator), flavor)

    def check_query(self, w: Word) -> None:
        extra = w.generators() - set(self.alphabet)
        if extra:
            raise ValueError("letters outside the alphabet: " + ", ".join(sorted(gen_name(g) for g in extra)))

    def __str__(self) -> str:
        return f"<{' '.join(gen_name(g) for g in self.alphabet)} | {self.relator}>"


@dataclass(frozen=True)
class ClassTag:
    name: str
    params: dict = field(default_factory=dict, compare=False, hash=False)
    provenance: str = "benois"

    @property
    def label(self) -> str:
        if self.name == "posneg":
            return f"posneg({gen_name(self.params['t'])})"
        return self.name

    def key(self) -> tuple:
        return (self.name, self.provenance, repr(sorted(self.params.items(), key=lambda kv: kv[0])))

    def describe(self) -> dict:
        """JSON-friendly view of the tag."""
        return {"class": self.label, "provenance": self.provenance,
                "params": {k: _plain(v) for k, v in self.params.items()}}


def _plain(v):
    if isinstance(v, Word):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    return gen_name(v) if isinstance(v, tuple) else str(v)


# ----- helpers ---------------------------------------------------------------------------

def nontrivial_prefixes(w: Word) -> list:
    """Distinct non-empty reduced forms of the prefixes of ``w``, shortest first."""
    out, seen = [], set()
    for p in prefixes(w):
        r = free_reduce(p)
        if r and r not in seen:
            seen.add(r)
            out.append(r)
    return out


def prefix_generators(p: Presentation) -> list:
    """Generators of the prefix monoid: the distinct non-trivial reduced prefixes."""
    return nontrivial_prefixes(p.relator)


def piece_pattern(f: Factorisation) -> tuple:
    """Distinct pieces up to inversion, and the relator as a sequence of (piece index, sign)."""
    distinct: list = []
    pattern: list = []
    for piece in f.pieces:
        for i, d in enumerate(distinct):
            if piece == d:
                pattern.append((i, 1))
                break
            if piece == invert(d):
                pattern.append((i, -1))
                break
        else:
            distinct.append(piece)
            pattern.append((len(distinct) - 1, 1))
    return distinct, pattern


def marker_letters(pieces: list) -> list | None:
    """For each piece a letter occurring once in it and in no other piece, or None."""
    out = []
    for i, d in enumerate(pieces):
        others = set()
        for j, e in enumerate(pieces):
            if j != i:
                others |= e.generators()
        cands = [g for g in sorted(d.generators(), key=gen_key) if occurrences(d, g) == 1 and g not in others]
        if not cands:
            return None
        out.append(cands[0])
    return out


def _piece_letters(k: int) -> list:
    return [("z", i + 1) for i in range(k)]


def _pattern_word(zs: list, pattern: list) -> Word:
    return Word((zs[i], s) for i, s in pattern)


def resolve_factorisation(p: Presentation, f: Factorisation | None = None) -> tuple:
    """(factorisation, provenance); a user factorisation must be coarser than the pieces."""
    pieces = benois_pieces(p.relator)
    if f is None:
        return pieces, "benois"
    if f.relator != p.relator:
        raise FactorisationError("factorisation is for a different relator")
    if not refines(pieces, f):
        raise FactorisationError(
            f"factorisation {f} cuts where {pieces} does not; its conservativity is not certified")
    return f, "user"


# ----- the solver object -----------------------------------------------------------------

@dataclass
class Solver:
    presentation: Presentation
    tag: ClassTag
    model: GroupHandle  # evaluates words over the presentation's alphabet
    method: str
    decide: Callable = field(repr=False)
    unchecked: list = field(default_factory=list)

    @property
    def generators(self) -> list:
        return prefix_generators(self.presentation)

    def member(self, query: Word) -> bool:
        self.presentation.check_query(query)
        return bool(self.decide(free_reduce(query)))


def _build_marker(p: Presentation, tag: ClassTag, limits: Limits) -> Solver:
    pieces, pattern, markers = tag.params["pieces"], tag.params["pattern"], tag.params["markers"]
    zs = _piece_letters(len(pieces))
    u = _pattern_word(zs, pattern)
    H = one_relator_handle(zs, u)
    outer = tuple(g for g in p.alphabet if g not in set(markers))
    images, q_gens = {}, []
    for z, d, x in zip(zs, pieces, markers):
        pos = next(j for j, (g, _) in enumerate(d.letters) if g == x)
        before, after = d[:pos], d[pos + 1:]
        # x^e = before^-1 z after^-1
        img = product(invert(before), Word([(z, 1)]), invert(after))
        images[x] = img if d.letters[pos][1] > 0 else invert(img)
        q_gens += nontrivial_prefixes(before) + nontrivial_prefixes(invert(after))
    if not outer:
        model = TranslatedHandle(H, p.alphabet, images, (p.relator,))
        return Solver(p, tag, model, "marker: prefix monoid is the whole group", lambda q: True)
    G = free_product(FreeHandle(outer), H, relators=(u,))
    model = TranslatedHandle(G, p.alphabet, images, (p.relator,))
    in_free = submonoid_decider(G.B, q_gens, limits)
    return Solver(p, tag, model, "marker: free product with the piece group, syllable test",
                  lambda q: member_thmA(G, in_free, ALL, model.translate(q), limits))


def _build_disjoint(p: Presentation, tag: ClassTag, limits: Limits) -> Solver:
    pieces, pattern = tag.params["pieces"], tag.params["pattern"]
    zs = _piece_letters(len(pieces))
    u = _pattern_word(zs, pattern)
    H = one_relator_handle(zs, u)
    contents = [d.generators() for d in pieces]
    used = set().union(*contents)
    rest = tuple(g for g in p.alphabet if g not in used)
    if rest:
        level = free_product(FreeHandle(rest), H, relators=(u,))
        in_rest = submonoid_decider(level.B, [], limits)
        decide = (lambda spec: lambda w: member_thmA(spec, in_rest, ALL, w, limits))(level)
    else:
        level = H
        decide = lambda w: True
    for i in reversed(range(len(pieces))):
        d, z = pieces[i], Word([(zs[i], 1)])
        # the cyclic subgroup <z_i> is tested through the abelianization; make sure it applies
        abelian_power_solve(level.gens, level.relators, z, z)
        own = tuple(g for g in p.alphabet if g in contents[i])
        rels = tuple(level.relators) + (product(d, invert(z)),)
        spec = AmalgamHandle(FreeHandle(own), level, [d], [z], rels)
        signs = {s for j, s in pattern if j == i}
        gens = [d, invert(d)]
        if 1 in signs:
            gens += nontrivial_prefixes(d)
        if -1 in signs:
            gens += nontrivial_prefixes(invert(d))
        in_own = submonoid_decider(spec.B, gens, limits)
        decide = (lambda spec, in_own, inner: lambda w: member_thmA(spec, in_own, inner, w, limits))(
            spec, in_own, decide)
        level = spec
    model = level
    return Solver(p, tag, model, "disjoint: amalgam tower, syllable test per level", decide)


def _build_cyc(p: Presentation, tag: ClassTag, limits: Limits) -> Solver:
    u, v = tag.params["u"], tag.params["v"]
    right = v.generators()
    left = tuple(g for g in p.alphabet if g not in right)
    spec = AmalgamHandle(FreeHandle(left), FreeHandle(tuple(g for g in p.alphabet if g in right)),
                         [u], [v], (p.relator,))
    pu, pv = nontrivial_prefixes(u), nontrivial_prefixes(v)
    a_inside = (invert(u) in monoid_set(pu, spec.B.basis, limits)
                or invert(v) in monoid_set(pv, spec.C.basis, limits))
    if a_inside:
        in_b = submonoid_decider(spec.B, pu + [u, invert(u)], limits)
        in_c = submonoid_decider(spec.C, pv + [v, invert(v)], limits)
        return Solver(p, tag, spec, "cyc-pinched: amalgam syllable test (amalgamated subgroup inside P_w)",
                      lambda q: member_thmA(spec, in_b, in_c, q, limits))
    return Solver(p, tag, spec, "cyc-pinched: amalgam rational chain",
                  lambda q: member_thmB(spec, pu, pv, q, limits))


def _build_conj(p: Presentation, tag: ClassTag, limits: Limits) -> Solver:
    t, u, v, negative = tag.params["t"], tag.params["u"], tag.params["v"], tag.params["negative"]
    base = FreeHandle(tuple(g for g in p.alphabet if g != t))
    w0 = nontrivial_prefixes(v)
    w1 = [Word()] + nontrivial_prefixes(u)
    wsets = WSets.make(w0, (), [w1], d=1)
    if negative:
        # t^-1 u t = v: P_w = Mon<pref(v), t^-1 pref(u)>
        spec = HnnHandle(base, t, [u], [v], (p.relator,))
        builder = NSetBuilder(base, wsets.inverted(), limits)
        return Solver(p, tag, spec, "conj-pinched: HNN rational chain on inverses",
                      lambda q: member_thmD(spec, wsets.inverted(), invert(q), limits, builder))
    # t u t^-1 = v, i.e. t^-1 v t = u: P_w = Mon<pref(v), t pref(u)>
    spec = HnnHandle(base, t, [v], [u], (p.relator,))
    builder = NSetBuilder(base, wsets, limits)
    return Solver(p, tag, spec, "conj-pinched: HNN rational chain",
                  lambda q: member_thmD(spec, wsets, q, limits, builder))


def posneg_wsets(w: Word, t) -> tuple:
    """(W-sets, sign) with every prefix written as x t^s, x over subscripted letters."""
    sign = prefix_sign(w, t)
    if sign not in ("positive", "negative"):
        raise Unsupported(f"relator is not prefix {gen_name(t)}-positive or -negative")
    buckets: dict = {}
    for pfx in prefixes(w)[1:]:
        r, s = rho_letters(pfx, t)
        buckets.setdefault(abs(s), set()).add(free_reduce(r))
    d = max(buckets)
    return WSets.make(buckets.get(0, ()), [buckets.get(mu, ()) for mu in range(1, d + 1)], (), d), sign


def _build_posneg(p: Presentation, tag: ClassTag, limits: Limits, t=None, method: str | None = None) -> Solver:
    t = tag.params["t"] if t is None else t
    w = p.relator
    hnn, images = rho_hnn(p.alphabet, w, t)
    wsets, sign = posneg_wsets(w, t)
    model = TranslatedHandle(hnn, p.alphabet, images, (w,))
    if sign == "positive":
        builder = NSetBuilder(hnn.base, wsets, limits)
        decide = lambda q: member_thmD(hnn, wsets, model.translate(q), limits, builder)
    else:
        inv = wsets.inverted()
        builder = NSetBuilder(hnn.base, inv, limits)
        decide = lambda q: member_thmD(hnn, inv, invert(model.translate(q)), limits, builder)
    name = method or f"posneg: stable-letter rewriting in {gen_name(t)}, HNN rational chain ({sign})"
    return Solver(p, tag, model, name, decide)


def _build_adjan(p: Presentation, tag: ClassTag, limits: Limits) -> Solver:
    a = tag.params["a"]
    return _build_posneg(p, tag, limits, t=a,
                         method=f"adjan ({tag.params['condition']}, {tag.params['case']}): posneg in {gen_name(a)}")


def _build_ohare(p: Presentation, tag: ClassTag, limits: Limits) -> Solver:
    rewritten: Presentation = tag.params["rewritten"]
    inner_tag = tag.params["marker_tag"]
    inner = _build_marker(rewritten, inner_tag, limits)
    # same group, so the rewritten model evaluates the original words too
    return Solver(p, tag, inner.model, "ohare: rewritten relator, then " + inner.method, inner.decide, inner.unchecked)


_BUILDERS = {
    "marker": _build_marker,
    "disjoint": _build_disjoint,
    "cyc-pinched": _build_cyc,
    "conj-pinched": _build_conj,
    "posneg": _build_posneg,
    "adjan": _build_adjan,
    "ohare": _build_ohare,
}

_cache: dict = {}
_cache_lock = threading.Lock()


def solver_for(p: Presentation, tag: ClassTag, limits: Limits = DEFAULT_LIMITS) -> Solver:
    if tag.name == "unsupported":
        raise Unsupported("no decidable class applies: " + "; ".join(tag.params.get("reasons", [])))
    key = (p, tag.key(), limits)
    got = _cache.get(key)
    if got is None:
        got = _BUILDERS[tag.name](p, tag, limits)
        with _cache_lock:
            got = _cache.setdefault(key, got)
    return got


# ----- syntactic class checks ------------------------------------------------------------

def _marker_tag(p: Presentation, f: Factorisation, provenance: str, notes: list) -> ClassTag | None:
    pieces, pattern = piece_pattern(f)
    markers = marker_letters(pieces)
    if markers is None:
        notes.append("marker: some piece has no unique marker letter")
        return None
    return ClassTag("marker", {"pieces": pieces, "pattern": pattern, "markers": markers,
                               "factorisation": str(f)}, provenance)


def _disjoint_tag(p: Presentation, f: Factorisation, provenance: str, notes: list) -> ClassTag | None:
    pieces, pattern = piece_pattern(f)
    if not is_cyclically_reduced(p.relator):
        notes.append("disjoint: relator is not cyclically reduced")
        return None
    if len(pieces) < 2:
        notes.append("disjoint: fewer than two distinct pieces")
        return None
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            if pieces[i].generators() & pieces[j].generators():
                notes.append("disjoint: pieces share letters")
                return None
    return ClassTag("disjoint", {"pieces": pieces, "pattern": pattern, "factorisation": str(f)}, provenance)


def cyc_pinched_split(w: Word):
    """(u, v) with w literally u v^-1, u and v non-empty reduced words on disjoint letters."""
    if not is_reduced(w):
        return None
    for k in range(1, len(w)):
        u, rest = w[:k], w[k:]
        if not (u.generators() & rest.generators()):
            return u, invert(rest)
    return None


def conj_pinched_split(w: Word):
    """(t, u, v, negative): w is t^-1 u t v^-1 (negative) or t u t^-1 v^-1, u and v non-empty and t-free."""
    if not is_reduced(w) or len(w) < 4:
        return None
    t, e = w.letters[0]
    if occurrences(w, t) != 2:
        return None
    j = next(i for i in range(1, len(w)) if w.letters[i][0] == t)
    if w.letters[j][1] != -e:
        return None
    u, v = w[1:j], invert(w[j + 1:])
    if not u or not v:
        return None
    return t, u, v, e < 0


def _posneg_tag(p: Presentation, t, notes: list) -> ClassTag | None:
    w = p.relator
    label = f"posneg({gen_name(t)})"
    if occurrences(w, t) == 0 or exponent_sum(w, t) != 0:
        return None
    sign = prefix_sign(w, t)
    if sign not in ("positive", "negative"):
        notes.append(f"{label}: relator is neither prefix positive nor prefix negative")
        return None
    image = rho(w, t)
    if not is_cyclically_reduced(image.image):
        notes.append(f"{label}: rewritten relator {image.image} is not cyclically reduced")
        return None
    try:
        rho_hnn(p.alphabet, w, t)
    except Unsupported as exc:
        notes.append(f"{label}: {exc}")
        return None
    d = max(abs(s) for s in rho_letters_sums(w, t))
    return ClassTag("posneg", {"t": t, "sign": sign, "d": d, "rewritten": image.image}, "syntactic")


def rho_letters_sums(w: Word, t) -> list:
    return [rho_letters(w[:k], t)[1] for k in range(1, len(w) + 1)]


def adjan_check(p: Presentation):
    """(a, b, condition, case) when the relator is an Adjan word meeting one of the three conditions."""
    if len(p.alphabet) != 2:
        return None
    w = p.relator
    k = 0
    while k < len(w) and w.letters[k][1] > 0:
        k += 1
    u, rest = w[:k], w[k:]
    if not u or not rest or any(s > 0 for _, s in rest.letters):
        return None
    v = invert(rest)
    if u.letters[0] == v.letters[0] or u.letters[-1] == v.letters[-1]:
        return None
    for a, b in (p.alphabet, tuple(reversed(p.alphabet))):
        if occurrences(u, a) != occurrences(v, a) or occurrences(u, a) == 0:
            continue
        cond = _adjan_condition(u, v, a, b)
        if cond is None:
            continue
        first = gen_name(u.letters[0][0])
        last = gen_name(u.letters[-1][0])
        case = f"u={first}...{last}, v={gen_name(v.letters[0][0])}...{gen_name(v.letters[-1][0])}"
        return a, b, cond, case
    return None


def _adjan_condition(u: Word, v: Word, a, b) -> str | None:
    ba = Word([(b, 1), (a, 1)])
    ab = Word([(a, 1), (b, 1)])
    if u[:2] == ba or v[:2] == ba:
        return "i"
    if u[len(u) - 2:] == ab or v[len(v) - 2:] == ab:
        return "ii"
    gaps_u, gaps_v = _a_gaps(u, a), _a_gaps(v, a)
    for k in range(len(gaps_u)):
        if (gaps_u[k] == 1 and gaps_v[k] == 0) or (gaps_v[k] == 1 and gaps_u[k] == 0):
            return "iii"
    return None


def _a_gaps(w: Word, a) -> list:
    """Number of letters between consecutive occurrences of ``a``."""
    pos = [i for i, (g, _) in enumerate(w.letters) if g == a]
    return [pos[i + 1] - pos[i] - 1 for i in range(len(pos) - 1)]


# ----- O'Hare-type relators --------------------------------------------------------------

class OHareConditionError(ValueError):
    def __init__(self, condition: str, message: str):
        super().__init__(f"condition ({condition}) failed: {message}")
        self.condition = condition


def ohare_blocks(p: Presentation) -> tuple:
    """(a, d, blocks) for a relator a u_1 d a u_2 d ... a u_m d with u_k over the other letters."""
    w = p.relator
    a, sa = w.letters[0]
    d, sd = w.letters[-1]
    if sa < 0 or sd < 0 or a == d:
        raise OHareConditionError("shape", "relator must start with a and end with d for distinct letters a, d")
    blocks, cur, inside = [], [], False
    for g, s in w.letters:
        if g == a:
            if inside or s < 0:
                raise OHareConditionError("shape", "unexpected occurrence of the first letter")
            inside, cur = True, []
        elif g == d:
            if not inside or s < 0:
                raise OHareConditionError("shape", "unexpected occurrence of the last letter")
            blocks.append(Word(cur))
            inside = False
        else:
            if not inside:
                raise OHareConditionError("shape", "letters between blocks")
            cur.append((g, s))
    if inside:
        raise OHareConditionError("shape", "unterminated block")
    if not all(is_reduced(b) for b in blocks):
        raise OHareConditionError("shape", "a block word is not reduced")
    return a, d, blocks


def ohare_conditions(p: Presentation, certify: bool = True) -> tuple:
    """Check conditions (i)-(iii); returns (a, d, blocks) or raises OHareConditionError.

    With ``certify=False`` condition (iii), the certified cuts, is skipped.
    """
    a, d, blocks = ohare_blocks(p)
    if not any(len(b) == 0 for b in blocks):
        raise OHareConditionError("i", "no block is empty")
    quotients = {free_reduce(product(r, invert(s))) for r in blocks for s in blocks}
    for x in p.alphabet:
        if x in (a, d):
            continue
        if Word([(x, 1)]) not in quotients:
            raise OHareConditionError("ii", f"{gen_name(x)} is not red(u_r u_s^-1) for any blocks")
    if not certify:
        return a, d, blocks
    cuts = set(benois_pieces(p.relator).cut_points)
    pos = 0
    for b in blocks[:-1]:
        pos += len(b) + 2
        if pos not in cuts:
            raise OHareConditionError("iii", f"no certified cut after position {pos}")
    return a, d, blocks


def ohare_rewrite(p: Presentation, certify: bool = True) -> Presentation:
    """Replace each block a x_1...x_t d by (a x_1 a^-1)...(a x_t a^-1)(a d).

    ``certify=False`` rewrites without checking condition (iii); the result is
    then not known to present the same inverse monoid.
    """
    a, d, blocks = ohare_conditions(p, certify)
    return Presentation(p.alphabet, _ohare_word(a, d, blocks), p.flavor)


def _ohare_word(a, d, blocks) -> Word:
    out = []
    for b in blocks:
        for x in b.letters:
            out += [(a, 1), x, (a, -1)]
        out += [(a, 1), (d, 1)]
    return Word(out)


def _ohare_factorisation(a, d, blocks) -> Factorisation:
    pieces = []
    for b in blocks:
        pieces += [Word([(a, 1), x, (a, -1)]) for x in b.letters]
        pieces.append(Word([(a, 1), (d, 1)]))
    return Factorisation.from_pieces(pieces, "user")


def _ohare_tag(p: Presentation, notes: list) -> ClassTag | None:
    try:
        a, d, blocks = ohare_conditions(p)
    except OHareConditionError as exc:
        if exc.condition != "shape":
            notes.append(f"ohare: {exc}")
        return None
    rewritten = Presentation(p.alphabet, _ohare_word(a, d, blocks), p.flavor)
    inner_notes: list = []
    tag = _marker_tag(rewritten, benois_pieces(rewritten.relator), "benois", inner_notes)
    if tag is None:
        # the factor split is unital, so it is conservative and may be used directly
        tag = _marker_tag(rewritten, _ohare_factorisation(a, d, blocks), "user", inner_notes)
    if tag is None:
        notes.append("ohare: rewritten relator fails the marker condition")
        return None
    return ClassTag("ohare", {"a": a, "d": d, "blocks": blocks, "rewritten": rewritten, "marker_tag": tag},
                    "syntactic")


# ----- classification and dispatch -------------------------------------------------------

def classify(p: Presentation, f: Factorisation | None = None, limits: Limits = DEFAULT_LIMITS) -> list:
    """All class tags that apply; a single ``unsupported`` tag (with reasons) when none does."""
    fact, provenance = resolve_factorisation(p, f)
    notes: list = []
    candidates = [
        _marker_tag(p, fact, provenance, notes),
        _disjoint_tag(p, fact, provenance, notes),
    ]
    split = cyc_pinched_split(p.relator)
    if split is not None:
        candidates.append(ClassTag("cyc-pinched", {"u": split[0], "v": split[1]}, "syntactic"))
    conj = conj_pinched_split(p.relator)
    if conj is not None:
        t, u, v, negative = conj
        candidates.append(ClassTag("conj-pinched", {"t": t, "u": u, "v": v, "negative": negative}, "syntactic"))
    for t in p.alphabet:
        candidates.append(_posneg_tag(p, t, notes))
    adj = adjan_check(p)
    if adj is not None:
        a, b, cond, case = adj
        candidates.append(ClassTag("adjan", {"a": a, "b": b, "condition": cond, "case": case}, "syntactic"))
    candidates.append(_ohare_tag(p, notes))
    tags = []
    for tag in candidates:
        if tag is None:
            continue
        try:
            solver_for(p, tag, limits)
        except Unsupported as exc:
            notes.append(f"{tag.label} downgraded: {exc}")
            continue
        tags.append(tag)
    if not tags:
        return [ClassTag("unsupported", {"reasons": notes}, "syntactic")]
    return tags


def prefix_member(p: Presentation, tag: ClassTag, query: Word, limits: Limits = DEFAULT_LIMITS) -> bool:
    """Does ``query`` represent an element of the prefix monoid?"""
    return solver_for(p, tag, limits).member(query)


def default_tag(p: Presentation, limits: Limits = DEFAULT_LIMITS) -> ClassTag:
    return classify(p, limits=limits)[0]


def right_invertible(p: Presentation, query: Word, tag: ClassTag | None = None,
                     limits: Limits = DEFAULT_LIMITS) -> bool:
    """Right invertibility in Inv<X | w=1>, via prefix membership (needs a cyclically reduced relator)."""
    if not is_cyclically_reduced(p.relator):
        raise ValueError("relator is not cyclically reduced, so E-unitarity is not certified")
    return prefix_member(p, tag or default_tag(p, limits), query, limits)


# ----- witnesses -------------------------------------------------------------------------

def find_witness(solver: Solver, query: Word, limits: Limits = DEFAULT_LIMITS, ball=None,
                 max_decisions: int = 400) -> list | None:
    """Prefix words whose product equals ``query`` in the group, or None if the search gives up.

    Best-first search peeling one generator at a time off the left of the
    remaining element; a branch survives only if the decider still accepts it.
    """
    gens = solver.generators
    model = solver.model
    query = free_reduce(query)
    if ball is not None:
        hit = ball.lookup(query)
        if hit is not None:
            return [gens[i] for i in hit]
    # a macro is peeled as the short word it equals, but recorded as its expansion
    macros = unit_macros(solver.presentation)
    steps = [[i] for i in range(len(gens))] + [m for _, m in macros]
    inverses = [invert(g) for g in gens] + [invert(v) for v, _ in macros]
    counter = itertools.count()
    heap = [(len(query), next(counter), query, (), False)]
    seen = set()
    decisions = 0
    while heap and len(seen) < limits.witness_nodes:
        _, _, rest, path, need_check = heapq.heappop(heap)
        key = model.invariant(rest) if model.canonical else rest
        if key in seen:
            continue
        if need_check:
            if decisions >= max_decisions:
                break
            decisions += 1
            if not solver.decide(rest):
                continue
        seen.add(key)
        if model.is_trivial(rest):
            return [gens[i] for i in path]
        if ball is not None:
            hit = ball.lookup(rest)
            if hit is not None:
                return [gens[i] for i in path + tuple(hit)]
        for step, g in zip(steps, inverses):
            nxt = product(g, rest)
            heapq.heappush(heap, (len(nxt), next(counter), nxt, path + tuple(step), True))
    return None


def unit_macros(p: Presentation) -> list:
    """Pairs (w[:k]^-1, generator indices whose product equals it) for every certified cut k.

    Each cut certificate of the pieces algorithm writes w[:k]^-1 over reduced
    prefixes of w and of w^-1; a prefix of w^-1 equals a prefix of w in the
    group because w[:n-j] * w[n-j:] = 1.
    """
    w = p.relator
    gens = prefix_generators(p)
    index = {g: i for i, g in enumerate(gens)}
    n = len(w)
    as_gen = {}
    for j in range(n + 1):
        red = free_reduce(invert(w)[:j])
        target = free_reduce(w[:n - j])
        if red not in as_gen:
            as_gen[red] = [index[target]] if target else []
    for g in gens:
        as_gen[g] = [index[g]]
    out = []
    for k, cert in sorted(benois_pieces(w).certificates.items()):
        steps = [i for x in cert for i in as_gen[free_reduce(x)]]
        if steps:
            out.append((free_reduce(invert(w[:k])), steps))
    return out


def verify_witness(solver: Solver, query: Word, witness: list) -> bool:
    gens = set(solver.generators)
    if any(w not in gens for w in witness):
        return False
    return solver.model.equal(product(*witness) if witness else Word(), free_reduce(query))


__all__ = [
    "Presentation", "ClassTag", "Solver", "classify", "prefix_member", "right_invertible", "solver_for",
    "ohare_rewrite", "ohare_conditions", "OHareConditionError", "find_witness", "verify_witness",
    "prefix_generators", "piece_pattern", "marker_letters", "adjan_check", "posneg_wsets",
    "cyc_pinched_split", "conj_pinched_split", "resolve_factorisation", "default_tag", "CLASS_ORDER",
    "unit_macros", "nontrivial_prefixes",
]
