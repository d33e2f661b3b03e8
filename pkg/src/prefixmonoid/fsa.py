"""Finite automata over a doubled alphabet.

States are the integers ``0..n-1``.  A transition label is a letter
``(generator, sign)`` or ``None`` for an empty move.  Everything here is
purely language-theoretic; the free-group reading lives in ``rational``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import product as iproduct
from typing import Callable, Iterable, Mapping

from .words import Word, gen_key, gen_name, inverse_letter, letter_text

EPS = None


class AlphabetMismatch(ValueError):
    pass


class FsaFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _label_key(label):
    if label is None:
        return (0,)
    return (1, gen_key(label[0]), -label[1])


def canonical_alphabet(gens: Iterable) -> tuple:
    return tuple(sorted(set(gens), key=gen_key))


@dataclass(frozen=True)
class Fsa:
    n: int
    alphabet: tuple
    transitions: frozenset
    initial: frozenset
    final: frozenset

    def __post_init__(self):
        for p, label, q in self.transitions:
            if not (0 <= p < self.n and 0 <= q < self.n):
                raise ValueError(f"transition ({p}, {label}, {q}) references a missing state")
            if label is not None and label[0] not in self.alphabet:
                raise AlphabetMismatch(f"label {letter_text(label)} outside alphabet")
        for s in self.initial | self.final:
            if not 0 <= s < self.n:
                raise ValueError(f"state {s} out of range")

    # ----- construction -----------------------------------------------------------------
    @classmethod
    def build(cls, n: int, alphabet: Iterable, transitions: Iterable, initial: Iterable, final: Iterable) -> "Fsa":
        return cls(n, canonical_alphabet(alphabet), frozenset(transitions), frozenset(initial), frozenset(final))

    @cached_property
    def out(self) -> list:
        adj: list = [[] for _ in range(self.n)]
        for p, label, q in sorted(self.transitions, key=lambda t: (t[0], _label_key(t[1]), t[2])):
            adj[p].append((label, q))
        return adj

    @cached_property
    def has_eps(self) -> bool:
        return any(label is None for _, label, _ in self.transitions)

    def size(self) -> int:
        return self.n + len(self.transitions)

    def labels(self) -> set:
        return {label for _, label, _ in self.transitions if label is not None}

    def with_alphabet(self, alphabet: Iterable) -> "Fsa":
        alpha = canonical_alphabet(set(alphabet) | set(self.alphabet))
        return Fsa(self.n, alpha, self.transitions, self.initial, self.final)

    def over(self, alphabet: Iterable) -> "Fsa":
        """Same automaton with exactly this alphabet (labels must fit)."""
        return Fsa(self.n, canonical_alphabet(alphabet), self.transitions, self.initial, self.final)

    # ----- running ----------------------------------------------------------------------
    def eps_closure(self, states: Iterable[int]) -> frozenset:
        seen = set(states)
        if not self.has_eps:
            return frozenset(seen)
        stack = list(seen)
        while stack:
            p = stack.pop()
            for label, q in self.out[p]:
                if label is None and q not in seen:
                    seen.add(q)
                    stack.append(q)
        return frozenset(seen)

    def step(self, states: frozenset, letter) -> frozenset:
        nxt = {q for p in states for label, q in self.out[p] if label == letter}
        return self.eps_closure(nxt)

    def accepts(self, w: Word) -> bool:
        cur = self.eps_closure(self.initial)
        for letter in w.letters:
            if not cur:
                return False
            cur = self.step(cur, letter)
        return bool(cur & self.final)

    def words(self, max_len: int) -> set:
        """Every accepted word of length at most ``max_len`` (syntactic)."""
        out = set()
        start = self.eps_closure(self.initial)
        frontier = {(start, ())}
        for length in range(max_len + 1):
            nxt = set()
            for states, letters in frontier:
                if states & self.final:
                    out.add(Word(letters))
                if length == max_len:
                    continue
                for letter in {lab for p in states for lab, _ in self.out[p] if lab is not None}:
                    st = self.step(states, letter)
                    if st:
                        nxt.add((st, letters + (letter,)))
            frontier = nxt
        return out

    def is_empty(self) -> bool:
        return not (self.reachable() & self.final)

    def reachable(self) -> set:
        seen = set(self.initial)
        stack = list(seen)
        while stack:
            p = stack.pop()
            for _, q in self.out[p]:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return seen

    def coreachable(self) -> set:
        back: dict = {}
        for p, _, q in self.transitions:
            back.setdefault(q, []).append(p)
        seen = set(self.final)
        stack = list(seen)
        while stack:
            q = stack.pop()
            for p in back.get(q, ()):
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen

    # ----- serialisation ----------------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"fsa states={self.n} alphabet={','.join(gen_name(g) for g in self.alphabet)}"]
        lines.append("init: " + " ".join(str(s) for s in sorted(self.initial)))
        lines.append("final: " + " ".join(str(s) for s in sorted(self.final)))
        for p, label, q in sorted(self.transitions, key=lambda t: (t[0], _label_key(t[1]), t[2])):
            lines.append(f"{p} {'-' if label is None else letter_text(label)} {q}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Fsa":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("fsa "):
            raise FsaFormatError("expected header 'fsa states=N alphabet=...'", 1)
        fields = dict(part.split("=", 1) for part in lines[0].split()[1:] if "=" in part)
        try:
            n = int(fields["states"])
        except (KeyError, ValueError):
            raise FsaFormatError("bad or missing states=", 1) from None
        alpha_text = fields.get("alphabet", "")
        alphabet = []
        for name in filter(None, alpha_text.split(",")):
            w = Word.parse(name)
            if len(w) != 1 or w.letters[0][1] != 1:
                raise FsaFormatError(f"bad alphabet symbol {name!r}", 1)
            alphabet.append(w.letters[0][0])
        initial: list = []
        final: list = []
        transitions = []
        seen_init = seen_final = False
        for lineno, raw in enumerate(lines[1:], start=2):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("init:"):
                initial = [int(x) for x in line[5:].split()]
                seen_init = True
            elif line.startswith("final:"):
                final = [int(x) for x in line[6:].split()]
                seen_final = True
            else:
                parts = line.split()
                if len(parts) != 3:
                    raise FsaFormatError(f"expected 'p x q', got {line!r}", lineno)
                if parts[1] == "-":
                    label = None
                else:
                    w = Word.parse(parts[1])
                    if len(w) != 1:
                        raise FsaFormatError(f"bad letter {parts[1]!r}", lineno)
                    label = w.letters[0]
                try:
                    transitions.append((int(parts[0]), label, int(parts[2])))
                except ValueError:
                    raise FsaFormatError(f"bad state in {line!r}", lineno) from None
        if not (seen_init and seen_final):
            raise FsaFormatError("missing init: or final: line", len(lines))
        try:
            return cls(n, tuple(alphabet), frozenset(transitions), frozenset(initial), frozenset(final))
        except ValueError as exc:
            raise FsaFormatError(str(exc), 1) from None


# ----- elementary constructions ----------------------------------------------------------

def empty_fsa(alphabet: Iterable) -> Fsa:
    return Fsa.build(1, alphabet, (), (0,), ())


def epsilon_fsa(alphabet: Iterable) -> Fsa:
    return Fsa.build(1, alphabet, (), (0,), (0,))


def _alphabet_of(words: Iterable[Word]) -> set:
    return {g for w in words for g in w.generators()}


def fsa_from_words(words: Iterable[Word], alphabet: Iterable = ()) -> Fsa:
    """Automaton accepting exactly the given finite set of words (a trie)."""
    words = list(words)
    alphabet = set(alphabet) | _alphabet_of(words)
    trie: dict = {(): 0}
    transitions = []
    final = set()
    for w in words:
        node = ()
        for letter in w.letters:
            child = node + (letter,)
            if child not in trie:
                trie[child] = len(trie)
                transitions.append((trie[node], letter, trie[child]))
            node = child
        final.add(trie[node])
    return Fsa.build(len(trie), alphabet, transitions, (0,), final)


def fsa_monoid(words: Iterable[Word], alphabet: Iterable = ()) -> tuple[Fsa, dict]:
    """Automaton for the free monoid generated by ``words``.

    The words share a trie rooted at state 0; the node ending each word has an
    empty move back to the root.  Returns the automaton and a map from those
    return moves to the index of their word, so accepting paths can be read
    back as factorisations.
    """
    words = list(words)
    alphabet = set(alphabet) | _alphabet_of(words)
    trie: dict = {(): 0}
    transitions = []
    tags: dict = {}
    for idx, w in enumerate(words):
        if not w:
            continue
        node = ()
        for letter in w.letters:
            child = node + (letter,)
            if child not in trie:
                trie[child] = len(trie)
                transitions.append((trie[node], letter, trie[child]))
            node = child
        back = (trie[node], EPS, 0)
        if back not in tags:
            tags[back] = idx
            transitions.append(back)
    return Fsa.build(len(trie), alphabet, transitions, (0,), (0,)), tags


def _check(*fsas: Fsa) -> tuple:
    alpha = fsas[0].alphabet
    for f in fsas[1:]:
        if f.alphabet != alpha:
            raise AlphabetMismatch(
                f"alphabets differ: {[gen_name(g) for g in alpha]} vs {[gen_name(g) for g in f.alphabet]}"
            )
    return alpha


def _shift(f: Fsa, k: int) -> list:
    return [(p + k, label, q + k) for p, label, q in f.transitions]


def fsa_union(*fsas: Fsa) -> Fsa:
    alpha = _check(*fsas)
    n = 0
    transitions: list = []
    initial: list = []
    final: list = []
    for f in fsas:
        transitions += _shift(f, n)
        initial += [s + n for s in f.initial]
        final += [s + n for s in f.final]
        n += f.n
    return Fsa.build(max(n, 1), alpha, transitions, initial, final)


def fsa_concat(*fsas: Fsa) -> Fsa:
    alpha = _check(*fsas)
    if not fsas:
        raise ValueError("need at least one automaton")
    n = 0
    transitions: list = []
    prev_final: list = []
    initial: list = []
    for i, f in enumerate(fsas):
        transitions += _shift(f, n)
        if i == 0:
            initial = [s + n for s in f.initial]
        else:
            transitions += [(p, EPS, s + n) for p in prev_final for s in f.initial]
        prev_final = [s + n for s in f.final]
        n += f.n
    return Fsa.build(n, alpha, transitions, initial, prev_final)


def fsa_star(f: Fsa) -> Fsa:
    hub = f.n
    transitions = list(f.transitions)
    transitions += [(hub, EPS, s) for s in f.initial]
    transitions += [(s, EPS, hub) for s in f.final]
    return Fsa.build(f.n + 1, f.alphabet, transitions, (hub,), (hub,))


def fsa_reverse_invert(f: Fsa) -> Fsa:
    """Accepts exactly the formal inverses of the words accepted by ``f``."""
    transitions = [(q, None if label is None else inverse_letter(label), p) for p, label, q in f.transitions]
    return Fsa.build(f.n, f.alphabet, transitions, f.final, f.initial)


def fsa_relabel(f: Fsa, mapping: Mapping, alphabet: Iterable | None = None) -> Fsa:
    """Replace every generator ``g`` by the word ``mapping[g]`` (inverse for ``g^-1``).

    Multi-letter images are split into chains of fresh states.
    """
    from .words import UnassignedLetter, invert

    n = f.n
    transitions = []
    new_alpha = set(alphabet or ())
    for p, label, q in f.transitions:
        if label is None:
            transitions.append((p, EPS, q))
            continue
        g, s = label
        try:
            image = mapping[g]
        except KeyError:
            raise UnassignedLetter(f"no assignment for generator {gen_name(g)!r}") from None
        if s < 0:
            image = invert(image)
        new_alpha |= image.generators()
        if len(image) == 0:
            transitions.append((p, EPS, q))
            continue
        prev = p
        for k, letter in enumerate(image.letters):
            nxt = q if k == len(image) - 1 else n
            if nxt == n:
                n += 1
            transitions.append((prev, letter, nxt))
            prev = nxt
    if alphabet is None:
        for img in mapping.values():
            new_alpha |= img.generators()
    return Fsa.build(n, new_alpha, transitions, f.initial, f.final)


def fsa_append_word(f: Fsa, w: Word) -> Fsa:
    return fsa_concat(f, fsa_from_words([w], f.alphabet).with_alphabet(f.alphabet).with_alphabet(f.alphabet))


# ----- language algorithms ---------------------------------------------------------------

def trim(f: Fsa) -> Fsa:
    """Restrict to useful states and renumber them in BFS order."""
    useful = f.reachable() & f.coreachable()
    if not useful:
        return empty_fsa(f.alphabet)
    order: list = []
    seen = set()
    queue = deque(sorted(s for s in f.initial if s in useful))
    seen.update(queue)
    while queue:
        p = queue.popleft()
        order.append(p)
        for _, q in f.out[p]:
            if q in useful and q not in seen:
                seen.add(q)
                queue.append(q)
    index = {s: i for i, s in enumerate(order)}
    transitions = [(index[p], label, index[q]) for p, label, q in f.transitions if p in index and q in index]
    return Fsa.build(len(order), f.alphabet, transitions, [index[s] for s in f.initial if s in index],
                     [index[s] for s in f.final if s in index])


def remove_eps(f: Fsa) -> Fsa:
    if not f.has_eps:
        return f
    closures = [f.eps_closure((p,)) for p in range(f.n)]
    transitions = set()
    final = set()
    for p in range(f.n):
        for r in closures[p]:
            if r in f.final:
                final.add(p)
            for label, q in f.out[r]:
                if label is not None:
                    transitions.add((p, label, q))
    return Fsa.build(f.n, f.alphabet, transitions, f.initial, final)


def determinize(f: Fsa) -> Fsa:
    start = f.eps_closure(f.initial)
    index = {start: 0}
    queue = deque([start])
    transitions = []
    final = []
    letters = sorted(f.labels(), key=_label_key)
    while queue:
        states = queue.popleft()
        i = index[states]
        if states & f.final:
            final.append(i)
        for letter in letters:
            nxt = f.step(states, letter)
            if not nxt:
                continue
            if nxt not in index:
                index[nxt] = len(index)
                queue.append(nxt)
            transitions.append((i, letter, index[nxt]))
    return Fsa.build(len(index), f.alphabet, transitions, (0,), final)


def _hopcroft(d: Fsa, letters: list) -> list:
    """Block index of every state of the trim DFA ``d`` under language equivalence.

    Missing transitions go to an implicit sink, which is kept in its own block.
    """
    n = d.n
    sink = n
    pre: dict = {}
    for p, label, q in d.transitions:
        pre.setdefault((q, label), []).append(p)
    for a in letters:
        targets = {p for p, label, _ in d.transitions if label == a}
        for p in range(n):
            if p not in targets:
                pre.setdefault((sink, a), []).append(p)
    finals = set(d.final)
    parts = [set(s for s in range(n) if s in finals), set(s for s in range(n) if s not in finals), {sink}]
    parts = [b for b in parts if b]
    where = {}
    for i, b in enumerate(parts):
        for s in b:
            where[s] = i
    work = [(i, a) for i in range(len(parts)) for a in letters]
    while work:
        i, a = work.pop()
        movers = set()
        for s in parts[i]:
            movers.update(pre.get((s, a), ()))
        touched: dict = {}
        for s in movers:
            touched.setdefault(where[s], set()).add(s)
        for j, inside in touched.items():
            if len(inside) == len(parts[j]):
                continue
            rest = parts[j] - inside
            small, big = (inside, rest) if len(inside) <= len(rest) else (rest, inside)
            parts[j] = big
            k = len(parts)
            parts.append(small)
            for s in small:
                where[s] = k
            for b in letters:
                work.append((k, b))
    return [where[s] for s in range(n)]


def minimize(f: Fsa) -> Fsa:
    """Minimal trim DFA for L(f), with states numbered canonically (BFS by label order)."""
    d = trim(determinize(f))
    if d.is_empty():
        return empty_fsa(f.alphabet)
    letters = sorted(d.labels(), key=_label_key)
    delta = {(p, label): q for p, label, q in d.transitions}
    block = _hopcroft(d, letters)
    start = block[0]
    order = [start]
    seen = {start}
    rep = {}
    for s in range(d.n):
        rep.setdefault(block[s], s)
    queue = deque([start])
    trans_by_block: dict = {}
    while queue:
        b = queue.popleft()
        s = rep[b]
        for a in letters:
            if (s, a) in delta:
                nb = block[delta[(s, a)]]
                trans_by_block[(b, a)] = nb
                if nb not in seen:
                    seen.add(nb)
                    order.append(nb)
                    queue.append(nb)
    index = {b: i for i, b in enumerate(order)}
    transitions = [(index[b], a, index[nb]) for (b, a), nb in trans_by_block.items()]
    final = [index[block[s]] for s in d.final if block[s] in index]
    return Fsa.build(len(order), f.alphabet, transitions, (0,), final)


def intersect_fsa(f: Fsa, g: Fsa) -> Fsa:
    """Product automaton for L(f) ∩ L(g) (syntactic intersection)."""
    _check(f, g)
    f, g = remove_eps(f), remove_eps(g)
    index: dict = {}
    queue = deque()
    for s in sorted(f.initial):
        for t in sorted(g.initial):
            index[(s, t)] = len(index)
            queue.append((s, t))
    transitions = []
    while queue:
        s, t = queue.popleft()
        gout: dict = {}
        for label, q in g.out[t]:
            gout.setdefault(label, []).append(q)
        for label, p in f.out[s]:
            for q in gout.get(label, ()):
                if (p, q) not in index:
                    index[(p, q)] = len(index)
                    queue.append((p, q))
                transitions.append((index[(s, t)], label, index[(p, q)]))
    if not index:
        return empty_fsa(f.alphabet)
    initial = [index[(s, t)] for s in f.initial for t in g.initial]
    final = [i for (s, t), i in index.items() if s in f.final and t in g.final]
    return Fsa.build(len(index), f.alphabet, transitions, initial, final)


def complete_dfa(d: Fsa, letters: list) -> Fsa:
    delta = {(p, a): q for p, a, q in d.transitions}
    sink = d.n
    transitions = list(d.transitions)
    used_sink = False
    for p in range(d.n):
        for a in letters:
            if (p, a) not in delta:
                transitions.append((p, a, sink))
                used_sink = True
    if used_sink:
        transitions += [(sink, a, sink) for a in letters]
    return Fsa.build(d.n + (1 if used_sink else 0), d.alphabet, transitions, d.initial, d.final)


def same_language(f: Fsa, g: Fsa) -> bool:
    _check(f, g)
    return minimize(f).to_text() == minimize(g).to_text()


def map_states(f: Fsa, fn: Callable[[int], int], n: int) -> Fsa:
    return Fsa.build(n, f.alphabet, [(fn(p), a, fn(q)) for p, a, q in f.transitions],
                     map(fn, f.initial), map(fn, f.final))


def all_words(alphabet: Iterable, max_len: int, reduced_only: bool = False) -> list[Word]:
    """Every word over the doubled alphabet up to ``max_len`` (optionally only reduced ones)."""
    letters = [(g, s) for g in sorted(alphabet, key=gen_key) for s in (1, -1)]
    out = [Word()]
    layer = [()]
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for a in letters:
                if reduced_only and w and w[-1][0] == a[0] and w[-1][1] == -a[1]:
                    continue
                nxt.append(w + (a,))
        out.extend(Word(w) for w in nxt)
        layer = nxt
    return out


__all__ = [
    "EPS", "Fsa", "AlphabetMismatch", "FsaFormatError", "empty_fsa", "epsilon_fsa", "fsa_from_words",
    "fsa_monoid", "fsa_union", "fsa_concat", "fsa_star", "fsa_reverse_invert", "fsa_relabel", "trim",
    "remove_eps", "determinize", "minimize", "intersect_fsa", "complete_dfa", "same_language", "all_words",
]
