"""Words over a doubled alphabet and the basic free-group operations on them.

A letter is a pair ``(generator, sign)`` with ``sign`` in ``{+1, -1}``.  A
generator is either a plain string or a ``(name, subscript)`` pair; the latter
is how subscripted letters such as ``a{-2}`` (produced by the stable-letter
rewriting below) are represented.

Text syntax: a lowercase letter is a generator, the same letter uppercase is
its inverse, and an optional ``{k}`` suffix attaches an integer subscript.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

Generator = Union[str, tuple]
Letter = tuple  # (Generator, int)

_TOKEN = re.compile(r"([A-Za-z])(?:\{(-?\d+)\})?")


class WordSyntaxError(ValueError):
    """Raised for malformed word text; ``position`` is the offending column."""

    def __init__(self, message: str, position: int = 0):
        super().__init__(message)
        self.position = position


def gen_key(gen: Generator) -> tuple:
    """Sort key that orders plain generators before subscripted ones."""
    if isinstance(gen, tuple):
        return (gen[0], 1, gen[1])
    return (gen, 0, 0)


def gen_name(gen: Generator) -> str:
    if isinstance(gen, tuple):
        return f"{gen[0]}{{{gen[1]}}}"
    return gen


def letter_text(letter: Letter) -> str:
    gen, sign = letter
    if isinstance(gen, tuple):
        base = gen[0].upper() if sign < 0 else gen[0]
        return f"{base}{{{gen[1]}}}"
    return gen.upper() if sign < 0 else gen


def inverse_letter(letter: Letter) -> Letter:
    return (letter[0], -letter[1])


@dataclass(frozen=True)
class Alphabet:
    """An ordered, duplicate-free, non-empty set of generator symbols."""

    letters: tuple

    def __post_init__(self):
        if not self.letters:
            raise ValueError("alphabet must be non-empty")
        if len(set(self.letters)) != len(self.letters):
            raise ValueError("alphabet has duplicate symbols")

    @classmethod
    def of(cls, *gens: Generator) -> "Alphabet":
        return cls(tuple(gens))

    def __contains__(self, gen) -> bool:
        return gen in self.letters

    def __iter__(self):
        return iter(self.letters)

    def __len__(self):
        return len(self.letters)

    def doubled(self) -> list:
        return [(g, s) for g in self.letters for s in (1, -1)]


class Word:
    """Immutable sequence of signed letters.  Equality is syntactic."""

    __slots__ = ("letters", "_hash")

    def __init__(self, letters: Iterable = ()):
        object.__setattr__(self, "letters", tuple(letters))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def parse(cls, text: str) -> "Word":
        text = text.strip()
        if text in ("", "1", "ε"):
            return cls()
        out = []
        pos = 0
        for m in _TOKEN.finditer(text):
            if m.start() != pos:
                raise WordSyntaxError(f"unexpected character {text[pos]!r} at column {pos}", pos)
            ch, sub = m.group(1), m.group(2)
            gen: Generator = ch.lower() if sub is None else (ch.lower(), int(sub))
            out.append((gen, -1 if ch.isupper() else 1))
            pos = m.end()
        if pos != len(text):
            raise WordSyntaxError(f"unexpected character {text[pos]!r} at column {pos}", pos)
        return cls(out)

    @classmethod
    def from_gens(cls, *gens: Generator) -> "Word":
        return cls((g, 1) for g in gens)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator:
        return iter(self.letters)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return Word(self.letters[idx])
        return self.letters[idx]

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    __mul__ = __add__

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return Word(invert(self).letters * (-n))
        return Word(self.letters * n)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __lt__(self, other: "Word") -> bool:
        return sort_key(self) < sort_key(other)

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(self.letters)
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __str__(self) -> str:
        return "".join(letter_text(x) for x in self.letters) if self.letters else "1"

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def inverse(self) -> "Word":
        return invert(self)

    def reduced(self) -> "Word":
        return free_reduce(self)

    def generators(self) -> set:
        return {g for g, _ in self.letters}

    def is_positive(self) -> bool:
        return all(s > 0 for _, s in self.letters)

    def is_negative(self) -> bool:
        return all(s < 0 for _, s in self.letters)


EMPTY = Word()


def sort_key(w: Word) -> tuple:
    """Shortlex key usable for deterministic ordering of words."""
    return (len(w), tuple((gen_key(g), -s) for g, s in w.letters))


def word(text: str) -> Word:
    return Word.parse(text)


def free_reduce(w: Word) -> Word:
    stack: list = []
    for letter in w.letters:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    if len(stack) == len(w.letters):
        return w
    return Word(stack)


def reduce_letters(letters: Iterable) -> tuple:
    stack: list = []
    for letter in letters:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def product(*words: Word) -> Word:
    """Free-group product: concatenate then reduce."""
    return Word(reduce_letters(x for w in words for x in w.letters))


def is_reduced(w: Word) -> bool:
    ls = w.letters
    return all(not (ls[i][0] == ls[i + 1][0] and ls[i][1] == -ls[i + 1][1]) for i in range(len(ls) - 1))


def invert(w: Word) -> Word:
    return Word((g, -s) for g, s in reversed(w.letters))


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Return ``(conjugator, core)`` with ``w = conjugator core conjugator^-1``."""
    r = free_reduce(w).letters
    i, j = 0, len(r) - 1
    while i < j and r[i][0] == r[j][0] and r[i][1] == -r[j][1]:
        i += 1
        j -= 1
    return Word(r[:i]), Word(r[i : j + 1])


def is_cyclically_reduced(w: Word) -> bool:
    if not is_reduced(w):
        return False
    if len(w) < 2:
        return True
    a, b = w.letters[0], w.letters[-1]
    return not (a[0] == b[0] and a[1] == -b[1])


class UnassignedLetter(KeyError):
    pass


def substitute(template: Word, assignment: Mapping) -> Word:
    """Replace each generator ``y`` by ``assignment[y]`` (inverse for ``y^-1``); no reduction."""
    out: list = []
    for g, s in template.letters:
        try:
            image = assignment[g]
        except KeyError:
            raise UnassignedLetter(f"no assignment for generator {gen_name(g)!r}") from None
        if not isinstance(image, Word):
            image = Word.parse(image) if isinstance(image, str) else Word(image)
        out.extend(image.letters if s > 0 else invert(image).letters)
    return Word(out)


def prefixes(w: Word) -> list[Word]:
    """All prefixes of ``w``, shortest first, including the empty word and ``w``."""
    seen: set = set()
    out = []
    for k in range(len(w) + 1):
        p = w[:k]
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def suffixes(w: Word) -> list[Word]:
    return [w[k:] for k in range(len(w), -1, -1)]


def exponent_sum(w: Word, t: Generator) -> int:
    return sum(s for g, s in w.letters if g == t)


def occurrences(w: Word, gen: Generator) -> int:
    return sum(1 for g, _ in w.letters if g == gen)


def prefix_sums(w: Word, t: Generator) -> list[int]:
    """t-exponent sum of every non-empty prefix."""
    out, s = [], 0
    for g, e in w.letters:
        if g == t:
            s += e
        out.append(s)
    return out


def prefix_sign(w: Word, t: Generator) -> str:
    """Classify the prefix t-exponent sums: positive, negative, mixed or zero-free."""
    if t not in w.generators():
        return "zero-free"
    sums = prefix_sums(w, t)
    if min(sums) >= 0:
        return "positive"
    if max(sums) <= 0:
        return "negative"
    return "mixed"


class RhoError(ValueError):
    pass


@dataclass(frozen=True)
class RhoImage:
    """Image of a zero exponent-sum word under the stable-letter rewriting."""

    image: Word
    bounds: dict = field(hash=False)
    stable: Generator = None

    def window(self) -> list:
        """Every subscripted generator x_l with the bounds of x, including unused ones."""
        out = []
        for x in sorted(self.bounds, key=gen_key):
            lo, hi = self.bounds[x]
            out.extend((x, l) for l in range(lo, hi + 1))
        return out


def rho_letters(w: Word, t: Generator, start: int = 0) -> tuple[Word, int]:
    """Rewrite ``w`` letter by letter; return the subscripted word and final t-sum.

    Valid for any word: ``w = rho_letters(w)[0] * t^final`` holds in the HNN
    extension once ``x_{-i}`` is read as ``t^i x t^-i``.
    """
    out = []
    s = start
    for g, e in w.letters:
        if g == t:
            s += e
        else:
            name = g if isinstance(g, str) else gen_name(g)
            out.append(((name, -s), e))
    return Word(out), s


def rho(w: Word, t: Generator) -> RhoImage:
    if t not in w.generators():
        raise RhoError(f"stable letter {gen_name(t)!r} does not occur")
    if exponent_sum(w, t) != 0:
        raise RhoError(f"stable letter {gen_name(t)!r} has nonzero exponent sum")
    image, _ = rho_letters(w, t)
    bounds: dict = {}
    for (x, l), _ in image.letters:
        lo, hi = bounds.get(x, (l, l))
        bounds[x] = (min(lo, l), max(hi, l))
    return RhoImage(image=image, bounds=bounds, stable=t)
