"""Text formats for presentations, amalgam and HNN specs, and generator lists.

All formats are line based: ``key: value`` lines, ``#`` starts a comment,
blank lines are ignored.  Every error carries the 1-based line number.
"""

from __future__ import annotations

import re

from .groups import FreeHandle, GroupHandle, AmalgamHandle, HnnHandle, one_relator_handle
from .solvers import Presentation
from .words import Word, WordSyntaxError, gen_name


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


_NAME = re.compile(r"[a-z]$")


def _lines(text: str):
    for number, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, value = body.partition(":")
        if not sep:
            raise ParseError(f"expected 'key: value', got {body!r}", number)
        yield number, key.strip(), value.strip()


def parse_gens(value: str, line: int = 0) -> tuple:
    names = value.replace(",", " ").split()
    if not names:
        raise ParseError("empty generator list", line)
    for name in names:
        if not _NAME.match(name):
            what = "uppercase letters denote inverses" if name.isalpha() and name.isupper() else "bad name"
            raise ParseError(f"generator {name!r} is not a single lowercase letter ({what})", line)
    if len(set(names)) != len(names):
        raise ParseError("repeated generator", line)
    return tuple(names)


def parse_word(text: str, alphabet=None, line: int = 0) -> Word:
    try:
        w = Word.parse(text)
    except WordSyntaxError as exc:
        raise ParseError(f"{exc} (column {exc.position + 1})", line) from exc
    if alphabet is not None:
        extra = w.generators() - set(alphabet)
        if extra:
            raise ParseError("unknown letters: " + ", ".join(sorted(gen_name(g) for g in extra)), line)
    return w


def parse_presentation(text: str) -> Presentation:
    """``kind: group|inverse-monoid``, ``gens: a b``, ``rel: aba``."""
    fields: dict = {}
    for number, key, value in _lines(text):
        if key not in ("kind", "gens", "rel"):
            raise ParseError(f"unknown key {key!r}", number)
        if key in fields:
            raise ParseError(f"duplicate key {key!r}", number)
        fields[key] = (number, value)
    for key in ("gens", "rel"):
        if key not in fields:
            raise ParseError(f"missing '{key}:' line")
    kind_line, kind = fields.get("kind", (0, "group"))
    if kind not in ("group", "inverse-monoid"):
        raise ParseError(f"kind must be group or inverse-monoid, not {kind!r}", kind_line)
    gens = parse_gens(*reversed(fields["gens"]))
    rel_line, rel_text = fields["rel"]
    relator = parse_word(rel_text, gens, rel_line)
    if not relator:
        raise ParseError("empty relator", rel_line)
    return Presentation(gens, relator, kind)


def parse_inline_presentation(text: str) -> Presentation:
    """``a b | aba`` or ``<a,b | aba>``."""
    body = text.strip().lstrip("<").rstrip(">")
    gens, sep, rel = body.partition("|")
    if not sep:
        raise ParseError(f"inline presentation needs 'gens | relator', got {text!r}")
    names = parse_gens(gens)
    return Presentation(names, parse_word(rel, names))


def _factor(value: str, line: int) -> GroupHandle:
    """``free a b`` or ``a b | relator``."""
    if "|" in value:
        gens_text, _, rel = value.partition("|")
        names = parse_gens(gens_text, line)
        return one_relator_handle(names, parse_word(rel, names, line))
    parts = value.split(None, 1)
    if len(parts) != 2 or parts[0] != "free":
        raise ParseError("factor must be 'free a b ...' or 'a b | relator'", line)
    return FreeHandle(parse_gens(parts[1], line))


def _pairs(value: str, left, right, line: int) -> list:
    out = []
    for chunk in value.split(","):
        lhs, sep, rhs = chunk.partition("=")
        if not sep:
            raise ParseError(f"expected 'u = v', got {chunk.strip()!r}", line)
        out.append((parse_word(lhs, left, line), parse_word(rhs, right, line)))
    return out


def parse_amalgam(text: str) -> AmalgamHandle:
    """``factorB:``, ``factorC:`` and one or more ``amalgam: alpha = beta`` lines."""
    factors: dict = {}
    raw_pairs = []
    for number, key, value in _lines(text):
        if key in ("factorB", "factorC"):
            if key in factors:
                raise ParseError(f"duplicate key {key!r}", number)
            factors[key] = _factor(value, number)
        elif key == "amalgam":
            raw_pairs.append((number, value))
        else:
            raise ParseError(f"unknown key {key!r}", number)
    for key in ("factorB", "factorC"):
        if key not in factors:
            raise ParseError(f"missing '{key}:' line")
    B, C = factors["factorB"], factors["factorC"]
    if set(B.gens) & set(C.gens):
        raise ParseError("factors share generators")
    pairs = [p for number, value in raw_pairs for p in _pairs(value, B.gens, C.gens, number)]
    return AmalgamHandle(B, C, [a for a, _ in pairs], [b for _, b in pairs])


def parse_hnn(text: str) -> HnnHandle:
    """``base: free a b``, ``stable: t`` and ``assoc: u = v`` lines (t^-1 u t = v)."""
    base = stable = None
    raw_pairs = []
    for number, key, value in _lines(text):
        if key == "base":
            base = _factor(value, number)
        elif key == "stable":
            names = parse_gens(value, number)
            if len(names) != 1:
                raise ParseError("exactly one stable letter expected", number)
            stable = (names[0], number)
        elif key == "assoc":
            raw_pairs.append((number, value))
        else:
            raise ParseError(f"unknown key {key!r}", number)
    if base is None or stable is None:
        raise ParseError("missing 'base:' or 'stable:' line")
    t, t_line = stable
    if t in base.gens:
        raise ParseError(f"stable letter {t!r} clashes with a base generator", t_line)
    pairs = [p for number, value in raw_pairs for p in _pairs(value, base.gens, base.gens, number)]
    return HnnHandle(base, t, [a for a, _ in pairs], [b for _, b in pairs])


def parse_generator_list(text: str, alphabet) -> list:
    """Whitespace- or comma-separated words, any number per line."""
    out = []
    for number, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        for token in body.replace(",", " ").split():
            out.append(parse_word(token, alphabet, number))
    if not out:
        raise ParseError("no generators given")
    return out


__all__ = [
    "ParseError", "parse_presentation", "parse_inline_presentation", "parse_amalgam", "parse_hnn",
    "parse_generator_list", "parse_word", "parse_gens",
]
