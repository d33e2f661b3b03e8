"""Munn trees: the word problem of the free inverse monoid."""

from __future__ import annotations

from dataclasses import dataclass

from .words import Word, free_reduce, sort_key


@dataclass(frozen=True)
class MunnTree:
    vertices: frozenset  # reduced words; the root is the empty word
    endpoint: Word

    def sorted_vertices(self) -> list:
        return sorted(self.vertices, key=sort_key)

    def edges(self) -> list:
        """(parent, letter, child) for every non-root vertex."""
        return sorted(((v[:-1], v[-1], v) for v in self.vertices if v), key=lambda e: sort_key(e[2]))


def munn_tree(w: Word) -> MunnTree:
    stack: list = []
    seen = {Word()}
    for letter in w.letters:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
            seen.add(Word(stack))
    return MunnTree(frozenset(seen), Word(stack))


def fim_equal(u: Word, v: Word) -> bool:
    return munn_tree(u) == munn_tree(v)


def is_idempotent(w: Word) -> bool:
    return not free_reduce(w)


__all__ = ["MunnTree", "munn_tree", "fim_equal", "is_idempotent"]
