import random

from hypothesis import given

from prefixmonoid.munn import fim_equal, is_idempotent, munn_tree
from prefixmonoid.words import Word, free_reduce, invert

from conftest import W, words_over


def test_tree_examples():
    t = munn_tree(W("aA"))
    assert t.vertices == {Word(), W("a")} and t.endpoint == Word()
    assert munn_tree(Word()).vertices == {Word()}
    t = munn_tree(W("abBc"))
    assert t.vertices == {Word(), W("a"), W("ab"), W("ac")} and t.endpoint == W("ac")


def test_equality_examples():
    assert fim_equal(W("aAa"), W("a"))
    assert not fim_equal(W("aA"), Word())
    assert fim_equal(W("aAbB"), W("bBaA"))


@given(words_over("ab", 10))
def test_vagner_axiom(u):
    assert fim_equal(u, u + invert(u) + u)


@given(words_over("abc", 8), words_over("abc", 8))
def test_idempotents_commute(u, v):
    left = u + invert(u) + v + invert(v)
    right = v + invert(v) + u + invert(u)
    assert fim_equal(left, right)


@given(words_over("ab", 8), words_over("ab", 8))
def test_equality_maps_to_free_group(u, v):
    if fim_equal(u, v):
        assert free_reduce(u) == free_reduce(v)


def test_compatible_with_concatenation():
    rng = random.Random(2)
    words = [Word([(rng.choice("ab"), rng.choice((1, -1))) for _ in range(rng.randint(0, 5))]) for _ in range(60)]
    for _ in range(400):
        u, v, x = rng.choice(words), rng.choice(words), rng.choice(words)
        if fim_equal(u, v):
            assert fim_equal(u + x, v + x)
            assert fim_equal(x + u, x + v)


def test_tree_vertices_are_prefix_reductions():
    w = W("abBAcCa")
    assert munn_tree(w).vertices == {free_reduce(w[:k]) for k in range(len(w) + 1)}
    assert munn_tree(w).endpoint in munn_tree(w).vertices


def test_idempotent_detection():
    assert is_idempotent(W("abBA"))
    assert not is_idempotent(W("ab"))
