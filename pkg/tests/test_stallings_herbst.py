import random

import pytest

from prefixmonoid.errors import HerbstError
from prefixmonoid.fsa import epsilon_fsa, fsa_from_words, fsa_monoid, fsa_star
from prefixmonoid.herbst import herbst_embed, herbst_rewrite, image_under_iso, star_height, to_expression
from prefixmonoid.rational import RationalSet, all_elements, benois_reduce, member
from prefixmonoid.stallings import evaluate, in_subgroup, stallings, subgroup_intersect, subgroup_member, y_gen
from prefixmonoid.words import Word, free_reduce, product

from conftest import W
from oracles import random_fsa, reduced_words, subgroup_ball

AB = ("a", "b")
Y1, Y2 = y_gen(1), y_gen(2)


def test_single_loop_graph():
    g = stallings([W("a")], AB)
    assert len(g.vertices) == 1
    assert subgroup_member(g, W("aaa")) == Word([(Y1, 1)] * 3)
    assert subgroup_member(g, W("b")) is None


def test_two_generator_membership_and_witness():
    g = stallings([W("aa"), W("b")], AB)
    assert not in_subgroup(g, W("a"))
    assert in_subgroup(g, W("aab"))
    wit = subgroup_member(g, W("aabaa"))
    assert wit == Word([(Y1, 1), (Y2, 1), (Y1, 1)])
    assert free_reduce(evaluate(g, wit)) == W("aabaa")


def test_conjugate_generators():
    g = stallings([W("abA"), W("aa")], AB)
    assert in_subgroup(g, W("abbA"))


def test_membership_matches_enumeration():
    rng = random.Random(4)
    for _ in range(25):
        gens = [free_reduce(W("".join(rng.choice("aAbB") for _ in range(rng.randint(1, 4))))) for _ in range(2)]
        gens = [x for x in gens if x]
        if not gens:
            continue
        g = stallings(gens, AB)
        ball = subgroup_ball(gens, 3)
        for w in ball:
            wit = subgroup_member(g, w)
            assert wit is not None
            assert free_reduce(evaluate(g, wit)) == w


def test_subgroup_intersect_examples():
    everything = all_elements(AB)
    only_a = subgroup_intersect(everything, stallings([W("a")], AB))
    for w in reduced_words(AB, 4):
        assert member(only_a, w) == (w.generators() <= {"a"})
    mon = benois_reduce(fsa_monoid([W("ab"), W("Ba")], AB)[0])
    inside = subgroup_intersect(mon, stallings([W("aa")], AB))
    assert member(inside, W("aa"))
    single = benois_reduce(fsa_from_words([W("b")], AB))
    assert subgroup_intersect(single, stallings([W("a")], AB)).is_empty()


def _image(r, max_len):
    return {w for w in reduced_words(AB, max_len) if member(r, w)}


def test_herbst_rewrite_examples():
    g = stallings([W("aa"), W("b")], AB)
    assert herbst_rewrite(epsilon_fsa(AB), g).accepts(Word())
    out = herbst_rewrite(fsa_from_words([W("aa"), W("baa")], AB), g)
    images = {free_reduce(evaluate(g, w)) for w in out.words(4)}
    assert images == {W("aa"), W("baa")}
    g1 = stallings([W("a")], AB)
    out = herbst_rewrite(fsa_star(fsa_from_words([W("aa")], AB)), g1)
    assert {free_reduce(evaluate(g1, w)) for w in out.words(8)} == {W("a" * (2 * k)) for k in range(5)}


def test_herbst_rewrite_rejects_words_outside_the_subgroup():
    with pytest.raises(HerbstError):
        herbst_rewrite(fsa_from_words([W("b")], AB), stallings([W("a")], AB))


def test_herbst_embed_examples():
    ys = (Y1, Y2)
    one = fsa_from_words([Word([(Y1, 1)])], ys)
    assert benois_reduce(herbst_embed(one, {Y1: W("aa")}, AB)).words(3) == {W("aa")}
    assert herbst_embed(epsilon_fsa(ys), {Y1: W("a")}, AB).accepts(Word())
    mixed = fsa_from_words([Word([(Y1, 1), (Y2, -1)])], ys)
    assert benois_reduce(herbst_embed(mixed, {Y1: W("ab"), Y2: W("b")}, AB)).words(3) == {W("a")}


def test_image_under_iso_examples():
    a_only = ("a",)
    g = stallings([W("aa")], a_only)
    r = benois_reduce(fsa_from_words([W("aa")], a_only))
    assert image_under_iso(r, g, [W("aaa")], a_only).words(8) == {W("aaa")}
    r4 = benois_reduce(fsa_from_words([W("aaaa")], a_only))
    assert image_under_iso(r4, g, [W("aaa")], a_only).words(8) == {W("aaaaaa")}
    eps = benois_reduce(epsilon_fsa(a_only))
    assert image_under_iso(eps, g, [W("aaa")], a_only).words(3) == {Word()}


def test_round_trip_preserves_image():
    rng = random.Random(21)
    for _ in range(30):
        gens = [free_reduce(W("".join(rng.choice("aAbB") for _ in range(rng.randint(1, 3))))) for _ in range(2)]
        gens = [x for x in gens if x] or [W("a")]
        g = stallings(gens, AB)
        ys = tuple(y_gen(i + 1) for i in range(len(g.gens)))
        inner = random_fsa(rng, [y for y in ys], max_states=4)
        outer = herbst_embed(inner, {y: x for y, x in zip(ys, g.gens)}, AB)
        back = herbst_embed(herbst_rewrite(outer, g), {y: x for y, x in zip(ys, g.gens)}, AB)
        assert _image(benois_reduce(outer), 6) == _image(benois_reduce(back), 6)


def test_expression_star_height():
    f = fsa_star(fsa_concat_ab())
    assert star_height(to_expression(f)) >= 1


def fsa_concat_ab():
    return fsa_from_words([W("ab")], AB)


def test_expression_and_coset_rewrites_agree():
    from prefixmonoid.errors import ResourceExceeded
    rng = random.Random(33)
    compared = 0
    for _ in range(40):
        gens = [free_reduce(W("".join(rng.choice("aAbB") for _ in range(rng.randint(1, 3))))) for _ in range(2)]
        gens = [x for x in gens if x] or [W("b")]
        g = stallings(gens, AB)
        ys = tuple(y_gen(i + 1) for i in range(len(g.gens)))
        assignment = {y: x for y, x in zip(ys, g.gens)}
        outer = herbst_embed(random_fsa(rng, list(ys), max_states=3), assignment, AB)
        try:
            by_expr = herbst_rewrite(outer, g, method="expression")
        except ResourceExceeded:
            continue
        by_coset = herbst_rewrite(outer, g, method="cosets")
        compared += 1
        assert _image(benois_reduce(herbst_embed(by_expr, assignment, AB)), 6) == \
            _image(benois_reduce(herbst_embed(by_coset, assignment, AB)), 6)
    assert compared >= 20
