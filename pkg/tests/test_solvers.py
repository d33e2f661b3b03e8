import random

import pytest

from prefixmonoid.errors import Unsupported
from prefixmonoid.factorise import Factorisation, FactorisationError
from prefixmonoid.groups import TranslatedHandle, rho_hnn
from prefixmonoid.oracle import explore
from prefixmonoid.solvers import (
    OHareConditionError, Presentation, classify, find_witness, ohare_rewrite, posneg_wsets, prefix_member,
    right_invertible, solver_for, verify_witness,
)
from prefixmonoid.words import Word, free_reduce, invert, prefixes, product, rho_letters

from conftest import W, random_word


def labels(p):
    return [t.label for t in classify(p)]


def test_classification_examples():
    assert "marker" in labels(Presentation.of("abxy", "axbaybaybaxbaybaxb"))
    assert "disjoint" in labels(Presentation.of("abcd", "ababcdcdababcdcdcdcdabab"))
    assert labels(Presentation.of("ab", "BaabAAA")) == ["conj-pinched"]
    assert "cyc-pinched" in labels(Presentation.of("abc", "abC"))
    assert "posneg(t)" in labels(Presentation.of("abct", "TatcbTTattcbTTTatttc"))
    assert "adjan" in labels(Presentation.of("ab", "abaBAAB"))
    assert labels(Presentation.of("abcd", "abcdacdadabbcdacd", "inverse-monoid")) == ["ohare"]


def test_unsupported_carries_reasons():
    tags = classify(Presentation.of("ab", "aabbbAB"))
    assert [t.name for t in tags] == ["unsupported"]
    assert tags[0].params["reasons"]
    with pytest.raises(Unsupported):
        solver_for(Presentation.of("ab", "aabbbAB"), tags[0])


def test_marker_markers():
    tag = classify(Presentation.of("abxy", "axbaybaybaxbaybaxb"))[0]
    assert tag.params["markers"] == ["x", "y"]
    assert [str(p) for p in tag.params["pieces"]] == ["axb", "ayb"]


def test_aba_and_baa():
    aba = Presentation.of("ab", "aba")
    for q in ("a", "A", "b", "B", "", "abAB"):
        assert prefix_member(aba, classify(aba)[0], W(q)), q
    baa = Presentation.of("ab", "baa")
    tag = classify(baa)[0]
    for q, want in (("A", True), ("AA", True), ("AAA", True), ("", True), ("a", False), ("B", False), ("aa", False)):
        assert prefix_member(baa, tag, W(q)) is want, q


def test_ohare_rewrite():
    p = Presentation.of("abcd", "abcdacdadabbcdacd", "inverse-monoid")
    assert str(ohare_rewrite(p).relator) == "abAacAadacAadadabAabAacAadacAad"
    minimal = Presentation.of("abd", "abdad", "inverse-monoid")
    assert str(ohare_rewrite(minimal, certify=False).relator) == "abAadad"
    with pytest.raises(OHareConditionError) as info:
        ohare_rewrite(minimal)
    assert info.value.condition == "iii"
    with pytest.raises(OHareConditionError) as info:
        ohare_rewrite(Presentation.of("abcd", "abdacd", "inverse-monoid"))
    assert info.value.condition == "i"


def test_ohare_rewrite_keeps_the_prefix_monoid():
    p = Presentation.of("abcd", "abcdacdadabbcdacd", "inverse-monoid")
    q = ohare_rewrite(p)
    sp, sq = solver_for(p, classify(p)[0]), solver_for(q, classify(q)[0])
    # each side's prefixes lie in the other side's monoid
    for w in sp.generators:
        assert sq.member(w), w
    for w in sq.generators:
        assert sp.member(w), w


def test_right_invertible():
    p = Presentation.of("abcd", "abcdacdadabbcdacd", "inverse-monoid")
    for q in ("abcd", "acd", "ad", "abbcd", "acdad"):
        assert right_invertible(p, W(q)), q
    for q in ("b", "c", "d", "A"):
        assert not right_invertible(p, W(q)), q
    with pytest.raises(ValueError, match="cyclically reduced"):
        right_invertible(Presentation.of("ab", "abA", "inverse-monoid"), W("a"))


ALL_TAGS = [
    ("abcd", "ababcdcdababcdcdcdcdabab"),
    ("ab", "aba"),
    ("abc", "abC"),
    ("abcd", "abABcdCD"),
    ("ab", "abaBAAB"),
]


@pytest.mark.parametrize("gens,rel", ALL_TAGS)
def test_tags_agree(gens, rel):
    p = Presentation.of(gens, rel)
    solvers = [solver_for(p, t) for t in classify(p)]
    assert len(solvers) >= 2
    rng = random.Random(hash(rel) % 1000)
    for _ in range(40):
        q = random_word(rng, list(gens), rng.randint(0, 6))
        answers = {s.tag.label: s.member(q) for s in solvers}
        assert len(set(answers.values())) == 1, (q, answers)


@pytest.mark.parametrize("gens,rel", [("ab", "BaabAAA"), ("abxy", "axbaybaybaxbaybaxb"), ("abct", "TatcbTTattcbTTTatttc")])
def test_invariance_under_reduction_and_relator(gens, rel):
    p = Presentation.of(gens, rel)
    s = solver_for(p, classify(p)[0])
    rng = random.Random(3)
    for _ in range(25):
        q = random_word(rng, list(gens), rng.randint(0, 6))
        padded = q + W("a") + W("A")
        base = s.member(q)
        assert s.member(padded) is base
        assert s.member(q + p.relator) is base
        assert s.member(p.relator + q) is base


@pytest.mark.parametrize("gens,rel", [("ab", "BaabAAA"), ("abcd", "abABcdCD"), ("abxy", "axbaybaybaxbaybaxb")])
def test_witnesses_verify(gens, rel):
    p = Presentation.of(gens, rel)
    s = solver_for(p, classify(p)[0])
    gens_words = s.generators
    rng = random.Random(11)
    for _ in range(15):
        k = rng.randint(0, 4)
        q = product(*[rng.choice(gens_words) for _ in range(k)]) if k else Word()
        assert s.member(q)
        wit = find_witness(s, q)
        assert wit is not None and verify_witness(s, q, wit), q
    assert not verify_witness(s, W("a"), [W("b")])


def test_prefixes_are_members():
    for gens, rel in [("ab", "BaabAAA"), ("abct", "TatcbTTattcbTTTatttc"), ("ab", "abaBAAB"), ("abcd", "abABcdCD")]:
        p = Presentation.of(gens, rel)
        for tag in classify(p):
            s = solver_for(p, tag)
            for pre in prefixes(p.relator):
                assert s.member(pre), (rel, tag.label, pre)


def test_posneg_prefix_rewriting():
    w = W("TatcbTTattcbTTTatttc")
    hnn, images = rho_hnn(tuple("abct"), w, "t")
    wsets, sign = posneg_wsets(w, "t")
    assert sign == "negative"
    t = Word([("t", 1)])
    model = TranslatedHandle(hnn, tuple("abct"), images, (w,))
    for pre in prefixes(w)[1:]:
        r, s = rho_letters(pre, "t")
        # every prefix is x t^s with x over the subscripted letters
        assert free_reduce(r) in wsets.w0 + sum(wsets.w, ())
        power = t ** abs(s) if s >= 0 else invert(t ** abs(s))
        assert hnn.equal(model.translate(pre), product(r, power)), pre


def test_posneg_soundness_against_products():
    p = Presentation.of("abct", "TatcbTTattcbTTTatttc")
    s = solver_for(p, classify(p)[0])
    ball, _ = explore(s.generators, s.model, 3)
    for bucket in ball.elements.values():
        for w, _ in bucket:
            assert s.member(w), w
    assert not s.member(W("t"))


def test_user_factorisation():
    p = Presentation.of("abxy", "axbaybaybaxbaybaxb")
    coarse = Factorisation.from_pieces([W("axbayb"), W("aybaxb"), W("aybaxb")], "user")
    tags = classify(p, coarse)
    assert all(t.provenance in ("user", "syntactic") for t in tags)
    fine = Factorisation.from_pieces([W("a"), W("xbaybaybaxbaybaxb")], "user")
    with pytest.raises(FactorisationError):
        classify(p, fine)


def test_queries_outside_the_alphabet():
    p = Presentation.of("ab", "aba")
    with pytest.raises(ValueError):
        prefix_member(p, classify(p)[0], W("c"))
