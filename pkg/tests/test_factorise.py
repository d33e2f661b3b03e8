import pytest

from prefixmonoid.factorise import (
    Factorisation, FactorisationError, adjan_factorisation, adjan_overlap, benois_generators, benois_pieces,
    is_cyclically_reduced, refines, trivial_factorisation, verify_certificates,
)
from prefixmonoid.rational import monoid_set
from prefixmonoid.words import Word, free_reduce, invert

from conftest import W

OHARE = W("abcdacdadabbcdacd")
CORPUS = ["abcdacdadabbcdacd", "axbaybaybaxbaybaxb", "ababcdcdababcdcdcdcdabab", "abABcdCD", "BaabAAA",
          "TatcbTTattcbTTTatttc", "abaBAAB", "aba", "baa", "abC", "abdad", "aabbbAB", "aa", "abab", "abcabc"]


def pieces(f):
    return [str(p) for p in f.pieces]


def test_ohare_pieces():
    assert str(benois_pieces(OHARE)) == "(abcd)(acd)(ad)(abbcd)(acd)"


def test_marker_pieces():
    assert pieces(benois_pieces(W("axbaybaybaxbaybaxb"))) == ["axb", "ayb", "ayb", "axb", "ayb", "axb"]


def test_single_letter_is_one_piece():
    assert pieces(benois_pieces(W("a"))) == ["a"]


def test_adjan_examples():
    assert adjan_overlap([OHARE]) == {OHARE}
    assert str(adjan_factorisation(OHARE)) == "(abcdacdadabbcdacd)"
    # hand runs of the four rules (the empty word is never added)
    # {aa}: rule (i) keeps aa, rule (ii) with v = v' = a adds a; the next round repeats
    assert adjan_overlap([W("aa")]) == {W("a"), W("aa")}
    # {ab, ba}: rule (i) keeps both, rules (ii)-(iv) add a and b; the next round repeats
    assert adjan_overlap([W("ab"), W("ba")]) == {W("a"), W("b"), W("ab"), W("ba")}


def test_cyclic_reduction_gate():
    assert is_cyclically_reduced(W("abab"))
    assert not is_cyclically_reduced(W("abA"))
    assert is_cyclically_reduced(Word())


def test_refinement_examples():
    f = benois_pieces(OHARE)
    assert refines(f, trivial_factorisation(OHARE))
    assert refines(f, f)
    assert refines(f, adjan_factorisation(OHARE))
    with pytest.raises(FactorisationError):
        refines(f, benois_pieces(W("ab")))


@pytest.mark.parametrize("text", CORPUS)
def test_certificates_and_refinement_on_corpus(text):
    w = W(text)
    f = benois_pieces(w)
    assert verify_certificates(f)
    assert refines(f, adjan_factorisation(w))
    assert "".join(pieces(f)) == text


@pytest.mark.parametrize("text", [t for t in CORPUS if is_cyclically_reduced(W(t))])
def test_piece_inverses_lie_in_the_prefix_monoid(text):
    w = W(text)
    ms = monoid_set(benois_generators(w), w.generators())
    for piece in benois_pieces(w).pieces:
        assert invert(piece) in ms


def test_factorisation_validation():
    with pytest.raises(FactorisationError):
        Factorisation(W("ab"), (0,))
    with pytest.raises(FactorisationError):
        Factorisation(W("abc"), (2, 1))
    f = Factorisation.from_pieces([W("ab"), W("c")])
    assert f.relator == W("abc") and f.cut_points == (2,)
