"""Acceptance criteria, one test per criterion.

Each test carries ``@pytest.mark.criterion(n, title)``; the terminal summary
prints one PASS/FAIL line per criterion (see conftest.py).  Run this file on
its own with ``python3 tests/test_acceptance.py``.
"""

import itertools
import random
import time
from pathlib import Path

import pytest

from prefixmonoid.cli import main
from prefixmonoid.config import Limits
from prefixmonoid.factorise import adjan_factorisation, benois_pieces, refines
from prefixmonoid.groups import FreeHandle, HnnHandle
from prefixmonoid.herbst import herbst_embed, herbst_rewrite
from prefixmonoid.hnn import NSetBuilder, WSets, member_thmD
from prefixmonoid.munn import fim_equal
from prefixmonoid.oracle import explore
from prefixmonoid.parsing import parse_presentation
from prefixmonoid.rational import benois_reduce
from prefixmonoid.solvers import (
    Presentation, classify, find_witness, prefix_member, right_invertible, solver_for, verify_witness,
)
from prefixmonoid.stallings import stallings, y_gen
from prefixmonoid.words import Word, free_reduce, invert, is_reduced, product, rho

from conftest import W, random_word
from oracles import product_search, random_fsa, reduced_words, shortest_preimage, trivial_path_lengths

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


@pytest.mark.criterion(1, "O'Hare factorisation (benois and adjan)")
def test_ohare_factorisation(capsys):
    start = time.perf_counter()
    assert main(["pieces", "abcdacdadabbcdacd", "--algo", "benois"]) == 0
    assert capsys.readouterr().out.strip() == "(abcd)(acd)(ad)(abbcd)(acd)"
    assert main(["pieces", "abcdacdadabbcdacd", "--algo", "adjan"]) == 0
    assert capsys.readouterr().out.strip() == "(abcdacdadabbcdacd)"
    assert time.perf_counter() - start < 1.0


@pytest.mark.criterion(2, "prefix monoid contrast aba / baa")
def test_prefix_monoid_contrast():
    start = time.perf_counter()
    aba = Presentation.of("ab", "aba")
    tag = classify(aba)[0]
    for q in ("a", "A", "b", "B"):
        assert prefix_member(aba, tag, W(q)), q
    baa = Presentation.of("ab", "baa")
    tag = classify(baa)[0]
    expected = {"A": True, "AA": True, "a": False, "B": False}
    for q, want in expected.items():
        assert prefix_member(baa, tag, W(q)) is want, q
    assert time.perf_counter() - start < 1.0


@pytest.mark.criterion(3, "stable-letter rewriting fixture")
def test_rho_fixture():
    image = rho(W("bTattbTa"), "t")
    assert str(image.image) == "b{0}a{1}b{-1}a{0}"
    assert image.bounds["a"] == (0, 1)


COVERAGE = [
    ("abxy", "axbaybaybaxbaybaxb", "marker"),
    ("abcd", "ababcdcdababcdcdcdcdabab", "disjoint"),
    ("abcd", "abABcdCD", "cyc-pinched"),
    ("ab", "BaabAAA", "conj-pinched"),
    ("abct", "TatcbTTattcbTTTatttc", "posneg(t)"),
    ("ab", "abaBAAB", "adjan"),
]


@pytest.mark.criterion(4, "class coverage against the product oracle")
def test_class_coverage():
    start = time.perf_counter()
    rng = random.Random(404)
    oracle_limits = Limits(oracle_nodes=20000)
    for gens, rel, label in COVERAGE:
        p = Presentation.of(gens, rel)
        tags = classify(p)
        assert label in [t.label for t in tags], (rel, [t.label for t in tags])
        solver = solver_for(p, next(t for t in tags if t.label == label))
        # any canonical normal form of the group will do as the oracle's model
        models = [solver_for(p, t).model for t in tags]
        model = next((m for m in models if m.canonical), solver.model)
        ball, _ = explore(solver.generators, model, 10, oracle_limits)
        queries = [random_word(rng, list(gens), rng.randint(0, 8)) for _ in range(100)]
        members = sorted((w for bucket in ball.elements.values() for w, _ in bucket if len(w) <= 10), key=str)
        queries += rng.sample(members, min(50, len(members)))
        for q in queries:
            answer = solver.member(q)
            if ball.lookup(q) is not None:
                assert answer, (rel, q)
            if answer:
                witness = find_witness(solver, q, ball=ball)
                assert witness is not None and verify_witness(solver, q, witness), (rel, q)
    assert time.perf_counter() - start < 300


@pytest.mark.criterion(5, "Benois saturation against shortest preimages")
def test_benois_saturation():
    start = time.perf_counter()
    rng = random.Random(505)
    for k in range(200):
        gens = ("a", "b") if k % 2 else ("a", "b", "c")
        f = random_fsa(rng, gens, max_states=6)
        r = benois_reduce(f)
        E = trivial_path_lengths(f)
        for w in reduced_words(gens, 6):
            shortest = shortest_preimage(f, w, E)
            accepted = r.automaton.accepts(w)
            if shortest <= 18:
                assert accepted, (f.to_text(), w)
            elif accepted:
                assert shortest <= 64, (f.to_text(), w, shortest)
    assert time.perf_counter() - start < 120


@pytest.mark.criterion(6, "N-set sequences, double inclusion at the bound")
def test_nset_double_inclusion():
    spec = HnnHandle(FreeHandle(("a",)), "t", [W("aa")], [W("aaa")])
    ws = WSets.make([W("a")], [[W("a")]], [[W("A")]])
    builder = NSetBuilder(spec.base, ws)
    gens = [W("a"), W("at"), W("tA")]
    ball, _ = explore(gens, spec, 6)
    for bucket in ball.elements.values():
        for w, witness in bucket:
            m = sum(1 for g, _ in w.letters if g == "t")
            form = spec.britton_reduce(w)
            assert list(form.signs) == [1] * m, w
            assert member_thmD(spec, ws, w, builder=builder), w

    def viable(rest, depth):
        # products of these generators never reduce to a form with t^-1
        form = spec.britton_reduce(rest)
        return all(s > 0 for s in form.signs) and len(form.signs) <= depth

    t = Word([("t", 1)])
    sampled = 0
    for m in range(3):
        for seq in builder.family(m).sequences:
            choices = [sorted(builder.rational(x).words(4), key=str) for x in seq]
            for combo in itertools.product(*choices):
                w = Word(())
                for i, g in enumerate(combo):
                    w = w + g + (t if i < m else Word(()))
                found = product_search(gens, spec, w, 14, viable)
                assert found is not None, w
                assert spec.equal(product(*[gens[i] for i in found]) if found else Word(), w)
                sampled += 1
    assert sampled > 100


@pytest.mark.criterion(7, "free inverse monoid axioms")
def test_munn_axioms():
    start = time.perf_counter()
    rng = random.Random(707)
    for _ in range(1000):
        u = random_word(rng, "ab", rng.randint(0, 10), reduced=False)
        v = random_word(rng, "ab", rng.randint(0, 10), reduced=False)
        assert fim_equal(u, u + invert(u) + u)
        assert fim_equal(u + invert(u) + v + invert(v), v + invert(v) + u + invert(u))
        x = random_word(rng, "ab", rng.randint(0, 4), reduced=False)
        y = random_word(rng, "ab", rng.randint(0, 4), reduced=False)
        for p, q in ((u, v), (x, y), (u, u + invert(x) + x)):
            if fim_equal(p, q):
                assert free_reduce(p) == free_reduce(q)
    assert time.perf_counter() - start < 30


@pytest.mark.criterion(8, "benois pieces refine adjan pieces")
def test_refinement_over_corpus():
    relators = [parse_presentation(f.read_text()).relator for f in sorted(CORPUS.glob("*.pres"))]
    assert len(relators) >= 10
    for r in relators:
        assert refines(benois_pieces(r), adjan_factorisation(r)), r


@pytest.mark.criterion(9, "O'Hare right invertibility")
def test_ohare_right_invertibility():
    p = parse_presentation((CORPUS / "ohare.pres").read_text())
    for q in ("abcd", "acd", "ad", "abbcd"):
        assert right_invertible(p, W(q)), q
    solver = solver_for(p, classify(p)[0])
    # the negatives are exactly the words the bounded product search misses
    ball, _ = explore(solver.generators, solver.model, 12, Limits(oracle_nodes=3000))
    negatives = ["b", "c", "B", "C", "d", "A", "bc", "cd", "db", "ca"]
    for q in negatives:
        assert ball.lookup(W(q)) is None, q
        assert not right_invertible(p, W(q)), q


@pytest.mark.criterion(10, "Herbst round trip")
def test_herbst_round_trip():
    rng = random.Random(1010)
    ab = ("a", "b")

    def image(fsa):
        return {w for w in benois_reduce(fsa).automaton.words(8) if is_reduced(w)}

    for _ in range(100):
        gens = [free_reduce(W("".join(rng.choice("aAbB") for _ in range(rng.randint(1, 3))))) for _ in range(2)]
        gens = [g for g in gens if g] or [W("ab")]
        graph = stallings(gens, ab)
        ys = [y_gen(i + 1) for i in range(len(graph.gens))]
        assignment = dict(zip(ys, graph.gens))
        outer = herbst_embed(random_fsa(rng, ys, max_states=4), assignment, ab)
        back = herbst_embed(herbst_rewrite(outer, graph), assignment, ab)
        assert image(outer) == image(back)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
