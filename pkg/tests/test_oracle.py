from prefixmonoid.config import Limits
from prefixmonoid.groups import FreeHandle, HnnHandle
from prefixmonoid.oracle import evaluate, explore, oracle_member
from prefixmonoid.solvers import Presentation, classify, solver_for

from conftest import W


def test_spec_examples():
    free = FreeHandle(("a",))
    hit = oracle_member([W("a")], free, W("aaa"), 3)
    assert hit.found and hit.answer == "yes" and hit.witness == [0, 0, 0]
    miss = oracle_member([W("a")], free, W("A"), 10)
    assert miss.answer == "not-found" and miss.exhausted

    p = Presentation.of("abcd", "abcdacdadabbcdacd", "inverse-monoid")
    s = solver_for(p, classify(p)[0])
    got = oracle_member(s.generators, s.model, W("abcdacd"), 4)
    assert got.found
    assert s.model.equal(evaluate(s.generators, got.witness), W("abcdacd"))


def test_bound_is_respected():
    free = FreeHandle(("a",))
    assert not oracle_member([W("a")], free, W("aaaa"), 3).found
    assert oracle_member([W("a")], free, W(""), 0).found


def test_node_cap_marks_the_ball_incomplete():
    free = FreeHandle(("a", "b"))
    ball, _ = explore([W("a"), W("b")], free, 10, Limits(oracle_nodes=50))
    assert not ball.exhausted
    res = oracle_member([W("a"), W("b")], free, W("abababab"), 10, Limits(oracle_nodes=50))
    assert not res.found and not res.exhausted


def test_ball_deduplicates_by_element():
    bs = HnnHandle(FreeHandle(("a",)), "t", [W("aa")], [W("aaa")])
    gens = [W("T"), W("aa"), W("t"), W("aaa")]
    ball, _ = explore(gens, bs, 3)
    # T aa t = aaa, so the two words share one entry
    assert ball.lookup(W("Taat")) is not None
    words = [w for bucket in ball.elements.values() for w, _ in bucket]
    assert len(words) == len({bs.invariant(w) for w in words})


def test_witness_evaluates_to_query():
    free = FreeHandle(("a", "b"))
    gens = [W("ab"), W("B"), W("ba")]
    for q in ("a", "abba", "aba"):
        res = oracle_member(gens, free, W(q), 5)
        assert res.found, q
        assert free.equal(evaluate(gens, res.witness), W(q))
