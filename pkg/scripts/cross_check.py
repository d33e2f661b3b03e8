"""Compare a prefix-membership decider with bounded product search.

    python3 scripts/cross_check.py corpus/bs23.pres --queries 200 --max-len 8

Every word the product search reaches must be accepted, and every accepted
word gets a witness that is re-verified.  Prints one line per disagreement
and a summary; exit status 1 if anything disagreed.
"""

import argparse
import random
import sys
import time

from prefixmonoid.cli import load_presentation
from prefixmonoid.config import Limits
from prefixmonoid.oracle import explore
from prefixmonoid.solvers import classify, find_witness, solver_for, verify_witness
from prefixmonoid.words import Word


def random_word(rng, gens, length):
    letters = []
    while len(letters) < length:
        x = (rng.choice(gens), rng.choice((1, -1)))
        if letters and letters[-1] == (x[0], -x[1]):
            continue
        letters.append(x)
    return Word(letters)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("presentation")
    ap.add_argument("--class", dest="cls", help="class label to test (default: every applicable class)")
    ap.add_argument("--queries", type=int, default=100)
    ap.add_argument("--max-len", type=int, default=8, help="length of random queries")
    ap.add_argument("--bound", type=int, default=10, help="product search length")
    ap.add_argument("--nodes", type=int, default=20000, help="product search evaluation cap")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    p = load_presentation(args.presentation)
    tags = [t for t in classify(p) if args.cls in (None, t.label)]
    if not tags or tags[0].name == "unsupported":
        print("no applicable class", file=sys.stderr)
        return 2
    models = [solver_for(p, t).model for t in tags]
    model = next((m for m in models if m.canonical), models[0])
    start = time.perf_counter()
    ball, _ = explore(solver_for(p, tags[0]).generators, model, args.bound, Limits(oracle_nodes=args.nodes))
    print(f"{p}: product ball {len(ball)} elements ({'complete' if ball.exhausted else 'capped'})")
    rng = random.Random(args.seed)
    queries = [random_word(rng, list(p.alphabet), rng.randint(0, args.max_len)) for _ in range(args.queries)]
    bad = 0
    for tag in tags:
        solver = solver_for(p, tag)
        yes = 0
        for q in queries:
            answer = solver.member(q)
            yes += answer
            if ball.lookup(q) is not None and not answer:
                bad += 1
                print(f"  {tag.label}: rejects {q}, a product of prefixes")
            if answer:
                witness = find_witness(solver, q, ball=ball)
                if witness is None or not verify_witness(solver, q, witness):
                    bad += 1
                    print(f"  {tag.label}: no verified witness for {q}")
        print(f"{tag.label:14} {yes:4} yes / {len(queries) - yes:4} no")
    print(f"{bad} disagreements, {time.perf_counter() - start:.1f}s")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
