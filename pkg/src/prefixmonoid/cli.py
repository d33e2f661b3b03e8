"""Command line interface.

Exit codes: 0 yes/success, 1 no, 2 unsupported, 3 resource-exceeded,
64 usage error, 65 parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .amalgam import submonoid_member as amalgam_member
from .config import DEFAULT_LIMITS, Limits
from .errors import ResourceExceeded, Unsupported
from .factorise import Factorisation, FactorisationError, adjan_factorisation, adjan_overlap, benois_pieces
from .groups import AmalgamHandle
from .hnn import submonoid_member as hnn_member
from .munn import fim_equal, munn_tree
from .oracle import evaluate, oracle_member
from .parsing import (
    ParseError, parse_amalgam, parse_generator_list, parse_hnn, parse_inline_presentation,
    parse_presentation, parse_word,
)
from .solvers import (
    ClassTag, Presentation, adjan_check, classify, find_witness, right_invertible, solver_for, verify_witness,
)
from .words import Word, WordSyntaxError, cyclic_reduce, free_reduce, sort_key

EXIT = {"yes": 0, "success": 0, "no": 1, "not-found": 1, "unsupported": 2, "resource-exceeded": 3}
EXIT_USAGE, EXIT_PARSE = 64, 65
DEFAULT_MAX_LEN = 10


class UsageError(Exception):
    pass


@dataclass
class QueryReport:
    query: str
    answer: str  # yes / no / unsupported / resource-exceeded
    cls: str | None = None
    method: str | None = None
    witness: list | None = None
    unchecked: list = field(default_factory=list)
    detail: str | None = None
    seconds: float = 0.0

    def as_json(self) -> dict:
        return {
            "query": self.query,
            "answer": self.answer,
            "class": self.cls,
            "method": self.method,
            "witness": self.witness,
            "unchecked-hypotheses": list(self.unchecked),
            "detail": self.detail,
            "seconds": round(self.seconds, 4),
        }

    def text(self) -> str:
        parts = [self.answer]
        if self.cls:
            parts.append(f"class={self.cls}")
        if self.method:
            parts.append(f"method={self.method}")
        if self.witness is not None:
            parts.append("witness=" + ("*".join(self.witness) if self.witness else "1"))
        if self.detail:
            parts.append(f"({self.detail})")
        return " ".join(parts)

    @property
    def exit_code(self) -> int:
        return EXIT[self.answer]


# ----- loading inputs --------------------------------------------------------------------

def load_presentation(source: str) -> Presentation:
    """A presentation file, or an inline ``a b | relator``."""
    if os.path.isfile(source):
        return parse_presentation(Path(source).read_text())
    if "|" in source:
        return parse_inline_presentation(source)
    raise UsageError(f"{source!r} is neither a file nor an inline 'gens | relator' presentation")


def load_relator(source: str) -> Word:
    if os.path.isfile(source):
        return parse_presentation(Path(source).read_text()).relator
    if "|" in source:
        return parse_inline_presentation(source).relator
    return parse_word(source)


def parse_factorisation(text: str, relator: Word) -> Factorisation:
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise ParseError(f"factorisation must look like (..)(..), got {text!r}")
    pieces = [parse_word(x) for x in body[1:-1].split(")(")]
    f = Factorisation.from_pieces(pieces)
    if f.relator != relator:
        raise ParseError("factorisation pieces do not spell the relator")
    return f


def _pick_tag(p: Presentation, label: str | None, f: Factorisation | None, limits: Limits) -> ClassTag:
    tags = classify(p, f, limits)
    if label is None:
        return tags[0]
    for tag in tags:
        if tag.label == label or tag.name == label:
            return tag
    raise Unsupported(f"class {label!r} does not apply; applicable: {', '.join(t.label for t in tags)}")


def _describe_unsupported(tag: ClassTag) -> str:
    return "; ".join(tag.params.get("reasons", [])) or "no decidable class applies"


# ----- query runners (shared by the CLI and the corpus runner) ---------------------------

def prefix_query(p: Presentation, query: Word, limits: Limits = DEFAULT_LIMITS, label: str | None = None,
                 f: Factorisation | None = None, invertibility: bool = False, witness: bool = True) -> QueryReport:
    start = time.perf_counter()
    report = QueryReport(str(query), "unsupported")
    try:
        tag = _pick_tag(p, label, f, limits)
        report.cls = tag.label
        if tag.name == "unsupported":
            report.detail = _describe_unsupported(tag)
            return report
        solver = solver_for(p, tag, limits)
        report.method, report.unchecked = solver.method, list(solver.unchecked)
        answer = right_invertible(p, query, tag, limits) if invertibility else solver.member(query)
        report.answer = "yes" if answer else "no"
        if answer and witness:
            found = find_witness(solver, query, limits)
            if found is not None and verify_witness(solver, query, found):
                report.witness = [str(w) for w in found]
    except Unsupported as exc:
        report.answer, report.detail = "unsupported", str(exc)
    except ResourceExceeded as exc:
        report.answer, report.detail = "resource-exceeded", str(exc)
    except ValueError as exc:
        if invertibility and "cyclically reduced" in str(exc):
            report.answer, report.detail = "unsupported", str(exc)
        else:
            raise
    finally:
        report.seconds = time.perf_counter() - start
    return report


def submonoid_query(spec, gens: list, query: Word, limits: Limits = DEFAULT_LIMITS,
                    max_len: int = DEFAULT_MAX_LEN) -> QueryReport:
    start = time.perf_counter()
    report = QueryReport(str(query), "unsupported", cls=spec.kind)
    try:
        decide = amalgam_member if isinstance(spec, AmalgamHandle) else hnn_member
        answer, report.method = decide(spec, gens, query, limits)
        report.answer = "yes" if answer else "no"
        if answer:
            found = oracle_member(gens, spec, query, max_len, limits)
            if found.found and spec.equal(evaluate(gens, found.witness), query):
                report.witness = [str(gens[i]) for i in found.witness]
    except Unsupported as exc:
        report.answer, report.detail = "unsupported", str(exc)
    except ResourceExceeded as exc:
        report.answer, report.detail = "resource-exceeded", str(exc)
    finally:
        report.seconds = time.perf_counter() - start
    return report


def pieces_text(relator: Word, algo: str) -> str:
    return str(benois_pieces(relator) if algo == "benois" else adjan_factorisation(relator))


def pieces_json(relator: Word, algo: str) -> dict:
    f = benois_pieces(relator) if algo == "benois" else adjan_factorisation(relator)
    return {
        "relator": str(relator),
        "algo": algo,
        "pieces": [str(x) for x in f.pieces],
        "cuts": list(f.cut_points),
        "certificates": {str(k): [str(x) for x in v] for k, v in sorted(f.certificates.items())},
    }


# ----- corpus ----------------------------------------------------------------------------

@dataclass
class CorpusRow:
    name: str
    command: str
    expected: str
    got: str
    provenance: str
    ok: bool


@dataclass
class CorpusSummary:
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows)

    def table(self) -> str:
        lines = [f"{'status':6} {'entry':32} {'command':18} {'expected':24} got"]
        for r in self.rows:
            lines.append(f"{'PASS' if r.ok else 'FAIL':6} {r.name:32} {r.command:18} {r.expected:24} {r.got}"
                         f"  [{r.provenance}]")
        lines.append(f"{sum(r.ok for r in self.rows)}/{len(self.rows)} passed")
        return "\n".join(lines)


def _corpus_entry(entry: dict, root: Path, limits: Limits) -> str:
    command = entry["command"]
    source = entry.get("presentation")
    if source is not None and not ("|" in source):
        source = str(root / source)
    if command in ("prefix-member", "right-invertible"):
        p = load_presentation(source)
        query = parse_word(entry["query"], p.alphabet)
        return prefix_query(p, query, limits, entry.get("class"), invertibility=command == "right-invertible",
                            witness=False).answer
    if command == "classify":
        return " ".join(t.label for t in classify(load_presentation(source), limits=limits))
    if command == "pieces":
        return pieces_text(load_relator(source), entry.get("algo", "benois"))
    if command == "submonoid-member":
        kind = "amalgam" if "amalgam" in entry else "hnn"
        text = (root / entry[kind]).read_text()
        spec = parse_amalgam(text) if kind == "amalgam" else parse_hnn(text)
        gens = [parse_word(g, spec.gens) for g in entry["gens"]]
        return submonoid_query(spec, gens, parse_word(entry["query"], spec.gens), limits).answer
    raise UsageError(f"unknown corpus command {command!r}")


def run_corpus(manifest, limits: Limits = DEFAULT_LIMITS) -> CorpusSummary:
    """Run every manifest entry and compare with its expectation.

    ``manifest`` is a path to a JSON file ``{"entries": [...]}`` or the already
    loaded dict.  Paths inside entries are relative to the manifest file.
    """
    if isinstance(manifest, (str, Path)):
        root = Path(manifest).parent
        data = json.loads(Path(manifest).read_text())
    else:
        root, data = Path("."), manifest
    summary = CorpusSummary()
    for i, entry in enumerate(data.get("entries", [])):
        name = entry.get("name", f"entry-{i}")
        expected = entry["expect"]
        try:
            got = _corpus_entry(entry, root, limits)
        except (ParseError, WordSyntaxError, UsageError, OSError, KeyError) as exc:
            got = f"error: {exc}"
        if entry["command"] == "classify":
            ok = expected in got.split()
        else:
            ok = got == expected
        summary.rows.append(CorpusRow(name, entry["command"], expected, got, entry.get("provenance", "?"), ok))
    return summary


# ----- argument parsing ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    def flags(suppress: bool) -> argparse.ArgumentParser:
        # the global flags may come before or after the subcommand; the copy on
        # the subcommands must not overwrite a value given before it
        default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        p = _Parser(add_help=False)
        p.add_argument("--json", action="store_true", default=default(False), help="machine-readable output")
        p.add_argument("--max-len", type=int, default=default(DEFAULT_MAX_LEN), help="oracle search bound")
        p.add_argument("--automaton-cap", type=int, default=default(DEFAULT_LIMITS.automaton_cap),
                       help="size cap for intermediate automata")
        return p

    common = flags(suppress=True)
    parser = _Parser(prog="prefixmonoid", description="Prefix monoid membership for one-relator groups.",
                     parents=[flags(suppress=False)])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    c = cmd("classify", "list the decidable classes a presentation falls into")
    c.add_argument("presentation", help="presentation file or inline 'a b | relator'")
    c.add_argument("--factorisation", help="user factorisation such as (ab)(cd)")

    c = cmd("pieces", "split a relator into invertible pieces")
    c.add_argument("relator", help="relator word, presentation file, or inline presentation")
    c.add_argument("--algo", choices=["benois", "adjan"], default="benois")

    c = cmd("adjan", "Adjan overlap set and Adjan-class check")
    c.add_argument("presentation")

    for name, help_text in (("prefix-member", "is the word in the prefix monoid?"),
                            ("right-invertible", "is the word right invertible in Inv<X | w=1>?")):
        c = cmd(name, help_text)
        c.add_argument("presentation")
        c.add_argument("--word", required=True)
        c.add_argument("--class", dest="cls", help="use this class (label from classify)")
        c.add_argument("--factorisation")
        c.add_argument("--no-witness", action="store_true")

    c = cmd("submonoid-member", "membership in a submonoid of an amalgam or HNN extension")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--amalgam", help="amalgam spec file")
    g.add_argument("--hnn", help="HNN spec file")
    c.add_argument("--gens", required=True, help="file listing generator words")
    c.add_argument("--word", required=True)

    c = cmd("munn-eq", "word problem of the free inverse monoid")
    c.add_argument("u")
    c.add_argument("v")
    c.add_argument("--trees", action="store_true", help="also print both Munn trees")

    c = cmd("oracle", "bounded breadth-first product search")
    c.add_argument("presentation", nargs="?", help="search over the prefixes of this presentation")
    g = c.add_mutually_exclusive_group()
    g.add_argument("--amalgam")
    g.add_argument("--hnn")
    c.add_argument("--gens", help="generator file (with --amalgam/--hnn)")
    c.add_argument("--word", required=True)

    c = cmd("reduce", "free (or cyclic) reduction of a word")
    c.add_argument("word")
    c.add_argument("--cyclic", action="store_true")

    c = cmd("corpus", "run a corpus manifest")
    c.add_argument("manifest")
    return parser


def _emit(args, payload, text: str) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True) if args.json else text)


def _spec_from(args):
    if args.amalgam:
        return parse_amalgam(Path(args.amalgam).read_text())
    return parse_hnn(Path(args.hnn).read_text())


def _dispatch(args, limits: Limits) -> int:
    if args.command == "classify":
        p = load_presentation(args.presentation)
        f = parse_factorisation(args.factorisation, p.relator) if args.factorisation else None
        tags = classify(p, f, limits)
        payload = {"presentation": str(p), "classes": [t.describe() for t in tags]}
        lines = [str(p)] + [f"  {t.label} [{t.provenance}]" for t in tags]
        if tags[0].name == "unsupported":
            lines += [f"    {r}" for r in tags[0].params.get("reasons", [])]
        _emit(args, payload, "\n".join(lines))
        return EXIT["unsupported"] if tags[0].name == "unsupported" else 0

    if args.command == "pieces":
        relator = load_relator(args.relator)
        _emit(args, pieces_json(relator, args.algo), pieces_text(relator, args.algo))
        return 0

    if args.command == "adjan":
        p = load_presentation(args.presentation)
        gamma = sorted(adjan_overlap([p.relator]), key=sort_key)
        check = adjan_check(p)
        payload = {"overlap-set": [str(w) for w in gamma], "factorisation": str(adjan_factorisation(p.relator)),
                   "adjan-class": None if check is None else
                   {"a": str(check[0]), "b": str(check[1]), "condition": check[2], "case": check[3]}}
        text = [f"overlap set: {{{', '.join(str(w) for w in gamma)}}}",
                f"factorisation: {payload['factorisation']}",
                "adjan class: " + ("no" if check is None else f"yes (condition {check[2]}, {check[3]})")]
        _emit(args, payload, "\n".join(text))
        return 0

    if args.command in ("prefix-member", "right-invertible"):
        p = load_presentation(args.presentation)
        query = parse_word(args.word, p.alphabet)
        f = parse_factorisation(args.factorisation, p.relator) if args.factorisation else None
        report = prefix_query(p, query, limits, args.cls, f, args.command == "right-invertible",
                              not args.no_witness)
        _emit(args, report.as_json(), report.text())
        return report.exit_code

    if args.command == "submonoid-member":
        spec = _spec_from(args)
        gens = parse_generator_list(Path(args.gens).read_text(), spec.gens)
        report = submonoid_query(spec, gens, parse_word(args.word, spec.gens), limits, args.max_len)
        _emit(args, report.as_json(), report.text())
        return report.exit_code

    if args.command == "munn-eq":
        u, v = parse_word(args.u), parse_word(args.v)
        same = fim_equal(u, v)
        payload = {"u": str(u), "v": str(v), "answer": "equal" if same else "distinct"}
        text = payload["answer"]
        if args.trees:
            trees = {k: [str(x) for x in munn_tree(w).sorted_vertices()] for k, w in (("u", u), ("v", v))}
            payload["trees"] = trees
            text += "\n" + "\n".join(f"{k}: {' '.join(vs)}" for k, vs in trees.items())
        _emit(args, payload, text)
        return 0

    if args.command == "oracle":
        if args.amalgam or args.hnn:
            if not args.gens:
                raise UsageError("--gens is required with --amalgam/--hnn")
            model = _spec_from(args)
            gens = parse_generator_list(Path(args.gens).read_text(), model.gens)
        elif args.presentation:
            p = load_presentation(args.presentation)
            tag = classify(p, limits=limits)[0]
            if tag.name == "unsupported":
                report = QueryReport(args.word, "unsupported", detail="no model for this presentation")
                _emit(args, report.as_json(), report.text())
                return report.exit_code
            solver = solver_for(p, tag, limits)
            model, gens = solver.model, solver.generators
        else:
            raise UsageError("oracle needs a presentation or --amalgam/--hnn with --gens")
        query = parse_word(args.word, model.gens)
        result = oracle_member(gens, model, query, args.max_len, limits)
        payload = {"query": str(query), "answer": result.answer, "explored": result.explored,
                   "exhausted": result.exhausted,
                   "witness": None if result.witness is None else [str(gens[i]) for i in result.witness]}
        text = result.answer
        if result.found:
            text += " witness=" + ("*".join(payload["witness"]) or "1")
        else:
            text += f" (bound {args.max_len}, {'exhaustive' if result.exhausted else 'node cap hit'})"
        _emit(args, payload, text)
        return EXIT[result.answer]

    if args.command == "reduce":
        w = parse_word(args.word)
        if args.cyclic:
            conj, core = cyclic_reduce(w)
            _emit(args, {"word": str(w), "conjugator": str(conj), "core": str(core)}, f"{conj} {core}")
        else:
            red = free_reduce(w)
            _emit(args, {"word": str(w), "reduced": str(red)}, str(red))
        return 0

    if args.command == "corpus":
        summary = run_corpus(args.manifest, limits)
        payload = {"passed": summary.passed, "entries": [r.__dict__ for r in summary.rows]}
        _emit(args, payload, summary.table())
        return 0 if summary.passed else 1
    raise UsageError(f"unknown command {args.command}")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        limits = Limits(automaton_cap=args.automaton_cap)
        return _dispatch(args, limits)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, WordSyntaxError, FactorisationError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Unsupported as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT["unsupported"]
    except ResourceExceeded as exc:
        print(f"resource exceeded: {exc}", file=sys.stderr)
        return EXIT["resource-exceeded"]


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
