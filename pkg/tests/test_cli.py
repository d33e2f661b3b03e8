import json
import subprocess
import sys
from pathlib import Path

from prefixmonoid.cli import main, run_corpus

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_pieces_both_algorithms(capsys):
    assert run(capsys, "pieces", "abcdacdadabbcdacd")[:2] == (0, "(abcd)(acd)(ad)(abbcd)(acd)\n")
    code, out, _ = run(capsys, "--json", "pieces", CORPUS / "ohare.pres", "--algo", "adjan")
    assert code == 0
    data = json.loads(out)
    assert data["pieces"] == ["abcdacdadabbcdacd"] and data["algo"] == "adjan"


def test_exit_codes_for_answers(capsys):
    assert run(capsys, "prefix-member", CORPUS / "aba.pres", "--word", "B")[0] == 0
    assert run(capsys, "prefix-member", CORPUS / "baa.pres", "--word", "a")[0] == 1
    assert run(capsys, "prefix-member", CORPUS / "unsupported.pres", "--word", "a")[0] == 2
    assert run(capsys, "prefix-member", "a b | aba", "--word", "ab")[0] == 0
    assert run(capsys, "classify", CORPUS / "unsupported.pres")[0] == 2


def test_resource_exceeded_exit_code(capsys):
    code, out, _ = run(capsys, "--automaton-cap", "3", "prefix-member", CORPUS / "bs23.pres", "--word", "Baab")
    assert code == 3
    assert out.startswith("resource-exceeded")


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 64
    assert run(capsys, "prefix-member", CORPUS / "aba.pres")[0] == 64
    assert run(capsys, "oracle", "--word", "a")[0] == 64
    assert run(capsys, "classify", CORPUS / "no-such-file.pres")[0] == 64


def test_parse_errors_report_line_numbers(capsys, tmp_path):
    bad = tmp_path / "bad.pres"
    bad.write_text("# comment\ngens: a B\nrel: aB\n")
    code, _, err = run(capsys, "classify", bad)
    assert code == 65
    assert "line 2" in err and "uppercase" in err
    bad.write_text("gens: a b\nrel: ab?c\n")
    code, _, err = run(capsys, "classify", bad)
    assert code == 65 and "line 2" in err
    bad.write_text("gens: a b\nrel: abc\n")
    code, _, err = run(capsys, "classify", bad)
    assert code == 65 and "unknown letters" in err
    assert run(capsys, "prefix-member", CORPUS / "aba.pres", "--word", "a?")[0] == 65


def test_hnn_spec_errors(capsys, tmp_path):
    spec = tmp_path / "x.hnn"
    spec.write_text("base: free a t\nstable: t\nassoc: a = a\n")
    gens = tmp_path / "g.txt"
    gens.write_text("a\n")
    code, _, err = run(capsys, "submonoid-member", "--hnn", spec, "--gens", gens, "--word", "a")
    assert code == 65 and "line 2" in err and "clashes" in err


GOLDEN_KEYS = {"query", "answer", "class", "method", "witness", "unchecked-hypotheses", "detail", "seconds"}


def test_json_schema(capsys):
    code, out, _ = run(capsys, "--json", "prefix-member", CORPUS / "bs23.pres", "--word", "Baa")
    data = json.loads(out)
    assert code == 0 and set(data) == GOLDEN_KEYS
    data.pop("seconds")
    assert data["query"] == "Baa" and data["answer"] == "yes" and data["class"] == "conj-pinched"
    assert data["detail"] is None and data["unchecked-hypotheses"] == []
    assert isinstance(data["witness"], list) and data["witness"]


def test_submonoid_member(capsys):
    code, out, _ = run(capsys, "--json", "submonoid-member", "--hnn", CORPUS / "bs23.hnn",
                       "--gens", CORPUS / "bs23_dgens.txt", "--word", "atat")
    data = json.loads(out)
    assert code == 0 and data["method"] == "theorem-D" and data["witness"] == ["at", "at"]
    code, out, _ = run(capsys, "submonoid-member", "--amalgam", CORPUS / "free_amalgam.amalgam",
                       "--gens", CORPUS / "free_amalgam_gens.txt", "--word", "A")
    assert code == 1 and out.startswith("no")


def test_munn_reduce_oracle(capsys):
    assert run(capsys, "munn-eq", "aAa", "a")[:2] == (0, "equal\n")
    assert run(capsys, "munn-eq", "aA", "1")[1] == "distinct\n"
    assert run(capsys, "reduce", "abBA c")[0] == 65
    assert run(capsys, "reduce", "abBAc")[1] == "c\n"
    assert run(capsys, "reduce", "--cyclic", "abcA")[1] == "a bc\n"
    code, out, _ = run(capsys, "oracle", "--hnn", CORPUS / "bs23.hnn", "--gens", CORPUS / "bs23_dgens.txt",
                       "--word", "aat", "--max-len", "3")
    assert code == 0 and out.startswith("yes")
    code, out, _ = run(capsys, "oracle", "--hnn", CORPUS / "bs23.hnn", "--gens", CORPUS / "bs23_dgens.txt",
                       "--word", "T", "--max-len", "4")
    assert code == 1 and "exhaustive" in out


def test_adjan_command(capsys):
    code, out, _ = run(capsys, "--json", "adjan", CORPUS / "adjan_aba_baab.pres")
    data = json.loads(out)
    assert code == 0 and data["adjan-class"]["condition"] in ("i", "ii", "iii")


def test_corpus_manifest(capsys, tmp_path):
    summary = run_corpus(CORPUS / "manifest.json")
    assert summary.passed, summary.table()
    assert run(capsys, "corpus", CORPUS / "empty_manifest.json")[0] == 0
    wrong = {"entries": [{"name": "wrong", "command": "prefix-member", "presentation": "baa.pres",
                          "query": "a", "expect": "yes", "provenance": "TRIVIAL"}]}
    path = tmp_path / "wrong.json"
    path.write_text(json.dumps(wrong))
    (tmp_path / "baa.pres").write_text((CORPUS / "baa.pres").read_text())
    code, out, _ = run(capsys, "corpus", path)
    assert code == 1 and "FAIL" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "prefixmonoid", "reduce", "aA"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1\n"
