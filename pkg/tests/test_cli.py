import json
import os
import subprocess
import sys

import pytest

from ldg.cli import _paint, main
from ldg.syntax import parse_concept, show

from conftest import fixture_path

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")
REGEN = os.environ.get("LDG_REGEN") == "1"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def golden(name, text):
    path = os.path.join(GOLDEN, name)
    if REGEN:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    with open(path, encoding="utf-8") as fh:
        assert text == fh.read()


def test_apply_merge(capsys):
    code, out, _ = run(capsys, "apply", fixture_path("merge.json"), "mrg(i,j)")
    assert code == 0
    golden("apply_merge.json", out)
    edges = {e["id"]: (e["src"], e["tgt"]) for e in json.loads(out)["edges"]}
    assert edges == {"e1": ("i", "l"), "e2": ("k", "i"), "e3": ("i", "i"), "e4": ("i", "k")}
    code, out, _ = run(capsys, "apply", fixture_path("merge.json"), "mrg(i,j)", "--dot")
    golden("apply_merge.dot", out)


def test_apply_out(capsys, tmp_path):
    code, out, _ = run(capsys, "apply", fixture_path("merge.json"), "add_N(z)", "--out", tmp_path)
    assert code == 2 and not out   # z is not a reserved node
    code, _, _ = run(capsys, "apply", fixture_path("merge.json"), "del_N(j)", "--out", tmp_path)
    assert code == 0
    assert (tmp_path / "graph.json").exists() and (tmp_path / "graph.dot").exists()


def test_rewrite_servernet(capsys):
    code, out, _ = run(capsys, "rewrite", fixture_path("servernet.json"),
                       fixture_path("servernet.ldr"), "r0 + r1", "--all")
    assert code == 0
    golden("rewrite_servernet.json", out)
    outcomes = json.loads(out)
    assert [o["outcome"] for o in outcomes] == ["Graph", "AnyGraph"]
    code, out2, _ = run(capsys, "rewrite", fixture_path("servernet.json"),
                        fixture_path("servernet.ldr"), "r0 + r1")
    assert code == 0 and json.loads(out2) == outcomes[0]["graph"]


def test_eliminate(capsys):
    code, out, _ = run(capsys, "eliminate", "(exists r . A)[mrg(i,j)]")
    assert code == 0
    golden("eliminate_exists_mrg.txt", out)
    assert "[" not in out
    code, out, _ = run(capsys, "eliminate", "(exists r . A)[mrg(i,j)]", "--trace")
    assert code == 0 and "~>" in out


def test_bisim(capsys, tmp_path):
    code, out, _ = run(capsys, "bisim", "demo-nonclosure", "--out", tmp_path)
    assert code == 0
    golden("bisim_demo.txt", out)
    args = [tmp_path / "I.json", tmp_path / "J.json", tmp_path / "Z.json"]
    code, out, _ = run(capsys, "bisim", "check", *args)
    assert code == 0 and "is an ALCQUOSelf-bisimulation" in out
    z = json.loads((tmp_path / "Z.json").read_text())
    pairs = z["pairs"] if isinstance(z, dict) else z
    (tmp_path / "Z.json").write_text(json.dumps(pairs + [["d1", "d3'"]]))
    code, out, _ = run(capsys, "bisim", "check", *args, "--features", "QUO")
    assert code == 1 and "ALC_1" in out


def test_fuzz(capsys, tmp_path):
    code, out, _ = run(capsys, "fuzz", "--cases", 15, "--seed", 4, "--out", tmp_path,
                       "--no-chart")
    assert code == 0
    golden("fuzz_small.txt", out)
    summary = json.loads((tmp_path / "fuzz.json").read_text())
    assert len(summary) == 18 and not any(row["failures"] for row in summary)


def test_verify(capsys, tmp_path):
    target = tmp_path / "phi.txt"
    code, out, _ = run(capsys, "verify", fixture_path("spec_mark_all.ldv"), "--trials", 10)
    assert code == 0 and "no counterexample with at most 4 active nodes" in out
    assert "0 violations" in out
    code, out, _ = run(capsys, "verify", fixture_path("servernet.ldv"), "--emit-formula", target)
    assert code == 0
    text = target.read_text().strip()
    assert text.startswith("(") and "(not (" in text
    assert show(parse_concept(text), full=True) == text
    code, out, err = run(capsys, "verify", fixture_path("spec_retag.ldv"), "--bound-nodes", 2)
    assert code == 1 and "counterexample" in err and json.loads(out)["nodes"]
    code, out, _ = run(capsys, "verify", fixture_path("spec_retag.ldv"), "--bound-nodes", 2,
                       "--method", "enum")
    assert code == 1


def test_wp_vc(capsys):
    code, out, _ = run(capsys, "wp", "exists U . A", "--strategy", "mark",
                       "--rules", fixture_path("toy.ldr"))
    assert code == 0 and "i@0" in out
    code, out, _ = run(capsys, "vc", "A", "--strategy", "mark", "--rules", fixture_path("toy.ldr"))
    assert code == 0 and out.strip() == "top"
    code, out, _ = run(capsys, "wp", "A", "--actions", "add_C(i,A)")
    assert code == 0 and out.strip() == "A [add_C(i,A)]"


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "eliminate", "exists r . (")[0] == 2
    assert run(capsys, "apply", tmp_path / "missing.json", "eps")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "apply", bad, "del_N(i)")[0] == 2
    one = tmp_path / "one.json"
    one.write_text(json.dumps({"concepts": ["A", "B"], "roles": ["r", "s"],
                               "nodes": [{"id": "a", "labels": ["A", "B"]}]}))
    code, _, err = run(capsys, "rewrite", one, fixture_path("toy.ldr"), "link* {inv: top}",
                       "--step-bound", 5)
    assert code == 3 and "bound exceeded" in err
    assert run(capsys, "rewrite", one, fixture_path("toy.ldr"), "nope")[0] == 2


def test_color(monkeypatch):
    class Tty:
        def isatty(self):
            return True

    monkeypatch.delenv("LDG_COLOR", raising=False)
    assert _paint("ok", True, Tty()) == "\033[32mok\033[0m"
    assert _paint("no", False, Tty()).startswith("\033[31m")
    monkeypatch.setenv("LDG_COLOR", "0")
    assert _paint("ok", True, Tty()) == "ok"
    assert _paint("ok", True) == "ok"


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "ldg", "eliminate", "A[add_C(i,A)]"],
                         capture_output=True, text=True, check=True).stdout
    assert out.strip() == "A or {i}"
