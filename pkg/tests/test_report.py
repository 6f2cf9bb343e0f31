import json

from ldg.bisim import nonclosure_fixture
from ldg.fuzz import KindStats, biconditional_suite
from ldg.report import draw_graph, write_fuzz_report

from conftest import load_graph

PNG = b"\x89PNG\r\n\x1a\n"


def test_draw_graphs(tmp_path):
    for name in ("merge.json", "servernet.json", "automaton.json"):
        path = draw_graph(load_graph(name), str(tmp_path / (name + ".png")), title=name)
        with open(path, "rb") as fh:
            assert fh.read(8) == PNG
    i, _, _ = nonclosure_fixture()
    assert draw_graph(i.graph, str(tmp_path / "i.png")).endswith("i.png")


def test_fuzz_report(tmp_path):
    stats = biconditional_suite(seed=2, cases=5, kinds=("add_C", "mrg"))
    paths = write_fuzz_report(stats, str(tmp_path))
    assert [p.rsplit("/", 1)[1] for p in paths] == ["fuzz.json", "fuzz.png"]
    rows = json.loads((tmp_path / "fuzz.json").read_text())
    assert [(r["logic"], r["kind"], r["cases"]) for r in rows] == [
        ("dl", "add_C", 5), ("dl", "mrg", 5), ("fol", "add_C", 5), ("fol", "mrg", 5)]
    assert (tmp_path / "fuzz.png").read_bytes()[:8] == PNG


def test_no_chart(tmp_path):
    paths = write_fuzz_report([KindStats("dl", "cl", 3, 1, 0.5)], str(tmp_path), chart=False)
    assert len(paths) == 1 and not (tmp_path / "fuzz.png").exists()
