import json
import subprocess
import sys

import pytest

from impactlab.callgraph import load_graph
from impactlab.cli import main
from impactlab.minilang import corpus_source
from impactlab.mutation import load_dataset


@pytest.fixture
def work(tmp_path):
    (tmp_path / "fig1.mini").write_text(corpus_source("fig1"))
    return tmp_path


def run(*args) -> int:
    return main([str(a) for a in args])


@pytest.fixture
def pipeline(work):
    assert run("extract", work / "fig1.mini", "-o", work / "g.jsonl") == 0
    assert run("mutate", work / "fig1.mini", work / "g.jsonl", "--cap", 20, "--seed", 1, "-o", work / "m.jsonl") == 0
    return work


class TestExtract:
    def test_edge_counts(self, work):
        assert run("extract", work / "fig1.mini", "-o", work / "cha.jsonl") == 0
        assert run("extract", work / "fig1.mini", "--cha=false", "-o", work / "plain.jsonl") == 0
        assert len(load_graph((work / "cha.jsonl").read_bytes()).edges) == 7
        assert len(load_graph((work / "plain.jsonl").read_bytes()).edges) == 6

    def test_stdout(self, work, capsysbinary):
        assert run("extract", work / "fig1.mini") == 0
        assert capsysbinary.readouterr().out.startswith(b'{"format": "cig-graph"')

    def test_parse_error(self, work, capsys):
        (work / "bad.mini").write_text("fn f( {")
        assert run("extract", work / "bad.mini") == 2
        assert "1:" in capsys.readouterr().err

    def test_missing_file(self, work):
        assert run("extract", work / "nope.mini") == 2


class TestMutate:
    def test_dataset(self, pipeline):
        h, records = load_dataset((pipeline / "m.jsonl").read_bytes())
        assert len(h) == 64
        assert {r.operator for r in records} == {"ABS", "AOR", "ROR", "UOI"}

    def test_red_baseline(self, work):
        (work / "red.mini").write_text(corpus_source("fig1").replace("== 24", "== 25"))
        assert run("extract", work / "red.mini", "-o", work / "g.jsonl") == 0
        assert run("mutate", work / "red.mini", work / "g.jsonl", "-o", work / "m.jsonl") == 3

    def test_cap_zero(self, work, capsys):
        run("extract", work / "fig1.mini", "-o", work / "g.jsonl")
        assert run("mutate", work / "fig1.mini", work / "g.jsonl", "--cap", 0, "-o", work / "m.jsonl") == 0
        assert load_dataset((work / "m.jsonl").read_bytes())[1] == []

    def test_byte_identical_reruns(self, pipeline):
        args = ("mutate", pipeline / "fig1.mini", pipeline / "g.jsonl", "--cap", 20, "--seed", 1)
        run(*args, "-o", pipeline / "again.jsonl")
        run(*args, "--jobs", 2, "-o", pipeline / "par.jsonl")
        assert (pipeline / "again.jsonl").read_bytes() == (pipeline / "m.jsonl").read_bytes()
        assert (pipeline / "par.jsonl").read_bytes() == (pipeline / "m.jsonl").read_bytes()

    def test_bad_operator(self, pipeline):
        with pytest.raises(SystemExit) as info:
            run("mutate", pipeline / "fig1.mini", pipeline / "g.jsonl", "--operators", "XYZ")
        assert info.value.code == 2


class TestDownstream:
    def test_learn_predict_histogram(self, pipeline, capsys):
        assert run("learn", pipeline / "g.jsonl", pipeline / "m.jsonl", "--algo", "binary", "-o", pipeline / "w.jsonl") == 0
        capsys.readouterr()
        assert run("predict", pipeline / "g.jsonl", "--changed", "mul", "--weights", pipeline / "w.jsonl", "--threshold", 0.5) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["changed"] == "mul" and set(out["cis"]) <= {"test_mul", "test_pow", "test_fac", "test_op"}
        assert run("histogram", pipeline / "g.jsonl", pipeline / "w.jsonl", "--format", "json") == 0
        bins = json.loads(capsys.readouterr().out)
        assert len(bins) == 10 and sum(b["percent"] for b in bins) == pytest.approx(100)

    def test_predict_tc(self, pipeline, capsys):
        assert run("predict", pipeline / "g.jsonl", "--changed", "mul") == 0
        assert json.loads(capsys.readouterr().out)["cis"] == ["test_fac", "test_mul", "test_op", "test_pow"]

    def test_predict_unknown_node(self, pipeline):
        assert run("predict", pipeline / "g.jsonl", "--changed", "ghost") == 2

    def test_evaluate_tc_only(self, pipeline, capsys):
        code = run("evaluate", pipeline / "g.jsonl", pipeline / "m.jsonl", "--algo", "tc", "--repeats", 2, "--format", "json")
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["techniques"] == ["tc"]
        assert report["mann_whitney"]["tests"] == []

    def test_evaluate_formats(self, pipeline, capsys):
        for fmt in ("text", "csv"):
            assert run("evaluate", pipeline / "g.jsonl", pipeline / "m.jsonl", "--repeats", 1, "--format", fmt) == 0
        out = capsys.readouterr().out
        assert "ALL" in out and "operator,technique" in out

    def test_sweep(self, pipeline, capsys):
        code = run("sweep", pipeline / "g.jsonl", pipeline / "m.jsonl", "--thresholds", "0,0.5", "--repeats", 1, "--format", "json")
        assert code == 0
        assert [r["threshold"] for r in json.loads(capsys.readouterr().out)["sweep"]] == [0.0, 0.5]

    def test_graph_mismatch(self, pipeline):
        run("extract", pipeline / "fig1.mini", "--cha=false", "-o", pipeline / "plain.jsonl")
        assert run("learn", pipeline / "plain.jsonl", pipeline / "m.jsonl") == 4

    def test_dangling_edge(self, work):
        (work / "g.jsonl").write_text(
            '{"format":"cig-graph","version":1}\n{"edge":{"caller":"a","callee":"b","via_cha":false}}\n'
        )
        assert run("predict", work / "g.jsonl", "--changed", "a") == 4

    def test_bad_threshold(self, pipeline):
        with pytest.raises(SystemExit) as info:
            run("predict", pipeline / "g.jsonl", "--changed", "mul", "--threshold", "1.5")
        assert info.value.code == 2


class TestSynth:
    def test_writes_three_files(self, tmp_path):
        args = ("synth", "--apps", 20, "--tests", 5, "--density", 0.2, "--seed", 3, "--out-dir", tmp_path)
        assert run(*args) == 0
        first = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
        assert set(first) == {"graph.jsonl", "mutations.jsonl", "planted.jsonl"}
        assert run(*args) == 0
        assert {p.name: p.read_bytes() for p in tmp_path.iterdir()} == first

    @pytest.mark.parametrize("density", ["0", "1.5", "0.0001"])
    def test_generation_failure(self, tmp_path, density):
        assert run("synth", "--apps", 60, "--tests", 20, "--density", density, "--out-dir", tmp_path) == 5

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "impactlab", "--version"], capture_output=True, text=True)
        assert proc.returncode == 0 and "impactlab" in proc.stdout
