import json
import subprocess
import sys

import pytest

from congestlab import graph as gr
from congestlab.cli import EXIT_CONFIG, generate, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def records(text):
    return json.loads(text)["records"]


@pytest.fixture
def graph_file(tmp_path):
    def write(g, name="g.txt"):
        p = tmp_path / name
        p.write_text(g.to_edge_list())
        return str(p)

    return write


class TestGenerators:
    def test_specs(self):
        assert generate("er:n=10,p=1", 0).m == 45
        assert generate("cycle:n=6", 0) == gr.cycle_graph(6)
        assert generate("cycle:n=9,len=5", 0).m == 5
        assert generate("petersen", 0).n == 10
        assert generate("girth:n=40,g=7", 3).n == 40
        assert generate("bounded:n=30,d=3", 1).max_degree <= 3

    @pytest.mark.parametrize("spec", ["nope", "er:n=10", "er:n=x,p=0.1", "er:n=10,p"])
    def test_bad_specs(self, spec, capsys):
        code, _, err = run_cli(capsys, "oracle", "--gen", spec)
        assert code == EXIT_CONFIG and "error" in err


class TestGirthApprox:
    def test_c5(self, capsys, graph_file):
        code, out, _ = run_cli(capsys, "girth-approx", "--graph", graph_file(gr.cycle_graph(5)))
        rec = records(out)[0]
        assert code == 0 and rec["estimate"] == "Exact(5)"
        assert {"n", "m", "estimate", "oracle", "rounds", "words", "seed"} <= set(rec)

    def test_petersen(self, capsys):
        code, out, _ = run_cli(capsys, "girth-approx", "--gen", "petersen")
        assert records(out)[0]["consistent"]

    def test_empty_file(self, capsys, tmp_path):
        p = tmp_path / "empty.txt"
        p.write_text("")
        code, _, err = run_cli(capsys, "girth-approx", "--graph", str(p))
        assert code == EXIT_CONFIG and "empty" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "girth-approx", "--graph", str(tmp_path / "nope"))
        assert code == EXIT_CONFIG

    def test_csv_rows(self, capsys):
        code, out, _ = run_cli(capsys, "girth-approx", "--gen", "er:n=30,p=0.2", "--trials", "3", "--format", "csv", "--seed", "5")
        lines = out.strip().splitlines()
        assert code == 0 and len(lines) == 4
        assert [row.split(",")[2] for row in lines[1:]] == ["5", "6", "7"]


class TestList:
    def test_k4_k3(self, capsys):
        _, out, _ = run_cli(capsys, "list", "--gen", "complete:n=4", "--pattern", "K3")
        rec = records(out)[0]
        assert rec["count"] == 4 and rec["match"]

    def test_c6_c6(self, capsys):
        _, out, _ = run_cli(capsys, "list", "--gen", "cycle:n=6", "--pattern", "C6")
        rec = records(out)[0]
        assert rec["count"] == 1 and rec["match"]

    def test_random_c4(self, capsys):
        _, out, _ = run_cli(capsys, "list", "--gen", "er:n=32,p=0.2", "--pattern", "C4")
        assert records(out)[0]["match"]

    def test_pattern_too_large(self, capsys):
        code, _, err = run_cli(capsys, "list", "--gen", "complete:n=12", "--pattern", "C11")
        assert code == EXIT_CONFIG and "oracle" in err


class TestCongest:
    def test_planted_c6_sweep(self, capsys):
        _, out, _ = run_cli(capsys, "detect-congest", "--gen", "plant:n=40,len=6", "--k", "3", "--trials", "50")
        summary = json.loads(out)["summary"]
        assert summary["rate"] >= 2 / 3 and summary["all_validated"]

    def test_c6_free_sweep(self, capsys):
        _, out, _ = run_cli(capsys, "detect-congest", "--gen", "girth:n=40,g=7,extra=10", "--k", "3", "--trials", "10")
        summary = json.loads(out)["summary"]
        assert summary["rate"] == 0 and summary["all_validated"]

    def test_k7_rejected(self, capsys):
        code, _, err = run_cli(capsys, "detect-congest", "--gen", "petersen", "--k", "7")
        assert code == EXIT_CONFIG and "k" in err

    def test_detector_choice(self, capsys):
        _, out, _ = run_cli(capsys, "detect-congest", "--gen", "plant:n=40,len=4", "--k", "2", "--detector", "light")
        assert records(out)[0]["detector"] == "light"

    def test_clique_detect(self, capsys):
        _, out, _ = run_cli(capsys, "detect-clique", "--gen", "cycle:n=5", "--k", "2")
        rec = records(out)[0]
        assert rec["result"] == "free" and not rec["oracle_has_cycle"]


class TestGirthAndReduce:
    def test_petersen_trace(self, capsys):
        _, out, _ = run_cli(capsys, "girth-congest", "--gen", "petersen")
        rec = records(out)[0]
        assert rec["girth"] == "5" and rec["phases"].startswith("3:-;4:-;")

    def test_acyclic(self, capsys):
        _, out, _ = run_cli(capsys, "girth-congest", "--gen", "tree:n=30")
        assert records(out)[0]["girth"] == "inf"

    def test_c6_reduce(self, capsys):
        _, out, _ = run_cli(capsys, "reduce", "--gen", "cycle:n=6", "--colors", "0,1,2,3,4,5", "--iterations", "0")
        rec = records(out)[0]
        assert rec["triangles"] == 2 and rec["equivalent"]
        assert sorted(map(tuple, rec["arcs"])) == [(0, 2), (1, 3), (2, 4), (3, 5), (4, 0), (5, 1)]

    def test_reduce_wrong_color_count(self, capsys):
        code, _, _ = run_cli(capsys, "reduce", "--gen", "cycle:n=6", "--colors", "0,1")
        assert code == EXIT_CONFIG


class TestOutput:
    def test_seed_in_every_record(self, capsys):
        _, out, _ = run_cli(capsys, "oracle", "--gen", "er:n=20,p=0.2", "--trials", "4", "--seed", "11")
        assert [r["seed"] for r in records(out)] == [11, 12, 13, 14]

    def test_byte_identical_reruns(self, capsys):
        args = ["detect-congest", "--gen", "plant:n=40,len=6,p=0.05", "--k", "3", "--trials", "3", "--seed", "4"]
        _, a, _ = run_cli(capsys, *args)
        _, b, _ = run_cli(capsys, *args)
        assert a == b

    def test_workers_do_not_change_output(self, capsys):
        args = ["girth-approx", "--gen", "er:n=30,p=0.15", "--trials", "4"]
        _, a, _ = run_cli(capsys, *args)
        _, b, _ = run_cli(capsys, *args, "--workers", "3")
        assert a == b

    def test_out_file(self, capsys, tmp_path):
        p = tmp_path / "o.json"
        code, out, _ = run_cli(capsys, "oracle", "--gen", "petersen", "--out", str(p))
        assert code == 0 and out == "" and json.loads(p.read_text())["records"][0]["girth"] == "5"

    def test_console_entry(self):
        proc = subprocess.run(
            [sys.executable, "-m", "congestlab.cli", "oracle", "--gen", "complete:n=4", "--pattern", "K3"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0 and json.loads(proc.stdout)["records"][0]["count"] == 4
