"""Command-line interface: subcommands, outputs, exit codes."""

import json

import pytest

from matchlab import cli

TRIANGLE = "0 1 1.0\n1 2 1.1\n0 2 1.2\n"
PATH = "0 1 2\n1 2 1\n"


@pytest.fixture
def triangle_file(tmp_path):
    p = tmp_path / "triangle.txt"
    p.write_text(TRIANGLE)
    return str(p)


@pytest.fixture
def path_file(tmp_path):
    p = tmp_path / "path.txt"
    p.write_text(PATH)
    return str(p)


class TestSolve:
    def test_path(self, path_file, capsys):
        assert cli.main(["solve", path_file]) == 0
        out = capsys.readouterr().out
        assert "weight: 2" in out and "edges: 0" in out
        assert "unique: True" in out

    def test_oversized_exits_3(self, tmp_path, capsys):
        p = tmp_path / "big.txt"
        p.write_text("".join(f"0 {i + 1} 1\n" for i in range(30)))
        assert cli.main(["solve", str(p)]) == 3
        assert "error:" in capsys.readouterr().err
        assert cli.main(["solve", str(p), "--max-edges", "30"]) == 0


class TestLp:
    def test_triangle_json(self, triangle_file, capsys):
        assert cli.main(["lp", triangle_file]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["tightness"] == "Loose"
        assert doc["objective"] == "33/20"


class TestMp:
    def test_sync_converges(self, path_file, capsys):
        assert cli.main(["mp", path_file]) == 0
        out = capsys.readouterr().out
        assert "Converged at step 2" in out

    def test_no_convergence(self, triangle_file, capsys):
        assert cli.main(["mp", triangle_file, "--max-steps", "200"]) == 0
        out = capsys.readouterr().out
        assert "NoConvergence" in out and "oscillation period: 2" in out

    def test_async_schedule(self, path_file, capsys):
        assert cli.main(["mp", path_file, "--schedule", "async",
                         "--seed", "7"]) == 0
        assert "Converged" in capsys.readouterr().out


class TestTree:
    def test_dump_and_membership(self, path_file, capsys):
        assert cli.main(["tree", path_file, "--root", "0", "1",
                         "--depth", "3"]) == 0
        out = capsys.readouterr().out
        assert "root-edge base=0 depth=3" in out
        assert "root membership: in" in out

    def test_missing_edge_exits_3(self, path_file, capsys):
        assert cli.main(["tree", path_file, "--root", "0", "2",
                         "--depth", "2"]) == 3


class TestCertify:
    def test_loose(self, triangle_file, capsys):
        assert cli.main(["certify", triangle_file]) == 0
        out = capsys.readouterr().out
        assert "kind: StemmedBlossom" in out and "margin: 9/10" in out

    def test_tight(self, path_file, capsys):
        assert cli.main(["certify", path_file]) == 0
        assert "Tight" in capsys.readouterr().out


class TestDiagnose:
    def test_tight_report(self, path_file, capsys):
        assert cli.main(["diagnose", path_file]) == 0
        out = capsys.readouterr().out
        assert "lp: Tight" in out and "predicted bound: 4" in out

    def test_loose_report(self, triangle_file, capsys):
        assert cli.main(["diagnose", triangle_file,
                         "--max-steps", "200"]) == 0
        out = capsys.readouterr().out
        assert "lp: Loose" in out and "margin: 9/10" in out


class TestExperiment:
    def _config(self, tmp_path, extra=""):
        p = tmp_path / "exp.cfg"
        p.write_text("kind=random-general\ninstances=3\nnodes=6\n"
                     "edge_prob=0.5\nseed=5\ntimestamp=off\n"
                     "oracle_max_edges=30\nmax_steps_cap=1500\n" + extra)
        return str(p)

    def test_runs_to_csv(self, tmp_path, capsys):
        cfg = self._config(tmp_path)
        out_file = tmp_path / "out.csv"
        assert cli.main(["experiment", cfg, "--out", str(out_file)]) == 0
        lines = out_file.read_text().strip().splitlines()
        assert lines[0].startswith("instance,seed,a1,a2,lp_tightness")
        assert len(lines) == 4
        assert "3 instances: 3 agree" in capsys.readouterr().err

    def test_stdout_when_no_out(self, tmp_path, capsys):
        assert cli.main(["experiment", self._config(tmp_path)]) == 0
        assert "instance,seed" in capsys.readouterr().out

    def test_deterministic_output(self, tmp_path, capsys):
        cfg = self._config(tmp_path)
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert cli.main(["experiment", cfg, "--out", str(a)]) == 0
        assert cli.main(["experiment", cfg, "--out", str(b)]) == 0
        assert a.read_text() == b.read_text()

    def test_bad_config_exits_3(self, tmp_path, capsys):
        p = tmp_path / "bad.cfg"
        p.write_text("this is not key value\n")
        assert cli.main(["experiment", str(p)]) == 3

    def test_missing_config_exits_3(self, capsys):
        assert cli.main(["experiment", "/no/such/file.cfg"]) == 3


def test_missing_graph_file_exits_3(capsys):
    assert cli.main(["lp", "/no/such/graph.txt"]) == 3
    assert "error:" in capsys.readouterr().err


def test_malformed_graph_exits_3(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("0 0 1\n")
    assert cli.main(["solve", str(p)]) == 3
    assert "self-loop" in capsys.readouterr().err
