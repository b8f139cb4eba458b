"""Command-line surface: flags, exit codes, reproducibility, reporting."""

import os

import pytest

from evne.cli import dispatch


def run_cli(*argv):
    return dispatch(list(argv))


def test_gen_substrate_writes_requested_shape(tmp_path, capsys):
    out = tmp_path / "sn.brite"
    code = run_cli("gen-substrate", "--nodes", "20", "--links", "45",
                   "--bw", "50:100", "--seed", "7", "-o", str(out))
    assert code == 0
    text = out.read_text()
    assert text.startswith("Topology: ( 20 Nodes, 45 Edges )")


def test_gen_workload_writes_requested_count(tmp_path):
    out = tmp_path / "wl.jsonl"
    code = run_cli("gen-workload", "--count", "25", "--vn-nodes", "2:5",
                   "--seed", "3", "-o", str(out))
    assert code == 0
    assert len(out.read_text().splitlines()) == 25


def test_unknown_solver_exits_one(tmp_path, capsys):
    code = run_cli("run", "--solver", "nosuch", "--substrate", "x",
                   "--workload", "y", "-o", "z")
    assert code == 1
    assert "--solver" in capsys.readouterr().err


def test_missing_file_exits_one(tmp_path, capsys):
    code = run_cli("run", "--substrate", str(tmp_path / "absent.brite"),
                   "--workload", str(tmp_path / "absent.jsonl"),
                   "-o", str(tmp_path / "out.csv"))
    assert code == 1
    assert "absent.brite" in capsys.readouterr().err


def test_malformed_range_exits_one(tmp_path, capsys):
    code = run_cli("gen-substrate", "--bw", "fifty-to-hundred",
                   "-o", str(tmp_path / "x.brite"))
    assert code == 1
    assert "--bw" in capsys.readouterr().err


def test_corrupt_substrate_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.brite"
    bad.write_text("not a topology\n")
    wl = tmp_path / "wl.jsonl"
    run_cli("gen-workload", "--count", "2", "--vn-nodes", "2:3", "-o", str(wl))
    code = run_cli("run", "--substrate", str(bad), "--workload", str(wl),
                   "-o", str(tmp_path / "out.csv"))
    assert code == 2
    assert "bad.brite" in capsys.readouterr().err


def test_help_exits_zero():
    assert run_cli("--help") == 0


def test_no_command_exits_one(capsys):
    assert run_cli() == 1


@pytest.fixture(scope="module")
def small_experiment(tmp_path_factory):
    root = tmp_path_factory.mktemp("exp")
    sn = root / "sn.brite"
    wl = root / "wl.jsonl"
    assert dispatch(["gen-substrate", "--nodes", "15", "--links", "30",
                     "--seed", "5", "-o", str(sn)]) == 0
    assert dispatch(["gen-workload", "--count", "20", "--vn-nodes", "2:4",
                     "--lifetime", "20:60", "--seed", "6", "-o", str(wl)]) == 0
    return root, sn, wl


def test_run_produces_metrics_and_summary(small_experiment, capsys):
    root, sn, wl = small_experiment
    out = root / "mopso.csv"
    code = dispatch(["run", "--substrate", str(sn), "--workload", str(wl),
                     "--solver", "mopso", "--iterations", "3", "--swarm", "5",
                     "--seed", "1", "-o", str(out)])
    assert code == 0
    assert out.exists() and (root / "mopso.csv.summary.csv").exists()


def test_identical_commands_identical_bytes(small_experiment):
    root, sn, wl = small_experiment
    outputs = []
    for tag in ("a", "b"):
        out = root / f"det_{tag}.csv"
        code = dispatch(["run", "--substrate", str(sn), "--workload", str(wl),
                         "--solver", "mopso", "--iterations", "2",
                         "--swarm", "4", "--seed", "9", "-o", str(out)])
        assert code == 0
        outputs.append((out.read_bytes(),
                        (root / f"det_{tag}.csv.summary.csv").read_bytes()))
    assert outputs[0] == outputs[1]


def test_report_table_and_artifacts(small_experiment, capsys):
    root, sn, wl = small_experiment
    summaries = []
    for solver in ("greedy2s", "btbfs"):
        out = root / f"{solver}.csv"
        assert dispatch(["run", "--substrate", str(sn), "--workload", str(wl),
                         "--solver", solver, "--seed", "1",
                         "-o", str(out)]) == 0
        summaries.append(str(out) + ".summary.csv")
    capsys.readouterr()
    prefix = root / "cmp"
    code = dispatch(["report", *summaries, "--out", str(prefix)])
    assert code == 0
    table = capsys.readouterr().out
    assert "acceptance ratio" in table
    assert "greedy2s" in table and "btbfs" in table
    assert (root / "cmp.csv").exists()
    figures = [p for p in os.listdir(root) if p.startswith("cmp_")
               and p.endswith(".png")]
    assert len(figures) == 6


def test_report_label_mismatch(small_experiment, capsys):
    root, sn, wl = small_experiment
    summary = str(root / "greedy2s.csv.summary.csv")
    code = dispatch(["report", summary, "--labels", "a,b"])
    assert code == 1
