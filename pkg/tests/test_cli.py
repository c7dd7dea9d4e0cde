import json
import subprocess
import sys

import pytest

from oracles import cut as oracle_cut
from hyperpart import read_hypergraph, read_partition
from hyperpart.cli import main

H0 = "3 4\n1 2\n1 2 3\n3 4\n"


@pytest.fixture
def h0_file(tmp_path):
    path = tmp_path / "h0.hgr"
    path.write_text(H0)
    return path


def test_partition_default_output(h0_file, capsys):
    assert main(["partition", str(h0_file), "2"]) == 0
    out = h0_file.parent / "h0.hgr.part.2"
    assert out.read_text() in ("0\n0\n1\n1\n", "1\n1\n0\n0\n")
    assert "cut 1" in capsys.readouterr().out


def test_partition_options_and_stats(h0_file, tmp_path):
    out = tmp_path / "p.txt"
    stats = tmp_path / "s.jsonl"
    args = ["partition", str(h0_file), "2", "-p", "fastv", "-s", "4", "-r", "3", "-e", "0.1", "-o", str(out), "--stats", str(stats), "--variant", "full"]
    assert main(args) == 0
    recs = [json.loads(x) for x in stats.read_text().splitlines()]
    assert [r["seed"] for r in recs] == [4, 5, 6]
    assert all(r["preset"] == "fastv" and r["epsilon"] == 0.1 for r in recs)
    part = read_partition(out, 4, 2)
    assert oracle_cut(read_hypergraph(h0_file), part) == min(r["cut"] for r in recs)


def test_matrix_input(tmp_path):
    path = tmp_path / "m.mtx"
    path.write_text("%%MatrixMarket matrix coordinate pattern general\n3 4 6\n1 1\n1 2\n2 2\n2 3\n3 3\n3 4\n")
    assert main(["partition", str(path), "2", "--format", "matrix", "-o", str(tmp_path / "o")]) == 0
    assert len(read_partition(tmp_path / "o", 4, 2)) == 4


def test_byte_identical_runs(tmp_path):
    from hyperpart.generators import netlist
    from hyperpart.io import write_hmetis

    path = tmp_path / "g.hgr"
    write_hmetis(netlist(2000, seed=5), path)
    for name in ("a", "b"):
        assert main(["partition", str(path), "4", "-s", "3", "-o", str(tmp_path / name)]) == 0
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


@pytest.mark.parametrize(
    "args",
    [
        ["partition", "{missing}", "2"],
        ["partition", "{bad}", "2"],
        ["partition", "{h0}", "9"],
        ["partition", "{h0}", "2", "-e", "0"],
        ["partition", "{h0}", "2", "-r", "0"],
    ],
)
def test_error_exit_codes(args, h0_file, tmp_path, capsys):
    bad = tmp_path / "bad.hgr"
    bad.write_text("1 2\n1 3\n")
    subst = {"{missing}": str(tmp_path / "nope.hgr"), "{bad}": str(bad), "{h0}": str(h0_file)}
    assert main([subst.get(a, a) for a in args]) == 1
    assert "error" in capsys.readouterr().err


def test_usage_errors(h0_file):
    with pytest.raises(SystemExit) as exc:
        main(["partition", str(h0_file)])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["partition", str(h0_file), "2", "-p", "slow"])
    assert exc.value.code == 2


def test_bench_and_generate(tmp_path, capsys):
    assert main(["generate", str(tmp_path / "inst"), "--count", "2", "--n", "300"]) == 0
    files = sorted((tmp_path / "inst").iterdir())
    assert len(files) == 2
    stats = tmp_path / "bench.jsonl"
    code = main(["bench", *map(str, files), "--k", "2", "4", "--presets", "fast", "strong", "--seeds", "2", "--stats", str(stats)])
    assert code == 0
    recs = [json.loads(x) for x in stats.read_text().splitlines()]
    assert len(recs) == 2 * 2 * 2 * 2
    assert "geometric mean" in capsys.readouterr().out


def test_bench_reports_unreadable(tmp_path, h0_file):
    assert main(["bench", str(tmp_path / "nope.hgr"), str(h0_file), "--seeds", "1"]) == 1


def test_console_entry_point(h0_file):
    proc = subprocess.run([sys.executable, "-m", "hyperpart", "partition", str(h0_file), "2"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "cut 1" in proc.stdout
