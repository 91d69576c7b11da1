import csv
import subprocess
import sys
from pathlib import Path

import pytest

from fgsolve.bench import HEADER, BenchRecord, Suite, parse_suite, read_records, run_one, run_suite, solved_proportions
from fgsolve.cli import main
from fgsolve.graph import FunctionalGraph, cycle_graph, is_isomorphic, parse_fg, read_fg, write_fg
from fgsolve.oracle import InstanceSpec

from figures import multiple_solutions

DATA = Path(__file__).parent / "data"


def write(tmp_path, name, g):
    path = tmp_path / name
    write_fg(path, g)
    return str(path)


def blocks(text):
    chunks, cur = [], []
    for line in text.splitlines():
        if line.startswith("#") and cur:
            chunks.append("\n".join(cur))
            cur = []
        cur.append(line)
    if cur:
        chunks.append("\n".join(cur))
    return [parse_fg(c) for c in chunks]


def test_abstraction_only_prints_matrix(capsys):
    code = main(["solve", str(DATA / "worked.A.fg"), str(DATA / "worked.B.fg"), "--px", "3", "--abstraction-only"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.splitlines()[1:] == [
        "0: [2] [2] [0,1] [2] [0,1] [0]",
        "1: [4] [0,0,0] [] [] [] []",
        "2: [3] [0,1] [0] [] [] []",
    ]


def test_solve_worked_example_graph(capsys, tmp_path):
    code = main(["solve", str(DATA / "worked.A.fg"), str(DATA / "worked.B.fg"), "--px", "3"])
    [x] = blocks(capsys.readouterr().out)
    assert code == 0
    assert is_isomorphic(x, read_fg(DATA / "worked.X.fg"))


def test_identity_all_px(capsys, tmp_path):
    b = FunctionalGraph([1, 2, 0, 0, 3])
    code = main(["solve", write(tmp_path, "a.fg", FunctionalGraph([0])), write(tmp_path, "b.fg", b), "--all-px"])
    assert code == 0
    [x] = blocks(capsys.readouterr().out)
    assert is_isomorphic(x, b)


@pytest.mark.parametrize("extra", [[], ["--naive"], ["--no-height-pruning"]])
def test_multiple_solutions_then_verify(capsys, tmp_path, extra):
    a, _, b = multiple_solutions()
    pa, pb = write(tmp_path, "a.fg", a), write(tmp_path, "b.fg", b)
    assert main(["solve", pa, pb, "--px", "4", *extra]) == 0
    xs = blocks(capsys.readouterr().out)
    assert len(xs) == 3
    for k, x in enumerate(xs):
        px = write(tmp_path, f"x{k}.fg", x)
        assert main(["verify", pa, px, pb]) == 0
    capsys.readouterr()
    assert main(["solve", pa, pb, "--px", "4", "--first-only"]) == 0
    assert len(blocks(capsys.readouterr().out)) == 1


def test_no_solution_exit_1(capsys, tmp_path):
    a = FunctionalGraph([1, 0, 0])  # A's leaf puts transients in every component
    b = cycle_graph(2)
    code = main(["solve", write(tmp_path, "a.fg", a), write(tmp_path, "b.fg", b), "--all-px"])
    assert code == 1
    assert "no solution" in capsys.readouterr().err


def test_timeout_exit_2(tmp_path):
    a, _, b = multiple_solutions()
    code = main(["solve", write(tmp_path, "a.fg", a), write(tmp_path, "b.fg", b), "--px", "4", "--timeout", "0"])
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "A", "B", "--px", "3"],  # lcm(2, 3) != 4
        ["solve", "A", "BAD", "--px", "2"],
        ["solve", "A", "DIS", "--px", "2"],
        ["gen", "--na", "4", "--nx", "2", "--pa", "2", "--px", "2", "--max-indegree", "1", "--seed", "0", "--out", "OUT"],
        ["bench", "--suite", "pa=2;bogus=1", "--csv", "OUT"],
        ["bench", "--suite", "pa=2;px=3", "--csv", "OUT", "--algorithms", "fast"],
    ],
)
def test_usage_errors_exit_64(tmp_path, argv):
    (tmp_path / "bad.fg").write_text("3\n0 1\n")
    files = {
        "A": write(tmp_path, "a.fg", cycle_graph(2)),
        "B": write(tmp_path, "b.fg", cycle_graph(4)),
        "DIS": write(tmp_path, "d.fg", FunctionalGraph([1, 0, 3, 2])),
        "BAD": str(tmp_path / "bad.fg"),
        "OUT": str(tmp_path / "out.csv"),
    }
    assert main([files.get(t, t) for t in argv]) == 64


@pytest.mark.parametrize("argv", [["solve", "a.fg"], ["solve", "a", "b"], ["frobnicate"]])
def test_argparse_errors_exit_64(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 64


def test_missing_file_exit_74(tmp_path):
    assert main(["solve", str(tmp_path / "nope.fg"), str(tmp_path / "nope.fg"), "--px", "1"]) == 74


def test_verify_cycles(capsys, tmp_path):
    c2, c4 = write(tmp_path, "c2.fg", cycle_graph(2)), write(tmp_path, "c4.fg", cycle_graph(4))
    assert main(["verify", c2, c4, c4]) == 0
    out = capsys.readouterr().out
    assert "components: 2" in out and out.count("match:") == 2


def test_verify_perturbed(tmp_path):
    a, xs, b = multiple_solutions()
    bad = list(b.succ)
    bad[-1] = bad[-1] + 1 if bad[-1] < 3 else 0
    pa, px = write(tmp_path, "a.fg", a), write(tmp_path, "x.fg", xs[0])
    assert main(["verify", pa, px, write(tmp_path, "b.fg", b)]) == 0
    assert main(["verify", pa, px, write(tmp_path, "bad.fg", FunctionalGraph(bad))]) == 1


def test_gen_then_verify(capsys, tmp_path):
    out = tmp_path / "inst"
    argv = ["gen", "--na", "6", "--nx", "5", "--pa", "2", "--px", "3", "--count", "3", "--seed", "7", "--out", str(out)]
    assert main(argv) == 0
    assert len((out / "manifest.jsonl").read_text().splitlines()) == 3
    for k in range(3):
        paths = [str(out / f"inst{k:04d}.{t}.fg") for t in "AXB"]
        assert main(["verify", *paths]) == 0
        assert main(["solve", paths[0], paths[2], "--px", "3"]) == 0


def test_empty_grid_gives_header_only(tmp_path, capsys):
    path = tmp_path / "g.csv"
    assert main(["bench", "--suite", "pa=;px=;n=10", "--csv", str(path)]) == 0
    assert path.read_text().splitlines() == [",".join(HEADER)]


def test_bench_grid(tmp_path, capsys):
    path = tmp_path / "g.csv"
    argv = ["bench", "--suite", "pa=2,3;px=3;n=8;deg=3;k=2;seed=4", "--csv", str(path), "--timeout", "2000"]
    assert main(argv) == 0
    rows = list(csv.DictReader(path.open()))
    # cells (2,3) only: (3,3) is skipped; 2 instances x 3 algorithms
    assert len(rows) == 6
    assert {r["algorithm"] for r in rows} == {"naive", "exact", "exact+height"}
    assert "p_a=2 p_x=3 max_indegree=3 exact: 1.00" in capsys.readouterr().out
    assert main(argv) == 0  # appending keeps a single header
    lines = path.read_text().splitlines()
    assert len(lines) == 13 and lines.count(",".join(HEADER)) == 1


def test_bench_io_error(tmp_path):
    argv = ["bench", "--suite", "pa=2;px=3;n=6", "--csv", str(tmp_path / "missing" / "g.csv")]
    assert main(argv) == 74


def test_suite_parsing_and_records(tmp_path):
    s = parse_suite("pa=2,3; px=3,5; n=12; deg=2,3; k=2; seed=9")
    assert s == Suite((2, 3), (3, 5), 12, (2, 3), 2, 9)
    assert len(s.cells()) == 6 and len(s.specs()) == 12  # (3, 3) skipped
    assert s.specs() == parse_suite("pa=2,3;px=3,5;n=12;deg=2,3;k=2;seed=9").specs()
    rec = run_one("t", InstanceSpec(6, 6, 2, 3, 3, 1), "exact", 5000)
    assert isinstance(rec, BenchRecord) and rec.time_ms >= 0 and rec.solutions_found == 1
    with pytest.raises(ValueError):
        run_one("t", InstanceSpec(6, 6, 2, 3, 3, 1), "magic", 5000)
    path = tmp_path / "r.csv"
    recs = run_suite(parse_suite("pa=2;px=3;n=6;k=2"), path, algorithms=("exact",), workers=1)
    assert read_records(path) == recs
    assert solved_proportions(recs) == {(2, 3, 3, "exact"): 1.0}


def test_pool_size_env(monkeypatch):
    from fgsolve.bench import pool_size

    monkeypatch.setenv("FGSOLVE_THREADS", "3")
    assert pool_size() == 3


def test_worker_pool_matches_serial(tmp_path):
    suite = parse_suite("pa=2;px=3;n=6;k=3;seed=2")
    serial = run_suite(suite, tmp_path / "a.csv", algorithms=("exact",), workers=1)
    pooled = run_suite(suite, tmp_path / "b.csv", algorithms=("exact",), workers=2)
    strip = lambda rs: [(r.instance_id, r.n_b, r.solutions_found, r.explored_assignments) for r in rs]  # noqa: E731
    assert strip(serial) == strip(pooled)


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fgsolve.cli", "solve", str(DATA / "worked.A.fg"), str(DATA / "worked.B.fg"),
         "--px", "3", "--abstraction-only"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and "0: [2] [2] [0,1]" in proc.stdout
