import json
from pathlib import Path

import pytest

from gpsynth.bench import write_benchmark
from gpsynth.cli import main, parse_suite
from gpsynth.model import ModelError

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def tsum(tmp_path):
    return write_benchmark("tsum", tmp_path / "tsum", seed_value=0)


@pytest.fixture
def ontable(tmp_path):
    return write_benchmark("ontable", tmp_path / "ontable", seed_value=0)


def test_solve_tsum(tsum, capsys):
    assert main(["-q", "solve", str(tsum)]) == 0
    out = capsys.readouterr().out
    record = json.loads(out.strip().splitlines()[-1])
    assert record["status"] == "solved"
    assert all(row["verdict"] == "Solved" for row in record["validation"])
    assert "time" not in record
    assert "B(v)_{5,1}" in out


def test_solution_revalidates_through_text(tsum, tmp_path, capsys):
    main(["-q", "solve", str(tsum)])
    record = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    prog = tmp_path / "sol.prog"
    prog.write_text(record["program"])
    assert main(["-q", "validate", str(prog), str(tsum)]) == 0


def test_timing_flag_adds_time(tsum, capsys):
    main(["-q", "solve", str(tsum), "--timing"])
    record = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert record["time"] >= 0


def test_zero_bound_rejected(tsum, capsys):
    assert main(["-q", "solve", str(tsum), "--v", "0"]) == 1
    assert "v must be >= 1" in capsys.readouterr().err
    text = tsum.read_text().replace("v=1", "v=0")
    tsum.write_text(text)
    assert main(["-q", "solve", str(tsum)]) == 1


def test_resource_limit_exit(tsum):
    assert main(["-q", "solve", str(tsum), "--time-limit", "0"]) == 3


def test_unsolvable_exit(tmp_path):
    d = tmp_path / "toy"
    d.mkdir()
    (d / "domain.pddl").write_text("""
(define (domain toy) (:requirements :strips)
  (:predicates (p ?x) (q ?x))
  (:action a :parameters (?x) :precondition (and) :effect (and (p ?x))))""")
    (d / "t1.pddl").write_text("""
(define (problem t1) (:domain toy) (:objects o1) (:init) (:goal (and (q o1))))""")
    (d / "manifest.txt").write_text("domain=domain.pddl\ninstances=t1.pddl\nlines=2\n"
                                    "pointers=1\nv=2\n")
    assert main(["-q", "solve", str(d / "manifest.txt")]) == 2


def test_validate_extra(tsum, tmp_path, capsys):
    extra = tmp_path / "extra"
    write_benchmark("tsum", extra, seed_value=5)
    for f in extra.iterdir():
        if not f.name.startswith("tsum-2"):
            f.unlink()
    assert main(["-q", "solve", str(tsum), "--validate-extra", str(extra)]) == 0
    record = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    names = [row["instance"] for row in record["validation"]]
    # training, held-out, then the extra directory
    assert names[-2:] == ["tsum-2", "tsum-20"]


def test_validate_flatten_on_ontable(ontable, capsys):
    assert main(["validate", str(GOLDEN / "ontable_flatten.prog"), str(ontable)]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    assert len(rows) == 6 and all(r.endswith(": Solved") for r in rows)


def test_truncated_program_fails(ontable, tmp_path, capsys):
    lines = (GOLDEN / "ontable_flatten.prog").read_text().splitlines()[:3]
    prog = tmp_path / "short.prog"
    prog.write_text("\n".join(lines) + "\n3. end\n")
    assert main(["validate", str(prog), str(ontable)]) == 2
    rows = capsys.readouterr().out.strip().splitlines()
    assert rows and all(r.endswith("Failed(end-without-goal)") for r in rows)


def test_bad_goto_target_diagnostic(ontable, tmp_path, capsys):
    prog = tmp_path / "bad.prog"
    prog.write_text("0. inc(z1)\n1. goto(42,y_z=0)\n")
    assert main(["validate", str(prog), str(ontable)]) == 1
    err = capsys.readouterr().err
    assert "line 1" in err and "goto target 42" in err


def test_validate_trace(ontable, capsys):
    main(["validate", "--trace", str(GOLDEN / "ontable_flatten.prog"), str(ontable)])
    out = capsys.readouterr().out
    assert "# trace ontable-3" in out and "| unstack(z1,z2) |" in out


def test_empty_suite(tmp_path, capsys):
    suite = tmp_path / "empty.suite"
    suite.write_text("# nothing here\n")
    report = tmp_path / "out.jsonl"
    assert main(["-q", "bench", str(suite), "--report", str(report)]) == 0
    assert report.read_text() == ""


def test_bench_rows_and_errors(tsum, tmp_path, capsys):
    suite = tmp_path / "s.suite"
    suite.write_text(f"{tsum} v=1\n{tsum} evaluators=f1,h5\nmissing/manifest.txt\n")
    report = tmp_path / "out.jsonl"
    assert main(["-q", "bench", str(suite), "--report", str(report)]) == 0
    rows = [json.loads(x) for x in report.read_text().splitlines()]
    assert [r["status"] for r in rows] == ["solved", "solved", "error"]
    assert rows[1]["config"] == "B(v)_{1,5}"


def test_bench_rerun_identical(tsum, tmp_path):
    suite = tmp_path / "s.suite"
    suite.write_text(f"{tsum}\n")
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    main(["-q", "bench", str(suite), "--report", str(a)])
    main(["-q", "bench", str(suite), "--report", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_suite_parser():
    rows = parse_suite("a/manifest.txt mode=pgp v=2\n\n# c\nb.txt\n")
    assert rows == [("a/manifest.txt", {"mode": "pgp", "v": "2"}), ("b.txt", {})]
    with pytest.raises(ModelError):
        parse_suite("a.txt speed=3\n")


def test_rank(tmp_path, capsys):
    assert main(["rank", str(GOLDEN / "ontable_flatten.prog")]) == 0
    rows = dict(line.split("\t") for line in capsys.readouterr().out.strip().splitlines())
    assert rows["unstack"] == "2" and rows["inc(z2)"] == "2" and rows["clear(z1)"] == "2"


def test_inspect_helpful(ontable, capsys):
    assert main(["inspect", "--helpful", str(ontable)]) == 0
    first = capsys.readouterr().out.splitlines()[0]
    assert first == "H: pickup putdown unstack"


def test_inspect_landmarks_instance(ontable, capsys):
    inst = ontable.parent / "ontable-3.pddl"
    assert main(["inspect", "--landmarks", str(inst), "--domain",
                 str(ontable.parent / "domain.pddl")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("instance ontable-3") and "pointer b0" in out


def test_inspect_needs_domain(ontable, capsys):
    assert main(["inspect", "--landmarks", str(ontable.parent / "ontable-3.pddl")]) == 1


def test_generate_command(tmp_path, capsys):
    assert main(["generate", "visitall", str(tmp_path / "v"), "--seed", "1"]) == 0
    assert (tmp_path / "v" / "manifest.txt").exists()
    assert main(["generate", "hanoi", str(tmp_path / "h")]) == 1


def test_missing_manifest(capsys):
    assert main(["solve", "/nonexistent/manifest.txt"]) == 1
    assert "gpsynth: error:" in capsys.readouterr().err

