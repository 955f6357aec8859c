"""End-to-end acceptance checks, one test per criterion.

Every test appends a PASS/FAIL line that is printed again in the terminal
summary. Search runs are bounded by node counts rather than wall-clock limits,
so every report row is reproducible.
"""

import random
import time
from itertools import combinations

import pytest

from acceptance_log import record
from conftest import golden_program
from gpsynth.bench import DOMAINS, generate, get_spec
from gpsynth.heuristics import helpful_layers, lifted_helpful_actions
from gpsynth.landmarks import extract_landmark_graph
from gpsynth.model import GPProblem
from gpsynth.novelty import novelty_rank, occurrences, should_prune
from gpsynth.pddl import parse_domain, parse_instance
from gpsynth.program import NONZERO, Clear, Dec, Goto, PlanningProgram, Set
from gpsynth.report import RunReport
from gpsynth.search import RESULT_SOLVED, SearchConfig, instruction_repertoire, search
from gpsynth.vm import DEFAULT_BUDGET, FAILED, INFINITE_LOOP, run
from oracles import ground_all, is_landmark

# (benchmark, mode, evaluators, evaluation cap). The find cap is what one
# five-minute run reaches on one core; the gripper cap keeps the open list
# within a few GB of memory. The others only guard against runaways.
SUITE = [
    ("visitall", "bfs", "h5,f1", 5_000_000),
    ("select", "bfs", "h5,f1", 5_000_000),
    ("find", "bfs", "h5,f1", 120_000),
    ("tsum", "bfs", "h5,f1", 5_000_000),
    ("reverse", "bfs", "h5,f1", 5_000_000),
    ("lock", "pgp", "flm,f1", 5_000_000),
    ("corridor", "pgp", "h5,f1", 5_000_000),
    ("gripper", "pgp", "h5,f1", 2_300_000),
]
WALL_LIMIT = 300.0


def structural_violation(program):
    first = program.lines[0]
    if isinstance(first, (Clear, Dec, Set)):
        return f"first line {first}"
    for i, w in enumerate(program.lines):
        if isinstance(w, Goto) and isinstance(program.lines[w.target], Goto):
            return f"line {i} jumps onto a goto"
    return None


def run_suite(problem_of, on_generate=None):
    rows = []
    for name, mode, evaluators, cap in SUITE:
        problem, held_out = problem_of(name, validation=True)
        cfg = SearchConfig(v=get_spec(name).v, evaluators=evaluators, mode=mode,
                           max_evaluated=cap, on_generate=on_generate)
        t0 = time.perf_counter()
        result = search(problem, cfg)
        wall = time.perf_counter() - t0
        checks = []
        if result.program is not None:
            checks = [(inst.name, str(run(result.program, inst, problem.pointers, DEFAULT_BUDGET)))
                      for inst in problem.instances + held_out]
        report = RunReport.from_result(name, cfg.label, result, checks)
        rows.append((name, result, report, wall, [i.name for i in held_out]))
    return rows


@pytest.fixture(scope="module")
def suite(problem_of):
    violations = []
    generated = [0]

    def scan(program):
        generated[0] += 1
        bad = structural_violation(program)
        if bad:
            violations.append((str(program), bad))
    rows = run_suite(problem_of, on_generate=scan)
    return rows, violations, generated[0]


# -- criterion 1 ----------------------------------------------------------------------------

def test_criterion_1_solvability(suite):
    rows, _, _ = suite
    failures, details = [], []
    for name, result, report, wall, held in rows:
        verdicts = {r["instance"]: r["verdict"] for r in report.validation}
        held_ok = len(held) >= 2 and all(verdicts.get(h) == "Solved" for h in held)
        ok = result.status == RESULT_SOLVED and held_ok and wall <= WALL_LIMIT
        details.append(f"{name}={result.status}/{report.validated}/{wall:.0f}s")
        if not ok:
            failures.append(name)
    ok = record(1, not failures, f"failed: {','.join(failures) or '-'}; " + " ".join(details))
    assert ok, failures


# -- criterion 2 ----------------------------------------------------------------------------

ONTABLE = parse_domain(DOMAINS["ontable"])
_, _ONT_ITEMS = generate("ontable", sizes=[3], seed_value=0)
NOVELTY_PROBLEM = GPProblem(ONTABLE, [parse_instance(_ONT_ITEMS[0][1], ONTABLE)], 3, 8)


def _random_partial(rng, problem):
    lines = [None if rng.random() < 0.25 else rng.choice(instruction_repertoire(problem, i))
             for i in range(problem.lines - 1)]
    return PlanningProgram(problem.lines, lines)


def test_criterion_2_novelty_laws():
    rng = random.Random(2024)
    p = NOVELTY_PROBLEM
    violations = 0
    for _ in range(1000):
        prog = _random_partial(rng, p)
        counts = occurrences(prog)
        free = [i for i in range(p.lines - 1) if prog.lines[i] is None]
        for instr in instruction_repertoire(p, 1):
            if instr.identity() is None:
                violations += any(should_prune(prog, instr, v, counts)
                                  for v in range(1, p.lines + 1))
                continue
            r = novelty_rank(instr, prog)
            violations += not 1 <= r <= p.lines + 1
            if free:
                violations += novelty_rank(instr, prog.with_line(free[0], instr)) != r + 1
            for v in range(1, p.lines):
                violations += (should_prune(prog, instr, v + 1, counts)
                               and not should_prune(prog, instr, v, counts))
    ok = record(2, violations == 0, f"{violations} violations over 1000 programs")
    assert ok


# -- criterion 3 ----------------------------------------------------------------------------

def test_criterion_3_full_bound_equals_no_pruning(problem_of):
    notes, ok = [], True
    for name in ("visitall", "select"):
        problem = problem_of(name)
        runs = []
        for novelty in (True, False):
            seq = []
            cfg = SearchConfig(v=problem.lines, novelty=novelty, max_expanded=1500,
                               on_expand=lambda prog, seq=seq: seq.append(str(prog)))
            result = search(problem, cfg)
            runs.append((seq, result.status, result.stats.as_dict()))
        (a, sa, da), (b, sb, db) = runs
        ok &= bool(a) and a == b and sa == sb and da == db
        notes.append(f"{name}: {len(a)} expansions, sequences {'equal' if a == b else 'differ'}")
    record(3, ok, "; ".join(notes))
    assert ok


# -- criterion 4 ----------------------------------------------------------------------------

def test_criterion_4_pruning_reduces_evaluations(suite, problem_of):
    rows, _, _ = suite
    base = {name: result for name, result, *_ in rows}
    problem = problem_of("sorting")
    base["sorting"] = search(problem, SearchConfig(v=get_spec("sorting").v,
                                                   max_evaluated=5_000_000))
    strict, worse, notes = 0, [], []
    for name in ["visitall", "select", "find", "reverse", "sorting"]:
        pruned = base[name]
        if not pruned.solved:
            notes.append(f"{name}: inconclusive, BFS(v) unsolved at {pruned.stats.evaluated}")
            continue
        count_v = pruned.stats.evaluated
        full = search(problem_of(name), SearchConfig(v=problem_of(name).lines,
                                                     max_evaluated=count_v + 1))
        count_n = full.stats.evaluated
        capped = not full.solved
        if count_n < count_v and not capped:
            worse.append(name)
        elif capped or count_n > count_v:
            strict += 1
        notes.append(f"{name}: {count_v} vs {'>' if capped else ''}{count_n}")
    ok = record(4, not worse and strict >= 4, f"strict in {strict}/5; " + "; ".join(notes))
    assert ok


# -- criterion 5 ----------------------------------------------------------------------------

def test_criterion_5_helpful_actions():
    problems = []
    ont = lifted_helpful_actions(_strips("ontable"))
    lock = lifted_helpful_actions(_strips("lock"))
    if "stack" in ont:
        problems.append("ontable H contains stack")
    if lock.H != {"open"}:
        problems.append(f"lock H = {sorted(lock.H)}")
    for name in sorted(DOMAINS):
        for inst in _strips(name):
            layers = helpful_layers(inst)
            if len(layers) > len(inst.domain.predicates) + 1:
                problems.append(f"{name}: {len(layers)} layers")
            for (_, a), (_, b) in combinations(layers, 2):
                if a & b:
                    problems.append(f"{name}: overlapping supports")
    ok = record(5, not problems, "; ".join(problems) or f"ontable H={sorted(ont.H)} lock H={sorted(lock.H)}")
    assert ok, problems


def _strips(name):
    dom = parse_domain(DOMAINS[name])
    _, items = generate(name, seed_value=0)
    return [parse_instance(text, dom) for _, text in items]


# -- criterion 6 ----------------------------------------------------------------------------

def test_criterion_6_landmark_soundness():
    unsound, missing_goals, missing_edges, checked = [], [], [], 0
    for name in ("gripper", "visitall"):
        for inst in _strips(name):
            if len(inst.atoms) > 200:
                continue
            checked += 1
            graph = extract_landmark_graph(inst)
            facts = set(graph.fact_atoms())
            acts = ground_all(inst)
            unsound += [(inst.name, a) for a in facts if not is_landmark(inst, a, acts)]
            missing_goals += [(inst.name, g) for g in inst.goal_atoms - facts]
            edges = {(src, dst) for kind, src, dst in graph.edges() if kind == "pointer"}
            missing_edges += [(inst.name, a, o) for a in facts for o in a[1:]
                              if (o, a) not in edges]
    ok = checked >= 4 and not (unsound or missing_goals or missing_edges)
    record(6, ok, f"{checked} instances; unsound={len(unsound)} goals missing="
                  f"{len(missing_goals)} pointer edges missing={len(missing_edges)}")
    assert ok


# -- criterion 7 ----------------------------------------------------------------------------

def test_criterion_7_vm_conformance():
    dom = parse_domain(DOMAINS["ontable"])
    problems = []
    for height in range(3, 7):
        _, items = generate("ontable", sizes=[height], seed_value=0)
        p = GPProblem(dom, [parse_instance(items[0][1], dom)], 3, 11)
        prog = golden_program("ontable_flatten", p)
        if not run(prog, p.instances[0], 3).solved:
            problems.append(f"height {height} unsolved")
        if height == 4:
            trace = []
            run(prog, p.instances[0], 3, trace=trace)
            rows = [t.split(" | ") for t in trace if "| inc(z2) |" in t]
            zero = [r for r in rows if r[2] == "0"]
            if not zero or zero[0][3] != "1 0":
                problems.append("inc at bound did not give res=0, y_z=1")
    loop = PlanningProgram(3, [Goto(0, NONZERO)])
    out = run(loop, p.instances[0], 3)
    states = loop.n  # gotos leave the world unchanged, so at most n program states
    if not (out.status == FAILED and out.reason == INFINITE_LOOP and out.state.steps <= states):
        problems.append(f"self-loop: {out}")
    ok = record(7, not problems, "; ".join(problems) or "flatten 3-6 solved, inc bound, loop detected")
    assert ok, problems


# -- criterion 8 ----------------------------------------------------------------------------

def test_criterion_8_structural_restrictions(suite):
    _, violations, generated = suite
    ok = record(8, generated > 0 and not violations,
                f"{generated} generated programs scanned, {len(violations)} violations")
    assert ok, violations[:5]


# -- criterion 9 ----------------------------------------------------------------------------

GRIPPER = parse_domain(DOMAINS["gripper"])
CARRIED_ONE = parse_instance("""
(define (problem carried-1) (:domain gripper)
  (:objects rooma roomb - room ball0 - ball)
  (:init (at-robby roomb) (carry ball0))
  (:goal (and (at ball0 roomb))))""", GRIPPER)
CARRIED_TWO = parse_instance("""
(define (problem carried-2) (:domain gripper)
  (:objects rooma roomb - room ball0 ball1 - ball)
  (:init (at-robby roomb) (at ball0 roomb) (carry ball1))
  (:goal (and (at ball0 roomb) (at ball1 roomb))))""", GRIPPER)


def test_criterion_9_pgp_protocol():
    problems = []
    cfg = dict(v=2, evaluators="flm,f1")
    alone = search(GPProblem(GRIPPER, [CARRIED_ONE], 2, 6), SearchConfig(mode="pgp", **cfg))
    if not alone.solved or run(alone.program, CARRIED_TWO, 2).solved:
        problems.append("instance 1's solution does not fail on instance 2")
    pair = GPProblem(GRIPPER, [CARRIED_ONE, CARRIED_TWO], 2, 6)
    result = search(pair, SearchConfig(mode="pgp", **cfg))
    if result.stats.escalations != 1:
        problems.append(f"{result.stats.escalations} escalations")
    if not result.solved or not all(run(result.program, i, 2).solved for i in pair.instances):
        problems.append("final program does not validate on both")
    single = GPProblem(GRIPPER, [CARRIED_ONE], 2, 6)
    bfs = search(single, SearchConfig(mode="bfs", **cfg))
    if str(bfs.program) != str(alone.program) or bfs.stats.as_dict() != alone.stats.as_dict():
        problems.append("single-instance PGP differs from BFS")
    ok = record(9, not problems, "; ".join(problems) or
                f"1 escalation, {result.stats.expanded} expanded")
    assert ok, problems


# -- criterion 10 ---------------------------------------------------------------------------

def test_criterion_10_determinism(suite, problem_of):
    rows, _, _ = suite
    first = "\n".join(report.to_json() for _, _, report, _, _ in rows)
    second = "\n".join(report.to_json() for _, _, report, _, _ in run_suite(problem_of))
    ok = record(10, first.encode() == second.encode(),
                f"{len(first.encode())} bytes per report")
    assert ok
