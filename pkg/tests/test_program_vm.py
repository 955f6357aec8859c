import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import golden_program
from gpsynth.bench import DOMAINS, generate
from gpsynth.model import GPProblem
from gpsynth.numeric import get_domain, parse_numeric_instance
from gpsynth.pddl import parse_domain, parse_instance
from gpsynth.program import (END, Goto, Inc, PlanningProgram, ProgramError, ZERO, format_program,
                             parse_program, parse_program_loose)
from gpsynth.search import instruction_repertoire
from gpsynth.vm import (FAILED, INFINITE_LOOP, SOLVED, UNDEFINED, Machine, is_solution, run, step,
                        validate)
from oracles import reference_run

ONTABLE = parse_domain(DOMAINS["ontable"])


def ontable_problem(sizes, lines=11, pointers=3):
    _, items = generate("ontable", sizes=sizes, seed_value=0)
    return GPProblem(ONTABLE, [parse_instance(t, ONTABLE) for _, t in items], pointers, lines)


def test_format_parse_round_trip():
    p = ontable_problem([3])
    prog = golden_program("ontable_flatten", p)
    assert parse_program(format_program(prog), p) == prog
    assert str(prog.lines[3]) == "goto(0,y_z=0)"


def test_partial_program_keeps_undefined_lines():
    p = ontable_problem([3])
    prog = parse_program("0. inc(z1)\n2. putdown(z1)\n", p)
    assert prog.lines[1] is None and prog.lines[10] == END
    assert "1. ?" in format_program(prog, full=True)


@pytest.mark.parametrize("text, fragment", [
    ("0. goto(11,y_z=0)", "goto target 11 out of range"),
    ("0. fly(z1)", "unknown action"),
    ("0. inc(z4)", "out of range"),
    ("0. putdown(z1,z2)", "takes 1 pointer"),
    ("0. goto(3,res>0)", "not available in STRIPS"),
    ("0. cmp(z1,z2)", "only available in numeric"),
    ("10. inc(z1)", "must be end"),
    ("12. end", "exceeds bound"),
    ("0 inc(z1)", "expected '<line>. <instruction>'"),
    ("0. inc(z1)\n0. inc(z2)", "duplicate"),
])
def test_program_diagnostics(text, fragment):
    with pytest.raises(ProgramError) as err:
        parse_program(text, ontable_problem([3]))
    assert fragment in str(err.value)


def test_loose_parse_without_domain():
    prog = parse_program_loose("0. visit(z1,z2)\n1. inc(z2)\n2. goto(0,y_z=0)\n3. end\n")
    assert prog.n == 4 and str(prog.lines[0]) == "visit(z1,z2)"


@pytest.mark.parametrize("height", [3, 4, 5, 6])
def test_flatten_program_solves_towers(height):
    p = ontable_problem([height])
    prog = golden_program("ontable_flatten", p)
    assert run(prog, p.instances[0], 3).solved


def test_inc_at_bound_sets_zero_flag():
    p = ontable_problem([4])
    prog = golden_program("ontable_flatten", p)
    trace = []
    run(prog, p.instances[0], 3, trace=trace)
    # first inc(z2) that fails: pointer stays at |objects|-1 = 3
    rows = [t for t in trace if "| inc(z2) |" in t]
    failing = [r for r in rows if r.split(" | ")[2] == "0"]
    assert failing, "inc(z2) never hit the bound"
    _, instr, res, flags, ptrs = failing[0].split(" | ")
    assert flags == "1 0" and ptrs.split(",")[1] == "3"


def test_self_loop_detected_quickly():
    p = ontable_problem([3])
    prog = PlanningProgram(3, [Goto(0, parse_program("0. goto(1,y_z=0)", p).lines[0].cond)])
    out = run(prog, p.instances[0], 3)
    assert out.status == FAILED and out.reason == INFINITE_LOOP
    assert out.state.steps <= 2


def test_step_budget_failure():
    dom = get_domain("find")
    inst = parse_numeric_instance("registers: 1 2\nscalars: target=1 count=0\ngoal: count=1\n",
                                  dom)
    p = GPProblem(dom, [inst], 1, 3)
    prog = parse_program("0. inc_count()\n1. goto(0,y_z=0)\n", p)
    out = run(prog, inst, 1, budget=50)
    assert str(out) == "Failed(step-budget)"


def test_truncated_program_fails_without_goal():
    p = ontable_problem([4])
    prog = parse_program("0. unstack(z1,z2)\n", p)
    short = PlanningProgram(2, [prog.lines[0]])
    assert str(run(short, p.instances[0], 3)) == "Failed(end-without-goal)"


def test_undefined_line_reported():
    p = ontable_problem([3])
    prog = parse_program("0. inc(z1)\n2. end\n", p)
    out = run(prog, p.instances[0], 3)
    assert out.status == UNDEFINED and str(out) == "ReachedUndefinedLine(1)"


def test_step_function():
    p = ontable_problem([3])
    prog = golden_program("ontable_flatten", p)
    m = Machine(p.instances[0])
    s0 = m.start(3)
    s1 = step(prog, s0, p.instances[0])
    assert s0.line == 0 and s1.line == 1
    with pytest.raises(ValueError):
        step(PlanningProgram(1), s0, p.instances[0])


def test_budget_must_be_positive():
    p = ontable_problem([3])
    with pytest.raises(ValueError):
        run(PlanningProgram(2), p.instances[0], 1, budget=0)


@pytest.mark.parametrize("name", ["visitall", "lock", "corridor", "gripper", "intrusion",
                                  "reverse", "sorting", "select", "find", "tsum"])
def test_reference_programs_solve_all_instances(name, problem_of):
    p, extra = problem_of(name, validation=True)
    prog = golden_program(name, p)
    assert is_solution(prog, p, p.instances + extra)


def test_fibo_reference_program(problem_of):
    p, extra = problem_of("fibo", validation=True)
    p8 = GPProblem(p.domain, p.instances, p.pointers, 8)
    assert is_solution(golden_program("fibo", p8), p8, p.instances + extra)


def test_validate_lists_each_instance():
    p = ontable_problem([3, 4])
    outs = validate(golden_program("ontable_flatten", p), p)
    assert [str(o) for o in outs] == ["Solved", "Solved"]


# -- agreement with the reference interpreter ---------------------------------------------

def _random_program(data, problem, n):
    body = []
    for i in range(n - 1):
        rep = instruction_repertoire(problem, i)
        if data.draw(st.booleans()):
            body.append(data.draw(st.sampled_from(rep)))
        else:
            body.append(None)
    return PlanningProgram(n, body)


def _problems():
    out = []
    for name, size, k in [("ontable", 3, 2), ("gripper", 2, 3), ("visitall", (2, 2), 2),
                          ("corridor", 4, 2)]:
        dom = parse_domain(DOMAINS[name])
        _, items = generate(name, sizes=[size], seed_value=1)
        out.append(GPProblem(dom, [parse_instance(items[0][1], dom)], k, 6))
    for name, size in [("reverse", 4), ("select", 4), ("find", 4), ("tsum", 3)]:
        dom = get_domain(name)
        _, items = generate(name, sizes=[size], seed_value=1)
        out.append(GPProblem(dom, [parse_numeric_instance(items[0][1], dom)], 2, 6))
    return out


PROBLEMS = _problems()


def _world_equal(inst, vm_world, ref_world):
    if inst.is_numeric:
        return tuple(vm_world) == tuple(ref_world)
    return set(inst.state_atoms(vm_world)) == set(ref_world)


@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.data())
def test_vm_agrees_with_reference(data):
    problem = data.draw(st.sampled_from(PROBLEMS))
    prog = _random_program(data, problem, 6)
    inst = problem.instances[0]
    out = run(prog, inst, problem.pointers, budget=5000)
    status, reason, world, line, _, covered = reference_run(prog, inst, problem.pointers, 5000)
    if status == "failed" and reason == "step-budget":
        return
    assert out.status == status
    if status == FAILED:
        assert out.reason == reason
    if status != FAILED or reason == "end-without-goal":
        assert _world_equal(inst, out.state.world, world)
        assert out.state.line == line
    if status != FAILED:
        if inst.is_numeric:
            assert out.state.covered == covered
        else:
            assert {inst.atoms[b] for b in out.state.covered} == covered


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.data())
def test_resume_equals_rerun(data):
    problem = data.draw(st.sampled_from(PROBLEMS))
    prog = _random_program(data, problem, 6)
    inst = problem.instances[0]
    m = Machine(inst)
    first = m.execute(prog, m.start(problem.pointers), 5000)
    if first.status != UNDEFINED:
        return
    line = first.state.line
    w = data.draw(st.sampled_from(instruction_repertoire(problem, line)))
    child = prog.with_line(line, w)
    resumed = m.execute(child, first.state.copy(), 5000)
    fresh = run(child, inst, problem.pointers, 5000)
    assert (resumed.status, resumed.reason) == (fresh.status, fresh.reason)
    assert resumed.state.key() == fresh.state.key()
    assert resumed.state.covered == fresh.state.covered


def test_end_on_line_zero_solves_when_goal_holds_initially():
    dom = get_domain("tsum")
    inst = parse_numeric_instance("registers: 0 0\ngoal: 1=0\n", dom)
    prog = PlanningProgram(3, [END])
    assert run(prog, inst, 1).status == SOLVED


def test_with_line_rejects_last_line():
    prog = PlanningProgram(3)
    with pytest.raises(ProgramError):
        prog.with_line(2, Inc(0))
    assert prog.with_line(0, Goto(1, ZERO)).lines[0] == Goto(1, ZERO)
