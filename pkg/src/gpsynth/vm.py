"""Pointer/flag machine executing planning programs on single instances.

Execution is resumable: a run that reaches an undefined line stops with an
``UNDEFINED`` outcome whose state can be copied and continued once the line
has been programmed. Search relies on this to evaluate children cheaply.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import OVERFLOW_CAP, goal_satisfied
from .program import (OP_ACTION, OP_CLEAR, OP_CMP, OP_CMPVAR, OP_DEC, OP_END, OP_GOTO,
                      OP_INC, OP_SET, OP_TEST, PlanningProgram)

DEFAULT_BUDGET = 10**6

SOLVED = "solved"
FAILED = "failed"
UNDEFINED = "undefined"
PAUSED = "paused"

END_WITHOUT_GOAL = "end-without-goal"
INFINITE_LOOP = "infinite-loop"
STEP_BUDGET = "step-budget"
POINTER_FAULT = "pointer-fault"
OVERFLOW = "overflow"


class ExecutionState:
    """World state, program line, pointers, flags and run bookkeeping.

    ``visited`` holds full machine states seen at taken jumps (every cycle
    of a deterministic run passes one, so a repeat there means a loop).
    ``covered`` is the set of tested atoms / compared register pairs.
    ``landmarks`` is landmark-acceptance progress when tracking is on.
    """

    __slots__ = ("world", "line", "pointers", "yz", "yc", "steps", "visited", "covered",
                 "landmarks", "res")

    def __init__(self, world, pointers, line=0, yz=False, yc=False):
        self.world = world
        self.line = line
        self.pointers = tuple(pointers)
        self.yz = yz
        self.yc = yc
        self.steps = 0
        self.visited: set = set()
        self.covered: set = set()
        self.landmarks = None
        self.res = None

    def copy(self) -> "ExecutionState":
        c = ExecutionState.__new__(ExecutionState)
        c.world, c.line, c.pointers = self.world, self.line, self.pointers
        c.yz, c.yc, c.steps, c.res = self.yz, self.yc, self.steps, self.res
        c.visited = set(self.visited)
        c.covered = set(self.covered)
        c.landmarks = self.landmarks
        return c

    def key(self):
        return (self.world, self.line, self.pointers, self.yz, self.yc)

    def __repr__(self):
        return (f"ExecutionState(line={self.line}, pointers={self.pointers}, "
                f"yz={self.yz}, yc={self.yc}, steps={self.steps})")


@dataclass
class RunOutcome:
    status: str
    state: ExecutionState
    reason: Optional[str] = None

    @property
    def solved(self) -> bool:
        return self.status == SOLVED

    @property
    def failed(self) -> bool:
        return self.status == FAILED

    @property
    def coverage(self) -> set:
        return self.state.covered

    def __str__(self):
        if self.status == SOLVED:
            return "Solved"
        if self.status == FAILED:
            return f"Failed({self.reason})"
        return f"ReachedUndefinedLine({self.state.line})"


def initial_state(instance, pointers: int) -> ExecutionState:
    return ExecutionState(instance.init, (0,) * pointers)


class Machine:
    """Per-instance execution context with grounding caches."""

    def __init__(self, instance, tracker=None):
        self.instance = instance
        self.numeric = instance.is_numeric
        self.tracker = tracker
        self.bound = instance.size - 1
        self._actions: dict = {}
        self._tests: dict = {}
        dom = instance.domain
        self._schemas = dom.schemas
        self._comparisons = getattr(dom, "comparisons", {})

    def start(self, pointers: int) -> ExecutionState:
        st = initial_state(self.instance, pointers)
        if self.tracker is not None:
            st.landmarks = self.tracker.initial(st.world, st.pointers)
        return st

    def _strips_action(self, name, ptrs):
        key = (name, ptrs)
        act = self._actions.get(key)
        if act is None:
            inst = self.instance
            act = inst.ground(self._schemas[name], tuple(inst.objects[p] for p in ptrs))
            act = (act.pre, act.add, act.delete) if act.valid else False
            self._actions[key] = act
        return act

    def _test_bit(self, pred, ptrs):
        key = (pred, ptrs)
        bit = self._tests.get(key, -2)
        if bit == -2:
            inst = self.instance
            bit = inst.atom_bit(pred, tuple(inst.objects[p] for p in ptrs))
            self._tests[key] = bit
        return bit

    def execute(self, program: PlanningProgram, st: ExecutionState,
                budget: int = DEFAULT_BUDGET, single: bool = False, trace=None) -> RunOutcome:
        """Run ``st`` forward in place until a terminal outcome or undefined line."""
        lines = program.lines
        inst = self.instance
        numeric = self.numeric
        bound = self.bound
        tracker = self.tracker
        world, i, ptr = st.world, st.line, list(st.pointers)
        yz, yc, steps = st.yz, st.yc, st.steps
        visited, covered, lm = st.visited, st.covered, st.landmarks
        res = st.res
        status, reason = None, None
        while True:
            w = lines[i]
            if w is None:
                status = UNDEFINED
                break
            op = w.op
            if op == OP_END:
                status = SOLVED if goal_satisfied(world, inst) else FAILED
                if status == FAILED:
                    reason = END_WITHOUT_GOAL
                break
            if steps >= budget:
                status, reason = FAILED, STEP_BUDGET
                break
            steps += 1
            changed = False
            if op == OP_GOTO:
                if w.cond.holds(yz, yc):
                    key = (world, w.target, tuple(ptr), yz, yc)
                    if key in visited:
                        i = w.target
                        status, reason = FAILED, INFINITE_LOOP
                        break
                    visited.add(key)
                    i = w.target
                else:
                    i += 1
                if trace is not None:
                    trace.append(_trace_line(i, w, None, yz, yc, ptr))
                if single:
                    status = PAUSED
                    break
                continue
            if op == OP_ACTION:
                idx = tuple(ptr[a] for a in w.args)
                if numeric:
                    schema = self._schemas[w.schema]
                    new = schema.update(world, idx)
                    if schema.res is not None:
                        res = schema.res(world, idx, new)
                    else:
                        res = 0 if new is None else 1
                    if new is not None:
                        if max(new) > OVERFLOW_CAP or min(new) < -OVERFLOW_CAP:
                            world = new
                            status, reason = FAILED, OVERFLOW
                            i += 1
                            break
                        changed = new != world
                        world = new
                else:
                    act = self._strips_action(w.schema, idx)
                    if act and world & act[0] == act[0]:
                        new = (world & ~act[2]) | act[1]
                        changed = new != world
                        world = new
                        res = 1
                    else:
                        res = 0
            elif op == OP_INC:
                if ptr[w.z] < bound:
                    ptr[w.z] += 1
                    res, changed = 1, True
                else:
                    res = 0
            elif op == OP_DEC:
                if ptr[w.z] > 0:
                    ptr[w.z] -= 1
                    res, changed = 1, True
                else:
                    res = 0
            elif op == OP_SET:
                changed = ptr[w.dst] != ptr[w.src]
                ptr[w.dst] = ptr[w.src]
                res = ptr[w.dst]
            elif op == OP_CLEAR:
                changed = ptr[w.z] != 0
                ptr[w.z] = 0
                res = 0
            elif op == OP_TEST:
                bit = self._test_bit(w.predicate, tuple(ptr[a] for a in w.args))
                if bit is None:
                    res = 0
                else:
                    covered.add(bit)
                    res = world >> bit & 1
            elif op == OP_CMP:
                a, b = ptr[w.z1], ptr[w.z2]
                res = a - b
                if a != b:
                    covered.add((a, b) if a < b else (b, a))
            elif op == OP_CMPVAR:
                res, pair = self._comparisons[w.name].evaluate(world, tuple(ptr[a] for a in w.args))
                if pair[0] != pair[1]:
                    covered.add(pair if pair[0] < pair[1] else (pair[1], pair[0]))
            yz = res == 0
            yc = res > 0
            if changed and tracker is not None:
                lm = tracker.advance(lm, world, ptr)
            if trace is not None:
                trace.append(_trace_line(i, w, res, yz, yc, ptr))
            i += 1
            if single:
                status = PAUSED
                break
        st.world, st.line, st.pointers = world, i, tuple(ptr)
        st.yz, st.yc, st.steps, st.landmarks, st.res = yz, yc, steps, lm, res
        return RunOutcome(status, st, reason)


def _trace_line(i, w, res, yz, yc, ptr) -> str:
    r = "-" if res is None else str(res)
    return f"{i} | {w} | {r} | {int(yz)} {int(yc)} | {','.join(map(str, ptr))}"


def step(program: PlanningProgram, state: ExecutionState, instance) -> ExecutionState:
    """Execute exactly the instruction at ``state.line``; returns a new state."""
    w = program.lines[state.line]
    if w is None or w.op == OP_END:
        raise ValueError(f"cannot step at line {state.line}: {'undefined' if w is None else 'end'}")
    nxt = state.copy()
    Machine(instance).execute(program, nxt, single=True)
    return nxt


def run(program: PlanningProgram, instance, pointers: int, budget: int = DEFAULT_BUDGET,
        trace=None, tracker=None) -> RunOutcome:
    if budget < 1:
        raise ValueError("budget must be >= 1")
    machine = Machine(instance, tracker)
    return machine.execute(program, machine.start(pointers), budget, trace=trace)


def validate(program: PlanningProgram, problem, instances=None,
             budget: int = DEFAULT_BUDGET) -> list[RunOutcome]:
    """Run every instance of the subset (all by default)."""
    subset = problem.instances if instances is None else instances
    return [run(program, inst, problem.pointers, budget) for inst in subset]


def is_solution(program: PlanningProgram, problem, instances=None,
                budget: int = DEFAULT_BUDGET) -> bool:
    return all(o.solved for o in validate(program, problem, instances, budget))
