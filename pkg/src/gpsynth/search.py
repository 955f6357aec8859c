"""Best-first search in the space of planning programs.

Nodes are partial programs. Executing a node on the active instances stops
at the first undefined line reached; that line is the one its children
program. Children resume the parent's paused executions instead of running
from scratch, which keeps evaluation linear in the new work done.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional

from .heuristics import EvaluatorStack, HeuristicContext
from .model import GPProblem
from .novelty import occurrences
from .program import (END, NUMERIC_CONDITIONS, STRIPS_CONDITIONS, Clear, Cmp, CmpVar, Dec, Goto,
                      Inc, Instruction, PlanningAction, PlanningProgram, Set, Test)
from .vm import DEFAULT_BUDGET, FAILED, SOLVED, UNDEFINED, Machine, RunOutcome, validate

log = logging.getLogger(__name__)

BFS = "bfs"
PGP = "pgp"

RESULT_SOLVED = "solved"
RESULT_UNSOLVABLE = "unsolvable"
RESULT_LIMIT = "resource-limit"

# Per-run step budget while searching. Counter-bumping loops never repeat a
# machine state, so each such child would otherwise burn the full validation
# budget; training instances are small enough that real solutions stay far below.
SEARCH_BUDGET = 10_000


@dataclass
class SearchConfig:
    v: int
    evaluators: EvaluatorStack = field(default_factory=lambda: EvaluatorStack(("h5", "f1")))
    mode: str = BFS
    budget: int = SEARCH_BUDGET
    validation_budget: int = DEFAULT_BUDGET
    time_limit: Optional[float] = None
    max_expanded: Optional[int] = None
    max_evaluated: Optional[int] = None
    max_open: Optional[int] = None
    restrictions: bool = True
    novelty: bool = True
    on_expand: Optional[Callable[[PlanningProgram], None]] = None
    on_generate: Optional[Callable[[PlanningProgram], None]] = None

    def __post_init__(self):
        if isinstance(self.evaluators, (str, list, tuple)):
            self.evaluators = EvaluatorStack(self.evaluators)
        self.mode = self.mode.lower()
        if self.mode not in (BFS, PGP):
            raise ValueError(f"unknown search mode {self.mode!r}")
        if self.v < 1:
            raise ValueError("novelty bound v must be >= 1")
        if self.budget < 1:
            raise ValueError("step budget must be >= 1")

    def check(self, problem: GPProblem):
        if self.v > problem.lines:
            raise ValueError(f"novelty bound v={self.v} exceeds n={problem.lines}")

    @property
    def label(self) -> str:
        return self.evaluators.label(self.mode, self.novelty)


@dataclass
class SearchStats:
    expanded: int = 0
    evaluated: int = 0
    pruned_novelty: int = 0
    pruned_deadend: int = 0
    duplicates: int = 0
    time: float = 0.0
    active_history: list[list[int]] = field(default_factory=list)

    @property
    def escalations(self) -> int:
        return max(0, len(self.active_history) - 1)

    def as_dict(self) -> dict:
        return {"expanded": self.expanded, "evaluated": self.evaluated,
                "pruned_novelty": self.pruned_novelty, "pruned_deadend": self.pruned_deadend,
                "duplicates": self.duplicates, "escalations": self.escalations,
                "active_history": [list(a) for a in self.active_history]}


@dataclass
class SearchResult:
    status: str
    program: Optional[PlanningProgram]
    stats: SearchStats
    reason: str = ""

    @property
    def solved(self) -> bool:
        return self.status == RESULT_SOLVED


class SearchNode:
    __slots__ = ("program", "outcomes", "vector", "counts", "order")

    def __init__(self, program, outcomes, vector=(), order=0):
        self.program = program
        self.outcomes = outcomes
        self.vector = vector
        self.counts: Optional[Counter] = None
        self.order = order

    @property
    def line(self) -> Optional[int]:
        """The programmable line: first undefined line reached on an active instance."""
        for o in self.outcomes:
            if o.status == UNDEFINED:
                return o.state.line
        return None

    @property
    def dead(self) -> bool:
        return any(o.status == FAILED for o in self.outcomes)

    @property
    def solves(self) -> bool:
        return all(o.status == SOLVED for o in self.outcomes)

    def occurrence_counts(self) -> Counter:
        if self.counts is None:
            self.counts = occurrences(self.program)
        return self.counts


def _pointer_tuples(k: int, arity: int):
    return itertools.product(range(k), repeat=arity)


def instruction_repertoire(problem: GPProblem, line: int) -> list[Instruction]:
    """Every instruction writable at ``line``, in the fixed enumeration order."""
    dom = problem.domain
    k = problem.pointers
    out: list[Instruction] = []
    for name in sorted(dom.schemas):
        for args in _pointer_tuples(k, dom.schemas[name].arity):
            out.append(PlanningAction(name, args))
    for z in range(k):
        out += [Inc(z), Dec(z), Clear(z)]
    for a in range(k):
        for b in range(k):
            if a != b:
                out.append(Set(a, b))
    if problem.is_numeric:
        for a in range(k):
            for b in range(k):
                if a != b:
                    out.append(Cmp(a, b))
        for name in sorted(dom.comparisons):
            for args in _pointer_tuples(k, dom.comparisons[name].arity):
                out.append(CmpVar(name, args))
        conds = NUMERIC_CONDITIONS
    else:
        for name in sorted(dom.predicates):
            for args in _pointer_tuples(k, dom.predicates[name].arity):
                out.append(Test(name, args))
        conds = STRIPS_CONDITIONS
    for target in range(problem.lines - 1):
        if target in (line, line + 1):
            continue
        for c in conds:
            out.append(Goto(target, c))
    out.append(END)
    return out


def candidate_instructions(program: PlanningProgram, line: int, problem: GPProblem,
                           config: SearchConfig, counts: Optional[Counter] = None,
                           stats: Optional[SearchStats] = None) -> list[Instruction]:
    """Repertoire at ``line`` filtered by the structural restrictions and novelty."""
    if counts is None:
        counts = occurrences(program)
    lines = program.lines
    targeted = {w.target for w in lines if isinstance(w, Goto)}
    out = []
    for w in instruction_repertoire(problem, line):
        if config.restrictions:
            if line == 0 and isinstance(w, (Clear, Dec, Set)):
                continue
            if isinstance(w, Goto):
                if isinstance(lines[w.target], Goto) or line in targeted:
                    continue
        ident = w.identity()
        if config.novelty and ident is not None and 1 + counts[ident] > config.v:
            if stats is not None:
                stats.pruned_novelty += 1
            continue
        out.append(w)
    return out


class _Evaluator:
    """Machines, heuristic context and evaluator stack for one active set."""

    def __init__(self, problem: GPProblem, active: list[int], config: SearchConfig):
        self.problem = problem
        self.active = list(active)
        self.config = config
        instances = [problem.instances[i] for i in self.active]
        self.ctx = HeuristicContext(instances, config.evaluators.needs)
        self.machines = [Machine(inst, self.ctx.tracker(k)) for k, inst in enumerate(instances)]

    def root_outcomes(self, program: PlanningProgram) -> list[RunOutcome]:
        out = []
        for m in self.machines:
            st = m.start(self.problem.pointers)
            out.append(m.execute(program, st, self.config.budget))
        return out

    def child_outcomes(self, parent: SearchNode, program: PlanningProgram, line: int):
        out = []
        for m, o in zip(self.machines, parent.outcomes):
            if o.status == UNDEFINED and o.state.line == line:
                o = m.execute(program, o.state.copy(), self.config.budget)
            out.append(o)
        return out

    def score(self, node: SearchNode):
        node.vector = self.config.evaluators.evaluate(node.program, node.outcomes, self.ctx)


def _end_first(cands: list[Instruction]) -> list[Instruction]:
    """An ``end`` child never enters the open list (it either solves or is a
    dead end), so trying it first only decides which solution is returned."""
    if END in cands:
        return [END] + [w for w in cands if w != END]
    return cands


def _first_failure(program, problem, indices, budget) -> Optional[int]:
    for i in indices:
        o = validate(program, problem, [problem.instances[i]], budget)[0]
        if not o.solved:
            return i
    return None


def search(problem: GPProblem, config: SearchConfig) -> SearchResult:
    """BFS(v) when ``config.mode`` is bfs, PGP(v) otherwise."""
    config.check(problem)
    stats = SearchStats()
    t0 = time.monotonic()
    every = list(range(len(problem.instances)))
    active = every[:] if config.mode == BFS else [0]
    stats.active_history.append(active[:])
    ev = _Evaluator(problem, active, config)
    counter = itertools.count()
    seen: set = set()

    def finish(status, program=None, reason=""):
        stats.time = time.monotonic() - t0
        log.info("search %s: expanded=%d evaluated=%d time=%.2fs", status,
                 stats.expanded, stats.evaluated, stats.time)
        return SearchResult(status, program, stats, reason)

    def accept(program) -> Optional[int]:
        """None when ``program`` validates on every instance, else the
        first failing non-active instance."""
        rest = [i for i in every if i not in active]
        return _first_failure(program, problem, rest, config.validation_budget)

    root_prog = PlanningProgram(problem.lines)
    root = SearchNode(root_prog, ev.root_outcomes(root_prog), order=next(counter))
    stats.evaluated += 1
    seen.add(root_prog.lines)
    if config.on_generate:
        config.on_generate(root_prog)
    pending_solution = root if root.solves else None
    open_list: list = []
    if not root.dead and pending_solution is None:
        ev.score(root)
        heapq.heappush(open_list, (root.vector, root.order, root))

    while True:
        if pending_solution is not None:
            node, pending_solution = pending_solution, None
            fail = accept(node.program)
            if fail is None:
                if all(o.solved for o in validate(node.program, problem, budget=config.validation_budget)):
                    return finish(RESULT_SOLVED, node.program)
                log.warning("solution failed independent validation; continuing")
            else:
                active.append(fail)
                stats.active_history.append(active[:])
                log.info("escalating: instance %d added (%d active)", fail, len(active))
                ev = _Evaluator(problem, active, config)
                nodes = [entry[2] for entry in open_list] + [node]
                open_list = []
                for nd in nodes:
                    nd.outcomes = ev.root_outcomes(nd.program)
                    if nd.dead:
                        stats.pruned_deadend += 1
                        continue
                    if nd.solves:
                        pending_solution = nd
                        continue
                    ev.score(nd)
                    open_list.append((nd.vector, nd.order, nd))
                heapq.heapify(open_list)
                continue
        if not open_list:
            return finish(RESULT_UNSOLVABLE)
        if config.time_limit is not None and time.monotonic() - t0 > config.time_limit:
            return finish(RESULT_LIMIT, reason="time limit")
        if config.max_expanded is not None and stats.expanded >= config.max_expanded:
            return finish(RESULT_LIMIT, reason="expansion limit")
        if config.max_evaluated is not None and stats.evaluated >= config.max_evaluated:
            return finish(RESULT_LIMIT, reason="evaluation limit")
        if config.max_open is not None and len(open_list) > config.max_open:
            return finish(RESULT_LIMIT, reason="open-list limit")
        _, _, node = heapq.heappop(open_list)
        line = node.line
        stats.expanded += 1
        if config.on_expand:
            config.on_expand(node.program)
        counts = node.occurrence_counts()
        for w in _end_first(candidate_instructions(node.program, line, problem, config,
                                                   counts, stats)):
            prog = node.program.with_line(line, w)
            if prog.lines in seen:
                stats.duplicates += 1
                continue
            seen.add(prog.lines)
            child = SearchNode(prog, ev.child_outcomes(node, prog, line), order=next(counter))
            stats.evaluated += 1
            if config.on_generate:
                config.on_generate(prog)
            if child.dead:
                stats.pruned_deadend += 1
                continue
            if child.solves:
                pending_solution = child
                break
            ev.score(child)
            heapq.heappush(open_list, (child.vector, child.order, child))


def expand(node: SearchNode, problem: GPProblem, config: SearchConfig,
           active: Optional[list[int]] = None) -> list[SearchNode]:
    """Evaluated, non-dead children of ``node`` (standalone helper for inspection)."""
    ev = _Evaluator(problem, active if active is not None else list(range(len(problem.instances))),
                    config)
    if not node.outcomes:
        node.outcomes = ev.root_outcomes(node.program)
    line = node.line
    if line is None:
        return []
    out = []
    for k, w in enumerate(candidate_instructions(node.program, line, problem, config)):
        prog = node.program.with_line(line, w)
        child = SearchNode(prog, ev.child_outcomes(node, prog, line), order=k)
        if child.dead:
            continue
        ev.score(child)
        out.append(child)
    return out


def make_root(problem: GPProblem, config: SearchConfig,
              active: Optional[list[int]] = None) -> SearchNode:
    ev = _Evaluator(problem, active if active is not None else list(range(len(problem.instances))),
                    config)
    prog = PlanningProgram(problem.lines)
    node = SearchNode(prog, ev.root_outcomes(prog))
    if not node.dead and not node.solves:
        ev.score(node)
    return node


def bfs(problem: GPProblem, config: SearchConfig) -> SearchResult:
    config.mode = BFS
    return search(problem, config)


def pgp(problem: GPProblem, config: SearchConfig) -> SearchResult:
    config.mode = PGP
    return search(problem, config)
