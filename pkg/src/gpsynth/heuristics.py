"""Evaluation functions for planning programs and their lexicographic stacking.

Structural costs (f1, f_ln, f_ha) depend only on the program text; the
execution-based ones (h5, f_cn, f_lm) read the outcomes of running the
program on each evaluated instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .landmarks import LandmarkTracker, extract_landmark_graph
from .program import OP_ACTION, OP_CMP, OP_CMPVAR, OP_END, OP_GOTO, OP_TEST, PlanningProgram


class ConfigurationError(ValueError):
    pass


# -- lifted helpful actions -------------------------------------------------

def lift(atoms) -> frozenset[str]:
    """Predicate names of a collection of ground or lifted atoms."""
    return frozenset(a[0] for a in atoms)


@dataclass
class HelpfulActionSet:
    H: frozenset[str]
    layers: list[tuple[frozenset[str], frozenset[str]]] = field(default_factory=list)

    def __contains__(self, schema: str) -> bool:
        return schema in self.H

    def to_text(self) -> str:
        out = ["H: " + " ".join(sorted(self.H))]
        for i, (u, s) in enumerate(self.layers):
            out.append(f"U{i}: {' '.join(sorted(u)) or '-'} | S{i}: {' '.join(sorted(s)) or '-'}")
        return "\n".join(out) + "\n"


def helpful_layers(instance) -> list[tuple[frozenset[str], frozenset[str]]]:
    """Regression layers (U_i, S_i) of one instance, ending at a fixpoint of U.

    A schema supports U_i when its add effects mention a predicate of U_i and
    no earlier layer; regression keeps U_i, adds the schema's preconditions
    not lifted-present initially and removes what it adds.
    """
    dom = instance.domain
    lifted_init = lift(instance.init_atoms)
    u = lift(instance.goal_atoms - instance.init_atoms)
    adds = {s.name: lift(s.add) for s in dom.schemas.values()}
    pres = {s.name: lift(s.pre) for s in dom.schemas.values()}
    layers = []
    previous: list[frozenset[str]] = []
    while True:
        s_i = frozenset(name for name in sorted(adds)
                        if adds[name] & u and not any(adds[name] & p for p in previous))
        layers.append((u, s_i))
        nxt: set[str] = set()
        for name in s_i:
            nxt |= (u | (pres[name] - lifted_init)) - adds[name]
        nxt = frozenset(nxt)
        previous.append(u)
        if nxt == u:
            break
        u = nxt
    return layers


def lifted_helpful_actions(instances) -> HelpfulActionSet:
    """Union over instances of the schemas appearing in any support layer."""
    H: set[str] = set()
    layers = []
    for inst in instances:
        if inst.is_numeric:
            raise ConfigurationError("helpful actions are only defined for STRIPS domains")
        lay = helpful_layers(inst)
        layers.extend(lay)
        for _, s in lay:
            H |= s
    return HelpfulActionSet(frozenset(H), layers)


# -- evaluation context --------------------------------------------------------

class HeuristicContext:
    """Static data shared by evaluators over a fixed set of instances."""

    def __init__(self, instances: Sequence, needs: set[str] = frozenset()):
        self.instances = list(instances)
        self.trackers: Optional[list[LandmarkTracker]] = None
        self.helpful: Optional[HelpfulActionSet] = None
        numeric = bool(self.instances) and self.instances[0].is_numeric
        if "flm" in needs:
            if numeric:
                raise ConfigurationError("f_lm needs a STRIPS domain")
            self.trackers = [LandmarkTracker(extract_landmark_graph(i)) for i in self.instances]
        if "fha" in needs:
            self.helpful = lifted_helpful_actions(self.instances)

    def tracker(self, k: int):
        return None if self.trackers is None else self.trackers[k]


# -- evaluators ------------------------------------------------------------------

def f1(program: PlanningProgram, outcomes=None, ctx=None) -> int:
    return sum(1 for w in program.lines if w is not None and w.op == OP_GOTO)


_NOT_LENGTH = (OP_GOTO, OP_TEST, OP_CMP, OP_CMPVAR)


def f_ln(program: PlanningProgram, outcomes=None, ctx=None) -> int:
    # the reserved final end line is structural, so only programmed lines count
    body = program.lines[:-1]
    return sum(1 for w in body if w is not None and w.op not in _NOT_LENGTH)


def f_ha(program: PlanningProgram, outcomes=None, ctx=None, helpful=None) -> int:
    H = helpful if helpful is not None else ctx.helpful
    return sum(1 for w in program.lines
               if w is not None and w.op == OP_ACTION and w.schema not in H)


def distance(world, instance) -> float:
    """Euclidean distance from the goal-constrained variables to their targets."""
    if instance.is_numeric:
        return math.sqrt(sum((world[i] - v) ** 2 for i, v in instance.goal))
    return math.sqrt(bin(instance.goal & ~world).count("1"))


def h5(program: PlanningProgram, outcomes, ctx) -> float:
    return sum(distance(o.state.world, inst) for o, inst in zip(outcomes, ctx.instances))


def coverage_universe(instance) -> int:
    if instance.is_numeric:
        r = len(instance.init)
        return r * (r - 1) // 2
    return len(instance.atoms)


def f_cn(program: PlanningProgram, outcomes, ctx) -> int:
    return sum(coverage_universe(inst) - len(o.state.covered)
               for o, inst in zip(outcomes, ctx.instances))


def f_lm(program: PlanningProgram, outcomes, ctx) -> int:
    if ctx.trackers is None:
        raise ConfigurationError("landmark trackers were not built")
    return sum(t.unaccepted(o.state.landmarks) for o, t in zip(outcomes, ctx.trackers))


EVALUATORS: dict[str, Callable] = {
    "f1": f1, "h5": h5, "flm": f_lm, "fha": f_ha, "fln": f_ln, "fcn": f_cn,
}
EXECUTION_BASED = {"h5", "flm", "fcn"}

_ALIASES = {"1": "f1", "5": "h5", "lm": "flm", "ha": "fha", "ln": "fln", "cn": "fcn",
            "f_lm": "flm", "f_ha": "fha", "f_ln": "fln", "f_cn": "fcn", "h_5": "h5", "f_1": "f1"}


def evaluator_id(name: str) -> str:
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in EVALUATORS:
        raise ConfigurationError(f"unknown evaluator {name!r}; known: {', '.join(EVALUATORS)}")
    return key


class EvaluatorStack:
    """Ordered evaluators; vectors compare lexicographically, smaller first."""

    def __init__(self, names):
        if isinstance(names, str):
            names = names.split(",")
        self.ids = tuple(evaluator_id(n) for n in names)
        if not self.ids:
            raise ConfigurationError("evaluator stack is empty")

    @property
    def needs_landmarks(self) -> bool:
        return "flm" in self.ids

    @property
    def needs(self) -> set[str]:
        return set(self.ids)

    def evaluate(self, program, outcomes, ctx) -> tuple:
        return tuple(EVALUATORS[e](program, outcomes, ctx) for e in self.ids)

    @staticmethod
    def compare(u: tuple, v: tuple) -> int:
        return (u > v) - (u < v)

    def label(self, mode: str = "B", novelty: bool = True) -> str:
        short = {"f1": "1", "h5": "5", "flm": "lm", "fha": "ha", "fln": "ln", "fcn": "cn"}
        head = mode.upper()[0] + ("(v)" if novelty else "")
        return f"{head}_{{{','.join(short[e] for e in self.ids)}}}"

    def __repr__(self):
        return f"EvaluatorStack({','.join(self.ids)})"
