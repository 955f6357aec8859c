"""Fact landmarks by backchaining over the delete relaxation, enriched with
pointer landmarks, and the per-run acceptance tracker behind f_lm.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .model import GroundAction, StripsInstance


def ground_actions(instance: StripsInstance) -> list[GroundAction]:
    """All well-typed ground actions of the instance."""
    dom = instance.domain
    out = []
    for schema in dom.schemas.values():
        pools = [[o for o in instance.objects if dom.is_subtype(instance.object_types[o], t)]
                 for _, t in schema.params]
        for objs in itertools.product(*pools):
            act = instance.ground(schema, tuple(objs))
            if act.valid:
                out.append(act)
    return out


def relaxed_reachable(init: int, actions, excluded=None) -> int:
    """Atoms reachable from ``init`` ignoring deletes; ``excluded`` actions are skipped."""
    reached = init
    pending = [a for a in actions if excluded is None or not excluded(a)]
    changed = True
    while changed:
        changed = False
        rest = []
        for a in pending:
            if reached & a.pre == a.pre:
                if a.add & ~reached:
                    reached |= a.add
                    changed = True
            else:
                rest.append(a)
        pending = rest
    return reached


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


@dataclass
class LandmarkGraph:
    """Fact landmarks (atom bit indices) plus one pointer landmark per object.

    ``orderings`` are fact-to-fact edges (before, after); every fact landmark
    is implicitly preceded by the pointer landmarks of its object arguments.
    """

    instance: StripsInstance
    facts: list[int] = field(default_factory=list)
    orderings: set[tuple[int, int]] = field(default_factory=set)

    def atom(self, bit: int):
        return self.instance.atoms[bit]

    def fact_atoms(self) -> list[tuple]:
        return [self.atom(b) for b in self.facts]

    def pointer_objects(self, bit: int) -> list[int]:
        idx = self.instance.object_index
        return sorted({idx[o] for o in self.atom(bit)[1:]})

    @property
    def pointer_landmarks(self) -> list[int]:
        """Object indices that some fact landmark needs pointed at."""
        objs = set()
        for b in self.facts:
            objs.update(self.pointer_objects(b))
        return sorted(objs)

    def edges(self) -> list[tuple]:
        """All edges as (kind, source, target) with atoms/objects by name."""
        out = []
        objs = self.instance.objects
        for b in self.facts:
            for o in self.pointer_objects(b):
                out.append(("pointer", objs[o], self.atom(b)))
        for a, b in sorted(self.orderings):
            out.append(("fact", self.atom(a), self.atom(b)))
        return out

    def __len__(self):
        return len(self.facts) + len(self.pointer_landmarks)

    def to_text(self) -> str:
        fmt = lambda a: "(" + " ".join(a) + ")"  # noqa: E731
        lines = [f"instance {self.instance.name}"]
        lines += [f"fact {fmt(self.atom(b))}" for b in self.facts]
        lines += [f"pointer {self.instance.objects[o]}" for o in self.pointer_landmarks]
        for kind, src, dst in self.edges():
            src_s = src if kind == "pointer" else fmt(src)
            lines.append(f"edge {src_s} -> {fmt(dst)}")
        return "\n".join(lines) + "\n"


def extract_landmark_graph(instance: StripsInstance, actions=None) -> LandmarkGraph:
    """Goals are landmarks; for a landmark ``l`` not initially true, every
    precondition shared by all first achievers of ``l`` (achievers reachable
    in the relaxation without ``l``) is a landmark ordered before ``l``.
    """
    if actions is None:
        actions = ground_actions(instance)
    init = instance.init
    graph = LandmarkGraph(instance)
    seen = set()
    queue = list(_bits(instance.goal))
    for b in queue:
        seen.add(b)
    succ: dict[int, set[int]] = {}
    while queue:
        lm = queue.pop(0)
        graph.facts.append(lm)
        if init >> lm & 1:
            continue
        bit = 1 << lm
        without = relaxed_reachable(init, actions, excluded=lambda a: a.add & bit)
        first = [a for a in actions if a.add & bit and without & a.pre == a.pre]
        if not first:
            continue
        shared = first[0].pre
        for a in first[1:]:
            shared &= a.pre
        for p in _bits(shared):
            if _reaches(succ, lm, p):
                continue
            graph.orderings.add((p, lm))
            succ.setdefault(p, set()).add(lm)
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return graph


def _reaches(succ, src, dst) -> bool:
    stack, seen = [src], set()
    while stack:
        x = stack.pop()
        if x == dst:
            return True
        if x in seen:
            continue
        seen.add(x)
        stack.extend(succ.get(x, ()))
    return False


class LandmarkTracker:
    """Accepts landmarks along one execution trajectory.

    Progress is a pair of ints: bitmask over fact-landmark ids and bitmask
    over object indices of accepted pointer landmarks. A fact landmark is
    accepted once its atom holds while all its predecessors are accepted;
    landmarks true initially are accepted from the start. Nothing is ever
    un-accepted.
    """

    def __init__(self, graph: LandmarkGraph):
        self.graph = graph
        order = _topological(graph)
        self.fact_bits = [graph.facts[i] for i in order]
        pos = {b: k for k, b in enumerate(self.fact_bits)}
        self.fact_preds = []
        self.fact_ptrs = []
        for b in self.fact_bits:
            m = 0
            for a, c in graph.orderings:
                if c == b:
                    m |= 1 << pos[a]
            self.fact_preds.append(m)
            pm = 0
            for o in graph.pointer_objects(b):
                pm |= 1 << o
            self.fact_ptrs.append(pm)
        self.pointer_mask = 0
        for o in graph.pointer_landmarks:
            self.pointer_mask |= 1 << o
        self.total = len(self.fact_bits) + bin(self.pointer_mask).count("1")
        self.all_facts = (1 << len(self.fact_bits)) - 1

    def initial(self, world: int, pointers):
        facts = 0
        for k, b in enumerate(self.fact_bits):
            if self.graph.instance.init >> b & 1:
                facts |= 1 << k
        return self.advance((facts, 0), world, pointers)

    def advance(self, progress, world: int, pointers):
        facts, ptrs = progress
        for p in pointers:
            ptrs |= 1 << p
        ptrs &= self.pointer_mask
        if facts != self.all_facts:
            for k, b in enumerate(self.fact_bits):
                kb = 1 << k
                if facts & kb or not world >> b & 1:
                    continue
                pm = self.fact_ptrs[k]
                if ptrs & pm != pm:
                    continue
                pre = self.fact_preds[k]
                if facts & pre == pre:
                    facts |= kb
        return facts, ptrs

    def unaccepted(self, progress) -> int:
        facts, ptrs = progress
        return self.total - bin(facts).count("1") - bin(ptrs).count("1")


def _topological(graph: LandmarkGraph) -> list[int]:
    """Indices into graph.facts in an order respecting the fact orderings."""
    index = {b: i for i, b in enumerate(graph.facts)}
    indeg = {i: 0 for i in range(len(graph.facts))}
    out: dict[int, list[int]] = {}
    for a, b in graph.orderings:
        out.setdefault(index[a], []).append(index[b])
        indeg[index[b]] += 1
    ready = sorted(i for i, d in indeg.items() if d == 0)
    order = []
    while ready:
        i = ready.pop(0)
        order.append(i)
        for j in sorted(out.get(i, ())):
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
    if len(order) != len(graph.facts):
        raise ValueError("landmark orderings contain a cycle")
    return order
