"""Domains, instances, world states and grounding over pointers.

STRIPS world states are Python ints used as bit-sets over the instance's
ground-atom universe; numeric world states are tuples of ints.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

Atom = tuple  # (predicate, obj1, obj2, ...)

OVERFLOW_CAP = 2**62


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Predicate:
    name: str
    types: tuple[str, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.types)


@dataclass(frozen=True)
class ActionSchema:
    """Lifted STRIPS operator. Atoms use parameter names (``?x``) as terms."""

    name: str
    params: tuple[tuple[str, str], ...]  # (variable, type)
    pre: frozenset = frozenset()
    add: frozenset = frozenset()
    delete: frozenset = frozenset()

    def __post_init__(self):
        names = {p for p, _ in self.params}
        for atom in itertools.chain(self.pre, self.add, self.delete):
            for term in atom[1:]:
                if term not in names:
                    raise ModelError(f"{self.name}: term {term} is not a parameter")
        if self.add & self.delete:
            raise ModelError(f"{self.name}: add and delete effects overlap")

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass
class StripsDomain:
    name: str
    predicates: dict[str, Predicate]
    schemas: dict[str, ActionSchema]
    types: dict[str, Optional[str]] = field(default_factory=dict)  # type -> parent
    constants: list[tuple[str, str]] = field(default_factory=list)
    requirements: tuple[str, ...] = ()

    def __post_init__(self):
        for schema in self.schemas.values():
            for atom in itertools.chain(schema.pre, schema.add, schema.delete):
                pred = self.predicates.get(atom[0])
                if pred is None:
                    raise ModelError(f"{schema.name}: undeclared predicate {atom[0]}")
                if pred.arity != len(atom) - 1:
                    raise ModelError(f"{schema.name}: wrong arity for {atom[0]}")

    def ancestors(self, typ: str) -> set[str]:
        seen = {typ, "object"}
        while typ in self.types and self.types[typ] is not None:
            typ = self.types[typ]
            if typ in seen:
                break
            seen.add(typ)
        return seen

    def is_subtype(self, typ: str, of: str) -> bool:
        return of in self.ancestors(typ)

    @property
    def is_numeric(self) -> bool:
        return False


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: tuple[str, ...]
    pre: int = 0
    add: int = 0
    delete: int = 0
    valid: bool = True  # False when a pointed object has the wrong type

    def __str__(self):
        return f"{self.name}({','.join(self.args)})"


class StripsInstance:
    """Objects, initial state and goal, plus the ground-atom universe.

    Object order is the declaration order and is what pointer values index.
    """

    def __init__(self, name: str, domain: StripsDomain, objects: Sequence[tuple[str, str]],
                 init: Sequence[Atom], goal: Sequence[Atom]):
        self.name = name
        self.domain = domain
        self.objects = [o for o, _ in objects]
        self.object_types = dict(objects)
        self.object_index = {o: i for i, o in enumerate(self.objects)}
        if len(self.object_index) != len(self.objects):
            raise ModelError(f"{name}: duplicate object names")
        self._build_universe()
        self.init_atoms = frozenset(init)
        self.goal_atoms = frozenset(goal)
        self.init = self.atoms_to_state(init)
        self.goal = self.atoms_to_state(goal)
        self._ground_cache: dict = {}

    def _build_universe(self):
        self.atoms: list[Atom] = []
        for pred in self.domain.predicates.values():
            pools = [[o for o in self.objects if self.domain.is_subtype(self.object_types[o], t)]
                     for t in pred.types]
            for args in itertools.product(*pools):
                self.atoms.append((pred.name, *args))
        self.atom_index = {a: i for i, a in enumerate(self.atoms)}

    @property
    def is_numeric(self) -> bool:
        return False

    @property
    def size(self) -> int:
        """Pointer range: number of objects."""
        return len(self.objects)

    def atoms_to_state(self, atoms) -> int:
        state = 0
        for atom in atoms:
            try:
                state |= 1 << self.atom_index[tuple(atom)]
            except KeyError:
                raise ModelError(f"{self.name}: unknown or ill-typed atom {atom}") from None
        return state

    def state_atoms(self, state: int) -> list[Atom]:
        return [a for i, a in enumerate(self.atoms) if state >> i & 1]

    def ground(self, schema: ActionSchema, objects: tuple[str, ...]) -> GroundAction:
        key = (schema.name, objects)
        cached = self._ground_cache.get(key)
        if cached is not None:
            return cached
        if len(objects) != schema.arity:
            raise ModelError(f"{schema.name} expects {schema.arity} arguments")
        binding = {}
        valid = True
        for (var, typ), obj in zip(schema.params, objects):
            binding[var] = obj
            if not self.domain.is_subtype(self.object_types[obj], typ):
                valid = False
        if valid:
            masks = []
            for atoms in (schema.pre, schema.add, schema.delete):
                mask = 0
                for atom in atoms:
                    ground = (atom[0], *(binding[t] for t in atom[1:]))
                    idx = self.atom_index.get(ground)
                    if idx is None:
                        valid = False
                        break
                    mask |= 1 << idx
                masks.append(mask)
        action = (GroundAction(schema.name, objects, *masks) if valid
                  else GroundAction(schema.name, objects, valid=False))
        self._ground_cache[key] = action
        return action

    def atom_bit(self, pred: str, objects: tuple[str, ...]) -> Optional[int]:
        return self.atom_index.get((pred, *objects))

    def __repr__(self):
        return f"StripsInstance({self.name!r}, {len(self.objects)} objects, {len(self.atoms)} atoms)"


@dataclass(frozen=True)
class NumericActionSchema:
    """Planning action over pointed registers.

    ``update(regs, idx)`` returns the new register tuple, or None when the
    action is not applicable. ``idx`` holds the pointed register indices.
    """

    name: str
    arity: int
    update: Callable[[tuple, tuple], Optional[tuple]]
    res: Optional[Callable[[tuple, tuple, Optional[tuple]], int]] = None


@dataclass(frozen=True)
class NumericComparison:
    """A ``cmp_<var>`` instruction: res is a difference of register values.

    ``evaluate(regs, idx)`` returns (res, compared register pair).
    """

    name: str
    arity: int
    evaluate: Callable[[tuple, tuple], tuple[int, tuple[int, int]]]


@dataclass
class NumericDomain:
    name: str
    schemas: dict[str, NumericActionSchema]
    comparisons: dict[str, NumericComparison]
    scalars: tuple[str, ...] = ()
    description: str = ""

    @property
    def is_numeric(self) -> bool:
        return True


class NumericInstance:
    """Register vector plus named scalar registers stored after it.

    Pointers address only the vector part; goals may constrain any register.
    """

    def __init__(self, name: str, domain: NumericDomain, registers: Sequence[int],
                 goal: Sequence[tuple[int, int]], scalars: Optional[dict] = None):
        self.name = name
        self.domain = domain
        self.registers = tuple(int(r) for r in registers)
        scalars = scalars or {}
        missing = set(domain.scalars) - set(scalars)
        if missing:
            raise ModelError(f"{name}: missing scalar registers {sorted(missing)}")
        self.scalar_values = tuple(int(scalars[s]) for s in domain.scalars)
        self.init = self.registers + self.scalar_values
        self.goal = tuple((int(i), int(v)) for i, v in goal)
        for i, _ in self.goal:
            if not 0 <= i < len(self.init):
                raise ModelError(f"{name}: goal register {i} out of bounds")
        if not self.registers:
            raise ModelError(f"{name}: empty register vector")

    @property
    def is_numeric(self) -> bool:
        return True

    @property
    def size(self) -> int:
        return len(self.registers)

    def scalar_index(self, name: str) -> int:
        return len(self.registers) + self.domain.scalars.index(name)

    def __repr__(self):
        return f"NumericInstance({self.name!r}, {len(self.registers)} registers)"


Instance = Union[StripsInstance, NumericInstance]
Domain = Union[StripsDomain, NumericDomain]


def ground_over_pointers(schema: ActionSchema, pointers: Sequence[int],
                         instance: StripsInstance) -> GroundAction:
    """Instantiate a schema with the objects the pointers currently index."""
    if len(pointers) != schema.arity:
        raise ModelError(f"{schema.name}: expected {schema.arity} pointer arguments")
    objs = instance.objects
    for p in pointers:
        if not 0 <= p < len(objs):
            raise ModelError(f"pointer value {p} out of range")
    return instance.ground(schema, tuple(objs[p] for p in pointers))


def applicable(state, action) -> bool:
    if isinstance(action, GroundAction):
        return action.valid and state & action.pre == action.pre
    schema, regs_idx = action
    return schema.update(state, regs_idx) is not None


def apply(state, action):
    """Successor state; the action must be applicable."""
    if isinstance(action, GroundAction):
        if not applicable(state, action):
            raise ModelError(f"{action} is not applicable")
        return (state & ~action.delete) | action.add
    schema, regs_idx = action
    result = schema.update(state, regs_idx)
    if result is None:
        raise ModelError(f"{schema.name} is not applicable")
    return result


def goal_satisfied(state, instance: Instance) -> bool:
    if instance.is_numeric:
        return all(state[i] == v for i, v in instance.goal)
    return state & instance.goal == instance.goal


@dataclass
class GPProblem:
    domain: Domain
    instances: list
    pointers: int
    lines: int
    name: str = ""

    def __post_init__(self):
        if not self.instances:
            raise ModelError("a GP problem needs at least one instance")
        if self.pointers < 1 or self.lines < 1:
            raise ModelError("pointer count and line count must be >= 1")
        for inst in self.instances:
            if inst.domain is not self.domain:
                raise ModelError(f"instance {inst.name} belongs to another domain")

    @property
    def is_numeric(self) -> bool:
        return self.domain.is_numeric
