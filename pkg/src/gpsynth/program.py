"""Planning programs with pointers and their line-oriented text format.

Pointers are written ``z1 .. zK`` in text and stored 0-based.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence

# opcodes, used by the VM for dispatch
OP_ACTION, OP_INC, OP_DEC, OP_SET, OP_CLEAR, OP_TEST, OP_CMP, OP_CMPVAR, OP_GOTO, OP_END = range(10)


class ProgramError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Condition:
    """Required flag valuation for a goto, as a predicate over (y_z, y_c)."""

    name: str
    text: str

    def holds(self, yz: bool, yc: bool) -> bool:
        return _COND_FUNCS[self.name](yz, yc)

    def __str__(self):
        return self.text


_COND_FUNCS = {
    "zero": lambda yz, yc: yz,
    "nonzero": lambda yz, yc: not yz,
    "pos": lambda yz, yc: yc,
    "nonpos": lambda yz, yc: not yc,
    "neg": lambda yz, yc: not yz and not yc,
    "nonneg": lambda yz, yc: yz or yc,
}

ZERO = Condition("zero", "y_z=1")
NONZERO = Condition("nonzero", "y_z=0")
POS = Condition("pos", "res>0")
NONPOS = Condition("nonpos", "res<=0")
NEG = Condition("neg", "res<0")
NONNEG = Condition("nonneg", "res>=0")

STRIPS_CONDITIONS = (ZERO, NONZERO)
NUMERIC_CONDITIONS = (ZERO, NONZERO, POS, NONPOS, NEG, NONNEG)

_COND_ALIASES = {
    "y_z=1": ZERO, "y_z=true": ZERO, "y_z": ZERO, "res=0": ZERO, "res==0": ZERO, "=0": ZERO,
    "y_z=0": NONZERO, "y_z=false": NONZERO, "!y_z": NONZERO, "res!=0": NONZERO, "!=0": NONZERO,
    "res>0": POS, ">0": POS, "y_c=1": POS, "y_c=true": POS, "y_c": POS,
    "res<=0": NONPOS, "<=0": NONPOS, "y_c=0": NONPOS, "y_c=false": NONPOS, "!y_c": NONPOS,
    "res<0": NEG, "<0": NEG,
    "res>=0": NONNEG, ">=0": NONNEG,
}


def parse_condition(text: str) -> Condition:
    key = text.replace(" ", "").lower()
    try:
        return _COND_ALIASES[key]
    except KeyError:
        raise ProgramError(f"unknown flag condition {text!r}") from None


def _zs(args) -> str:
    return ",".join(f"z{a + 1}" for a in args)


@dataclass(frozen=True)
class Instruction:
    op = -1

    def identity(self):
        """Novelty identity, or None for instructions that are never ranked."""
        return self

    @property
    def is_ram(self) -> bool:
        return OP_INC <= self.op <= OP_CMPVAR


@dataclass(frozen=True)
class PlanningAction(Instruction):
    schema: str
    args: tuple[int, ...]
    op = OP_ACTION

    def identity(self):
        return ("schema", self.schema)

    def __str__(self):
        return f"{self.schema}({_zs(self.args)})"


@dataclass(frozen=True)
class Inc(Instruction):
    z: int
    op = OP_INC

    def __str__(self):
        return f"inc(z{self.z + 1})"


@dataclass(frozen=True)
class Dec(Instruction):
    z: int
    op = OP_DEC

    def __str__(self):
        return f"dec(z{self.z + 1})"


@dataclass(frozen=True)
class Set(Instruction):
    """``set(z1, z2)`` assigns the value of ``z1`` to ``z2``."""

    src: int
    dst: int
    op = OP_SET

    def __str__(self):
        return f"set(z{self.src + 1},z{self.dst + 1})"


@dataclass(frozen=True)
class Clear(Instruction):
    z: int
    op = OP_CLEAR

    def __str__(self):
        return f"clear(z{self.z + 1})"


@dataclass(frozen=True)
class Test(Instruction):
    predicate: str
    args: tuple[int, ...]
    op = OP_TEST

    def __str__(self):
        return f"test_{self.predicate}({_zs(self.args)})"


@dataclass(frozen=True)
class Cmp(Instruction):
    z1: int
    z2: int
    op = OP_CMP

    def __str__(self):
        return f"cmp(z{self.z1 + 1},z{self.z2 + 1})"


@dataclass(frozen=True)
class CmpVar(Instruction):
    name: str
    args: tuple[int, ...]
    op = OP_CMPVAR

    def __str__(self):
        return f"cmp_{self.name}({_zs(self.args)})"


@dataclass(frozen=True)
class Goto(Instruction):
    target: int
    cond: Condition
    op = OP_GOTO

    def identity(self):
        return None

    def __str__(self):
        return f"goto({self.target},{self.cond})"


@dataclass(frozen=True)
class End(Instruction):
    op = OP_END

    def identity(self):
        return None

    def __str__(self):
        return "end"


END = End()


class PlanningProgram:
    """Fixed-capacity sequence of ``n`` lines; the last line is always ``end``.

    Undefined lines hold None. Instances are treated as immutable.
    """

    __slots__ = ("lines", "_hash")

    def __init__(self, n: int, lines: Optional[Sequence[Optional[Instruction]]] = None):
        if n < 1:
            raise ProgramError("a program needs at least one line")
        body = list(lines or [])
        if len(body) > n:
            raise ProgramError(f"{len(body)} instructions exceed the {n}-line bound")
        body += [None] * (n - len(body))
        body[n - 1] = END
        self.lines = tuple(body)
        self._hash = None

    @property
    def n(self) -> int:
        return len(self.lines)

    def __getitem__(self, i):
        return self.lines[i]

    def __len__(self):
        return len(self.lines)

    def __eq__(self, other):
        return isinstance(other, PlanningProgram) and self.lines == other.lines

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.lines)
        return self._hash

    def with_line(self, i: int, instruction: Instruction) -> "PlanningProgram":
        if not 0 <= i < self.n - 1:
            raise ProgramError(f"line {i} is not programmable", i)
        prog = PlanningProgram.__new__(PlanningProgram)
        lines = list(self.lines)
        lines[i] = instruction
        prog.lines = tuple(lines)
        prog._hash = None
        return prog

    def defined(self):
        """(line, instruction) pairs for defined lines."""
        return [(i, w) for i, w in enumerate(self.lines) if w is not None]

    def is_complete(self) -> bool:
        return all(w is not None for w in self.lines)

    def __str__(self):
        return format_program(self)

    def __repr__(self):
        return f"PlanningProgram({[str(w) if w else None for w in self.lines]})"


def format_program(program: PlanningProgram, full: bool = False) -> str:
    """Render as ``<line>. <instr>``; undefined lines are skipped unless ``full``."""
    out = []
    for i, w in enumerate(program.lines):
        if w is None:
            if full:
                out.append(f"{i}. ?")
            continue
        out.append(f"{i}. {w}")
    return "\n".join(out) + "\n"


_LINE_RE = re.compile(r"^\s*(\d+)\s*[.:]\s*(.*?)\s*$")
_CALL_RE = re.compile(r"^([A-Za-z_][\w\-]*)\s*\((.*)\)$")


def _split_args(text: str) -> list[str]:
    text = text.strip()
    return [a.strip() for a in text.split(",")] if text else []


def _pointer(tok: str, pointers: int, lineno: int) -> int:
    m = re.fullmatch(r"z(\d+)", tok.strip().lower())
    if not m:
        raise ProgramError(f"expected a pointer like z1, got {tok!r}", lineno)
    k = int(m.group(1)) - 1
    if not 0 <= k < pointers:
        raise ProgramError(f"pointer {tok} out of range (|Z|={pointers})", lineno)
    return k


def parse_instruction(text: str, problem, lineno: int = 0) -> Instruction:
    """Resolve one instruction against the problem's domain and bounds."""
    text = text.strip()
    if text.lower() == "end":
        return END
    m = _CALL_RE.match(text)
    if not m:
        raise ProgramError(f"cannot parse instruction {text!r}", lineno)
    name, raw = m.group(1).lower(), m.group(2)
    args = _split_args(raw)
    domain = problem.domain
    numeric = problem.is_numeric
    zs = lambda: tuple(_pointer(a, problem.pointers, lineno) for a in args)  # noqa: E731

    if name == "goto":
        if len(args) != 2:
            raise ProgramError("goto takes a line and a condition", lineno)
        try:
            target = int(args[0])
        except ValueError:
            raise ProgramError(f"bad goto target {args[0]!r}", lineno) from None
        if not 0 <= target < problem.lines:
            raise ProgramError(f"goto target {target} out of range (n={problem.lines})", lineno)
        cond = parse_condition(args[1])
        if not numeric and cond not in STRIPS_CONDITIONS:
            raise ProgramError(f"condition {cond} is not available in STRIPS domains", lineno)
        return Goto(target, cond)
    ram_arity = {"inc": 1, "dec": 1, "clear": 1, "set": 2, "cmp": 2}
    if name in ram_arity:
        if len(args) != ram_arity[name]:
            raise ProgramError(f"{name} takes {ram_arity[name]} pointer(s)", lineno)
        z = zs()
        if name == "inc":
            return Inc(z[0])
        if name == "dec":
            return Dec(z[0])
        if name == "clear":
            return Clear(z[0])
        if name == "set":
            return Set(z[0], z[1])
        if not numeric:
            raise ProgramError("cmp is only available in numeric domains", lineno)
        return Cmp(z[0], z[1])
    if name.startswith("test_") and not numeric:
        pred = domain.predicates.get(name[5:])
        if pred is None:
            raise ProgramError(f"unknown predicate in {name}", lineno)
        if pred.arity != len(args):
            raise ProgramError(f"{name} takes {pred.arity} pointer(s)", lineno)
        return Test(pred.name, zs())
    if name.startswith("cmp_") and numeric:
        comp = domain.comparisons.get(name[4:])
        if comp is None:
            raise ProgramError(f"unknown comparison {name}", lineno)
        if comp.arity != len(args):
            raise ProgramError(f"{name} takes {comp.arity} pointer(s)", lineno)
        return CmpVar(comp.name, zs())
    schema = domain.schemas.get(name)
    if schema is None:
        raise ProgramError(f"unknown action {name!r}", lineno)
    if schema.arity != len(args):
        raise ProgramError(f"{name} takes {schema.arity} pointer(s)", lineno)
    return PlanningAction(schema.name, zs())


def parse_program(text: str, problem) -> PlanningProgram:
    lines: dict[int, Instruction] = {}
    for raw in text.splitlines():
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        m = _LINE_RE.match(stripped)
        if not m:
            raise ProgramError(f"expected '<line>. <instruction>', got {stripped!r}")
        lineno = int(m.group(1))
        if lineno >= problem.lines:
            raise ProgramError(f"line number exceeds bound n={problem.lines}", lineno)
        if lineno in lines:
            raise ProgramError("duplicate line number", lineno)
        lines[lineno] = parse_instruction(m.group(2), problem, lineno)
    if not lines:
        raise ProgramError("empty program")
    last = problem.lines - 1
    if last in lines and lines[last] != END:
        raise ProgramError(f"line {last} must be end", last)
    body = [lines.get(i) for i in range(problem.lines)]
    return PlanningProgram(problem.lines, body)


def parse_program_loose(text: str) -> PlanningProgram:
    """Parse without a domain: unknown calls become planning actions.

    Used where only the program's shape matters (e.g. novelty ranks). The
    line bound is taken from the highest line number present.
    """
    lines: dict[int, Instruction] = {}
    for raw in text.splitlines():
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        m = _LINE_RE.match(stripped)
        if not m:
            raise ProgramError(f"expected '<line>. <instruction>', got {stripped!r}")
        lineno, body = int(m.group(1)), m.group(2)
        if lineno in lines:
            raise ProgramError("duplicate line number", lineno)
        if body.lower() == "end":
            lines[lineno] = END
            continue
        call = _CALL_RE.match(body)
        if not call:
            raise ProgramError(f"cannot parse instruction {body!r}", lineno)
        name, args = call.group(1).lower(), _split_args(call.group(2))
        if name == "goto":
            if len(args) != 2 or not args[0].isdigit():
                raise ProgramError("goto takes a line and a condition", lineno)
            lines[lineno] = Goto(int(args[0]), parse_condition(args[1]))
            continue
        zs = tuple(_pointer(a, 10**6, lineno) for a in args)
        simple = {"inc": Inc, "dec": Dec, "clear": Clear}
        if name in simple and len(zs) == 1:
            lines[lineno] = simple[name](zs[0])
        elif name in ("set", "cmp") and len(zs) == 2:
            lines[lineno] = (Set if name == "set" else Cmp)(*zs)
        elif name.startswith("test_"):
            lines[lineno] = Test(name[5:], zs)
        elif name.startswith("cmp_"):
            lines[lineno] = CmpVar(name[4:], zs)
        else:
            lines[lineno] = PlanningAction(name, zs)
    if not lines:
        raise ProgramError("empty program")
    n = max(lines) + 1
    if lines[n - 1] != END:
        n += 1
    return PlanningProgram(n, [lines.get(i) for i in range(n)])
