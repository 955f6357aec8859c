"""Builtin numeric domains: fibo, find, reverse, sorting, select, tsum.

Each domain has a pointer-addressable register vector and optionally named
scalar registers. Planning actions are applicable-or-not; an inapplicable
action leaves the registers untouched and produces res = 0.
"""

from __future__ import annotations

from .model import ModelError, NumericActionSchema, NumericComparison, NumericDomain, NumericInstance


def _add(regs, idx):
    i, j = idx
    out = list(regs)
    out[i] += regs[j]
    return tuple(out)


def _swap_if(pred):
    def update(regs, idx):
        i, j = idx
        if not pred(regs, i, j):
            return None
        out = list(regs)
        out[i], out[j] = regs[j], regs[i]
        return tuple(out)
    return update


def _decrement(regs, idx):
    (i,) = idx
    if regs[i] <= 0:
        return None
    out = list(regs)
    out[i] -= 1
    return tuple(out)


def _cmp_vec(regs, idx):
    i, j = idx
    return regs[i] - regs[j], (i, j)


def _cmp_scalar(offset_from_end: int):
    def evaluate(regs, idx):
        (i,) = idx
        s = len(regs) - offset_from_end
        return regs[i] - regs[s], (i, s)
    return evaluate


def _set_scalar(offset_from_end: int):
    def update(regs, idx):
        (i,) = idx
        out = list(regs)
        out[len(regs) - offset_from_end] = regs[i]
        return tuple(out)
    return update


def _bump_scalar(offset_from_end: int):
    def update(regs, idx):
        out = list(regs)
        out[len(regs) - offset_from_end] += 1
        return tuple(out)
    return update


VEC = NumericComparison("vec", 2, _cmp_vec)


def _domains() -> dict[str, NumericDomain]:
    add = NumericActionSchema("add", 2, _add)
    return {
        "fibo": NumericDomain(
            "fibo", {"add": add}, {"vec": VEC},
            description="a[0]=0, a[1]=1; fill a[i] = a[i-1] + a[i-2] with add(z1,z2): a[z1] += a[z2]"),
        "find": NumericDomain(
            "find", {"inc_count": NumericActionSchema("inc_count", 0, _bump_scalar(1))},
            {"vec": VEC, "target": NumericComparison("target", 1, _cmp_scalar(2))},
            scalars=("target", "count"),
            description="count the entries equal to the target scalar"),
        "reverse": NumericDomain(
            "reverse", {"swap": NumericActionSchema("swap", 2, _swap_if(lambda r, i, j: i < j))},
            {"vec": VEC},
            description="reverse the vector; swap(z1,z2) needs z1 < z2"),
        "sorting": NumericDomain(
            "sorting",
            {"swap": NumericActionSchema("swap", 2, _swap_if(lambda r, i, j: i < j and r[i] > r[j]))},
            {"vec": VEC},
            description="sort ascending; swap(z1,z2) exchanges an inversion (z1 < z2, a[z1] > a[z2])"),
        "select": NumericDomain(
            "select", {"select": NumericActionSchema("select", 1, _set_scalar(1))},
            {"vec": VEC, "out": NumericComparison("out", 1, _cmp_scalar(1))},
            scalars=("out",),
            description="store the minimum of the vector in the out scalar"),
        "tsum": NumericDomain(
            "tsum", {"add": add, "decrement": NumericActionSchema("decrement", 1, _decrement)},
            {"vec": VEC},
            description="registers (k, 0); reach k(k+1)/2 in register 1"),
    }


NUMERIC_DOMAINS = _domains()


def get_domain(name: str) -> NumericDomain:
    try:
        return NUMERIC_DOMAINS[name.lower()]
    except KeyError:
        raise ModelError(f"unknown numeric domain {name!r}; "
                         f"choose from {', '.join(sorted(NUMERIC_DOMAINS))}") from None


def parse_numeric_instance(text: str, domain: NumericDomain) -> NumericInstance:
    """Parse ``key: value`` lines (name, domain, registers, scalars, goal)."""
    fields = {}
    for raw in text.splitlines():
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ModelError(f"malformed line {line!r}")
        key, value = line.split(":", 1)
        fields[key.strip().lower()] = value.strip()
    if fields.get("domain", domain.name).lower() != domain.name:
        raise ModelError(f"instance is for domain {fields['domain']!r}, not {domain.name!r}")
    try:
        registers = [int(x) for x in fields.get("registers", "").split()]
        scalars = {}
        for item in fields.get("scalars", "").split():
            k, v = item.split("=")
            scalars[k] = int(v)
        goal = []
        for item in fields.get("goal", "").split():
            k, v = item.split("=")
            if k in domain.scalars:
                k = len(registers) + domain.scalars.index(k)
            goal.append((int(k), int(v)))
    except ValueError as exc:
        raise ModelError(f"malformed numeric instance: {exc}") from None
    return NumericInstance(fields.get("name", domain.name), domain, registers, goal, scalars)


def numeric_instance_to_text(instance: NumericInstance) -> str:
    dom = instance.domain
    n = len(instance.registers)
    goal = []
    for i, v in instance.goal:
        key = dom.scalars[i - n] if i >= n else str(i)
        goal.append(f"{key}={v}")
    out = [f"name: {instance.name}", f"domain: {dom.name}",
           "registers: " + " ".join(map(str, instance.registers))]
    if dom.scalars:
        out.append("scalars: " + " ".join(f"{s}={v}" for s, v in zip(dom.scalars, instance.scalar_values)))
    out.append("goal: " + " ".join(goal))
    return "\n".join(out) + "\n"
