"""Action novelty rank of instructions with respect to a planning program.

Planning actions are identified by schema name (pointer arguments ignored);
RAM actions by the exact instruction, arguments included. Gotos and ``end``
have no identity and are never ranked or pruned.
"""

from __future__ import annotations

from collections import Counter

from .program import Instruction, PlanningProgram


def occurrences(program: PlanningProgram) -> Counter:
    counts: Counter = Counter()
    for w in program.lines:
        if w is not None:
            ident = w.identity()
            if ident is not None:
                counts[ident] += 1
    return counts


def novelty_rank(action, program: PlanningProgram) -> int:
    """1 + number of lines of ``program`` holding ``action``.

    ``action`` may be an Instruction or an identity returned by
    ``Instruction.identity()``.
    """
    ident = action.identity() if isinstance(action, Instruction) else action
    if ident is None:
        raise ValueError(f"{action} has no novelty identity")
    return 1 + occurrences(program)[ident]


def should_prune(program: PlanningProgram, candidate: Instruction, bound: int,
                 counts: Counter | None = None) -> bool:
    """True when writing ``candidate`` would exceed the novelty bound."""
    if bound < 1:
        raise ValueError("novelty bound must be >= 1")
    ident = candidate.identity()
    if ident is None:
        return False
    if counts is None:
        counts = occurrences(program)
    return 1 + counts[ident] > bound


def rank_table(program: PlanningProgram) -> list[tuple[str, int]]:
    """Rows (identity, rank) for every ranked action present, in first-use order."""
    counts = occurrences(program)
    seen, rows = set(), []
    for w in program.lines:
        if w is None:
            continue
        ident = w.identity()
        if ident is None or ident in seen:
            continue
        seen.add(ident)
        label = ident[1] if isinstance(ident, tuple) else str(ident)
        rows.append((label, 1 + counts[ident]))
    return rows
