"""Run reports: one JSON record per row plus an aligned text table."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional


@dataclass
class RunReport:
    domain: str
    config: str
    status: str
    expanded: int = 0
    evaluated: int = 0
    pruned_novelty: int = 0
    pruned_deadend: int = 0
    escalations: int = 0
    program: Optional[str] = None
    validation: list[dict] = field(default_factory=list)
    time: Optional[float] = None
    error: Optional[str] = None

    @classmethod
    def from_result(cls, domain: str, config: str, result, validation=(), timing: bool = False):
        s = result.stats
        return cls(domain=domain, config=config, status=result.status,
                   expanded=s.expanded, evaluated=s.evaluated,
                   pruned_novelty=s.pruned_novelty, pruned_deadend=s.pruned_deadend,
                   escalations=s.escalations,
                   program=str(result.program) if result.program is not None else None,
                   validation=[{"instance": n, "verdict": v} for n, v in validation],
                   time=round(s.time, 3) if timing else None)

    def to_json(self) -> str:
        record = {k: v for k, v in asdict(self).items() if v is not None}
        return json.dumps(record, sort_keys=True)

    @property
    def validated(self) -> str:
        if not self.validation:
            return "-"
        ok = sum(1 for v in self.validation if v["verdict"] == "Solved")
        return f"{ok}/{len(self.validation)}"


_COLUMNS = ("domain", "config", "status", "T", "Ex", "Ev", "valid")


def table(reports: list[RunReport], timing: bool = True) -> str:
    rows = []
    for r in reports:
        t = "-" if r.time is None else f"{r.time:.2f}"
        rows.append((r.domain, r.config, r.status, t, str(r.expanded), str(r.evaluated),
                     r.validated))
    cols = [c for c in _COLUMNS if timing or c != "T"]
    if not timing:
        rows = [row[:3] + row[4:] for row in rows]
    widths = [max([len(c)] + [len(row[i]) for row in rows]) for i, c in enumerate(cols)]
    fmt = lambda row: "  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip()  # noqa: E731
    lines = [fmt(cols), fmt(["-" * w for w in widths])] + [fmt(r) for r in rows]
    return "\n".join(lines) + "\n"


def write_records(reports: list[RunReport], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in reports:
            fh.write(r.to_json() + "\n")
