"""Manifest files: ``key=value`` lines describing a GP problem and its search setup.

Recognised keys: name, domain (PDDL path or builtin numeric domain name),
instances and validation (comma-separated paths), lines, pointers, v,
evaluators, mode, budget. Paths are relative to the manifest's directory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .model import GPProblem, ModelError
from .numeric import NUMERIC_DOMAINS, get_domain, parse_numeric_instance
from .pddl import parse_domain, parse_instance

_INT_KEYS = ("lines", "pointers", "v", "budget")
_KNOWN = {"name", "domain", "instances", "validation", "evaluators", "mode", *_INT_KEYS}


@dataclass
class GPManifest:
    path: Path
    domain: str
    instances: list[str]
    lines: int
    pointers: int
    v: Optional[int] = None
    name: str = ""
    validation: list[str] = field(default_factory=list)
    evaluators: str = "h5,f1"
    mode: str = "bfs"
    budget: Optional[int] = None

    @property
    def base(self) -> Path:
        return self.path.parent

    def resolve(self, rel: str) -> Path:
        p = Path(rel)
        return p if p.is_absolute() else self.base / p


def parse_manifest(text: str, path: Path | str = "manifest.txt") -> GPManifest:
    fields: dict[str, str] = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ModelError(f"{path}:{n}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in _KNOWN:
            raise ModelError(f"{path}:{n}: unknown manifest key {key!r}")
        fields[key] = value
    for key in ("domain", "instances", "lines", "pointers"):
        if key not in fields:
            raise ModelError(f"{path}: missing required key {key!r}")
    ints = {}
    for key in _INT_KEYS:
        if key in fields:
            try:
                ints[key] = int(fields[key])
            except ValueError:
                raise ModelError(f"{path}: {key} must be an integer") from None
    split = lambda s: [x.strip() for x in s.split(",") if x.strip()]  # noqa: E731
    instances = split(fields["instances"])
    if not instances:
        raise ModelError(f"{path}: no instances listed")
    return GPManifest(
        path=Path(path), domain=fields["domain"], instances=instances,
        lines=ints["lines"], pointers=ints["pointers"], v=ints.get("v"),
        name=fields.get("name", Path(path).parent.name),
        validation=split(fields.get("validation", "")),
        evaluators=fields.get("evaluators", "h5,f1"), mode=fields.get("mode", "bfs"),
        budget=ints.get("budget"))


def load_manifest(path) -> GPManifest:
    path = Path(path)
    return parse_manifest(path.read_text(), path)


def load_domain(manifest: GPManifest):
    ref = manifest.domain
    if ref.lower() in NUMERIC_DOMAINS and not manifest.resolve(ref).exists():
        return get_domain(ref)
    return parse_domain(manifest.resolve(ref).read_text())


def load_instances(domain, paths) -> list:
    out = []
    for p in paths:
        text = Path(p).read_text()
        if domain.is_numeric:
            out.append(parse_numeric_instance(text, domain))
        else:
            out.append(parse_instance(text, domain))
    return out


def load_gp_problem(manifest: GPManifest | str | Path, validation: bool = False):
    """The GP problem of the manifest's instances, in listed order.

    With ``validation`` the held-out instances are returned as a second value.
    """
    if not isinstance(manifest, GPManifest):
        manifest = load_manifest(manifest)
    domain = load_domain(manifest)
    insts = load_instances(domain, [manifest.resolve(p) for p in manifest.instances])
    problem = GPProblem(domain, insts, manifest.pointers, manifest.lines, manifest.name)
    if validation:
        extra = load_instances(domain, [manifest.resolve(p) for p in manifest.validation])
        return problem, extra
    return problem
