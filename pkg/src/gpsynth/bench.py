"""Benchmark generators for the eight STRIPS and six numeric domains.

STRIPS domains are small re-authorings of the usual formulations, written
so that every instance shares one domain file. Generation is deterministic:
randomness comes from a ``random.Random`` seeded with the domain name and
``GPSYNTH_SEED`` (default 0).
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .model import ModelError

DOMAINS: dict[str, str] = {}

DOMAINS["baking"] = """\
; Pans are filled with an egg and flour, mixed, then baked in an oven.
(define (domain baking)
  (:requirements :strips :typing)
  (:types egg flour pan oven)
  (:predicates (egg-available ?e - egg) (flour-available ?f - flour)
               (has-egg ?p - pan) (has-flour ?p - pan) (mixed ?p - pan)
               (oven-free ?o - oven) (in-oven ?p - pan ?o - oven) (baked ?p - pan))
  (:action put-egg
    :parameters (?e - egg ?p - pan)
    :precondition (and (egg-available ?e))
    :effect (and (has-egg ?p) (not (egg-available ?e))))
  (:action put-flour
    :parameters (?f - flour ?p - pan)
    :precondition (and (flour-available ?f))
    :effect (and (has-flour ?p) (not (flour-available ?f))))
  (:action mix
    :parameters (?p - pan)
    :precondition (and (has-egg ?p) (has-flour ?p))
    :effect (and (mixed ?p) (not (has-egg ?p)) (not (has-flour ?p))))
  (:action put-in-oven
    :parameters (?p - pan ?o - oven)
    :precondition (and (mixed ?p) (oven-free ?o))
    :effect (and (in-oven ?p ?o) (not (oven-free ?o))))
  (:action bake
    :parameters (?p - pan ?o - oven)
    :precondition (and (in-oven ?p ?o))
    :effect (and (baked ?p) (oven-free ?o) (not (in-oven ?p ?o)) (not (mixed ?p)))))
"""

DOMAINS["corridor"] = """\
; An agent walks along a corridor to the cell marked as its destination.
(define (domain corridor)
  (:requirements :strips :typing)
  (:types cell)
  (:predicates (at ?c - cell) (adjacent ?a - cell ?b - cell) (destination ?c - cell))
  (:action move
    :parameters (?from - cell ?to - cell)
    :precondition (and (at ?from) (adjacent ?from ?to))
    :effect (and (at ?to) (not (at ?from)))))
"""

DOMAINS["gripper"] = """\
; One robot hand carries balls from room a to room b.
(define (domain gripper)
  (:requirements :strips :typing)
  (:types room ball)
  (:predicates (at-robby ?r - room) (at ?b - ball ?r - room) (free) (carry ?b - ball))
  (:action move
    :parameters (?from - room ?to - room)
    :precondition (and (at-robby ?from))
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?b - ball ?r - room)
    :precondition (and (at ?b ?r) (at-robby ?r) (free))
    :effect (and (carry ?b) (not (at ?b ?r)) (not (free))))
  (:action drop
    :parameters (?b - ball ?r - room)
    :precondition (and (carry ?b) (at-robby ?r))
    :effect (and (at ?b ?r) (free) (not (carry ?b)))))
"""

DOMAINS["intrusion"] = """\
; An intruder compromises every host and steals its data.
(define (domain intrusion)
  (:requirements :strips :typing)
  (:types host)
  (:predicates (recon-done ?h - host) (broken-in ?h - host) (root ?h - host)
               (downloaded ?h - host) (data-stolen ?h - host))
  (:action recon
    :parameters (?h - host)
    :precondition (and)
    :effect (and (recon-done ?h)))
  (:action break-into
    :parameters (?h - host)
    :precondition (and (recon-done ?h))
    :effect (and (broken-in ?h)))
  (:action gain-root
    :parameters (?h - host)
    :precondition (and (broken-in ?h))
    :effect (and (root ?h)))
  (:action download-files
    :parameters (?h - host)
    :precondition (and (root ?h))
    :effect (and (downloaded ?h)))
  (:action steal-data
    :parameters (?h - host)
    :precondition (and (downloaded ?h))
    :effect (and (data-stolen ?h))))
"""

DOMAINS["lock"] = """\
; A robot walks a corridor to the cell holding the lock and opens it.
(define (domain lock)
  (:requirements :strips :typing)
  (:types cell)
  (:predicates (at ?c - cell) (adjacent ?a - cell ?b - cell) (lock-at ?c - cell) (unlocked))
  (:action move
    :parameters (?from - cell ?to - cell)
    :precondition (and (at ?from) (adjacent ?from ?to))
    :effect (and (at ?to) (not (at ?from))))
  (:action open
    :parameters (?c - cell)
    :precondition (and (at ?c) (lock-at ?c))
    :effect (and (unlocked))))
"""

DOMAINS["ontable"] = """\
; Four-operator blocksworld; the goal puts every block on the table.
(define (domain ontable)
  (:requirements :strips :typing)
  (:types block)
  (:predicates (on ?x - block ?y - block) (ontable ?x - block) (clear ?x - block)
               (handempty) (holding ?x - block))
  (:action pickup
    :parameters (?x - block)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (holding ?x) (not (ontable ?x)) (not (clear ?x)) (not (handempty))))
  (:action putdown
    :parameters (?x - block)
    :precondition (and (holding ?x))
    :effect (and (ontable ?x) (clear ?x) (handempty) (not (holding ?x))))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (on ?x ?y) (clear ?x) (handempty) (not (holding ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (on ?x ?y)) (not (clear ?x)) (not (handempty)))))
"""

DOMAINS["spanner"] = """\
; A man walks a one-way path, collecting spanners to tighten nuts at the gate.
(define (domain spanner)
  (:requirements :strips :typing)
  (:types location man spanner nut)
  (:predicates (at-man ?m - man ?l - location) (at-spanner ?s - spanner ?l - location)
               (at-nut ?n - nut ?l - location) (carrying ?m - man ?s - spanner)
               (useable ?s - spanner) (link ?a - location ?b - location)
               (loose ?n - nut) (tightened ?n - nut))
  (:action walk
    :parameters (?start - location ?end - location ?m - man)
    :precondition (and (at-man ?m ?start) (link ?start ?end))
    :effect (and (at-man ?m ?end) (not (at-man ?m ?start))))
  (:action pickup-spanner
    :parameters (?l - location ?s - spanner ?m - man)
    :precondition (and (at-man ?m ?l) (at-spanner ?s ?l))
    :effect (and (carrying ?m ?s) (not (at-spanner ?s ?l))))
  (:action tighten-nut
    :parameters (?l - location ?s - spanner ?m - man ?n - nut)
    :precondition (and (at-man ?m ?l) (at-nut ?n ?l) (carrying ?m ?s) (useable ?s) (loose ?n))
    :effect (and (tightened ?n) (not (loose ?n)) (not (useable ?s)))))
"""

DOMAINS["visitall"] = """\
; Visit every cell of a grid, addressed by row and column.
(define (domain visitall)
  (:requirements :strips :typing)
  (:types row col)
  (:predicates (visited ?r - row ?c - col))
  (:action visit
    :parameters (?r - row ?c - col)
    :precondition (and)
    :effect (and (visited ?r ?c))))
"""

STRIPS_NAMES = ("baking", "corridor", "gripper", "intrusion", "lock", "ontable", "spanner",
                "visitall")
NUMERIC_NAMES = ("fibo", "find", "reverse", "sorting", "select", "tsum")


def _problem(name, domain, objects, init, goal) -> str:
    """PDDL problem text; ``objects`` is a list of (name, type) in pointer order."""
    objs = " ".join(f"{o} - {t}" for o, t in objects)
    fmt = lambda a: "(" + " ".join(a) + ")"  # noqa: E731
    return (f"(define (problem {name}) (:domain {domain})\n"
            f"  (:objects {objs})\n"
            f"  (:init {' '.join(fmt(a) for a in init)})\n"
            f"  (:goal (and {' '.join(fmt(a) for a in goal)})))\n")


def _adjacent_line(cells):
    out = []
    for a, b in zip(cells, cells[1:]):
        out += [("adjacent", a, b), ("adjacent", b, a)]
    return out


def gen_baking(size, rng, name):
    eggs = [f"egg{i}" for i in range(size)]
    flours = [f"flour{i}" for i in range(size)]
    pans = [f"pan{i}" for i in range(size)]
    objects = ([(e, "egg") for e in eggs] + [(f, "flour") for f in flours]
               + [(p, "pan") for p in pans] + [("oven0", "oven")])
    init = ([("egg-available", e) for e in eggs] + [("flour-available", f) for f in flours]
            + [("oven-free", "oven0")])
    return _problem(name, "baking", objects, init, [("baked", p) for p in pans])


def gen_corridor(size, rng, name):
    cells = [f"c{i}" for i in range(size)]
    start = rng.randrange(0, size - 1)
    dest = rng.randrange(start + 1, size)
    init = [("at", cells[start]), ("destination", cells[dest])] + _adjacent_line(cells)
    return _problem(name, "corridor", [(c, "cell") for c in cells], init, [("at", cells[dest])])


def gen_gripper(size, rng, name):
    balls = [f"ball{i}" for i in range(size)]
    objects = [("rooma", "room"), ("roomb", "room")] + [(b, "ball") for b in balls]
    init = [("at-robby", "rooma"), ("free",)] + [("at", b, "rooma") for b in balls]
    return _problem(name, "gripper", objects, init, [("at", b, "roomb") for b in balls])


def gen_intrusion(size, rng, name):
    hosts = [f"host{i}" for i in range(size)]
    return _problem(name, "intrusion", [(h, "host") for h in hosts], [],
                    [("data-stolen", h) for h in hosts])


def gen_lock(size, rng, name):
    cells = [f"c{i}" for i in range(size)]
    lock = rng.randrange(1, size)
    init = [("at", cells[0]), ("lock-at", cells[lock])] + _adjacent_line(cells)
    return _problem(name, "lock", [(c, "cell") for c in cells], init, [("unlocked",)])


def gen_ontable(size, rng, name):
    blocks = [f"b{i}" for i in range(size)]
    tower = blocks[:]
    rng.shuffle(tower)
    init = [("handempty",), ("ontable", tower[0]), ("clear", tower[-1])]
    init += [("on", upper, lower) for lower, upper in zip(tower, tower[1:])]
    return _problem(name, "ontable", [(b, "block") for b in blocks], init,
                    [("ontable", b) for b in blocks])


def gen_spanner(size, rng, name):
    locs = ["shed"] + [f"loc{i}" for i in range(size)] + ["gate"]
    spanners = [f"spanner{i}" for i in range(size)]
    nuts = [f"nut{i}" for i in range(size)]
    objects = ([("bob", "man")] + [(s, "spanner") for s in spanners]
               + [(n, "nut") for n in nuts] + [(loc, "location") for loc in locs])
    init = [("at-man", "bob", "shed")]
    init += [("link", a, b) for a, b in zip(locs, locs[1:])]
    for s in spanners:
        init += [("at-spanner", s, rng.choice(locs[1:-1])), ("useable", s)]
    for n in nuts:
        init += [("at-nut", n, "gate"), ("loose", n)]
    return _problem(name, "spanner", objects, init, [("tightened", n) for n in nuts])


def gen_visitall(size, rng, name):
    rows, cols = size
    objects = [(f"r{i}", "row") for i in range(rows)] + [(f"c{j}", "col") for j in range(cols)]
    goal = [("visited", f"r{i}", f"c{j}") for i in range(rows) for j in range(cols)]
    return _problem(name, "visitall", objects, [("visited", "r0", "c0")], goal)


def _numeric_text(name, domain, registers, goal, scalars=None) -> str:
    out = [f"name: {name}", f"domain: {domain}", "registers: " + " ".join(map(str, registers))]
    if scalars:
        out.append("scalars: " + " ".join(f"{k}={v}" for k, v in scalars.items()))
    out.append("goal: " + " ".join(f"{k}={v}" for k, v in goal))
    return "\n".join(out) + "\n"


def fibonacci(k: int) -> int:
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def gen_fibo(size, rng, name):
    regs = [0, 1] + [0] * (size - 1)
    goal = [(i, fibonacci(i)) for i in range(2, size + 1)]
    return _numeric_text(name, "fibo", regs, goal)


def gen_find(size, rng, name):
    values = [rng.randrange(0, 4) for _ in range(size)]
    target = rng.randrange(0, 4)
    return _numeric_text(name, "find", values, [("count", values.count(target))],
                         {"target": target, "count": 0})


def gen_reverse(size, rng, name):
    values = [rng.randrange(0, 100) for _ in range(size)]
    return _numeric_text(name, "reverse", values, list(enumerate(reversed(values))))


def gen_sorting(size, rng, name):
    values = rng.sample(range(100), size)
    return _numeric_text(name, "sorting", values, list(enumerate(sorted(values))))


def gen_select(size, rng, name):
    values = [rng.randrange(0, 100) for _ in range(size)]
    return _numeric_text(name, "select", values, [("out", min(values))], {"out": values[0]})


def gen_tsum(size, rng, name):
    return _numeric_text(name, "tsum", [size, 0], [(1, size * (size + 1) // 2)])


@dataclass(frozen=True)
class BenchmarkSpec:
    """Sizes and default (n, |Z|, v) for one benchmark domain."""

    name: str
    lines: int
    pointers: int
    v: int
    train: tuple
    valid: tuple
    generator: Callable
    numeric: bool = False

    def __post_init__(self):
        if set(self.train) & set(self.valid):
            raise ModelError(f"{self.name}: training and validation sizes overlap")
        sizes = list(self.train) + list(self.valid)
        if any(_key(a) >= _key(b) for a, b in zip(sizes, sizes[1:])):
            raise ModelError(f"{self.name}: sizes must increase strictly")


def _key(size):
    return size if isinstance(size, int) else (size[0] * size[1], size)


BENCHMARKS: dict[str, BenchmarkSpec] = {s.name: s for s in [
    BenchmarkSpec("baking", 13, 6, 1, (1, 2, 3), (5, 7), gen_baking),
    BenchmarkSpec("corridor", 10, 2, 2, (3, 4, 5, 6), (9, 12), gen_corridor),
    BenchmarkSpec("gripper", 8, 4, 2, (1, 2, 3), (6, 9), gen_gripper),
    BenchmarkSpec("intrusion", 9, 1, 1, (1, 2, 3), (6, 9), gen_intrusion),
    BenchmarkSpec("lock", 12, 2, 2, (3, 4, 5, 6), (9, 12), gen_lock),
    BenchmarkSpec("ontable", 11, 3, 1, (3, 4, 5, 6), (8, 10), gen_ontable),
    BenchmarkSpec("spanner", 12, 5, 1, (1, 2, 3), (5, 7), gen_spanner),
    BenchmarkSpec("visitall", 7, 2, 1, ((2, 2), (2, 3), (3, 3)), ((4, 5), (6, 6)), gen_visitall),
    BenchmarkSpec("fibo", 7, 2, 2, (5, 6, 7, 8), (12, 20), gen_fibo, True),
    BenchmarkSpec("find", 6, 3, 1, (3, 4, 5), (9, 14), gen_find, True),
    BenchmarkSpec("reverse", 7, 2, 1, (3, 4, 5, 6), (9, 12), gen_reverse, True),
    BenchmarkSpec("sorting", 8, 2, 1, (5, 6, 7), (9, 12), gen_sorting, True),
    BenchmarkSpec("select", 6, 2, 1, (3, 4, 5), (9, 14), gen_select, True),
    BenchmarkSpec("tsum", 6, 2, 1, (2, 3, 4, 5), (10, 20), gen_tsum, True),
]}


def seed() -> int:
    return int(os.environ.get("GPSYNTH_SEED", "0"))


def get_spec(name: str) -> BenchmarkSpec:
    try:
        return BENCHMARKS[name.lower()]
    except KeyError:
        raise ModelError(f"unknown benchmark {name!r}; valid names: "
                         f"{', '.join(sorted(BENCHMARKS))}") from None


def _size_tag(size) -> str:
    return str(size) if isinstance(size, int) else "x".join(map(str, size))


def generate(spec: BenchmarkSpec | str, sizes=None, seed_value: int | None = None):
    """Instance texts for ``sizes`` (training followed by validation sizes by default).

    Returns (domain text or builtin name, [(instance name, text), ...]).
    """
    if isinstance(spec, str):
        spec = get_spec(spec)
    if sizes is None:
        sizes = list(spec.train) + list(spec.valid)
    s = seed() if seed_value is None else seed_value
    rng = random.Random(f"{s}:{spec.name}")
    out = []
    for size in sizes:
        name = f"{spec.name}-{_size_tag(size)}"
        out.append((name, spec.generator(size, rng, name)))
    domain = spec.name if spec.numeric else DOMAINS[spec.name]
    return domain, out


def write_benchmark(name: str, outdir, seed_value: int | None = None,
                    evaluators: str = "h5,f1", mode: str = "bfs") -> Path:
    """Write domain, training/validation instances and a manifest; returns the manifest path."""
    spec = get_spec(name)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    domain, items = generate(spec, seed_value=seed_value)
    ext = ".txt" if spec.numeric else ".pddl"
    if spec.numeric:
        domain_ref = spec.name
    else:
        (outdir / "domain.pddl").write_text(domain)
        domain_ref = "domain.pddl"
    paths = []
    for iname, text in items:
        p = outdir / f"{iname}{ext}"
        p.write_text(text)
        paths.append(p.name)
    k = len(spec.train)
    manifest = outdir / "manifest.txt"
    manifest.write_text(
        f"# {spec.name} benchmark (seed {seed() if seed_value is None else seed_value})\n"
        f"name={spec.name}\n"
        f"domain={domain_ref}\n"
        f"instances={','.join(paths[:k])}\n"
        f"validation={','.join(paths[k:])}\n"
        f"lines={spec.lines}\npointers={spec.pointers}\nv={spec.v}\n"
        f"evaluators={evaluators}\nmode={mode}\n")
    return manifest
