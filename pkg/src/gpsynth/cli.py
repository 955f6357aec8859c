"""``gpsynth`` command line: solve, validate, bench, rank, inspect, generate."""

from __future__ import annotations

import argparse
import logging
import shlex
import sys
from pathlib import Path

from . import bench as benchmarks
from .heuristics import ConfigurationError, lifted_helpful_actions
from .landmarks import extract_landmark_graph
from .manifest import load_gp_problem, load_instances, load_manifest
from .model import ModelError
from .novelty import rank_table
from .pddl import PDDLError, parse_domain, parse_instance
from .program import ProgramError, format_program, parse_program, parse_program_loose
from .report import RunReport, table, write_records
from .search import RESULT_LIMIT, RESULT_SOLVED, SearchConfig, search
from .vm import DEFAULT_BUDGET, run

log = logging.getLogger("gpsynth")

EXIT_OK, EXIT_ERROR, EXIT_UNSOLVABLE, EXIT_LIMIT = 0, 1, 2, 3


def _status_exit(status: str) -> int:
    if status == RESULT_SOLVED:
        return EXIT_OK
    return EXIT_LIMIT if status == RESULT_LIMIT else EXIT_UNSOLVABLE


def _instance_files(directory: Path) -> list[Path]:
    return sorted(p for p in directory.iterdir()
                  if p.suffix in (".pddl", ".txt") and p.name not in ("domain.pddl", "manifest.txt"))


def _verdicts(program, problem, instances, budget):
    return [(inst.name, str(run(program, inst, problem.pointers, budget))) for inst in instances]


def run_manifest(manifest_path, mode=None, v=None, evaluators=None, budget=None,
                 time_limit=None, extra_dir=None, timing=False, trace=False):
    """Solve one manifest and validate on its held-out instances."""
    m = load_manifest(manifest_path)
    problem, held_out = load_gp_problem(m, validation=True)
    if extra_dir is not None:
        held_out = held_out + load_instances(problem.domain, _instance_files(Path(extra_dir)))
    cfg = SearchConfig(v=v if v is not None else (m.v if m.v is not None else problem.lines),
                       evaluators=evaluators or m.evaluators, mode=mode or m.mode,
                       time_limit=time_limit)
    if budget is not None:
        cfg.budget = budget
    elif m.budget is not None:
        cfg.budget = m.budget
    if trace:
        cfg.on_expand = lambda prog: log.debug("expand\n%s", format_program(prog, full=True))
    result = search(problem, cfg)
    checks = []
    if result.program is not None:
        checks = _verdicts(result.program, problem, problem.instances + held_out, DEFAULT_BUDGET)
    label = cfg.evaluators.label(cfg.mode)
    return RunReport.from_result(m.name or problem.domain.name, label, result, checks, timing)


def cmd_solve(args) -> int:
    report = run_manifest(args.manifest, args.mode, args.v, args.evaluators, args.budget,
                          args.time_limit, args.validate_extra, args.timing, args.trace)
    sys.stdout.write(table([report], timing=args.timing))
    if report.program:
        sys.stdout.write("\n" + report.program)
        for row in report.validation:
            print(f"{row['instance']}: {row['verdict']}")
    if args.report:
        write_records([report], args.report)
    else:
        print(report.to_json())
    return _status_exit(report.status)


def cmd_validate(args) -> int:
    m = load_manifest(args.manifest)
    problem, held_out = load_gp_problem(m, validation=True)
    program = parse_program(Path(args.program).read_text(), problem)
    ok = True
    for inst in problem.instances + held_out:
        trace = [] if args.trace else None
        outcome = run(program, inst, problem.pointers, args.budget, trace=trace)
        if trace:
            print(f"# trace {inst.name}")
            print("\n".join(trace))
        print(f"{inst.name}: {outcome}")
        ok &= outcome.solved
    return EXIT_OK if ok else EXIT_UNSOLVABLE


def parse_suite(text: str) -> list[tuple[str, dict]]:
    """Suite lines: ``<manifest> [key=value ...]`` with keys mode, v, evaluators, budget."""
    rows = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = shlex.split(line)
        opts = {}
        for item in parts[1:]:
            if "=" not in item:
                raise ModelError(f"suite line {n}: expected key=value, got {item!r}")
            k, val = item.split("=", 1)
            if k not in ("mode", "v", "evaluators", "budget", "time_limit"):
                raise ModelError(f"suite line {n}: unknown option {k!r}")
            opts[k] = val
        rows.append((parts[0], opts))
    return rows


def cmd_bench(args) -> int:
    suite = Path(args.suite)
    rows = parse_suite(suite.read_text())
    reports = []
    for path, opts in rows:
        mpath = Path(path) if Path(path).is_absolute() else suite.parent / path
        try:
            tl = opts.get("time_limit", args.time_limit)
            reports.append(run_manifest(
                mpath, opts.get("mode"), int(opts["v"]) if "v" in opts else None,
                opts.get("evaluators"), int(opts["budget"]) if "budget" in opts else None,
                float(tl) if tl is not None else None, timing=args.timing))
        except (ModelError, PDDLError, ProgramError, ConfigurationError, OSError,
                ValueError) as exc:
            log.error("%s: %s", path, exc)
            reports.append(RunReport(domain=str(path), config=opts.get("evaluators", "-"),
                                     status="error", error=str(exc)))
    sys.stdout.write(table(reports, timing=args.timing))
    if args.report:
        write_records(reports, args.report)
    return EXIT_OK


def cmd_rank(args) -> int:
    text = Path(args.program).read_text()
    if args.manifest:
        program = parse_program(text, load_gp_problem(args.manifest))
    else:
        program = parse_program_loose(text)
    for label, rank in rank_table(program):
        print(f"{label}\t{rank}")
    return EXIT_OK


def _inspect_instances(target: Path, domain_path):
    if target.name.endswith("manifest.txt") or target.suffix == ".manifest":
        return load_gp_problem(target).instances
    if domain_path is None:
        raise ModelError("an instance file needs --domain")
    domain = parse_domain(Path(domain_path).read_text())
    return [parse_instance(target.read_text(), domain)]


def cmd_inspect(args) -> int:
    target = Path(args.target)
    if args.landmarks:
        for inst in _inspect_instances(target, args.domain):
            if inst.is_numeric:
                raise ConfigurationError("landmarks are only defined for STRIPS domains")
            sys.stdout.write(extract_landmark_graph(inst).to_text())
    else:
        insts = _inspect_instances(target, args.domain)
        sys.stdout.write(lifted_helpful_actions(insts).to_text())
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.domain == "all":
        names = sorted(benchmarks.BENCHMARKS)
    else:
        names = [benchmarks.get_spec(args.domain).name]
    out = Path(args.outdir)
    for name in names:
        path = benchmarks.write_benchmark(name, out / name if len(names) > 1 else out,
                                          args.seed, args.evaluators, args.mode)
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gpsynth", description=__doc__)
    p.add_argument("-q", "--quiet", action="store_true", help="only warnings and errors")
    p.add_argument("--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="search for a program solving a manifest")
    s.add_argument("manifest")
    s.add_argument("--mode", choices=("bfs", "pgp"))
    s.add_argument("--v", type=int, help="novelty bound (default: manifest value)")
    s.add_argument("--evaluators", help="comma list, e.g. h5,f1 or flm,f1,fha")
    s.add_argument("--budget", type=int, help="per-run step budget during search")
    s.add_argument("--time-limit", type=float)
    s.add_argument("--trace", action="store_true", help="log every expanded program")
    s.add_argument("--validate-extra", metavar="DIR", help="more held-out instances")
    s.add_argument("--report", help="write the JSON record here instead of stdout")
    s.add_argument("--timing", action="store_true", help="include wall time in records")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("validate", help="run a program on every instance of a manifest")
    s.add_argument("program")
    s.add_argument("manifest")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--trace", action="store_true", help="print the execution trace")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("bench", help="run every manifest of a suite file")
    s.add_argument("suite")
    s.add_argument("--report")
    s.add_argument("--time-limit", type=float)
    s.add_argument("--timing", action="store_true")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("rank", help="novelty rank of each action in a program")
    s.add_argument("program")
    s.add_argument("--manifest")
    s.set_defaults(func=cmd_rank)

    s = sub.add_parser("inspect", help="dump landmark graphs or helpful actions")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--landmarks", action="store_true")
    g.add_argument("--helpful", action="store_true")
    s.add_argument("target", help="manifest, or instance file with --domain")
    s.add_argument("--domain")
    s.set_defaults(func=cmd_inspect)

    s = sub.add_parser("generate", help="write benchmark instances and a manifest")
    s.add_argument("domain", help="benchmark name or 'all'")
    s.add_argument("outdir")
    s.add_argument("--seed", type=int, help="overrides GPSYNTH_SEED")
    s.add_argument("--evaluators", default="h5,f1")
    s.add_argument("--mode", default="bfs", choices=("bfs", "pgp"))
    s.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else (logging.WARNING if args.quiet else logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if getattr(args, "v", None) is not None and args.v < 1:
            raise ConfigurationError("novelty bound v must be >= 1")
        return args.func(args)
    except (ModelError, PDDLError, ProgramError, ConfigurationError, OSError, ValueError) as exc:
        print(f"gpsynth: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
