import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))
os.environ.setdefault("GPSYNTH_SEED", "0")

from gpsynth.bench import write_benchmark  # noqa: E402
from gpsynth.manifest import load_gp_problem  # noqa: E402
from gpsynth.program import parse_program  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def bench_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("bench")
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = write_benchmark(name, root / name, seed_value=0)
        return cache[name]
    return get


@pytest.fixture(scope="session")
def problem_of(bench_dir):
    def get(name, validation=False):
        return load_gp_problem(bench_dir(name), validation=validation)
    return get


def golden_program(name, problem):
    return parse_program((GOLDEN / f"{name}.prog").read_text(), problem)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
