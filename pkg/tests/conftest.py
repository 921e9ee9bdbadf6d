import random

import pytest

from fjspsim.benchmarks import mk_path
from fjspsim.instance import RawInstance, parse_instance

TWO_JOB = "2 2\n1 2 1 3 2 4\n1 1 1 5\n"
ONE_JOB = "1 1\n1 1 1 7\n"


def random_instance(seed, n_jobs=(1, 3), n_machines=(1, 3), n_ops=(1, 3), max_alts=3,
                    durations=(1, 9), name=None):
    """Seeded random instance; ranges are inclusive (lo, hi) pairs."""
    rng = random.Random(seed)
    M = rng.randint(*n_machines)
    jobs = []
    for _ in range(rng.randint(*n_jobs)):
        job = []
        for _ in range(rng.randint(*n_ops)):
            ms = rng.sample(range(1, M + 1), rng.randint(1, min(max_alts, M)))
            job.append([(m, rng.randint(*durations)) for m in ms])
        jobs.append(job)
    return RawInstance.from_lists(M, jobs, name=name or f"rand{seed}")


def mk01_like(seed):
    """Same shape as Brandimarte's MK01: 10 jobs, 6 machines, 5-7 ops, <=3 alternatives."""
    return random_instance(seed, (10, 10), (6, 6), (5, 7), 3, (1, 6), name=f"mk01like{seed}")


@pytest.fixture
def two_job():
    return parse_instance(TWO_JOB, name="two_job")


@pytest.fixture
def one_job():
    return parse_instance(ONE_JOB, name="one_job")


@pytest.fixture
def one_machine_two_ops():
    # one job, durations 3 then 5, single machine
    return parse_instance("1 1\n2 1 1 3 1 1 5\n", name="chain")


@pytest.fixture
def mk01_path():
    path = mk_path(1)
    if path is None:
        pytest.skip("MK01 benchmark file not available (set FJSPSIM_BENCHMARKS)")
    return path


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_line():
    def record(name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
