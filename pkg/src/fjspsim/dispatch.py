"""Priority dispatching rules and the 12-way action decoding.

An action code ``a`` in ``[0, 12)`` selects ``JOB_RULES[a // 2]`` for the job
and ``MACHINE_RULES[a % 2]`` for the machine.

Processing time of a not-yet-scheduled operation is the mean over its
alternative machines.  Work already done by a job uses the durations actually
processed.  Priorities are exact rationals so ties are real ties, and ties go
to the lowest job (or machine) index.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction

from .simulator import Simulator


class JobRule(str, Enum):
    SPT = "spt"
    MWKR = "mwkr"
    FDD_MWKR = "fdd_mwkr"
    MOR = "mor"
    LRM = "lrm"
    FIFO = "fifo"

    @property
    def label(self) -> str:
        return "FDD/MWKR" if self is JobRule.FDD_MWKR else self.name


class MachineRule(str, Enum):
    SPT = "spt"
    LPT = "lpt"

    @property
    def label(self) -> str:
        return self.name


JOB_RULES = tuple(JobRule)
MACHINE_RULES = tuple(MachineRule)
NUM_ACTIONS = len(JOB_RULES) * len(MACHINE_RULES)


class ActionOutOfRange(ValueError):
    pass


class NoAssignableJob(RuntimeError):
    pass


class NoIdleCandidate(RuntimeError):
    pass


def decode_action(code: int) -> tuple[JobRule, MachineRule]:
    if not 0 <= code < NUM_ACTIONS:
        raise ActionOutOfRange(f"action {code} not in [0, {NUM_ACTIONS})")
    q, r = divmod(int(code), len(MACHINE_RULES))
    return JOB_RULES[q], MACHINE_RULES[r]


def encode_action(job_rule: JobRule | str, machine_rule: MachineRule | str) -> int:
    return (JOB_RULES.index(JobRule(job_rule)) * len(MACHINE_RULES)
            + MACHINE_RULES.index(MachineRule(machine_rule)))


class _WorkTables:
    """Mean op durations and suffix sums of them, per job."""

    def __init__(self, sim: Simulator):
        self.mean = [[Fraction(sum(d for _, d in op), len(op)) for op in job] for job in sim.alts]
        self.work_from = []
        for row in self.mean:
            suffix = [Fraction(0)] * (len(row) + 1)
            for s in range(len(row) - 1, -1, -1):
                suffix[s] = suffix[s + 1] + row[s]
            self.work_from.append(suffix)


def work_tables(sim: Simulator) -> _WorkTables:
    tables = getattr(sim, "_work_tables", None)
    if tables is None:
        tables = sim._work_tables = _WorkTables(sim)
    return tables


def job_priority(rule: JobRule, sim: Simulator, job: int) -> Fraction | int:
    """The rule's priority value Z for the job's next operation."""
    w = work_tables(sim)
    c = sim.completed[job]
    if rule is JobRule.SPT:
        return w.mean[job][c]
    if rule is JobRule.MWKR:
        return w.work_from[job][c]
    if rule is JobRule.FDD_MWKR:
        return Fraction(sim.done_work[job]) / w.work_from[job][c]
    if rule is JobRule.MOR:
        return sim.n_ops[job] - c + 1
    if rule is JobRule.LRM:
        return w.work_from[job][c + 1]
    if rule is JobRule.FIFO:
        return sim.T - sim.ready_time[job]
    raise ValueError(rule)


_MINIMIZE = {JobRule.SPT, JobRule.FDD_MWKR}


def select_job(rule: JobRule | str, sim: Simulator) -> int:
    rule = JobRule(rule)
    best, best_z = -1, None
    minimize = rule in _MINIMIZE
    for j in range(sim.n):
        if not sim.assignable[j]:
            continue
        z = job_priority(rule, sim, j)
        if best_z is None or (z < best_z if minimize else z > best_z):
            best, best_z = j, z
    if best < 0:
        raise NoAssignableJob(f"no assignable job at T={sim.T}")
    return best


def select_machine(rule: MachineRule | str, sim: Simulator, job: int) -> int:
    rule = MachineRule(rule)
    cands = sorted(sim.idle_candidates(job))
    if not cands:
        raise NoIdleCandidate(f"job {job} has no idle candidate machine at T={sim.T}")
    if rule is MachineRule.SPT:
        return min(cands, key=lambda md: md[1])[0]
    best = cands[0]
    for md in cands[1:]:
        if md[1] > best[1]:
            best = md
    return best[0]


def dispatch(code: int, sim: Simulator) -> tuple[int, int]:
    """Decode ``code`` and return the (job, machine) it selects in ``sim``."""
    job_rule, machine_rule = decode_action(code)
    job = select_job(job_rule, sim)
    return job, select_machine(machine_rule, sim, job)
