"""Chronological discrete-event engine for flexible job-shop scheduling.

One decision cycle is::

    sim.assign(job, machine)          # start an op at the current clock
    while not sim.has_assignable() and not sim.is_done():
        sim.advance_time()            # jump to the next machine completion
        sim.release_machines()        # free machines finishing at that time
    r = sim.collect_reward()          # -(processing time) - (vacancy accrued)

:meth:`Simulator.settle` runs the inner loop.  Summed over an episode the
rewards equal ``-num_machines * makespan`` exactly: every machine's
``next_time`` ends at the makespan, and the clock only moves forward by
processing time (charged at assignment) or by vacancy (charged when an idle
machine is dragged to the clock).
"""

from __future__ import annotations

import json
from typing import Any

from .instance import OpTable, RawInstance, build_table, parse_instance, serialize_instance
from .schedule import Entry, Schedule

SNAPSHOT_FORMAT = "fjspsim-snapshot"
SNAPSHOT_VERSION = 1


class SimulationError(RuntimeError):
    pass


class JobNotAssignable(SimulationError):
    pass


class MachineNotEligible(SimulationError):
    pass


class MachineBusy(SimulationError):
    pass


class DeadlockDetected(SimulationError):
    pass


class MakespanBeforeCompletion(SimulationError):
    pass


class VersionMismatch(ValueError):
    pass


class Simulator:
    """Live scheduling state over one instance.

    Jobs, stages and machines are 0-based at this interface; only the
    :class:`OpTable` carries 1-based signed machine ids.  Pass
    ``check=True`` to verify every invariant after each transition.
    """

    def __init__(self, inst: RawInstance, check: bool = False):
        self.inst = inst
        self.check = check
        self.n = inst.num_jobs
        self.M = inst.num_machines
        # alts[j][s] -> tuple of (0-based machine, duration)
        self.alts = [[tuple((m - 1, d) for m, d in op) for op in job] for job in inst.jobs]
        self.n_ops = [len(job) for job in inst.jobs]
        self.total_ops = sum(self.n_ops)
        self.reset()

    def reset(self):
        n, M = self.n, self.M
        self.T = 0
        self.completed = [0] * n
        self.next_time = [0] * M
        self.job_on_machine: list[int | None] = [None] * M
        self.running = [False] * n
        self.assignable = [True] * n
        self.n_assignable = n
        self.area = 0
        self.ready_time = [0] * n
        self.done_work = [0] * n
        self.entries: list[Entry] = []
        self.n_done_ops = 0
        self.table = build_table(self.inst)
        if self.check:
            self.check_invariants()

    # -- queries ---------------------------------------------------------

    def has_assignable(self) -> bool:
        return self.n_assignable > 0

    def assignable_jobs(self) -> list[int]:
        return [j for j in range(self.n) if self.assignable[j]]

    def idle_candidates(self, job: int) -> list[tuple[int, int]]:
        """(machine, duration) alternatives of the job's next op that are idle."""
        jom = self.job_on_machine
        return [(m, d) for m, d in self.alts[job][self.completed[job]] if jom[m] is None]

    def is_done(self) -> bool:
        return self.n_done_ops == self.total_ops

    def makespan(self) -> int:
        if not self.is_done():
            raise MakespanBeforeCompletion(
                f"{self.n_done_ops}/{self.total_ops} operations complete")
        return max(e.end for e in self.entries)

    def schedule(self) -> Schedule:
        return Schedule(list(self.entries), self.inst.name)

    # -- transitions -----------------------------------------------------

    def _refresh(self, j: int):
        ok = (not self.running[j] and self.completed[j] < self.n_ops[j]
              and any(self.job_on_machine[m] is None for m, _ in self.alts[j][self.completed[j]]))
        if ok != self.assignable[j]:
            self.assignable[j] = ok
            self.n_assignable += 1 if ok else -1

    def _sign_waiting(self, machine: int, sign: int):
        # Rule 2: flip the entry for `machine` in every ready, unstarted op.
        mid = machine + 1
        for j in range(self.n):
            if self.running[j] or self.completed[j] == self.n_ops[j]:
                continue
            cell = self.table.machines[j][self.completed[j]]
            for k, v in enumerate(cell):
                if abs(v) == mid:
                    cell[k] = sign * mid
                    self._refresh(j)
                    break

    def assign(self, job: int, machine: int):
        if not 0 <= job < self.n or not self.assignable[job]:
            raise JobNotAssignable(f"job {job} is not assignable at T={self.T}")
        stage = self.completed[job]
        dur = None
        for m, d in self.alts[job][stage]:
            if m == machine:
                dur = d
                break
        if dur is None:
            raise MachineNotEligible(f"machine {machine} cannot process ({job}, {stage})")
        if self.job_on_machine[machine] is not None:
            raise MachineBusy(f"machine {machine} is busy until {self.next_time[machine]}")

        T = self.T
        self.next_time[machine] = T + dur
        self.job_on_machine[machine] = job
        self.running[job] = True
        self._refresh(job)
        # Rule 1
        self.table.machines[job][stage] = [-(machine + 1)]
        self.table.times[job][stage] = [dur]
        self._sign_waiting(machine, -1)
        self.area -= dur
        self.entries.append(Entry(job, stage, machine, T, T + dur))
        if self.check:
            self.check_invariants()

    def advance_time(self) -> int:
        """Move the clock to the next completion; charge vacancy to idle machines."""
        # Idle machines always sit at T (dragged or just released), so the
        # smallest busy next time is the "min, else second min" of all machines.
        busy = [self.next_time[m] for m in range(self.M) if self.job_on_machine[m] is not None]
        if not busy:
            raise DeadlockDetected(f"nothing running at T={self.T} and nothing assignable")
        new_T = min(busy)
        if new_T <= self.T:
            raise SimulationError(f"machine finishing at {new_T} not released (T={self.T})")
        elapsed = new_T - self.T
        self.T = new_T
        for m in range(self.M):
            ta = new_T - self.next_time[m]
            if ta > 0:
                self.next_time[m] += ta
                self.area -= ta
        # Rule 1: remaining times of running ops shrink with the clock
        for m in range(self.M):
            j = self.job_on_machine[m]
            if j is not None:
                self.table.times[j][self.completed[j]][0] = self.next_time[m] - new_T
        if self.check:
            self.check_invariants()
        return elapsed

    def release_machines(self) -> list[tuple[int, int]]:
        released = []
        T = self.T
        for m in range(self.M):
            j = self.job_on_machine[m]
            if j is None or self.next_time[m] != T:
                continue
            stage = self.completed[j]
            self.job_on_machine[m] = None
            self.running[j] = False
            self.done_work[j] += self._duration(j, stage, m)
            self.completed[j] += 1
            self.n_done_ops += 1
            self.ready_time[j] = T
            # Rule 3
            self.table.machines[j][stage] = [-(m + 1)]
            self.table.times[j][stage] = [0]
            released.append((m, j))
            self._sign_waiting(m, +1)
            if self.completed[j] < self.n_ops[j]:
                # the newly ready op starts with busy machines negated (Rule 2)
                cell = self.table.machines[j][self.completed[j]]
                for k, v in enumerate(cell):
                    cell[k] = -v if self.job_on_machine[v - 1] is not None else v
            self._refresh(j)
        if self.check and released:
            self.check_invariants()
        return released

    def _duration(self, job: int, stage: int, machine: int) -> int:
        for m, d in self.alts[job][stage]:
            if m == machine:
                return d
        raise AssertionError(f"({job}, {stage}) has no alternative on machine {machine}")

    def collect_reward(self) -> int:
        r, self.area = self.area, 0
        return r

    def settle(self) -> list[tuple[int, int]]:
        """Advance and release until a decision is possible or all work is done."""
        released = []
        while self.n_assignable == 0 and self.n_done_ops < self.total_ops:
            self.advance_time()
            released += self.release_machines()
        return released

    # -- invariants ------------------------------------------------------

    def check_invariants(self):
        self.table.check()
        T = self.T
        for j in range(self.n):
            c = self.completed[j]
            assert 0 <= c <= self.n_ops[j]
            for s in range(c):
                ms, ts = self.table.cell(j, s)
                assert len(ms) == 1 and ms[0] < 0 and ts == [0], f"Rule 3 broken at ({j},{s})"
            if c == self.n_ops[j]:
                assert not self.assignable[j] and not self.running[j]
                continue
            ms, ts = self.table.cell(j, c)
            if self.running[j]:
                m = -ms[0] - 1
                assert len(ms) == 1 and ms[0] < 0, f"Rule 1 broken at ({j},{c})"
                assert self.job_on_machine[m] == j
                assert ts[0] == self.next_time[m] - T
            else:
                for v, (m, d), t in zip(ms, self.alts[j][c], ts):
                    assert abs(v) == m + 1 and t == d
                    assert (v < 0) == (self.job_on_machine[m] is not None), \
                        f"Rule 2 broken at ({j},{c})"
                idle = any(v > 0 for v in ms)
                assert self.assignable[j] == idle
            for s in range(c + 1, self.n_ops[j]):
                ms, ts = self.table.cell(j, s)
                assert ms == [m + 1 for m, _ in self.alts[j][s]], f"Rule 4 broken at ({j},{s})"
        assert self.n_assignable == sum(self.assignable)
        for m in range(self.M):
            if self.job_on_machine[m] is not None:
                assert self.next_time[m] >= T
            else:
                assert self.next_time[m] <= T

    # -- snapshot / restore ----------------------------------------------

    def snapshot(self) -> str:
        """Versioned, self-describing JSON text of the complete state."""
        doc: dict[str, Any] = {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "instance": {"name": self.inst.name, "text": serialize_instance(self.inst)},
            "clock": self.T,
            "assignable_job": [int(a) for a in self.assignable],
            "completed_op_of_job": self.completed,
            "running_job": [int(r) for r in self.running],
            "next_time_on_machine": self.next_time,
            "job_on_machine": [-1 if j is None else j for j in self.job_on_machine],
            "scheduling_area": self.area,
            "ready_time": self.ready_time,
            "done_work": self.done_work,
            "table": {"machines": self.table.machines, "times": self.table.times},
            "entries": [list(e) for e in self.entries],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def restore(cls, text: str, check: bool = False) -> "Simulator":
        doc = json.loads(text)
        if doc.get("format") != SNAPSHOT_FORMAT or doc.get("version") != SNAPSHOT_VERSION:
            raise VersionMismatch(
                f"unsupported snapshot {doc.get('format')!r} v{doc.get('version')!r}; "
                f"expected {SNAPSHOT_FORMAT} v{SNAPSHOT_VERSION}")
        inst = parse_instance(doc["instance"]["text"], name=doc["instance"]["name"])
        sim = cls(inst, check=False)
        sim.T = doc["clock"]
        sim.assignable = [bool(a) for a in doc["assignable_job"]]
        sim.n_assignable = sum(sim.assignable)
        sim.completed = list(doc["completed_op_of_job"])
        sim.running = [bool(r) for r in doc["running_job"]]
        sim.next_time = list(doc["next_time_on_machine"])
        sim.job_on_machine = [None if j < 0 else j for j in doc["job_on_machine"]]
        sim.area = doc["scheduling_area"]
        sim.ready_time = list(doc["ready_time"])
        sim.done_work = list(doc["done_work"])
        sim.table = OpTable(doc["table"]["machines"], doc["table"]["times"])
        sim.entries = [Entry(*e) for e in doc["entries"]]
        sim.n_done_ops = sum(sim.completed)
        sim.check = check
        if check:
            sim.check_invariants()
        return sim
