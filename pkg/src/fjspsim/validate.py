"""Schedule checker that reads only the schedule and the raw instance.

It shares no code with the simulator on purpose: it is the oracle that
simulator output is judged against.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .instance import RawInstance
from .schedule import Schedule


@dataclass
class Verdict:
    violations: list[str] = field(default_factory=list)
    makespan: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return f"PASS makespan={self.makespan}"
        return "FAIL\n" + "\n".join(f"  {v}" for v in self.violations)


def validate_schedule(schedule: Schedule, inst: RawInstance,
                      claimed_makespan: int | None = None) -> Verdict:
    bad: list[str] = []
    seen: dict[tuple[int, int], tuple[int, int, int]] = {}
    by_machine = defaultdict(list)

    for e in schedule.entries:
        key = (e.job, e.stage)
        if not (0 <= e.job < inst.num_jobs and 0 <= e.stage < len(inst.jobs[e.job])):
            bad.append(f"unknown operation job={e.job} stage={e.stage}")
            continue
        if key in seen:
            bad.append(f"operation {key} scheduled twice")
            continue
        seen[key] = (e.machine, e.start, e.end)
        if e.start < 0:
            bad.append(f"operation {key} starts at negative time {e.start}")
        durations = {m - 1: d for m, d in inst.jobs[e.job][e.stage]}
        if e.machine not in durations:
            bad.append(f"eligibility: operation {key} on machine {e.machine}, "
                       f"allowed {sorted(durations)}")
        elif e.end - e.start != durations[e.machine]:
            bad.append(f"duration: operation {key} runs {e.end - e.start}, "
                       f"expected {durations[e.machine]} on machine {e.machine}")
        by_machine[e.machine].append((e.start, e.end, key))

    for j, job in enumerate(inst.jobs):
        for s in range(len(job)):
            if (j, s) not in seen:
                bad.append(f"missing operation ({j}, {s})")
            elif s > 0 and (j, s - 1) in seen and seen[(j, s)][1] < seen[(j, s - 1)][2]:
                bad.append(f"precedence: ({j}, {s}) starts at {seen[(j, s)][1]} before "
                           f"({j}, {s - 1}) ends at {seen[(j, s - 1)][2]}")

    for m, slots in sorted(by_machine.items()):
        slots.sort()
        for (s0, e0, k0), (s1, e1, k1) in zip(slots, slots[1:]):
            if s1 < e0:
                bad.append(f"overlap: machine {m} runs {k0} [{s0},{e0}) and {k1} [{s1},{e1})")

    makespan = max((e.end for e in schedule.entries), default=0)
    if claimed_makespan is not None and claimed_makespan != makespan:
        bad.append(f"makespan: claimed {claimed_makespan}, entries end at {makespan}")
    return Verdict(bad, makespan)
