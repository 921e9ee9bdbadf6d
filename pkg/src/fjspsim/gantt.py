"""Gantt lanes: per-machine busy intervals and the vacancy between them."""

from __future__ import annotations

from collections import defaultdict

from .schedule import Schedule


def gantt_data(schedule: Schedule, num_machines: int | None = None) -> dict:
    """Lanes for machines ``0 .. num_machines - 1`` over ``[0, makespan)``.

    ``busy_total + vacancy_total == num_machines * makespan`` whenever the
    schedule has no overlaps.
    """
    makespan = schedule.makespan
    lanes = defaultdict(list)
    for e in schedule.entries:
        lanes[e.machine].append(e)
    if num_machines is None:
        num_machines = max(lanes, default=-1) + 1
    out = []
    busy_total = vacancy_total = 0
    for m in range(num_machines):
        ops = sorted(lanes.get(m, []), key=lambda e: e.start)
        busy, vacancy = [], []
        t = 0
        for e in ops:
            if e.start > t:
                vacancy.append({"start": t, "end": e.start})
            busy.append({"job": e.job, "stage": e.stage, "start": e.start, "end": e.end})
            t = max(t, e.end)
        if t < makespan:
            vacancy.append({"start": t, "end": makespan})
        b = sum(x["end"] - x["start"] for x in busy)
        v = sum(x["end"] - x["start"] for x in vacancy)
        busy_total += b
        vacancy_total += v
        out.append({"machine": m, "busy": busy, "vacancy": vacancy,
                    "busy_time": b, "vacancy_time": v})
    return {
        "instance": schedule.instance,
        "makespan": makespan,
        "num_machines": num_machines,
        "busy_total": busy_total,
        "vacancy_total": vacancy_total,
        "lanes": out,
    }
