"""Run reports and the dispatching-rule sweep table."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .dispatch import JobRule, MachineRule, encode_action
from .env import rollout
from .instance import ParseError, RawInstance, load_instance
from .schedule import Schedule
from .validate import validate_schedule


@dataclass
class RunReport:
    instance: str
    method: str
    makespan: int
    wall_seconds: float
    seed: int | None = None
    utilization: list[float] = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def utilization(schedule: Schedule, num_machines: int) -> list[float]:
    busy = [0] * num_machines
    for e in schedule.entries:
        busy[e.machine] += e.end - e.start
    span = schedule.makespan
    return [round(b / span, 6) for b in busy] if span else [0.0] * num_machines


def make_report(inst: RawInstance, schedule: Schedule, method: str, seconds: float,
                seed: int | None = None) -> RunReport:
    return RunReport(inst.name, method, schedule.makespan, round(seconds, 6), seed,
                     utilization(schedule, inst.num_machines))


@dataclass
class PdrResult:
    instance: str
    makespans: dict[tuple[str, str], int] = field(default_factory=dict)
    schedules: dict[tuple[str, str], Schedule] = field(default_factory=dict)
    seconds: dict[tuple[str, str], float] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)
    error: str | None = None

    @property
    def min_pdr(self) -> int | None:
        return min(self.makespans.values()) if self.makespans else None


def run_pdr_instance(path: str | Path, job_rules, machine_rules) -> PdrResult:
    path = Path(path)
    try:
        inst = load_instance(path)
    except (ParseError, OSError) as e:
        return PdrResult(path.stem, error=f"{path}: {e}")
    res = PdrResult(inst.name)
    for jr in job_rules:
        for mr in machine_rules:
            key = (JobRule(jr).value, MachineRule(mr).value)
            t = time.perf_counter()
            sched, rewards = rollout(inst, encode_action(jr, mr))
            res.seconds[key] = time.perf_counter() - t
            res.makespans[key] = sched.makespan
            res.schedules[key] = sched
            verdict = validate_schedule(sched, inst)
            res.violations += [f"{inst.name} {key}: {v}" for v in verdict.violations]
            if sum(rewards) != -inst.num_machines * sched.makespan:
                res.violations.append(f"{inst.name} {key}: reward sum {sum(rewards)} "
                                      f"!= -{inst.num_machines} * {sched.makespan}")
    return res


def pdr_sweep(paths, job_rules=tuple(JobRule), machine_rules=(MachineRule.SPT,),
              workers: int = 1) -> list[PdrResult]:
    """Results in the order of ``paths`` regardless of worker scheduling."""
    args = [(p, tuple(job_rules), tuple(machine_rules)) for p in paths]
    if workers <= 1 or len(args) <= 1:
        return [run_pdr_instance(*a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_pdr_instance, *zip(*args)))


PDR_COLUMNS = ("instance", "job_rule", "machine_rule", "makespan", "min_pdr")


def pdr_rows(results: list[PdrResult]) -> list[dict]:
    """Long table: one row per (instance, rule pair), then AVG rows per pair."""
    ok = [r for r in results if r.error is None]
    rows = []
    for r in ok:
        for (jr, mr), span in r.makespans.items():
            rows.append({"instance": r.instance, "job_rule": jr, "machine_rule": mr,
                         "makespan": span, "min_pdr": r.min_pdr})
    if ok:
        avg_min = round(sum(r.min_pdr for r in ok) / len(ok), 4)
        for key in ok[0].makespans:
            vals = [r.makespans[key] for r in ok if key in r.makespans]
            rows.append({"instance": "AVG", "job_rule": key[0], "machine_rule": key[1],
                         "makespan": round(sum(vals) / len(vals), 4), "min_pdr": avg_min})
    return rows


def pdr_averages(results: list[PdrResult]) -> dict[str, float]:
    """Mean makespan per rule pair label plus ``minPDR``."""
    out = {}
    for row in pdr_rows(results):
        if row["instance"] == "AVG":
            out[f"{row['job_rule']}/{row['machine_rule']}"] = row["makespan"]
            out["minPDR"] = row["min_pdr"]
    return out


def render_rows(rows: list[dict], columns, fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
