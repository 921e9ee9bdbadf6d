"""Benchmark instances and the signed two-dimensional operation table.

Instance files use the Brandimarte / Hurink layout::

    <num_jobs> <num_machines> [<avg machines per operation>]
    <n_ops> <k> <m> <d> ... <m> <d> <k> ...      (one line per job)

Machine ids in files are 1-based.  :class:`RawInstance` keeps them that way;
the simulator converts to 0-based indices when it builds its arrays.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

Alternative = tuple[int, int]  # (machine id, 1-based; duration)
Operation = tuple[Alternative, ...]


class ParseError(ValueError):
    """A benchmark file that does not follow the instance layout."""

    def __init__(self, message: str, line: int | None = None, token: int | None = None):
        self.line = line
        self.token = token
        where = []
        if line is not None:
            where.append(f"line {line}")
        if token is not None:
            where.append(f"token {token}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class MalformedHeader(ParseError):
    pass


class TruncatedJobLine(ParseError):
    pass


class MachineOutOfRange(ParseError):
    pass


class NonPositiveDuration(ParseError):
    pass


class DuplicateMachine(ParseError):
    pass


@dataclass(frozen=True)
class RawInstance:
    num_jobs: int
    num_machines: int
    jobs: tuple[tuple[Operation, ...], ...]
    avg_machines_per_op: float | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if len(self.jobs) != self.num_jobs:
            raise ValueError(f"expected {self.num_jobs} jobs, got {len(self.jobs)}")
        for j, job in enumerate(self.jobs):
            if not job:
                raise ValueError(f"job {j} has no operations")
            for s, op in enumerate(job):
                if not op:
                    raise ValueError(f"operation ({j}, {s}) has no machine")
                seen = set()
                for m, d in op:
                    if not 1 <= m <= self.num_machines:
                        raise ValueError(f"machine {m} out of range in ({j}, {s})")
                    if d <= 0:
                        raise ValueError(f"non-positive duration {d} in ({j}, {s})")
                    if m in seen:
                        raise ValueError(f"duplicate machine {m} in ({j}, {s})")
                    seen.add(m)

    @classmethod
    def from_lists(cls, num_machines: int, jobs: Iterable[Iterable[Iterable[Sequence[int]]]],
                   name: str = "") -> "RawInstance":
        """Build from nested lists ``jobs[j][s] = [(machine, duration), ...]``."""
        frozen = tuple(
            tuple(tuple((int(m), int(d)) for m, d in op) for op in job) for job in jobs
        )
        return cls(len(frozen), num_machines, frozen, name=name)

    @property
    def op_counts(self) -> list[int]:
        return [len(job) for job in self.jobs]

    @property
    def total_ops(self) -> int:
        return sum(len(job) for job in self.jobs)

    @property
    def max_ops(self) -> int:
        return max(len(job) for job in self.jobs)

    def duration(self, job: int, stage: int, machine: int) -> int | None:
        """Duration of ``(job, stage)`` on 0-based ``machine``; None if ineligible."""
        for m, d in self.jobs[job][stage]:
            if m - 1 == machine:
                return d
        return None

    def total_work(self) -> int:
        return sum(d for job in self.jobs for op in job for _, d in op)


def _parse_int(tok: str, line: int, pos: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {tok!r}", line, pos) from None


def parse_instance(text: str, name: str = "") -> RawInstance:
    """Parse benchmark text into a :class:`RawInstance`.

    Positions in errors are 1-based line numbers and 1-based token indices
    within that line.
    """
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(no, toks) for no, toks in lines if toks]
    if not lines:
        raise MalformedHeader("empty instance text", 1)
    head_no, head = lines[0]
    if len(head) < 2:
        raise MalformedHeader("header needs at least num_jobs and num_machines", head_no)
    num_jobs = _parse_int(head[0], head_no, 1, "num_jobs")
    num_machines = _parse_int(head[1], head_no, 2, "num_machines")
    if num_jobs <= 0 or num_machines <= 0:
        raise MalformedHeader("num_jobs and num_machines must be positive", head_no)
    avg = None
    if len(head) >= 3:
        try:
            avg = float(head[2])
        except ValueError:
            raise MalformedHeader(f"bad flexibility value {head[2]!r}", head_no, 3) from None

    body = lines[1:]
    if len(body) < num_jobs:
        no = body[-1][0] + 1 if body else head_no + 1
        raise TruncatedJobLine(f"expected {num_jobs} job lines, found {len(body)}", no)
    if len(body) > num_jobs:
        log.warning("%s: ignoring %d lines after the last job", name or "instance",
                    len(body) - num_jobs)

    jobs = []
    for j, (no, toks) in enumerate(body[:num_jobs]):
        pos = 0

        def take(what: str) -> int:
            nonlocal pos
            if pos >= len(toks):
                raise TruncatedJobLine(f"job {j}: missing {what}", no, pos + 1)
            val = _parse_int(toks[pos], no, pos + 1, what)
            pos += 1
            return val

        n_ops = take("operation count")
        if n_ops <= 0:
            raise ParseError(f"job {j}: operation count must be positive", no, 1)
        ops = []
        for s in range(n_ops):
            k = take("alternative count")
            if k <= 0:
                raise ParseError(f"job {j} op {s}: alternative count must be positive", no, pos)
            alts = []
            seen = set()
            for _ in range(k):
                m = take("machine id")
                if not 1 <= m <= num_machines:
                    raise MachineOutOfRange(f"machine {m} not in [1, {num_machines}]", no, pos)
                if m in seen:
                    raise DuplicateMachine(f"machine {m} listed twice", no, pos)
                seen.add(m)
                d = take("duration")
                if d <= 0:
                    raise NonPositiveDuration(f"duration {d} must be positive", no, pos)
                alts.append((m, d))
            ops.append(tuple(alts))
        if pos < len(toks):
            log.warning("%s line %d: ignoring %d trailing tokens", name or "instance", no,
                        len(toks) - pos)
        jobs.append(tuple(ops))
    return RawInstance(num_jobs, num_machines, tuple(jobs), avg, name=name)


def load_instance(path: str | Path) -> RawInstance:
    path = Path(path)
    return parse_instance(path.read_text(), name=path.stem)


def serialize_instance(inst: RawInstance) -> str:
    head = [str(inst.num_jobs), str(inst.num_machines)]
    if inst.avg_machines_per_op is not None:
        head.append(f"{inst.avg_machines_per_op:g}")
    out = ["  ".join(head)]
    for job in inst.jobs:
        toks = [str(len(job))]
        for op in job:
            toks.append(str(len(op)))
            for m, d in op:
                toks += [str(m), str(d)]
        out.append(" ".join(toks))
    return "\n".join(out) + "\n"


@dataclass
class OpTable:
    """Per (job, stage) signed machine set and remaining time set.

    Entries are 1-based machine ids; rows have per-job lengths.  The
    simulator keeps four update rules:

    * Rule 1: a running op holds ``[-m]`` and its remaining time.
    * Rule 2: a ready, unstarted op negates each of its machines that is busy.
    * Rule 3: a finished op holds ``[-m]`` and ``[0]``.
    * Rule 4: ops further down a job stay as read from the file.
    """

    machines: list[list[list[int]]]
    times: list[list[list[int]]]

    def cell(self, job: int, stage: int) -> tuple[list[int], list[int]]:
        return self.machines[job][stage], self.times[job][stage]

    def row_lengths(self) -> list[int]:
        return [len(row) for row in self.machines]

    def total_remaining(self) -> int:
        return sum(t for row in self.times for cell in row for t in cell)

    def copy(self) -> "OpTable":
        return OpTable([[list(c) for c in row] for row in self.machines],
                       [[list(c) for c in row] for row in self.times])

    def check(self):
        """Raise AssertionError if a structural table invariant is broken."""
        for row_m, row_t in zip(self.machines, self.times):
            for ms, ts in zip(row_m, row_t):
                assert len(ms) == len(ts) and ms, "machine/time sets misaligned"
                assert 0 not in ms, "machine index 0 in table"
                assert all(t >= 0 for t in ts), "negative remaining time"


def build_table(inst: RawInstance) -> OpTable:
    return OpTable(
        [[[m for m, _ in op] for op in job] for job in inst.jobs],
        [[[d for _, d in op] for op in job] for job in inst.jobs],
    )
