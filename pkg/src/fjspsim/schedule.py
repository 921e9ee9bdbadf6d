"""Schedule records and their CSV / JSON forms.

Columns are fixed: ``job,stage,machine,start,end``; all indices 0-based.
The JSON form is ``{"instance": ..., "makespan": ..., "entries": [{...}, ...]}``
with the same field names.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

COLUMNS = ("job", "stage", "machine", "start", "end")


class FormatError(ValueError):
    pass


class Entry(NamedTuple):
    job: int
    stage: int
    machine: int
    start: int
    end: int


@dataclass
class Schedule:
    entries: list[Entry] = field(default_factory=list)
    instance: str = ""

    @property
    def makespan(self) -> int:
        return max((e.end for e in self.entries), default=0)

    def sorted(self) -> "Schedule":
        return Schedule(sorted(self.entries, key=lambda e: (e.start, e.machine, e.job)),
                        self.instance)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        w.writerows(self.entries)
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "instance": self.instance,
            "makespan": self.makespan,
            "entries": [e._asdict() for e in self.entries],
        }
        return json.dumps(doc, indent=1) + "\n"

    def save(self, path: str | Path):
        path = Path(path)
        path.write_text(self.to_json() if path.suffix == ".json" else self.to_csv())


def _entry(row: dict, where: str) -> Entry:
    try:
        return Entry(*(int(row[c]) for c in COLUMNS))
    except KeyError as e:
        raise FormatError(f"{where}: missing column {e.args[0]!r}") from None
    except (TypeError, ValueError):
        raise FormatError(f"{where}: non-integer field in {row!r}") from None


def schedule_from_csv(text: str) -> Schedule:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or set(COLUMNS) - set(reader.fieldnames):
        raise FormatError(f"CSV header must contain {','.join(COLUMNS)}")
    return Schedule([_entry(r, f"row {i + 2}") for i, r in enumerate(reader)])


def schedule_from_json(text: str) -> tuple[Schedule, int | None]:
    """Returns the schedule and the makespan it claims (None if absent)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"bad JSON: {e}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
        raise FormatError("JSON schedule needs an 'entries' list")
    entries = [_entry(r, f"entry {i}") if isinstance(r, dict) else
               _entry(dict(zip(COLUMNS, r)), f"entry {i}")
               for i, r in enumerate(doc["entries"])]
    claimed = doc.get("makespan")
    return Schedule(entries, doc.get("instance", "")), claimed


def load_schedule(path: str | Path) -> tuple[Schedule, int | None]:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        return schedule_from_json(text)
    return schedule_from_csv(text), None
