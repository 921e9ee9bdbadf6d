"""Locating benchmark instance files on disk.

The files are not bundled.  Point ``FJSPSIM_BENCHMARKS`` at a directory that
holds them (any nesting), e.g.::

    data/
      Brandimarte/Mk01.fjs ... Mk10.fjs
      Hurink/edata/la01.fjs ... la40.fjs
      Hurink/rdata/...
      Hurink/vdata/...

Default location is ``data/`` at the repository root.
"""

from __future__ import annotations

import os
import re
from pathlib import Path

ENV_VAR = "FJSPSIM_BENCHMARKS"
INSTANCE_SUFFIXES = {".fjs", ".txt", ".fjsp", ".data", ""}
HURINK_GROUPS = ("edata", "rdata", "vdata")

_MK = re.compile(r"(?i)^mk0*(\d+)$")
_LA = re.compile(r"(?i)^la0*(\d+)$")


def benchmark_root() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(__file__).resolve().parents[2] / "data"


def _natural(p: Path):
    return [int(t) if t.isdigit() else t.lower() for t in re.split(r"(\d+)", str(p))]


def find_instance_files(path: str | Path) -> list[Path]:
    path = Path(path)
    if path.is_file():
        return [path]
    if not path.is_dir():
        raise FileNotFoundError(path)
    files = [p for p in path.rglob("*")
             if p.is_file() and not p.name.startswith(".")
             and p.suffix.lower() in INSTANCE_SUFFIXES and "readme" not in p.name.lower()]
    return sorted(files, key=_natural)


def mk_paths(root: str | Path | None = None) -> list[Path]:
    """MK01..MK10 in order; missing ones are simply absent from the list."""
    root = Path(root) if root else benchmark_root()
    if not root.is_dir():
        return []
    found = {}
    for p in find_instance_files(root):
        m = _MK.match(p.stem)
        if m and 1 <= int(m.group(1)) <= 10:
            found.setdefault(int(m.group(1)), p)
    return [found[k] for k in sorted(found)]


def mk_path(number: int, root: str | Path | None = None) -> Path | None:
    for p in mk_paths(root):
        if int(_MK.match(p.stem).group(1)) == number:
            return p
    return None


def hurink_paths(root: str | Path | None = None) -> dict[str, list[Path]]:
    """la01..la40 for each of edata / rdata / vdata."""
    root = Path(root) if root else benchmark_root()
    out = {g: {} for g in HURINK_GROUPS}
    if not root.is_dir():
        return {g: [] for g in HURINK_GROUPS}
    for p in find_instance_files(root):
        m = _LA.match(p.stem)
        if not m or not 1 <= int(m.group(1)) <= 40:
            continue
        parts = {q.lower() for q in p.parts}
        for g in HURINK_GROUPS:
            if g in parts:
                out[g].setdefault(int(m.group(1)), p)
    return {g: [d[k] for k in sorted(d)] for g, d in out.items()}
