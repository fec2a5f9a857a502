"""Result tables: CSV with a provenance preamble and unit-annotated headers.

Floats are written with ``repr`` (shortest round-trip form), so reading a
table and writing it again reproduces the file byte for byte.
"""
from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        return repr(float(v))
    if isinstance(v, str):
        if "," in v or "\n" in v:
            raise ValueError(f"string cell {v!r} contains a separator")
        return v
    try:
        return repr(float(v))
    except (TypeError, ValueError) as exc:
        raise TypeError(f"cannot write cell of type {type(v).__name__}") from exc


def _parse(s: str):
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


@dataclass
class ResultTable:
    """Named columns with units plus provenance metadata."""

    name: str
    columns: list[tuple[str, str]]          # (name, unit)
    rows: list[list] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} cells, table {self.name} has "
                             f"{len(self.columns)} columns")
        self.rows.append(list(values))

    def column(self, name: str) -> list:
        k = [c for c, _ in self.columns].index(name)
        return [r[k] for r in self.rows]

    def to_text(self) -> str:
        lines = [f"# table: {self.name}"]
        for key in ("scenario_sha256", "seed", "version"):
            if key in self.meta:
                lines.append(f"# {key}: {self.meta[key]}")
        for key in sorted(k for k in self.meta if k not in ("scenario_sha256", "seed", "version")):
            lines.append(f"# {key}: {self.meta[key]}")
        lines.append(",".join(f"{c}[{u}]" for c, u in self.columns))
        lines.extend(",".join(_fmt(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def write(self, directory) -> Path:
        path = Path(directory) / f"{self.name}.csv"
        path.write_text(self.to_text(), encoding="utf-8", newline="\n")
        return path


def provenance(scenario_sha256: str, seed: int) -> dict:
    return {"scenario_sha256": scenario_sha256, "seed": seed, "version": __version__}


def read_table(path) -> ResultTable:
    text = Path(path).read_text(encoding="utf-8")
    meta, name, body = {}, Path(path).stem, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, val = line[2:].partition(": ")
            if key == "table":
                name = val
            else:
                meta[key] = _parse(val) if key == "seed" else val
        else:
            body.append(line)
    if not body:
        raise ValueError(f"{path}: no header row")
    cols = []
    for h in body[0].split(","):
        if not h.endswith("]") or "[" not in h:
            raise ValueError(f"{path}: header cell {h!r} lacks a unit")
        c, _, u = h[:-1].partition("[")
        cols.append((c, u))
    rows = [[_parse(s) for s in line.split(",")] for line in body[1:]]
    return ResultTable(name, cols, rows, meta)

