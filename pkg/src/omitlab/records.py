"""Run records and tabular outputs.

Every command that writes artifacts also writes a JSON record next to
them: the exact parameters, the master seed, digests of the files
produced, what was verified, and the wall time.  Re-running with the
same record reproduces the artifacts byte for byte.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .formats import sha256_file, write_json


@dataclass
class RunRecord:
    command: str
    parameters: dict
    seed: Optional[int] = None
    artifacts: dict = field(default_factory=dict)  # name -> sha256
    verification: dict = field(default_factory=dict)
    wall_time: float = 0.0
    version: str = __version__

    def add_artifact(self, path) -> None:
        p = Path(path)
        self.artifacts[p.name] = sha256_file(p)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "artifacts": dict(sorted(self.artifacts.items())),
            "verification": self.verification,
            "wall_time": round(self.wall_time, 6),
            "version": self.version,
        }

    def write(self, path) -> None:
        write_json(self.to_json(), path)


class Stopwatch:
    """Context manager that fills ``record.wall_time``."""

    def __init__(self, record: RunRecord):
        self.record = record

    def __enter__(self):
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.record.wall_time = time.perf_counter() - self._t0
        return False


@dataclass(frozen=True)
class BoundTable:
    """Columns of measured quantities next to their benchmarks.

    Rows are emitted in the order given; the CSV layout is fully
    determined by (columns, rows), so equal inputs give identical
    bytes.
    """

    columns: tuple
    rows: tuple

    @classmethod
    def build(cls, columns, rows) -> "BoundTable":
        cols = tuple(columns)
        out = []
        for r in rows:
            if len(r) != len(cols):
                raise ValueError(f"row width {len(r)} != {len(cols)} columns")
            out.append(tuple(r))
        return cls(cols, tuple(out))

    def to_csv(self) -> str:
        def fmt(x) -> str:
            if isinstance(x, bool):
                return "true" if x else "false"
            if isinstance(x, float):
                return format(x, ".12g")
            return str(x)

        lines = [",".join(self.columns)]
        lines.extend(",".join(fmt(x) for x in r) for r in self.rows)
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.to_csv(), encoding="ascii")
