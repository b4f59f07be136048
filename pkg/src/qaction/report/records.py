"""Result records and CSV tables written by ``qact run``.

Everything here is deterministic: keys are sorted, floats are written with
``repr`` and complex numbers are always split into real and imaginary parts.
Timestamps belong in the run log, never in these files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

SCHEMA_VERSION = "result_record.v0"


def encode_value(value: Any) -> Any:
    """JSON-ready form: complex -> {"re", "im"}, numpy -> python, non-finite -> string."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        z = complex(value)
        return {"re": encode_value(z.real), "im": encode_value(z.imag)}
    if isinstance(value, (float, np.floating)):
        x = float(value)
        return x if math.isfinite(x) else repr(x)
    if isinstance(value, np.ndarray):
        return [encode_value(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): encode_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode_value(v) for v in value]
    return value


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    value: float
    tolerance: float
    comparison: str

    @classmethod
    def below(cls, name: str, value: float, tolerance: float) -> Verdict:
        value = float(value)
        return cls(name, math.isfinite(value) and value < tolerance, value, tolerance, "<")

    @classmethod
    def at_least(cls, name: str, value: float, tolerance: float) -> Verdict:
        value = float(value)
        return cls(name, math.isfinite(value) and value >= tolerance, value, tolerance, ">=")

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "value": encode_value(self.value),
            "tolerance": encode_value(self.tolerance),
            "comparison": self.comparison,
        }


@dataclass
class Table:
    """Column-labelled rows; complex columns become ``<name>_re`` / ``<name>_im``."""

    name: str
    columns: tuple[str, ...]
    rows: list[tuple[Any, ...]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.columns = tuple(self.columns)
        for idx, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise ValueError(
                    f"table {self.name} row {idx} has {len(row)} cells, "
                    f"expected {len(self.columns)}"
                )

    def add(self, *cells: Any) -> None:
        if len(cells) != len(self.columns):
            raise ValueError(f"table {self.name} expects {len(self.columns)} cells")
        self.rows.append(tuple(cells))

    def _complex_columns(self) -> set[int]:
        return {
            k
            for k in range(len(self.columns))
            if any(isinstance(row[k], (complex, np.complexfloating)) for row in self.rows)
        }

    def header(self) -> list[str]:
        complex_cols = self._complex_columns()
        out: list[str] = []
        for k, name in enumerate(self.columns):
            out.extend([f"{name}_re", f"{name}_im"] if k in complex_cols else [name])
        return out

    def to_csv(self) -> str:
        complex_cols = self._complex_columns()
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header())
        for row in self.rows:
            cells: list[str] = []
            for k, value in enumerate(row):
                if k in complex_cols:
                    z = complex(value) if value is not None else complex("nan")
                    cells.extend([_cell(z.real), _cell(z.imag)])
                else:
                    cells.append(_cell(value))
            writer.writerow(cells)
        return buf.getvalue()

    def file_name(self, experiment: str) -> str:
        return f"{experiment}_{self.name}.csv"


@dataclass
class ResultRecord:
    experiment: str
    config: dict[str, Any]
    code_version: str
    results: dict[str, Any] = field(default_factory=dict)
    tables: list[Table] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def failed_verdicts(self) -> list[Verdict]:
        return [v for v in self.verdicts if not v.passed]

    def add_verdicts(self, verdicts: Iterable[Verdict]) -> None:
        self.verdicts.extend(verdicts)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "code_version": self.code_version,
            "config": encode_value(self.config),
            "results": encode_value(self.results),
            "tables": [
                {
                    "name": t.name,
                    "columns": t.header(),
                    "row_count": len(t.rows),
                    "file": t.file_name(self.experiment),
                }
                for t in self.tables
            ],
            "verdicts": [v.to_dict() for v in self.verdicts],
            "diagnostics": encode_value(self.diagnostics),
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def result_file_name(self) -> str:
        return f"{self.experiment}_result.json"

    def write(self, out_dir: Path) -> list[Path]:
        out_dir.mkdir(parents=True, exist_ok=True)
        written: list[Path] = []
        for table in self.tables:
            path = out_dir / table.file_name(self.experiment)
            path.write_text(table.to_csv(), encoding="utf-8")
            written.append(path)
        path = out_dir / self.result_file_name()
        path.write_text(self.to_json(), encoding="utf-8")
        written.append(path)
        return written


def table_from_rows(name: str, rows: Sequence[dict[str, Any]]) -> Table:
    """Table whose columns are the keys of the first row, in insertion order."""
    if not rows:
        return Table(name, ())
    columns = tuple(rows[0])
    return Table(name, columns, [tuple(row.get(c) for c in columns) for row in rows])
