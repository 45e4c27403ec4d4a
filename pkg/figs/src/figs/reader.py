"""Reading the versioned CSV files emitted by the petzchain CLI.

Files start with a `# petzchain-csv <schema> v<N>` line followed by a header
row. Cells stay strings here; numeric conversion happens at plot time so a
missing column fails with its name rather than a cast error.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path


class SchemaError(ValueError):
    """Input CSV does not match the expected petzchain schema."""


@dataclass(frozen=True)
class Table:
    schema: str
    columns: tuple[str, ...]
    rows: tuple[dict[str, str], ...]

    def column(self, name: str) -> list[str]:
        if name not in self.columns:
            raise SchemaError(
                f"missing column {name!r} (have: {', '.join(self.columns)})"
            )
        return [row[name] for row in self.rows]

    def floats(self, name: str) -> list[float]:
        return [float(v) for v in self.column(name)]

    def groups(self, *keys: str) -> dict[tuple[str, ...], "Table"]:
        """Split rows by the value tuple of the given columns, in file order."""
        for k in keys:
            self.column(k)  # raises on a missing key column
        out: dict[tuple[str, ...], list[dict[str, str]]] = {}
        for row in self.rows:
            out.setdefault(tuple(row[k] for k in keys), []).append(row)
        return {
            key: Table(self.schema, self.columns, tuple(rows))
            for key, rows in out.items()
        }


def read_table(path: str | Path, expect_schema: str | None = None) -> Table:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline().strip()
        parts = first.split()
        if len(parts) != 4 or parts[:2] != ["#", "petzchain-csv"]:
            raise SchemaError(
                f"{path}: expected a '# petzchain-csv <schema> v<N>' first "
                f"line, got {first!r}"
            )
        schema = parts[2]
        if expect_schema is not None and schema != expect_schema:
            raise SchemaError(
                f"{path}: schema {schema!r}, expected {expect_schema!r}"
            )
        reader = csv.DictReader(fh)
        columns = tuple(reader.fieldnames or ())
        rows = tuple(dict(r) for r in reader)
    if not columns:
        raise SchemaError(f"{path}: no header row")
    return Table(schema=schema, columns=columns, rows=rows)
