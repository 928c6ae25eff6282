"""
The storage layer for epsicomp: reading input series from CSV files and
writing CSV and JSON artifacts into an output directory.

All floats are written with their shortest round-trip representation, so
re-reading an artifact gives back the exact values.
"""

import csv
import io
import sys
from pathlib import Path

import numpy as np
from pydantic import BaseModel

from epsicomp.errors import DataError
from epsicomp.service.function_model import SampledFunction
from epsicomp.service.versioning import digest

UNIFORM_GRID_TOLERANCE = 1e-9


class InputParseError(DataError):
    pass


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"

    if isinstance(value, (float, np.floating)):
        return repr(float(value))

    return str(value)


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False

    return True


def parse_series(text: str) -> SampledFunction:
    """
    A series from CSV text: one value per line, or two columns (t, value)
    with t on a uniform grid. A header row is recognized by a non-numeric
    first token.

    Raises
    ------
    InputParseError
        Naming the offending line.
    """

    columns = None
    grid, values = [], []

    for number, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        row = [x.strip() for x in row]

        if not row or all(x == "" for x in row):
            continue

        if columns is None and not _is_number(row[0]):
            # Header
            columns = len(row)
            continue

        if columns is None:
            columns = len(row)

        if columns not in (1, 2):
            raise InputParseError(
                f"line {number}: expected one or two columns, got {columns}"
            )

        if len(row) != columns:
            raise InputParseError(
                f"line {number}: expected {columns} columns, got {len(row)}"
            )

        try:
            parsed = [float(x) for x in row]
        except ValueError:
            raise InputParseError(f"line {number}: cannot parse {','.join(row)!r}")

        if not all(np.isfinite(parsed)):
            raise InputParseError(f"line {number}: values must be finite")

        if columns == 2:
            grid.append(parsed[0])

        values.append(parsed[-1])

    if len(values) < 2:
        raise InputParseError(f"At least two values are needed, got {len(values)}")

    if grid:
        steps = np.diff(grid)
        step = float(np.mean(steps))

        if step <= 0.0:
            raise InputParseError("The t column must be increasing")

        irregular = np.flatnonzero(np.abs(steps - step) > UNIFORM_GRID_TOLERANCE * step)

        if irregular.size > 0:
            raise InputParseError(
                f"The t column is not a uniform grid, first irregular step after "
                f"t={grid[irregular[0]]}"
            )

    return SampledFunction.from_series(values)


class Storage(BaseModel):
    """
    An output directory. It is created on the first write.
    """

    out: Path

    def path(self, name: str) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        return self.out / name

    def read(self, source: str | Path) -> tuple[SampledFunction, str]:
        """
        Read a series from a CSV file, or from standard input when
        ``source`` is ``-``.

        Returns
        -------
        tuple[SampledFunction, str]
            The series and the digest of the raw input.
        """

        if str(source) == "-":
            data = sys.stdin.buffer.read()
        else:
            data = Path(source).read_bytes()

        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise InputParseError(f"Input is not UTF-8 text: {e}")

        return parse_series(text), digest(data)

    def write_csv(self, name: str, header: list[str], rows) -> Path:
        path = self.path(name)

        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows([[_format(x) for x in row] for row in rows])

        return path

    def write_json(self, name: str, model: BaseModel, exclude=None) -> Path:
        path = self.path(name)
        path.write_text(model.model_dump_json(indent=2, exclude=exclude) + "\n")
        return path


def format_series(values: np.ndarray) -> str:
    """
    One value per line, in round-trip precision.
    """
    return "".join(f"{_format(x)}\n" for x in values)
