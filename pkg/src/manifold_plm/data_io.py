"""CSV ingestion and emission.

The dataset layout is one header row followed by numeric rows with columns
ordered response, linear covariates, manifold coordinates: ``y, x1..xp,
t1..tk`` where k is 3 for the sphere, 2 for the cylinder (t1 = angle in
radians, t2 = height) and d for Euclidean space. Header cells are labels
only; the column count and the coordinate block determine the parse. Errors
carry the 1-based data row of the first violation.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .exceptions import CsvFormatError, InvalidPointError
from .geometry import Cylinder, Manifold
from .plm import Dataset


def coord_names(manifold: Manifold) -> list[str]:
    if isinstance(manifold, Cylinder):
        return ["angle", "height"]
    return [f"t{j + 1}" for j in range(manifold.ambient_dim)]


def _read_rows(text: str) -> tuple[list[str], list[list[str]]]:
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows:
        raise CsvFormatError("empty CSV: a header row is required")
    return rows[0], rows[1:]


def _parse_floats(cells: list[str], row: int) -> np.ndarray:
    values = np.empty(len(cells))
    for j, cell in enumerate(cells):
        try:
            values[j] = float(cell)
        except ValueError:
            raise CsvFormatError(f"column {j + 1} has non-numeric value {cell!r}", row) from None
    return values


def _parse_block(text: str, width: int, what: str) -> np.ndarray:
    header, rows = _read_rows(text)
    if len(header) != width:
        raise CsvFormatError(f"expected {width} columns ({what}), header has {len(header)}")
    if not rows:
        raise CsvFormatError("no data rows after the header")
    parsed = []
    for i, cells in enumerate(rows, start=1):
        if len(cells) != width:
            raise CsvFormatError(f"expected {width} columns, found {len(cells)}", i)
        parsed.append(_parse_floats(cells, i))
    return np.vstack(parsed)


def parse_csv_text(text: str, manifold: Manifold, p: int | None = None) -> Dataset:
    """Parse dataset CSV content. ``p`` defaults to whatever the header implies."""
    header, rows = _read_rows(text)
    k = manifold.ambient_dim
    if p is None:
        p = len(header) - 1 - k
        if p < 1:
            raise CsvFormatError(
                f"header has {len(header)} columns; need at least 1 response, "
                f"1 covariate and {k} coordinates"
            )
    width = 1 + p + k
    if len(header) != width:
        raise CsvFormatError(f"expected {width} columns (y, x1..x{p}, {k} coordinates), header has {len(header)}")
    if not rows:
        raise CsvFormatError("no data rows after the header")

    y = np.empty(len(rows))
    x = np.empty((len(rows), p))
    points = np.empty((len(rows), k))
    for i, cells in enumerate(rows, start=1):
        if len(cells) != width:
            raise CsvFormatError(f"expected {width} columns, found {len(cells)}", i)
        values = _parse_floats(cells, i)
        y[i - 1] = values[0]
        x[i - 1] = values[1 : 1 + p]
        try:
            points[i - 1] = manifold.validate_point(values[1 + p :])
        except InvalidPointError as err:
            raise CsvFormatError(str(err), i) from err
    return Dataset(y, x, points, manifold)


def ingest_csv(path, manifold: Manifold, p: int | None = None) -> Dataset:
    """Parse a dataset CSV file."""
    return parse_csv_text(Path(path).read_text(), manifold, p)


def parse_points_csv_text(text: str, manifold: Manifold) -> np.ndarray:
    """Parse a coordinates-only CSV (header plus one point per row)."""
    raw = _parse_block(text, manifold.ambient_dim, "coordinates")
    points = np.empty_like(raw)
    for i, row in enumerate(raw, start=1):
        try:
            points[i - 1] = manifold.validate_point(row)
        except InvalidPointError as err:
            raise CsvFormatError(str(err), i) from err
    return points


def parse_prediction_csv_text(text: str, manifold: Manifold, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Parse prediction-input CSV with columns x1..xp then coordinates."""
    k = manifold.ambient_dim
    raw = _parse_block(text, p + k, f"x1..x{p} and {k} coordinates")
    x = raw[:, :p]
    points = np.empty((raw.shape[0], k))
    for i, row in enumerate(raw[:, p:], start=1):
        try:
            points[i - 1] = manifold.validate_point(row)
        except InvalidPointError as err:
            raise CsvFormatError(str(err), i) from err
    return x, points


def dataset_to_csv(data: Dataset) -> str:
    """Serialize a dataset in the ingestion layout with round-trip floats."""
    header = ["y"] + [f"x{j + 1}" for j in range(data.p)] + coord_names(data.manifold)
    lines = [",".join(header)]
    for i in range(data.n):
        cells = [repr(float(data.y[i]))]
        cells += [repr(float(v)) for v in data.x[i]]
        cells += [repr(float(v)) for v in data.points[i]]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def emit_csv(data: Dataset, path) -> None:
    Path(path).write_text(dataset_to_csv(data))


def write_json(obj, path) -> None:
    """Write a JSON document with stable, human-readable formatting."""
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")
