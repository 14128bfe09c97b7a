"""Built-in data: the 21-point Canadian CPI series, its windows, and small
contrived sets, plus CSV loading."""

from __future__ import annotations

import csv
import io
import os
import re
from typing import Iterator

import numpy as np

from .core import DataSet
from .errors import EmptyFile, NonPositiveWeight, OutOfRange, ParseError, UnknownFixture

# Annual CPI for Canada, t = 1 (1995) .. 21 (2015), base 100 in 2002.
CPI_D = (
    87.6, 88.9, 90.4, 91.3, 92.9, 95.4, 97.8, 100.0, 102.8, 104.7, 107.0,
    109.1, 111.5, 114.1, 114.4, 116.5, 119.9, 121.7, 122.8, 125.2, 126.6,
)
CPI_T = tuple(range(1, 22))

_FIXTURES = {
    "four_point": ((1, 0), (2, 1), (3, 1), (4, 0)),
    "four_point_perturbed": ((1, 2), (2, 3), (3, 6), (4, 4)),
    "five_point": ((1, 1), (2, 1), (3, 2), (4, 3), (5, 2)),
    "nine_point_erratic": (
        (4, 291.3), (5, -107.1), (6, -104.6), (7, 97.8), (8, -100),
        (9, 302.8), (10, 104.7), (11, 307), (12, -90.9),
    ),
}

_WINDOW = re.compile(r"^L(\d+)S(\d+)$", re.IGNORECASE)


def cpi_table() -> DataSet:
    return DataSet(CPI_T, CPI_D, name="CPI")


def cpi_window(length: int, start: int) -> DataSet:
    """Contiguous CPI slice of ``length`` points beginning at t = ``start``."""
    if not (4 <= length <= 21) or start < 1 or start + length - 1 > 21:
        raise OutOfRange(f"no CPI window L{length}S{start}")
    sl = slice(start - 1, start - 1 + length)
    return DataSet(CPI_T[sl], CPI_D[sl], name=f"L{length}S{start}")


def parse_window(name: str) -> tuple[int, int]:
    m = _WINDOW.match(name.strip())
    if not m:
        raise OutOfRange(f"not a window name: {name!r}")
    return int(m.group(1)), int(m.group(2))


def window(name: str) -> DataSet:
    return cpi_window(*parse_window(name))


def iter_cpi_windows() -> Iterator[DataSet]:
    for length in range(4, 22):
        for start in range(1, 23 - length):
            yield cpi_window(length, start)


def all_cpi_windows() -> list[DataSet]:
    """All 171 windows, length-major then start."""
    return list(iter_cpi_windows())


def fixture_names() -> list[str]:
    return list(_FIXTURES)


def fixture(name: str) -> DataSet:
    try:
        pts = _FIXTURES[name]
    except KeyError:
        raise UnknownFixture(f"unknown fixture {name!r}; choose from {', '.join(_FIXTURES)}") from None
    return DataSet.from_points(pts, name=name)


def fixtures() -> dict[str, DataSet]:
    return {name: fixture(name) for name in _FIXTURES}


def _parse_float(text: str, line_no: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"not a number: {text.strip()!r}", line_no) from None


def loads_csv(text: str, name: str = "") -> DataSet:
    """Parse ``t,d[,w]`` rows; a first line with a non-numeric first field is a header."""
    ts, ds, ws = [], [], []
    first = True
    for line_no, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not f.strip() for f in row):
            continue
        if first:
            first = False
            try:
                float(row[0])
            except ValueError:
                continue  # header
        if len(row) not in (2, 3):
            raise ParseError(f"expected 2 or 3 fields, got {len(row)}", line_no)
        t = _parse_float(row[0], line_no)
        d = _parse_float(row[1], line_no)
        w = _parse_float(row[2], line_no) if len(row) == 3 else 1.0
        if not (np.isfinite(t) and np.isfinite(d) and np.isfinite(w)):
            raise ParseError("non-finite value", line_no)
        if w <= 0:
            raise NonPositiveWeight(f"weight must be positive, got {w}", line_no)
        ts.append(t), ds.append(d), ws.append(w)
    if not ts:
        raise EmptyFile("no data rows")
    return DataSet(ts, ds, ws, name=name)


def load_csv(source) -> DataSet:
    """Load from a path or an open text stream (UTF-8)."""
    if hasattr(source, "read"):
        return loads_csv(source.read(), name=getattr(source, "name", ""))
    with open(source, encoding="utf-8") as fh:
        return loads_csv(fh.read(), name=os.path.basename(str(source)))


def dumps_csv(ds: DataSet, weights: bool = True) -> str:
    out = io.StringIO()
    for t, d, w in zip(ds.t, ds.d, ds.w):
        fields = [f"{t:.12g}", f"{d:.12g}"] + ([f"{w:.12g}"] if weights else [])
        out.write(",".join(fields) + "\n")
    return out.getvalue()
