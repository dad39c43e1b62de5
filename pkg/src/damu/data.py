"""Loading of the shipped ITU coefficient tables.

Tables are read once, validated row by row and cached as read-only numpy
arrays, so they can be shared freely between threads. ``DAMU_DATA_DIR``
points the loader at an alternative directory with the same file names.
"""
from __future__ import annotations

import csv
import hashlib
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import DataFileError

OXYGEN_FILE = "p676_oxygen_lines.csv"
WATER_FILE = "p676_water_lines.csv"
RAIN_FILE = "p838_rain_coeffs.csv"
CHECKSUM_FILE = "SHA256SUMS"

OXYGEN_COLUMNS = ("f0_GHz", "a1", "a2", "a3", "a4", "a5", "a6")
WATER_COLUMNS = ("f0_GHz", "b1", "b2", "b3", "b4", "b5", "b6")
RAIN_COLUMNS = ("f_GHz", "kH", "alphaH", "kV", "alphaV")


def data_dir() -> Path:
    override = os.environ.get("DAMU_DATA_DIR")
    if override:
        return Path(override)
    return Path(__file__).with_name("data")


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def recorded_checksums(directory: Path) -> dict[str, str]:
    sums = {}
    path = directory / CHECKSUM_FILE
    if not path.exists():
        return sums
    for line in path.read_text().splitlines():
        if line.strip():
            digest, name = line.split()
            sums[name.lstrip("*")] = digest
    return sums


def read_table(path: Path, columns: tuple[str, ...]) -> np.ndarray:
    """Parse a numeric CSV with an exact header; reject malformed rows."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataFileError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != columns:
            raise DataFileError(f"{path.name}: expected header {','.join(columns)}, got {header}")
        rows = []
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(columns):
                raise DataFileError(f"{path.name}:{lineno}: expected {len(columns)} fields, got {len(row)}")
            try:
                values = [float(c) for c in row]
            except ValueError as exc:
                raise DataFileError(f"{path.name}:{lineno}: {exc}") from exc
            if not all(math.isfinite(v) for v in values):
                raise DataFileError(f"{path.name}:{lineno}: non-finite value")
            rows.append(values)
    if not rows:
        raise DataFileError(f"{path.name}: no data rows")
    table = np.array(rows, dtype=float)
    if np.any(np.diff(table[:, 0]) <= 0):
        raise DataFileError(f"{path.name}: frequencies must be strictly increasing")
    table.setflags(write=False)
    return table


def _load(directory: Path, name: str, columns: tuple[str, ...]) -> np.ndarray:
    path = directory / name
    expected = recorded_checksums(directory).get(name)
    if expected is not None and path.exists() and sha256(path) != expected:
        raise DataFileError(f"{name}: checksum mismatch with {CHECKSUM_FILE}")
    return read_table(path, columns)


@dataclass(frozen=True)
class LineTable:
    """Spectroscopic line list: centre frequencies plus six shape coefficients."""

    f0: np.ndarray
    c: np.ndarray  # shape (6, n_lines)

    @classmethod
    def from_array(cls, table: np.ndarray) -> "LineTable":
        c = np.ascontiguousarray(table[:, 1:].T)
        c.setflags(write=False)
        f0 = np.ascontiguousarray(table[:, 0])
        f0.setflags(write=False)
        return cls(f0, c)

    def __len__(self):
        return len(self.f0)


@lru_cache(maxsize=None)
def _oxygen_lines(directory: str) -> LineTable:
    return LineTable.from_array(_load(Path(directory), OXYGEN_FILE, OXYGEN_COLUMNS))


@lru_cache(maxsize=None)
def _water_lines(directory: str) -> LineTable:
    return LineTable.from_array(_load(Path(directory), WATER_FILE, WATER_COLUMNS))


@lru_cache(maxsize=None)
def _rain_table(directory: str) -> np.ndarray:
    return _load(Path(directory), RAIN_FILE, RAIN_COLUMNS)


# the cache key includes the directory so that changing DAMU_DATA_DIR
# between calls picks up the other tables
def oxygen_lines() -> LineTable:
    return _oxygen_lines(str(data_dir()))


def water_lines() -> LineTable:
    return _water_lines(str(data_dir()))


def rain_table() -> np.ndarray:
    """P.838 table, columns ``f_GHz, kH, alphaH, kV, alphaV``."""
    return _rain_table(str(data_dir()))
