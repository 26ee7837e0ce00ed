"""Sample paths on uniform grids and their CSV representation."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DomainError

_UNIFORM_RTOL = 1e-9


@dataclass(frozen=True)
class SamplePath:
    """Values observed at ``t_j = j * horizon / m`` for ``j = 0..m``.

    The grid is never stored explicitly; use :attr:`times` when needed.
    ``driver`` optionally carries the fBm path that generated the values.
    """

    horizon: float
    values: np.ndarray
    driver: Optional["SamplePath"] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise DomainError("a path needs a 1-D array of at least two values")
        if not self.horizon > 0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "horizon", float(self.horizon))

    @property
    def m(self) -> int:
        return self.values.size - 1

    @property
    def t0(self) -> float:
        return 0.0

    @property
    def step(self) -> float:
        return self.horizon / self.m

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.m + 1) * self.horizon / self.m

    def with_values(self, values) -> "SamplePath":
        return SamplePath(self.horizon, values)


def write_path_csv(path: SamplePath, out, include_driver: bool = False) -> None:
    """Write ``j,t,x`` rows (plus ``b`` for the driver) with 17 significant digits."""
    if include_driver and path.driver is None:
        raise DomainError("path has no driver attached")
    header = ["j", "t", "x"] + (["b"] if include_driver else [])
    close = False
    if isinstance(out, (str, Path)):
        out = open(out, "w", newline="")
        close = True
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        m = path.m
        for j in range(m + 1):
            row = [str(j), f"{j * path.horizon / m:.17g}", f"{path.values[j]:.17g}"]
            if include_driver:
                row.append(f"{path.driver.values[j]:.17g}")
            writer.writerow(row)
    finally:
        if close:
            out.close()


def read_path_csv(source) -> SamplePath:
    """Read a ``j,t,x`` CSV, rejecting non-uniform or non-zero-based grids."""
    close = False
    if isinstance(source, (str, Path)):
        source = open(source, newline="")
        close = True
    try:
        reader = csv.reader(source)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["j", "t", "x"]:
            raise DomainError("input CSV must start with header j,t,x")
        rows = [r for r in reader if r]
    finally:
        if close:
            source.close()
    if len(rows) < 2:
        raise DomainError("input CSV needs at least two grid points")
    try:
        j = np.array([int(r[0]) for r in rows])
        t = np.array([float(r[1]) for r in rows])
        x = np.array([float(r[2]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise DomainError(f"malformed CSV row: {exc}") from None
    m = len(rows) - 1
    if not np.array_equal(j, np.arange(m + 1)):
        raise DomainError("column j must enumerate 0..m")
    horizon = t[-1]
    if t[0] != 0.0 or not horizon > 0:
        raise DomainError("grid must start at t=0 and have positive horizon")
    expected = np.arange(m + 1) * horizon / m
    if np.max(np.abs(t - expected)) > _UNIFORM_RTOL * horizon:
        raise DomainError("time grid is not uniform within 1e-9 relative")
    if not np.all(np.isfinite(x)):
        raise DomainError("non-finite path value in input")
    return SamplePath(horizon, x)
