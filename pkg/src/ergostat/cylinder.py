"""Dyadic cylinder sets and sliding-window frequencies.

A cylinder constrains a block of consecutive coordinates to intervals.
We organise cylinders into partition levels: at level ``(m, l)`` the
cells are products of ``m`` half-open dyadic intervals
``[j * 2**-l, (j + 1) * 2**-l)``, so the cells of one level tile
``R**m`` exactly and every finite real window lands in exactly one
cell.  Frequencies of those cells over the sliding windows of a sample
are the raw material for every statistic in this package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import ConfigError

# Largest magnitude allowed for a scaled coordinate value * 2**l.  Keeps
# cell coordinates comfortably inside int64.
_COORD_LIMIT = float(2**62)

CellIndex = tuple  # coordinates of one dyadic cell, one int per window slot


class Sample:
    """An immutable finite real-valued series.

    Parameters
    ----------
    values : array-like of float
        The series; every element must be finite.
    """

    __slots__ = ("_values",)

    def __init__(self, values):
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"sample must be one-dimensional, got shape {arr.shape}")
        if arr.size and not np.isfinite(arr).all():
            raise ValueError("sample contains non-finite values")
        arr = arr.copy()
        arr.setflags(write=False)
        self._values = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "Sample":
        # Internal fast path for already-validated float64 data (slices of
        # an existing sample); skips the finiteness re-scan.
        obj = cls.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.float64)
        arr.setflags(write=False)
        obj._values = arr
        return obj

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __len__(self) -> int:
        return self._values.size

    def prefix(self, t: int) -> "Sample":
        """First ``t`` elements."""
        return Sample._wrap(self._values[:t])

    def suffix(self, t: int) -> "Sample":
        """Elements after position ``t`` (0-based split point)."""
        return Sample._wrap(self._values[t:])

    def __repr__(self) -> str:
        return f"Sample(n={len(self)})"


@dataclass(frozen=True)
class Interval:
    """One interval with open/closed flags per endpoint."""

    lower: float
    upper: float
    closed_lower: bool = True
    closed_upper: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise ValueError("interval endpoints must be finite")
        if self.lower > self.upper:
            raise ValueError(f"empty interval: [{self.lower}, {self.upper}]")
        if self.lower == self.upper and not (self.closed_lower and self.closed_upper):
            raise ValueError("degenerate interval must be closed on both ends")

    def contains(self, x: float) -> bool:
        lo_ok = x >= self.lower if self.closed_lower else x > self.lower
        hi_ok = x <= self.upper if self.closed_upper else x < self.upper
        return lo_ok and hi_ok


@dataclass(frozen=True)
class Cylinder:
    """A product of intervals constraining ``m`` consecutive coordinates."""

    intervals: tuple

    def __init__(self, intervals: Iterable[Interval]):
        ivs = tuple(intervals)
        if not ivs:
            raise ValueError("cylinder needs at least one interval")
        if not all(isinstance(iv, Interval) for iv in ivs):
            raise TypeError("cylinder intervals must be Interval instances")
        object.__setattr__(self, "intervals", ivs)

    @property
    def m(self) -> int:
        return len(self.intervals)

    @classmethod
    def closed_box(cls, bounds: Iterable[tuple]) -> "Cylinder":
        """Product of closed intervals given as (lower, upper) pairs."""
        return cls(Interval(lo, hi, True, True) for lo, hi in bounds)


@dataclass(frozen=True)
class PartitionLevel:
    """One dyadic partition level: window length ``m``, resolution ``l``.

    Cells are products of ``m`` half-open intervals of width ``2**-l``
    aligned to the origin; a cell is identified by its integer
    coordinate tuple.
    """

    m: int
    l: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"window length m must be >= 1, got {self.m}")
        if self.l < 0:
            raise ValueError(f"resolution level l must be >= 0, got {self.l}")

    @property
    def cell_width(self) -> float:
        return 2.0 ** (-self.l)

    def cell_cylinder(self, coords: CellIndex) -> Cylinder:
        """The half-open cylinder of the cell with the given coordinates."""
        if len(coords) != self.m:
            raise ValueError(f"expected {self.m} coordinates, got {len(coords)}")
        w = self.cell_width
        return Cylinder(
            Interval(j * w, (j + 1) * w, True, False) for j in coords
        )


@dataclass(frozen=True)
class FreqTable:
    """Sparse sliding-window cell counts of one sample at one level.

    ``counts`` maps occupied cell coordinates to positive counts; the
    denominator is the number of windows, ``n - m + 1`` (0 when the
    sample is shorter than the window).
    """

    level: PartitionLevel
    counts: Mapping[CellIndex, int]
    denominator: int
    _skip_check: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if self._skip_check:
            return
        if self.denominator < 0:
            raise ValueError("denominator must be >= 0")
        if self.denominator == 0:
            if self.counts:
                raise ValueError("empty table must have no counts")
            return
        total = 0
        for coords, c in self.counts.items():
            if len(coords) != self.level.m:
                raise ValueError("cell coordinate arity does not match level")
            if c < 1:
                raise ValueError("materialized counts must be >= 1")
            total += c
        if total != self.denominator:
            raise ValueError(
                f"counts sum to {total}, expected denominator {self.denominator}"
            )

    @property
    def is_empty(self) -> bool:
        return self.denominator == 0

    def freq(self, coords: CellIndex) -> float:
        """Empirical frequency of one cell (0 for absent cells)."""
        if self.denominator == 0:
            return 0.0
        return self.counts.get(tuple(coords), 0) / self.denominator


def cell_of(x: float, l: int) -> int:
    """Dyadic cell coordinate of ``x`` at resolution ``l``.

    Returns the integer ``j`` with ``x`` in ``[j * 2**-l, (j+1) * 2**-l)``.
    Multiplying by a power of two is exact in binary floating point, so
    the mapping is free of rounding artefacts.
    """
    if not np.isfinite(x):
        raise ValueError(f"cannot assign a cell to non-finite value {x!r}")
    if l < 0:
        raise ValueError(f"resolution level must be >= 0, got {l}")
    scaled = float(x) * (2.0**l)
    if abs(scaled) >= _COORD_LIMIT:
        raise ConfigError(
            f"value {x} at resolution {l} exceeds the supported coordinate range"
        )
    return int(np.floor(scaled))


def scaled_coords(values: np.ndarray, l: int) -> np.ndarray:
    """Vectorized ``cell_of`` over an array; returns int64 coordinates."""
    scaled = values * (2.0**l)
    if scaled.size and np.abs(scaled).max() >= _COORD_LIMIT:
        raise ConfigError(
            f"data at resolution {l} exceeds the supported coordinate range"
        )
    return np.floor(scaled).astype(np.int64)


def freq_table(x: Sample, m: int, l: int) -> FreqTable:
    """Sliding-window cell counts of ``x`` at level ``(m, l)``.

    Counts every one of the ``n - m + 1`` consecutive length-``m``
    windows; a sample shorter than ``m`` yields the empty table with
    denominator 0.
    """
    level = PartitionLevel(m, l)
    n = len(x)
    nw = n - m + 1
    if nw <= 0:
        return FreqTable(level, {}, 0, _skip_check=True)
    coords = scaled_coords(x.values, l)
    if m == 1:
        uniq, cnt = np.unique(coords, return_counts=True)
        counts = {(int(v),): int(c) for v, c in zip(uniq, cnt)}
    else:
        windows = np.lib.stride_tricks.sliding_window_view(coords, m)
        uniq, cnt = np.unique(windows, axis=0, return_counts=True)
        counts = {tuple(int(v) for v in row): int(c) for row, c in zip(uniq, cnt)}
    return FreqTable(level, counts, nw, _skip_check=True)


def nu(x: Sample, b: Cylinder) -> float:
    """Fraction of sliding windows of ``x`` that fall inside cylinder ``b``.

    Honors each interval's open/closed endpoint flags; returns 0 when
    the sample is shorter than the cylinder.
    """
    m = b.m
    n = len(x)
    nw = n - m + 1
    if nw <= 0:
        return 0.0
    vals = x.values
    inside = np.ones(nw, dtype=bool)
    for j, iv in enumerate(b.intervals):
        col = vals[j : j + nw]
        lo = col >= iv.lower if iv.closed_lower else col > iv.lower
        hi = col <= iv.upper if iv.closed_upper else col < iv.upper
        inside &= lo & hi
    return int(inside.sum()) / nw
