"""Empirical distributional distance between samples and process laws.

The distance is a weighted sum, over the dyadic partition levels
``(m, l)``, of the L1 difference between sliding-window cell
frequencies.  Truncation at ``(m_max, l_max)`` is certified: every
distance carries a bound on the mass of the omitted levels, so
comparisons can be declared safe or undecided.

Per-level statistics are evaluated as an exact integer numerator over
the product of the two denominators, rounded once.  That makes the
value independent of summation order and reproducible bit-for-bit
across the pure-Python and compiled scan kernels.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cylinder import FreqTable, PartitionLevel, Sample, freq_table, scaled_coords
from .errors import CapabilityError, ConfigError

# Denominator products must stay exactly convertible to double for the
# single-rounding guarantee; caps the window count per side at 2**26.
MAX_WINDOWS = 1 << 26


@dataclass(frozen=True)
class WeightScheme:
    """Truncated level weighting ``w(m, l) = 2**-(m + l)``.

    ``tail_bound`` is twice the total weight of all omitted levels, an
    upper bound on how much any truncated distance can grow if the
    scheme is deepened (each level statistic is at most 2).
    """

    m_max: int = 3
    l_max: int = 8

    def __post_init__(self):
        if self.m_max < 1:
            raise ConfigError(f"m_max must be >= 1, got {self.m_max}")
        if self.l_max < 0:
            raise ConfigError(f"l_max must be >= 0, got {self.l_max}")

    def weight(self, m: int, l: int) -> float:
        return 2.0 ** -(m + l)

    def levels(self):
        """Yield ``(m, l, weight)`` in the canonical summation order."""
        for m in range(1, self.m_max + 1):
            for l in range(self.l_max + 1):
                yield m, l, self.weight(m, l)

    @property
    def included_weight(self) -> float:
        inc = (1 - Fraction(1, 2**self.m_max)) * (2 - Fraction(1, 2**self.l_max))
        return float(inc)

    @property
    def tail_bound(self) -> float:
        inc = (1 - Fraction(1, 2**self.m_max)) * (2 - Fraction(1, 2**self.l_max))
        return float(2 * (2 - inc))

    def deepened(self, dm: int = 1, dl: int = 4) -> "WeightScheme":
        """A finer scheme, the default refinement step for undecided comparisons."""
        return WeightScheme(self.m_max + dm, self.l_max + dl)


@dataclass(frozen=True)
class DistanceValue:
    """A truncated distance plus the certified truncation error bound.

    The untruncated distance lies in ``[value, value + tail_bound]``.
    """

    value: float
    tail_bound: float
    m_max: int
    l_max: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "tail_bound": self.tail_bound,
            "m_max": self.m_max,
            "l_max": self.l_max,
        }


class Comparison(enum.Enum):
    LESS = "less"
    GREATER = "greater"
    UNDECIDED = "undecided"


def _check_same_level(f: FreqTable, g: FreqTable):
    if f.level != g.level:
        raise ConfigError(f"mismatched levels: {f.level} vs {g.level}")


def level_tv(f: FreqTable, g: FreqTable) -> float:
    """L1 distance between the cell frequencies of two tables at one level.

    Computed as an exact integer numerator over the denominator product,
    rounded once.  An empty side (sample shorter than the window) counts
    as frequency zero everywhere, so one empty table gives exactly 1 and
    two empty tables give 0.
    """
    _check_same_level(f, g)
    if f.is_empty and g.is_empty:
        return 0.0
    if f.is_empty or g.is_empty:
        return 1.0
    df, dg = f.denominator, g.denominator
    num = 0
    fc, gc = f.counts, g.counts
    for c, cf in fc.items():
        num += abs(cf * dg - gc.get(c, 0) * df)
    for c, cg in gc.items():
        if c not in fc:
            num += cg * df
    return num / (df * dg)


def level_tv_vs_model(f: FreqTable, model) -> float:
    """L1 distance between a frequency table and a model's cell law.

    Sums ``|nu(c) - rho(c)|`` over the occupied cells and adds the
    model mass of all unoccupied cells, which is ``1 - sum(rho(c))``
    because the cells of a level tile the whole space.
    """
    if f.is_empty:
        return 1.0
    level = f.level
    denom = f.denominator
    diff_acc = 0.0
    mass_acc = 0.0
    for c in sorted(f.counts):
        p = model.cell_prob(level, c)
        diff_acc += abs(f.counts[c] / denom - p)
        mass_acc += p
    return max(0.0, diff_acc + (1.0 - mass_acc))


def dhat(x: Sample, y: Sample, scheme: WeightScheme) -> DistanceValue:
    """Empirical distributional distance between two samples."""
    if len(x) == 0 or len(y) == 0:
        raise ValueError("samples must be nonempty")
    value = 0.0
    for m, l, w in scheme.levels():
        value += w * level_tv(freq_table(x, m, l), freq_table(y, m, l))
    return DistanceValue(value, scheme.tail_bound, scheme.m_max, scheme.l_max)


def dhat_model(x: Sample, model, scheme: WeightScheme) -> DistanceValue:
    """Empirical distributional distance between a sample and a process law."""
    if len(x) == 0:
        raise ValueError("sample must be nonempty")
    value = 0.0
    for m, l, w in scheme.levels():
        value += w * level_tv_vs_model(freq_table(x, m, l), model)
    return DistanceValue(value, scheme.tail_bound, scheme.m_max, scheme.l_max)


def dhat_model_batch(batch: np.ndarray, model, scheme: WeightScheme) -> np.ndarray:
    """Distance values of many equal-length samples against one model.

    Vectorized across the batch but arithmetically identical to calling
    :func:`dhat_model` on each row: per cell, unoccupied rows receive
    exact zero contributions, so the accumulation sequence of every row
    matches the scalar path.

    Parameters
    ----------
    batch : ndarray, shape (b, n)
        One sample per row.
    """
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2:
        raise ValueError("batch must be a 2-d array of samples")
    b, n = batch.shape
    values = np.zeros(b)
    factorized = {}
    for l in range(scheme.l_max + 1):
        uniq, inv = np.unique(scaled_coords(batch.ravel(), l), return_inverse=True)
        factorized[l] = (uniq, inv.reshape(b, n).astype(np.int64, copy=False))
    for m, l, w in scheme.levels():
        nw = n - m + 1
        if nw <= 0:
            values += w * 1.0
            continue
        uniq, inv = factorized[l]
        k = uniq.size
        if m == 1:
            wcodes = inv
            cell_rows = uniq.reshape(-1, 1)
            kw = k
        else:
            if k**m >= np.iinfo(np.int64).max // 2:
                raise ConfigError("alphabet too rich for batched window coding")
            codes = np.zeros((b, nw), dtype=np.int64)
            for j in range(m):
                codes = codes * k + inv[:, j : j + nw]
            if k**m <= 4096:
                # dense coding: phantom cells never occur, contribute
                # exact zeros, and keep the cell order lexicographic
                kw = k**m
                wcodes = codes
                wuniq = np.arange(kw, dtype=np.int64)
            else:
                wuniq, winv = np.unique(codes, return_inverse=True)
                wcodes = winv.reshape(b, nw)
                kw = wuniq.size
            cell_rows = np.empty((kw, m), dtype=np.int64)
            rem = wuniq.copy()
            for j in range(m - 1, -1, -1):
                cell_rows[:, j] = uniq[rem % k]
                rem //= k
        level = PartitionLevel(m, l)
        probs = np.array(
            [model.cell_prob(level, tuple(int(v) for v in row)) for row in cell_rows]
        )
        flat = (np.arange(b, dtype=np.int64)[:, None] * kw + wcodes[:, :nw]).ravel()
        counts = np.bincount(flat, minlength=b * kw).reshape(b, kw)
        diff_acc = np.zeros(b)
        mass_acc = np.zeros(b)
        for c in range(kw):
            occupied = counts[:, c] > 0
            nu_c = counts[:, c] / nw
            diff_acc += np.where(occupied, np.abs(nu_c - probs[c]), 0.0)
            mass_acc += np.where(occupied, probs[c], 0.0)
        values += w * np.maximum(0.0, diff_acc + (1.0 - mass_acc))
    return values


def model_distance(model1, model2, scheme: WeightScheme) -> DistanceValue:
    """Exact truncated distance between two process laws.

    Requires both models to expose exact cell probabilities and a
    finite enumeration of their mass-bearing cells per level.
    """
    for mod in (model1, model2):
        if not (mod.exact_cell_prob and mod.enumerate_mass_cells):
            raise CapabilityError(
                f"model {mod!r} cannot enumerate exact cell probabilities"
            )
    value = 0.0
    for m, l, w in scheme.levels():
        level = PartitionLevel(m, l)
        cells = set(model1.mass_cells(level)) | set(model2.mass_cells(level))
        stat = 0.0
        for c in sorted(cells):
            stat += abs(model1.cell_prob(level, c) - model2.cell_prob(level, c))
        value += w * stat
    return DistanceValue(value, scheme.tail_bound, scheme.m_max, scheme.l_max)


def compare_certified(a: DistanceValue, b: DistanceValue) -> Comparison:
    """Order two truncated distances, certified against truncation error.

    LESS means the untruncated distance behind ``a`` is provably below
    the one behind ``b`` no matter how the omitted levels fall out;
    UNDECIDED means the truncation intervals overlap.
    """
    if (a.m_max, a.l_max) != (b.m_max, b.l_max):
        raise ConfigError(
            "cannot compare distances computed under different schemes: "
            f"({a.m_max},{a.l_max}) vs ({b.m_max},{b.l_max})"
        )
    if a.value + a.tail_bound < b.value:
        return Comparison.LESS
    if b.value + b.tail_bound < a.value:
        return Comparison.GREATER
    return Comparison.UNDECIDED
