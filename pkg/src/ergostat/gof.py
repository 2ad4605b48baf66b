"""Goodness-of-fit test against a theoretically known process law.

The test rejects when the empirical distributional distance between
the sample and the law exceeds a threshold.  The idealized threshold
is the smallest radius whose complement has law-probability at most
``alpha``; that quantity is not computable in general, so calibration
draws ``n_cal`` fresh samples from the law and takes the conformal
order statistic of their distances.  Because a true-null test sample
is exchangeable with the calibration draws, the rejection probability
under the null stays below ``alpha`` (up to ties at the threshold;
the test is conservative, not randomized).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cylinder import Sample
from .distance import DistanceValue, WeightScheme, dhat_model, dhat_model_batch
from .errors import ConfigError
from .seeding import derive_seed

# Rows-times-columns budget for one batched calibration chunk.
_BATCH_BUDGET = 10_000_000


@dataclass(frozen=True)
class GofConfig:
    """Calibration parameters: level, sample length, draw count, seed, scheme."""

    alpha: float
    n: int
    n_cal: int
    seed: int
    scheme: WeightScheme = WeightScheme()

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ConfigError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.n < 1:
            raise ConfigError(f"sample length must be >= 1, got {self.n}")
        needed = math.ceil(1.0 / self.alpha)
        if self.n_cal < needed:
            raise ConfigError(
                f"n_cal={self.n_cal} is too small for alpha={self.alpha}; "
                f"need at least {needed} calibration draws"
            )


@dataclass(frozen=True)
class Calibration:
    """A calibrated threshold bound to the sample length it was built for."""

    gamma_hat: float
    n: int
    n_cal: int
    alpha: float
    distances: np.ndarray = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class GofOutcome:
    decision: str  # "accept_H0" | "reject_H0"
    statistic: DistanceValue
    gamma_hat: float
    n_cal_used: int

    @property
    def rejected(self) -> bool:
        return self.decision == "reject_H0"

    def to_dict(self) -> dict:
        return {
            "decision": self.decision,
            "statistic": self.statistic.to_dict(),
            "gamma_hat": self.gamma_hat,
            "n_cal_used": self.n_cal_used,
        }


def conformal_index(alpha: float, n_cal: int) -> int:
    """1-based order-statistic index ceil((1 - alpha) * (n_cal + 1))."""
    return math.ceil((1.0 - alpha) * (n_cal + 1))


def calibration_distances(model, cfg: GofConfig) -> np.ndarray:
    """Distances of ``n_cal`` fresh draws from the model to the model itself.

    Draw seeds derive deterministically from ``(cfg.seed, draw index)``.
    Batched evaluation; arithmetically identical to the scalar path.
    """
    chunk = max(1, _BATCH_BUDGET // max(cfg.n, 1))
    out = np.empty(cfg.n_cal)
    for start in range(0, cfg.n_cal, chunk):
        stop = min(start + chunk, cfg.n_cal)
        rows = np.empty((stop - start, cfg.n))
        for i in range(start, stop):
            s = model.sample(cfg.n, derive_seed(cfg.seed, "gof-cal", i))
            rows[i - start] = s.values
        out[start:stop] = dhat_model_batch(rows, model, cfg.scheme)
    return out


def calibrate_gamma(model, cfg: GofConfig) -> Calibration:
    """Monte Carlo surrogate for the exact critical radius.

    Returns the ``ceil((1 - alpha) * (n_cal + 1))``-th smallest
    calibration distance, packaged with the sample length it is valid
    for.
    """
    dists = calibration_distances(model, cfg)
    k = conformal_index(cfg.alpha, cfg.n_cal)
    gamma = float(np.sort(dists)[k - 1])
    return Calibration(gamma, cfg.n, cfg.n_cal, cfg.alpha, dists)


def gof_test(x: Sample, model, calibration, scheme: WeightScheme) -> GofOutcome:
    """Accept or reject the hypothesis that ``x`` was generated by ``model``.

    Rejects when the sample's distance to the law reaches the
    calibrated threshold.  ``calibration`` is normally a
    :class:`Calibration`, in which case a sample length differing from
    the calibrated length is an error (the threshold is
    length-specific); a bare float threshold skips that check.
    """
    if isinstance(calibration, Calibration):
        if len(x) != calibration.n:
            raise ConfigError(
                f"sample length {len(x)} does not match calibration length "
                f"{calibration.n}"
            )
        gamma = calibration.gamma_hat
        n_cal = calibration.n_cal
    else:
        gamma = float(calibration)
        n_cal = 0
    stat = dhat_model(x, model, scheme)
    decision = "reject_H0" if stat.value >= gamma else "accept_H0"
    return GofOutcome(decision, stat, gamma, n_cal)
