"""Three-sample classification: does Z follow the law of X or of Y?

Picks whichever reference sample is closer to Z in empirical
distributional distance, with ties going to X.  The outcome also
reports whether the order of the two distances is certified against
truncation error, which callers may treat as a confidence flag.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cylinder import Sample
from .distance import (
    Comparison,
    DistanceValue,
    WeightScheme,
    compare_certified,
    dhat,
)


@dataclass(frozen=True)
class ClassificationOutcome:
    label: int  # 1: Z matches X; 2: Z matches Y
    d_xz: DistanceValue
    d_yz: DistanceValue
    certified: bool

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "d_xz": self.d_xz.to_dict(),
            "d_yz": self.d_yz.to_dict(),
            "certified": self.certified,
        }


def classify(x: Sample, y: Sample, z: Sample,
             scheme: WeightScheme) -> ClassificationOutcome:
    """Label 1 when ``dhat(X, Z) <= dhat(Y, Z)``, else 2."""
    d_xz = dhat(x, z, scheme)
    d_yz = dhat(y, z, scheme)
    label = 1 if d_xz.value <= d_yz.value else 2
    certified = compare_certified(d_xz, d_yz) is not Comparison.UNDECIDED
    return ClassificationOutcome(label, d_xz, d_yz, certified)
