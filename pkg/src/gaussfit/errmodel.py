"""First-order relative-error prediction for the area-based width estimate."""

from __future__ import annotations

import math
from dataclasses import dataclass

K1_DEFAULT = 2.0  # ~95.5% two-sided interval of the summed noise
K2_DEFAULT = 3.0  # worst-case excursion of the peak sample


@dataclass(frozen=True)
class ErrorBreakdown:
    alpha_numerator: float
    alpha_denominator: float
    alpha_total: float
    k1: float
    k2: float


def predict_relative_error(snr, width_ratio, n, k1=K1_DEFAULT, k2=K2_DEFAULT) -> ErrorBreakdown:
    """Predicted relative error of the width estimate.

    The numerator term comes from the noise summed into the rectangle area,
    ``k1 * W / (snr * sqrt(2 pi N))``; the denominator term from the noise on
    the largest sample, ``k2 / snr``.  The total is their sum.  ``snr`` may be
    ``inf`` (noiseless), which gives zero everywhere.
    """
    for name, value in (("snr", snr), ("width_ratio", width_ratio), ("n", n), ("k1", k1), ("k2", k2)):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value!r}")
    alpha_n = k1 * width_ratio / (snr * math.sqrt(2.0 * math.pi * n))
    alpha_d = k2 / snr
    return ErrorBreakdown(alpha_n, alpha_d, alpha_n + alpha_d, float(k1), float(k2))
