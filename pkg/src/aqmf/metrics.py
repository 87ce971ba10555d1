"""Error metrics and small sample statistics."""

from __future__ import annotations

import numpy as np

from .types import FactorPair


def l1_error(reference: np.ndarray, factors: FactorPair) -> float:
    """Mean absolute deviation between the reference matrix and the factor
    product, averaged over every entry (missing or not)."""
    ref = np.asarray(reference, dtype=float)
    diff = ref - factors.product()
    return float(np.mean(np.abs(diff)))


def l2_error(reference: np.ndarray, factors: FactorPair) -> float:
    """Root mean squared deviation over every entry."""
    ref = np.asarray(reference, dtype=float)
    diff = ref - factors.product()
    return float(np.sqrt(np.mean(diff * diff)))


def sample_skewness(xs) -> float:
    """Standardized third central moment m3 / m2^(3/2) with biased moments."""
    arr = np.asarray(xs, dtype=float)
    if arr.ndim != 1 or arr.size < 3:
        raise ValueError("skewness needs a 1-d sample of at least 3 points")
    if not np.isfinite(arr).all():
        raise ValueError("sample must be finite")
    centered = arr - arr.mean()
    m2 = np.mean(centered**2)
    if m2 == 0.0:
        raise ValueError("skewness is undefined for a zero-variance sample")
    m3 = np.mean(centered**3)
    return float(m3 / m2**1.5)
