"""Agreement metrics between analytic and simulated distributions.

Puts a number on "the curves match": worst absolute and relative bin
errors, total variation distance, and how many bins put the analytic
value outside a binomial confidence interval of the observed count.
Intervals use the Wilson score form so they stay honest at tiny counts.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

import numpy as np

from .analytics import Pmf
from .errors import OutOfRange, SupportMismatch

DEFAULT_CONFIDENCE = 0.99


@dataclass(frozen=True)
class ComparisonReport:
    """How far an empirical distribution sits from its analytic target.

    max_rel_error, floor_bins and floor_ci_violations are restricted to
    bins whose analytic mass reaches mass_floor; relative error and
    violation rates below that are sampling noise. ci_violations counts
    every compared bin.
    """

    max_abs_error: float
    max_rel_error: float
    total_variation: float
    bins_compared: int
    ci_violations: int
    floor_bins: int
    floor_ci_violations: int
    mass_floor: float
    confidence: float

    def __post_init__(self):
        for name in ("max_abs_error", "max_rel_error", "total_variation",
                     "bins_compared", "ci_violations", "floor_bins", "floor_ci_violations"):
            if getattr(self, name) < 0:
                raise OutOfRange(f"{name} must be non-negative")

    @property
    def floor_violation_rate(self) -> float:
        return self.floor_ci_violations / self.floor_bins if self.floor_bins else 0.0

    def to_dict(self) -> dict:
        return {
            "max_abs_error": self.max_abs_error,
            "max_rel_error": self.max_rel_error,
            "total_variation": self.total_variation,
            "bins_compared": self.bins_compared,
            "ci_violations": self.ci_violations,
            "floor_bins": self.floor_bins,
            "floor_ci_violations": self.floor_ci_violations,
            "floor_violation_rate": self.floor_violation_rate,
            "mass_floor": self.mass_floor,
            "confidence": self.confidence,
        }


def _z_value(confidence: float) -> float:
    if not 0.0 < confidence < 1.0:
        raise OutOfRange(f"confidence must lie in (0, 1), got {confidence}")
    return statistics.NormalDist().inv_cdf(0.5 + confidence / 2.0)


def wilson_bounds(counts, trials: int, confidence: float = DEFAULT_CONFIDENCE):
    """Vectorized Wilson score interval; returns (low, high) arrays."""
    counts = np.asarray(counts, dtype=float)
    if trials <= 0:
        raise OutOfRange(f"trials must be positive, got {trials}")
    if (counts < 0).any() or (counts > trials).any():
        raise OutOfRange("counts must lie in [0, trials]")
    z = _z_value(confidence)
    n = float(trials)
    phat = counts / n
    z2 = z * z
    denominator = 1.0 + z2 / n
    center = (phat + z2 / (2.0 * n)) / denominator
    half = z * np.sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denominator
    return np.maximum(center - half, 0.0), np.minimum(center + half, 1.0)


def wilson_interval(count: int, trials: int, confidence: float = DEFAULT_CONFIDENCE) -> tuple[float, float]:
    """Scalar Wilson score interval for count successes out of trials."""
    low, high = wilson_bounds(np.array([count]), trials, confidence)
    return float(low[0]), float(high[0])


def _padded(values: np.ndarray, width: int) -> np.ndarray:
    out = np.zeros(width, dtype=float)
    out[:len(values)] = values
    return out


def _report(analytic: np.ndarray, empirical: np.ndarray, counts: np.ndarray, trials: int,
            mass_floor: float | None, confidence: float,
            analytic_tail: float, empirical_tail: float) -> ComparisonReport:
    if mass_floor is None:
        mass_floor = 10.0 / trials
    if not mass_floor > 0.0:
        raise OutOfRange(f"mass_floor must be positive, got {mass_floor}")
    difference = np.abs(analytic - empirical)
    floor_mask = analytic >= mass_floor
    max_rel = float((difference[floor_mask] / analytic[floor_mask]).max()) if floor_mask.any() else 0.0
    low, high = wilson_bounds(counts, trials, confidence)
    violations = (analytic < low) | (analytic > high)
    return ComparisonReport(
        max_abs_error=float(difference.max()),
        max_rel_error=max_rel,
        total_variation=0.5 * (float(difference.sum()) + analytic_tail + empirical_tail),
        bins_compared=int(len(analytic)),
        ci_violations=int(violations.sum()),
        floor_bins=int(floor_mask.sum()),
        floor_ci_violations=int((violations & floor_mask).sum()),
        mass_floor=float(mass_floor),
        confidence=confidence,
    )


def compare_pmf(analytic: Pmf, empirical: Pmf, trials: int | None = None,
                mass_floor: float | None = None,
                confidence: float = DEFAULT_CONFIDENCE) -> ComparisonReport:
    """Compare two pmfs bin by bin over the union of their supports.

    trials defaults to the empirical episode total; it is the binomial n
    behind each bin's confidence interval. mass_floor defaults to
    10/trials.
    """
    if analytic.support_start != empirical.support_start:
        raise SupportMismatch(f"supports start at {analytic.support_start} and "
                              f"{empirical.support_start}")
    if trials is None:
        trials = empirical.total
    if trials is None:
        raise OutOfRange("trials is required when the empirical pmf carries no counts")
    width = max(len(analytic), len(empirical))
    a = _padded(analytic.masses, width)
    e = _padded(empirical.masses, width)
    if empirical.counts is not None:
        counts = _padded(empirical.counts, width)
    else:
        counts = np.rint(e * trials)
    return _report(a, e, counts, trials, mass_floor, confidence,
                   analytic.tail_mass, empirical.tail_mass)


def compare_curve(analytic, counts, trials: int, mass_floor: float | None = None,
                  confidence: float = DEFAULT_CONFIDENCE) -> ComparisonReport:
    """Compare aligned per-index probabilities against success counts.

    Same metrics as compare_pmf over value arrays that are not a
    distribution; total_variation is then just half the summed absolute
    difference.
    """
    analytic = np.asarray(analytic, dtype=float)
    counts = np.asarray(counts)
    if analytic.shape != counts.shape:
        raise SupportMismatch(f"analytic has {analytic.shape} values but counts has {counts.shape}")
    return _report(analytic, counts / trials, counts, trials, mass_floor, confidence, 0.0, 0.0)


def compare_scalar(analytic: float, empirical_mean: float, empirical_stderr: float) -> float:
    """Standardized gap (empirical - analytic) / stderr."""
    if not empirical_stderr > 0.0:
        raise OutOfRange(f"empirical_stderr must be positive, got {empirical_stderr}")
    return (empirical_mean - analytic) / empirical_stderr


def empirical_mean(pmf: Pmf, dt: float) -> tuple[float, float]:
    """Sample mean of an episode-length pmf in seconds, with its standard error."""
    if pmf.counts is None or pmf.total is None:
        raise OutOfRange("empirical_mean needs a pmf with episode counts")
    if not dt > 0.0:
        raise OutOfRange(f"dt must be positive, got {dt}")
    steps = pmf.support.astype(float)
    counts = pmf.counts.astype(float)
    total = float(pmf.total)
    mean_steps = float((steps * counts).sum() / total)
    var_steps = float((steps * steps * counts).sum() / total - mean_steps * mean_steps)
    stderr_steps = math.sqrt(max(var_steps, 0.0) / total)
    return mean_steps * dt, stderr_steps * dt
