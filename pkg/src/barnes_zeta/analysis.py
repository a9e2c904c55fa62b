"""Remainder-exponent regression and theorem verdicts."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import InsufficientSignal, RegionError, RegionTag, classify_region
from .meansquare import MeanSquareCurve

NOISE_FACTOR = 10.0
DEFAULT_SLACK = 0.25


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    rms_residual: float
    n_points: int
    log_corrected: bool

    def __post_init__(self):
        if self.n_points < 4:
            raise ValueError("an exponent fit needs at least 4 points")
        if not self.rms_residual >= 0:
            raise ValueError("rms_residual must be non-negative")


@dataclass(frozen=True)
class TheoremVerdict:
    region: RegionTag
    predicted_exponent: float
    observed: ExponentFit
    passed: bool
    slack: float
    sigma: float
    grid_size: int

    def to_dict(self, config_hash: str = "") -> dict:
        return {
            "sigma": self.sigma,
            "region": self.region.value,
            "predicted_exponent": self.predicted_exponent,
            "slope": self.observed.slope,
            "rms_residual": self.observed.rms_residual,
            "pass": self.passed,
            "slack": self.slack,
            "grid_size": self.grid_size,
            "config_hash": config_hash,
        }

    def to_json(self, config_hash: str = "") -> str:
        return json.dumps(self.to_dict(config_hash), indent=2)


def fit_power_law(T, R, divide_log: bool = False) -> ExponentFit:
    """Least squares of log|R| (optionally log(|R|/log T)) against log T."""
    T = np.asarray(T, dtype=float)
    R = np.abs(np.asarray(R, dtype=float))
    if T.size < 4:
        raise InsufficientSignal(f"need >= 4 usable points, have {T.size}")
    y = np.log(R / np.log(T)) if divide_log else np.log(R)
    x = np.log(T)
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    rms = float(math.sqrt(np.mean(resid ** 2)))
    return ExponentFit(float(slope), float(intercept), rms, int(T.size), divide_log)


def fit_exponent(curve: MeanSquareCurve, divide_log: bool) -> ExponentFit:
    """Fit the growth exponent of |R(T)| on points clear of quadrature noise."""
    T, R, qe = curve.T, curve.R, curve.quad_err
    keep = (np.abs(R) > NOISE_FACTOR * qe) & (T > 1.0) & (R != 0)
    if keep.sum() < 4:
        raise InsufficientSignal(
            f"only {int(keep.sum())} grid points have |R| > {NOISE_FACTOR:g} * quad_err")
    return fit_power_law(T[keep], R[keep], divide_log)


def predicted_exponent(sigma: float) -> tuple[float, bool]:
    """(exponent, log factor present) for the remainder at this sigma."""
    region = classify_region(sigma)
    if region is RegionTag.Theorem1:
        return 0.0, False
    if region is RegionTag.Theorem2:
        if sigma <= 1.75:
            return 4.0 - 2.0 * sigma, True
        return 0.5, False
    raise RegionError(f"no mean-square prediction at sigma={sigma}")


def verdict(curve: MeanSquareCurve, slack: float = DEFAULT_SLACK) -> TheoremVerdict:
    region = classify_region(curve.sigma)
    predicted, with_log = predicted_exponent(curve.sigma)
    fit = fit_exponent(curve, divide_log=with_log)
    if region is RegionTag.Theorem1:
        # bounded remainder: no growth past the first half of the grid
        absR = np.abs(curve.R)
        half = max(1, math.ceil(absR.size / 2))
        passed = bool(absR.max() <= (1.0 + slack) * absR[:half].max())
    else:
        passed = bool(fit.slope <= predicted + slack)
    return TheoremVerdict(region, predicted, fit, passed, slack, curve.sigma, len(curve.grid))
