"""Shared domain types, validation and region classification.

Parameters are kept as exact ``Fraction`` values so that lattice values
``alpha + v*m + w*n`` can be grouped without floating-point equality tests.
Analytic evaluation happens in binary64.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational


class BarnesError(Exception):
    """Base class for all errors raised by this package."""


class NonPositiveParameter(BarnesError, ValueError):
    pass


class InvalidScale(BarnesError, ValueError):
    pass


class RegionError(BarnesError, ValueError):
    """The complex point lies outside the region where a method is valid."""


class PoleProximity(BarnesError, ValueError):
    pass


class DomainError(BarnesError, ValueError):
    pass


class HeightViolation(BarnesError, ValueError):
    """|t| exceeds the admissible height 2*pi*x/C for a truncation."""


class BudgetExceeded(BarnesError, RuntimeError):
    pass


class QuadratureFailure(BarnesError, RuntimeError):
    pass


class CutoffTooSmall(BarnesError, ValueError):
    pass


class InsufficientSignal(BarnesError, ValueError):
    pass


# Closed vocabulary of irrational multipliers accepted by the CLI.
IRRATIONAL_SCALES = {
    "sqrt2": math.sqrt(2.0),
    "sqrt3": math.sqrt(3.0),
    "sqrt5": math.sqrt(5.0),
    "golden": (1.0 + math.sqrt(5.0)) / 2.0,
    "pi": math.pi,
    "e": math.e,
}


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        if not math.isfinite(x):
            raise NonPositiveParameter(f"parameter must be finite, got {x!r}")
        # limit_denominator keeps 0.1 -> 1/10 instead of the binary expansion
        return Fraction(x).limit_denominator(10**12)
    raise TypeError(f"cannot interpret {x!r} as a rational number")


@dataclass(frozen=True)
class BarnesParams:
    """The triple (alpha, v, w) together with the ratio declaration.

    When ``ratio_irrational`` is set the effective second step is
    ``w * irrational_scale`` and ``p``/``q`` are ``None``.
    """

    alpha: Fraction
    v: Fraction
    w: Fraction
    ratio_irrational: bool = False
    irrational_scale: float | None = None
    p: int | None = None
    q: int | None = None

    @property
    def alpha_f(self) -> float:
        return float(self.alpha)

    @property
    def v_f(self) -> float:
        return float(self.v)

    @property
    def w_f(self) -> float:
        """Effective ``w`` as a float (scaled when the ratio is irrational)."""
        if self.ratio_irrational:
            return float(self.w) * self.irrational_scale
        return float(self.w)

    def swapped(self) -> "BarnesParams":
        """Return the parameters with v and w exchanged.

        Only defined for rational ratios; the irrational scale is attached to w.
        """
        if self.ratio_irrational:
            raise ValueError("swapping v and w is only defined for rational ratios")
        return validate_params(self.alpha, self.w, self.v)

    def scaled(self, c) -> "BarnesParams":
        c = _as_fraction(c)
        return validate_params(
            self.alpha * c,
            self.v * c,
            self.w * c,
            ratio_irrational=self.ratio_irrational,
            irrational_scale=self.irrational_scale,
        )

    def as_dict(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "v": str(self.v),
            "w": str(self.w),
            "ratio_irrational": self.ratio_irrational,
            "irrational_scale": self.irrational_scale,
            "p": self.p,
            "q": self.q,
        }


def validate_params(alpha, v=None, w=None, ratio_irrational: bool = False,
                    irrational_scale: float | None = None) -> BarnesParams:
    """Build a :class:`BarnesParams`, reducing ``v/w`` to lowest terms.

    Accepts ints, Fractions, decimal strings or floats. Passing an existing
    ``BarnesParams`` as ``alpha`` re-validates it (idempotent).
    """
    if isinstance(alpha, BarnesParams):
        bp = alpha
        return validate_params(bp.alpha, bp.v, bp.w, bp.ratio_irrational,
                               bp.irrational_scale)
    a, vv, ww = (_as_fraction(x) for x in (alpha, v, w))
    for name, val in (("alpha", a), ("v", vv), ("w", ww)):
        if val <= 0:
            raise NonPositiveParameter(f"{name} must be > 0, got {val}")
    if ratio_irrational:
        if irrational_scale is None:
            raise InvalidScale("irrational_scale is required when ratio_irrational is set")
        scale = float(irrational_scale)
        if not math.isfinite(scale) or scale <= 0:
            raise InvalidScale(f"irrational_scale must be a positive real, got {irrational_scale!r}")
        return BarnesParams(a, vv, ww, True, scale, None, None)
    if irrational_scale is not None and float(irrational_scale) != 1.0:
        raise InvalidScale("irrational_scale given without ratio_irrational")
    ratio = vv / ww
    return BarnesParams(a, vv, ww, False, None, ratio.numerator, ratio.denominator)


@dataclass(frozen=True)
class ComplexPoint:
    sigma: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and math.isfinite(self.t)):
            raise DomainError(f"non-finite complex point ({self.sigma}, {self.t})")

    @classmethod
    def of(cls, s) -> "ComplexPoint":
        if isinstance(s, ComplexPoint):
            return s
        z = complex(s)
        return cls(z.real, z.imag)

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.t)

    def conj(self) -> "ComplexPoint":
        return ComplexPoint(self.sigma, -self.t)


class RegionTag(enum.Enum):
    Theorem1 = "Theorem1"
    Theorem2 = "Theorem2"
    Theorem3Strip = "Theorem3Strip"
    OutOfScope = "OutOfScope"


def classify_region(sigma: float) -> RegionTag:
    if not math.isfinite(sigma):
        raise DomainError(f"sigma must be finite, got {sigma}")
    if sigma > 2:
        return RegionTag.Theorem1
    if sigma > 1.5:
        return RegionTag.Theorem2
    if sigma > 1:
        return RegionTag.Theorem3Strip
    return RegionTag.OutOfScope


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be strictly positive")


POLE_RADIUS = 1e-6


def check_poles(s: complex, poles=(1.0, 2.0)) -> None:
    for p in poles:
        if abs(s - p) < POLE_RADIUS:
            raise PoleProximity(f"s={s} is within {POLE_RADIUS} of the pole at {p}")
