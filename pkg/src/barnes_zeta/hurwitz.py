"""Hurwitz zeta function by Euler-Maclaurin summation.

The Bernoulli correction runs through B_12. The shift ``M`` is chosen so
that ``(|s| + 12) / (M + a) <= 1/2``, which makes the standard remainder
bound

    |R| <= 4 |(s)_12| / (2 pi)^12 * (M + a)^(1 - sigma - 12) / (sigma + 11)

smaller than 1e-12 relative to the leading term throughout the region used
by this package.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .core import ComplexPoint, DomainError, POLE_RADIUS, PoleProximity

# B_2, B_4, ..., B_12
_BERNOULLI = [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
              Fraction(5, 66), Fraction(-691, 2730)]
DEPTH = len(_BERNOULLI)  # p: corrections B_2 .. B_2p
# B_2j / (2j)!
_BCOEF = [float(b / math.factorial(2 * j)) for j, b in enumerate(_BERNOULLI, start=1)]


def pochhammer(s: complex, k: int) -> complex:
    out = 1.0 + 0.0j
    for i in range(k):
        out *= s + i
    return out


def shift_for(s: complex, a) -> np.ndarray | int:
    """Smallest shift M >= 0 with (|s| + 2p) / (M + a) <= 1/2."""
    need = 2.0 * (abs(s) + 2 * DEPTH)
    m = np.maximum(0, np.ceil(need - np.asarray(a, dtype=float))).astype(np.int64)
    return m if m.ndim else int(m)


def remainder_bound(s: complex, base) -> np.ndarray:
    """Bound on the Euler-Maclaurin remainder after the B_2p term at ``base = M + a``."""
    sigma = s.real
    expo = sigma + 2 * DEPTH - 1
    if expo <= 0:
        raise DomainError("remainder bound requires sigma > 1 - 2p")
    k = 4.0 * abs(pochhammer(s, 2 * DEPTH)) / (2.0 * math.pi) ** (2 * DEPTH)
    return k * np.asarray(base, dtype=float) ** (-expo) / expo


def _tail_expansion(s: complex, base: np.ndarray) -> np.ndarray:
    """Integral, half-term and Bernoulli corrections at ``base`` (array)."""
    logb = np.log(base)
    out = np.exp((1.0 - s) * logb) / (s - 1.0) + 0.5 * np.exp(-s * logb)
    poch = s  # (s)_{2j-1}
    for j, c in enumerate(_BCOEF, start=1):
        out = out + c * poch * np.exp((-s - 2 * j + 1) * logb)
        poch *= (s + 2 * j - 1) * (s + 2 * j)
    return out


def hurwitz_zeta_many(s, a) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized zeta(s, a) over an array of shifts ``a``.

    Returns ``(values, error_bounds)``.
    """
    s = ComplexPoint.of(s).s
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if np.any(a <= 0):
        raise DomainError("Hurwitz zeta requires a > 0")
    if s.real <= -10:
        raise DomainError("Hurwitz zeta implemented for sigma > -10")
    if abs(s - 1.0) < POLE_RADIUS:
        raise PoleProximity(f"s={s} too close to the pole at 1")
    shifts = shift_for(s, a)
    mmax = int(shifts.max()) if shifts.size else 0
    values = np.zeros(a.shape, dtype=complex)
    abs_sum = np.zeros(a.shape)
    for k in range(mmax):
        active = shifts > k
        if not active.any():
            break
        lb = np.log(a[active] + k)
        term = np.exp(-s * lb)
        values[active] += term
        abs_sum[active] += np.abs(term)
    base = a + shifts
    tail = _tail_expansion(s, base)
    values = values + tail
    bound = remainder_bound(s, base)
    # summation rounding, generously counted
    bound = bound + 4.0 * np.finfo(float).eps * (abs_sum + np.abs(tail)) * (mmax + 8)
    return values, bound


def hurwitz_zeta(s, a: float) -> complex:
    """zeta(s, a) = sum_{n >= 0} (n + a)^(-s) for real ``a > 0``."""
    if a <= 0:
        raise DomainError("Hurwitz zeta requires a > 0")
    vals, _ = hurwitz_zeta_many(s, [a])
    return complex(vals[0])


def hurwitz_zeta_with_bound(s, a: float) -> tuple[complex, float]:
    vals, bnd = hurwitz_zeta_many(s, [a])
    return complex(vals[0]), float(bnd[0])
