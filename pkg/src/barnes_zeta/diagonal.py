"""The diagonal series zeta_2^[2](sigma, sigma, alpha; v, w).

For an irrational ratio v/w every lattice value has multiplicity one and the
diagonal series collapses to zeta_2(2 sigma). For a rational ratio the values
alpha + v m + w n are grouped exactly on the common denominator D of
(alpha, v, w): D*lambda = A + V m + W n with integers A, V, W. Writing
g = gcd(V, W), V = g V', W = g W', the attainable values are
lambda = alpha + (g/D) K, K >= 0, and the number r(K) of solutions of
V' m + W' n = K satisfies r(K + V'W') = r(K) + 1 exactly. Summing each
residue class mod V'W' therefore reduces the tail of sum r^2 lambda^{-2 sigma}
to three Hurwitz zeta values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import groupby

import numpy as np

from .core import (
    BarnesParams,
    BudgetExceeded,
    CutoffTooSmall,
    InvalidScale,
    RegionError,
    Tolerance,
    check_poles,
)
from .evaluator import hurwitz_oracle
from .hurwitz import hurwitz_zeta_many

EPS = np.finfo(float).eps
MAX_PERIOD = 200_000
BRUTE_BOX_CAP = 2000
TABLE_CAP = 10_000_000


class DiagonalMethod(str, Enum):
    IrrationalCollapse = "IrrationalCollapse"
    RationalGrouped = "RationalGrouped"
    BruteForce = "BruteForce"


@dataclass(frozen=True)
class DiagonalValue:
    value: float
    sigma: float
    method: DiagonalMethod
    tail_bound: float
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("diagonal value must be positive")
        if not self.tail_bound >= 0:
            raise ValueError("tail_bound must be non-negative")


@dataclass(frozen=True)
class MultiplicityTable:
    """Attainable values lambda <= cutoff with their multiplicities.

    ``keys`` holds D*lambda as integers for rational ratios and is ``None``
    for irrational ones.
    """

    lam: np.ndarray
    mult: np.ndarray
    cutoff: float
    keys: np.ndarray | None = None
    denom: int | None = None

    def __len__(self):
        return len(self.lam)

    def rows(self) -> list[tuple[float, int]]:
        return [(float(l), int(r)) for l, r in zip(self.lam, self.mult)]


def integer_lattice(params: BarnesParams) -> tuple[int, int, int, int]:
    """(A, V, W, D) with alpha = A/D, v = V/D, w = W/D."""
    if params.ratio_irrational:
        raise ValueError("integer lattice only exists for rational ratios")
    D = math.lcm(params.alpha.denominator, params.v.denominator, params.w.denominator)
    A = int(params.alpha * D)
    V = int(params.v * D)
    W = int(params.w * D)
    return A, V, W, D


def _lattice_keys(A: int, V: int, W: int, kmax: int) -> np.ndarray:
    """All A + V m + W n <= kmax (m, n >= 0), unsorted, as int64."""
    out = []
    m = 0
    while A + V * m <= kmax:
        nmax = (kmax - A - V * m) // W
        out.append(A + V * m + W * np.arange(nmax + 1, dtype=np.int64))
        m += 1
    if not out:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(out)


def _check_distinct(lam_sorted: np.ndarray) -> None:
    if lam_sorted.size > 1:
        gaps = np.diff(lam_sorted)
        if np.any(gaps <= 1e-12 * lam_sorted[1:]):
            raise InvalidScale("declared irrational ratio produces coincident lattice values")


def build_multiplicity_table(params: BarnesParams, cutoff: float) -> MultiplicityTable:
    if cutoff < params.alpha_f:
        raise CutoffTooSmall(f"cutoff {cutoff} is below alpha = {params.alpha_f}")
    a, v, w = params.alpha_f, params.v_f, params.w_f
    approx = (cutoff - a) ** 2 / (2 * v * w) + (cutoff - a) * (1 / v + 1 / w) + 1
    if approx > TABLE_CAP:
        raise BudgetExceeded(f"about {approx:.3g} lattice points below cutoff {cutoff}")
    if params.ratio_irrational:
        lams = []
        m = 0
        while a + v * m <= cutoff:
            nmax = int(math.floor((cutoff - a - v * m) / w))
            lams.append(a + v * m + w * np.arange(nmax + 1, dtype=float))
            m += 1
        lam = np.sort(np.concatenate(lams))
        _check_distinct(lam)
        return MultiplicityTable(lam, np.ones(lam.size, dtype=np.int64), float(cutoff))
    A, V, W, D = integer_lattice(params)
    kmax = math.floor(Fraction(cutoff) * D)
    keys, counts = np.unique(_lattice_keys(A, V, W, kmax), return_counts=True)
    return MultiplicityTable(keys / D, counts.astype(np.int64), float(cutoff), keys, D)


def diagonal_partial(sigma: float, table: MultiplicityTable) -> float:
    """sum r(lambda)^2 lambda^{-2 sigma} over the table, ascending lambda."""
    terms = table.mult.astype(float) ** 2 * np.exp(-2.0 * sigma * np.log(table.lam))
    return math.fsum(terms)


def complete_cutoff(params: BarnesParams, box: int) -> float:
    """Largest lambda whose whole fibre lies inside [0, box]^2."""
    return params.alpha_f + min(params.v_f, params.w_f) * box


def rational_tail_majorant(sigma: float, params: BarnesParams, cutoff: float) -> float:
    """Elementary bound for sum_{lambda > cutoff} r(lambda)^2 lambda^{-2 sigma}.

    Uses r(lambda) <= 1 + lambda/l with l = lcm(V, W)/D, decreasing terms,
    and an integral comparison on the progression of spacing g/D.
    """
    if sigma <= 1.5:
        return math.inf
    A, V, W, D = integer_lattice(params)
    ell = math.lcm(V, W) / D
    delta = math.gcd(V, W) / D
    a = params.alpha_f
    X = a + delta * math.floor((cutoff - a) / delta + 1)  # first lambda > cutoff
    f = (1 + X / ell) ** 2 * X ** (-2 * sigma)
    s2 = 2 * sigma
    integral = (X ** (1 - s2) / (s2 - 1) + 2 * X ** (2 - s2) / (ell * (s2 - 2))
                + X ** (3 - s2) / (ell ** 2 * (s2 - 3)))
    return f + integral / delta


def _rational_closed_form(sigma: float, params: BarnesParams) -> tuple[float, float, dict]:
    A, V, W, D = integer_lattice(params)
    g = math.gcd(V, W)
    P = (V // g) * (W // g)
    if P > MAX_PERIOD:
        raise BudgetExceeded(f"multiplicity period {P} exceeds {MAX_PERIOD}")
    delta = g / D
    alpha = params.alpha_f
    K0 = P * max(1, math.ceil(64 / P))
    # r(K) for K < K0 + P from the exact table
    kmax_key = A + g * (K0 + P - 1)
    keys, counts = np.unique(_lattice_keys(A, V, W, kmax_key), return_counts=True)
    r = np.zeros(K0 + P, dtype=np.int64)
    r[(keys - A) // g] = counts
    K = np.arange(K0, dtype=float)
    head_terms = r[:K0].astype(float) ** 2 * np.exp(-2 * sigma * np.log(alpha + delta * K))
    head = math.fsum(head_terms)

    j = np.arange(P)
    rj = r[K0 + j].astype(float)
    beta = (alpha + delta * (K0 + j)) / (delta * P)
    d = rj - beta
    z2, b2 = hurwitz_zeta_many(2 * sigma - 2, beta)
    z1, b1 = hurwitz_zeta_many(2 * sigma - 1, beta)
    z0, b0 = hurwitz_zeta_many(2 * sigma, beta)
    scale = (delta * P) ** (-2 * sigma)
    parts = scale * (z2.real + 2 * d * z1.real + d * d * z0.real)
    tail = math.fsum(parts)
    err = scale * float(np.sum(b2 + 2 * np.abs(d) * b1 + d * d * b0))
    err += 8 * EPS * (head + float(np.abs(parts).sum()))
    return head + tail, err, {"period": P, "K0": K0, "head": head, "tail": tail}


def diagonal_value(sigma: float, params: BarnesParams, tol: Tolerance = Tolerance()) -> DiagonalValue:
    if params.ratio_irrational:
        if sigma <= 1:
            raise RegionError(f"irrational diagonal needs sigma > 1, got {sigma}")
        res = hurwitz_oracle(complex(2 * sigma, 0.0), params)
        return DiagonalValue(res.value.real, sigma, DiagonalMethod.IrrationalCollapse,
                             res.error_bound, {"s": 2 * sigma})
    if sigma <= 1.5:
        raise RegionError(f"rational diagonal needs sigma > 3/2, got {sigma}")
    check_poles(complex(2 * sigma - 2, 0.0), poles=(1.0,))
    value, err, info = _rational_closed_form(sigma, params)
    if err > max(tol.abs_tol, tol.rel_tol * value):
        raise BudgetExceeded(f"diagonal tail error {err:.3g} above tolerance")
    return DiagonalValue(value, sigma, DiagonalMethod.RationalGrouped, err, info)


def brute_force_diagonal(sigma: float, params: BarnesParams, box: int) -> float:
    """Quadruple sum over [0, box]^4 with exact equality v m1 + w n1 = v m2 + w n2.

    Restricted to lambda <= alpha + min(v, w) * box, below which every fibre
    lies inside the box. Test oracle only.
    """
    box = int(box)
    if box > BRUTE_BOX_CAP:
        raise BudgetExceeded(f"box {box} exceeds {BRUTE_BOX_CAP}")
    if box < 0:
        raise ValueError("box must be non-negative")
    pts = []
    if params.ratio_irrational:
        # exact under the declaration: equality forces equal n and equal m
        cut = params.alpha_f + min(params.v_f, params.w_f) * box
        for m in range(box + 1):
            for n in range(box + 1):
                lam = params.alpha_f + params.v_f * m + params.w_f * n
                if lam <= cut:
                    pts.append(((params.v * m, n), lam))
    else:
        cut = params.alpha + min(params.v, params.w) * box
        for m in range(box + 1):
            for n in range(box + 1):
                lam = params.alpha + params.v * m + params.w * n
                if lam <= cut:
                    pts.append((lam, float(lam)))
    pts.sort(key=lambda p: p[0])
    terms = []
    for _, grp in groupby(pts, key=lambda p: p[0]):
        vals = [p[1] for p in grp]
        for l1 in vals:
            for l2 in vals:
                terms.append(l1 ** (-sigma) * l2 ** (-sigma))
    return math.fsum(terms)
