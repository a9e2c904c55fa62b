"""Mean square I(T) = int_1^T |zeta_2(sigma + i t)|^2 dt on a grid of T.

The integrand at height t uses the truncated double sum over m, n <= t
(optionally plus the closed-form boundary correction at x = t). Lattice
values are merged into a table once, up to the largest height; the truncation
at a given t is obtained by restricting to points with max(m, n) <= floor(t).

Panels never straddle an integer, because the truncated sum jumps there.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .core import (
    BarnesParams,
    BudgetExceeded,
    HeightViolation,
    InvalidScale,
    RegionError,
    RegionTag,
    check_poles,
    classify_region,
)
from .diagonal import diagonal_value, integer_lattice

EPS = np.finfo(float).eps
T_MAX_CAP = 500.0
TABLE_POINT_CAP = 10_000_000


class Mode(str, Enum):
    TruncatedOnly = "TruncatedOnly"
    WithCorrection = "WithCorrection"


@dataclass(frozen=True, eq=False)
class LatticeTable:
    """Merged lattice values for 0 <= m, n <= x_max.

    ``point_lam`` maps every lattice point, ordered by box index max(m, n),
    to its position in ``lam``; the first (K+1)^2 entries are exactly the
    points with max(m, n) <= K.
    """

    params: BarnesParams
    x_max: int
    sigma: float
    lam: np.ndarray
    mult: np.ndarray
    log_lam: np.ndarray
    lambda_pow: np.ndarray
    point_lam: np.ndarray

    def mult_within(self, K: int) -> np.ndarray:
        """Multiplicity of each lambda counting only points with max(m, n) <= K."""
        K = min(int(K), self.x_max)
        n = (K + 1) ** 2
        return np.bincount(self.point_lam[:n], minlength=self.lam.size)

    def with_sigma(self, sigma: float) -> "LatticeTable":
        pw = self.mult * np.exp(-sigma * self.log_lam)
        return LatticeTable(self.params, self.x_max, sigma, self.lam, self.mult,
                            self.log_lam, pw, self.point_lam)


def _box_order(x_max: int) -> tuple[np.ndarray, np.ndarray]:
    """(m, n) for all points of [0, x_max]^2 ordered by max(m, n), then m, then n."""
    ms, ns = [], []
    for k in range(x_max + 1):
        # shell max(m, n) = k: (k, 0..k) and (0..k-1, k)
        m = np.concatenate([np.arange(k), np.full(k + 1, k)])
        n = np.concatenate([np.full(k, k), np.arange(k + 1)])
        order = np.lexsort((n, m))
        ms.append(m[order])
        ns.append(n[order])
    return np.concatenate(ms), np.concatenate(ns)


def build_lattice_table(params: BarnesParams, x_max: float, sigma: float) -> LatticeTable:
    if x_max < 0:
        raise ValueError("x_max must be non-negative")
    X = int(math.floor(x_max))
    if (X + 1) ** 2 > TABLE_POINT_CAP:
        raise BudgetExceeded(f"{(X + 1) ** 2} lattice points exceed cap {TABLE_POINT_CAP}")
    m, n = _box_order(X)
    if params.ratio_irrational:
        pl = params.alpha_f + params.v_f * m + params.w_f * n
        order = np.argsort(pl, kind="stable")
        lam = pl[order]
        if lam.size > 1 and np.any(np.diff(lam) <= 1e-12 * lam[1:]):
            raise InvalidScale("declared irrational ratio produces coincident lattice values")
        point_lam = np.empty(pl.size, dtype=np.int64)
        point_lam[order] = np.arange(pl.size)
        mult = np.ones(lam.size, dtype=np.int64)
    else:
        A, V, W, D = integer_lattice(params)
        keys = A + V * m.astype(np.int64) + W * n.astype(np.int64)
        uk, inv, mult = np.unique(keys, return_inverse=True, return_counts=True)
        lam = uk / D
        point_lam = inv.astype(np.int64)
    log_lam = np.log(lam)
    pw = mult * np.exp(-sigma * log_lam)
    return LatticeTable(params, X, float(sigma), lam, mult.astype(np.int64), log_lam, pw, point_lam)


def _weights(table: LatticeTable, sigma: float, K: int) -> tuple[np.ndarray, np.ndarray]:
    mk = table.mult_within(K)
    keep = mk > 0
    return mk[keep] * np.exp(-sigma * table.log_lam[keep]), table.log_lam[keep]


def _sums_at(weights: np.ndarray, logs: np.ndarray, ts: np.ndarray) -> np.ndarray:
    ph = ts[:, None] * logs[None, :]
    re = (weights[None, :] * np.cos(ph)).sum(axis=1)
    im = (weights[None, :] * np.sin(ph)).sum(axis=1)
    return re - 1j * im


def eval_truncated(table: LatticeTable, sigma: float, t: float, x_cut: float) -> complex:
    """Truncated double sum over m, n <= x_cut at s = sigma + i t."""
    if math.floor(x_cut) > table.x_max:
        raise ValueError(f"x_cut {x_cut} beyond table x_max {table.x_max}")
    if abs(t) > x_cut:
        raise HeightViolation(f"|t|={abs(t)} exceeds x_cut={x_cut}")
    w, lg = _weights(table, sigma, int(math.floor(x_cut)))
    return complex(_sums_at(w, lg, np.array([float(t)]))[0])


def correction_many(sigma: float, ts: np.ndarray, params: BarnesParams, xs: np.ndarray) -> np.ndarray:
    """Boundary correction at heights xs for s = sigma + i ts (vectorized)."""
    a, v, w = params.alpha_f, params.v_f, params.w_f
    s = sigma + 1j * ts
    e = 2.0 - s

    def cpow(base):
        lb = np.log(base)
        mag = np.exp(e.real * lb)
        ph = e.imag * lb
        return mag * np.cos(ph) + 1j * (mag * np.sin(ph))

    num = cpow(a + v * xs) + cpow(a + w * xs) - cpow(a + (v + w) * xs)
    return num / (v * w * (s - 1.0) * (s - 2.0))


def _integrand_many(table: LatticeTable, sigma: float, ts: np.ndarray, K: int, mode: Mode) -> np.ndarray:
    w, lg = _weights(table, sigma, K)
    z = _sums_at(w, lg, ts)
    if mode is Mode.WithCorrection:
        z = z + correction_many(sigma, ts, table.params, ts)
    return z.real ** 2 + z.imag ** 2


def integrand(table: LatticeTable, sigma: float, t: float, mode: Mode | str = Mode.WithCorrection) -> float:
    """|zeta_2 approximation|^2 at sigma + i t with truncation x = t."""
    mode = Mode(mode)
    if t < 1:
        raise ValueError("integrand defined for t >= 1")
    if sigma <= 1:
        raise RegionError("integrand requires sigma > 1")
    if math.floor(t) > table.x_max:
        raise ValueError(f"t={t} beyond table x_max {table.x_max}")
    if mode is Mode.WithCorrection:
        check_poles(complex(sigma, t))
    return float(_integrand_many(table, sigma, np.array([float(t)]), int(math.floor(t)), mode)[0])


@dataclass(frozen=True)
class QuadSettings:
    """Panel quadrature settings.

    ``h`` overrides the oscillation policy h * log(lambda_max) <= pi/8;
    ``h_scale`` multiplies whichever step is in force (0.5 halves it).
    """

    order: int = 6
    h: float | None = None
    h_scale: float = 1.0
    sample_every: int = 20
    workers: int = 1
    mode: Mode = Mode.WithCorrection

    def step(self, lam_max: float) -> float:
        base = self.h if self.h is not None else (math.pi / 8) / math.log(lam_max)
        return base * self.h_scale


@dataclass(frozen=True)
class CurveRow:
    T: float
    I: float
    quad_err: float
    R: float


@dataclass(frozen=True)
class MeanSquareCurve:
    sigma: float
    params: BarnesParams
    grid: list[CurveRow]
    leading_coeff: float
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def T(self) -> np.ndarray:
        return np.array([r.T for r in self.grid])

    @property
    def I(self) -> np.ndarray:
        return np.array([r.I for r in self.grid])

    @property
    def R(self) -> np.ndarray:
        return np.array([r.R for r in self.grid])

    @property
    def quad_err(self) -> np.ndarray:
        return np.array([r.quad_err for r in self.grid])

    def write_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["T", "I", "quad_err", "R", "leading_coeff"])
            for r in self.grid:
                wr.writerow([_fmt(r.T), _fmt(r.I), _fmt(r.quad_err),
                             _fmt(r.R), _fmt(self.leading_coeff)])
        return path


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def read_curve_csv(path) -> list[dict]:
    with Path(path).open() as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def _panels(T_grid: list[float], h: float) -> list[tuple[int, np.ndarray, np.ndarray]]:
    """Panels grouped by unit interval: (K, lows, highs), ascending."""
    T_max = T_grid[-1]
    cuts = sorted(set([float(k) for k in range(1, int(math.floor(T_max)) + 1)] + list(T_grid)))
    cuts = [c for c in cuts if 1.0 <= c <= T_max]
    groups: dict[int, tuple[list, list]] = {}
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        n = max(1, int(math.ceil((hi - lo) / h - 1e-9)))
        edges = np.linspace(lo, hi, n + 1)
        K = int(math.floor(lo))
        g = groups.setdefault(K, ([], []))
        g[0].append(edges[:-1])
        g[1].append(edges[1:])
    return [(K, np.concatenate(g[0]), np.concatenate(g[1])) for K, g in sorted(groups.items())]


def _panel_integrals(table, sigma, K, lo, hi, nodes, wts, mode) -> np.ndarray:
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    ts = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    f = _integrand_many(table, sigma, ts, K, mode).reshape(lo.size, nodes.size)
    return (f * wts[None, :]).sum(axis=1) * half


def mean_square_curve(sigma: float, params: BarnesParams, T_grid, quad: QuadSettings = QuadSettings(),
                      table: LatticeTable | None = None, leading_coeff: float | None = None) -> MeanSquareCurve:
    region = classify_region(sigma)
    if region not in (RegionTag.Theorem1, RegionTag.Theorem2):
        raise RegionError(f"sigma={sigma} lies outside the mean-square theorems (sigma > 3/2)")
    T_grid = [float(T) for T in T_grid]
    if not T_grid or any(T < 1 for T in T_grid) or any(b <= a for a, b in zip(T_grid, T_grid[1:])):
        raise ValueError("T_grid must be strictly ascending values >= 1")
    T_max = T_grid[-1]
    if T_max > T_MAX_CAP:
        raise BudgetExceeded(f"T_max={T_max} exceeds cap {T_MAX_CAP}")
    if table is None or table.x_max < math.floor(T_max):
        table = build_lattice_table(params, T_max, sigma)
    if leading_coeff is None:
        leading_coeff = diagonal_value(sigma, params).value

    lam_max = float(params.alpha_f + (params.v_f + params.w_f) * math.floor(T_max))
    h = quad.step(max(lam_max, math.e))
    nodes, wts = np.polynomial.legendre.leggauss(quad.order)
    groups = _panels(T_grid, h) if T_max > 1 else []

    def work(group):
        K, lo, hi = group
        full = _panel_integrals(table, sigma, K, lo, hi, nodes, wts, quad.mode)
        return K, lo, hi, full

    if quad.workers > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=quad.workers) as ex:
            results = list(ex.map(work, groups))
    else:
        results = [work(g) for g in groups]

    his = np.concatenate([r[2] for r in results]) if results else np.empty(0)
    contrib = np.concatenate([r[3] for r in results]) if results else np.empty(0)

    # half-step recomputation on every sample_every-th panel
    sample_diffs = np.zeros(contrib.size)
    if contrib.size:
        idx = np.arange(0, contrib.size, quad.sample_every)
        los = np.concatenate([r[1] for r in results])
        Ks = np.concatenate([np.full(r[1].size, r[0]) for r in results])
        for K in np.unique(Ks[idx]):
            sel = idx[Ks[idx] == K]
            lo, hi = los[sel], his[sel]
            mid = 0.5 * (lo + hi)
            halves = (_panel_integrals(table, sigma, int(K), lo, mid, nodes, wts, quad.mode)
                      + _panel_integrals(table, sigma, int(K), mid, hi, nodes, wts, quad.mode))
            sample_diffs[sel] = np.abs(halves - contrib[sel])

    rows = []
    for T in T_grid:
        n = int(np.searchsorted(his, T + 1e-12, side="right")) if contrib.size else 0
        I = math.fsum(contrib[:n]) if n else 0.0
        worst = float(sample_diffs[:n].max()) if n else 0.0
        qerr = 2.0 * n * worst + 64 * EPS * float(np.abs(contrib[:n]).sum())
        rows.append(CurveRow(T, I, qerr, I - leading_coeff * T))
    stats = {"panels": int(contrib.size), "h": h, "lambda_count": int(table.lam.size),
             "integrand_evals": int(contrib.size * quad.order), "mode": quad.mode.value}
    return MeanSquareCurve(float(sigma), params, rows, float(leading_coeff), stats)


def geometric_grid(T_min: float, T_max: float, count: int) -> list[float]:
    if count < 1:
        raise ValueError("grid count must be positive")
    if count == 1:
        return [float(T_max)]
    return [float(x) for x in np.geomspace(T_min, T_max, count)]
