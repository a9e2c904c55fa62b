"""Acceptance criteria, one test each.

Every test prints (and records for the terminal summary) a single line
``[PASS|FAIL] <n> <name>: <detail> (<seconds>s / limit <limit>s)``.
Runtime limits are part of each criterion.
"""

import itertools
import math
import time

import numpy as np

from barnes_zeta import validate_params
from barnes_zeta.analysis import fit_exponent, verdict
from barnes_zeta.core import ComplexPoint
from barnes_zeta.diagonal import (
    brute_force_diagonal,
    build_multiplicity_table,
    diagonal_partial,
    diagonal_value,
)
from barnes_zeta.evaluator import (
    Method,
    TruncationPlan,
    complex_power,
    direct_series,
    euler_maclaurin_eval,
    evaluate,
    hurwitz_oracle,
    theorem3_eval,
    verify_exp_sum_lemma,
)
from barnes_zeta.hurwitz import hurwitz_zeta
from barnes_zeta.meansquare import (
    QuadSettings,
    build_lattice_table,
    eval_truncated,
    geometric_grid,
    mean_square_curve,
)

from conftest import ACCEPTANCE_LINES, ZETA2, ZETA3

UNIT = validate_params(1, 1, 1)
SQRT2 = validate_params(1, 1, 1, ratio_irrational=True, irrational_scale=math.sqrt(2))


def report(n, name, ok, detail, elapsed, limit):
    ok = bool(ok) and elapsed < limit
    line = (f"[{'PASS' if ok else 'FAIL'}] {n} {name}: {detail} "
            f"({elapsed:.2f}s / limit {limit:g}s)")
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_1_counting_identity():
    checks, worst, slowest = [], 0.0, 0.0
    for s, ref in ((3, ZETA2), (4, ZETA3)):
        runs = {
            "direct": lambda: direct_series(s, UNIT),
            "em": lambda: euler_maclaurin_eval(s, UNIT, 2000),
            "theorem3": lambda: theorem3_eval(s, UNIT, TruncationPlan(x=2000)),
            "hurwitz": lambda: hurwitz_oracle(s, UNIT),
        }
        for name, fn in runs.items():
            t0 = time.perf_counter()
            r = fn()
            slowest = max(slowest, time.perf_counter() - t0)
            err = abs(r.value - ref)
            worst = max(worst, err)
            checks.append(err <= r.error_bound and err <= 1e-6)
    report(1, "counting identity", all(checks) and slowest < 1.0,
           f"{sum(checks)}/{len(checks)} within bound and 1e-6, max err {worst:.2e}, "
           f"slowest call {slowest:.2f}s", slowest, 1.0)


def test_2_cross_method_agreement():
    params = validate_params(2, 1, 3)
    t0 = time.perf_counter()
    pairs = ok = 0
    worst = 0.0
    for sigma in np.linspace(2.1, 3.0, 5):
        for t in (0.0, 5.0, 10.0, 20.0, 50.0):
            rs = [evaluate(m, ComplexPoint(float(sigma), t), params) for m in Method]
            for a, b in itertools.combinations(rs, 2):
                d = abs(a.value - b.value)
                lim = a.error_bound + b.error_bound
                pairs += 1
                ok += d <= lim
                worst = max(worst, d / lim)
    elapsed = time.perf_counter() - t0
    report(2, "cross-method agreement", ok == pairs,
           f"{ok}/{pairs} pairs within summed bounds, worst diff/bound {worst:.3f}", elapsed, 30)


def test_3_theorem3_decay():
    t0 = time.perf_counter()
    sigma = 2.5
    ref = hurwitz_zeta(sigma - 1, 1.0).real
    xs = np.array([25, 50, 100, 200, 400], dtype=float)
    errs = [abs(theorem3_eval(sigma, UNIT, TruncationPlan(x=x)).value - ref) for x in xs]
    slope = float(np.polyfit(np.log(xs), np.log(errs), 1)[0])
    elapsed = time.perf_counter() - t0
    report(3, "Theorem 3 error decay", slope <= 1 - sigma + 0.15,
           f"slope {slope:.3f} <= {1 - sigma + 0.15:.2f}", elapsed, 10)


def test_4_diagonal_oracle():
    t0 = time.perf_counter()
    battery = [validate_params(a, v, w) for a in ("1/2", "1", "5/3") for v in (1, 2, 3) for w in (1, 2, 3)]
    # (v, w) over {1, 2, 3}^2 for each of the three alphas
    worst, ok = 0.0, 0
    for params in battery:
        cutoff = params.alpha + min(params.v, params.w) * 40
        grouped = diagonal_partial(1.8, build_multiplicity_table(params, cutoff))
        brute = brute_force_diagonal(1.8, params, 40)
        rel = abs(grouped - brute) / brute
        worst = max(worst, rel)
        ok += rel <= 1e-12
    elapsed = time.perf_counter() - t0
    report(4, "diagonal oracle equivalence", ok == len(battery),
           f"{ok}/{len(battery)} configurations, max rel diff {worst:.1e}", elapsed, 60)


def test_5_theorem1_desk_scale():
    t0 = time.perf_counter()
    curve = mean_square_curve(2.5, UNIT, geometric_grid(10, 100, 8))
    ratio = curve.I[-1] / 100 / ZETA3
    v = verdict(curve, slack=0.25)
    elapsed = time.perf_counter() - t0
    report(5, "Theorem 1 desk scale", abs(ratio - 1) <= 0.05 and v.passed,
           f"I(100)/100 = {ratio:.4f} * zeta(3), boundedness verdict {v.passed}", elapsed, 300)


def test_6_theorem2_regimes():
    t0 = time.perf_counter()
    quad = QuadSettings(workers=4)
    c18 = mean_square_curve(1.8, UNIT, geometric_grid(10, 300, 8), quad)
    c19 = mean_square_curve(1.9, UNIT, geometric_grid(10, 300, 8), quad)
    s18_log = fit_exponent(c18, divide_log=True).slope
    s18_raw = fit_exponent(c18, divide_log=False).slope
    s19 = fit_exponent(c19, divide_log=False).slope
    # doubled grid density for the stability property
    d18 = mean_square_curve(1.8, UNIT, geometric_grid(10, 300, 15), quad)
    d19 = mean_square_curve(1.9, UNIT, geometric_grid(10, 300, 15), quad)
    shift = max(abs(fit_exponent(d18, divide_log=True).slope - s18_log),
                abs(fit_exponent(d19, divide_log=False).slope - s19))
    elapsed = time.perf_counter() - t0
    ok = s18_log <= 0.6 and s18_raw <= 0.6 and s19 <= 0.7 and shift < 0.05
    report(6, "Theorem 2 regimes", ok,
           f"sigma=1.8 slope {s18_log:.3f} (log-corrected), {s18_raw:.3f} (raw) <= 0.6; "
           f"sigma=1.9 slope {s19:.3f} <= 0.7; grid-doubling shift {shift:.3f} < 0.05",
           elapsed, 1800)


def test_7_irrational_collapse():
    t0 = time.perf_counter()
    d = diagonal_value(1.5, SQRT2)
    r = direct_series(3, SQRT2)
    diff = abs(d.value - r.value.real)
    elapsed = time.perf_counter() - t0
    report(7, "irrational collapse", diff <= d.tail_bound + r.error_bound,
           f"|diff| {diff:.1e} <= {d.tail_bound + r.error_bound:.1e}", elapsed, 5)


def _properties() -> dict[str, bool]:
    out = {}
    pts = [2.6 + 7.5j, 1.7 + 12j]
    params = validate_params("1/2", "5/3", 2)

    def methods(s, p):
        rs = [euler_maclaurin_eval(s, p, 300), theorem3_eval(s, p, TruncationPlan(x=300))]
        if s.real > 2:
            rs.append(hurwitz_oracle(s, p))
        return [r.value for r in rs]

    out["conjugation"] = all(
        abs(b - a.conjugate()) <= 1e-14 * abs(a)
        for s in pts for a, b in zip(methods(s, params), methods(s.conjugate(), params)))
    out["v-w symmetry"] = all(
        abs(a - b) <= 1e-12 * abs(a)
        for s in pts for a, b in zip(methods(s, params), methods(s, params.swapped())))
    out["homogeneity"] = all(
        abs(b - complex_power(float(c), s) * a) <= 1e-12 * abs(b)
        for c in (2, 10) for s in pts[:1]
        for a, b in zip(methods(s, params), methods(s, params.scaled(c))))

    rng = np.random.default_rng(2024)
    tab = build_lattice_table(params, 30, 2.0)
    grouped_ok = True
    for _ in range(20):
        sigma, x = rng.uniform(1.2, 3.0), int(rng.integers(1, 31))
        t = rng.uniform(-x, x)
        got = eval_truncated(tab, sigma, t, x)
        terms = [complex_power(params.alpha_f + params.v_f * m + params.w_f * n, complex(sigma, t))
                 for m in range(x + 1) for n in range(x + 1)]
        want = complex(math.fsum(z.real for z in terms), math.fsum(z.imag for z in terms))
        grouped_ok &= abs(got - want) <= 1e-12 * abs(want)
    out["grouped-vs-naive"] = grouped_ok

    grid = [2.0, 5.0, 10.0, 20.0, 40.0]
    serial = mean_square_curve(1.7, params, grid)
    parallel = mean_square_curve(1.7, params, grid, QuadSettings(workers=4))
    out["parallel-equals-serial"] = serial.I.tobytes() == parallel.I.tobytes()
    out["monotonicity"] = bool(np.all(np.diff(serial.I) >= 0))
    half = mean_square_curve(1.7, params, grid, QuadSettings(h_scale=0.5))
    out["half-step"] = bool(np.all(np.abs(half.I - serial.I) <= serial.quad_err))
    return out


def test_8_property_suite():
    t0 = time.perf_counter()
    props = _properties()
    elapsed = time.perf_counter() - t0
    failed = [k for k, v in props.items() if not v]
    report(8, "property suite", not failed,
           f"{len(props) - len(failed)}/{len(props)} green" + (f", failed: {failed}" if failed else ""),
           elapsed, 120)


def test_9_lemma_check():
    t0 = time.perf_counter()
    params = validate_params(1, 2, 3)
    C, m = 2 * math.pi, 0
    ratios = []
    for sigma in (1.5, 2.0):
        scaled = []
        for x in (10, 20, 40, 80):
            t = 2 * math.pi * x / C
            r = verify_exp_sum_lemma(complex(sigma, t), params, m, x, 10 * x, C)
            scaled.append(r * (m + x) ** sigma)
        ratios.append(max(scaled) / scaled[0])
    elapsed = time.perf_counter() - t0
    report(9, "lemma check", max(ratios) <= 10,
           f"max scaled residual / first = {max(ratios):.2f} <= 10", elapsed, 5)
