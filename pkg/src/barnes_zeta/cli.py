"""Command-line front end.

Subcommands: eval, diagonal, meansquare, sweep, lemma-check.

Settings come from (highest precedence first) command-line flags, a flat
``key=value`` config file given by ``--config``, and built-in defaults.
Every float is written with 17 significant digits, so identical
configurations give byte-identical CSV/JSON outputs; their SHA-256 hashes
are recorded in ``manifest.json``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import DEFAULT_SLACK, verdict
from .core import (
    IRRATIONAL_SCALES,
    BarnesError,
    ComplexPoint,
    InsufficientSignal,
    Tolerance,
    validate_params,
)
from .diagonal import diagonal_value
from .evaluator import C_EM, C_T3, Method, TruncationPlan, default_em_N, evaluate, verify_exp_sum_lemma
from .meansquare import Mode, QuadSettings, geometric_grid, mean_square_curve

log = logging.getLogger("barnes_zeta")

DEFAULTS = {
    "alpha": "1",
    "v": "1",
    "w": "1",
    "irrational_scale": None,
    "sigma": None,
    "sigmas": None,
    "t": "0",
    "t_range": None,
    "Tmin": "10",
    "Tmax": "100",
    "T_grid": "8",
    "method": "all",
    "x": None,
    "C": str(2 * math.pi),
    "N": None,
    "M": None,
    "m": "0",
    "h_policy": "oscillation",
    "mode": "WithCorrection",
    "workers": "1",
    "slack": str(DEFAULT_SLACK),
    "tol": "1e-10",
    "out_dir": None,
}


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def parse_config_file(path) -> dict:
    """Flat ``key=value`` lines; ``#`` starts a comment; dashes in keys become underscores."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, val = (p.strip() for p in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in DEFAULTS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = val
    return out


def merge_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(parse_config_file(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def config_hash(cfg: dict, command: str) -> str:
    """SHA-256 of the settings that determine the numbers (output location excluded)."""
    kept = {k: v for k, v in cfg.items() if k != "out_dir"}
    blob = json.dumps({"command": command, **kept}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def params_from(cfg: dict):
    scale = cfg.get("irrational_scale")
    if scale:
        if scale not in IRRATIONAL_SCALES:
            raise ValueError(f"irrational scale must be one of {sorted(IRRATIONAL_SCALES)}")
        return validate_params(cfg["alpha"], cfg["v"], cfg["w"], True, IRRATIONAL_SCALES[scale])
    return validate_params(cfg["alpha"], cfg["v"], cfg["w"])


def _floats(text: str) -> list[float]:
    return [float(x) for x in str(text).split(",") if x.strip()]


def sigma_list(cfg: dict) -> list[float]:
    raw = cfg.get("sigmas") or cfg.get("sigma")
    if raw is None:
        raise ValueError("no sigma given (use --sigma or --sigmas)")
    vals = _floats(raw)
    if not vals:
        raise ValueError("empty sigma list")
    seen, out = set(), []
    for v in vals:
        if v in seen:
            log.warning("duplicate sigma %s ignored", v)
            continue
        seen.add(v)
        out.append(v)
    return out


def t_list(cfg: dict) -> list[float]:
    if cfg.get("t_range"):
        parts = str(cfg["t_range"]).split(":")
        if len(parts) != 3:
            raise ValueError("--t-range expects start:stop:count")
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
        return [float(x) for x in np.linspace(a, b, n)]
    return _floats(cfg["t"])


def quad_from(cfg: dict) -> QuadSettings:
    policy = str(cfg["h_policy"])
    h, scale = None, 1.0
    if policy.startswith("fixed:"):
        h = float(policy.split(":", 1)[1])
    elif policy.startswith("scale:"):
        scale = float(policy.split(":", 1)[1])
    elif policy != "oscillation":
        raise ValueError("--h-policy is 'oscillation', 'fixed:<h>' or 'scale:<factor>'")
    return QuadSettings(h=h, h_scale=scale, workers=int(cfg["workers"]), mode=Mode(cfg["mode"]))


def methods_from(cfg: dict) -> list[Method]:
    raw = str(cfg["method"])
    if raw == "all":
        return list(Method)
    aliases = {"direct": Method.DirectSeries, "em": Method.EulerMaclaurin,
               "theorem3": Method.Theorem3, "hurwitz": Method.HurwitzOracle}
    out = []
    for name in raw.split(","):
        name = name.strip()
        out.append(aliases.get(name.lower()) or Method(name))
    return out


def error_object(exc: Exception, **where) -> dict:
    return {"error": type(exc).__name__, "message": str(exc), **where}


def emit_error(obj: dict) -> None:
    print(json.dumps(obj, sort_keys=True), file=sys.stderr)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out_dir: Path, command: str, cfg: dict, files: list[Path], counters: dict,
                   started: float, notes: list[str] | None = None) -> Path:
    manifest = {
        "command": command,
        "config": cfg,
        "config_hash": config_hash(cfg, command),
        "version": __version__,
        "calibration": {"c_em": C_EM, "c_t3": C_T3},
        "wall_clock_seconds": time.time() - started,
        "counters": counters,
        "files": {p.name: _sha256(p) for p in files},
        "notes": notes or [],
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _out_dir(cfg: dict) -> Path | None:
    if not cfg.get("out_dir"):
        return None
    p = Path(cfg["out_dir"])
    p.mkdir(parents=True, exist_ok=True)
    return p


def _write_rows(rows: list[list[str]], header: list[str], dest: Path | None, name: str) -> Path | None:
    text = ",".join(header) + "\n" + "".join(",".join(r) + "\n" for r in rows)
    if dest is None:
        sys.stdout.write(text)
        return None
    path = dest / name
    path.write_text(text)
    return path


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_eval(cfg: dict) -> int:
    started = time.time()
    params = params_from(cfg)
    tol = Tolerance(abs_tol=float(cfg["tol"]), rel_tol=float(cfg["tol"]))
    rows, errors, terms = [], 0, 0
    for sigma in sigma_list(cfg):
        for t in t_list(cfg):
            p = ComplexPoint(sigma, t)
            for method in methods_from(cfg):
                try:
                    plan = None
                    if method is Method.Theorem3:
                        x = float(cfg["x"]) if cfg.get("x") else max(default_em_N(p), abs(t))
                        plan = TruncationPlan(x=x, C=float(cfg["C"]))
                    N = int(cfg["N"]) if cfg.get("N") else None
                    M = int(cfg["M"]) if cfg.get("M") else None
                    res = evaluate(method, p, params, tol=tol, N=N, plan=plan, M=M)
                except (BarnesError, ValueError) as exc:
                    errors += 1
                    emit_error(error_object(exc, sigma=sigma, t=t, method=method.value))
                    continue
                terms += res.terms_used
                rows.append([fmt(sigma), fmt(t), method.value, fmt(res.value.real),
                             fmt(res.value.imag), fmt(res.error_bound), str(res.terms_used)])
    out = _out_dir(cfg)
    path = _write_rows(rows, ["sigma", "t", "method", "re", "im", "error_bound", "terms_used"],
                       out, "eval.csv")
    if out is not None:
        write_manifest(out, "eval", cfg, [path], {"terms_summed": terms, "errors": errors}, started)
    return 1 if errors else 0


def cmd_diagonal(cfg: dict) -> int:
    started = time.time()
    params = params_from(cfg)
    tol = Tolerance(abs_tol=float(cfg["tol"]), rel_tol=float(cfg["tol"]))
    rows, errors = [], 0
    for sigma in sigma_list(cfg):
        try:
            d = diagonal_value(sigma, params, tol)
        except (BarnesError, ValueError) as exc:
            errors += 1
            emit_error(error_object(exc, sigma=sigma))
            continue
        rows.append([fmt(sigma), fmt(d.value), d.method.value, fmt(d.tail_bound)])
    out = _out_dir(cfg)
    path = _write_rows(rows, ["sigma", "value", "method", "tail_bound"], out, "diagonal.csv")
    if out is not None:
        write_manifest(out, "diagonal", cfg, [path], {"errors": errors}, started)
    return 1 if errors else 0


def _grid(cfg: dict) -> list[float]:
    T_max = float(cfg["Tmax"])
    T_min = min(float(cfg["Tmin"]), T_max)
    count = int(cfg["T_grid"])
    if T_max <= 1:
        return [1.0]
    return geometric_grid(T_min, T_max, count)


def run_meansquare(sigma: float, cfg: dict, out: Path, tag: str = "") -> tuple[dict | None, list[Path], dict]:
    """Curve + verdict for one sigma; returns (verdict dict or None, files, counters)."""
    params = params_from(cfg)
    chash = config_hash({**cfg, "sigma": str(sigma), "sigmas": None}, "meansquare")
    curve = mean_square_curve(sigma, params, _grid(cfg), quad_from(cfg))
    curve_path = curve.write_csv(out / f"curve{tag}.csv")
    files = [curve_path]
    counters = dict(curve.stats)
    v = verdict(curve, float(cfg["slack"]))
    doc = v.to_dict(chash)
    verdict_path = out / f"verdict{tag}.json"
    verdict_path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=fmt) + "\n")
    files.append(verdict_path)
    return doc, files, counters


def cmd_meansquare(cfg: dict) -> int:
    started = time.time()
    out = _out_dir(cfg) or Path(".")
    sigmas = sigma_list(cfg)
    if len(sigmas) != 1:
        raise ValueError("meansquare takes a single sigma; use sweep for several")
    sigma = sigmas[0]
    notes, files, counters, code = [], [], {}, 0
    try:
        doc, files, counters = run_meansquare(sigma, cfg, out)
        print(json.dumps(doc, sort_keys=True))
    except InsufficientSignal as exc:
        # the curve is already on disk; report and fail
        files = [out / "curve.csv"] if (out / "curve.csv").exists() else []
        emit_error(error_object(exc, sigma=sigma))
        notes.append(f"verdict unavailable: {exc}")
        code = 1
    except (BarnesError, ValueError) as exc:
        emit_error(error_object(exc, sigma=sigma))
        notes.append(str(exc))
        code = 1
    write_manifest(out, "meansquare", cfg, files, counters, started, notes)
    return code


def cmd_sweep(cfg: dict) -> int:
    started = time.time()
    out = _out_dir(cfg) or Path(".")
    sigmas = sigma_list(cfg)
    verdicts, files, errors = [], [], 0
    counters = {"panels": 0, "integrand_evals": 0}
    for sigma in sigmas:
        tag = f"_sigma{sigma!r}"
        try:
            doc, f, c = run_meansquare(sigma, cfg, out, tag)
        except (BarnesError, ValueError) as exc:
            errors += 1
            obj = error_object(exc, sigma=sigma)
            emit_error(obj)
            verdicts.append(obj)
            if (out / f"curve{tag}.csv").exists():
                files.append(out / f"curve{tag}.csv")
            continue
        verdicts.append(doc)
        files.extend(f)
        counters["panels"] += c.get("panels", 0)
        counters["integrand_evals"] += c.get("integrand_evals", 0)
    path = out / "verdicts.json"
    path.write_text(json.dumps(verdicts, indent=2, sort_keys=True) + "\n")
    files.append(path)
    counters["errors"] = errors
    write_manifest(out, "sweep", cfg, files, counters, started)
    print(json.dumps(verdicts, sort_keys=True))
    return 1 if errors else 0


def cmd_lemma_check(cfg: dict) -> int:
    started = time.time()
    params = params_from(cfg)
    xs = _floats(cfg["x"] or "10,20,40,80")
    C = float(cfg["C"])
    m = int(cfg["m"])
    rows, errors = [], 0
    for sigma in sigma_list(cfg):
        for x in xs:
            N = int(cfg["N"]) if cfg.get("N") else int(10 * x)
            # default height sits on the admissibility boundary t = 2 pi x / C
            ts = t_list(cfg) if cfg.get("t_range") or str(cfg["t"]) != "0" else [2 * math.pi * x / C]
            for t in ts:
                try:
                    res = verify_exp_sum_lemma(complex(sigma, t), params, m, x, N, C)
                except (BarnesError, ValueError) as exc:
                    errors += 1
                    emit_error(error_object(exc, sigma=sigma, t=t, x=x))
                    continue
                rows.append([fmt(sigma), fmt(t), str(m), fmt(x), str(N), fmt(res),
                             fmt(res * (m + x) ** sigma)])
    out = _out_dir(cfg)
    path = _write_rows(rows, ["sigma", "t", "m", "x", "N", "residual", "scaled"], out, "lemma.csv")
    if out is not None:
        write_manifest(out, "lemma-check", cfg, [path], {"errors": errors}, started)
    return 1 if errors else 0


COMMANDS = {
    "eval": cmd_eval,
    "diagonal": cmd_diagonal,
    "meansquare": cmd_meansquare,
    "sweep": cmd_sweep,
    "lemma-check": cmd_lemma_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file")
    common.add_argument("--alpha")
    common.add_argument("--v")
    common.add_argument("--w")
    common.add_argument("--irrational-scale", dest="irrational_scale",
                        choices=sorted(IRRATIONAL_SCALES))
    common.add_argument("--sigma")
    common.add_argument("--sigmas", help="comma-separated sigma values")
    common.add_argument("--t", help="comma-separated heights")
    common.add_argument("--t-range", dest="t_range", help="start:stop:count")
    common.add_argument("--Tmin")
    common.add_argument("--Tmax")
    common.add_argument("--T-grid", dest="T_grid", help="number of geometric grid points")
    common.add_argument("--method", help="all, or comma list of direct,em,theorem3,hurwitz")
    common.add_argument("--x", help="truncation height (eval) or comma list (lemma-check)")
    common.add_argument("--C")
    common.add_argument("--N")
    common.add_argument("--M")
    common.add_argument("--m", help="fixed row index for lemma-check")
    common.add_argument("--h-policy", dest="h_policy")
    common.add_argument("--mode", choices=[m.value for m in Mode])
    common.add_argument("--workers")
    common.add_argument("--slack")
    common.add_argument("--tol")
    common.add_argument("--out-dir", dest="out_dir")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="barnes-zeta",
                                     description="Barnes double zeta-function experiments")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = merge_config(args)
        if args.command == "sweep" and not (cfg.get("sigmas") or cfg.get("sigma")):
            parser.error("sweep needs --sigmas")
        if cfg.get("sigmas") is not None and not _floats(cfg["sigmas"]):
            parser.error("empty sigma list")
        return COMMANDS[args.command](cfg)
    except (BarnesError, ValueError) as exc:
        emit_error(error_object(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
