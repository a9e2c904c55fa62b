import csv
import io
import json
import math

import pytest

from barnes_zeta.cli import main, parse_config_file

from conftest import ZETA2


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eval_zeta2(capsys):
    code, out, _ = run(capsys, "eval", "--sigma", "3", "--t", "0", "--alpha", "1", "--v", "1",
                       "--w", "1", "--method", "direct")
    assert code == 0
    (r,) = rows(out)
    assert float(r["re"]) == pytest.approx(ZETA2, abs=1e-10)
    assert float(r["im"]) == 0.0


def test_eval_all_methods_agree(capsys):
    code, out, _ = run(capsys, "eval", "--sigma", "2.5", "--t", "10")
    assert code == 0
    rs = rows(out)
    assert {r["method"] for r in rs} == {"DirectSeries", "EulerMaclaurin", "Theorem3", "HurwitzOracle"}
    for a in rs:
        for b in rs:
            d = abs(complex(float(a["re"]), float(a["im"])) - complex(float(b["re"]), float(b["im"])))
            assert d <= float(a["error_bound"]) + float(b["error_bound"])


def test_eval_region_error(capsys):
    code, out, err = run(capsys, "eval", "--sigma", "0.5", "--method", "em")
    assert code != 0
    assert json.loads(err.strip().splitlines()[-1])["error"] == "RegionError"


def test_diagonal(capsys):
    code, out, _ = run(capsys, "diagonal", "--sigma", "2")
    assert code == 0
    assert float(rows(out)[0]["value"]) == pytest.approx(ZETA2, rel=1e-13)


def test_diagonal_irrational(capsys):
    from barnes_zeta import validate_params
    from barnes_zeta.evaluator import direct_series
    code, out, _ = run(capsys, "diagonal", "--irrational-scale", "sqrt2", "--sigma", "1.5")
    assert code == 0
    r = rows(out)[0]
    ref = direct_series(3, validate_params(1, 1, 1, True, math.sqrt(2)))
    assert abs(float(r["value"]) - ref.value.real) <= float(r["tail_bound"]) + ref.error_bound


def test_diagonal_region(capsys):
    code, _, err = run(capsys, "diagonal", "--sigma", "1.4")
    assert code != 0 and "RegionError" in err


def test_meansquare_outputs(capsys, tmp_path):
    code, out, _ = run(capsys, "meansquare", "--sigma", "2.5", "--Tmax", "40",
                       "--out-dir", str(tmp_path))
    assert code == 0
    doc = json.loads(out)
    assert doc["pass"] is True and doc["region"] == "Theorem1"
    assert (tmp_path / "curve.csv").exists()
    assert json.loads((tmp_path / "verdict.json").read_text())["pass"] is True
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert set(man["files"]) == {"curve.csv", "verdict.json"}
    assert man["counters"]["panels"] > 0


def test_meansquare_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(capsys, "meansquare", "--sigma", "1.8", "--Tmax", "30",
                   "--out-dir", str(d), "--workers", "2")[0] == 0
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    assert ma["files"] == mb["files"]
    assert (a / "curve.csv").read_bytes() == (b / "curve.csv").read_bytes()


def test_meansquare_insufficient(capsys, tmp_path):
    code, _, err = run(capsys, "meansquare", "--sigma", "2.5", "--Tmax", "1",
                       "--out-dir", str(tmp_path))
    assert code == 1
    assert "InsufficientSignal" in err
    (r,) = rows((tmp_path / "curve.csv").read_text())
    assert float(r["T"]) == 1.0 and float(r["I"]) == 0.0


def test_sweep(capsys, caplog, tmp_path):
    code, out, err = run(capsys, "sweep", "--sigmas", "1.8,2.5,1.8", "--Tmax", "30",
                         "--out-dir", str(tmp_path))
    assert code == 0
    assert "duplicate sigma 1.8" in caplog.text
    verdicts = json.loads((tmp_path / "verdicts.json").read_text())
    assert [v["sigma"] for v in verdicts] == [1.8, 2.5]
    assert json.loads(out) == verdicts


def test_sweep_empty(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--sigmas", ","])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["sweep"])


def test_lemma_check(capsys):
    code, out, _ = run(capsys, "lemma-check", "--sigma", "2", "--x", "10,20,40,80")
    assert code == 0
    scaled = [float(r["scaled"]) for r in rows(out)]
    assert len(scaled) == 4 and max(scaled) <= 10 * scaled[0]


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# unit lattice\nsigma = 3\nmethod=direct\nalpha=2\n")
    assert parse_config_file(cfg) == {"sigma": "3", "method": "direct", "alpha": "2"}
    code, out, _ = run(capsys, "eval", "--config", str(cfg), "--alpha", "1")
    assert code == 0
    (r,) = rows(out)
    assert r["method"] == "DirectSeries"
    assert float(r["re"]) == pytest.approx(ZETA2, abs=1e-10)


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("sigmaa=3\n")
    code, _, err = run(capsys, "eval", "--config", str(cfg))
    assert code == 2 and "unknown key" in err


def test_eval_manifest(capsys, tmp_path):
    code, _, _ = run(capsys, "eval", "--sigma", "3", "--method", "hurwitz", "--out-dir", str(tmp_path))
    assert code == 0
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["command"] == "eval" and "eval.csv" in man["files"]
    assert len(man["config_hash"]) == 64
