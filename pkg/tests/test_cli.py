import json
import math

import pytest

from chamber_bessel.cli import EXIT_ABORT, EXIT_CHECK, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, main
from chamber_bessel.kernels import grabiner_D


@pytest.fixture(autouse=True)
def _keep_env(monkeypatch):
    # --cache-dir writes to os.environ; undo it after each test
    monkeypatch.setenv("CHAMBER_BESSEL_CACHE", __import__("os").environ["CHAMBER_BESSEL_CACHE"])


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_density_json(capsys):
    code, out, _ = run(capsys, "eval", "density", "--kind", "D", "--x", "1.3,0.4", "--y", "0.9,0.6", "--t", "0.5")
    assert code == EXIT_OK
    rec = json.loads(out)
    assert set(rec) == {"command", "config", "value", "layers_used", "converged"}
    assert rec["value"] == pytest.approx(grabiner_D(0.5, [1.3, 0.4], [0.9, 0.6]), rel=1e-10)
    assert rec["config"]["kind"] == "D" and rec["config"]["t"] == 0.5


def test_eval_bessel_rank_one_csv(capsys):
    code, out, _ = run(capsys, "eval", "bessel", "--kind", "B", "--k0", "1", "--x", "0.8", "--y", "1.3",
                       "--format", "csv")
    assert code == EXIT_OK
    header, row = out.strip().splitlines()
    assert header == "value,layers_used,converged"
    assert float(row.split(",")[0]) == pytest.approx(math.sinh(1.04) / 1.04, rel=1e-13)


@pytest.mark.parametrize("argv,expected", [
    (["eval", "bessel", "--x", "1,0.5"], EXIT_USAGE),
    (["eval", "bessel", "--x", "1,0.5", "--y", "1,nan"], EXIT_USAGE),
    (["eval", "bessel", "--x", "1,0.5", "--y", "1,0.5,0.2"], EXIT_USAGE),
    (["eval", "density", "--x", "1,0.5", "--y", "0.5,1"], EXIT_DOMAIN),
    (["eval", "density", "--x", "1,0.5", "--y", "1,0.5", "--t", "-1"], EXIT_DOMAIN),
    (["verify", "nosuch"], EXIT_USAGE),
    (["simulate", "--y0", "1.5,0.5", "--paths", "0"], EXIT_USAGE),
    (["frobnicate"], EXIT_USAGE),
])
def test_exit_codes(capsys, argv, expected):
    assert run(capsys, *argv)[0] == expected


def test_simulation_abort_exit_code(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", "--kind", "A", "--k1", "0.5", "--y0", "1e-3,0", "--dt", "0.5",
                       "--paths", "200", "--max-retries", "1", "--out", str(tmp_path / "x"))
    assert code == EXIT_ABORT and "reduce dt" in err
    assert not (tmp_path / "x.csv").exists()


def test_verify_json_summary(capsys, tmp_path):
    out_json = tmp_path / "out.json"
    code, out, _ = run(capsys, "verify", "shift", "--json", str(out_json))
    assert code == EXIT_OK
    doc = json.loads(out_json.read_text())
    assert doc["suite"] == "shift" and doc["passed"]
    assert doc["checks"] and set(doc["checks"][0]) == {"name", "residual", "tolerance", "pass"}
    assert all(line.startswith("PASS") for line in out.splitlines()[:-1])


def test_verify_failing_check_exits_nonzero(capsys):
    code, out, _ = run(capsys, "verify", "shift", "--printed-constant")
    assert code == EXIT_CHECK
    assert "FAIL" in out


def _simulate(capsys, prefix, *extra):
    return run(capsys, "simulate", "--kind", "B", "--k1", "1", "--k0", "1", "--y0", "1.5,0.5", "--t", "0.5",
               "--dt", "0.01", "--paths", "400", "--seed", "42", "--out", str(prefix), *extra)


def test_simulate_rerun_is_byte_identical(capsys, tmp_path):
    assert _simulate(capsys, tmp_path / "a")[0] == EXIT_OK
    assert _simulate(capsys, tmp_path / "b")[0] == EXIT_OK
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    ja, jb = (json.loads((tmp_path / f"{p}.json").read_text()) for p in "ab")
    ja["cli"].pop("out"), jb["cli"].pop("out")
    assert ja == jb
    assert (tmp_path / "a.csv").read_text().startswith("path,y1,y2\n")


def test_simulate_json_matches_csv(capsys, tmp_path):
    _simulate(capsys, tmp_path / "r")
    rec = json.loads((tmp_path / "r.json").read_text())
    assert rec["config"]["seed"] == 42 and rec["config"]["n_paths"] == 400
    rows = (tmp_path / "r.csv").read_text().splitlines()[1:]
    p1 = sum(float(a) ** 2 + float(b) ** 2 for _, a, b in (r.split(",") for r in rows)) / len(rows)
    assert rec["moments"][0]["estimate"] == pytest.approx(p1, rel=1e-14)


def test_simulate_compare(capsys, tmp_path):
    code, out, _ = _simulate(capsys, tmp_path / "c", "--compare", "--paths", "4000")
    assert code == EXIT_OK
    assert out.count("PASS") == 3
    rec = json.loads((tmp_path / "c.json").read_text())
    assert len(rec["comparison"]) == 3


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[defaults]\nkind = B\nk0 = 1\n\n[eval]\nformat = csv\n")
    code, out, _ = run(capsys, "--config", str(cfg), "eval", "bessel", "--x", "0.8", "--y", "1.3")
    assert code == EXIT_OK and out.startswith("value,")
    assert float(out.splitlines()[1].split(",")[0]) == pytest.approx(math.sinh(1.04) / 1.04, rel=1e-13)
    # flags beat the file
    code, out, _ = run(capsys, "--config", str(cfg), "eval", "bessel", "--x", "0.8", "--y", "1.3",
                       "--k0", "0", "--format", "json")
    assert json.loads(out)["value"] == pytest.approx(math.cosh(1.04), rel=1e-13)


def test_bad_config(capsys, tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[eval]\nnonsense = 1\n")
    assert run(capsys, "--config", str(cfg), "eval", "bessel", "--x", "1", "--y", "1")[0] == EXIT_USAGE
    cfg.write_text("[nowhere]\nkind = A\n")
    assert run(capsys, "--config", str(cfg), "eval", "bessel", "--x", "1", "--y", "1")[0] == EXIT_USAGE
    assert run(capsys, "--config", str(tmp_path / "missing.ini"), "verify", "shift")[0] == EXIT_USAGE


def test_calibrate_detrep(capsys, tmp_path):
    code, out, _ = run(capsys, "--cache-dir", str(tmp_path), "calibrate", "detrep", "--family", "F01",
                       "--m", "3", "--phi", "0.5")
    assert code == EXIT_OK
    assert json.loads(out)["kappa"] == pytest.approx(11.25, rel=1e-10)


def test_table_jack(capsys):
    code, out, _ = run(capsys, "table", "jack", "--m", "2", "--weight", "2", "--alpha", "1")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert len(lines) >= 3


def test_table_density_segment(capsys):
    code, out, _ = run(capsys, "table", "density", "--kind", "A", "--x", "1,0", "--y", "2,0.5", "--y-end",
                       "2,1.5", "--n", "5")
    assert code == EXIT_OK
    assert len(out.strip().splitlines()) == 6
