import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from artifact.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, parse_expansion
from artifact.report import KEY_ORDER
from artifact.spectral import DegreeMultiplier, HermiteExpansion


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


# --------------------------------------------------------------------------
# verify


def test_verify_specfun_all_pass_json(capsys):
    code, out, err = run(["verify", "--suite", "specfun", "--format", "json"], capsys)
    assert code == EXIT_OK
    data = json.loads(out)
    assert data and all(r["pass"] for r in data)
    assert list(data[0]) == list(KEY_ORDER)
    ids = [r["id"] for r in data]
    assert ids == sorted(ids)
    assert "checks passed" in err


def test_verify_failure_exit_code_and_equality_check(capsys):
    code, out, err = run(["verify", "--suite", "hardy", "--n", "1", "--s", "0.5", "--rho", "1"], capsys)
    assert code == EXIT_FAIL
    ids = [r["id"] for r in json.loads(out)]
    assert any(i.startswith("hardy/equality/") for i in ids)
    assert "FAIL hardy/" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--suite", "hardy", "--s", ""],
        ["verify", "--suite", "hardy", "--s", "abc"],
        ["verify", "--suite", "hardy", "--s", "1.5"],
        ["verify", "--suite", "nope"],
        ["verify", "--tol", "-1"],
        [],
    ],
)
def test_verify_usage_errors(argv, capsys):
    code, _, _ = run(argv, capsys)
    assert code == EXIT_USAGE


def test_verify_csv_format(capsys):
    code, out, _ = run(["verify", "--suite", "bergman", "--s", "0.5", "--format", "csv"], capsys)
    assert code in (EXIT_OK, EXIT_FAIL)
    table = rows(out)
    assert table[0] == list(KEY_ORDER)
    assert "\r" not in out
    assert {r[6] for r in table[1:]} <= {"true", "false"}


def test_verify_reproducible_and_thread_invariant(tmp_path, monkeypatch):
    outs = []
    for threads in ("1", "1", "3"):
        monkeypatch.setenv("OUFRAC_THREADS", threads)
        path = tmp_path / f"r{len(outs)}.json"
        main(["verify", "--suite", "isometry", "--out", str(path)])
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# bergman only\nsuite = bergman\ns = 0.5\nformat = csv\n", encoding="utf-8")
    code, out, _ = run(["verify", "--config", str(cfg), "--format", "json"], capsys)
    data = json.loads(out)
    assert all(r["id"].startswith("bergman/") for r in data)
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n", encoding="utf-8")
    assert run(["verify", "--config", str(bad)], capsys)[0] == EXIT_USAGE
    assert run(["verify", "--config", str(tmp_path / "missing.cfg")], capsys)[0] == EXIT_USAGE


def test_tol_override_applies(capsys):
    _, out, _ = run(["verify", "--suite", "bergman", "--s", "0.5", "--tol", "1e-30"], capsys)
    data = {r["id"]: r for r in json.loads(out)}
    assert not data["bergman/laguerre_asymptotic/alpha=2/r=-1"]["pass"]


# --------------------------------------------------------------------------
# tabulate


def test_tabulate_hardy_weight(capsys):
    code, out, _ = run(["tabulate", "hardy_weight", "--grid", "0.1:10:50"], capsys)
    assert code == EXIT_OK
    table = rows(out)
    assert table[0] == ["t", "w"] and len(table) == 51
    w = np.array([float(r[1]) for r in table[1:]])
    assert np.all(w >= 1) and np.all(np.diff(w) < 0)


def test_tabulate_multipliers(capsys):
    _, out, _ = run(["tabulate", "multipliers", "--n", "2", "--s", "0.3"], capsys)
    table = rows(out)
    assert table[0] == ["k", "Ls", "Us"] and len(table) == 52
    data = np.array([[float(v) for v in r] for r in table[1:]])
    assert np.all(np.diff(data[:, 1]) > 0) and np.all(np.diff(data[:, 2]) > 0)


@pytest.mark.parametrize("what", ["hardy_weight", "phi", "multipliers", "g_kernel", "sequence_weight"])
def test_tabulate_empty_grid_header_only(what, capsys):
    code, out, _ = run(["tabulate", what, "--grid", ""], capsys)
    assert code == EXIT_OK and len(out.splitlines()) == 1


def test_tabulate_full_precision_and_errors(capsys):
    _, out, _ = run(["tabulate", "g_kernel", "--grid", "1"], capsys)
    assert float(rows(out)[1][1]) == pytest.approx(0.46106850444789455844, rel=1e-15)
    assert run(["tabulate", "multipliers", "--grid", "0.5"], capsys)[0] == EXIT_USAGE
    assert run(["tabulate", "hardy_weight", "--s", "2"], capsys)[0] == EXIT_USAGE
    assert run(["tabulate", "phi", "--grid", "1:2"], capsys)[0] == EXIT_USAGE
    assert run(["tabulate", "phi", "--n", ""], capsys)[0] == EXIT_USAGE


# --------------------------------------------------------------------------
# solve-export


def test_parse_expansion():
    e = parse_expansion("H0 - 0.5*H2")
    assert e.dim == 1 and e[(0,)] == 1.0 and e[(2,)] == -0.5
    e = parse_expansion("2*H(1,0) + H(0,2)", cutoff=4)
    assert e.dim == 2 and e.cutoff == 4 and e[(1, 0)] == 2.0
    for bad in ("", "H0 H1", "X2", "H(1,0) + H3"):
        with pytest.raises(ValueError):
            parse_expansion(bad)


def test_solve_export_decay_in_rho(capsys):
    code, out, _ = run(["solve-export", "--f", "H0", "--rho", "0.1,0.5,1,1.5,2"], capsys)
    assert code == EXIT_OK
    table = rows(out)
    assert table[0] == ["rho", "alpha", "coefficient"]
    vals = [float(r[2]) for r in table[1:]]
    assert np.all(np.diff(vals) < 0)


def test_solve_export_file_round_trip(tmp_path, capsys):
    saved = tmp_path / "f.json"
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    assert main(["solve-export", "--f", "H(0,0) - 0.25*H(2,0)", "--save-f", str(saved), "--format", "json", "--out", str(out1)]) == 0
    assert HermiteExpansion.from_json(saved.read_text()) == parse_expansion("H(0,0) - 0.25*H(2,0)")
    assert main(["solve-export", "--f-file", str(saved), "--format", "json", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_solve_export_neumann_column(capsys):
    _, out, _ = run(["solve-export", "--f", "H1", "--s", "0.5", "--rho", "0.5", "--neumann"], capsys)
    table = rows(out)
    assert table[0] == ["rho", "alpha", "coefficient", "neumann_limit"]
    # at s = 1/2 the boundary constant is -1, so the limit is -L_s applied to the mode
    assert float(table[1][3]) == pytest.approx(-DegreeMultiplier("Ls", 1, 0.5)(1), rel=1e-3)
    _, out, _ = run(["solve-export", "--f", "H1", "--rho", "0.5", "--neumann", "--format", "json"], capsys)
    assert "neumann" in json.loads(out)


@pytest.mark.parametrize(
    "argv",
    [
        ["solve-export"],
        ["solve-export", "--f", "H0", "--f-file", "x.json"],
        ["solve-export", "--f", "Q0"],
        ["solve-export", "--f", "H0", "--rho", ""],
        ["solve-export", "--f", "H0", "--s", ""],
        ["solve-export", "--f", "H0", "--s", "1.2"],
        ["solve-export", "--f-file", "/nonexistent/f.json"],
        ["solve-export", "--f", "H0", "--variant", "H", "--neumann"],
    ],
)
def test_solve_export_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == EXIT_USAGE


def test_console_entry_point_module():
    proc = subprocess.run(
        [sys.executable, "-m", "artifact.cli", "tabulate", "g_kernel", "--grid", "1,2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("r,G\n")
