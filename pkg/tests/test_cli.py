import csv
import io
import subprocess
import sys

import numpy as np
import pytest
from scipy.integrate import trapezoid

from dipolefront.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, _merge, build_parser, main
from dipolefront.fields import radial_coefficients

PROFILE_HEADER = "# t_over_eps, r_over_eps, coeffA, coeffB_rad, coeffB_tan, coeffE, coeffA_static, coeffA_point"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fields_csv(capsys):
    code, out, _ = run(capsys, "fields", "--t", "10", "--rmin", "1", "--rmax", "12", "--n", "12")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == PROFILE_HEADER
    rows = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    assert rows.shape == (12, 8)
    np.testing.assert_allclose(rows[:, 2], radial_coefficients(1.0, rows[:, 1], 10.0).a, rtol=1e-15)


def test_fields_to_file(tmp_path, capsys):
    out = tmp_path / "f.csv"
    code, stdout, _ = run(capsys, "fields", "--t", "2,5", "--n", "5", "--out", str(out))
    assert code == EXIT_OK and stdout == ""
    assert len(out.read_text().splitlines()) == 11


def test_observe_csv(capsys):
    code, out, _ = run(capsys, "observe", "--t", "0,1,100", "--format", "csv")
    assert code == EXIT_OK
    head = dict(ln[2:].split(" = ") for ln in out.splitlines() if ln.startswith("# "))
    assert float(head["E_tilde"]) == pytest.approx(-0.021164545311413657, rel=1e-15)
    body = [ln for ln in out.splitlines() if not ln.startswith("#")]
    assert body[0] == "t_over_eps, H0, H1, H_total, N, sigma_N"
    r1 = [float(x) for x in body[2].split(",")]
    assert r1[4] == pytest.approx(0.02447847044835552, rel=1e-14)
    assert r1[3] == 0.0
    assert body[1].split(", ")[1] == "0"


def test_observe_quadrature_matches(capsys):
    _, a, _ = run(capsys, "observe", "--t", "2", "--format", "csv")
    _, b, _ = run(capsys, "observe", "--t", "2", "--format", "csv", "--source", "quadrature", "--tol", "1e-11")
    va = [float(x) for x in a.splitlines()[-1].split(",")]
    vb = [float(x) for x in b.splitlines()[-1].split(",")]
    np.testing.assert_allclose(va, vb, rtol=1e-8)


def test_observe_text(capsys):
    code, out, _ = run(capsys, "observe", "--mu", "2", "--eps", "0.5")
    assert code == EXIT_OK and "sigma_E" in out and "-0" not in out.split()


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# run\nmu = 2\nt = 1, 2\nformat = csv\n")
    code, out, _ = run(capsys, "observe", "--config", str(cfg), "--mu", "1")
    assert code == EXIT_OK
    head = dict(ln[2:].split(" = ") for ln in out.splitlines() if ln.startswith("# "))
    assert float(head["mu"]) == 1.0  # flag beats config
    assert len([ln for ln in out.splitlines() if not ln.startswith("#")]) == 3


@pytest.mark.parametrize("argv", [
    ["observe", "--eps", "0"],
    ["observe", "--t", "-1"],
    ["observe", "--mu", "abc"],
    ["observe", "--tol", "0"],
    ["table", "custom"],
    ["table", "custom", "--beta", "1", "--check"],
    ["table", "nowhere"],
    ["table", "microscopic", "--constants", "other"],
    ["figure", "fig2", "--n", "1"],
    ["figure", "fig2", "--tmax", "-1"],
    ["verify", "--only", "nope"],
    ["observe", "--config", "/nonexistent/file.cfg"],
])
def test_usage_errors(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert err.startswith("dipolefront: error:")


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("rmax = 3\n")
    assert run(capsys, "observe", "--config", str(cfg))[0] == EXIT_USAGE
    cfg.write_text("no equals sign\n")
    assert run(capsys, "observe", "--config", str(cfg))[0] == EXIT_USAGE


def test_table(capsys):
    code, out, err = run(capsys, "table", "microscopic", "--format", "csv", "--check")
    assert code == EXIT_OK
    rows = {r["quantity"]: r for r in csv.DictReader(io.StringIO(out))}
    assert float(rows["energy"]["static"]) == pytest.approx(-2.8e-2, rel=0.05)
    assert err.count("PASS") >= 9 and "FAIL" not in err


def test_table_rounded_constants_fail_5_percent(capsys):
    code, _, err = run(capsys, "table", "microscopic", "--constants", "rounded", "--check")
    assert code == EXIT_FAIL and "FAIL photons (expanding)" in err
    code, _, _ = run(capsys, "table", "microscopic", "--constants", "rounded", "--check", "--check-rel", "0.1")
    assert code == EXIT_OK


def test_table_custom(capsys):
    code, out, _ = run(capsys, "table", "custom", "--beta", "2e-3", "--eps-m", "1e-15", "--format", "csv")
    assert code == EXIT_OK
    rows = {r["quantity"]: r for r in csv.DictReader(io.StringIO(out))}
    assert float(rows["energy"]["static"]) == pytest.approx(4 * -2.8e-2, rel=0.05)


def test_figures(capsys):
    code, out, err = run(capsys, "figure", "fig2", "--n", "31", "--tmax", "30")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "# t_over_eps, N_over_N_tilde, asymptote"
    last = [float(x) for x in lines[-1].split(",")]
    assert last[1] == pytest.approx(last[2], rel=1e-5)
    assert "N(t) / N~" in err
    code, out, _ = run(capsys, "figure", "fig1", "--n", "20")
    assert code == EXIT_OK and out.splitlines()[0] == PROFILE_HEADER


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--list")
    assert code == EXIT_OK and "lattice" in out.split()
    code, out, _ = run(capsys, "verify", "--only", "special,static")
    assert code == EXIT_OK and out.strip().endswith("checks passed")
    code, out, _ = run(capsys, "verify", "--only", "integral-families", "--tol", "1e-30")
    assert code == EXIT_FAIL and "NOCONV" in out


def test_console_entry_point():
    p = subprocess.run([sys.executable, "-m", "dipolefront.cli", "verify", "--list"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and "special" in p.stdout


def test_missing_subcommand():
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 2


def test_deterministic_outputs(tmp_path, capsys):
    paths = [tmp_path / f"{i}.csv" for i in range(2)]
    for p in paths:
        assert main(["fields", "--t", "3,10", "--n", "200", "--out", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    for p in paths:
        assert main(["observe", "--t", "0.5,2,40", "--format", "csv", "--out", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_fig1_electric_column_integrates_to_zero(capsys):
    code, out, _ = run(capsys, "figure", "fig1", "--n", "4000", "--rmin", "0.02", "--rmax", "20")
    assert code == EXIT_OK
    rows = np.array([[float(x) for x in ln.split(",")] for ln in out.splitlines()[1:]])
    r, e = rows[:, 1], rows[:, 5]
    assert abs(trapezoid(e, r)) <= 1e-6 * trapezoid(np.abs(e), r)



def test_config_sets_source(tmp_path):
    cfg = tmp_path / "q.cfg"
    cfg.write_text("source = quadrature\n")
    parser = build_parser()
    assert _merge(parser.parse_args(["observe", "--config", str(cfg)]), parser).source == "quadrature"
    assert _merge(parser.parse_args(["observe"]), parser).source == "closed-form"
    args = parser.parse_args(["observe", "--config", str(cfg), "--source", "closed-form"])
    assert _merge(args, parser).source == "closed-form"
