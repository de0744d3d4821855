import csv
import io
import json

import numpy as np
import pytest

from pvisym import cli
from pvisym.pvi_core import OMEGA


def run(*argv):
    buf = io.StringIO()
    code = cli.run(list(argv), stream=buf)
    return code, buf.getvalue()


def tables(text):
    """Split CSV output into {schema: (meta line, rows)}."""
    out = {}
    for block in text.strip().split("\n\n"):
        lines = block.strip().splitlines()
        schema = lines[0].split()[1].split("=", 1)[1]
        out[schema] = (lines[0], list(csv.DictReader(lines[1:])))
    return out


def c(row, name):
    return complex(float(row[f"{name}_re"]), float(row[f"{name}_im"]))


def test_series_example():
    code, text = run("series", "--branch", "S2-1", "--order", "6", "--params", "0.1", "0.2", "0.15")
    assert code == 0
    meta, rows = tables(text)["pvisym.series"]
    assert "version=1" in meta and "branch=S2-1" in meta
    assert [int(r["order"]) for r in rows] == list(range(7))
    assert abs(c(rows[1], "y") - 0.9) < 1e-14


def test_series_order_zero():
    _, text = run("series", "--branch", "S2-1", "--order", "0", "--params", "0.1", "0.2", "0.15")
    rows = tables(text)["pvisym.series"][1]
    assert len(rows) == 1 and c(rows[0], "y") == 0.5


def test_series_s32():
    code, text = run("series", "--branch", "S3-2", "--order", "4", "--params", "0.1", "0.2", "0.2")
    assert code == 0
    meta, rows = tables(text)["pvisym.series"]
    assert "omega=exp(2*pi*i/3)" in meta
    a0 = 0.1
    assert abs(c(rows[2], "y") - (1 + 2 * OMEGA) / 3 * a0 * (1 - a0)) < 1e-12


def test_json_format():
    code, text = run("series", "--branch", "S2-1", "--order", "2", "--params", "0.1", "0.2", "0.15", "--format", "json")
    assert code == 0
    doc = json.loads(text)
    assert doc["schema"] == "pvisym.series" and doc["version"] == 1
    assert doc["records"][1]["y_re"] == pytest.approx(0.9)


def test_out_file(tmp_path):
    path = tmp_path / "s.csv"
    code, text = run("series", "--branch", "S2-1", "--order", "1", "--params", "0.1", "0.2", "0.15", "--out", str(path))
    assert code == 0 and text == ""
    assert path.read_text().startswith("# schema=pvisym.series")


def test_wrong_stratum():
    code, _ = run("series", "--branch", "S2-1", "--params", "0.1", "0.2", "0.2", "0.15", "0.2")
    assert code == 2
    code, _ = run("monodromy", "--family", "sigma2sigma1", "--params", "0.1", "0.2", "0.15")
    assert code == 2


def test_bad_arguments():
    assert run("series", "--branch", "S9-9")[0] == 2
    assert run("backlund", "--word", "s7", "--state", "0.3", "0.1", "0.4", "--params", "0.1", "0.2", "0.15")[0] == 2
    assert run("series", "--branch", "S2-1", "--params", "0.1", "zz", "0.15")[0] == 2


def test_monodromy_both_sigma1():
    code, text = run("monodromy", "--family", "sigma1", "--mode", "both", "--params", "0.13", "0.31", "0.17")
    assert code == 0
    rows = {r["trace"]: r for r in tables(text)["pvisym.monodromy.compare"][1]}
    assert float(rows["max"]["deviation"]) < 1e-7
    assert float(rows["ring_defect_numeric"]["deviation"]) < 1e-8


def test_monodromy_both_sigma2sigma1():
    code, text = run("monodromy", "--family", "sigma2sigma1", "--mode", "both", "--params", "0.12", "0.21", "0.21")
    assert code == 0
    rows = {r["trace"]: r for r in tables(text)["pvisym.monodromy.compare"][1]}
    assert float(rows["max"]["deviation"]) < 1e-7


def test_monodromy_exact_resonant():
    # alpha3 = 0 is logarithmic (integer exponent difference): rejected
    code, _ = run("monodromy", "--family", "sigma1", "--mode", "exact", "--params", "0.13", "0.31", "0")
    assert code == 2
    code, text = run("monodromy", "--family", "sigma1", "--mode", "exact", "--params", "0.13", "0.31", "1e-7")
    assert code == 0
    rows = tables(text)["pvisym.monodromy.exact"][1]
    m0 = {r["entry"]: c(r, "value") for r in rows if r["loop"] == "0"}
    mat = np.array([[m0["00"], m0["01"]], [m0["10"], m0["11"]]])
    assert abs(np.trace(mat) - 2) < 1e-5 and abs(np.linalg.det(mat) - 1) < 1e-5


def test_fricke_sigma1():
    code, text = run("fricke", "--family", "sigma1", "--samples", "50", "--seed", "7")
    assert code == 0
    t = tables(text)
    assert len(t["pvisym.fricke.samples"][1]) == 200
    assert all(float(r["residual"]) < 1e-10 for r in t["pvisym.fricke.samples"][1])
    assert all(r["status"] == "pass" for r in t["pvisym.verify"][1])


def test_fricke_sigma2sigma1():
    code, text = run("fricke", "--family", "sigma2sigma1", "--samples", "20")
    assert code == 0
    rows = tables(text)["pvisym.fricke.samples"][1]
    assert max(float(r["factor_mismatch"]) for r in rows) < 1e-9


def test_fricke_identity():
    code, text = run("fricke", "--identity")
    assert code == 0
    rows = {r["quantity"]: float(r["value"]) for r in tables(text)["pvisym.fricke.identity"][1]}
    assert rows["residual"] < 1e-15 and rows["p01"] == 2


def test_backlund_command():
    code, text = run("backlund", "--word", "sig1", "--state", "0.3", "0.2", "0.4", "--params", "0.1", "0.2", "0.15")
    assert code == 0
    rows = {r["quantity"]: c(r, "after") for r in tables(text)["pvisym.backlund"][1]}
    assert abs(rows["y"] - 0.7) < 1e-14 and abs(rows["z"] + 0.2) < 1e-14 and abs(rows["t"] - 0.6) < 1e-14


def test_integrate_command():
    code, text = run("integrate", "--branch", "S2-1", "--to", "0.4", "--steps", "2", "--params", "0.1", "0.2", "0.15")
    assert code == 0
    rows = tables(text)["pvisym.trajectory"][1]
    assert len(rows) == 3
    h = [c(r, "H") for r in rows]
    assert all(np.isfinite(abs(v)) for v in h)


def test_integrate_pole_exit_code():
    code, _ = run("integrate", "--branch", "S2-3", "--t0", "0.56", "--to", "0.44", "--params", "0.13", "0.31", "0.17")
    assert code == 1


def test_verify_backlund():
    code, text = run("verify", "--suite", "backlund", "--seed", "1")
    assert code == 0
    assert all(r["status"] == "pass" for r in tables(text)["pvisym.verify"][1])


def test_determinism():
    args = ("fricke", "--family", "sigma2sigma1", "--samples", "5", "--seed", "3")
    assert run(*args)[1] == run(*args)[1]
    assert run(*args)[1] != run("fricke", "--family", "sigma2sigma1", "--samples", "5", "--seed", "4")[1]


def test_params_parsing():
    p = cli.params_from_values([0.1, 0.2, 0.15])
    assert p.alpha4 == p.alpha3 == 0.15
    p = cli.params_from_values([0.1, 0.2, 0.2])
    cli.require_family(p, "sigma2sigma1")
    assert cli.parse_complex("0.1-0.2j") == 0.1 - 0.2j
    with pytest.raises(cli.UsageError):
        cli.params_from_values([0.1, 0.2, 0.3, 0.4])
