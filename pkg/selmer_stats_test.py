''' End-to-end runs of the command line front end. '''
import json
from fractions import Fraction

import pytest

from selmer_stats import main


def _read(path):
    with open(path) as f:
        return f.read()


def test_dist_table(tmp_path):
    out = tmp_path / "dist.csv"
    assert main(["dist", "--case", "alternating", "--n", "4", "--out", str(out)]) == 0
    text = _read(out)
    assert "# seed: 0" in text
    assert "# config_hash: " in text
    assert "all,0,7/16," in text
    assert "all,2,35/64," in text
    assert "all,4,1/64," in text


def test_output_is_reproducible(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["moments", "--max_m", "2", "--trials", "2000", "--n", "6", "--seed", "5"]
    assert main(argv + ["--out", str(first)]) == 0
    assert main(argv + ["--out", str(second), "--workers", "2"]) == 0
    assert _read(first) == _read(second)


def test_params_file_fills_defaults(tmp_path):
    params = tmp_path / "params.json"
    params.write_text(json.dumps({"seed": 11}))
    out = tmp_path / "out.csv"
    assert main(["dist", "--n", "2", "--params-file", str(params), "--out", str(out)]) == 0
    assert "# seed: 11" in _read(out)
    assert main(["dist", "--n", "2", "--params-file", str(params), "--seed", "3", "--out", str(out)]) == 0
    assert "# seed: 3" in _read(out)


def test_invert_document(tmp_path):
    out = tmp_path / "inv.json"
    assert main(["invert", "--moments", "1,2,4", "--ell", "2", "--out", str(out)]) == 0
    doc = json.loads(_read(out))
    entries = {row["j"]: (row["p_num"], row["p_den"]) for row in doc["distribution"]["entries"]}
    assert entries[1] == (1, 1)
    assert entries[0] == (0, 1)
    assert doc["header"]["version"]


def test_invert_coefficient_bounds_use_given_bound(tmp_path):
    out = tmp_path / "inv.json"
    argv = ["invert", "--moments", "1,3,15", "--j_max", "2", "--out", str(out)]
    assert main(argv + ["--eps", "0"]) == 2
    assert main(argv + ["--bound", "135", "--eps", "0"]) == 0
    doc = json.loads(_read(out))
    assert doc["moments"]["bound"] == "135"
    assert doc["coefficient_bounds"]["B"] == "135"
    assert doc["coefficient_bounds"]["mode"] == "unsigned"
    bounds = [Fraction(b) for b in doc["coefficient_bounds"]["bounds"]]
    assert all(b <= Fraction(135) / 8 ** i for i, b in enumerate(bounds))
    assert main(argv + ["--signed", "1,1,1", "--bound", "135", "--eps", "0"]) == 0
    assert json.loads(_read(out))["coefficient_bounds"]["mode"] == "signed"
    # B below the largest node value
    assert main(argv + ["--bound", "2", "--eps", "0"]) == 1


def test_module_document(tmp_path):
    out = tmp_path / "module.json"
    assert main(["module", "--fixture", "sign", "--profile", "sigma,sigma", "--out", str(out)]) == 0
    doc = json.loads(_read(out))
    assert doc["submodules"] == 2
    assert doc["profile"]["favored"]


def test_descend_records(tmp_path):
    out = tmp_path / "twists.csv"
    assert main(["descend", "--curve", "full2torsion:1,-1", "--dmax", "7", "--out", str(out)]) == 0
    lines = [l for l in _read(out).splitlines() if not l.startswith("#")]
    assert lines[0] == "d,selmer2_dim,r,parity_bucket,favored,maxT"
    rows = {int(l.split(",")[0]): int(l.split(",")[1]) for l in lines[1:]}
    assert rows[1] == 2 and rows[5] == 3 and rows[-6] == 3


def test_descend_klagsbrun(tmp_path):
    out = tmp_path / "k.json"
    assert main(["descend", "--curve", "klagsbrun:1,2", "--dmax", "17", "--positive_only", "--dmin", "11",
                 "--format", "json", "--out", str(out)]) == 0
    rows = {r["d"]: r["favored"] for r in json.loads(_read(out))["rows"]}
    assert rows[11] and not rows[17]


def test_refused_curve_exits_one(tmp_path):
    out = tmp_path / "x.csv"
    assert main(["descend", "--curve", "1,4", "--dmax", "10", "--report", "distribution", "--out", str(out)]) == 1


def test_usage_errors_exit_two():
    assert main(["dist", "--no-such-flag"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["descend", "--curve", "weierstrass:1,2", "--dmax", "3"]) == 2


def test_verify_oracle(tmp_path):
    out = tmp_path / "verify.json"
    assert main(["verify", "--suite", "oracle", "--format", "json", "--out", str(out)]) == 0
    assert all(row["passed"] for row in json.loads(_read(out))["rows"])


if __name__ == '__main__':
    pytest.main([__file__])
