from __future__ import annotations

import io
import json

import pytest

from heegnerpadic.cli import CACHE_ENV, ConfigError, RunConfig, parse_range, run

REF = ["--p", "3", "--n-minus", "2", "--n-plus", "1"]


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    return code, buf.getvalue()


@pytest.fixture(autouse=True)
def _no_cache(monkeypatch):
    monkeypatch.delenv(CACHE_ENV, raising=False)


def test_parse_range():
    assert parse_range("0..n", 2) == [0, 1, 2]
    assert parse_range("1..n+1", 4) == [1, 2, 3, 4, 5]
    assert parse_range("0,2", 2) == [0, 2]
    assert parse_range("3", 2) == [3]


def test_graph():
    code, out = call("graph", *REF)
    rep = json.loads(out)["result"]
    assert code == 0
    assert rep["connected"] and rep["betti_number"] == 0 == rep["genus_oracle"]
    assert rep["mass_check"]


def test_basis_and_hecke():
    code, out = call("basis", *REF, "--weight", "4")
    assert code == 0 and json.loads(out)["result"]["dimension"] == 1
    code, out = call("hecke", *REF, "--weight", "4", "--ell", "3,5,7")
    res = json.loads(out)["result"]
    assert code == 0 and res["commute"]
    assert res["eigenvalues"] == {"3": "-3", "5": "6", "7": "-16"}


def test_theorem_check_command():
    code, out = call("theorem-check", *REF, "--weight", "4", "--j", "0..2", "--depth", "5", "--field-disc", "-19",
                     "--threads", "3")
    res = json.loads(out)["result"]
    assert code == 0
    assert [c["j"] for c in res["checks"]] == [0, 1, 2]
    assert all(c["agreement_valuation"] >= 5 for c in res["checks"])


@pytest.mark.parametrize("argv, fragment", [
    (["lfun", "--weight", "2", "--field-disc", "-19"], "weight 2"),
    (["lfun", "--weight", "5", "--field-disc", "-19"], "weight 5"),
    (["lfun", "--weight", "4", "--field-disc", "-20"], "coprime"),
    (["lfun", "--weight", "4", "--field-disc", "-7"], "not inert"),
    (["lfun", "--weight", "4"], "field-disc"),
    (["graph", "--p", "4"], "odd prime"),
])
def test_config_errors(argv, fragment):
    code, out = call(*argv)
    rep = json.loads(out)
    assert code == 2
    assert rep["error"]["type"] == "ConfigError"
    assert fragment in rep["error"]["message"]


def test_class_number_guard():
    # -115 satisfies the Heegner conditions for (3, 2, 1) but has class number 2
    cfg = RunConfig(p=3, n_minus=2, weight=4, field_disc=-115)
    with pytest.raises(ConfigError, match="class number"):
        cfg.validate("lfun")


def test_determinism():
    argv = ["lderiv", *REF, "--weight", "4", "--field-disc", "-19", "--depth", "3", "--j", "0,2"]
    assert call(*argv)[1] == call(*argv)[1]


def test_threads_do_not_change_output():
    argv = ["lderiv", *REF, "--weight", "4", "--field-disc", "-19", "--depth", "2", "--j", "0..2"]
    assert call(*argv)[1] == call(*argv, "--threads", "3")[1]


def test_cache_matches_fresh(tmp_path, monkeypatch):
    argv = ["aj", *REF, "--weight", "4", "--field-disc", "-19", "--depth", "2", "--j", "0"]
    fresh = call(*argv)[1]
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    first = call(*argv)[1]
    assert list(tmp_path.glob("*.pkl"))
    second = call(*argv)[1]
    assert fresh == first == second
    assert call(*argv, "--no-cache")[1] == fresh


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# reference instance\np = 3\nn-minus = 2\nweight = 4\nfield_disc = -19\ndepth = 4\n")
    code, out = call("lfun", "--config", str(cfg), "--depth", "2")
    rep = json.loads(out)
    assert code == 0
    assert rep["config"]["depth"] == 2 and rep["config"]["field_disc"] == -19
    assert all(v["exact_zero"] for v in rep["result"]["values"])


def test_csv_output(tmp_path):
    path = tmp_path / "conv.csv"
    code, _ = call("lderiv", *REF, "--weight", "4", "--field-disc", "-19", "--depth", "3", "--j", "0", "--csv", str(path))
    lines = path.read_text().splitlines()
    assert code == 0 and lines[0] == "depth,value,error,diff_valuation" and len(lines) == 4


def test_phimod_selftest():
    code, out = call("phimod-selftest", "--count", "10")
    res = json.loads(out)["result"]
    assert code == 0 and res["roundtrip_failures"] == [] and res["stalk_valid"]
