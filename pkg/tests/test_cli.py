import json
import subprocess
import sys

import pytest

from polydisc_toeplitz.cli import CONFIG_ENV, RunConfig, run
from polydisc_toeplitz.errors import InvalidInput
from polydisc_toeplitz.linalg import matrix_to_json
from polydisc_toeplitz.symbol import symbol_from_json, symbol_hash

MONO = {"vars": 2, "expr": {"product": [{"conj": {"monomial": [1, 0]}}, {"monomial": [0, 1]}]}}
PAIR_SYM = {"vars": 2, "expr": {"product": [
    {"conj": {"blaschke": {"var": 1, "zero": "1/2"}}},
    {"blaschke": {"var": 2, "zero": "1/3"}}]}}
SUM = {"vars": 2, "expr": {"sum": [{"monomial": [1, 0]}, {"monomial": [0, 1]}]}}
B1 = {"vars": 1, "expr": {"blaschke": {"var": 1, "zero": "1/2"}}}
SLOW = {"vars": 1, "expr": {"blaschke": {"var": 1, "zero": "0.8i"}}}
HUGE = {"vars": 1, "expr": {"blaschke": {"var": 1, "zero": "0.999999"}}}
PAIR = {"vars": 2, "phi1": {"blaschke": {"var": 1, "zero": "1/2"}},
        "phi2": {"blaschke": {"var": 2, "zero": "1/3"}}}
GENS = {"vars": 2, "generators": [[1, 0], [0, 1]]}


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, obj in [("mono", MONO), ("pair_sym", PAIR_SYM), ("sum", SUM), ("b1", B1),
                      ("slow", SLOW), ("huge", HUGE), ("pair", PAIR), ("gens", GENS)]:
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(obj))
        out[name] = str(p)
    return out


def call(capsys, *argv):
    code = run(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_partial_isometry_mono(files, capsys):
    code, out, _ = call(capsys, "check", "partial-isometry", files["mono"])
    assert code == 0
    doc = json.loads(out)
    rep, = doc["reports"]
    assert rep["verdict"] == "PASS" and rep["residual"] == 0
    assert doc["symbol_hash"] == symbol_hash(symbol_from_json(MONO))
    assert doc["config"]["d"] == [3, 3] and doc["config"]["D"] == [24, 24]


def test_unimodular_sum_fails_with_witness(files, capsys):
    code, out, _ = call(capsys, "check", "unimodular", files["sum"])
    assert code == 1
    rep, = json.loads(out)["reports"]
    assert rep["verdict"] == "FAIL" and rep["witness"] is not None


def test_exit_codes_invalid_and_inconclusive(files, capsys, tmp_path):
    code, _, err = call(capsys, "check", "partial-isometry", str(tmp_path / "missing.json"))
    assert code == 2 and "error" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{"vars": 1, "expr": {"blaschke": {"var": 1, "zero": "3/2"}}}')
    assert call(capsys, "matrix", str(bad))[0] == 2
    assert call(capsys, "check", "partial-isometry", files["slow"])[0] == 3
    assert call(capsys, "check", "partial-isometry", files["huge"], "--eps", "1e-14")[0] == 3
    assert call(capsys, "check", "partial-isometry", files["mono"], "--d", "9", "--D", "4")[0] == 2
    assert call(capsys, "check", "commutation", files["mono"])[0] == 2


def test_classify_blaschke_pair(files, capsys):
    code, out, _ = call(capsys, "classify", files["pair_sym"], "--d", "2")
    assert code == 0
    cls = json.loads(out)["classification"]
    assert cls["verdict"] == "TRUNCATED_SHIFT_SUM"
    assert cls["decomposition"]["blocks"] == [[1, 2], [2, 2], [3, 1]]


def test_pair_and_generator_checks(files, capsys):
    code, out, _ = call(capsys, "check", "commutation", files["pair"], "--D", "32")
    assert code == 0
    assert [r["verdict"] for r in json.loads(out)["reports"]] == ["PASS", "PASS"]
    code, out, _ = call(capsys, "check", "final-projection", files["pair"], "--D", "32")
    assert code == 0
    code, out, _ = call(capsys, "check", "doubly-commuting", files["gens"], "--box", "4")
    assert code == 1
    assert json.loads(out)["reports"][0]["witness"]["h"] == [0, 1]


def test_power_pi_and_hyponormal(files, capsys):
    code, out, _ = call(capsys, "check", "power-pi", files["mono"], "--max-power", "3")
    assert code == 0 and len(json.loads(out)["reports"]) == 3
    code, _, _ = call(capsys, "check", "hyponormal", files["mono"], "--d", "2")
    assert code == 1
    code, _, _ = call(capsys, "check", "range-invariance", files["mono"], "--D", "6")
    assert code == 0


def test_norm_csv(files, capsys):
    code, out, _ = call(capsys, "norm", files["sum"], "--box-sweep", "4,8", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "box,value,gap,leakage_bound"
    assert lines[1].startswith("4x4,1.90211303259030")
    code, out, _ = call(capsys, "norm", files["sum"], "--box-sweep", "4x2")
    assert json.loads(out)["norm"]["rows"][0]["box"] == [4, 2]
    assert call(capsys, "norm", files["sum"], "--box-sweep", "a,b")[0] == 2


def test_decay_csv_and_vector(files, capsys):
    code, out, _ = call(capsys, "decay", files["b1"], "--max-m", "3", "--format", "csv")
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert [r[:3] for r in rows] == [["1", "0.5", "0.5"], ["2", "0.25", "0.25"],
                                     ["3", "0.125", "0.125"]]
    code, out, _ = call(capsys, "decay", files["b1"], "--max-m", "2",
                        "--vector", '{"terms": [{"k": [1], "c": "1"}]}')
    assert code == 0 and len(json.loads(out)["decay"]) == 2
    assert call(capsys, "decay", files["b1"], "--vector", "0.5")[0] == 2
    assert call(capsys, "decay", files["mono"])[0] == 2


def test_matrix_factorize_decompose(files, capsys, tmp_path):
    code, out, _ = call(capsys, "matrix", files["b1"], "--box", "2")
    doc = json.loads(out)
    assert doc["header"]["box"] == [2] and doc["rows"] == 3
    assert doc["entries"][3] == [0.75, 0.0]
    code, out, _ = call(capsys, "factorize", files["pair_sym"])
    fac = json.loads(out)["factorization"]
    assert fac["phi1"]["expr"] == {"blaschke": {"var": 1, "zero": "1/2"}}
    code, out, _ = call(capsys, "decompose", files["mono"], "--box", "2")
    assert json.loads(out)["decomposition"]["blocks"] == [[1, 2], [2, 2], [3, 1]]
    mfile = tmp_path / "m.json"
    mfile.write_text(json.dumps(matrix_to_json([[0, 0], [1, 0]])))
    code, out, _ = call(capsys, "decompose", str(mfile), "--include-basis")
    doc = json.loads(out)["decomposition"]
    assert doc["blocks"] == [[2, 1]] and "basis_change" in doc


def test_symbol_validate(files, capsys):
    code, out, _ = call(capsys, "symbol", "validate", files["pair_sym"])
    doc = json.loads(out)
    assert code == 0 and doc["exact"] is False
    assert doc["variables"]["tags"] == {"1": "COANALYTIC", "2": "ANALYTIC"}


def test_config_layering(files, capsys, tmp_path, monkeypatch):
    env_cfg = tmp_path / "env.json"
    env_cfg.write_text(json.dumps({"d": [2], "grid_m": 16}))
    cli_cfg = tmp_path / "cli.json"
    cli_cfg.write_text(json.dumps({"grid_m": 32}))
    monkeypatch.setenv(CONFIG_ENV, str(env_cfg))
    _, out, _ = call(capsys, "check", "unimodular", files["mono"], "--config", str(cli_cfg))
    cfg = json.loads(out)["config"]
    assert cfg["d"] == [2, 2] and cfg["grid_m"] == 32
    _, out, _ = call(capsys, "check", "unimodular", files["mono"], "--config", str(cli_cfg),
                     "--grid", "8")
    assert json.loads(out)["config"]["grid_m"] == 8
    cli_cfg.write_text(json.dumps({"nonsense": 1}))
    assert call(capsys, "check", "unimodular", files["mono"], "--config", str(cli_cfg))[0] == 2


def test_run_config_validation():
    with pytest.raises(InvalidInput):
        RunConfig(eps=0)
    with pytest.raises(InvalidInput):
        RunConfig(tol_pass=1e-2, tol_fail=1e-3)
    with pytest.raises(InvalidInput):
        RunConfig(d=(5,), D=(3,)).boxes(2)
    with pytest.raises(InvalidInput):
        RunConfig(d=(1, 2, 3)).boxes(2)


def test_output_file_and_batch(files, capsys, tmp_path):
    target = tmp_path / "report.json"
    assert call(capsys, "check", "unimodular", files["mono"], "-o", str(target))[0] == 0
    assert json.loads(target.read_text())["reports"][0]["verdict"] == "PASS"
    code, out, _ = call(capsys, "check", "unimodular", files["mono"], files["sum"], "--jobs", "2")
    doc = json.loads(out)
    assert code == 1
    assert [r["reports"][0]["verdict"] for r in doc["results"]] == ["PASS", "FAIL"]
    _, serial, _ = call(capsys, "check", "unimodular", files["mono"], files["sum"])
    assert serial == out


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "polydisc_toeplitz", "check", "unimodular",
                           files["mono"]], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["reports"][0]["verdict"] == "PASS"
