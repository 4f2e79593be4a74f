"""CLI contract: exit codes, output formats, schema validity, determinism."""

import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

SCHEMA = json.loads(
    resources.files("ovoidcodes").joinpath("schemas/certificate.schema.json").read_text()
)


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "ovoidcodes.cli", *args],
        capture_output=True,
        text=True,
        timeout=600,
    )
    return proc


def run_json(*args, expect_rc=0):
    proc = run_cli(*args)
    assert proc.returncode == expect_rc, proc.stderr or proc.stdout
    doc = json.loads(proc.stdout)
    jsonschema.validate(doc, SCHEMA)
    return doc


def test_construct_code_matrix_format():
    proc = run_cli("construct-code", "--m", "2")
    assert proc.returncode == 0
    lines = proc.stdout.strip().splitlines()
    assert lines[0] == "4 17 4"
    assert len(lines) == 5
    for row in lines[1:]:
        assert len(row.split()) == 17


def test_construct_code_json_certificate():
    doc = run_json("construct-code", "--m", "2", "--json")
    assert doc["command"] == "construct-code"
    assert doc["results"]["n"] == 17 and doc["results"]["k"] == 4
    assert doc["field"]["modulus"] == "0x11d"


def test_weights_both_methods():
    doc = run_json("weights", "--m", "2")
    assert doc["results"]["weights"] == {"0": 1, "12": 204, "16": 51}
    names = {v["name"]: v["pass"] for v in doc["verdicts"]}
    assert names["paths_agree"] and names["forced_enumerator"] and names["power_moments"]


def test_dual_weights():
    doc = run_json("dual-weights", "--m", "2")
    dw = doc["results"]["dual_weights"]
    assert dw["4"] == 1020 and "1" not in dw and "2" not in dw and "3" not in dw
    assert all(v["pass"] for v in doc["verdicts"])


def test_gaussian_periods_certificate():
    doc = run_json("gaussian-periods", "--m", "3", "--N", "9")
    assert doc["results"]["periods"] == [-57, 7, 7, 7, 7, 7, 7, 7, 7]


def test_gaussian_periods_bad_N_is_parameter_error():
    proc = run_cli("gaussian-periods", "--m", "2", "--N", "7")
    assert proc.returncode == 2
    assert "parameter error" in proc.stderr


def test_ovoid_roundtrip_and_verify(tmp_path):
    out = tmp_path / "pts.txt"
    proc = run_cli("ovoid", "--source", "from-code", "--m", "2", "--out", str(out))
    assert proc.returncode == 0
    assert out.read_text().splitlines()[0] == "PG3 q=4"
    doc = run_json("verify-ovoid", "--in", str(out))
    assert doc["pass"]
    assert doc["results"]["plane_profile"] == {"1": 17, "5": 68}


def test_tits_source_rejects_bad_m():
    proc = run_cli("ovoid", "--source", "tits", "--m", "2")
    assert proc.returncode == 2


def test_verify_ovoid_planted_failure_exit_1(tmp_path):
    out = tmp_path / "pts.txt"
    run_cli("ovoid", "--source", "elliptic", "--m", "2", "--out", str(out))
    lines = out.read_text().strip().splitlines()
    # append the third point of the line through the first two points
    import numpy as np

    from ovoidcodes.projgeo import parse_point_set

    ps = parse_point_set(out.read_text())
    mul = ps.field.mul_table()
    third = ps.points[0] ^ mul[2, ps.points[1]]
    lines.append(" ".join(f"{int(v):x}" for v in third))
    out.write_text("\n".join(lines) + "\n")
    proc = run_cli("verify-ovoid", "--in", str(out))
    assert proc.returncode == 1
    doc = json.loads(proc.stdout)
    jsonschema.validate(doc, SCHEMA)
    assert doc["results"]["witness"] is not None
    assert not doc["pass"]


def test_verify_ovoid_duplicate_point_fails(tmp_path):
    out = tmp_path / "pts.txt"
    run_cli("ovoid", "--source", "elliptic", "--m", "2", "--out", str(out))
    lines = out.read_text().strip().splitlines()
    lines.append(lines[1])
    out.write_text("\n".join(lines) + "\n")
    proc = run_cli("verify-ovoid", "--in", str(out))
    assert proc.returncode == 1


@pytest.mark.parametrize("which,k,lam,b", [("minweight", 12, 22, 68), ("complement", 5, 1, 68), ("dual4", 4, 2, 340)])
def test_designs_reports(which, k, lam, b, tmp_path):
    out = tmp_path / "blocks.txt"
    doc = run_json("designs", "--m", "2", "--which", which, "--out", str(out))
    res = doc["results"]
    assert (res["k"], res["lambda"], res["blocks"], res["verified"]) == (k, lam, b, True)
    rows = out.read_text().strip().splitlines()
    assert len(rows) == b
    assert all(len(r.split()) == k for r in rows)


def test_equivalence_cli(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    run_cli("ovoid", "--source", "from-code", "--m", "2", "--out", str(a))
    run_cli("ovoid", "--source", "elliptic", "--m", "2", "--out", str(b))
    doc = run_json("equivalence", "--a", str(a), "--b", str(b))
    rep = doc["results"]["report"]
    assert rep["verdict"] == "equivalent"
    assert rep["witness"]["matrix"] is not None
    assert rep["witness"]["frobenius_exponent"] in (0, 1)
    doc2 = run_json("equivalence", "--a", str(a), "--b", str(b), "--fingerprint-only")
    assert doc2["results"]["verdict"] in ("inconclusive", "inequivalent")


def test_certify_all_m2_passes_and_validates():
    doc = run_json("certify-all", "--m", "2")
    assert doc["pass"]
    names = [v["name"] for v in doc["verdicts"]]
    assert "weight_enumerator" in names and "design_steiner" in names


def test_certify_all_determinism_across_threads():
    out1 = run_cli("certify-all", "--m", "2", "--threads", "1").stdout
    out8 = run_cli("certify-all", "--m", "2", "--threads", "8").stdout
    a, b = json.loads(out1), json.loads(out8)
    a.pop("timings")
    b.pop("timings")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_missing_subcommand_is_parameter_error():
    proc = run_cli()
    assert proc.returncode == 2


def test_missing_file_is_parameter_error():
    proc = run_cli("verify-ovoid", "--in", "/nonexistent/file.txt")
    assert proc.returncode == 2
