import json
from fractions import Fraction

import pytest

from slcone.cli import main, parse_alpha, parse_grid


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def manifest(tmp_path, name):
    return json.loads((tmp_path / f"{name}.manifest.json").read_text())


def test_parse_alpha_and_grid():
    assert parse_alpha("1/3") == Fraction(1, 3)
    assert parse_alpha("1") == Fraction(1)
    assert isinstance(parse_alpha("0.5"), float)
    assert parse_grid("40x30") == (40, 30)
    for bad in ("4x4", "40", "axb"):
        with pytest.raises(Exception):
            parse_grid(bad)


def test_elliptic_K(tmp_path, capsys):
    assert run(tmp_path, "elliptic", "K", "--ksq", "0.375") == 0
    m = manifest(tmp_path, "elliptic")
    assert m["schema"] == "slcone/1" and m["exit_code"] == 0
    assert "--out" not in m["argv"]
    assert set(m) >= {"params", "version", "tolerances", "outputs", "summary", "failed_checks"}


def test_torus_writes_mesh_and_reruns(tmp_path):
    assert run(tmp_path, "torus", "--alpha", "1/2", "--grid", "40x40") == 0
    m = manifest(tmp_path, "torus")
    names = {p["path"].rsplit("/", 1)[-1] for p in m["outputs"]}
    assert any(n.endswith(".obj") for n in names) and "torus_report.json" in names
    assert m["failed_checks"] == []
    rerun_dir = tmp_path / "again"
    assert main(["rerun", str(tmp_path / "torus.manifest.json"), "--out", str(rerun_dir)]) == 0


def test_verify_flat_and_sphere_notes(tmp_path):
    assert run(tmp_path / "flat", "verify", "--alpha", "1", "--J", "0.05", "--grid", "30x30") == 0
    assert "flat" in json.dumps(manifest(tmp_path / "flat", "verify")["summary"])
    assert run(tmp_path / "sph", "verify", "--alpha", "0", "--grid", "60x60") == 0
    assert "sphere" in json.dumps(manifest(tmp_path / "sph", "verify")["summary"])


def test_periods(tmp_path):
    assert run(tmp_path, "periods", "--alpha", "1/3") == 0
    summary = manifest(tmp_path, "periods")["summary"]
    assert "closed torus" in json.dumps(summary)


def test_search_usage_errors(tmp_path):
    assert run(tmp_path, "search", "--target", "1/3") == 2
    assert run(tmp_path, "search", "--target", "5/9") == 0


def test_bad_parameters_exit_2(tmp_path):
    assert run(tmp_path, "torus", "--alpha", "1/2", "--J", "0.5") == 2
    assert run(tmp_path, "torus", "--alpha", "3/2") == 2
    assert main(["torus"]) == 2


def test_neumann_and_ac(tmp_path):
    assert run(tmp_path, "neumann", "--alpha", "0.3", "--J", "0.1", "--t-end", "5") == 0
    assert run(tmp_path, "ac", "--d", "1", "--grid", "17x17", "--profile-samples", "81") == 0
    assert run(tmp_path / "zero", "ac", "--d", "0", "--grid", "17x17", "--profile-samples", "41") == 0


def test_rerun_detects_tampering(tmp_path):
    assert run(tmp_path, "periods", "--alpha", "1/2") == 0
    m = manifest(tmp_path, "periods")
    m["outputs"][0]["sha256"] = "0" * 64
    (tmp_path / "periods.manifest.json").write_text(json.dumps(m))
    assert main(["rerun", str(tmp_path / "periods.manifest.json")]) == 1
