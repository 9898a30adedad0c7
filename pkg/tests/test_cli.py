from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from hdtkg.cli import run

from helpers import FIXTURES, PAFOS, PAFOS_BLOCKS, PISA, VASARI, manifest


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def _table(text):
    return dict(line.split("\t") for line in text.splitlines())


def test_validate_pafos_matches_manifest():
    code, out, err = _run("validate", PAFOS, "--mode", "lenient")
    expected = manifest("pafos_gate.manifest.json")["load"]
    assert code == 0
    table = _table(out)
    assert int(table["warnings"]) == expected["severity"]["warning"]
    assert int(table["instances"]) == expected["instances"]
    assert err.count("warning:") == expected["severity"]["warning"]


def test_validate_pisa_strict_fails_lenient_passes():
    code, _, err = _run("validate", PISA, "--mode", "strict")
    assert code == 1 and "DomainViolation" in err
    code, out, _ = _run("validate", PISA)
    assert code == 0 and _table(out)["violations"] == "2"


def test_query_titles():
    code, out, _ = _run("query", PAFOS, "--subject", "Pafos Gate", "--property", "HP30")
    rows = [line.split("\t") for line in out.splitlines()]
    assert code == 0
    assert [r[3] for r in rows] == ["The Pafos Gate", "High Gate", "Porta San Domenico"]


def test_query_by_property_name_and_inverse():
    code, out, _ = _run("query", PISA, "--subject", "Pisa", "--property", "is location of", "--inverse")
    assert code == 0 and out.split("\t")[1] == "The Pisa Leaning Tower"


def test_query_inferred_rows_are_marked():
    _, plain, _ = _run("query", VASARI, "--property", "HP11")
    _, inferred, _ = _run("query", VASARI, "--property", "HP11", "--infer")
    assert plain == ""
    assert inferred and all(line.endswith("Inferred(Superproperty)") for line in inferred.splitlines())


def test_infer_then_export_matches_include_inferred(tmp_path):
    code, out, _ = _run("export-turtle", PAFOS, "--blocks", PAFOS_BLOCKS, "--include-inferred")
    path = tmp_path / "x.ttl"
    _run("export-turtle", PAFOS, "--blocks", PAFOS_BLOCKS, "--include-inferred", "--out", path)
    assert code == 0 and path.read_text(encoding="utf-8") == out
    assert "# inferred: TwinShortcut" in out


def test_infer_explain():
    code, out, _ = _run("infer", VASARI)
    first_id = int(out.splitlines()[0].split("\t")[0])
    code, tree, _ = _run("infer", VASARI, "--explain", first_id)
    assert code == 0 and "<- Asserted" in tree


def test_stats_json_and_figure(tmp_path):
    fig = tmp_path / "stats.png"
    code, out, _ = _run("stats", VASARI, "--figure", fig)
    data = json.loads(out)
    assert code == 0
    assert data["instances"] == 43 and data["statements"]["asserted"] == 48
    assert fig.read_bytes().startswith(b"\x89PNG")


def test_simulate_flood_pafos():
    code, out, _ = _run("simulate-flood", PAFOS, "--geo", FIXTURES / "geo.json",
                        "--alert", FIXTURES / "alert_nicosia.json")
    data = json.loads(out)
    assert code == 0
    assert data["plan"]["actions"] == []
    assert data["report"]["assessed"][0]["at_risk"] is False


def test_simulate_flood_record(tmp_path):
    target = tmp_path / "after.hdtn"
    fig = tmp_path / "flood.svg"
    code, _, _ = _run("simulate-flood", VASARI, "--geo", FIXTURES / "geo_florence.json",
                      "--alert", FIXTURES / "alert_arno.json", "--record", "--out", target,
                      "--figure", fig)
    assert code == 0
    code, out, _ = _run("validate", target, "--blocks", target.with_suffix(".hdti"), "--mode", "strict")
    assert code == 0 and _table(out)["statements"] == str(48 + 2 + 2 * 3)
    assert b"<svg" in fig.read_bytes()


@pytest.mark.parametrize("argv", [
    ["frobnicate", "x"],
    ["validate"],
    ["validate", "/no/such/file.hdtn"],
    ["query", str(PISA), "--subject", "Nobody"],
    ["simulate-flood", str(PISA), "--geo", "g", "--alert", "a", "--record"],
])
def test_usage_errors_exit_2(argv):
    code, out, err = _run(*argv)
    assert code == 2 and out == "" and err


def test_parse_error_exit_2(tmp_path):
    bad = tmp_path / "bad.hdtn"
    bad.write_text("A (HC2 Heritage Asset)\n\t\tHP3 is related to B (HC2 Heritage Asset)\n")
    code, _, err = _run("validate", bad)
    assert code == 2 and "indent jumps" in err


def test_unknown_region_exit_1(tmp_path):
    alert = tmp_path / "alert.json"
    alert.write_text(json.dumps({"alert_id": "X", "region": "Atlantis", "expected_water_level": 1,
                                 "issued_at": "2024-01-01T00:00:00Z"}))
    code, _, err = _run("simulate-flood", PAFOS, "--geo", FIXTURES / "geo.json", "--alert", alert)
    assert code == 1 and "UnknownRegion" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hdtkg", "query", str(PISA), "--property", "HP12"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("1\tThe Pisa Leaning Tower\tHP12 is located in\tPisa")
