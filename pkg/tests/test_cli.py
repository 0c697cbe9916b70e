import csv
import io
import json
import math
import re
import subprocess
import sys

import jsonschema
import pytest

from slopebounds import reports
from slopebounds.cli import OUT_ENV, main, parse_components, parse_seeds


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def doc_of(text, kind):
    doc = json.loads(text)
    assert doc["kind"] == kind
    jsonschema.validate(doc, reports.schema(kind))
    return doc


def without_timestamp(text):
    return re.sub(rf'\n\s*"{reports.TIMESTAMP_FIELD}": "[^"]*",?', "", text)


def test_bound_connected(capsys):
    code, out, _ = run(capsys, "bound", "--g", "0", "--gb", "2")
    assert code == 0
    res = doc_of(out, "bound_report")["result"]
    assert res["U_star"] == pytest.approx(0.27465, abs=1e-5)
    assert res["total_floor"] == 11083446207


def test_bound_multi_component(capsys):
    code, out, _ = run(capsys, "bound", "--g", "1", "--components", "t:2;g:2,3", "--N", "5")
    assert code == 0
    doc = doc_of(out, "bound_report")
    parts = doc["result"]["per_component"]
    assert len(parts) == 3
    assert parts[-1] == {"torus_count": 2, "N_torus": 5, "total": 10.0}
    assert doc["config"]["components"] == "t:2;g:2,3"


def test_bound_pole_suggests_torus_path(capsys):
    code, _, err = run(capsys, "bound", "--g", "0", "--gb", "1")
    assert code == 1
    assert "pole" in err and "--N" in err


@pytest.mark.parametrize("argv", [
    ["bound", "--g", "1", "--components", "t:2"],
    ["bound", "--g", "1", "--components", "x:1", "--N", "3"],
    ["bound", "--gb", "2"],
    ["bound", "--g", "1", "--gb", "2", "--L", "1e-9"],
    ["bound", "--g", "1", "--gb", "2", "--bogus"],
    ["bound", "--g", "one", "--gb", "2"],
])
def test_bound_bad_input(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and err


def test_bound_sweep_csv(capsys):
    code, out, _ = run(capsys, "bound", "--sweep", "--g-max", "2", "--gb-max", "3", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 3 * 2
    assert out.splitlines()[0].startswith("g,g_boundary")
    assert float(rows[0]["U_star"]) == pytest.approx(math.log(3) / 4, rel=1e-15)


def test_bound_sweep_json(capsys):
    code, out, _ = run(capsys, "bound", "--sweep", "--g-max", "1", "--gb-max", "2")
    assert code == 0
    assert len(doc_of(out, "bound_sweep")["result"]["rows"]) == 2


def test_verify_equality_case(capsys):
    code, out, _ = run(capsys, "verify", "--builtin", "constant:-1", "--U", "5")
    assert code == 0
    res = doc_of(out, "comparison_report")["result"]
    assert res["certified"] and abs(res["margin"]) <= 1e-7


def test_verify_positive_margin(capsys):
    code, out, _ = run(capsys, "verify", "--builtin", "constant:-4", "--U", "3")
    assert code == 0
    res = doc_of(out, "comparison_report")["result"]
    assert res["certified"] and res["margin"] >= 0
    assert len(res["samples"]["u"]) <= 1002


def test_verify_bad_profile_names_location(capsys, tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("0 -2\n0.5 -0.5\n1 -2\n")
    code, out, err = run(capsys, "verify", "--profile", str(bad))
    assert code == 1 and not out
    assert "0.5" in err


def test_verify_missing_profile(capsys, tmp_path):
    code, _, err = run(capsys, "verify", "--profile", str(tmp_path / "nope.tsv"))
    assert code == 1 and "not found" in err


def test_verify_needs_one_source(capsys):
    assert run(capsys, "verify")[0] == 1
    assert run(capsys, "verify", "--builtin", "cubic:1")[0] == 1


def test_pack_diameter(capsys):
    code, out, _ = run(capsys, "pack", "--R", "1", "--L", "3", "--seeds", "1..5", "--attempts", "500")
    assert code == 0
    (camp,) = doc_of(out, "pack_summary")["result"]["campaigns"]
    assert {row["count"] for row in camp["per_seed"]} == {1}


def test_pack_campaign_files(capsys, tmp_path):
    code, out, _ = run(capsys, "pack", "--R", "3", "--L", "1.75", "--seeds", "1..4",
                       "--attempts", "2000", "--out-dir", str(tmp_path))
    assert code == 0 and out == ""
    files = sorted(p.name for p in tmp_path.iterdir())
    assert "summary.json" in files
    assert len([f for f in files if f.startswith("pack_R3_L1.75_seed")]) == 4
    summary = doc_of((tmp_path / "summary.json").read_text(), "pack_summary")
    assert summary["result"]["campaigns"][0]["summary"]["rigorous_violations"] == 0
    one = doc_of((tmp_path / "pack_R3_L1.75_seed1.json").read_text(), "packing_experiment")
    assert one["result"]["count"] >= 1


def test_pack_paper_flag_column(capsys):
    code, out, _ = run(capsys, "pack", "--R", "5", "--L", "1.75", "--seeds", "1..3", "--attempts", "2000")
    assert code == 0
    rows = doc_of(out, "pack_summary")["result"]["campaigns"][0]["per_seed"]
    assert all(isinstance(r["paper_violation"], bool) for r in rows)
    assert not any(r["rigorous_violation"] for r in rows)


@pytest.mark.parametrize("argv", [
    ["pack", "--R", "3", "--seeds", "5..1"],
    ["pack", "--R", "abc"],
    ["pack", "--R", "12"],
    ["pack"],
])
def test_pack_bad_input(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_spectrum_modular(capsys):
    code, out, _ = run(capsys, "spectrum", "--preset", "modular-torus", "--Lmax", "2")
    assert code == 0
    res = doc_of(out, "spectrum")["result"]
    assert res["spectrum"]["entries"][0]["length"] == pytest.approx(1.9248473, abs=1e-6)


def test_spectrum_octagon_empty(capsys):
    code, out, _ = run(capsys, "spectrum", "--preset", "octagon-g2", "--Lmax", "1.75", "--max-word-length", "6")
    assert code == 0
    res = doc_of(out, "spectrum")["result"]
    assert res["spectrum"]["entries"] == []
    assert res["collar_report"]["count"] == 0 and res["collar_report"]["bound_floor"] == 6


def test_spectrum_missing_group(capsys, tmp_path):
    code, _, err = run(capsys, "spectrum", "--group", str(tmp_path / "missing.json"), "--Lmax", "2")
    assert code == 1 and "missing.json" in err


def test_spectrum_group_file(capsys, tmp_path):
    g = tmp_path / "g.json"
    data = {"name": "torus", "genus": 1, "generators": [[[1, 1], [1, 2]], [[1, -1], [-1, 2]]]}
    jsonschema.validate(data, reports.schema("group"))
    g.write_text(json.dumps(data))
    code, out, _ = run(capsys, "spectrum", "--group", str(g), "--Lmax", "2", "--max-word-length", "4")
    assert code == 0
    assert doc_of(out, "spectrum")["result"]["spectrum"]["group"] == "torus"


def test_spectrum_csv_with_collar_sidecar(capsys, tmp_path):
    out_file = tmp_path / "spec.csv"
    code, _, _ = run(capsys, "spectrum", "--preset", "modular-torus", "--Lmax", "3",
                     "--max-word-length", "5", "--format", "csv", "--out", str(out_file))
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[0] == "length,trace_abs,word,multiplicity"
    assert float(lines[1].split(",")[0]) == 2 * math.acosh(1.5)
    side = tmp_path / "spec.csv.collar.json"
    doc_of(side.read_text(), "collar_report")


def test_claim(capsys):
    code, out, _ = run(capsys, "claim", "--max-g", "2", "--max-component-genus", "3", "--max-components", "2")
    assert code == 0
    res = doc_of(out, "claim_sweep")["result"]
    assert res["evaluated"] > 0


def test_env_output_directory(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path))
    code, out, _ = run(capsys, "bound", "--g", "0", "--gb", "2")
    assert code == 0 and out == ""
    doc_of((tmp_path / "bound.json").read_text(), "bound_report")


def test_explicit_out_beats_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
    target = tmp_path / "here.json"
    assert run(capsys, "bound", "--g", "0", "--gb", "2", "--out", str(target))[0] == 0
    assert target.exists() and not (tmp_path / "env").exists()


DETERMINISM_RUNS = [
    ["bound", "--g", "1", "--gb", "3"],
    ["bound", "--g", "1", "--components", "t:2;g:2,3", "--N", "5"],
    ["bound", "--sweep", "--g-max", "2", "--gb-max", "3"],
    ["verify", "--builtin", "random:3", "--U", "2", "--step", "1e-3"],
    ["pack", "--R", "3", "--L", "1.75", "--seeds", "1..3", "--attempts", "2000"],
    ["spectrum", "--preset", "modular-torus", "--Lmax", "3", "--max-word-length", "5"],
    ["claim", "--max-g", "1", "--max-component-genus", "3", "--max-components", "2"],
]


@pytest.mark.parametrize("argv", DETERMINISM_RUNS, ids=lambda a: a[0])
def test_deterministic_output(capsys, argv):
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert without_timestamp(first) == without_timestamp(second)
    assert reports.TIMESTAMP_FIELD not in without_timestamp(first)


def test_parsers():
    assert parse_components("t:2;g:2,3") == (2, [2, 3])
    assert parse_components("g:4") == (0, [4])
    assert parse_seeds("1..3") == [1, 2, 3]
    assert parse_seeds("4,9") == [4, 9]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "slopebounds.cli", "bound", "--g", "0", "--gb", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    doc_of(proc.stdout, "bound_report")
    proc = subprocess.run([sys.executable, "-m", "slopebounds.cli", "nonsense"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 1
