import csv
import json
import subprocess
import sys

import pytest

from cespot import cli
from cespot.construction import admissibility_check
from cespot.families import FAMILIES
from cespot.figures import FIGURES, build_params, get_figure


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_families_json(capsys):
    assert cli.run(["families", "--format", "json"]) == 0
    table = json.loads(capsys.readouterr().out)
    assert {row["id"] for row in table} == set(FAMILIES)


def test_families_text(capsys):
    assert cli.run(["families"]) == 0
    assert "morse" in capsys.readouterr().out


def test_usage_errors(tmp_path, capsys):
    assert cli.run([]) == 3
    assert cli.run(["figure"]) == 3
    assert cli.run(["figure", "--id", "12", "--output-dir", str(tmp_path)]) == 3
    assert cli.run(["bogus"]) == 3
    assert cli.run(["verify", "--family", "nope"]) == 3
    assert cli.run(["verify", "--family", "morse", "--param", "zeta=1"]) == 3
    assert cli.run(["verify", "--family", "morse", "--param", "gamma"]) == 3
    assert cli.run(["scan", "--family", "morse"]) == 3
    capsys.readouterr()


def test_build_params_keys():
    p = build_params("morse", {"gamma": 1.0, "rho": 2.0, "alpha": 0.0, "beta": 1.0})
    assert p.b == pytest.approx(2.0**2 - 1.0**2)
    with pytest.raises(ValueError):
        build_params("morse", {"gamma": 1.0, "rho": 2.0, "b": 1.0})


def test_figure_csv_format_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.run(["figure", "--id", "2", "--output-dir", str(a)]) == 0
    assert cli.run(["figure", "--id", "2", "--output-dir", str(b), "--jobs", "3"]) == 0
    man = json.loads((a / "fig02_manifest.json").read_text())
    assert list(man) == ["command", "parameters", "tool_version", "timestamp", "outputs", "admissibility"]
    assert len(man["outputs"]) == len(set(man["outputs"]))
    for name in man["outputs"]:
        raw = (a / name).read_bytes()
        assert raw == (b / name).read_bytes()
        assert b"\r" not in raw
        rows = read_rows(a / name)
        assert rows[0] == ["x", "V_minus", "singular"]
        assert all(len(r) == 3 and r[2] in ("0", "1") for r in rows[1:])
    files = sorted(p.name for p in a.iterdir() if p.suffix == ".csv")
    assert files == sorted(man["outputs"])


def test_figure2_flips_at_bound(tmp_path):
    cli.run(["figure", "--id", "2", "--output-dir", str(tmp_path)])
    man = json.loads((tmp_path / "fig02_manifest.json").read_text())
    verdict = {e["beta"]: e["admissible"] for e in man["admissibility"]}
    assert verdict[0.08559] and verdict[-0.08559]
    assert not verdict[0.08579] and not verdict[-0.08579]
    for e in man["admissibility"]:
        assert e["admissible"] is not e["expected_inadmissible"]


def test_figure5_flips_at_minus_four(tmp_path):
    cli.run(["figure", "--id", "5", "--output-dir", str(tmp_path)])
    man = json.loads((tmp_path / "fig05_manifest.json").read_text())
    verdict = {e["b"]: e["admissible"] for e in man["admissibility"]}
    assert verdict[-3.9999] and not verdict[-4.0001] and not verdict[-4.0]


def test_figure6_raster(tmp_path):
    cli.run(["figure", "--id", "6", "--output-dir", str(tmp_path)])
    rows = read_rows(tmp_path / "fig06_raster.csv")
    assert rows[0] == ["gamma", "rho", "positivity_ok", "gamma_sign_ok", "region"]
    regions = {r[4] for r in rows[1:]}
    assert regions == {"allowed", "positivity", "gamma-sign"}
    cell = {(float(r[0]), float(r[1])): r[4] for r in rows[1:]}
    assert cell[(2.8, 0.4)] == "allowed"
    assert cell[(2.8, 0.2)] == "positivity"


def test_figure_flags_agree_with_admissibility_check(tmp_path):
    spec = get_figure(9)
    cli.run(["figure", "--id", "9", "--output-dir", str(tmp_path)])
    man = json.loads((tmp_path / "fig09_manifest.json").read_text())
    for e in man["admissibility"]:
        v = e[spec.swept.name]
        assert e["admissible"] == admissibility_check(spec.family, spec.params_at(v)).admissible
        assert e["admissible"] == (v < 3)


def test_figure_singular_column(tmp_path):
    # Fig 1 at b = -2.5 breaks positivity: the curve is emitted with its blow-up flagged
    cli.run(["figure", "--id", "1", "--output-dir", str(tmp_path)])
    man = json.loads((tmp_path / "fig01_manifest.json").read_text())
    bad = [e for e in man["admissibility"] if not e["admissible"]]
    assert bad and all(e["b"] <= -2 for e in bad)
    assert any(e["singular_points"] > 0 for e in bad)


def test_scan_morse(tmp_path):
    code = cli.run(["scan", "--family", "morse", "--param", "gamma=1", "--param", "alpha=0",
                    "--param", "beta=1", "--swept", "rho", "--start", "0", "--stop", "4", "--step", "0.05",
                    "--no-energy", "--output-dir", str(tmp_path)])
    assert code == 0
    rows = read_rows(tmp_path / "scan_morse_rho.csv")
    assert rows[0] == ["rho", "admissible", "violated", "first_zero", "e0_numeric"]
    for r in rows[1:]:
        rho = float(r[0])
        inside = 0.5 < rho < 1.5 or 2.5 < rho < 3.5
        assert (r[1] == "1") == inside, r


def test_scan_lho_beta_from_bound(tmp_path):
    code = cli.run(["scan", "--family", "linear_oscillator", "--swept", "b", "--start", "-2.5", "--stop", "3",
                    "--step", "0.5", "--beta-from-bound", "0.75", "--output-dir", str(tmp_path)])
    assert code == 0
    for r in read_rows(tmp_path / "scan_linear_oscillator_b.csv")[1:]:
        b = float(r[0])
        assert (r[1] == "0") == (b <= -2), r
        if r[1] == "1":
            assert abs(float(r[4])) < 1e-4


def test_scan_poschl_teller_imaginary(tmp_path):
    code = cli.run(["scan", "--family", "poschl_teller", "--param", "gamma=2", "--param", "beta=1",
                    "--swept", "rho_i", "--start", "0", "--stop", "4", "--step", "0.5", "--no-energy",
                    "--output-dir", str(tmp_path)])
    assert code == 0
    assert all(r[1] == "1" for r in read_rows(tmp_path / "scan_poschl_teller_rho_i.csv")[1:])


def test_verify_examples(capsys):
    assert cli.run(["verify", "--family", "linear_oscillator", "--param", "b=0", "--levels", "6"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [lv["e_analytic"] for lv in out["report"]["levels"]] == pytest.approx([0, 1, 2, 3, 4, 5])
    assert cli.run(["verify", "--family", "radial_oscillator", "--param", "gamma=0.5", "--param", "b=1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [lv["e_analytic"] for lv in out["report"]["levels"]] == pytest.approx([2.5, 4.5, 6.5, 8.5])
    assert out["zero_mode"] is False
    assert cli.run(["verify", "--family", "hydrogen", "--param", "gamma=2.8", "--param", "a=1",
                    "--param", "rho=0.9", "--levels", "3", "--tol", "1e-4"]) == 0
    capsys.readouterr()


def test_verify_inadmissible_and_failure(capsys):
    assert cli.run(["verify", "--family", "hydrogen", "--param", "gamma=2.8", "--param", "a=1",
                    "--param", "rho=0.5"]) == 2
    # Morse γ=ρ=3 holds only three bound states
    assert cli.run(["verify", "--family", "morse", "--param", "gamma=3", "--param", "rho=3",
                    "--param", "alpha=0", "--param", "beta=1", "--levels", "5"]) == 1
    capsys.readouterr()


def test_config_with_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "linear_oscillator", "params": {"b": 0.0, "beta": 0.5}, "levels": 2}))
    out_file = tmp_path / "report.json"
    assert cli.run(["verify", "--config", str(cfg), "--levels", "3", "--output", str(out_file)]) == 0
    rep = json.loads(out_file.read_text())
    assert rep["levels"] == 3
    assert rep["parameters"]["beta"] == 0.5
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": "red"}))
    assert cli.run(["verify", "--config", str(bad)]) == 3
    capsys.readouterr()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cespot", "families", "--format", "json"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert len(json.loads(res.stdout)) == len(FAMILIES)


def test_all_figures_are_cataloged():
    assert sorted(FIGURES) == list(range(1, 12))
