import csv
import json
import subprocess
import sys

import pytest

from diagcat import cli
from diagcat.presets import PRESETS, get_preset

LOOP_CONFIG = """
[experiment]
kind = "gap_trace"
label = "loop"

[model]
name = "loop_gadget"
n = 6
R = 4.0
variant = "field_crossing"

[[schedule]]
label = "standard"
kind = "standard"

[[schedule]]
label = "dc"
kind = "catalyst"
lambda = 1.0
bias = "minus"

[grid]
s_points = 129

[analysis]
pt_compare = true
"""


def write(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_gap_trace_run(tmp_path):
    cfg = write(tmp_path, LOOP_CONFIG)
    out = tmp_path / "out"
    assert cli.main(["run", str(cfg), "--out", str(out), "--workers", "1"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config_hash"] == cli.config_hash(cli.load_config(cfg))
    assert set(manifest["outputs"]) >= {"gap_trace_standard.csv", "gap_trace_dc.csv", "pt_compare.json"}
    assert manifest["errors"] == []
    with open(out / "gap_trace_dc.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["s", "gap"] and len(rows) == 130
    pt = json.loads((out / "pt_compare.json").read_text())
    assert pt["dc"]["s_star"] == pytest.approx(0.96128297, abs=1e-7)
    assert pt["gap_ratio"]["value"] < 1e-4


def test_workers_give_same_outputs(tmp_path):
    cfg = cli.load_config(write(tmp_path, LOOP_CONFIG))
    cli.execute(cfg, tmp_path / "a", workers=1)
    cli.execute(cfg, tmp_path / "b", workers=2)
    for name in ("gap_trace_standard.csv", "gap_trace_dc.csv"):
        assert (tmp_path / "a" / name).read_text() == (tmp_path / "b" / name).read_text()


@pytest.mark.parametrize(
    "old, new, message",
    [
        ('kind = "gap_trace"', 'kind = "spectrum"', "experiment.kind: unknown kind"),
        ("n = 6", 'n = "six"', "model.n: expected int"),
        ("s_points = 129", "s_points = 129\ncolour = 1", "grid.colour: unknown key"),
        ("lambda = 1.0", "lambda = -1.0", r"schedule\[1\].lambda: must be >= 0"),
    ],
)
def test_config_errors(tmp_path, old, new, message):
    cfg = write(tmp_path, LOOP_CONFIG.replace(old, new, 1))
    with pytest.raises(cli.ConfigError, match=message):
        cli.load_config(cfg)


def test_config_error_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, LOOP_CONFIG.replace("[grid]", "[grids]"))
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "grids: unknown section" in capsys.readouterr().err


def test_malformed_toml(tmp_path):
    cfg = write(tmp_path, "[experiment\nkind=")
    with pytest.raises(cli.ConfigError):
        cli.load_config(cfg)


def test_failed_point_is_recorded(tmp_path):
    text = """
[experiment]
kind = "pt_compare"

[model]
name = "ring_dc"

[grid]
n = [6, 7]
"""
    out = tmp_path / "o"
    assert cli.main(["run", str(write(tmp_path, text)), "--out", str(out), "--workers", "1"]) == 1
    manifest = json.loads((out / "manifest.json").read_text())
    assert [e["point"] for e in manifest["errors"]] == [7]
    assert "pt_report_n6.json" in manifest["outputs"]


def test_snap_fraction():
    assert cli.snap_fraction(0.99, 60) == pytest.approx(59 / 60)
    assert cli.snap_fraction(0.9, 100) == 0.9


def test_presets_validate():
    for name in PRESETS:
        cli.validate(get_preset(name))


def test_unknown_preset():
    assert cli.main(["preset", "fig99"]) == 2


def test_list_presets(capsys):
    assert cli.main(["list-presets"]) == 0
    assert capsys.readouterr().out.splitlines()[0].startswith("fig1")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "diagcat", "list-presets"], capture_output=True, text=True)
    assert res.returncode == 0 and "fig10" in res.stdout
