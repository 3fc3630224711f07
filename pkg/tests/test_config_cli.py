import json
import subprocess
import sys
from pathlib import Path

import pytest

from quatlab.cli import list_scenarios, load_config_text, main
from quatlab.config import format_config, parse_config
from quatlab.errors import ConfigurationError

MINIMAL = """
grid.dims = 1
grid.n = 64
grid.length = 12
potential.family = harmonic
potential.omega = 1.0
state.kind = gaussian
evolve.dt = 0.001
evolve.t_final = 0.01
"""


def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.boundary == "periodic"
    assert cfg.hbar == 1.0 and cfg.mass == 1.0
    assert cfg.equation == "right"
    assert cfg.q0.components() == (1.0, 0.0, 0.0, 0.0)
    assert cfg.record_every == 1
    assert cfg.checks == ()


def test_q0_renormalized_with_warning():
    with pytest.warns(UserWarning, match="renormalized"):
        cfg = parse_config(MINIMAL + "state.q0 = 1,1,0,0\n")
    c = cfg.q0.components()
    assert abs(c[0] - 2 ** -0.5) < 1e-15
    assert abs(c[1] - 2 ** -0.5) < 1e-15


def test_unknown_equation_names_key_and_choices():
    with pytest.raises(ConfigurationError) as err:
        parse_config(MINIMAL + "equation = sideways\n")
    msg = str(err.value)
    assert "equation" in msg and "right" in msg and "left" in msg


def test_all_errors_reported_with_line_numbers():
    bad = "\n".join([
        "grid.dims = 7",
        "grid.n = two",
        "what.is.this = 1",
        "equation = sideways",
    ])
    with pytest.raises(ConfigurationError) as err:
        parse_config(bad)
    msg = str(err.value)
    assert "grid.dims" in msg
    assert "line 2" in msg and "grid.n" in msg
    assert "line 3" in msg and "what.is.this" in msg
    assert "sideways" in msg


def test_duplicate_key_rejected():
    with pytest.raises(ConfigurationError, match="duplicate"):
        parse_config(MINIMAL + "grid.n = 32\n")


def test_gauge_requires_3d():
    with pytest.raises(ConfigurationError, match="grid.dims = 3"):
        parse_config(MINIMAL + "gauge.family = uniform-b\ngauge.b0 = 1\n")


def test_resolution_scaling():
    cfg = parse_config(MINIMAL).scaled(2)
    assert cfg.n == (128,)
    assert cfg.dt == 0.0005
    assert cfg.record_every == 2


def test_format_config_round_trips():
    cfg = parse_config(MINIMAL + "checks = virial\nstate.q0 = 0,0,1,0\n")
    echo = format_config(cfg)
    cfg2 = parse_config(echo)
    assert format_config(cfg2) == echo


def test_bundled_scenarios_parse():
    names = list_scenarios()
    assert "ho_ground_right" in names and "absorber" in names
    for name in names:
        cfg = parse_config(load_config_text(name))
        assert cfg.dt > 0


def test_cli_dry_run_writes_nothing(tmp_path):
    out = tmp_path / "out"
    rc = main(["run", "--config", "monopole_demo", "--out", str(out), "--dry-run"])
    assert rc == 0
    assert not out.exists()


def test_cli_unknown_config_is_error(capsys):
    rc = main(["run", "--config", "no_such_scenario", "--out", "/tmp/x"])
    assert rc == 2
    assert "configuration error" in capsys.readouterr().err


def test_cli_print_config(capsys):
    rc = main(["print-config", "--config", "ho_ground_right"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "potential.family = harmonic" in out
    assert "evolve.dt = 0.001" in out


def test_cli_run_writes_artifacts(tmp_path):
    cfg = tmp_path / "tiny.cfg"
    cfg.write_text(MINIMAL.replace("evolve.t_final = 0.01", "evolve.t_final = 0.05")
                   + "checks = continuity\n"
                   + "evolve.record_every = 10\noutput.save_state = true\n")
    out = tmp_path / "res"
    rc = main(["run", "--config", str(cfg), "--out", str(out)])
    assert rc == 0
    assert (out / "series.csv").exists()
    assert (out / "report.json").exists()
    assert (out / "meta.txt").exists()
    assert (out / "state_final.csv").exists()
    header = (out / "series.csv").read_text().splitlines()[0]
    assert header.split(",")[:4] == ["t", "norm", "H", "x_x"]
    meta = (out / "meta.txt").read_text()
    assert "version = " in meta
    state_header = (out / "state_final.csv").read_text().splitlines()[0]
    assert state_header == "index,coord_x,x0,x1,x2,x3"


def test_cli_divergence_exit_code(tmp_path):
    cfg = tmp_path / "diverge.cfg"
    cfg.write_text("""
grid.dims = 1
grid.n = 64
grid.length = 4
potential.family = harmonic
potential.omega = 1.0
state.kind = gaussian
state.sigma = 0.5
evolve.dt = 0.5
evolve.t_final = 50
evolve.record_every = 10
""")
    with pytest.warns(UserWarning):
        rc = main(["run", "--config", str(cfg), "--out", str(tmp_path / "d")])
    assert rc == 3


def test_cli_determinism_byte_identical(tmp_path):
    for d in ("a", "b"):
        rc = main(["run", "--config", "monopole_demo", "--out", str(tmp_path / d)])
        assert rc == 0
    for fname in ("series.csv", "report.json", "meta.txt"):
        fa = (tmp_path / "a" / fname).read_bytes()
        fb = (tmp_path / "b" / fname).read_bytes()
        assert fa == fb, fname


def test_cli_check_identities_1d_skips(capsys, tmp_path):
    cfg = tmp_path / "one_d.cfg"
    cfg.write_text(MINIMAL)
    rc = main(["check-identities", "--config", str(cfg)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "SKIP" in out
    assert "momentum-position" in out


def test_cli_entry_point_installed():
    proc = subprocess.run([sys.executable, "-m", "quatlab.cli", "list-scenarios"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "absorber" in proc.stdout
