import io
import json

import numpy as np
import pytest

from bsykh import cli
from bsykh.models import ModelParams
from bsykh.twopoint import greens_closed


def test_parse_defaults():
    cfg = cli.parse_args(["twopoint"])
    assert cfg.command == "twopoint"
    assert cfg.q == (4,) and cfg.u_over_gamma0 == (1.0,)
    assert cfg.gamma0 == 1.0 and cfg.t_max == 10.0 and cfg.points == 401
    assert cfg.format == "csv" and cfg.plot is False


def test_parse_lists_and_restrictions():
    cfg = cli.parse_args(["chaos-scan", "--q", "2,4,8,12", "--u-max", "6"])
    assert cfg.q == (2, 4, 8, 12) and cfg.u_max == 6.0
    cfg = cli.parse_args(["spectral", "--u-over-gamma0", "0.5,1,3,5"])
    assert cfg.u_over_gamma0 == (0.5, 1.0, 3.0, 5.0)
    with pytest.raises(SystemExit) as err:
        cli.parse_args(["twopoint", "--q", "2,4"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        cli.parse_args(["sff", "--u-over-gamma0", "1,2"])
    assert err.value.code == 2


def test_parse_usage_errors():
    with pytest.raises(SystemExit) as err:
        cli.parse_args(["twopoint", "--no-such-flag"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        cli.parse_args(["twopoint", "--points", "xyz"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        cli.parse_args(["twopoint", "--points", "1"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        cli.parse_args(["not-a-command"])
    assert err.value.code == 2


def test_config_file_and_override(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# sample config\n"
                    "u-over-gamma0 = 3\n"
                    "points = 11   # inline comment\n"
                    "t_max = 5\n", encoding="utf-8")
    cfg = cli.parse_args(["twopoint", "--config", str(conf)])
    assert cfg.u_over_gamma0 == (3.0,) and cfg.points == 11 and cfg.t_max == 5.0
    # command line overrides the file
    cfg = cli.parse_args(["twopoint", "--config", str(conf), "--points", "21"])
    assert cfg.points == 21 and cfg.u_over_gamma0 == (3.0,)


def test_config_file_unknown_key(tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text("nonsense = 1\n", encoding="utf-8")
    with pytest.raises(SystemExit) as err:
        cli.parse_args(["twopoint", "--config", str(conf)])
    assert err.value.code == 2


def test_twopoint_csv_values(tmp_path):
    out = tmp_path / "tp.csv"
    rc = cli.main(["twopoint", "--u-over-gamma0", "3", "--points", "5",
                   "--t-max", "2", "--output", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t_gamma0,g_numeric,g_closed,abs_diff"
    assert len(lines) == 6
    row = lines[2].split(",")   # t*gamma0 = 0.5
    p = ModelParams.with_gamma0(1.0, 4, 3.0)
    assert float(row[0]) == pytest.approx(0.5)
    assert float(row[2]) == pytest.approx(greens_closed(p, 0.5), rel=1e-11)
    assert float(row[3]) <= 1e-9


def test_csv_uses_lf_line_endings(tmp_path):
    out = tmp_path / "tp.csv"
    cli.main(["twopoint", "--points", "3", "--t-max", "1", "--output", str(out)])
    raw = out.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")


def test_json_round_trip(tmp_path):
    out = tmp_path / "sff.json"
    argv = ["sff", "--points", "11", "--t-max", "4", "--format", "json",
            "--output", str(out)]
    assert cli.main(argv) == 0
    meta = json.loads(out.read_text())["meta"]
    assert meta["version"]
    assert cli.runconfig_from_meta(meta) == cli.parse_args(argv)


def test_outputs_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["spectral", "--u-over-gamma0", "0.5,3", "--points", "9",
            "--omega-max", "4", "--plot"]
    assert cli.main(argv + ["--output", str(a)]) == 0
    assert cli.main(argv + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


def test_svg_content(tmp_path):
    out = tmp_path / "scan.csv"
    rc = cli.main(["chaos-scan", "--q", "2", "--u-max", "2.5", "--u-points", "5",
                   "--plot", "--output", str(out)])
    assert rc == 0
    svg = (tmp_path / "scan.svg").read_text()
    assert svg.startswith('<?xml version="1.0"')
    assert 'width="800" height="500"' in svg
    assert "polyline" in svg and "q = 2" in svg
    assert "stroke-dasharray" in svg          # the bound reference line at 2
    assert "U / gamma0" in svg


def test_mc_runs_deterministic(tmp_path):
    a, b = tmp_path / "m1.csv", tmp_path / "m2.csv"
    argv = ["mc", "--q", "2", "--u-over-gamma0", "0", "--n-sites", "2",
            "--n-samples", "3", "--t-max", "0.5", "--seed", "77"]
    assert cli.main(argv + ["--output", str(a)]) == 0
    assert cli.main(argv + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header == "t_gamma0,g_mc,g_std_error,g_closed,abs_diff"


def test_compute_failure_exit_code(tmp_path):
    # n_sites beyond the dense limit fails inside compute, not at parse time
    rc = cli.main(["mc", "--n-sites", "6", "--output", str(tmp_path / "x.csv")])
    assert rc == 3


def test_io_failure_exit_code(tmp_path):
    rc = cli.main(["twopoint", "--points", "3",
                   "--output", str(tmp_path / "no" / "dir" / "x.csv")])
    assert rc == 4


def test_verify_reporting(monkeypatch):
    from bsykh import verify as verify_mod
    monkeypatch.setattr(verify_mod, "run_all",
                        lambda: [("a.check", True, ""), ("b.check", False, "boom")])
    buf = io.StringIO()
    rc = cli._run_verify(out=buf)
    assert rc == 3
    text = buf.getvalue()
    assert "ok   a.check" in text
    assert "FAIL b.check: boom" in text
    assert text.endswith("verify: 2 checks, 1 failed\n")
    monkeypatch.setattr(verify_mod, "run_all", lambda: [("a.check", True, "")])
    assert cli._run_verify(out=io.StringIO()) == 0
