import csv
import io

import numpy as np
import pytest

from qbattery import cli
from qbattery.config import ConfigError, ScenarioConfig, load_config, parse_grid, parse_init, parse_number

FAST = ["--alpha-points", "19", "--gamma-points", "6"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array([[_num(x) for x in r] for r in rows[1:]])


def _num(x):
    return {"true": 1.0, "false": 0.0}[x] if x in ("true", "false") else float(x)


def test_parse_helpers():
    assert parse_number("2pi") == pytest.approx(2 * np.pi)
    assert parse_number("pi/4") == pytest.approx(np.pi / 4)
    assert parse_number("-0.5pi") == pytest.approx(-np.pi / 2)
    assert parse_grid("0:1:3") == (0.0, 0.5, 1.0)
    assert parse_grid("1,2.5") == (1.0, 2.5)
    assert parse_init("trunc3:0.43,0.42") == ("trunc3", (0.43, 0.42))
    for bad in ("x", "1pi2"):
        with pytest.raises(ConfigError):
            parse_number(bad)
    with pytest.raises(ConfigError):
        parse_init("trunc2")
    with pytest.raises(ConfigError):
        parse_grid("0:1")


def test_config_file_and_override(tmp_path):
    p = tmp_path / "s.cfg"
    p.write_text("# scenario\ndelta = 0.1\ninit = trunc2:0.9  # comment\ndim = 7\n")
    cfg = load_config(str(p), {"dim": 9})
    assert cfg.delta == 0.1 and cfg.init == "trunc2:0.9" and cfg.dim == 9
    p.write_text("nonsense = 1\n")
    with pytest.raises(ConfigError):
        load_config(str(p))
    with pytest.raises(ConfigError):
        load_config(None, {"init": "trunc2:0.3"})
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.cfg"))


def test_default_scenario_settings():
    cfg = ScenarioConfig()
    assert (cfg.omega, cfg.g, cfg.delta, cfg.battery_dim()) == (1.0, 1.0, 0.0, 11)


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "nope")[0] == 1
    assert run(capsys, "repeat-charge", "--init", "trunc2:0.2")[0] == 1
    code, _, err = run(capsys, "landscape", "--out", str(tmp_path / "no" / "x.csv"))
    assert code == 1 and str(tmp_path / "no" / "x.csv") in err


def test_time_sweep_vacuum(capsys):
    code, out, _ = run(capsys, "time-sweep", "--tgrid", "0:2pi:41", *FAST)
    assert code == 0
    head, t = table(out)
    assert head == ["t", "ergotropy", "daemonic_min", "daemonic_max", "gap", "band"]
    ts = t[:, 0]
    assert np.allclose(t[:, 1], np.maximum(0, np.sin(ts) ** 2 - np.cos(ts) ** 2), atol=1e-9)
    assert np.allclose(t[:, 2], np.sin(ts) ** 2, atol=1e-9) and np.allclose(t[:, 3], np.sin(ts) ** 2, atol=1e-9)
    assert np.all(t[0] == 0)
    # 17 significant digits round-trip, so the difference is exact
    assert np.array_equal(t[:, 4], t[:, 2] - t[:, 1])
    assert np.array_equal(t[:, 5], t[:, 3] - t[:, 2])


def test_beta_sweep(capsys):
    code, out, _ = run(capsys, "beta-sweep", "--beta-grid", "1,1.65,2,3,50", *FAST)
    head, t = table(out)
    assert code == 0 and head == ["beta", "tau", "e_max", "daemonic_min", "gap", "gapless"]
    assert abs(t[-1, 2] - 1) <= 1e-6
    assert np.all(t[1:, 5] == 1) and t[0, 5] == 0
    assert np.all(np.diff(t[:, 2]) <= 1e-12)


def test_repeat_charge(capsys):
    code, out, _ = run(capsys, "repeat-charge")
    head, t = table(out)
    assert head[:3] == ["m", "tau_m", "e_max_m"] and head[3:] == [f"pop_{i}" for i in range(11)]
    assert np.array_equal(t[:, 0], np.arange(1, 11))
    assert np.allclose(t[:, 2], np.arange(1, 11), atol=1e-9)
    assert np.allclose(t[:, 3:].sum(axis=1), 1, atol=1e-10)


def test_repeat_charge_thermal_saturates(capsys):
    _, out, _ = run(capsys, "repeat-charge", "--init", "thermal:2")
    _, t = table(out)
    assert np.all(np.diff(t[:, 2]) >= -1e-9) and t[-1, 2] >= 10 - 1e-5


def test_double_mode(capsys):
    code, out, _ = run(capsys, "double-mode", "--cycles", "3")
    head, t = table(out)
    assert code == 0 and head == ["m", "tau_m", "e_b", "e_b1", "e_b2", "simultaneous"]
    assert t[0, 5] == 0 and t[1, 5] == 1
    _, out, _ = run(capsys, "double-mode", "--cycles", "3", "--init", "trunc2:0.8")
    _, t = table(out)
    assert t[0, 2] > 0 and np.all(np.abs(t[0, 3:5]) <= 1e-9)
    assert np.all(t[1:, 2:5] > 1e-9)


def test_landscape(capsys):
    args = ["landscape", "--r0-grid", "0.6,0.8,0.95", "--alpha-grid", "0:pi:13"]
    _, out, _ = run(capsys, *args)
    head, t = table(out)
    assert head == ["r0", "alpha", "advantage"]
    assert np.all(t[:, 2] >= -1e-9)
    for r0 in (0.6, 0.8, 0.95):
        rows = t[t[:, 0] == r0]
        best = rows[np.argmin(rows[:, 2]), 1]
        assert min(best, np.pi - best) <= 1e-12
    _, shifted, _ = run(capsys, *args, "--gamma", "1.3")
    assert np.allclose(table(shifted)[1], t, atol=1e-9)


def test_output_is_deterministic_and_ordered(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["time-sweep", "--tgrid", "0:3:7", *FAST]
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b), "--workers", "2")[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_float_format():
    assert cli.fmt(0.1) == "0.10000000000000001"
    assert cli.fmt(True) == "true" and cli.fmt(np.int64(3)) == "3"
