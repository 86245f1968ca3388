import json
import math
import subprocess
import sys
from dataclasses import replace

import numpy as np
import pytest
import yaml

from helictl.cli import main
from helictl.controller import ControllerGains
from helictl.errors import ConfigError, DomainError, NumericalOverflowError
from helictl.harness.bounds import bound_consistency_report, eta3_proxy, finite_time_bounds
from helictl.harness.config import (ChannelConfig, ScenarioConfig, config_from_dict,
                                    config_to_dict, dump_config, load_config, nominal_config)
from helictl.harness.integrate import integrate, rk4_step
from helictl.harness.io import emit_plot_script, export_csv, read_csv
from helictl.harness.metrics import compute_metrics, settling_time
from helictl.harness.reference import ReferenceSpec, reference_eval
from helictl.harness.simulate import BASE_COLUMNS, TimeSeries, run_scenario
from helictl.hftd import HftdConfig
from helictl.plant import NoDisturbance, PlantState, Sinusoid

A = math.pi / 18
W = 0.3 * math.pi


# -- reference ----------------------------------------------------------------

def test_reference_examples():
    assert reference_eval(0.0) == pytest.approx((-A, 0.0), abs=1e-16)
    x, dx = reference_eval(5 / 3)
    assert x == pytest.approx(0.0, abs=1e-16)
    assert dx == pytest.approx(A * W, rel=1e-14)
    for t in (0.0, 1.3, 4.4):
        np.testing.assert_allclose(reference_eval(t), reference_eval(t + 20 / 3), atol=1e-14)
    with pytest.raises(DomainError):
        reference_eval(-1.0)


def test_reference_derivative_matches_finite_difference():
    h = 1e-6
    for t in np.linspace(0.1, 10, 17):
        fd = (reference_eval(t + h)[0] - reference_eval(t - h)[0]) / (2 * h)
        assert reference_eval(t)[1] == pytest.approx(fd, abs=1e-9)


def test_constant_reference():
    assert reference_eval(3.0, ReferenceSpec.constant(0.2)) == (0.2, 0.0)


# -- integrator -----------------------------------------------------------------

def test_rk4_zero_field():
    y = np.array([1.0, -2.0, 3.0])
    np.testing.assert_array_equal(rk4_step(lambda t, v: np.zeros(3), y, 0.0, 0.1), y)


def test_rk4_exponential_one_step():
    y = rk4_step(lambda t, v: v, [1.0], 0.0, 0.1)[0]
    assert y == pytest.approx(1.1051708333333333, rel=1e-15)
    assert abs(y - math.exp(0.1)) < 1e-7


def test_rk4_fourth_order():
    errs = [abs(integrate(lambda t, v: v, [1.0], 0.0, 1.0, dt)[0] - math.e)
            for dt in (0.1, 0.05, 0.025)]
    for a, b in zip(errs, errs[1:]):
        assert abs(a / b - 16) <= 1.0


def test_rk4_flags_non_finite_stage():
    with pytest.raises(NumericalOverflowError) as err:
        rk4_step(lambda t, v: v * np.inf, [1.0], 0.0, 0.1)
    assert err.value.stage == "k1"
    with pytest.raises(DomainError):
        rk4_step(lambda t, v: v, [1.0], 0.0, 0.0)


# -- configuration --------------------------------------------------------------

def test_nominal_config_values():
    cfg = nominal_config()
    assert cfg.initial_state.x1 == pytest.approx(math.radians(-24))
    g = cfg.elevation.gains
    assert (g.k1, g.k2, g.m1, g.m2, g.n1, g.n2, g.h.value) == (1, 2, 0.5, 0.5, 1, 1, 0.6)
    h = cfg.elevation.hftd
    assert (h.a0, h.a1, h.b0, h.b1, h.r1, h.r2, h.eps) == (5, 0.5, 2, 0.5, 0.5, 0.5, 0.01)
    tr = cfg.elevation.trainer
    assert (tr.learning_rate, tr.p, cfg.elevation.net.neurons) == (0.005, 0.6, 5)
    assert cfg.elevation.disturbance == Sinusoid(1.0, 2.0, 0.0)
    assert (cfg.dt, cfg.t_end) == (1e-4, 20.0)


def test_config_yaml_round_trip(tmp_path):
    cfg = replace(nominal_config(), pitch=ChannelConfig(reference=ReferenceSpec.constant(0.1)))
    path = tmp_path / "s.yaml"
    dump_config(cfg, path)
    assert load_config(path) == cfg


def test_config_degrees():
    doc = {"initial_state": {"x1": -24}, "elevation": {"reference": {"amplitude": 10.0,
                                                                     "omega": W, "phase": 0.0}}}
    cfg = config_from_dict(doc, degrees=True)
    assert cfg.initial_state.x1 == pytest.approx(math.radians(-24))
    assert cfg.elevation.reference.amplitude == pytest.approx(A)


def test_pitch_inherits_elevation_tuning():
    doc = {"elevation": {"gains": {"k1": 3.0}}, "pitch": {}}
    cfg = config_from_dict(doc)
    assert cfg.pitch.gains.k1 == 3.0
    assert cfg.pitch.reference == ReferenceSpec.constant(0.0)
    assert cfg.pitch.disturbance == NoDisturbance()


@pytest.mark.parametrize("doc", [
    {"dt": 2e-4},  # violates dt <= eps^2
    {"dt": -1.0},
    {"t_end": 1e-5},
    {"controller": "pid"},
    {"schema_version": 2},
    {"bogus": 1},
    {"elevation": {"gains": {"h": "2/5"}}},
    {"elevation": {"gains": {"k9": 1}}},
    {"elevation": {"disturbance": {"kind": "square"}}},
    {"plant": {"m": -1}},
])
def test_config_errors(doc):
    with pytest.raises(ConfigError):
        config_from_dict(doc)


def test_c_stab_relaxes_step_limit():
    cfg = config_from_dict({"dt": 2e-4, "c_stab": 2.0})
    assert cfg.dt == 2e-4


# -- simulation -----------------------------------------------------------------

def short(cfg=None, **kw):
    return replace(cfg or nominal_config(), **{"t_end": 0.2, **kw})


def test_time_series_layout():
    s = run_scenario(short())
    assert s.columns[:len(BASE_COLUMNS)] == BASE_COLUMNS
    assert len(s) == 2001 and s.error is None
    np.testing.assert_allclose(np.diff(s.t), 1e-4, rtol=1e-9)
    assert np.all(np.isfinite(s.data))
    assert s["x1"][0] == pytest.approx(math.radians(-24))
    assert s["w1"][0] == 0.0


def test_regulation_sanity():
    x0, v0 = reference_eval(0.0)
    cfg = nominal_config(initial_state=PlantState(x0, v0, 0, 0), t_end=5.0,
                         elevation=ChannelConfig(disturbance=NoDisturbance()))
    s = run_scenario(cfg)
    assert s.error is None
    assert np.max(np.abs(s["e1"])) < 1e-3


def test_pitch_channel_tracks_step():
    cfg = short(nominal_config(), t_end=3.0,
                pitch=ChannelConfig(reference=ReferenceSpec.constant(0.1)))
    s = run_scenario(cfg)
    assert s.error is None
    assert abs(s["x3"][-1] - 0.1) < 1e-3
    assert np.any(s["u2"] != 0)


def test_overflow_returns_partial_series():
    cfg = nominal_config(t_end=8.0, envelope=0.1, initial_state=PlantState(0.0, 0, 0, 0))
    s = run_scenario(cfg)
    assert s.error is not None and "envelope" in s.error
    assert 0 < len(s) < 80001 and np.all(np.abs(s["x1"]) < 0.1)


def test_saturation_limits_logged_input():
    s = run_scenario(short(nominal_config(), u_limit=11.0))
    assert np.max(np.abs(s["u1"])) <= 11.0


# -- metrics & bounds ---------------------------------------------------------

def synthetic(e1, dt=0.1):
    n = len(e1)
    data = np.zeros((n, len(BASE_COLUMNS)))
    data[:, 0] = np.arange(n) * dt
    data[:, BASE_COLUMNS.index("e1")] = e1
    data[:, BASE_COLUMNS.index("x1r")] = A
    return TimeSeries(BASE_COLUMNS, data, dt)


def test_metrics_zero_error():
    m = compute_metrics(synthetic(np.zeros(50)), (1.0, 4.0))
    assert m.rmse == 0.0 and m.settling_time == 0.0


def test_metrics_constant_error():
    m = compute_metrics(synthetic(np.full(50, -0.3)), (1.0, 4.0))
    assert m.rmse == pytest.approx(0.3)
    assert not m.settled


def test_settling_time():
    t = np.arange(10.0)
    e = np.array([1, 1, 0.5, 0.01, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0])
    assert settling_time(t, e, 0.1) == 5.0
    with pytest.raises(DomainError):
        compute_metrics(synthetic(np.zeros(5)), (100.0, 200.0))


def test_bounds_examples():
    b = finite_time_bounds(ControllerGains(), 0.01, 0.5)
    assert b.eta1 == 1.0
    assert b.eta2 < 0 and not b.valid and math.isinf(b.e1_radius)
    assert 0.5 - 1 / 1.6 == pytest.approx(-0.125)
    with pytest.raises(DomainError):
        finite_time_bounds(ControllerGains(), 0.01, 1.0)


def test_bounds_formula_and_limit():
    g = ControllerGains(m1=1.0, m2=1.0, n1=0.5, n2=0.5)
    h = 0.6
    c = 2 ** 0.8
    b = finite_time_bounds(g, 1e-3, 0.5)
    assert b.valid
    assert b.eta2 == pytest.approx(min((1 - 0.5 / 1.6) * c, 0.5 / 1.6 * c))
    r1 = math.sqrt(2 * 1e-3 / (0.5 * 1.0))
    r2 = math.sqrt(2 * (1e-3 / (0.5 * b.eta2)) ** (2 / (1 + h)))
    assert b.e1_radius == pytest.approx(2 * min(r1, r2))
    radii = [finite_time_bounds(g, e, 0.5).e1_radius for e in (1e-1, 1e-3, 1e-6, 1e-12)]
    assert all(a > b for a, b in zip(radii, radii[1:])) and radii[-1] < 1e-5


# -- CSV and plots ------------------------------------------------------------

def test_csv_round_trip(tmp_path):
    s = run_scenario(short())
    p = export_csv(s, tmp_path / "a.csv")
    back = read_csv(p)
    assert back.columns == BASE_COLUMNS
    np.testing.assert_array_equal(back.data, s.select(BASE_COLUMNS).data)
    full = read_csv(export_csv(s, tmp_path / "b.csv", diag=True))
    np.testing.assert_array_equal(full.data, s.data)


def test_empty_series_header_only(tmp_path):
    s = TimeSeries(BASE_COLUMNS, np.zeros((0, len(BASE_COLUMNS))), 1e-4)
    p = export_csv(s, tmp_path / "e.csv")
    assert p.read_text() == ",".join(BASE_COLUMNS) + "\n"


def test_csv_io_error(tmp_path):
    s = run_scenario(short(t_end=0.01))
    with pytest.raises(OSError):
        export_csv(s, tmp_path / "missing" / "x.csv")


def test_plot_script_renders(tmp_path):
    pytest.importorskip("matplotlib")
    s = run_scenario(short())
    a = export_csv(s, tmp_path / "proposed.csv")
    b = export_csv(s, tmp_path / "baseline.csv")
    script = emit_plot_script({"proposed": a, "baseline": b}, tmp_path / "plot.py")
    subprocess.run([sys.executable, str(script)], check=True, cwd=tmp_path.parent)
    assert (tmp_path / "tracking_error.png").stat().st_size > 0
    assert (tmp_path / "control_input.png").stat().st_size > 0


def test_bound_report_fields():
    s = run_scenario(short(t_end=1.0))
    rep = bound_consistency_report(s, ControllerGains(m1=1.0, m2=1.0, n1=0.5, n2=0.5),
                                   t_from=0.5)
    assert rep["valid"] and rep["eta3"] == pytest.approx(eta3_proxy(s, 0.5))
    assert rep["observed_max_abs_e1"] > 0


# -- CLI ----------------------------------------------------------------------

def test_cli_simulate(tmp_path, capsys):
    code = main(["simulate", "--t-end", "0.2", "--out", str(tmp_path), "--csv", "--plot",
                 "--diag"])
    assert code == 0
    assert (tmp_path / "proposed.csv").exists() and (tmp_path / "plot_proposed.py").exists()
    rep = json.loads((tmp_path / "metrics_proposed.json").read_text())
    assert rep["controller"] == "proposed" and "bound_consistency" in rep


def test_cli_compare(tmp_path, capsys):
    assert main(["compare", "--t-end", "0.2", "--out", str(tmp_path)]) == 0
    table = (tmp_path / "metrics.csv").read_text().splitlines()
    assert table[0].startswith("controller,") and len(table) == 3
    assert (tmp_path / "plot_compare.py").exists()


def test_cli_config_and_bounds(tmp_path, capsys):
    cfg_path = tmp_path / "nominal.yaml"
    assert main(["config", "--out", str(cfg_path)]) == 0
    doc = yaml.safe_load(cfg_path.read_text())
    doc["elevation"]["gains"].update(m1=1.0, m2=1.0, n1=0.5, n2=0.5)
    cfg_path.write_text(yaml.safe_dump(doc))
    assert main(["bounds", "--config", str(cfg_path), "--eta3", "1e-4", "--kappa", "0.5"]) == 0
    assert "|e1| <=" in capsys.readouterr().out


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("dt: 1.0\n")
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert main(["simulate", "--config", str(tmp_path / "nope.yaml")]) == 3
    env = tmp_path / "env.yaml"
    env.write_text("t_end: 8.0\nenvelope: 0.1\ninitial_state: {x1: 0.0}\n")
    assert main(["simulate", "--config", str(env), "--out", str(tmp_path / "o")]) == 2
    assert main(["bounds", "--eta3", "0.1", "--kappa", "2"]) == 1
    blocked = tmp_path / "file"
    blocked.write_text("")
    assert main(["simulate", "--t-end", "0.01", "--out", str(blocked / "sub"), "--csv"]) == 3


@pytest.mark.slow
def test_step_size_robustness():
    """Halving the step leaves the steady tracking accuracy within 5%."""
    rmse = []
    for dt in (1e-4, 5e-5):
        s = run_scenario(nominal_config(t_end=10.0, dt=dt))
        assert s.error is None
        rmse.append(compute_metrics(s, (5.0, 10.0)).rmse)
    assert abs(rmse[1] - rmse[0]) < 0.05 * rmse[0]
