import io
import json
import math
import warnings

import numpy as np
import pandas as pd
import pytest

from gaa_lab.ansatz_assignment import assign_b, check_no_crossing
from gaa_lab.exceptions import ConfigError, ParameterError
from gaa_lab.model_core import PotentialParams
from gaa_lab.sweep_engine import (
    ALPHA,
    DELTA,
    EnergyCurveSet,
    GridSpec,
    alpha_scan,
    default_alpha_grid,
    default_delta_grid,
    default_pr_grid,
    energy_scan,
    oracle_scan,
    parse_config_text,
    parse_grid,
    parse_phase,
    pr_scan,
    read_config,
    read_dataset,
    site_energy_table,
    to_frame,
    write_dataset,
)


def test_default_grids():
    delta = default_delta_grid().samples()
    assert len(delta) == 101
    assert delta[0] == 0.0 and delta[-1] == 5.0
    assert delta[20] == pytest.approx(1.0, abs=1e-15)

    alpha = default_alpha_grid().samples()
    assert len(alpha) == 191
    assert alpha[95] == 0.0
    assert np.all(np.abs(alpha) < 1)

    assert len(default_pr_grid()) == 201


@pytest.mark.parametrize("variable, start, stop, steps", [
    (DELTA, -0.1, 1.0, 5),
    (DELTA, 2.0, 1.0, 5),
    (DELTA, 0.0, 1.0, 0),
    (ALPHA, -1.0, 0.5, 5),
    (ALPHA, -0.5, 1.0, 5),
    ("beta", 0.0, 1.0, 5),
])
def test_grid_spec_rejects_bad_grids(variable, start, stop, steps):
    with pytest.raises(ParameterError):
        GridSpec(variable, start, stop, steps)


def test_single_point_grid():
    assert GridSpec(DELTA, 0.0, 0.0, 1).samples().tolist() == [0.0]


def test_parse_grid():
    grid = parse_grid("0:2:5", DELTA)
    assert grid.samples() == pytest.approx([0.0, 0.5, 1.0, 1.5, 2.0])
    for text in ("0:2", "a:2:5", "0:2:2.5"):
        with pytest.raises(ParameterError):
            parse_grid(text, DELTA)


def test_site_energy_tables(fig1_pot, fig2_pot):
    fig1a = site_energy_table(fig1_pot, 201)
    fig1b = site_energy_table(fig1_pot, 15)
    assert list(fig1a.columns) == ["mu", "eps_over_delta"]
    assert len(fig1a) == 201
    assert fig1a["mu"].tolist() == list(range(1, 202))
    assert fig1b["eps_over_delta"].tolist() == fig1a["eps_over_delta"].iloc[:15].tolist()
    assert fig1a["eps_over_delta"].iloc[0] == pytest.approx(0.538742793478361, abs=1e-12)
    assert len(site_energy_table(fig2_pot, 51)) == 51
    with pytest.raises(ParameterError):
        site_energy_table(fig2_pot, 52)


def test_energy_scan_fig1(fig1_pot):
    assignment = assign_b(fig1_pot, 15)
    curves = energy_scan(assignment, default_delta_grid())
    assert len(curves) == 15
    for curve in curves.curves:
        assert curve.values[0] == -curve.b_value
        assert len(curve.classes) == 101
    for delta_over_j, me in zip(curves.grid, curves.me_line):
        assert me == pytest.approx(-4 + 2 * delta_over_j, abs=1e-12)
        assert -0.5 * me + delta_over_j == pytest.approx(2.0, abs=1e-12)


def test_energy_scan_frame_layout(fig1_pot):
    curves = energy_scan(assign_b(fig1_pot, 3), GridSpec(DELTA, 0.0, 1.0, 4))
    frame = curves.to_frame()
    assert list(frame.columns) == ["delta_over_j", "mu", "b_value", "energy_over_j", "class", "me_energy_over_j"]
    assert len(frame) == 12
    assert frame["mu"].tolist() == sorted(frame["mu"].tolist())
    first = frame[frame["mu"] == frame["mu"].iloc[0]]
    assert first["delta_over_j"].tolist() == pytest.approx([0.0, 1 / 3, 2 / 3, 1.0])
    assert set(frame["class"]) <= {"localized", "extended", "critical"}


def test_energy_scan_alpha_zero_has_no_mobility_edge(fig2_pot):
    curves = energy_scan(assign_b(fig2_pot, 15), default_delta_grid())
    assert curves.me_line is None
    frame = curves.to_frame()
    assert frame["me_energy_over_j"].isna().all()
    # plain Aubry-Andre: every state switches at Delta/J = 2
    for curve in curves.curves:
        assert curve.classes[0].value == "extended"
        assert curve.classes[40].value == "critical"
        assert curve.classes[-1].value == "localized"


def test_energy_scan_single_point_at_zero(fig1_pot):
    assignment = assign_b(fig1_pot, 15)
    curves = energy_scan(assignment, GridSpec(DELTA, 0.0, 0.0, 1))
    for curve in curves.curves:
        assert curve.values.tolist() == [-assignment.b_for(curve.mu)]


def test_energy_scan_rejects_alpha_grid(fig1_pot):
    with pytest.raises(ParameterError):
        energy_scan(assign_b(fig1_pot, 2), default_alpha_grid())


def test_alpha_scan_mobility_edge(fig2_pot):
    pot = fig2_pot.replace(delta_over_j=1.8)
    assignment = assign_b(pot, 15)
    curves = alpha_scan(pot, assignment, default_alpha_grid(), 1.8)
    assert len(curves) == 15
    for alpha, me in zip(curves.grid, curves.me_line):
        if alpha == 0:
            assert math.isnan(me)
        else:
            assert me == pytest.approx(0.2 / alpha, abs=1e-12)
    # (mu, B) pairs are frozen across the sweep
    assert [(c.mu, c.b_value) for c in curves.curves] == list(assignment)


def test_alpha_scan_at_critical_delta(fig2_pot):
    pot = fig2_pot.replace(delta_over_j=2.0)
    curves = alpha_scan(pot, assign_b(pot, 3), GridSpec(ALPHA, -0.5, 0.5, 11), 2.0)
    for alpha, me in zip(curves.grid, curves.me_line):
        if alpha != 0:
            assert me == 0.0


def test_alpha_scan_classes_follow_the_edge(fig2_pot):
    pot = fig2_pot.replace(delta_over_j=1.8)
    curves = alpha_scan(pot, assign_b(pot, 15), default_alpha_grid(), 1.8)
    for curve in curves.curves:
        for alpha, energy, state in zip(curves.grid, curve.values, curve.classes):
            if alpha * energy > 0.2 + 1e-6:
                assert state.value == "localized"
            elif alpha * energy < 0.2 - 1e-6:
                assert state.value == "extended"


def test_pr_scan_limits():
    frame = pr_scan(100, 201, default_pr_grid(), include_delta_limit=True)
    assert list(frame.columns) == ["delta_over_j", "pr", "pr_over_n"]
    assert len(frame) == 202
    assert frame["pr_over_n"].iloc[0] == pytest.approx(1.0, abs=1e-12)
    assert math.isinf(frame["delta_over_j"].iloc[-1])
    assert frame["pr_over_n"].iloc[-1] == pytest.approx(1 / 201, abs=1e-9)
    values = frame["pr_over_n"].to_numpy()
    assert np.all(np.diff(values) <= 1e-9)
    assert np.all((values > 0) & (values <= 1 + 1e-12))


def test_pr_scan_insensitive_to_centre():
    centre = pr_scan(100, 201, default_pr_grid())["pr_over_n"].to_numpy()
    off_centre = pr_scan(50, 201, default_pr_grid())["pr_over_n"].to_numpy()
    assert np.all(np.abs(centre - off_centre) <= 0.10 * centre)


def test_oracle_scan_keeps_grid_order():
    frame = oracle_scan(PotentialParams(n_sites=55), GridSpec(DELTA, 0.5, 3.5, 3))
    assert frame["delta_over_j"].tolist() == [0.5, 2.0, 3.5]
    assert frame["mean_ipr"].iloc[2] > frame["mean_ipr"].iloc[0]
    assert frame["localized_fraction"].tolist() == [0.0, 0.0, 1.0]


def test_csv_round_trip_is_exact(fig1_pot, tmp_path):
    curves = energy_scan(assign_b(fig1_pot, 5), default_delta_grid())
    path = tmp_path / "fig1c.csv"
    write_dataset(curves, path)
    frame = read_dataset(path)
    original = curves.to_frame()
    assert list(frame.columns) == list(original.columns)
    for column in ("delta_over_j", "b_value", "energy_over_j", "me_energy_over_j"):
        assert frame[column].tolist() == original[column].tolist()
    assert path.read_bytes().count(b"\r") == 0


def test_csv_output_is_deterministic(fig1_pot, tmp_path):
    curves = energy_scan(assign_b(fig1_pot, 5), default_delta_grid())
    write_dataset(curves, tmp_path / "a.csv")
    write_dataset(curves, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_empty_curve_set_writes_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    write_dataset(EnergyCurveSet(DELTA, np.array([0.0, 1.0]), []), path)
    assert path.read_text(encoding="utf-8") == "delta_over_j,mu,b_value,energy_over_j,class,me_energy_over_j\n"


def test_missing_mobility_edge_is_an_empty_field(fig2_pot):
    stream = io.StringIO()
    write_dataset(energy_scan(assign_b(fig2_pot, 1), GridSpec(DELTA, 0.0, 0.0, 1)), stream)
    header, row = stream.getvalue().splitlines()
    assert row.endswith(",")


def test_json_round_trip(tmp_path):
    frame = pr_scan(3, 5, GridSpec(DELTA, 0.0, 1.0, 3), include_delta_limit=True)
    path = tmp_path / "pr.json"
    write_dataset(frame, path, "json")
    payload = json.loads(path.read_text(encoding="utf-8"))
    assert payload["columns"] == ["delta_over_j", "pr", "pr_over_n"]
    assert payload["records"][-1]["delta_over_j"] == "inf"
    loaded = read_dataset(path)
    assert loaded["delta_over_j"].tolist() == frame["delta_over_j"].tolist()
    assert loaded["pr"].tolist() == frame["pr"].tolist()


def test_json_read_restores_float_columns(tmp_path):
    frame = pr_scan(3, 5, GridSpec(DELTA, 0.0, 1.0, 3), include_delta_limit=True)
    path = tmp_path / "pr.json"
    write_dataset(frame, path, "json")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        loaded = read_dataset(path)
    assert loaded["delta_over_j"].dtype == np.float64
    assert math.isinf(loaded["delta_over_j"].iloc[-1])
    assert loaded["delta_over_j"].iloc[-1] > 0


def test_write_rejects_unknown_format(tmp_path):
    with pytest.raises(ParameterError):
        write_dataset(pd.DataFrame({"a": [1]}), tmp_path / "x.xml", "xml")


def test_to_frame_crossing_reports(fig1_pot):
    reports = check_no_crossing(assign_b(fig1_pot, 4))
    frame = to_frame(reports)
    assert len(frame) == 6
    assert list(frame.columns) == ["mu", "mu_prime", "min_gap", "sign_consistent", "n_sign_changes"]
    assert to_frame([]).empty
    with pytest.raises(TypeError):
        to_frame(object())


@pytest.mark.parametrize("text, expected", [
    ("pi", math.pi),
    ("-pi", -math.pi),
    ("pi/2", math.pi / 2),
    ("0.5*pi", math.pi / 2),
    ("2pi", 2 * math.pi),
    ("1.25", 1.25),
])
def test_parse_phase(text, expected):
    assert parse_phase(text) == pytest.approx(expected, abs=1e-15)


def test_parse_phase_rejects_garbage():
    with pytest.raises(ValueError):
        parse_phase("tau")


def test_parse_config_text():
    config = parse_config_text(
        "# fig1 run\n"
        "alpha = -0.5\n"
        "phi = pi   # radians\n"
        "\n"
        "n_sites = 201\n"
        "variable = delta_over_j\n"
        "format = json\n"
    )
    assert config == {
        "alpha": -0.5,
        "phi": math.pi,
        "n_sites": 201,
        "variable": "delta_over_j",
        "format": "json",
    }


@pytest.mark.parametrize("text, line, key", [
    ("alpha = 0.1\nbeta = 2\n", 2, "beta"),
    ("alpha = 0.1\nalpha = 0.2\n", 2, "alpha"),
    ("n_sites = 20.5\n", 1, "n_sites"),
    ("alpha =\n", 1, "alpha"),
    ("format = xml\n", 1, "format"),
    ("\nalpha 0.1\n", 2, None),
])
def test_parse_config_errors_name_line_and_key(text, line, key):
    with pytest.raises(ConfigError) as excinfo:
        parse_config_text(text)
    assert excinfo.value.line == line
    assert excinfo.value.key == key
    assert f"line {line}" in str(excinfo.value)


def test_read_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("delta_over_j = 1.8\nm_sites = 15\n", encoding="utf-8")
    assert read_config(str(path)) == {"delta_over_j": 1.8, "m_sites": 15}
    with pytest.raises(ConfigError):
        read_config(str(tmp_path / "missing.cfg"))
