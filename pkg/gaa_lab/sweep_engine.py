"""
Parameter grids, figure datasets and their persistence.

Datasets are pandas DataFrames; CSV is the canonical format and JSON
mirrors it. Floats are written with 17 significant digits so that a
write/read cycle reproduces every 64-bit value.
"""
import json
import logging
import math
import os
import re

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from gaa_lab.ansatz_assignment import CrossingReport
from gaa_lab.exceptions import ConfigError, ParameterError
from gaa_lab.exact_oracle import build_hamiltonian, eigensystem
from gaa_lab.model_core import (
    StateClass,
    ansatz_energy,
    classify_state,
    lorentzian_population,
    mobility_edge_energy,
    participation_ratio,
    site_energies,
)

logger = logging.getLogger(__name__)

DELTA = "delta_over_j"
ALPHA = "alpha"
VARIABLES = (DELTA, ALPHA)

FLOAT_FORMAT = "%.17g"

# alpha samples closer to 0 than this are snapped to exactly 0
ALPHA_ZERO_SNAP = 1e-12

CURVE_COLUMNS = ("mu", "b_value", "energy_over_j", "class", "me_energy_over_j")


class GridSpec:
    """Sampling of one figure axis: variable, closed [start, stop], steps points"""

    def __init__(self, variable, start, stop, steps):
        if variable not in VARIABLES:
            raise ParameterError("variable", f"must be one of {', '.join(VARIABLES)}, got {variable!r}")
        start, stop = float(start), float(stop)
        if not (math.isfinite(start) and math.isfinite(stop)):
            raise ParameterError("grid", "start and stop must be finite")
        if int(steps) != steps or steps < 1:
            raise ParameterError("grid_steps", f"must be an integer >= 1, got {steps}")
        if start > stop:
            raise ParameterError("grid", f"start {start} is above stop {stop}")
        if variable == DELTA and start < 0:
            raise ParameterError("grid_start", f"Delta/J grids start at 0 or above, got {start}")
        if variable == ALPHA and not (-1 < start and stop < 1):
            raise ParameterError("grid", f"alpha grids must lie inside (-1, 1), got [{start}, {stop}]")
        self.variable = variable
        self.start = start
        self.stop = stop
        self.steps = int(steps)

    def samples(self):
        if self.steps == 1:
            values = np.array([self.start])
        else:
            values = np.linspace(self.start, self.stop, self.steps)
        if self.variable == ALPHA:
            values[np.abs(values) < ALPHA_ZERO_SNAP] = 0.0
        return values

    def __len__(self):
        return self.steps

    def __repr__(self):
        return f"GridSpec({self.variable!r}, {self.start!r}, {self.stop!r}, {self.steps!r})"


def parse_grid(text, variable):
    """
    Parse a "start:stop:steps" grid string.

    Args:
        text: Grid string, e.g. "0:5:101"
        variable: delta_over_j or alpha

    Returns:
        GridSpec
    """
    parts = text.split(":")
    if len(parts) != 3:
        raise ParameterError("grid", f"expected start:stop:steps, got {text!r}")
    try:
        start, stop = float(parts[0]), float(parts[1])
        steps = int(parts[2])
    except ValueError:
        raise ParameterError("grid", f"expected start:stop:steps, got {text!r}") from None
    return GridSpec(variable, start, stop, steps)


def default_delta_grid():
    return GridSpec(DELTA, 0.0, 5.0, 101)


def default_alpha_grid():
    return GridSpec(ALPHA, -0.95, 0.95, 191)


def default_pr_grid():
    return GridSpec(DELTA, 0.0, 10.0, 201)


class EnergyCurve:
    """E/J of one assigned site along a grid"""

    def __init__(self, mu, b_value, values, classes):
        self.mu = mu
        self.b_value = b_value
        self.values = values
        self.classes = classes


class EnergyCurveSet:
    """Energy curves of several sites over one grid, with the mobility-edge line"""

    def __init__(self, variable, grid, curves, me_line=None):
        self.variable = variable
        self.grid = grid
        self.curves = curves
        self.me_line = me_line

    def to_frame(self):
        """
        Flatten to rows ordered by mu, then grid index.

        Columns: <variable>, mu, b_value, energy_over_j, class, me_energy_over_j.
        Missing mobility-edge values are NaN (written as empty CSV fields).
        """
        columns = [self.variable, *CURVE_COLUMNS]
        rows = []
        me_line = self.me_line if self.me_line is not None else np.full(len(self.grid), np.nan)
        for curve in sorted(self.curves, key=lambda c: c.mu):
            for i, x in enumerate(self.grid):
                rows.append((x, curve.mu, curve.b_value, curve.values[i], curve.classes[i].value, me_line[i]))
        frame = pd.DataFrame(rows, columns=columns)
        return frame.astype({"mu": "int64"})

    def __len__(self):
        return len(self.curves)


def site_energy_table(pot, mu_max):
    """
    eps_mu/Delta for mu = 1..mu_max.

    Returns:
        DataFrame with columns mu, eps_over_delta
    """
    if int(mu_max) != mu_max or not 1 <= mu_max <= pot.n_sites:
        raise ParameterError("mu_max", f"must lie in [1, {pot.n_sites}], got {mu_max}")
    mus = np.arange(1, int(mu_max) + 1)
    return pd.DataFrame({"mu": mus, "eps_over_delta": site_energies(pot, mus)})


def energy_scan(assignment, grid, u_over_j=0.0):
    """
    Ansatz energy curves of every assigned site over a Delta/J grid.

    Args:
        assignment: SiteAssignment (its potential supplies alpha, phi, b, N)
        grid: GridSpec over delta_over_j
        u_over_j: Optional interaction ratio

    Returns:
        EnergyCurveSet; me_line is set only when alpha != 0
    """
    if grid.variable != DELTA:
        raise ParameterError("variable", "energy_scan sweeps delta_over_j")
    pot = assignment.pot
    samples = grid.samples()

    curves = []
    for mu, b_value in assignment:
        values = np.empty(len(samples))
        for i, delta_over_j in enumerate(samples):
            values[i] = ansatz_energy(pot.replace(delta_over_j=delta_over_j), mu, b_value, u_over_j)
        classes = [classify_state(e, pot.alpha, d) for e, d in zip(values, samples)]
        curves.append(EnergyCurve(mu, b_value, values, classes))

    me_line = None
    if pot.alpha != 0:
        me_line = np.array([mobility_edge_energy(pot.alpha, d) for d in samples])
    logger.debug("energy scan: %d curves x %d points", len(curves), len(samples))
    return EnergyCurveSet(DELTA, samples, curves, me_line)


def alpha_scan(pot_template, assignment, grid, delta_over_j, u_over_j=0.0):
    """
    Ansatz energy curves as alpha varies at fixed Delta/J, with (mu, B) frozen.

    Args:
        pot_template: PotentialParams supplying phi, b and N
        assignment: SiteAssignment whose (mu, B) pairs are reused
        grid: GridSpec over alpha (inside (-1, 1))
        delta_over_j: Fixed Delta/J

    Returns:
        EnergyCurveSet; me_line is NaN at alpha = 0
    """
    if grid.variable != ALPHA:
        raise ParameterError("variable", "alpha_scan sweeps alpha")
    samples = grid.samples()
    if np.any(np.abs(samples) >= 1):
        raise ParameterError("grid", "alpha grid touches |alpha| = 1")

    pots = [pot_template.replace(alpha=a, delta_over_j=delta_over_j) for a in samples]
    curves = []
    for mu, b_value in assignment:
        values = np.array([ansatz_energy(pot, mu, b_value, u_over_j) for pot in pots])
        classes = [classify_state(e, a, delta_over_j) for e, a in zip(values, samples)]
        curves.append(EnergyCurve(mu, b_value, values, classes))

    me_line = np.array([mobility_edge_energy(a, delta_over_j) if a != 0 else np.nan for a in samples])
    return EnergyCurveSet(ALPHA, samples, curves, me_line)


def pr_scan(mu, n_sites, grid, include_delta_limit=False):
    """
    Participation ratio of the Lorentzian population along a Delta/J grid.

    Args:
        mu: Localization site
        n_sites: N
        grid: GridSpec over delta_over_j
        include_delta_limit: Append the Delta/J = inf row (PR/N = 1/N)

    Returns:
        DataFrame with columns delta_over_j, pr, pr_over_n
    """
    if grid.variable != DELTA:
        raise ParameterError("variable", "pr_scan sweeps delta_over_j")
    samples = list(grid.samples())
    if include_delta_limit:
        samples.append(math.inf)
    prs = [participation_ratio(lorentzian_population(mu, d, n_sites)) for d in samples]
    frame = pd.DataFrame({"delta_over_j": samples, "pr": prs})
    frame["pr_over_n"] = frame["pr"] / n_sites
    return frame


def _oracle_point(pot):
    spectrum = eigensystem(build_hamiltonian(pot))
    localized = sum(1 for c in spectrum.classes if c is StateClass.LOCALIZED)
    return (
        pot.delta_over_j,
        spectrum.mean_ipr,
        float(np.mean(spectrum.participation_ratios)) / pot.n_sites,
        localized / len(spectrum),
    )


def oracle_scan(pot, grid, n_jobs=1):
    """
    Exact-diagonalization statistics along a Delta/J grid.

    Grid points are diagonalized independently (in parallel when n_jobs != 1)
    and reassembled in grid order.

    Returns:
        DataFrame with columns delta_over_j, mean_ipr, mean_pr_over_n, localized_fraction
    """
    if grid.variable != DELTA:
        raise ParameterError("variable", "oracle_scan sweeps delta_over_j")
    pots = [pot.replace(delta_over_j=d) for d in grid.samples()]
    rows = Parallel(n_jobs=n_jobs)(delayed(_oracle_point)(p) for p in pots)
    return pd.DataFrame(rows, columns=["delta_over_j", "mean_ipr", "mean_pr_over_n", "localized_fraction"])


def to_frame(data):
    """Turn any dataset produced by gaa_lab into a DataFrame"""
    if isinstance(data, pd.DataFrame):
        return data
    if isinstance(data, EnergyCurveSet):
        return data.to_frame()
    if isinstance(data, dict):
        return pd.DataFrame([data])
    if isinstance(data, (list, tuple)):
        if data and all(isinstance(item, CrossingReport) for item in data):
            return pd.DataFrame([item.as_row() for item in data])
        if not data:
            return pd.DataFrame()
    raise TypeError(f"cannot serialize {type(data).__name__} as a dataset")


def _json_value(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def write_dataset(data, path, fmt="csv"):
    """
    Write a dataset as UTF-8 CSV (LF line endings, header row) or JSON.

    Args:
        data: DataFrame, EnergyCurveSet, list of CrossingReport or a summary dict
        path: Destination file path or text stream
        fmt: "csv" or "json"
    """
    frame = to_frame(data)
    if fmt == "csv":
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    elif fmt == "json":
        records = [
            {column: _json_value(value) for column, value in zip(frame.columns, row)}
            for row in frame.itertuples(index=False, name=None)
        ]
        payload = {"columns": [str(c) for c in frame.columns], "records": records}
        text = json.dumps(payload, indent=2) + "\n"
        if hasattr(path, "write"):
            path.write(text)
        else:
            with open(path, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(text)
    else:
        raise ParameterError("format", f"must be csv or json, got {fmt!r}")
    logger.info("wrote %d rows to %s", len(frame), getattr(path, "name", path))


def read_dataset(path):
    """Load a dataset written by write_dataset back into a DataFrame"""
    if str(path).endswith(".json"):
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
        frame = pd.DataFrame(payload["records"], columns=payload["columns"])
        non_finite = {"inf": math.inf, "-inf": -math.inf}
        for column in frame.select_dtypes(include="object").columns:
            frame[column] = frame[column].map(lambda value: non_finite.get(value, value) if isinstance(value, str) else value)
        return frame.infer_objects()
    return pd.read_csv(path, float_precision="round_trip", keep_default_na=True)


# --- run configuration -------------------------------------------------------

def _parse_float(text):
    return float(text)


def _parse_int(text):
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


_PI_MULTIPLE = re.compile(r"^\s*([+-]?\d*\.?\d*(?:[eE][+-]?\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def parse_phase(text):
    """
    Parse a phase in radians: a plain number or a multiple of pi
    ("pi", "-pi", "0.5*pi", "pi/2").
    """
    text = text.strip()
    match = _PI_MULTIPLE.match(text)
    if match:
        factor_text, divisor_text = match.groups()
        if factor_text in ("", "+"):
            factor = 1.0
        elif factor_text == "-":
            factor = -1.0
        else:
            factor = float(factor_text)
        divisor = float(divisor_text) if divisor_text else 1.0
        return factor * math.pi / divisor
    return float(text)


def _parse_choice(choices):
    def parse(text):
        if text not in choices:
            raise ValueError(f"expected one of {', '.join(choices)}")
        return text
    return parse


CONFIG_KEYS = {
    "alpha": _parse_float,
    "phi": parse_phase,
    "delta_over_j": _parse_float,
    "n_sites": _parse_int,
    "mu": _parse_int,
    "m_sites": _parse_int,
    "b_min": _parse_float,
    "b_max": _parse_float,
    "grid_start": _parse_float,
    "grid_stop": _parse_float,
    "grid_steps": _parse_int,
    "variable": _parse_choice(VARIABLES),
    "u_over_j": _parse_float,
    "format": _parse_choice(("csv", "json")),
    "output": str,
}


def parse_config_text(text):
    """
    Parse `key = value` lines into a dict of typed values.

    Blank lines and text after # are ignored.
    """
    config = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError("unknown key", line=number, key=key)
        if key in config:
            raise ConfigError("duplicate key", line=number, key=key)
        if not value:
            raise ConfigError("missing value", line=number, key=key)
        try:
            config[key] = CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"invalid value {value!r} ({exc})", line=number, key=key) from None
    return config


def read_config(path):
    """
    Read a run configuration file.

    Args:
        path: Path to a `key = value` text file

    Returns:
        Dictionary of parsed values keyed by config key
    """
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as handle:
        config = parse_config_text(handle.read())
    logger.debug("read %d config keys from %s", len(config), path)
    return config

