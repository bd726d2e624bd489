"""
Command-line entry point: figure reproduction, single evaluations,
exact-oracle runs and the ansatz-vs-oracle comparison.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""
import argparse
import logging
import math
import os
import sys

import numpy as np
import pandas as pd

from gaa_lab import plotting
from gaa_lab.ansatz_assignment import assign_b, check_no_crossing, summarize_crossings
from gaa_lab.exact_oracle import build_hamiltonian, eigensystem, me_consistency
from gaa_lab.exceptions import ConfigError, OracleConvergenceError, ParameterError
from gaa_lab.model_core import (
    PotentialParams,
    ansatz_energy,
    classify_state,
    interaction_sum,
    inverse_participation_ratio,
    lorentzian_population,
    mobility_edge_energy,
    participation_ratio,
)
from gaa_lab.sweep_engine import (
    GridSpec,
    alpha_scan,
    default_alpha_grid,
    default_delta_grid,
    default_pr_grid,
    energy_scan,
    parse_grid,
    parse_phase,
    pr_scan,
    read_config,
    site_energy_table,
    write_dataset,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

COMMANDS = {
    "site-energies": "eps_mu/Delta for mu = 1..m",
    "populations": "Lorentzian population P_n with PR, IPR and interaction sum",
    "pr-scan": "PR and PR/N of the population along a Delta/J grid",
    "assign-b": "B(mu) for the first m sites in ascending eps order",
    "energy-scan": "ansatz E/J vs Delta/J for the first m sites",
    "alpha-scan": "ansatz E/J vs alpha at fixed Delta/J for the first m sites",
    "oracle-spectrum": "exact eigenvalues and IPRs of the GAA chain",
    "oracle-compare": "ansatz classification next to exact eigenstate statistics",
    "fig1": "datasets of the alpha = -0.5, phi = pi, N = 201 figure panels",
    "fig2": "datasets of the alpha = 0, phi = 0, N = 51 figure panels",
}

DEFAULTS = {
    "alpha": 0.0,
    "phi": 0.0,
    "delta_over_j": None,
    "n_sites": 201,
    "mu": None,
    "m_sites": None,
    "b_min": -2.0,
    "b_max": 2.0,
    "u_over_j": 0.0,
    "format": "csv",
    "output": None,
}

# Figure presets sit between the built-in defaults and the config file
PRESETS = {
    "fig1": {"alpha": -0.5, "phi": math.pi, "n_sites": 201, "m_sites": 15, "mu": 100},
    "fig2": {"alpha": 0.0, "phi": 0.0, "n_sites": 51, "m_sites": 15, "delta_over_j": 1.8},
}

# Flag name (dest) -> config key
FLAG_KEYS = {
    "alpha": "alpha",
    "phi": "phi",
    "delta_over_j": "delta_over_j",
    "n_sites": "n_sites",
    "mu": "mu",
    "m_sites": "m_sites",
    "b_min": "b_min",
    "b_max": "b_max",
    "u_over_j": "u_over_j",
    "format": "format",
    "output": "output",
}


class UsageError(Exception):
    """Invalid combination of command-line options"""


def _phase(text):
    try:
        return parse_phase(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid phase value: {text!r}") from None


def _delta(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid Delta/J value: {text!r}") from None
    if math.isnan(value) or value < 0:
        raise argparse.ArgumentTypeError(f"Delta/J must be >= 0, got {text!r}")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, help="tuning parameter in (-1, 1)")
    common.add_argument("--phi", type=_phase, help="phase in radians (accepts pi, pi/2, 0.5*pi)")
    common.add_argument("--delta-over-j", type=_delta, help="quasiperiodicity amplitude Delta/J")
    common.add_argument("--n-sites", type=int, help="number of lattice sites N")
    common.add_argument("--mu", type=int, help="localization site")
    common.add_argument("--m-sites", type=int, help="number of leading sites")
    common.add_argument("--b-min", type=float, help="lower end of the B range")
    common.add_argument("--b-max", type=float, help="upper end of the B range")
    common.add_argument("--grid", help="sweep grid as start:stop:steps")
    common.add_argument("--u-over-j", type=float, help="interaction ratio U/J")
    common.add_argument("--format", choices=("csv", "json"), help="dataset format")
    common.add_argument("--svg", action="store_true", help="also write SVG plots")
    common.add_argument("--output", help="output file (single dataset) or directory (fig1/fig2)")
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="gaa-lab",
        description="Parametrized generalized Aubry-Andre model laboratory",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    for name, help_text in COMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


_log_handler = None


def _configure_logging(verbose):
    # One handler on the package logger, rebound to the current stderr on every run
    global _log_handler
    package_logger = logging.getLogger("gaa_lab")
    if _log_handler is not None:
        package_logger.removeHandler(_log_handler)
    _log_handler = logging.StreamHandler(sys.stderr)
    _log_handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    package_logger.addHandler(_log_handler)
    package_logger.setLevel(logging.DEBUG if verbose else logging.INFO)


def resolve_options(args):
    """
    Merge built-in defaults, figure presets, the config file and flags
    (later sources win).

    Returns:
        Dictionary of option values keyed by config key, plus the grid sources and "svg"
    """
    options = dict(DEFAULTS)
    options.update(PRESETS.get(args.command, {}))

    config = read_config(args.config) if args.config else {}
    grid_keys = {"grid_start", "grid_stop", "grid_steps"}
    present = grid_keys & set(config)
    if present and present != grid_keys:
        missing = ", ".join(sorted(grid_keys - present))
        raise ConfigError(f"incomplete grid, missing {missing}", key=sorted(grid_keys - present)[0])
    variable = config.pop("variable", None)
    grid_bounds = {key: config.pop(key) for key in present}
    options.update(config)

    for dest, key in FLAG_KEYS.items():
        value = getattr(args, dest)
        if value is not None:
            options[key] = value

    options["grid_text"] = args.grid
    options["grid_bounds"] = grid_bounds
    options["variable"] = variable
    options["svg"] = args.svg
    return options


def _grid(options, default):
    """GridSpec from --grid, then the config grid keys, then the command default"""
    if options["variable"] is not None and options["variable"] != default.variable:
        raise UsageError(f"this command sweeps {default.variable}, config asks for {options['variable']}")
    if options["grid_text"]:
        return parse_grid(options["grid_text"], default.variable)
    bounds = options["grid_bounds"]
    if bounds:
        return GridSpec(default.variable, bounds["grid_start"], bounds["grid_stop"], bounds["grid_steps"])
    return default


def _require(options, *keys):
    for key in keys:
        if options.get(key) is None:
            raise UsageError(f"missing required option --{key.replace('_', '-')}")


def _potential(options):
    # Delta/J only matters to commands that require it
    delta_over_j = options["delta_over_j"] if options["delta_over_j"] is not None else 1.0
    return PotentialParams(
        delta_over_j=delta_over_j,
        phi=options["phi"],
        alpha=options["alpha"],
        n_sites=options["n_sites"],
    )


def _b_range(options):
    return (options["b_min"], options["b_max"])


def _output_path(options, name):
    """Resolve --output for a single dataset; None means stdout"""
    output = options["output"]
    if output is None:
        return None
    if output.endswith(os.sep) or os.path.isdir(output):
        os.makedirs(output, exist_ok=True)
        return os.path.join(output, f"{name}.{options['format']}")
    parent = os.path.dirname(output)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return output


def _emit(data, options, name, plot=None):
    """Write one dataset (and its SVG when requested)"""
    path = _output_path(options, name)
    if path is None:
        write_dataset(data, sys.stdout, options["format"])
        return
    write_dataset(data, path, options["format"])
    if options["svg"] and plot is not None:
        plot(os.path.splitext(path)[0] + ".svg")


def _check_svg(options, table_only=None):
    if options["svg"] and options["output"] is None:
        raise UsageError("--svg needs --output")
    if options["svg"] and table_only:
        logger.info("no plot for the %s table, writing the dataset only", table_only)


# --- commands ------------------------------------------------------------------

def cmd_site_energies(options):
    _require(options, "m_sites")
    _check_svg(options)
    pot = _potential(options)
    table = site_energy_table(pot, options["m_sites"])
    _emit(table, options, "site_energies", lambda p: plotting.plot_site_energies(table, p))


def cmd_populations(options):
    _require(options, "mu", "delta_over_j")
    _check_svg(options, table_only="populations")
    population = lorentzian_population(options["mu"], options["delta_over_j"], options["n_sites"])
    table = pd.DataFrame({"n": np.arange(1, population.n_sites + 1), "p_n": population.weights})
    logger.info(
        "PR=%.12g IPR=%.12g interaction_sum=%.12g",
        participation_ratio(population),
        inverse_participation_ratio(population),
        interaction_sum(population),
    )
    _emit(table, options, "populations")


def cmd_pr_scan(options):
    _require(options, "mu")
    _check_svg(options)
    grid = _grid(options, default_pr_grid())
    table = pr_scan(options["mu"], options["n_sites"], grid, include_delta_limit=True)
    _emit(table, options, "pr_scan", lambda p: plotting.plot_pr_scan(table, p))


def _assignment_table(assignment):
    return pd.DataFrame(
        {
            "rank": np.arange(len(assignment)),
            "mu": assignment.mus,
            "eps_over_delta": [assignment.eps_for(mu) for mu in assignment.mus],
            "b_value": assignment.b_values,
        }
    )


def cmd_assign_b(options):
    _require(options, "m_sites")
    _check_svg(options, table_only="assign-b")
    pot = _potential(options)
    assignment = assign_b(pot, options["m_sites"], _b_range(options))
    summary = summarize_crossings(check_no_crossing(assignment))
    logger.info("no-crossing check: %(passed)d of %(pairs)d pairs keep their order", summary)
    _emit(_assignment_table(assignment), options, "assign_b")


def cmd_energy_scan(options):
    _require(options, "m_sites")
    _check_svg(options)
    grid = _grid(options, default_delta_grid())
    assignment = assign_b(_potential(options), options["m_sites"], _b_range(options))
    curves = energy_scan(assignment, grid, options["u_over_j"])
    _emit(curves, options, "energy_scan", lambda p: plotting.plot_energy_curves(curves, p))


def cmd_alpha_scan(options):
    _require(options, "m_sites", "delta_over_j")
    _check_svg(options)
    grid = _grid(options, default_alpha_grid())
    pot = _potential(options)
    assignment = assign_b(pot, options["m_sites"], _b_range(options))
    curves = alpha_scan(pot, assignment, grid, options["delta_over_j"], options["u_over_j"])
    _emit(curves, options, "alpha_scan", lambda p: plotting.plot_energy_curves(curves, p))


def _spectrum_table(spectrum, n_sites):
    return pd.DataFrame(
        {
            "index": np.arange(1, len(spectrum) + 1),
            "energy_over_j": spectrum.eigenvalues,
            "ipr": spectrum.iprs,
            "pr_over_n": spectrum.participation_ratios / n_sites,
            "class": [c.value for c in spectrum.classes],
        }
    )


def cmd_oracle_spectrum(options):
    _require(options, "delta_over_j")
    _check_svg(options)
    pot = _potential(options)
    h = build_hamiltonian(pot)
    spectrum = eigensystem(h)
    table = _spectrum_table(spectrum, pot.n_sites)
    logger.info("mean IPR %.6g over %d states", spectrum.mean_ipr, len(spectrum))
    me_energy = None
    if pot.alpha != 0:
        me_energy = mobility_edge_energy(pot.alpha, pot.delta_over_j)
        logger.info("mobility edge at E/J = %.6g; agreement %.4f", me_energy, me_consistency(spectrum, pot)["agreement"])
    _emit(table, options, "oracle_spectrum", lambda p: plotting.plot_spectrum(table, p, me_energy))


def cmd_oracle_compare(options):
    _require(options, "delta_over_j", "m_sites")
    _check_svg(options, table_only="oracle-compare")
    pot = _potential(options)
    if pot.alpha == 0:
        raise ParameterError("alpha", "the oracle comparison is made against the mobility edge, alpha must be != 0")
    assignment = assign_b(pot, options["m_sites"], _b_range(options))
    spectrum = eigensystem(build_hamiltonian(pot))

    rows = []
    for mu, b_value in sorted(assignment, key=lambda entry: entry[0]):
        energy = ansatz_energy(pot, mu, b_value, options["u_over_j"])
        population = lorentzian_population(mu, pot.delta_over_j, pot.n_sites)
        nearest = int(np.argmin(np.abs(spectrum.eigenvalues - energy)))
        rows.append(
            {
                "mu": mu,
                "b_value": b_value,
                "ansatz_energy_over_j": energy,
                "ansatz_class": classify_state(energy, pot.alpha, pot.delta_over_j).value,
                "ansatz_pr_over_n": participation_ratio(population) / pot.n_sites,
                "nearest_eigenvalue_over_j": spectrum.eigenvalues[nearest],
                "oracle_ipr": spectrum.iprs[nearest],
                "oracle_pr_over_n": 1.0 / (spectrum.iprs[nearest] * pot.n_sites),
                "oracle_class": spectrum.classes[nearest].value,
            }
        )
    table = pd.DataFrame(rows)
    summary = me_consistency(spectrum, pot)
    logger.info(
        "oracle: %(n_localized)d localized-side, %(n_extended)d extended-side states, agreement %(agreement).4f",
        summary,
    )
    path = _output_path(options, "oracle_compare")
    if path is None:
        write_dataset(table, sys.stdout, options["format"])
        return
    write_dataset(table, path, options["format"])
    write_dataset(summary, f"{os.path.splitext(path)[0]}_summary.{options['format']}", options["format"])


def _figure_dir(options):
    os.makedirs(options["output"], exist_ok=True)
    return options["output"]


def _write_panel(directory, name, data, options, plot=None):
    path = os.path.join(directory, f"{name}.{options['format']}")
    write_dataset(data, path, options["format"])
    if options["svg"] and plot is not None:
        plot(os.path.join(directory, f"{name}.svg"))


def cmd_fig1(options):
    _require(options, "output")
    pot = _potential(options)
    delta_grid = _grid(options, default_delta_grid())
    pr_grid = default_pr_grid()
    m_sites = options["m_sites"]

    fig1a = site_energy_table(pot, pot.n_sites)
    fig1b = site_energy_table(pot, m_sites)
    assignment = assign_b(pot, m_sites, _b_range(options))
    fig1c = energy_scan(assignment, delta_grid, options["u_over_j"])
    fig1d = pr_scan(options["mu"], pot.n_sites, pr_grid, include_delta_limit=True)

    directory = _figure_dir(options)

    _write_panel(directory, "fig1a", fig1a, options, lambda p: plotting.plot_site_energies(fig1a, p))
    _write_panel(directory, "fig1b", fig1b, options, lambda p: plotting.plot_site_energies(fig1b, p))
    _write_panel(directory, "fig1c", fig1c, options, lambda p: plotting.plot_energy_curves(fig1c, p))
    _write_panel(directory, "fig1d", fig1d, options, lambda p: plotting.plot_pr_scan(fig1d, p))


def cmd_fig2(options):
    _require(options, "output")
    pot = _potential(options)
    delta_grid = _grid(options, default_delta_grid())
    m_sites = options["m_sites"]

    fig2a = site_energy_table(pot, pot.n_sites)
    fig2b = site_energy_table(pot, m_sites)
    assignment = assign_b(pot, m_sites, _b_range(options))
    fig2c = energy_scan(assignment, delta_grid, options["u_over_j"])
    # (mu, B) of the Delta/J sweep are reused for the alpha sweep
    fig2d = alpha_scan(pot, assignment, default_alpha_grid(), options["delta_over_j"], options["u_over_j"])

    directory = _figure_dir(options)

    _write_panel(directory, "fig2a", fig2a, options, lambda p: plotting.plot_site_energies(fig2a, p))
    _write_panel(directory, "fig2b", fig2b, options, lambda p: plotting.plot_site_energies(fig2b, p))
    _write_panel(directory, "fig2c", fig2c, options, lambda p: plotting.plot_energy_curves(fig2c, p))
    _write_panel(directory, "fig2d", fig2d, options, lambda p: plotting.plot_energy_curves(fig2d, p))


HANDLERS = {
    "site-energies": cmd_site_energies,
    "populations": cmd_populations,
    "pr-scan": cmd_pr_scan,
    "assign-b": cmd_assign_b,
    "energy-scan": cmd_energy_scan,
    "alpha-scan": cmd_alpha_scan,
    "oracle-spectrum": cmd_oracle_spectrum,
    "oracle-compare": cmd_oracle_compare,
    "fig1": cmd_fig1,
    "fig2": cmd_fig2,
}


def run(argv=None):
    """
    Run one command.

    Args:
        argv: Argument list without the program name (defaults to sys.argv[1:])

    Returns:
        Process exit status
    """
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        parser.print_usage(sys.stderr)
        print("gaa-lab: error: a command is required", file=sys.stderr)
        return EXIT_USAGE

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    _configure_logging(args.verbose)
    try:
        options = resolve_options(args)
        HANDLERS[args.command](options)
    except (UsageError, ParameterError, ConfigError) as exc:
        print(f"gaa-lab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, OracleConvergenceError) as exc:
        print(f"gaa-lab {args.command}: failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def main():
    sys.exit(run())
