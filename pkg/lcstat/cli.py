"""
Command-line front end. Every subcommand writes one or more tables (CSV with a header
row, or JSON records with the same fields) either to standard output or, with --out,
to files in a directory together with gnuplot scripts that plot them.

Exit codes: 0 on success, 2 for configuration and input errors, 3 for numeric
failures. Errors are written to standard error as one JSON record.
"""
import argparse
import io
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from lcstat.bingham import (
    ds2_dr,
    log_partition,
    r_from_s2,
    s2_from_r,
    s4_from_r,
    s4_from_r_legendre,
)
from lcstat.frank import (
    PHASE_NEMATIC,
    alpha_from_volume_fraction,
    dimensional_K,
    elastic_constant_sweep,
)
from lcstat.geometry_kernel import (
    FOURTH_MOMENT_COMPONENTS,
    PairFrame,
    RodGeometry,
    excluded_volume,
    fourth_moment_diag,
    moment_mc,
    second_moment_diag,
)
from lcstat.logger import get_logger
from lcstat.lcstat_exceptions import (
    LcstatConfigException,
    LcstatDomainException,
    LcstatInputException,
    LcstatNumericException,
    LcstatOptimizationException,
    LcstatPhaseException,
)
from lcstat.lcstat_util import parse_config_file, parse_float_list
from lcstat.nematic_model import equilibrium_branches, transition_alpha
from lcstat.smectic1d import (
    PHASE_SMECTIC,
    classify_phase,
    minimize_profile,
    phase_diagram,
    smectic_N,
)
from lcstat.validation import handle_config_error, validate_eta

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NUMERIC_ERROR = 3

CONFIG_ERRORS = (LcstatConfigException, LcstatInputException, LcstatDomainException)
NUMERIC_ERRORS = (
    LcstatNumericException,
    LcstatOptimizationException,
    LcstatPhaseException,
)

ANGSTROM_IN_CM = 1e-8
PROFILE_POINTS = 128


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        handle_config_error(message)


def _int_list(value):
    return [int(item) for item in parse_float_list(value)]


def _float_pair(value):
    values = parse_float_list(value)
    if len(values) != 2:
        handle_config_error(f'Expected two numbers "low,high", got "{value}".')
    return tuple(values)


@dataclass(frozen=True)
class RunConfig:
    """
    Parsed run parameters after the config file and the flags were merged.

    :param params (dict): subcommand options keyed by their snake_case names.
    :param out (str): output directory, None to write to standard output.
    """

    command: str
    params: dict = field(default_factory=dict)
    out: str = None
    format: str = "csv"


@dataclass
class Table:
    name: str
    columns: list
    rows: list
    plot: str = None


def format_value(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def _json_value(value):
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def render_table(table, output_format):
    if output_format == "json":
        records = [
            {column: _json_value(row.get(column)) for column in table.columns}
            for row in table.rows
        ]
        return json.dumps(records, indent=2) + "\n"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(row.get(column)) for column in table.columns])
    return buffer.getvalue()


def write_tables(tables, config, stream=None):
    stream = sys.stdout if stream is None else stream
    extension = "json" if config.format == "json" else "csv"
    if config.out is None:
        stream.write("\n".join(render_table(table, config.format) for table in tables))
        return
    os.makedirs(config.out, exist_ok=True)
    for table in tables:
        path = os.path.join(config.out, f"{table.name}.{extension}")
        with open(path, "w") as output:
            output.write(render_table(table, config.format))
        get_logger().info(f"Wrote {path}")
        if table.plot and config.format == "csv":
            with open(os.path.join(config.out, f"{table.name}.gp"), "w") as output:
                output.write(table.plot)


def _plot_script(table_name, xlabel, ylabel, series, title=None):
    """
    gnuplot script for the CSV table_name.csv. series holds (using-spec, title) pairs.
    """
    lines = [
        'set datafile separator ","',
        "set key autotitle columnhead",
        f'set xlabel "{xlabel}"',
        f'set ylabel "{ylabel}"',
    ]
    if title:
        lines.append(f'set title "{title}"')
    plots = ", \\\n     ".join(
        f'"{table_name}.csv" using {spec} with linespoints title "{label}"'
        for spec, label in series
    )
    lines.append(f"plot {plots}")
    return "\n".join(lines) + "\n"


def cmd_moments(config):
    p = config.params
    eta = validate_eta(p["eta"])
    geom = RodGeometry.from_eta(eta, p["L"])
    rows = []
    for gamma in p["gamma"]:
        frame = PairFrame.from_angle(gamma)
        analytic = {"M0": excluded_volume(gamma, geom)}
        analytic.update(
            zip(("M2_11", "M2_22", "M2_33"), second_moment_diag(gamma, geom))
        )
        analytic.update(
            (f"M4_{key}", value)
            for key, value in fourth_moment_diag(gamma, geom).items()
        )
        estimates = {}
        if p["mc_samples"]:
            estimates = _moment_estimates(frame, geom, p["mc_samples"], p["seed"])
        for component, value in analytic.items():
            row = dict(gamma=gamma, eta=eta, component=component, analytic=value)
            if component in estimates:
                mc_value, stderr = estimates[component]
                row.update(
                    mc=mc_value,
                    stderr=stderr,
                    z=float((mc_value - value) / stderr) if stderr > 0 else None,
                )
            rows.append(row)
    columns = ["gamma", "eta", "component", "analytic", "mc", "stderr", "z"]
    return [Table("moments", columns, rows)]


def _moment_estimates(frame, geom, n_samples, seed):
    """
    Monte Carlo estimates of the frame components. from_angle frames coincide with the
    laboratory axes, so lab components are frame components.
    """
    estimates = {}
    zeroth = moment_mc(frame.m, frame.m2, geom, 0, n_samples, seed)
    estimates["M0"] = (zeroth.value, zeroth.stderr)
    second = moment_mc(frame.m, frame.m2, geom, 2, n_samples, seed)
    for axis, name in enumerate(("M2_11", "M2_22", "M2_33")):
        estimates[name] = (second.value[axis, axis], second.stderr[axis, axis])
    fourth = moment_mc(frame.m, frame.m2, geom, 4, n_samples, seed)
    indices = {
        "x4": (0, 0, 0, 0),
        "y4": (1, 1, 1, 1),
        "z4": (2, 2, 2, 2),
        "x2y2": (0, 0, 1, 1),
        "y2z2": (1, 1, 2, 2),
        "x2z2": (0, 0, 2, 2),
    }
    for key in FOURTH_MOMENT_COMPONENTS:
        index = indices[key]
        estimates[f"M4_{key}"] = (fourth.value[index], fourth.stderr[index])
    return estimates


def cmd_bingham(config):
    p = config.params
    r_values = list(p["r"]) + [r_from_s2(S2) for S2 in p["s2"]]
    rows = [
        {
            "r": r,
            "S2": s2_from_r(r),
            "S4": s4_from_r(r),
            "S4_legendre": s4_from_r_legendre(r),
            "log_Z": log_partition(r),
            "dS2_dr": ds2_dr(r),
        }
        for r in r_values
    ]
    columns = ["r", "S2", "S4", "S4_legendre", "log_Z", "dS2_dr"]
    plot = _plot_script(
        "bingham", "r", "order parameter", [("1:2", "S2"), ("1:3", "S4")]
    )
    return [Table("bingham", columns, rows, plot)]


def cmd_equilibrium(config):
    alpha_grid = config.params["alpha"]
    if not alpha_grid:
        handle_config_error("The alpha grid is empty.")
    rows = []
    for alpha in alpha_grid:
        equilibrium = equilibrium_branches(alpha)
        ground = equilibrium.ground_state()
        for index, branch in enumerate(equilibrium.branches):
            rows.append(
                {
                    "alpha": alpha,
                    "branch": index,
                    "r": branch.r,
                    "S2": branch.S2,
                    "S4": branch.S4,
                    "energy": branch.energy,
                    "stable": branch.stable,
                    "ground_state": branch is ground,
                }
            )
    transition = transition_alpha()
    get_logger().info(
        f"Nematic branch exists above alpha={transition.alpha_existence}, "
        f"transition at alpha={transition.alpha_transition}."
    )
    columns = ["alpha", "branch", "r", "S2", "S4", "energy", "stable", "ground_state"]
    plot = _plot_script("equilibrium", "alpha", "S2", [("1:4", "S2")])
    summary = Table(
        "transition",
        ["alpha_existence", "S2_existence", "alpha_transition", "S2_transition"],
        [
            {
                "alpha_existence": transition.alpha_existence,
                "S2_existence": transition.S2_existence,
                "alpha_transition": transition.alpha_transition,
                "S2_transition": transition.S2_transition,
            }
        ],
    )
    return [Table("equilibrium", columns, rows, plot), summary]


def cmd_frank(config):
    p = config.params
    eta_list = [validate_eta(eta) for eta in p["eta"]]
    if not eta_list:
        handle_config_error("The eta list is empty.")
    physical = p["D_angstrom"] is not None and p["T"] is not None
    rows = []
    for eta in eta_list:
        if p["phi"] is not None:
            alpha_grid = [alpha_from_volume_fraction(p["phi"], eta)]
        else:
            alpha_grid = p["alpha"]
        if not alpha_grid:
            handle_config_error("The alpha grid is empty.")
        for sweep_row in elastic_constant_sweep([eta], alpha_grid):
            row = {
                "eta": sweep_row.eta,
                "alpha": sweep_row.alpha,
                "phase": sweep_row.phase,
                "S2": sweep_row.S2,
                "S4": sweep_row.S4,
                "K1": sweep_row.K1,
                "K2": sweep_row.K2,
                "K3": sweep_row.K3,
                "K4": sweep_row.K4,
            }
            if physical and sweep_row.phase == PHASE_NEMATIC:
                row.update(_dimensional_columns(sweep_row, p["D_angstrom"], p["T"]))
            rows.append(row)
    columns = ["eta", "alpha", "phase", "S2", "S4", "K1", "K2", "K3", "K4"]
    if physical:
        columns += ["K1_dyn", "K2_dyn", "K3_dyn", "K4_dyn"]
    series = [
        (f'2:(column("eta") == {eta} ? column("{name}") : NaN)', f"{name}, eta={eta}")
        for eta in eta_list
        for name in ("K1", "K2", "K3")
    ]
    plot = _plot_script("frank", "alpha", "K / (pi c^2 L^5 eta k_B T)", series)
    return [Table("frank", columns, rows, plot)]


def _dimensional_columns(row, D_angstrom, T):
    D = D_angstrom * ANGSTROM_IN_CM
    L = D / row.eta
    c = row.alpha / (math.pi * L**2 * D)
    values = (row.K1, row.K2, row.K3, row.K4)
    return {
        f"K{index}_dyn": dimensional_K(value, c, L, D, T)
        for index, value in enumerate(values, start=1)
    }


def _coefficients(p):
    return smectic_N(p["eta"], p["n31"], p["n32"])


def _modes(p):
    modes = tuple(p["modes"])
    if len(modes) != 3:
        handle_config_error(f"--modes needs three counts n1,n2,n3, got {modes}.")
    return modes


def cmd_smectic(config):
    p = config.params
    coeffs = _coefficients(p)
    profile, energy = minimize_profile(
        p["alpha"], p["eta"], coeffs, _modes(p), p["d_range"], p["seed"]
    )
    phase = classify_phase(profile)
    grid = profile.on_grid(p["points"])
    summary = Table(
        "smectic_summary",
        ["alpha", "eta", "phase", "d", "energy", "mean_S2", "u1"],
        [
            {
                "alpha": p["alpha"],
                "eta": p["eta"],
                "phase": phase,
                "d": profile.d if phase == PHASE_SMECTIC else None,
                "energy": energy,
                "mean_S2": float(np.mean(grid.S2)),
                "u1": float(profile.u[0]),
            }
        ],
    )
    rows = [
        {"x": x, "c": c, "S2": S2, "S4": S4}
        for x, c, S2, S4 in zip(grid.x, grid.c, grid.S2, grid.S4)
    ]
    plot = _plot_script(
        "smectic_profile",
        "x / L",
        "profile",
        [("1:2", "c"), ("1:3", "S2"), ("1:4", "S4")],
        title=f"alpha = {p['alpha']}, eta = {p['eta']}",
    )
    return [summary, Table("smectic_profile", ["x", "c", "S2", "S4"], rows, plot)]


def cmd_phase_diagram(config):
    p = config.params
    if not p["alpha"]:
        handle_config_error("The alpha grid is empty.")
    points = phase_diagram(
        p["alpha"], p["eta"], _coefficients(p), _modes(p), p["d_range"], p["seed"]
    )
    rows = [
        {
            "alpha": point.alpha,
            "eta": point.eta,
            "phase": point.phase,
            "d": point.d,
            "energy": point.energy,
            "mean_S2": point.mean_S2,
            "u1": point.amplitudes[0] if point.amplitudes else None,
            "error": point.error,
        }
        for point in points
    ]
    columns = ["alpha", "eta", "phase", "d", "energy", "mean_S2", "u1", "error"]
    plot = _plot_script(
        "phase_diagram",
        "alpha",
        "value",
        [("1:4", "layer period d"), ("1:6", "mean S2"), ("1:7", "u1")],
        title=f"eta = {p['eta']}",
    )
    return [Table("phase_diagram", columns, rows, plot)]


def _add_smectic_options(parser):
    parser.add_argument("--eta", type=float, default=0.1)
    parser.add_argument("--n31", type=float, help="override of N31")
    parser.add_argument("--n32", type=float, help="override of N32")
    parser.add_argument("--modes", type=_int_list, default="8,8,8", help="n1,n2,n3")
    parser.add_argument("--d-range", type=_float_pair, default="1.0,2.5")
    parser.add_argument("--seed", type=int, default=0)


COMMANDS = {
    "moments": cmd_moments,
    "bingham": cmd_bingham,
    "equilibrium": cmd_equilibrium,
    "frank": cmd_frank,
    "smectic": cmd_smectic,
    "phase-diagram": cmd_phase_diagram,
}


def build_parser():
    parser = _ArgumentParser(
        prog="lcstat", description="Static liquid-crystal modeling pipelines."
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    subcommands = {}
    for name in COMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("--config", help="key = value file; flags override it")
        sub.add_argument("--out", help="output directory (default: standard output)")
        sub.add_argument("--format", choices=("csv", "json"), default="csv")
        subcommands[name] = sub

    moments = subcommands["moments"]
    moments.add_argument("--eta", type=float, default=0.1)
    moments.add_argument("--L", type=float, default=1.0)
    moments.add_argument(
        "--gamma", type=parse_float_list, default="1.5707963267948966"
    )
    moments.add_argument("--mc-samples", type=int, default=0)
    moments.add_argument("--seed", type=int, default=0)

    bingham = subcommands["bingham"]
    bingham.add_argument("--r", type=parse_float_list, default="-5,0,1,10,50")
    bingham.add_argument("--s2", type=parse_float_list, default="")

    subcommands["equilibrium"].add_argument(
        "--alpha", type=parse_float_list, default="10:30:21"
    )

    frank = subcommands["frank"]
    frank.add_argument("--eta", type=parse_float_list, default="0.1,0.3,0.6,1.0")
    frank.add_argument("--alpha", type=parse_float_list, default="15:60:46")
    frank.add_argument("--phi", type=float, help="volume fraction; replaces --alpha")
    frank.add_argument("--D-angstrom", dest="D_angstrom", type=float)
    frank.add_argument("--T", type=float, help="temperature in kelvin")

    smectic = subcommands["smectic"]
    smectic.add_argument("--alpha", type=float, default=20.0)
    smectic.add_argument("--points", type=int, default=PROFILE_POINTS)
    _add_smectic_options(smectic)

    diagram = subcommands["phase-diagram"]
    diagram.add_argument("--alpha", type=parse_float_list, default="10:40:16")
    _add_smectic_options(diagram)
    return parser, subcommands


def _apply_config_file(argv, parser, subcommands):
    """
    Installs the values of the --config file as defaults of the chosen subcommand so
    that flags override them. argparse converts string defaults through each option's
    type.
    """
    args, _ = parser.parse_known_args(argv)
    if not args.config:
        return
    try:
        with open(args.config) as config_file:
            values = parse_config_file(config_file.read())
    except OSError as e:
        handle_config_error(f"Cannot read config file {args.config}: {e}")
    sub = subcommands[args.command]
    # Config keys arrive lower-cased; option names such as L or T keep their case.
    known = {
        action.dest.lower(): action.dest
        for action in sub._actions
        if action.dest not in ("help", "config")
    }
    unknown = sorted(set(values) - set(known))
    if unknown:
        handle_config_error(f"Unknown config keys for {args.command}: {unknown}")
    sub.set_defaults(**{known[key]: value for key, value in values.items()})


def build_run_config(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser, subcommands = build_parser()
    _apply_config_file(argv, parser, subcommands)
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    args.pop("config")
    out, output_format = args.pop("out"), args.pop("format")
    return RunConfig(command=command, params=args, out=out, format=output_format)


def _report_error(e, stream):
    record = {"error": type(e).__name__, "message": str(e)}
    stream.write(json.dumps(record) + "\n")


def main(argv=None, stdout=None, stderr=None):
    stderr = sys.stderr if stderr is None else stderr
    try:
        config = build_run_config(argv)
        get_logger().info(f"Running {config.command} with {config.params}")
        tables = COMMANDS[config.command](config)
        write_tables(tables, config, stdout)
    except CONFIG_ERRORS as e:
        _report_error(e, stderr)
        return EXIT_CONFIG_ERROR
    except NUMERIC_ERRORS as e:
        _report_error(e, stderr)
        return EXIT_NUMERIC_ERROR
    return EXIT_OK
