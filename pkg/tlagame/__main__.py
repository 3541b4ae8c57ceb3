#! /usr/bin/env python
# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
# Copyright © 2023 TLAGame contributors
#
# Distributed under terms of the BSD 3-Clause license.

"""Main function.
"""
import sys
import json
import logging
import pathlib
import argparse

import pydantic
import yaml
from tlagame import __version__
from tlagame.costs import theta_max
from tlagame.costs import session_costs
from tlagame.markov import discretize
from tlagame.markov import estimate_stp
from tlagame.solver import find_ne
from tlagame.solver import tla_gts
from tlagame.solver import sweep_accuracy
from tlagame.baselines import compare_schemes
from tlagame.baselines import compare_accuracies
from tlagame.utils.config import load_scenario
from tlagame.utils.data import ObservationTrace
from tlagame.utils.data import ResultBundle
from tlagame.utils.data import get_forecasts
from tlagame.utils.io import emit_results
from tlagame.utils.io import dump_outcome
from tlagame.utils.io import write_prices
from tlagame.utils.io import write_profits
from tlagame.utils.io import write_sweep
from tlagame.utils.io import write_comparison
from tlagame.utils.errors import TLAGameError
from tlagame.utils.errors import ScenarioError
from tlagame.utils.errors import ConfigurationError
from tlagame.utils.errors import InsufficientDataError

# exit codes
EXIT_OK, EXIT_USAGE, EXIT_LOAD, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    """Bad command-line usage."""


class _ArgumentParser(argparse.ArgumentParser):
    """An ArgumentParser that raises instead of exiting on usage errors."""

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def get_cmd_arguments(argv=None):
    """Parse and get CMD arguments.

    Attributes
    ----------
    argv : list or None
        By default, None means using `sys.argv`. Only explicitly use this argument for debugging.

    Returns
    -------
    args : argparse.Namespace
        CMD arguments.
    """

    # options shared by all subcommands
    common = _ArgumentParser(add_help=False, allow_abbrev=False)

    common.add_argument(
        "--log-level", action="store", type=str, default="normal", metavar="LEVEL",
        choices=["debug", "normal", "quiet"],
        help="Enabling logging debug messages."
    )

    common.add_argument(
        "--log-file", action="store", type=pathlib.Path, default=None, metavar="FILE",
        help="Saving log messages to a file instead of stderr."
    )

    # parse command-line arguments
    parser = _ArgumentParser(
        prog="TLAGame",
        description="Task-load-aware Bertrand pricing simulator for federated-learning incentives",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        allow_abbrev=False
    )

    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_ArgumentParser)
    subparsers.required = True

    simulate = subparsers.add_parser(
        "simulate", parents=[common], allow_abbrev=False,
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Run TLA-GTS and the scheme comparison, and write all results."
    )

    nesolve = subparsers.add_parser(
        "ne-solve", parents=[common], allow_abbrev=False,
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Run the best-response iteration on all UEs and write its trajectory."
    )

    compare = subparsers.add_parser(
        "compare", parents=[common], allow_abbrev=False,
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Compare the profits of TLA-GTS, pure-GTS and ILPS."
    )

    sweep = subparsers.add_parser(
        "sweep", parents=[common], allow_abbrev=False,
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Run TLA-GTS over a list of global accuracies."
    )

    for sub in (simulate, nesolve, compare, sweep):
        sub.add_argument(
            "--scenario", action="store", type=pathlib.Path, required=True, metavar="FILE",
            help="The path to a scenario file."
        )

        sub.add_argument(
            "--out", action="store", type=pathlib.Path, default=pathlib.Path("."), metavar="DIR",
            help="The folder receiving the result files."
        )

    for sub in (simulate, nesolve):
        sub.add_argument(
            "--xi", action="store", type=float, default=None, metavar="R",
            help="Overwrite the convergence ratio. Default is to respect the scenario file."
        )

        sub.add_argument(
            "--mode", action="store", type=str, choices=["printed", "derived"], default=None,
            help="Overwrite the MO response mode. Default is to respect the scenario file."
        )

    compare.add_argument(
        "--markup", action="store", type=float, default=None, metavar="R",
        help="Overwrite the ILPS markup. Default is to respect the scenario file."
    )

    compare.add_argument(
        "--epsilons", action="store", type=float, nargs="+", default=None, metavar="E",
        help="Also compare the schemes at these global accuracies and write comparison.csv."
    )

    sweep.add_argument(
        "--epsilons", action="store", type=float, nargs="+", required=True, metavar="E",
        help="Global accuracies to try."
    )

    estimate = subparsers.add_parser(
        "estimate-mc", parents=[common], allow_abbrev=False,
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Estimate a transition matrix from a trace file and print it."
    )

    estimate.add_argument(
        "--trace", action="store", type=pathlib.Path, required=True, metavar="FILE",
        help="A YAML list of state indices, or a mapping with a `slots` list."
    )

    estimate.add_argument(
        "--states", action="store", type=int, required=True, metavar="M",
        help="Number of states."
    )

    estimate.add_argument(
        "--kind", action="store", type=str, choices=["load", "gain"], default="load",
        help="The kind of the state space."
    )

    estimate.add_argument(
        "--bounds", action="store", type=float, nargs=2, default=None, metavar=("LO", "HI"),
        help="Bounds of the levels. Defaults to 0 1 for load and 1 2 for gain."
    )

    args = parser.parse_args(argv)

    # convert log level from string to corresponding Python type
    level_options = {"quiet": logging.ERROR, "normal": logging.INFO, "debug": logging.DEBUG}
    args.log_level = level_options[args.log_level]

    # make sure the file path is absolute
    if args.log_file is not None:
        args.log_file = args.log_file.expanduser().resolve()

    if "out" in args:
        args.out = args.out.expanduser().resolve()

    return args


def get_logger(filename, level):
    """Get a logger based on the debug level and whether to use log files.

    Arguments
    ---------
    filename : str or os.PathLike
    level : int

    Returns
    -------
    logging.Logger
    """

    # setup the top-level (i.e., package-level/tlagame) logger
    logger = logging.getLogger("tlagame")
    logger.setLevel(level)

    for handler in list(logger.handlers):  # repeated in-process runs
        logger.removeHandler(handler)
        handler.close()

    if filename is not None:
        fmt = "%(asctime)s %(name)s %(funcName)s [%(levelname)s] %(message)s"  # format
        logger.addHandler(logging.FileHandler(filename, "w"))
        logger.handlers[-1].setFormatter(logging.Formatter(fmt, "%m-%d %H:%M:%S"))
    else:
        logger.addHandler(logging.StreamHandler())
        logger.handlers[-1].setFormatter(logging.Formatter("%(asctime)s %(message)s", "%H:%M:%S"))

    # make the final & returned logger refer to this specific file (main function)
    return logging.getLogger("tlagame.main")


def get_final_scenario(args: argparse.Namespace):
    """Get a Scenario object with values overwritten by CMD options."""

    scenario = load_scenario(args.scenario)

    updates = {}
    if getattr(args, "xi", None) is not None:
        updates["xi"] = args.xi
    if getattr(args, "mode", None) is not None:
        updates["mode"] = args.mode
    if getattr(args, "markup", None) is not None:
        updates["markup"] = args.markup

    if updates:
        scenario = scenario.copy(update={"solver": scenario.solver.copy(update=updates)})

    # validate data again
    scenario.check()
    return scenario


def _true_estimates(forecasts, contract, config, outcome):
    """True-model estimates at each UE's final accounting accuracy, or theta_max / 2."""
    thetas = dict(zip(outcome.ue_ids, outcome.theta_accounting.tolist()))
    theta_ref = theta_max(contract.epsilon, contract.zeta, contract.I_g) / 2.
    return tuple(
        session_costs(
            fcst.profile, contract, fcst.prediction, thetas.get(fcst.id, theta_ref),
            taylor=config.counting == "taylor", enforce_cap=False)
        for fcst in forecasts
    )


def simulate(args, logger):
    """The `simulate` subcommand."""
    scenario = get_final_scenario(args)
    forecasts = get_forecasts(scenario)

    outcome = tla_gts(forecasts, scenario.contract, scenario.solver)
    logger.info("TLA-GTS: %s with UEs %s", outcome.status, list(outcome.survivors))

    reports = compare_schemes(scenario, scenario.solver, forecasts)

    bundle = ResultBundle(
        ne=outcome, reports=reports,
        predictions=_true_estimates(forecasts, scenario.contract, scenario.solver, outcome))

    emit_results(bundle, args.out)
    print(f"status={outcome.status} converged={str(outcome.converged).lower()} "
          f"survivors={','.join(str(ue) for ue in outcome.survivors)}")
    return EXIT_OK


def ne_solve(args, logger):
    """The `ne-solve` subcommand."""
    scenario = get_final_scenario(args)
    forecasts = get_forecasts(scenario)

    outcome = find_ne(forecasts, scenario.contract, scenario.solver)
    logger.info("Sweeps: %d, residual: %e", outcome.iterations, outcome.residual)

    args.out.mkdir(parents=True, exist_ok=True)
    write_prices(outcome, args.out.joinpath("prices.csv"))
    dump_outcome(outcome, args.out.joinpath("outcome.json"))
    print(f"converged={str(outcome.converged).lower()} iterations={outcome.iterations}")
    return EXIT_OK


def compare(args, logger):
    """The `compare` subcommand."""
    scenario = get_final_scenario(args)
    forecasts = get_forecasts(scenario)
    reports = compare_schemes(scenario, scenario.solver, forecasts)

    args.out.mkdir(parents=True, exist_ok=True)
    write_profits(reports, args.out.joinpath("profits.csv"))
    logger.info("Compared %d schemes", len(reports))

    if args.epsilons is not None:
        points = compare_accuracies(scenario, args.epsilons, scenario.solver, forecasts)
        write_comparison(points, args.out.joinpath("comparison.csv"))
        logger.info("Compared the schemes at %d global accuracies", len(points))

    return EXIT_OK


def sweep(args, logger):
    """The `sweep` subcommand."""
    scenario = get_final_scenario(args)
    forecasts = get_forecasts(scenario)

    points = sweep_accuracy(forecasts, scenario.contract, scenario.solver, args.epsilons)

    args.out.mkdir(parents=True, exist_ok=True)
    write_sweep(points, args.out.joinpath("sweep.csv"))
    logger.info("Swept %d global accuracies", len(points))
    return EXIT_OK


def read_trace(path):
    """Read a trace file holding a YAML list or a mapping with `slots`."""
    path = pathlib.Path(path).expanduser()

    try:
        with open(path, "r", encoding="utf-8") as fobj:
            data = yaml.safe_load(fobj)
    except OSError as err:
        raise ScenarioError(f"cannot read trace file {path}: {err.strerror}") from err
    except yaml.YAMLError as err:
        raise ScenarioError(f"cannot parse trace file {path}: {err}") from err

    if isinstance(data, dict):
        data = data.get("slots")

    if not isinstance(data, list):
        raise ScenarioError(f"{path} holds neither a list nor a mapping with `slots`")

    return data


def estimate_mc(args, logger):
    """The `estimate-mc` subcommand."""
    bounds = args.bounds if args.bounds is not None else {"load": (0., 1.), "gain": (1., 2.)}[args.kind]

    space = discretize(args.kind, bounds[0], bounds[1], args.states)
    trace = ObservationTrace(slots=read_trace(args.trace))

    try:
        trace.check_against(space)
    except AssertionError as err:
        raise ScenarioError(f"{args.trace}: {err}") from err

    chain = estimate_stp(space, trace)
    logger.info("Estimated a %dx%d matrix from %d slots", space.count, space.count, trace.slots.size)

    print(json.dumps(chain.stp.tolist()))
    return EXIT_OK


COMMANDS = {
    "simulate": simulate, "ne-solve": ne_solve, "compare": compare, "sweep": sweep,
    "estimate-mc": estimate_mc,
}


def run_cli(argv=None):
    """Parse arguments, run a subcommand, and map failures to exit codes.

    Returns
    -------
    int
        0 success (including runs that hit the iteration cap), 1 usage, 2 loading or validation,
        3 other run-time failures.
    """

    try:
        args = get_cmd_arguments(argv)
    except UsageError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as err:  # --help and --version
        return err.code if isinstance(err.code, int) else EXIT_OK

    logger = get_logger(args.log_file, args.log_level)

    logger.info("Running %s", args.command)

    try:
        code = COMMANDS[args.command](args, logger)
    except (ScenarioError, ConfigurationError, InsufficientDataError, pydantic.ValidationError) as err:
        logger.error("%s", err)
        return EXIT_LOAD
    except (TLAGameError, OSError) as err:
        logger.error("%s", err)
        return EXIT_RUNTIME

    logger.info("Done %s", args.command)
    return code


def main():
    """Main function."""
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
