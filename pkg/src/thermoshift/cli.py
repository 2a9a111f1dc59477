from __future__ import division

import argparse
import sys
import time

import numpy as np

from . import __version__
from .config import load_config
from .csv import CSVReport
from .equidist import COLUMNS as EQUIDIST_COLUMNS
from .equidist import equidist_diagnostics
from .errors import ConfigError
from .errors import ThermoshiftError
from .ldp import legendre
from .ldp import level1_rate
from .ldp import periodic_deviation_rate
from .ldp import pressure_curve
from .ldp import sample_empirical_deviation
from .logger import Logger
from .models import bowen_dimension
from .options import add_beta_options
from .options import add_deviation_options
from .options import add_global_options
from .options import add_periodic_options
from .options import add_sampling_options
from .options import add_truncation_options
from .stats import TrialStats
from .storage.file import FileStorage
from .thermo import entropy_defect_trials
from .thermo import gibbs_certificate
from .thermo import gibbs_measure
from .thermo import measure_functionals
from .thermo import pressure
from .utils import available_cores
from .utils import expand_grid
from .utils import get_current_time
from .utils import get_machine_info
from .utils import parse_count
from .utils import parse_tolerance

DEVIATION_COLUMNS = ("n", "estimate", "ci_low", "ci_high", "target_rate")
DEFAULT_T_GRID = [-5.0, 5.0, 201]


class HelpAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        if values:
            make_parser().parse_args([values, '--help'])
        else:
            parser.print_help()
        parser.exit()


class CommandArgumentParser(argparse.ArgumentParser):
    commands = None
    commands_dispatch = None

    def __init__(self, *args, **kwargs):
        kwargs['add_help'] = False

        super(CommandArgumentParser, self).__init__(*args,
                                                    formatter_class=argparse.RawDescriptionHelpFormatter,
                                                    **kwargs)
        self.add_argument(
            '-h', '--help',
            metavar='COMMAND',
            nargs='?', action=HelpAction, help='Display help and exit.'
        )
        help_command = self.add_command(
            'help',
            description='Display help and exit.'
        )
        help_command.add_argument('command', nargs='?', action=HelpAction)

    def add_command(self, name, **opts):
        if self.commands is None:
            self.commands = self.add_subparsers(
                title='commands', dest='command', parser_class=argparse.ArgumentParser,
            )
            self.commands_dispatch = {}
        if 'description' in opts and 'help' not in opts:
            opts['help'] = opts['description']

        command = self.commands.add_parser(
            name, formatter_class=argparse.RawDescriptionHelpFormatter, **opts
        )
        add_global_options(command.add_argument)
        self.commands_dispatch[name] = command
        return command


def make_parser():
    parser = CommandArgumentParser('thermoshift', description="Thermodynamic formalism on countable Markov shifts.")
    parser.add_argument('--version', action='version', version='thermoshift %s' % __version__)

    command = parser.add_command(
        'pressure',
        description='Pressure of beta*phi at truncation p, with delta against p/2 and the log Z_n cross-check.',
        epilog='''examples:

    thermoshift pressure --config gauss.json --p 64 --q 2

        Gauss potential over digits 1..64 with the 2-window coding.''')
    add_truncation_options(command.add_argument)
    add_beta_options(command.add_argument)
    add_periodic_options(command.add_argument)

    command = parser.add_command('beta-inf', description='Summability exponent beta_inf from the tail descriptor.')
    add_beta_options(command.add_argument)

    command = parser.add_command(
        'gibbs-check', description='Gibbs measure, its two-sided cylinder certificate and h, integral, F.')
    add_truncation_options(command.add_argument)
    add_beta_options(command.add_argument)
    command.add_argument('--n-max', metavar='N', type=parse_count, default=None, dest='n_max',
                         help='Longest cylinder (in states) checked.')

    command = parser.add_command('equidist', description='Weighted periodic-point measures against the Gibbs target.')
    add_truncation_options(command.add_argument)
    add_periodic_options(command.add_argument)

    command = parser.add_command('dimension', description='Root of beta -> P(beta*phi) by bisection.')
    add_truncation_options(command.add_argument)
    add_beta_options(command.add_argument)
    command.add_argument('--beta-max', metavar='BETA', type=parse_tolerance, default=None, dest='beta_max',
                         help='Right end of the bisection bracket.')

    command = parser.add_command('ldp-rate', description='Level-1 rate function by Legendre transform.')
    add_truncation_options(command.add_argument)
    add_periodic_options(command.add_argument)
    add_deviation_options(command.add_argument)

    command = parser.add_command('ldp-sample', description='Monte Carlo deviation rates under the Gibbs measure.')
    add_truncation_options(command.add_argument)
    add_periodic_options(command.add_argument)
    add_deviation_options(command.add_argument)
    add_sampling_options(command.add_argument)

    command = parser.add_command('ldp-periodic', description='Decay of weighted periodic points with atypical means.')
    add_truncation_options(command.add_argument)
    add_periodic_options(command.add_argument)
    add_deviation_options(command.add_argument)

    command = parser.add_command('defect-test', description='Entropy-defect inequality on random Markov measures.')
    add_sampling_options(command.add_argument)
    command.add_argument('--p', metavar='LABEL', type=int, default=None, help='Collapse symbols after LABEL.')
    command.add_argument('--delta', metavar='DELTA', type=parse_tolerance, default=None, help='Slack above beta_inf.')
    return parser


def _settings(model, config):
    return {
        "p": config.get("p", model.default_p),
        "q": config.get("q", model.default_q),
        "coding": config.get("coding", model.default_coding),
        "bound": config.get("bound", model.default_bound),
        "require_primitive": config.get("require_primitive", True),
    }


def _observable(model, config, command):
    name = config.get("observable")
    if name is None:
        raise ConfigError("Command %r needs an observable (--observable or params.observable)." % command)
    return model.observable(name)


def _threshold(config, command):
    threshold = config.get("threshold")
    if threshold is None:
        raise ConfigError("Command %r needs a threshold (--threshold or params.threshold)." % command)
    return threshold


def _target_rate(model, observable, config, settings, threshold):
    curve = pressure_curve(model, observable, expand_grid(config.get("t_grid", DEFAULT_T_GRID)),
                           settings["p"], settings["q"], settings["coding"], settings["bound"],
                           settings["require_primitive"], estimate_error=False)
    return legendre(curve, threshold)[0]


def run_pressure(model, config, logger):
    settings = _settings(model, config)
    observable = config.get("observable")
    result = pressure(model, config.get("beta", 1.0), settings["p"], settings["q"], settings["coding"],
                      settings["bound"], None if observable is None else model.observable(observable),
                      settings["require_primitive"], logger=logger)
    rows = [{"p": result.p, "q": result.q, "beta": result.beta, "pressure": result.pressure, "delta": result.delta,
             "lower": result.lower, "upper": result.upper, "cross_check": result.cross_check}]
    if result.pressure_half is not None:
        rows.append({"p": result.p_half, "q": result.q, "beta": result.beta, "pressure": result.pressure_half,
                     "delta": result.delta})
    logger.info("P = %.12g (delta %s)" % (result.pressure, result.delta))
    columns = ("p", "q", "beta", "pressure", "delta", "lower", "upper", "cross_check")
    return settings, result.as_dict(), rows, columns


def run_beta_inf(model, config, logger):
    tol = config.get("tol", 1e-6)
    results = {"beta_infinity": model.beta_infinity(tol), "tol": tol,
               "tail": None if model.tail is None else model.tail.as_dict()}
    if hasattr(model, "diagnostics"):
        results["diagnostics"] = model.diagnostics(tol=tol)
    logger.info("beta_inf = %.12g" % results["beta_infinity"])
    return {"tol": tol}, results, [{"beta_infinity": results["beta_infinity"], "tol": tol}], ("beta_infinity", "tol")


def run_gibbs_check(model, config, logger):
    settings = _settings(model, config)
    beta = config.get("beta", 1.0)
    n_max = config.get("n_max", 6)
    result = pressure(model, beta, settings["p"], settings["q"], settings["coding"], settings["bound"],
                      require_primitive=settings["require_primitive"], logger=logger)
    Phi = result._block
    mu = gibbs_measure(Phi, perron=result._perron, require_primitive=settings["require_primitive"])
    certificate = gibbs_certificate(mu, Phi, result.pressure, n_max)
    functionals = measure_functionals(mu, model.potential.scaled(beta), result.pressure)
    rows = [{"n": n, "c": c} for n, c in enumerate(certificate.running, 1)]
    logger.info("c = %.12g, h = %.12g, F = %.3g" % (certificate.c, functionals.h, functionals.F))
    settings.update(beta=beta, n_max=n_max)
    results = {"pressure": result.as_dict(), "certificate": certificate.as_dict(), "functionals": functionals.as_dict()}
    return settings, results, rows, ("n", "c")


def run_equidist(model, config, logger):
    settings = _settings(model, config)
    settings.update(n=config.get("n", [1]), observable=config.get("observable", "one"),
                    method=config.get("method", "auto"))
    report = equidist_diagnostics(model, settings["observable"], settings["n"], settings["method"], settings["p"],
                                  settings["q"], settings["bound"], require_primitive=settings["require_primitive"],
                                  threads=config.get("threads", 1), logger=logger)
    for row in report.rows:
        logger.info("n=%s integral=%.12g target=%.12g" % (row["n"], row["integral"], row["target"]), newline=False)
    return settings, report.as_dict(), report.rows, EQUIDIST_COLUMNS


def run_dimension(model, config, logger):
    settings = _settings(model, config)
    settings.update(tol=config.get("tol", 1e-6), beta_max=config.get("beta_max", 2.0))
    result = bowen_dimension(model, settings["tol"], settings["beta_max"], settings["p"], settings["q"],
                             settings["coding"], settings["bound"], settings["require_primitive"])
    logger.info("dimension = %.12g" % result.dimension)
    row = {"dimension": result.dimension, "beta_lo": result.bracket[0], "beta_hi": result.bracket[1],
           "pressure_lo": result.pressures[0], "pressure_hi": result.pressures[1]}
    return settings, result.as_dict(), [row], ("dimension", "beta_lo", "beta_hi", "pressure_lo", "pressure_hi")


def run_ldp_rate(model, config, logger):
    settings = _settings(model, config)
    observable = _observable(model, config, "ldp-rate")
    lo, hi = observable.bounds
    settings.update(observable=observable.name, t_grid=config.get("t_grid", DEFAULT_T_GRID),
                    s_grid=config.get("s_grid", [lo, hi, 101]))
    curve = pressure_curve(model, observable, expand_grid(settings["t_grid"]), settings["p"], settings["q"],
                           settings["coding"], settings["bound"], settings["require_primitive"])
    rate = level1_rate(curve, expand_grid(settings["s_grid"]), logger=logger)
    results = {"curve": curve.as_dict(), "rate": rate.as_dict(), "convex": curve.is_convex()}
    threshold = config.get("threshold")
    if threshold is not None:
        results["rate_at_threshold"] = legendre(curve, threshold)[0]
    rows = [{"s": s, "rate": value, "t_argmax": t} for s, value, t in zip(rate.s_grid, rate.values, rate.t_argmax)]
    logger.info("minimizer s = %.12g (mean %.12g)" % (rate.minimizer_s, curve.mean))
    return settings, results, rows, ("s", "rate", "t_argmax")


def run_ldp_sample(model, config, logger):
    settings = _settings(model, config)
    observable = _observable(model, config, "ldp-sample")
    threshold = _threshold(config, "ldp-sample")
    seed = config.get("seed")
    if seed is None:
        raise ConfigError("Sampling commands need a seed (--seed or params.seed).")
    settings.update(observable=observable.name, threshold=threshold, seed=seed, n=config.get("n", [100]),
                    count=config.get("count", 10 ** 4))
    result = pressure(model, 1.0, settings["p"], settings["q"], settings["coding"], settings["bound"],
                      require_primitive=settings["require_primitive"], logger=logger)
    mu = gibbs_measure(result._block, perron=result._perron, require_primitive=settings["require_primitive"])
    target = _target_rate(model, observable, config, settings, threshold)
    rows, estimates = [], []
    for n in settings["n"]:
        estimate = sample_empirical_deviation(mu, observable, threshold, n, settings["count"], seed,
                                              config.get("threads", 1))
        estimates.append(estimate.as_dict())
        rows.append({"n": n, "estimate": estimate.rate, "ci_low": estimate.rate_interval[0],
                     "ci_high": estimate.rate_interval[1], "target_rate": target})
        if estimate.lower_bound:
            logger.warn("n=%s: no trajectory reached the threshold; the rate %.6g is a lower bound." % (
                n, estimate.rate))
    return settings, {"estimates": estimates, "target_rate": target}, rows, DEVIATION_COLUMNS


def run_ldp_periodic(model, config, logger):
    settings = _settings(model, config)
    observable = _observable(model, config, "ldp-periodic")
    threshold = _threshold(config, "ldp-periodic")
    settings.update(observable=observable.name, threshold=threshold, n=config.get("n", [8]),
                    method=config.get("method", "auto"))
    results = periodic_deviation_rate(model, observable, threshold, settings["n"], settings["method"], settings["p"],
                                      settings["q"], settings["bound"], logger=logger)
    target = _target_rate(model, observable, config, settings, threshold)
    rows = [{"n": result.n, "estimate": result.rate, "target_rate": target} for result in results]
    return settings, {"rates": [result.as_dict() for result in results], "target_rate": target}, rows, \
        DEVIATION_COLUMNS


def run_defect_test(model, config, logger):
    seed = config.get("seed")
    if seed is None:
        raise ConfigError("Sampling commands need a seed (--seed or params.seed).")
    if config.get("p") is None or config.get("delta") is None:
        raise ConfigError("Command 'defect-test' needs p and delta.")
    settings = {"p": config.get("p"), "delta": config.get("delta"), "seed": seed,
                "trials": config.get("count", config.get("trials", 200)), "size": config.get("size")}
    projections = entropy_defect_trials(model, settings["p"], settings["delta"], settings["trials"], seed,
                                        settings["size"], threads=config.get("threads", 1))
    stats = TrialStats()
    rows = []
    for trial, projection in enumerate(projections):
        stats.update(projection.slack)
        row = projection.as_dict()
        row["trial"] = trial
        rows.append(row)
    logger.info("%s trials, %s violations" % (stats.trials, stats.violations))
    columns = ("trial", "entropy_defect", "defect_bound", "c_p", "K_p", "K_delta", "holds")
    return settings, {"summary": stats.as_dict()}, rows, columns


COMMANDS = {
    "pressure": run_pressure,
    "beta-inf": run_beta_inf,
    "gibbs-check": run_gibbs_check,
    "equidist": run_equidist,
    "dimension": run_dimension,
    "ldp-rate": run_ldp_rate,
    "ldp-sample": run_ldp_sample,
    "ldp-periodic": run_ldp_periodic,
    "defect-test": run_defect_test,
}

OVERRIDES = ("p", "q", "beta", "n", "seed", "threads", "observable", "threshold", "count", "delta", "n_max", "tol",
             "beta_max", "coding", "bound", "method", "t_grid", "s_grid", "require_primitive")


def emit_report(storage, command, config, settings, results, rows, columns, started, logger):
    """Write ``<command>.csv`` and the ``<command>.json`` manifest into the output directory."""
    csv_file = CSVReport(columns, logger).render(storage.get("%s.csv" % command), rows)
    manifest = {
        "version": __version__,
        "command": command,
        "config": config.as_dict(),
        "parameters": settings,
        "seed": config.get("seed"),
        "datetime": get_current_time(),
        "wall_time": time.time() - started,
        "machine_info": get_machine_info(),
        "results": results,
        "files": [csv_file.name, "%s.json" % command],
    }
    return storage.save(command, manifest)


def run_command(argv=None, logger=None):
    """Run one subcommand; returns the process exit code."""
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    if args.command == "help":
        return 0
    if logger is None:
        level = Logger.QUIET if args.quiet else Logger.NORMAL
        if args.verbose:
            level = Logger.VERBOSE
        logger = Logger(level)
    started = time.time()
    try:
        overrides = dict((name, getattr(args, name, None)) for name in OVERRIDES)
        config = load_config(args.config).merged(overrides)
        if config.get("threads") is None:
            config = config.merged({"threads": available_cores()})
        storage = FileStorage(args.out, logger)
        model = config.load_model()
        settings, results, rows, columns = COMMANDS[args.command](model, config, logger)
        emit_report(storage, args.command, config, settings, results, rows, columns, started, logger)
    except ThermoshiftError as exc:
        logger.error(exc.tag, exc)
        return exc.exit_code
    return 0


def main():
    with np.errstate(all="ignore"):
        sys.exit(run_command())
