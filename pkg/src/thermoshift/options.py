"""
Option groups shared by the subcommands. Flags default to None so config params apply unless overridden.
"""
from .equidist import METHODS
from .utils import parse_block_length
from .utils import parse_bound
from .utils import parse_coding
from .utils import parse_count
from .utils import parse_grid
from .utils import parse_n_range
from .utils import parse_observable
from .utils import parse_seed
from .utils import parse_threads
from .utils import parse_tolerance
from .utils import parse_truncation


def add_global_options(addoption):
    addoption(
        "--config",
        metavar="PATH", required=True,
        help="JSON run config (or a bare model descriptor)."
    )
    addoption(
        "--out",
        metavar="DIR", default=".",
        help="Directory receiving the JSON manifest and CSV data. Default: %(default)r"
    )
    addoption(
        "--threads",
        metavar="NUM", type=parse_threads, default=None,
        help="Cap on worker threads. Default: available cores."
    )
    addoption(
        "-v", "--verbose",
        action="store_true", default=False,
        help="Dump diagnostic and progress information."
    )
    addoption(
        "-q", "--quiet",
        action="store_true", default=False,
        help="Disable reporting. Verbose mode takes precedence."
    )


def add_truncation_options(addoption):
    addoption(
        "--p",
        metavar="LEVEL", type=parse_truncation, default=None,
        help="Truncation level: keep the symbols up to label LEVEL in model order."
    )
    addoption(
        "--q",
        metavar="LENGTH", type=parse_block_length, default=None,
        help="Block length of the transfer coding."
    )
    addoption(
        "--coding",
        metavar="CODING", type=parse_coding, default=None,
        help="Transfer coding: 'block' (non-overlapping q-blocks) or 'window' (sliding q-windows)."
    )
    addoption(
        "--bound",
        metavar="BOUND", type=parse_bound, default=None,
        help="Weight of a state: 'sup', 'inf', 'center' or 'representative'."
    )
    addoption(
        "--allow-aperiodic",
        action="store_false", default=None, dest="require_primitive",
        help="Admit irreducible truncations that are not primitive."
    )


def add_beta_options(addoption):
    addoption(
        "--beta",
        metavar="BETA", type=float, default=None,
        help="Inverse temperature: the potential is beta*phi."
    )
    addoption(
        "--tol",
        metavar="TOL", type=parse_tolerance, default=None,
        help="Bisection tolerance."
    )


def add_periodic_options(addoption):
    addoption(
        "--n",
        metavar="N|A..B", type=parse_n_range, default=None,
        help="Period (or trajectory length), a single value or an inclusive range."
    )
    addoption(
        "--observable",
        metavar="SPEC", type=parse_observable, default=None,
        help="Observable: 'one', 'symbol:L', 'digit:K', 'x[:LEVEL]' or 'cusp'."
    )
    addoption(
        "--method",
        metavar="METHOD", choices=METHODS, default=None,
        help="Periodic sums by 'orbits' enumeration, 'transfer' traces or 'auto'."
    )


def add_deviation_options(addoption):
    addoption(
        "--threshold",
        metavar="A", type=float, default=None,
        help="Deviation threshold a for the event S_n(psi)/n >= a."
    )
    addoption(
        "--t-grid",
        metavar="LO:HI:NUM", type=parse_grid, default=None, dest="t_grid",
        help="Tilt grid for the pressure curve."
    )
    addoption(
        "--s-grid",
        metavar="LO:HI:NUM", type=parse_grid, default=None, dest="s_grid",
        help="Grid of observable means for the rate function."
    )


def add_sampling_options(addoption):
    addoption(
        "--seed",
        metavar="SEED", type=parse_seed, default=None,
        help="Seed of the counter-based generator (required for sampling)."
    )
    addoption(
        "--count",
        metavar="NUM", type=parse_count, default=None,
        help="Number of sampled trajectories or random measures."
    )
