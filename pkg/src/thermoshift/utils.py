from __future__ import division
from __future__ import print_function

import argparse
import json
import math
import os
import platform
import re
import sys
from datetime import datetime
from datetime import timezone
from fractions import Fraction

import numpy as np

CODINGS = ("block", "window")
BOUNDS = ("sup", "inf", "center", "representative")


class cached_property(object):
    def __init__(self, func):
        self.__doc__ = getattr(func, '__doc__')
        self.func = func

    def __get__(self, obj, cls):
        if obj is None:
            return self
        value = obj.__dict__[self.func.__name__] = self.func(obj)
        return value


def jsonable(obj):
    """
    Convert numpy scalars/arrays, fractions and non-finite floats into plain JSON values.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"`` so manifests stay strict JSON.
    """
    if isinstance(obj, dict):
        return dict((str(key), jsonable(value)) for key, value in obj.items())
    elif isinstance(obj, (list, tuple)):
        return [jsonable(value) for value in obj]
    elif isinstance(obj, np.ndarray):
        return [jsonable(value) for value in obj.tolist()]
    elif isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    elif isinstance(obj, (int, np.integer)):
        return int(obj)
    elif isinstance(obj, (float, np.floating, Fraction)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        elif math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return obj


class SafeJSONEncoder(json.JSONEncoder):
    def default(self, o):
        return "UNSERIALIZABLE[%r]" % o


def safe_dumps(obj, **kwargs):
    return json.dumps(jsonable(obj), cls=SafeJSONEncoder, allow_nan=False, **kwargs)


def format_float(value):
    if value is None:
        return ""
    elif isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    elif isinstance(value, (int, np.integer)):
        return str(int(value))
    elif isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def get_current_time():
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%f")


def get_machine_info():
    import cpuinfo

    python_implementation = platform.python_implementation()
    python_implementation_version = platform.python_version()
    if python_implementation == 'PyPy':
        python_implementation_version = '%d.%d.%d' % sys.pypy_version_info[:3]
    return {
        "node": platform.node(),
        "processor": platform.processor(),
        "machine": platform.machine(),
        "python_compiler": platform.python_compiler(),
        "python_implementation": python_implementation,
        "python_implementation_version": python_implementation_version,
        "python_version": platform.python_version(),
        "numpy_version": np.__version__,
        "release": platform.release(),
        "system": platform.system(),
        "cpu": cpuinfo.get_cpu_info() or {},
    }


def available_cores():
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def _parse_int(string, name, minimum):
    try:
        value = int(string)
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(exc)
    if value < minimum:
        raise argparse.ArgumentTypeError("Value for --%s must be at least %s." % (name, minimum))
    return value


def parse_truncation(string):
    return _parse_int(string, "p", 1)


def parse_block_length(string):
    return _parse_int(string, "q", 1)


def parse_count(string):
    return _parse_int(string, "count", 1)


def parse_seed(string):
    value = _parse_int(string, "seed", 0)
    if value >= 2 ** 64:
        raise argparse.ArgumentTypeError("Value for --seed must fit in 64 bits.")
    return value


def parse_threads(string):
    return _parse_int(string, "threads", 1)


def parse_tolerance(string):
    try:
        value = float(string)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(exc)
    if not value > 0 or math.isinf(value):
        raise argparse.ArgumentTypeError("Tolerance must be a positive finite number (got %r)." % string)
    return value


def parse_n_range(string,
                  rex=re.compile(r'^(?P<start>\d+)(\.\.(?P<stop>\d+))?$')):
    """
    Parse ``N`` or ``A..B`` (inclusive) into a list of positive lengths.

    >>> parse_n_range('4..7')
    [4, 5, 6, 7]
    >>> parse_n_range('12')
    [12]
    """
    m = rex.match(string.strip())
    if m:
        start = int(m.group('start'))
        stop = int(m.group('stop') or start)
        if 1 <= start <= stop:
            return list(range(start, stop + 1))
    raise argparse.ArgumentTypeError("Could not parse value: %r. Expected 'N' or 'A..B'." % string)


def parse_grid(string):
    """
    Parse ``LO:HI:NUM``, an inclusive grid of NUM evenly spaced points.

    >>> parse_grid('-1:1:5')
    [-1.0, 1.0, 5]
    """
    parts = string.split(":")
    try:
        lo, hi, num = float(parts[0]), float(parts[1]), int(parts[2])
    except (IndexError, ValueError):
        raise argparse.ArgumentTypeError("Could not parse value: %r. Expected 'LO:HI:NUM'." % string)
    if len(parts) != 3 or not hi > lo or num < 3:
        raise argparse.ArgumentTypeError("Grid %r must have LO < HI and NUM >= 3." % string)
    return [lo, hi, num]


def expand_grid(grid):
    lo, hi, num = grid
    return np.linspace(lo, hi, int(num)).tolist()


def parse_observable(string,
                     rex=re.compile(r'^(one|x(:\d+)?|cusp|digit:\d+|symbol:[^\s:]+)$')):
    string = string.strip()
    if not rex.match(string):
        raise argparse.ArgumentTypeError(
            "Unacceptable observable: %r. Use one of: 'one', 'x[:LEVEL]', 'cusp', 'digit:K', 'symbol:LABEL'." % string)
    return string


def parse_coding(string):
    string = string.lower().strip()
    if string not in CODINGS:
        raise argparse.ArgumentTypeError(
            "Unacceptable value: %r. Value for --coding must be one of: %s." % (string, ", ".join(map(repr, CODINGS))))
    return string


def parse_bound(string):
    string = string.lower().strip()
    if string not in BOUNDS:
        raise argparse.ArgumentTypeError(
            "Unacceptable value: %r. Value for --bound must be one of: %s." % (string, ", ".join(map(repr, BOUNDS))))
    return string
