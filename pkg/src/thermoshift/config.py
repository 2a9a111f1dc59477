"""
Run configurations: ``{"schema": 1, "model": {...}, "params": {...}}``.

A bare model descriptor (an object with a ``"type"`` key) is read as a config with empty params.
"""
from __future__ import division

import json
import math
from pathlib import Path

from .equidist import METHODS
from .errors import ConfigError
from .models import load_model
from .utils import BOUNDS
from .utils import CODINGS

SCHEMA = 1


def _integer(name, minimum=None, maximum=None):
    def check(value):
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError("Parameter %r must be an integer (got %r)." % (name, value))
        if minimum is not None and value < minimum:
            raise ConfigError("Parameter %r must be at least %s (got %r)." % (name, minimum, value))
        if maximum is not None and value > maximum:
            raise ConfigError("Parameter %r must be at most %s (got %r)." % (name, maximum, value))
        return value
    return check


def _real(name, positive=False):
    def check(value):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError("Parameter %r must be a finite number (got %r)." % (name, value))
        if positive and not value > 0:
            raise ConfigError("Parameter %r must be > 0 (got %r)." % (name, value))
        return float(value)
    return check


def _choice(name, choices):
    def check(value):
        if value not in choices:
            raise ConfigError("Parameter %r must be one of: %s (got %r)." % (name, ", ".join(choices), value))
        return value
    return check


def _lengths(value):
    values = value if isinstance(value, list) else [value]
    if not values:
        raise ConfigError("Parameter 'n' must not be empty.")
    return [_integer("n", 1)(n) for n in values]


def _grid(name):
    def check(value):
        if not isinstance(value, list) or len(value) != 3:
            raise ConfigError("Parameter %r must be [lo, hi, num] (got %r)." % (name, value))
        lo, hi = _real(name)(value[0]), _real(name)(value[1])
        num = _integer(name, 3)(value[2])
        if not hi > lo:
            raise ConfigError("Parameter %r needs lo < hi (got %r)." % (name, value))
        return [lo, hi, num]
    return check


def _flag(name):
    def check(value):
        if not isinstance(value, bool):
            raise ConfigError("Parameter %r must be true or false (got %r)." % (name, value))
        return value
    return check


def _string(name):
    def check(value):
        if not isinstance(value, str) or not value:
            raise ConfigError("Parameter %r must be a non-empty string (got %r)." % (name, value))
        return value
    return check


PARAMS = {
    "p": _integer("p", 0),
    "q": _integer("q", 1),
    "beta": _real("beta"),
    "n": _lengths,
    "seed": _integer("seed", 0, 2 ** 64 - 1),
    "threads": _integer("threads", 1),
    "observable": _string("observable"),
    "threshold": _real("threshold"),
    "count": _integer("count", 1),
    "delta": _real("delta", positive=True),
    "n_max": _integer("n_max", 1),
    "tol": _real("tol", positive=True),
    "beta_max": _real("beta_max", positive=True),
    "coding": _choice("coding", CODINGS),
    "bound": _choice("bound", BOUNDS),
    "method": _choice("method", METHODS),
    "t_grid": _grid("t_grid"),
    "s_grid": _grid("s_grid"),
    "trials": _integer("trials", 1),
    "size": _integer("size", 0),
    "require_primitive": _flag("require_primitive"),
}


def validate_params(params):
    if not isinstance(params, dict):
        raise ConfigError("'params' must be an object (got %r)." % (params,))
    unknown = sorted(set(params) - set(PARAMS))
    if unknown:
        raise ConfigError("Unknown parameter(s): %s. Known parameters: %s." % (
            ", ".join(unknown), ", ".join(sorted(PARAMS))))
    return dict((name, PARAMS[name](value)) for name, value in params.items())


class RunConfig(object):
    def __init__(self, model, params=None, path=None):
        if not isinstance(model, dict) or "type" not in model:
            raise ConfigError("Config needs a model descriptor with a 'type' key (got %r)." % (model,))
        self.descriptor = model
        self.params = validate_params(params or {})
        self.path = path

    def __repr__(self):
        return "RunConfig(%r, %r)" % (self.descriptor, self.params)

    @classmethod
    def from_dict(cls, data, path=None):
        if not isinstance(data, dict):
            raise ConfigError("Config must be a JSON object (got %s)." % type(data).__name__)
        if "type" in data:
            return cls(data, {}, path)
        schema = data.get("schema")
        if schema != SCHEMA:
            raise ConfigError("Unsupported config schema %r (expected %s)." % (schema, SCHEMA))
        unknown = sorted(set(data) - {"schema", "model", "params"})
        if unknown:
            raise ConfigError("Unknown config key(s): %s." % ", ".join(unknown))
        return cls(data.get("model"), data.get("params"), path)

    def get(self, name, default=None):
        return self.params.get(name, default)

    def merged(self, overrides):
        """A copy whose params are updated with the non-None ``overrides``."""
        params = dict(self.params)
        params.update((name, value) for name, value in overrides.items() if value is not None)
        return RunConfig(self.descriptor, params, self.path)

    def load_model(self):
        return load_model(self.descriptor)

    def as_dict(self):
        return {"schema": SCHEMA, "model": self.descriptor, "params": self.params}


def load_config(path):
    path = Path(path)
    try:
        with path.open() as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("Could not read config %s: %s" % (path, exc))
    except ValueError as exc:
        raise ConfigError("Config %s is not valid JSON: %s" % (path, exc))
    return RunConfig.from_dict(data, str(path))
