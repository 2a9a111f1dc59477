"""
Analytic tail descriptors.

A descriptor bounds ``sup exp(βφ)`` on the symbols removed by truncation. It decides summability of
Z_1(βφ) and bounds the truncated-away part of Z_1; it never extrapolates from retained terms.
"""
from __future__ import division

import math

from scipy.integrate import quad

from .errors import ConfigError

EQUALITY_TOLERANCE = 1e-12


class TailDescriptor(object):
    kind = None

    def converges(self, beta):
        raise NotImplementedError

    def remainder(self, beta, p):
        raise NotImplementedError

    def scaled(self, factor):
        raise NotImplementedError

    def as_dict(self):
        raise NotImplementedError

    def __repr__(self):
        return "%s(%s)" % (type(self).__name__, ", ".join(
            "%s=%r" % item for item in sorted(self.as_dict().items()) if item[0] != "kind"))

    def __eq__(self, other):
        return type(self) is type(other) and self.as_dict() == other.as_dict()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(tuple(sorted(self.as_dict().items())))


class FiniteTail(TailDescriptor):
    kind = "finite"

    def converges(self, beta):
        return True

    def remainder(self, beta, p):
        return 0.0

    def scaled(self, factor):
        return self

    def as_dict(self):
        return {"kind": self.kind}


class PowerTail(TailDescriptor):
    """``sup exp(φ) <= C k^-s`` on symbol k."""
    kind = "power"

    def __init__(self, exponent, constant=1.0):
        if not exponent > 0 or not constant > 0:
            raise ConfigError("Power tail needs exponent > 0 and constant > 0 (got %r, %r)." % (exponent, constant))
        self.exponent = float(exponent)
        self.constant = float(constant)

    def converges(self, beta):
        return beta * self.exponent > 1

    def remainder(self, beta, p):
        if not self.converges(beta):
            return math.inf
        rate = beta * self.exponent
        return self.constant ** beta * p ** (1 - rate) / (rate - 1)

    def scaled(self, factor):
        return PowerTail(self.exponent * factor, self.constant ** factor)

    def as_dict(self):
        return {"kind": self.kind, "exponent": self.exponent, "constant": self.constant}


class GeometricTail(TailDescriptor):
    """``count`` symbols at each level n with ``sup exp(φ) <= exp(-rate n)``."""
    kind = "geometric"

    def __init__(self, rate, count=1.0):
        if not rate > 0 or not count > 0:
            raise ConfigError("Geometric tail needs rate > 0 and count > 0 (got %r, %r)." % (rate, count))
        self.rate = float(rate)
        self.count = float(count)

    def converges(self, beta):
        return beta * self.rate > 0

    def remainder(self, beta, p):
        if not self.converges(beta):
            return math.inf
        decay = math.exp(-beta * self.rate)
        return self.count * decay ** (p + 1) / (1 - decay)

    def scaled(self, factor):
        return GeometricTail(self.rate * factor, self.count)

    def as_dict(self):
        return {"kind": self.kind, "rate": self.rate, "count": self.count}


class LogPowerTail(TailDescriptor):
    """``sup exp(φ) <= C k^-a (log k)^-b`` on symbol k >= 3."""
    kind = "log_power"

    def __init__(self, a, b, constant=1.0):
        if not a > 0 or not constant > 0:
            raise ConfigError("Log-power tail needs a > 0 and constant > 0 (got %r, %r)." % (a, constant))
        self.a = float(a)
        self.b = float(b)
        self.constant = float(constant)

    def converges(self, beta):
        rate = beta * self.a
        if abs(rate - 1) <= EQUALITY_TOLERANCE:
            return beta * self.b > 1
        return rate > 1

    def remainder(self, beta, p):
        if not self.converges(beta):
            return math.inf
        p = max(p, 3)
        rate, log_rate = beta * self.a, beta * self.b
        scale = self.constant ** beta
        if abs(rate - 1) <= EQUALITY_TOLERANCE:
            return scale * math.log(p) ** (1 - log_rate) / (log_rate - 1)
        if log_rate >= 0:
            # (log x)^-βb is nonincreasing on [p, ∞)
            return scale * math.log(p) ** -log_rate * p ** (1 - rate) / (rate - 1)
        value, _ = quad(lambda x: x ** -rate * math.log(x) ** -log_rate, p, math.inf, limit=200)
        return scale * value

    def scaled(self, factor):
        return LogPowerTail(self.a * factor, self.b * factor, self.constant ** factor)

    def as_dict(self):
        return {"kind": self.kind, "a": self.a, "b": self.b, "constant": self.constant}


TAIL_KINDS = {
    "finite": lambda descriptor: FiniteTail(),
    "power": lambda descriptor: PowerTail(descriptor["exponent"], descriptor.get("constant", 1.0)),
    "geometric": lambda descriptor: GeometricTail(descriptor["rate"], descriptor.get("count", 1.0)),
    "log_power": lambda descriptor: LogPowerTail(descriptor["a"], descriptor["b"], descriptor.get("constant", 1.0)),
}


def load_tail(descriptor):
    if descriptor is None:
        return None
    if not isinstance(descriptor, dict) or descriptor.get("kind") not in TAIL_KINDS:
        raise ConfigError("Tail must be an object with kind in %s (got %r)." % (", ".join(sorted(TAIL_KINDS)), descriptor))
    try:
        return TAIL_KINDS[descriptor["kind"]](descriptor)
    except KeyError as exc:
        raise ConfigError("Tail %r is missing field %s." % (descriptor["kind"], exc))
