"""
Concrete systems: model descriptors are turned into a :class:`Model` by :func:`load_model`.
"""
from __future__ import division

from ..errors import ConfigError
from ..errors import NoSignChange
from ..potential import Observable
from ..potential import beta_infinity
from ..potential import log_partition_sum
from ..tails import FiniteTail
from ..thermo import truncated_pressure
from ..utils import jsonable


class Model(object):
    """
    A countable Markov shift with a potential, seen through its finite truncations.

    Truncation level ``p`` retains the symbols up to label ``p`` in model order. Subclasses provide
    ``labels_upto(p)``, ``transitions(labels)`` and ``potential``.
    """
    type = None
    default_q = 1
    default_coding = "block"
    default_bound = "sup"
    max_p = None

    def __init__(self, potential, name=None):
        self.potential = potential
        self.name = name or self.type
        self._truncations = {}

    def __repr__(self):
        return "<%s %s>" % (type(self).__name__, self.name)

    @property
    def default_p(self):
        return self.max_p

    @property
    def tail(self):
        return self.potential.tail

    @property
    def is_finite(self):
        return self.tail is None or isinstance(self.tail, FiniteTail)

    def covers(self, p):
        """True when truncation ``p`` already retains the whole (finite) alphabet."""
        return self.is_finite and len(self.labels_upto(p)) == len(self.labels_upto(self.max_p))

    def half(self, p):
        half = p // 2
        if half < 1 or not self.labels_upto(half):
            return None
        return half

    def truncation(self, p=None):
        p = self.default_p if p is None else p
        if p not in self._truncations:
            labels = self.labels_upto(p)
            if not labels:
                raise ConfigError("Truncation p=%r retains no symbols of %s." % (p, self.name))
            self._truncations[p] = self.transitions(labels)
        return self._truncations[p]

    def labels_upto(self, p):
        raise NotImplementedError

    def transitions(self, labels):
        raise NotImplementedError

    def beta_infinity(self, tol=1e-6):
        return beta_infinity(self.potential, tol)

    def tail_level(self, p):
        """The index the tail descriptor counts truncation ``p`` in."""
        return p

    def log_partition_sum(self, beta, n, p=None, with_remainder=False):
        p = self.default_p if p is None else p
        return log_partition_sum(self.potential, beta, n, self.truncation(p), with_remainder=with_remainder,
                                 level=self.tail_level(p))

    def observable(self, name):
        """Observable from its command-line spelling (``one``, ``symbol:L``, plus model-specific ones)."""
        if name == "one":
            return Observable("one", 1, lambda word: 1.0, (1.0, 1.0))
        elif name.startswith("symbol:"):
            label = self.parse_label(name[len("symbol:"):])
            return Observable(name, 1, lambda word: 1.0 if word[0] == label else 0.0, (0.0, 1.0))
        raise ConfigError("Observable %r is not defined for model %s." % (name, self.type))

    def periodic_point(self, word):
        """Exact point data for the periodic point of ``word``, when the model has any."""
        return None

    def parse_label(self, text):
        try:
            return int(text)
        except ValueError:
            return text

    def as_dict(self):
        return {"type": self.type, "name": self.name}


def load_model(descriptor):
    if not isinstance(descriptor, dict) or "type" not in descriptor:
        raise ConfigError("Model descriptor must be an object with a 'type' key (got %r)." % (descriptor,))
    kind = descriptor["type"]
    if kind == "gauss":
        from .gauss import GaussModel
        return GaussModel.from_config(descriptor)
    elif kind == "bowen_series":
        from .bowen_series import BowenSeriesModel
        return BowenSeriesModel.from_config(descriptor)
    elif kind == "explicit":
        from .explicit import ExplicitModel
        return ExplicitModel.from_config(descriptor)
    elif kind == "critical_bernoulli":
        from .critical import CriticalBernoulliModel
        return CriticalBernoulliModel.from_config(descriptor)
    else:
        raise ConfigError("Unknown model type %r. Expected one of: gauss, bowen_series, explicit, "
                          "critical_bernoulli." % (kind,))


class DimensionResult(object):
    def __init__(self, dimension, bracket, pressures, evaluations):
        self.dimension = dimension
        self.bracket = bracket
        self.pressures = pressures
        self.evaluations = evaluations

    def __repr__(self):
        return "DimensionResult(dimension=%r, bracket=%r)" % (self.dimension, self.bracket)

    def as_dict(self):
        return jsonable(self.__dict__)


def bowen_dimension(model, tol=1e-6, beta_max=2.0, p=None, q=None, coding=None, bound=None,
                    require_primitive=True):
    """
    inf{β >= 0: P(βφ) < 0} by bisection on the truncated pressure.

    Returns 0 when P(0) <= 0; the reported bracket always straddles the sign change.
    """
    if not tol > 0:
        raise ConfigError("Tolerance must be > 0 (got %r)." % tol)
    p = model.default_p if p is None else p
    q = model.default_q if q is None else q
    coding = model.default_coding if coding is None else coding
    bound = model.default_bound if bound is None else bound

    def evaluate(beta):
        return truncated_pressure(model, beta, p, q, coding, bound, require_primitive=require_primitive)[0]

    lo, hi = 0.0, float(beta_max)
    f_lo = evaluate(lo)
    if f_lo <= 0:
        return DimensionResult(0.0, (lo, lo), (f_lo, f_lo), 1)
    f_hi = evaluate(hi)
    if f_hi >= 0:
        raise NoSignChange(lo, hi, f_lo, f_hi)
    evaluations = 2
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        value = evaluate(mid)
        evaluations += 1
        if value > 0:
            lo, f_lo = mid, value
        else:
            hi, f_hi = mid, value
    return DimensionResult(0.5 * (lo + hi), (lo, hi), (f_lo, f_hi), evaluations)
