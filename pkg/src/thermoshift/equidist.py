"""
Weighted periodic-point measures p_n and their convergence to the Gibbs measure.

p_n averages the empirical measures δ_x^n over x ∈ Per_n with weights ∝ exp(S_nφ(x)). Small periods are
enumerated orbit by orbit; beyond ``orbit_cap`` points the same sums are traces of the window transfer
matrix folded onto its (m−1)-word keys.
"""
from __future__ import division

import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.special import logsumexp

from .errors import CapExceeded
from .errors import ConfigError
from .errors import NotPrimitive
from .logger import get_logger
from .shift import DEFAULT_CAP
from .shift import count_periodic
from .shift import periodic_words
from .thermo import ensure_primitive
from .thermo import truncated_pressure
from .utils import jsonable

ORBIT_CAP = 10 ** 5
KEY_CAP = 4096
NORMALIZATION_TOLERANCE = 1e-12
COLUMNS = ("n", "integral", "target", "abs_error", "n_orbits", "log_normalizer")
METHODS = ("auto", "orbits", "transfer")


class PeriodicOrbit(object):
    """
    A point of Per_n given by its period word, with the bracket of S_nφ at the point.
    """

    def __init__(self, word, prime_period, log_weight, point=None):
        self.word = tuple(word)
        self.prime_period = prime_period
        self.log_weight = (float(log_weight[0]), float(log_weight[1]))
        self.point = point

    def __len__(self):
        return len(self.word)

    def __repr__(self):
        return "PeriodicOrbit(%r, prime_period=%s, log_weight=%r)" % (self.word, self.prime_period, self.log_weight)

    @property
    def exact(self):
        return self.log_weight[0] == self.log_weight[1]

    @property
    def value(self):
        lower, upper = self.log_weight
        return 0.5 * (lower + upper)

    def as_dict(self):
        return jsonable({
            "word": list(self.word),
            "prime_period": self.prime_period,
            "log_weight": list(self.log_weight),
            "point": None if self.point is None else self.point.as_dict(),
        })


class EmpiricalDistribution(object):
    """Weights on q-cylinders, keyed by label tuples."""

    def __init__(self, level, weights):
        self.level = level
        self.weights = dict(weights)

    def __getitem__(self, word):
        return self.weights.get(tuple(word), 0.0)

    def __len__(self):
        return len(self.weights)

    def __repr__(self):
        return "EmpiricalDistribution(level=%s, cylinders=%s)" % (self.level, len(self.weights))

    @property
    def total(self):
        return math.fsum(self.weights.values())

    def marginal(self, level):
        """Push the weights down to ``level``-cylinders by keeping the leading symbols."""
        if not 1 <= level <= self.level:
            raise ConfigError("Cannot marginalize level %s to level %s." % (self.level, level))
        weights = defaultdict(float)
        for word, weight in self.weights.items():
            weights[word[:level]] += weight
        return EmpiricalDistribution(level, weights)

    def integrate(self, observable):
        return math.fsum(weight * observable(word) for word, weight in self.weights.items())

    def as_dict(self):
        return {"level": self.level, "weights": [[list(word), weight] for word, weight in sorted(self.weights.items())]}


def _cyclic_windows(word, n, q):
    period = len(word)
    if n % period:
        raise ConfigError("n=%s is not a multiple of the period word length %s." % (n, period))
    extended = word * (1 + (n + q - 1) // period)
    return [extended[i:i + q] for i in range(n)]


def orbit_empirical(x, n=None, q=1):
    """
    δ_x^n on q-cylinders: the share of cyclic windows x_i … x_{i+q−1}, 0 <= i < n, spelling each word.

    ``x`` is a :class:`PeriodicOrbit` or a period word.
    """
    word = x.word if isinstance(x, PeriodicOrbit) else tuple(x)
    n = len(word) if n is None else n
    if not 1 <= q <= n:
        raise ConfigError("Cylinder level q must satisfy 1 <= q <= n (got q=%r, n=%r)." % (q, n))
    weights = defaultdict(float)
    for window in _cyclic_windows(word, n, q):
        weights[window] += 1.0 / n
    return EmpiricalDistribution(q, weights)


class WeightedPeriodicMeasure(object):
    """
    The points of Per_n with normalized log-weights; ``p_n`` and ``η_n`` are both read off from it.
    """

    def __init__(self, n, orbits, log_weights, log_normalizer):
        self.n = n
        self.orbits = orbits
        self.log_weights = log_weights
        self.log_normalizer = log_normalizer

    def __len__(self):
        return len(self.orbits)

    def __repr__(self):
        return "<WeightedPeriodicMeasure n=%s points=%s>" % (self.n, len(self.orbits))

    @property
    def weights(self):
        return np.exp(self.log_weights)

    @property
    def n_orbits(self):
        return int(round(math.fsum(1.0 / orbit.prime_period for orbit in self.orbits)))

    @property
    def log_weight_spread(self):
        return max(orbit.log_weight[1] - orbit.log_weight[0] for orbit in self.orbits)

    def averages(self, observable):
        return np.array([observable.average(orbit.word) for orbit in self.orbits])

    def integral(self, observable):
        """∫ψ dp_n."""
        return math.fsum(self.weights * self.averages(observable))

    def eta(self, observable):
        """η_n pushed forward by ∫ψ dδ_x^n: (values, weights)."""
        return self.averages(observable), self.weights

    def restricted_log_weight(self, observable, threshold):
        """log of the p_n-mass of {x: ∫ψ dδ_x^n >= threshold}; −inf when no point qualifies."""
        hits = self.averages(observable) >= threshold - 1e-12
        if not hits.any():
            return -math.inf
        return float(logsumexp(self.log_weights[hits]))

    def empirical(self, q=1):
        """p_n on q-cylinders."""
        weights = defaultdict(float)
        for orbit, weight in zip(self.orbits, self.weights):
            for word, share in orbit_empirical(orbit, self.n, q).weights.items():
                weights[word] += weight * share
        return EmpiricalDistribution(q, weights)


def weighted_periodic_measure(model, n, p=None, cap=DEFAULT_CAP, threads=1):
    """
    Enumerate Per_n at truncation ``p`` and weight each point by exp(S_nφ).

    Points with exact model data (Gauss quadratic irrationals) carry exact weights; otherwise the weight
    is the midpoint of the bracket of the cyclic word.
    """
    T = model.truncation(p)
    points = periodic_words(T, n, cap)
    potential = model.potential

    def build(item):
        word, period = item
        return PeriodicOrbit(word, period, potential.orbit_bounds(word), model.periodic_point(word))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            orbits = list(executor.map(build, points))
    else:
        orbits = [build(item) for item in points]
    values = np.array([orbit.value for orbit in orbits])
    log_normalizer = float(logsumexp(values))
    return WeightedPeriodicMeasure(n, orbits, values - log_normalizer, log_normalizer)


def mobius(k):
    result, d = 1, 2
    while d * d <= k:
        if k % d == 0:
            k //= d
            if k % d == 0:
                return 0
            result = -result
        d += 1
    return -result if k > 1 else result


def divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def orbit_count(T, n):
    """Number of distinct σ-orbits inside Per_n, by Möbius inversion of the traces."""
    traces = dict((d, count_periodic(T, d)) for d in divisors(n))
    total = 0
    for d in divisors(n):
        primitive = sum(mobius(d // e) * traces[e] for e in divisors(d))
        total += primitive // d
    return total


class WindowTransfer(object):
    """
    The window coding over m-words folded onto its (m−1)-word keys.

    Closed walks of length n in ``matrix`` are the points of Per_n; each carries the product of the window
    weights it passes, each scaled by exp(−top).
    """

    def __init__(self, model, observable, p, q, bound, require_primitive=True, cap=DEFAULT_CAP, key_cap=KEY_CAP):
        m = max(q, getattr(observable, "level", 1), 2)
        _, perron, Phi = truncated_pressure(model, 1.0, p, m, "window", bound,
                                            require_primitive=require_primitive, cap=cap)
        if Phi.key_size > key_cap:
            raise CapExceeded(Phi.key_size, key_cap, "window keys")
        self.m = m
        self.Phi = Phi
        self.perron = perron
        self.top = float(np.max(Phi.values))
        self.matrix = self.fold(perron.weights)
        if observable is None:
            self.psi = None
        else:
            self.psi = observable.word_representatives(Phi.T.symbols, Phi.words, 1)

    def fold(self, weights):
        matrix = np.zeros((self.Phi.key_size, self.Phi.key_size))
        np.add.at(matrix, (self.Phi.in_key, self.Phi.out_key), weights)
        return matrix

    @property
    def target(self):
        """∫ψ dμ for the Gibbs measure of the window weights."""
        return self.perron.derivative(self.psi, self.Phi.step)

    def scaled_power(self, k):
        """(B^k / s, log s) with the scale s keeping entries near one."""
        size = self.Phi.key_size
        power = np.identity(size)
        log_scale = 0.0
        for _ in range(k):
            power = power @ self.matrix
            scale = float(np.max(power))
            power /= scale
            log_scale += math.log(scale)
        return power, log_scale

    def periodic_integral(self, n):
        """(∫ψ dp_n, log Σ_{Per_n} exp S_nφ) through tr(B_ψ B^{n−1}) / tr(B^n)."""
        power, log_scale = self.scaled_power(n - 1)
        weighted = self.fold(self.perron.weights * self.psi)
        # tr(X Y) = Σ X ∘ Yᵀ
        total = float(np.sum(self.matrix * power.T))
        integral = float(np.sum(weighted * power.T)) / total
        return integral, math.log(total) + log_scale + n * self.top


def choose_method(T, n_range, method="auto", orbit_cap=ORBIT_CAP):
    if method not in METHODS:
        raise ConfigError("Unknown method %r. Expected one of: %s." % (method, ", ".join(METHODS)))
    if method != "auto":
        return method
    return "orbits" if count_periodic(T, max(n_range)) <= orbit_cap else "transfer"


def check_primitive(T, logger, what):
    """True when the truncation is primitive; otherwise warn that ``what`` is unsupported."""
    try:
        ensure_primitive(T)
    except NotPrimitive as exc:
        logger.warn("%s Truncation is not primitive, so the convergence claim is unsupported: %s" % (what, exc))
        return False
    return True


class EquidistReport(object):
    def __init__(self, model, observable, method, m, target, oracle, rows, supported):
        self.model = model
        self.observable = observable
        self.method = method
        self.m = m
        self.target = target
        self.oracle = oracle
        self.rows = rows
        self.supported = supported

    def __repr__(self):
        return "<EquidistReport %s %s rows=%s>" % (self.observable, self.method, len(self.rows))

    @property
    def errors(self):
        return [row["abs_error"] for row in self.rows]

    @property
    def monotone(self):
        errors = self.errors
        return all(b <= a for a, b in zip(errors, errors[1:]))

    def row(self, n):
        for row in self.rows:
            if row["n"] == n:
                return row
        raise KeyError(n)

    def as_dict(self):
        return jsonable({
            "model": self.model,
            "observable": self.observable,
            "method": self.method,
            "m": self.m,
            "target": self.target,
            "oracle": self.oracle,
            "monotone": self.monotone,
            "supported": self.supported,
            "rows": self.rows,
        })


def equidist_diagnostics(model, observable, n_range, method="auto", p=None, q=None, bound=None,
                         orbit_cap=ORBIT_CAP, require_primitive=True, threads=1, logger=None):
    """
    ∫ψ dp_n for each n against the Gibbs target ∫ψ dμ_φ on the same truncation.

    The target is the Perron-weighted mean of ψ for the window weights over m-words, m = max(q, level of ψ, 2).
    """
    logger = get_logger(logger)
    name = observable if isinstance(observable, str) else observable.name
    if isinstance(observable, str):
        observable = model.observable(observable)
    n_range = sorted(set(n_range))
    if not n_range or n_range[0] < 1:
        raise ConfigError("n values must be positive (got %r)." % (n_range,))
    p = model.default_p if p is None else p
    q = model.default_q if q is None else q
    bound = model.default_bound if bound is None else bound
    T = model.truncation(p)
    supported = check_primitive(T, logger, "Periodic-point equidistribution:")
    method = choose_method(T, n_range, method, orbit_cap)
    transfer = WindowTransfer(model, observable, p, q, bound, require_primitive=require_primitive and supported)
    target = transfer.target
    oracle = model.target(name) if hasattr(model, "target") else None

    rows = []
    for n in n_range:
        if method == "orbits":
            measure = weighted_periodic_measure(model, n, p, orbit_cap, threads)
            integral, log_normalizer = measure.integral(observable), measure.log_normalizer
        else:
            integral, log_normalizer = transfer.periodic_integral(n)
        error = integral - target
        rows.append({
            "n": n,
            "integral": integral,
            "target": target,
            "error": error,
            "abs_error": abs(error),
            "n_orbits": orbit_count(T, n),
            "log_normalizer": log_normalizer,
        })
        logger.debug("n=%s: integral=%.12g error=%.3g" % (n, integral, error))
    return EquidistReport(model.name, name, method, transfer.m, target, oracle, rows, supported)
