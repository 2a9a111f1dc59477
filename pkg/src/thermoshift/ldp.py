"""
Level-1 large deviations: Legendre transforms of pressure curves, Monte Carlo deviation frequencies under a
Markov measure and the decay of weighted periodic points with atypical averages.
"""
from __future__ import division

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.random import Generator
from numpy.random import Philox
from numpy.random import SeedSequence
from scipy.special import logsumexp

from .equidist import ORBIT_CAP
from .equidist import WindowTransfer
from .equidist import check_primitive
from .equidist import choose_method
from .equidist import weighted_periodic_measure
from .errors import ConfigError
from .logger import get_logger
from .potential import induce_block_potential
from .stats import Proportion
from .thermo import truncated_pressure
from .utils import jsonable

CONVEXITY_TOLERANCE = 1e-8
ZERO_TOLERANCE = 1e-6
BATCH_SIZE = 4096
MIN_COUNT = 1000


class PressureCurve(object):
    """
    t ↦ P(φ + tψ) − P(φ) on a grid containing 0, with exact slopes (∫ψ of the tilted Gibbs measures).
    """

    def __init__(self, grid, values, slopes, deltas, base, mean, observable=None):
        self.grid = np.asarray(grid, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.slopes = np.asarray(slopes, dtype=float)
        self.deltas = deltas
        self.base = base
        self.mean = mean
        self.observable = observable

    def __len__(self):
        return len(self.grid)

    def __repr__(self):
        return "<PressureCurve %s points on [%g, %g]>" % (len(self.grid), self.grid[0], self.grid[-1])

    @property
    def spacing(self):
        return float(np.max(np.diff(self.grid)))

    def is_convex(self, tol=CONVEXITY_TOLERANCE):
        chords = np.diff(self.values) / np.diff(self.grid)
        return bool(np.all(np.diff(chords) >= -tol))

    def as_dict(self):
        return jsonable({
            "observable": self.observable,
            "base": self.base,
            "mean": self.mean,
            "t": self.grid,
            "values": self.values,
            "slopes": self.slopes,
            "deltas": self.deltas,
        })


def pressure_curve(model, observable, t_grid, p=None, q=None, coding=None, bound=None, require_primitive=True,
                   estimate_error=True):
    """
    Evaluate P(φ + tψ) − P(φ) on ``t_grid`` (0 is added when missing) over one shared truncation.

    ``deltas`` holds |P_p − P_{p/2}| at every t when the model has a coarser truncation to compare with.
    """
    if isinstance(observable, str):
        observable = model.observable(observable)
    p = model.default_p if p is None else p
    q = model.default_q if q is None else q
    coding = model.default_coding if coding is None else coding
    bound = model.default_bound if bound is None else bound
    grid = sorted(set(float(t) for t in t_grid) | {0.0})
    half = None if model.covers(p) else model.half(p)

    def evaluate(t, level):
        value, perron, Phi = truncated_pressure(model, 1.0, level, q, coding, bound, observable, t,
                                                require_primitive=require_primitive)
        psi = induce_block_potential(observable, q, Phi.T, Phi.coding, Phi.bound)
        return value, perron.derivative(psi.values, Phi.step)

    values, slopes, deltas = [], [], []
    for t in grid:
        value, slope = evaluate(t, p)
        values.append(value)
        slopes.append(slope)
        if estimate_error and half is not None:
            deltas.append(abs(value - evaluate(t, half)[0]))
        else:
            deltas.append(0.0 if model.covers(p) else None)
    base = values[grid.index(0.0)]
    mean = slopes[grid.index(0.0)]
    return PressureCurve(grid, np.array(values) - base, slopes, deltas, base, mean, observable.name)


class RateFunctionSample(object):
    def __init__(self, s_grid, values, t_argmax, minimizer_s, endpoint, mean):
        self.s_grid = np.asarray(s_grid, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.t_argmax = np.asarray(t_argmax, dtype=float)
        self.minimizer_s = minimizer_s
        self.endpoint = endpoint
        self.mean = mean

    def __repr__(self):
        return "RateFunctionSample(minimizer_s=%r, points=%s)" % (self.minimizer_s, len(self.s_grid))

    def __call__(self, s):
        index = int(np.argmin(np.abs(self.s_grid - s)))
        if abs(self.s_grid[index] - s) > 1e-12:
            raise KeyError("s=%r is not on the grid." % s)
        return float(self.values[index])

    @property
    def zeros(self):
        return self.s_grid[self.values <= ZERO_TOLERANCE]

    def is_convex(self, tol=CONVEXITY_TOLERANCE):
        return bool(np.all(np.diff(np.diff(self.values) / np.diff(self.s_grid)) >= -tol))

    def as_dict(self):
        return jsonable({
            "s": self.s_grid,
            "I": self.values,
            "t_argmax": self.t_argmax,
            "minimizer_s": self.minimizer_s,
            "mean": self.mean,
            "endpoint": self.endpoint,
        })


def legendre(curve, s):
    """(sup_t (t·s − curve(t)), argmax t) over the curve's grid."""
    gains = curve.grid * s - curve.values
    index = int(np.argmax(gains))
    return max(float(gains[index]), 0.0), index


def level1_rate(curve, s_grid, refine=True, logger=None):
    """
    I(s) = sup over grid t of t·s − curve(t).

    With ``refine`` the Gibbs mean is inserted into the s-grid, so the zero of I sits on the grid.
    """
    logger = get_logger(logger)
    s_grid = set(float(s) for s in s_grid)
    if refine:
        s_grid.add(float(curve.mean))
    s_grid = sorted(s_grid)
    values, t_argmax, endpoint = [], [], []
    last = len(curve.grid) - 1
    for s in s_grid:
        value, index = legendre(curve, s)
        values.append(value)
        t_argmax.append(curve.grid[index])
        if index in (0, last) and value > ZERO_TOLERANCE:
            endpoint.append(s)
    if endpoint:
        logger.warn("Legendre supremum attained at a t-grid endpoint for s in [%g, %g]; "
                    "the grid is too coarse there." % (min(endpoint), max(endpoint)))
    minimizer_s = s_grid[int(np.argmin(values))]
    return RateFunctionSample(s_grid, values, t_argmax, minimizer_s, endpoint, curve.mean)


class SampleBatch(object):
    """Birkhoff sums S_nψ of ``count`` stationary trajectories."""

    def __init__(self, seed, n, count, sums):
        self.seed = seed
        self.n = n
        self.count = count
        self.sums = sums

    def __repr__(self):
        return "SampleBatch(seed=%r, n=%s, count=%s)" % (self.seed, self.n, self.count)

    def hits(self, threshold):
        return int(np.count_nonzero(self.sums >= self.n * threshold - 1e-9))


def _cumulative_rows(mu):
    """Row-cumulative transition data shifted by the row index, so one searchsorted serves every row."""
    rows = mu.rows
    row_of = np.repeat(np.arange(mu.size), np.diff(rows.indptr))
    cumulative = rows.data.copy()
    for start, stop in zip(rows.indptr[:-1], rows.indptr[1:]):
        cumulative[start:stop] = np.cumsum(cumulative[start:stop])
    return cumulative + row_of, rows.indptr, rows.indices


def _state_values(mu, observable):
    if mu.step != 1:
        raise ConfigError("Sampling needs a measure advancing one symbol per transition (step=%s)." % mu.step)
    level = getattr(observable, "level", 1)
    if level > mu.words.shape[1]:
        raise ConfigError("Observable %s reads %s symbols but states carry %s." % (
            observable.name, level, mu.words.shape[1]))
    return observable.word_representatives(mu.symbols, mu.words, 1)


def sample_sums(mu, observable, n, count, seed, threads=1):
    """
    Draw ``count`` trajectories of ``n`` states from the stationary chain.

    Trajectories are drawn in fixed batches; batch ``b`` uses Philox seeded from ``(seed, b)``, so the sums
    do not depend on ``threads``.
    """
    if n < 1:
        raise ConfigError("Trajectory length must be at least 1 (got %r)." % n)
    values = _state_values(mu, observable)
    cumulative, indptr, indices = _cumulative_rows(mu)
    initial = np.cumsum(mu.stationary)

    def run(batch):
        size = min(BATCH_SIZE, count - batch * BATCH_SIZE)
        rng = Generator(Philox(SeedSequence([seed, batch])))
        uniforms = rng.random((n, size))
        state = np.minimum(np.searchsorted(initial, uniforms[0] * initial[-1], side="right"), mu.size - 1)
        total = values[state].copy()
        for step in range(1, n):
            position = np.searchsorted(cumulative, state + uniforms[step], side="right")
            position = np.clip(position, indptr[state], indptr[state + 1] - 1)
            state = indices[position]
            total += values[state]
        return total

    batches = range((count + BATCH_SIZE - 1) // BATCH_SIZE)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            parts = list(executor.map(run, batches))
    else:
        parts = [run(batch) for batch in batches]
    return SampleBatch(seed, n, count, np.concatenate(parts))


class DeviationEstimate(object):
    def __init__(self, n, threshold, proportion, seed):
        self.n = n
        self.threshold = threshold
        self.proportion = proportion
        self.seed = seed

    def __repr__(self):
        return "DeviationEstimate(n=%s, rate=%r, lower_bound=%r)" % (self.n, self.rate, self.lower_bound)

    @property
    def hits(self):
        return self.proportion.successes

    @property
    def count(self):
        return self.proportion.trials

    @property
    def probability(self):
        return self.proportion.estimate

    @property
    def lower_bound(self):
        """No trajectory hit: only a lower bound on the rate is known."""
        return self.hits == 0

    def _rate(self, probability):
        return max(0.0, -math.log(probability) / self.n)

    @property
    def rate(self):
        if self.lower_bound:
            return self._rate(self.proportion.ci_high)
        return self._rate(self.probability)

    @property
    def rate_interval(self):
        low, high = self.proportion.interval
        return self._rate(high), (math.inf if low == 0 else self._rate(low))

    def as_dict(self):
        rate_low, rate_high = self.rate_interval
        return jsonable({
            "n": self.n,
            "threshold": self.threshold,
            "count": self.count,
            "hits": self.hits,
            "probability": self.probability,
            "ci_low": self.proportion.ci_low,
            "ci_high": self.proportion.ci_high,
            "rate": self.rate,
            "rate_low": rate_low,
            "rate_high": rate_high,
            "lower_bound": self.lower_bound,
            "seed": self.seed,
        })


def sample_empirical_deviation(mu, observable, threshold, n, count, seed, threads=1, confidence=0.95):
    """
    −(1/n)·log μ{S_nψ/n >= threshold} from ``count`` seeded trajectories, with a Wilson interval.
    """
    if count < MIN_COUNT:
        raise ConfigError("Sample count must be at least %s (got %r)." % (MIN_COUNT, count))
    if seed is None:
        raise ConfigError("Sampling needs an explicit seed.")
    batch = sample_sums(mu, observable, n, count, seed, threads)
    return DeviationEstimate(n, threshold, Proportion(batch.hits(threshold), count, confidence), seed)


def _graded_matrices(transfer, observable):
    """Split the folded window matrix by the integer value of ψ on each window."""
    psi = transfer.psi
    levels = np.rint(psi)
    if np.max(np.abs(psi - levels)) > 1e-9 or np.min(levels) < 0:
        raise ConfigError("Transfer traces need a nonnegative integer-valued observable (got %s)." % observable.name)
    levels = levels.astype(int)
    return [transfer.fold(transfer.perron.weights * (levels == k)) for k in range(int(levels.max()) + 1)]


def graded_log_traces(transfer, observable, n):
    """log Σ over Per_n of the window weights, split by S_nψ: entry k is for S_nψ = k (−inf when empty)."""
    graded = _graded_matrices(transfer, observable)
    size = transfer.Phi.key_size
    power = np.identity(size)[None, :, :]
    log_scale = 0.0
    for _ in range(n):
        degree = power.shape[0] + len(graded) - 1
        product = np.zeros((degree, size, size))
        for k, matrix in enumerate(graded):
            if matrix.any():
                product[k:k + power.shape[0]] += power @ matrix
        scale = float(np.max(product))
        power = product / scale
        log_scale += math.log(scale)
    traces = np.trace(power, axis1=1, axis2=2)
    with np.errstate(divide="ignore"):
        return np.log(traces) + log_scale + n * transfer.top


class PeriodicDeviation(object):
    def __init__(self, n, threshold, restricted, total):
        self.n = n
        self.threshold = threshold
        self.restricted = restricted
        self.total = total

    @property
    def rate(self):
        if self.restricted == -math.inf:
            return math.inf
        return max(0.0, -(self.restricted - self.total) / self.n)

    def __repr__(self):
        return "PeriodicDeviation(n=%s, rate=%r)" % (self.n, self.rate)

    def as_dict(self):
        return jsonable({
            "n": self.n,
            "threshold": self.threshold,
            "restricted": self.restricted,
            "total": self.total,
            "rate": self.rate,
        })


def periodic_deviation_rate(model, observable, threshold, n_range, method="auto", p=None, q=None, bound=None,
                            orbit_cap=ORBIT_CAP, logger=None):
    """
    −(1/n)·log of the weight of {x ∈ Per_n: ∫ψ dδ_x^n >= threshold} against the weight of Per_n.

    Orbit enumeration uses the model's weights at the points; the transfer method grades window traces by
    S_nψ and needs ψ integer-valued.
    """
    logger = get_logger(logger)
    if isinstance(observable, str):
        observable = model.observable(observable)
    n_range = sorted(set(n_range))
    if not n_range or n_range[0] < 1:
        raise ConfigError("n values must be positive (got %r)." % (n_range,))
    p = model.default_p if p is None else p
    q = model.default_q if q is None else q
    bound = model.default_bound if bound is None else bound
    T = model.truncation(p)
    supported = check_primitive(T, logger, "Periodic deviation rates:")
    method = choose_method(T, n_range, method, orbit_cap)
    transfer = None
    if method == "transfer":
        transfer = WindowTransfer(model, observable, p, q, bound, require_primitive=supported)

    results = []
    for n in n_range:
        if method == "orbits":
            measure = weighted_periodic_measure(model, n, p, orbit_cap)
            restricted = measure.restricted_log_weight(observable, threshold)
            results.append(PeriodicDeviation(n, threshold, restricted, 0.0))
        else:
            traces = graded_log_traces(transfer, observable, n)
            first = max(0, int(math.ceil(n * threshold - 1e-9)))
            tail = traces[first:]
            restricted = float(logsumexp(tail)) if np.isfinite(tail).any() else -math.inf
            results.append(PeriodicDeviation(n, threshold, restricted, float(logsumexp(traces))))
        logger.debug("n=%s: periodic deviation rate %r" % (n, results[-1].rate))
    return results
