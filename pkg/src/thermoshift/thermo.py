"""
Pressure, Gibbs measures and the truncation machinery.

The Ruelle matrix of a :class:`~thermoshift.potential.BlockPotential` is applied implicitly
(``matvec``/``rmatvec``); only the Gibbs measure and its certificate materialize the transition graph.
"""
from __future__ import division

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.random import Generator
from numpy.random import Philox
from numpy.random import SeedSequence
from scipy import sparse
from scipy.special import xlogy

from .errors import ConfigError
from .errors import NonConvergence
from .errors import NotSummable
from .logger import get_logger
from .measure import MarkovMeasure
from .measure import gth_stationary
from .potential import LocallyConstantPotential
from .potential import beta_infinity
from .potential import induce_block_potential
from .potential import log_partition_sum
from .shift import DEFAULT_CAP
from .shift import SymbolSet
from .shift import TransitionStructure
from .shift import count_admissible
from .shift import primitivity_witness
from .utils import cached_property
from .utils import jsonable

TOLERANCE = 1e-12
MAX_ITERATIONS = 100000
CROSS_CHECK_CAP = 10 ** 5
CROSS_CHECK_MAX_N = 12


def power_iterate(matvec, size, tol=TOLERANCE, max_iter=MAX_ITERATIONS, shift=0.0):
    """
    Perron root and vector of a nonnegative operator, from the all-ones start.

    Stops once both the eigenvalue and the (sum-normalized) vector change by at most ``tol``
    relatively. ``shift`` runs the iteration on M + shift·I and subtracts it from the root.
    """
    vector = np.full(size, 1.0 / size)
    value = None
    residual = math.inf
    for iteration in range(1, max_iter + 1):
        image = matvec(vector)
        if shift:
            image = image + shift * vector
        total = float(image.sum())
        if not total > 0 or not math.isfinite(total):
            raise NonConvergence(iteration, math.nan)
        image /= total
        residual = float(np.max(np.abs(image - vector)) / np.max(image))
        if value is not None and abs(total - value) <= tol * total and residual <= tol:
            return total - shift, image, iteration
        value, vector = total, image
    raise NonConvergence(max_iter, residual)


def ensure_primitive(T, N_max=16):
    witness = T.__dict__.get("_primitive")
    if witness is None:
        witness = T.witness or primitivity_witness(T, N_max)
        T.__dict__["_primitive"] = witness
    return witness


class PerronData(object):
    def __init__(self, log_lambda, left, right, weights, iterations):
        self.log_lambda = log_lambda
        self.left = left
        self.right = right
        self.weights = weights
        self.iterations = iterations

    def __repr__(self):
        return "PerronData(log_lambda=%r, size=%s, iterations=%s)" % (self.log_lambda, len(self.left), self.iterations)

    def derivative(self, values, step=1):
        """d/dt log λ(Φ + tΨ) at t=0 per base symbol, with Ψ given on the same states."""
        weighted = self.left * self.right
        return float(np.dot(weighted, values) / weighted.sum()) / step


def transfer_perron(Phi, T=None, tol=TOLERANCE, max_iter=MAX_ITERATIONS, require_primitive=True, values=None):
    """
    Log spectral radius of M(a, b) = [a → b]·exp(Φ(a)) with positive left/right vectors, Σ left·right = 1.
    """
    T = Phi.T if T is None else T
    if require_primitive:
        ensure_primitive(T)
    values = Phi.values if values is None else np.asarray(values, dtype=float)
    top = float(np.max(values))
    weights = np.exp(values - top)
    shift = 0.0 if require_primitive else float(np.mean(weights))
    lam, right, iterations = power_iterate(lambda v: Phi.matvec(v, weights), Phi.size, tol, max_iter, shift)
    _, left, more = power_iterate(lambda v: Phi.rmatvec(v, weights), Phi.size, tol, max_iter, shift)
    left = left / np.dot(left, right)
    return PerronData(math.log(lam) + top, left, right, weights, iterations + more)


class PressureResult(object):
    def __init__(self, **fields):
        self.__dict__.update(fields)

    def __repr__(self):
        return "PressureResult(pressure=%r, delta=%r)" % (self.pressure, self.delta)

    def as_dict(self):
        return jsonable(dict((key, value) for key, value in self.__dict__.items()
                             if not key.startswith("_")))


def _check_summable(model, beta, allow_divergent):
    if model.is_finite or allow_divergent:
        return
    if not model.tail.converges(beta):
        raise NotSummable(beta, beta_infinity(model.potential))


def _settings(model, p, q, coding, bound):
    return (model.default_p if p is None else p,
            model.default_q if q is None else q,
            model.default_coding if coding is None else coding,
            model.default_bound if bound is None else bound)


def truncated_pressure(model, beta, p, q, coding, bound, observable=None, t=0.0, require_primitive=True,
                       tol=TOLERANCE, cap=DEFAULT_CAP):
    """(P, Perron data, block potential) of βφ + tψ at one truncation."""
    T = model.truncation(p)
    phi = model.potential.scaled(beta)
    if observable is not None and t:
        phi = phi + observable.scaled(t)
    Phi = induce_block_potential(phi, q, T, coding, bound, cap)
    perron = transfer_perron(Phi, tol=tol, require_primitive=require_primitive)
    return perron.log_lambda / Phi.step, perron, Phi


def pressure(model, beta=1.0, p=None, q=None, coding=None, bound=None, observable=None, require_primitive=True,
             allow_divergent=False, tol=TOLERANCE, cap=DEFAULT_CAP, cross_check_cap=CROSS_CHECK_CAP, logger=None):
    """
    P(βφ) at truncation p with the q-coding, plus delta against the p/2 truncation.

    The result also carries the inf/sup brackets, the (1/n)·log Z_n cross-check at the largest n with at
    most ``cross_check_cap`` words, and ∫ψ dμ when an observable is given.
    """
    logger = get_logger(logger)
    p, q, coding, bound = _settings(model, p, q, coding, bound)
    _check_summable(model, beta, allow_divergent)
    value, perron, Phi = truncated_pressure(model, beta, p, q, coding, bound, require_primitive=require_primitive,
                                            tol=tol, cap=cap)
    T = Phi.T
    if model.potential.locally_constant:
        lower = upper = value
    else:
        lower = transfer_perron(Phi, values=Phi.lower, tol=tol, require_primitive=require_primitive).log_lambda
        upper = transfer_perron(Phi, values=Phi.upper, tol=tol, require_primitive=require_primitive).log_lambda
        lower, upper = lower / Phi.step, upper / Phi.step

    half = model.half(p)
    if model.covers(p):
        delta, half_value = 0.0, None
    elif half is None:
        delta, half_value = None, None
    else:
        half_value = truncated_pressure(model, beta, half, q, coding, bound, require_primitive=require_primitive,
                                        tol=tol, cap=cap)[0]
        delta = abs(value - half_value)

    n = 1
    while n < CROSS_CHECK_MAX_N and count_admissible(T, n + 1) <= cross_check_cap:
        n += 1
    cross_check = log_partition_sum(model.potential, beta, n, T, cap) / n
    # boundary terms of Z_n against λ^n shrink like 1/n
    boundary = (math.log(np.max(perron.right) / np.min(perron.right)) + math.log(Phi.size)) / n
    allowance = (delta or 0.0) + Phi.oscillation / q + boundary
    cross_check_ok = bool(abs(cross_check - value) <= allowance + 1e-9)
    if not cross_check_ok:
        logger.debug("Pressure cross-check disagrees: P=%r, (1/%s) log Z_%s=%r, allowance %r." % (
            value, n, n, cross_check, allowance))

    result = PressureResult(
        model=model.name,
        beta=beta,
        p=p,
        q=q,
        coding=Phi.coding,
        bound=Phi.bound,
        pressure=value,
        delta=delta,
        pressure_half=half_value,
        p_half=half if half_value is not None else None,
        lower=lower,
        upper=upper,
        D_q=Phi.oscillation,
        cross_check=cross_check,
        cross_check_n=n,
        cross_check_ok=cross_check_ok,
        iterations=perron.iterations,
        states=Phi.size,
    )
    result._perron = perron
    result._block = Phi
    if observable is not None:
        psi = induce_block_potential(observable, q, T, Phi.coding, Phi.bound, cap)
        result.observable = observable.name
        result.derivative = perron.derivative(psi.values, Phi.step)
    return result


def gibbs_measure(Phi, T=None, perron=None, require_primitive=True):
    """
    The Markov measure Q(a, b) = [a → b]·exp(Φ(a))·r(b)/(λ r(a)), π = left·right.
    """
    if perron is None:
        perron = transfer_perron(Phi, T, require_primitive=require_primitive)
    right = perron.right
    pattern = Phi.edge_matrix()
    rows = sparse.diags(1.0 / right) @ pattern @ sparse.diags(right)
    rows = sparse.diags(1.0 / np.asarray(rows.sum(axis=1)).ravel()) @ rows
    stationary = perron.left * right
    stationary = stationary / stationary.sum()
    return MarkovMeasure(Phi.T.symbols, Phi.words, stationary, rows.tocsr(), Phi.step)


class GibbsCertificate(object):
    """
    ``1/c <= μ[ω] / exp(−P·n + S_nΦ) <= c`` on every retained cylinder of at most ``n_checked`` states.
    """

    def __init__(self, c, P, n_checked, cylinder, side, running):
        self.c = c
        self.P = P
        self.n_checked = n_checked
        self.cylinder = cylinder
        self.side = side
        self.running = running

    def __repr__(self):
        return "GibbsCertificate(c=%r, P=%r, n_checked=%s)" % (self.c, self.P, self.n_checked)

    def as_dict(self):
        return jsonable({
            "c": self.c,
            "P": self.P,
            "n_checked": self.n_checked,
            "cylinder": [list(word) if isinstance(word, tuple) else word for word in self.cylinder],
            "side": self.side,
            "running": self.running,
        })


def _extremal_paths(log_rows, start, increments, n_max, maximize):
    """
    Max-plus (or min-plus) dynamic program over paths of the transition graph.

    Returns per-length extremal values and backpointers; ``increments`` is added at every visited state.
    """
    csc = log_rows.tocsc()
    csc.sort_indices()
    sources = csc.indices
    targets = np.repeat(np.arange(csc.shape[1]), np.diff(csc.indptr))
    current = start + increments
    history = [current]
    pointers = []
    for _ in range(1, n_max):
        candidates = current[sources] + csc.data
        order = np.lexsort((candidates, targets))
        chosen = order[csc.indptr[1:] - 1] if maximize else order[csc.indptr[:-1]]
        pointers.append(sources[chosen])
        current = candidates[chosen] + increments
        history.append(current)
    return history, pointers


def _backtrack(pointers, length, state):
    path = [state]
    for step in range(length - 2, -1, -1):
        path.append(int(pointers[step][path[-1]]))
    return path[::-1]


def gibbs_certificate(mu, Phi, P, n_max):
    """
    The smallest c making the Gibbs inequality hold on all retained cylinders of up to ``n_max`` states.

    The largest ratio comes from the inf bracket of S_nΦ and the smallest from the sup bracket.
    """
    if n_max < 1:
        raise ConfigError("n_max must be at least 1 (got %r)." % n_max)
    if mu.size != Phi.size:
        raise ConfigError("Measure has %s states but the block potential has %s." % (mu.size, Phi.size))
    step_pressure = P * Phi.step
    log_rows = mu.rows.copy()
    with np.errstate(divide="ignore"):
        log_rows.data = np.log(log_rows.data)
        log_stationary = np.log(mu.stationary)
    upper, upper_ptr = _extremal_paths(log_rows, log_stationary, step_pressure - Phi.lower, n_max, True)
    lower, lower_ptr = _extremal_paths(log_rows, log_stationary, step_pressure - Phi.upper, n_max, False)
    running = []
    best = (0.0, None, None, None)
    for n in range(1, n_max + 1):
        finite_lower = np.where(np.isfinite(lower[n - 1]), lower[n - 1], np.inf)
        top, bottom = float(np.max(upper[n - 1])), float(np.min(finite_lower))
        if top > best[0]:
            best = (top, n, int(np.argmax(upper[n - 1])), "upper")
        if -bottom > best[0]:
            best = (-bottom, n, int(np.argmin(finite_lower)), "lower")
        running.append(math.exp(best[0]))
    log_c, length, state, side = best
    if length is None:
        cylinder = ()
    else:
        path = _backtrack(upper_ptr if side == "upper" else lower_ptr, length, state)
        cylinder = tuple(mu.state_label(a) for a in path)
    return GibbsCertificate(math.exp(log_c), P, n_max, cylinder, side, running)


class Functionals(object):
    def __init__(self, h, integral, integral_lower, integral_upper, P):
        self.h = h
        self.integral = integral
        self.integral_lower = integral_lower
        self.integral_upper = integral_upper
        self.P = P
        self.F = -P + h + integral

    def __iter__(self):
        return iter((self.h, self.integral, self.F))

    def __repr__(self):
        return "Functionals(h=%r, integral=%r, F=%r)" % (self.h, self.integral, self.F)

    def as_dict(self):
        return jsonable(self.__dict__)


def measure_functionals(mu, phi, P):
    """Entropy, ∫φ dμ (with its bracket) and F = −P + h + ∫φ dμ."""
    integral, lower, upper = mu.integral(phi)
    return Functionals(mu.entropy(), integral, lower, upper, P)


def binary_entropy(c):
    return float(-xlogy(1 - c, 1 - c) - xlogy(c, c))


class Projection(object):
    def __init__(self, measure, c_p, K_p, defect_bound, K_delta, entropy_defect):
        self.measure = measure
        self.c_p = c_p
        self.K_p = K_p
        self.defect_bound = defect_bound
        self.K_delta = K_delta
        self.entropy_defect = entropy_defect

    @property
    def slack(self):
        return self.defect_bound - self.entropy_defect

    @cached_property
    def holds(self):
        return self.slack >= -1e-12

    def __repr__(self):
        return "Projection(c_p=%r, K_p=%r, defect=%r <= %r)" % (
            self.c_p, self.K_p, self.entropy_defect, self.defect_bound)

    def as_dict(self):
        return jsonable({
            "c_p": self.c_p,
            "K_p": self.K_p,
            "defect_bound": self.defect_bound,
            "K_delta": self.K_delta,
            "entropy_defect": self.entropy_defect,
            "holds": self.holds,
        })


def _support_pressure(mu, values, beta):
    """P(βφ) on the transition graph of μ's support."""
    T = mu.support()
    phi = LocallyConstantPotential(T.symbols.labels, values)
    Phi = induce_block_potential(phi, 1, T)
    return transfer_perron(Phi, values=beta * Phi.values, require_primitive=False).log_lambda


def project_truncate(mu, p, phi, delta, beta_inf):
    """
    Collapse every symbol after ``p`` (in alphabet order) onto ``p`` and report the tail quantities.

    μ_p is the lumped chain of the collapse; its entropy bounds that of the pushforward from above.
    """
    if mu.words.shape[1] != 1 or mu.step != 1:
        raise ConfigError("Truncation projection needs a measure over single symbols; "
                          "view block measures over the block alphabet first.")
    if not phi.locally_constant:
        raise ConfigError("Truncation projection needs a potential constant on 1-cylinders.")
    if not 0 < delta < 1 - beta_inf:
        raise ConfigError("delta must lie in (0, 1 - beta_inf) = (0, %r) (got %r)." % (1 - beta_inf, delta))
    symbols = mu.symbols
    keep = symbols.index(p) + 1
    states = mu.words[:, 0]
    collapse = np.minimum(states, keep - 1)
    values = phi.word_representatives(symbols, mu.words, 1)

    tail = states >= keep
    c_p = float(math.fsum(mu.stationary[tail]))
    K_p = -float(math.fsum(values[tail] * mu.stationary[tail]))

    lump = sparse.csr_matrix((np.ones(mu.size), (np.arange(mu.size), collapse)), shape=(mu.size, keep))
    flow = lump.T @ sparse.diags(mu.stationary) @ mu.rows @ lump
    lumped_stationary = np.asarray(lump.T @ mu.stationary).ravel()
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(lumped_stationary > 0, 1.0 / lumped_stationary, 0.0)
    lumped_rows = (sparse.diags(scale) @ flow).tocsr()
    empty = lumped_stationary == 0
    if empty.any():
        lumped_rows = lumped_rows.tolil()
        for state in np.flatnonzero(empty):
            lumped_rows[state, state] = 1.0
        lumped_rows = lumped_rows.tocsr()
    truncated = SymbolSet(symbols.labels[:keep])
    measure = MarkovMeasure(truncated, np.arange(keep), lumped_stationary, lumped_rows, validate=False)

    defect_bound = binary_entropy(c_p) + (beta_inf + delta) * K_p
    beta_0 = beta_inf + delta / 2
    # the denominator is −δ/2, so K_delta is a lower bound on ∫φ dμ once −h(μ)/∫φ dμ > β_inf + δ
    K_delta = _support_pressure(mu, values, beta_0) / (beta_0 - beta_inf - delta)
    return Projection(measure, c_p, K_p, defect_bound, K_delta, mu.entropy() - measure.entropy())


def dirichlet_measure(T, rng, concentration=1.0):
    """A random Markov measure with Dirichlet rows supported on the allowed transitions."""
    size = T.size
    rows = np.zeros((size, size))
    for a in range(size):
        successors = T.successors(a)
        rows[a, successors] = rng.dirichlet(np.full(len(successors), concentration))
    return MarkovMeasure.from_rows(T.symbols, rows, gth_stationary(rows))


def entropy_defect_trials(model, p, delta, trials=200, seed=0, size=None, concentration=1.0, threads=1):
    """
    Draw random Markov measures on the model's truncation and project them to level ``p``.

    Trial ``i`` uses the generator seeded from ``(seed, i)``, so the outcome does not depend on ``threads``.
    """
    T = model.truncation(size)
    beta_inf = model.beta_infinity()

    def run(index):
        rng = Generator(Philox(SeedSequence([seed, index])))
        mu = dirichlet_measure(T, rng, concentration)
        return project_truncate(mu, p, model.potential, delta, beta_inf)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            return list(executor.map(run, range(trials)))
    return [run(index) for index in range(trials)]


def block_alphabet(Phi):
    """The block coding viewed as a shift over the block alphabet, with Φ as a 1-cylinder potential."""
    pattern = Phi.edge_matrix().toarray() > 0
    labels = Phi.labels()
    return TransitionStructure(labels, pattern), LocallyConstantPotential(labels, Phi.values, name="Phi")

