"""
Potentials with summable variations, described by Birkhoff-sum bounds on cylinders.

Potentials receive words as tuples of model labels. ``birkhoff_bounds(word, n)`` returns the pair
``(inf, sup)`` of S_nφ over the cylinder [word] (``n <= len(word)``). Everything the engine computes
(partition sums, block inductions, Gibbs ratios) consumes only these bounds.
"""
from __future__ import division

import math

import numpy as np
from scipy import sparse
from scipy.special import logsumexp

from .errors import CapExceeded
from .errors import ConfigError
from .errors import MissingTailDescriptor
from .shift import DEFAULT_CAP
from .shift import admissible_array
from .tails import FiniteTail
from .utils import BOUNDS
from .utils import CODINGS


class Potential(object):
    name = "phi"
    tail = None
    locally_constant = False

    def birkhoff_bounds(self, word, n=None):
        raise NotImplementedError

    def cylinder_sup(self, word):
        return self.birkhoff_bounds(word)[1]

    def cylinder_inf(self, word):
        return self.birkhoff_bounds(word)[0]

    def representative(self, word, n=1):
        """S_nφ at a chosen point of [word]; the midpoint of the bracket unless a model knows better."""
        lower, upper = self.birkhoff_bounds(word, n)
        return 0.5 * (lower + upper)

    def orbit_bounds(self, word):
        """Bracket of S_nφ at the periodic point with period word ``word`` (n = len(word))."""
        return self.birkhoff_bounds(tuple(word) * 2, len(word))

    def word_bounds(self, symbols, words, n):
        """Vectorised ``birkhoff_bounds`` over an integer word array."""
        lower = np.empty(len(words))
        upper = np.empty(len(words))
        labels = symbols.labels
        for i, row in enumerate(words):
            lower[i], upper[i] = self.birkhoff_bounds(tuple(labels[a] for a in row), n)
        return lower, upper

    def word_representatives(self, symbols, words, n):
        labels = symbols.labels
        return np.array([self.representative(tuple(labels[a] for a in row), n) for row in words], dtype=float)

    def variation(self, m, T, cap=DEFAULT_CAP):
        """Largest oscillation of φ over a retained m-cylinder."""
        lower, upper = self.word_bounds(T.symbols, admissible_array(T, m, cap), 1)
        return float(np.max(upper - lower))

    def scaled(self, beta):
        if beta == 1:
            return self
        return ScaledPotential(self, beta)

    def __mul__(self, beta):
        return self.scaled(beta)

    __rmul__ = __mul__

    def __add__(self, other):
        return SumPotential(self, other)

    def __repr__(self):
        return "<%s %s>" % (type(self).__name__, self.name)


class LocallyConstantPotential(Potential):
    """φ constant on 1-cylinders: ``φ(x) = values[x_0]``."""
    locally_constant = True

    def __init__(self, labels, values, tail=None, name="phi"):
        self.labels = tuple(labels)
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (len(self.labels),):
            raise ConfigError("Expected %s potential values, got shape %r." % (len(self.labels), self.values.shape))
        if not np.isfinite(self.values).all():
            raise ConfigError("Potential values must be finite.")
        self._value = dict(zip(self.labels, self.values.tolist()))
        self.tail = tail
        self.name = name

    def value(self, label):
        return self._value[label]

    def values_on(self, symbols):
        if symbols.labels == self.labels[:len(symbols)]:
            return self.values[:len(symbols)]
        return np.array([self._value[label] for label in symbols.labels])

    def birkhoff_bounds(self, word, n=None):
        n = len(word) if n is None else n
        total = math.fsum(self._value[label] for label in word[:n])
        return total, total

    def representative(self, word, n=1):
        return math.fsum(self._value[label] for label in word[:n])

    def orbit_bounds(self, word):
        total = math.fsum(self._value[label] for label in word)
        return total, total

    def word_bounds(self, symbols, words, n):
        total = self.values_on(symbols)[words[:, :n]].sum(axis=1)
        return total, total

    def word_representatives(self, symbols, words, n):
        return self.values_on(symbols)[words[:, :n]].sum(axis=1)

    def variation(self, m, T, cap=DEFAULT_CAP):
        return 0.0


class ScaledPotential(Potential):
    def __init__(self, base, beta):
        self.base = base
        self.beta = float(beta)
        self.locally_constant = base.locally_constant
        self.name = "%r*%s" % (self.beta, base.name)
        if base.tail is not None and isinstance(base.tail, FiniteTail):
            self.tail = base.tail
        elif base.tail is not None and self.beta > 0:
            self.tail = base.tail.scaled(self.beta)

    def _scale(self, lower, upper):
        if self.beta >= 0:
            return self.beta * lower, self.beta * upper
        return self.beta * upper, self.beta * lower

    def birkhoff_bounds(self, word, n=None):
        return self._scale(*self.base.birkhoff_bounds(word, n))

    def representative(self, word, n=1):
        return self.beta * self.base.representative(word, n)

    def orbit_bounds(self, word):
        return self._scale(*self.base.orbit_bounds(word))

    def word_bounds(self, symbols, words, n):
        return self._scale(*self.base.word_bounds(symbols, words, n))

    def word_representatives(self, symbols, words, n):
        return self.beta * self.base.word_representatives(symbols, words, n)

    def variation(self, m, T, cap=DEFAULT_CAP):
        return abs(self.beta) * self.base.variation(m, T, cap)

    def scaled(self, beta):
        return self.base.scaled(self.beta * beta)


class SumPotential(Potential):
    """φ + ψ; brackets add, so the sum stays a valid (if looser) bracket."""

    def __init__(self, first, second):
        self.first = first
        self.second = second
        self.locally_constant = first.locally_constant and second.locally_constant
        self.tail = first.tail if first.tail is not None else second.tail
        self.name = "%s+%s" % (first.name, second.name)

    def birkhoff_bounds(self, word, n=None):
        a_lo, a_hi = self.first.birkhoff_bounds(word, n)
        b_lo, b_hi = self.second.birkhoff_bounds(word, n)
        return a_lo + b_lo, a_hi + b_hi

    def representative(self, word, n=1):
        return self.first.representative(word, n) + self.second.representative(word, n)

    def orbit_bounds(self, word):
        a_lo, a_hi = self.first.orbit_bounds(word)
        b_lo, b_hi = self.second.orbit_bounds(word)
        return a_lo + b_lo, a_hi + b_hi

    def word_bounds(self, symbols, words, n):
        a_lo, a_hi = self.first.word_bounds(symbols, words, n)
        b_lo, b_hi = self.second.word_bounds(symbols, words, n)
        return a_lo + b_lo, a_hi + b_hi

    def word_representatives(self, symbols, words, n):
        return (self.first.word_representatives(symbols, words, n) +
                self.second.word_representatives(symbols, words, n))


class Observable(Potential):
    """
    A bounded function of the first ``level`` symbols.

    ``func`` maps a label tuple of length ``level`` to a float; ``bounds`` brackets it everywhere and is
    used when a cylinder does not determine the whole window.
    """

    def __init__(self, name, level, func, bounds):
        if level < 1:
            raise ConfigError("Observable level must be at least 1 (got %r)." % level)
        self.name = name
        self.level = level
        self.func = func
        self.bounds = (float(bounds[0]), float(bounds[1]))
        self.locally_constant = level == 1
        self.tail = FiniteTail()

    def __call__(self, word):
        return float(self.func(tuple(word[:self.level])))

    def birkhoff_bounds(self, word, n=None):
        n = len(word) if n is None else n
        lower = upper = 0.0
        for i in range(n):
            window = word[i:i + self.level]
            if len(window) == self.level:
                value = self.func(window)
                lower += value
                upper += value
            else:
                lower += self.bounds[0]
                upper += self.bounds[1]
        return lower, upper

    def representative(self, word, n=1):
        lower, upper = self.birkhoff_bounds(word, n)
        return 0.5 * (lower + upper)

    def orbit_bounds(self, word):
        word = tuple(word)
        total = self.orbit_sum(word)
        return total, total

    def orbit_sum(self, word):
        """S_nψ on the periodic point of ``word``; exact because the windows wrap around."""
        n = len(word)
        extended = word * (1 + (self.level + n - 1) // n)
        return math.fsum(self.func(extended[i:i + self.level]) for i in range(n))

    def average(self, word):
        return self.orbit_sum(tuple(word)) / len(word)

    def variation(self, m, T, cap=DEFAULT_CAP):
        if m >= self.level:
            return 0.0
        return super(Observable, self).variation(m, T, cap)


class BlockPotential(object):
    """
    A locally constant weight over retained q-words together with its coding.

    ``coding="block"`` is the non-overlapping q-block coding: ω → ω′ iff last(ω) → first(ω′) and one
    step advances q symbols. ``coding="window"`` slides a q-window one symbol at a time: ω → ω′ iff ω′
    drops the first letter of ω and appends one.

    Both codings are ``M = diag(exp(values)) · Out · K · Inᵀ`` with state keys ``out_key``/``in_key``
    and a 0/1 key operator K, which is never materialized for full shifts.
    """

    def __init__(self, T, q, words, values, lower, upper, oscillation, coding="block", bound="sup"):
        self.T = T
        self.q = q
        self.words = words
        self.values = np.asarray(values, dtype=float)
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self.oscillation = float(oscillation)
        self.coding = coding
        self.bound = bound
        self.step = q if coding == "block" else 1
        if coding == "block":
            self.out_key = words[:, -1]
            self.in_key = words[:, 0]
            self.key_size = T.size
        else:
            stacked = np.vstack([words[:, 1:], words[:, :-1]])
            _, inverse = np.unique(stacked, axis=0, return_inverse=True)
            inverse = np.asarray(inverse).reshape(-1)
            self.out_key = inverse[:len(words)]
            self.in_key = inverse[len(words):]
            self.key_size = int(inverse.max()) + 1

    def __len__(self):
        return len(self.words)

    @property
    def size(self):
        return len(self.words)

    def __repr__(self):
        return "<BlockPotential q=%s coding=%s bound=%s states=%s D_q=%.6g>" % (
            self.q, self.coding, self.bound, self.size, self.oscillation)

    def label(self, index):
        return self.T.symbols.word(self.words[index])

    def labels(self):
        return [self.T.symbols.word(row) for row in self.words]

    def _key_apply(self, vector):
        if self.coding == "block":
            return self.T.apply(vector)
        return vector

    def _key_apply_transpose(self, vector):
        if self.coding == "block":
            return self.T.apply_transpose(vector)
        return vector

    def matvec(self, vector, weights):
        """``M @ vector`` where M(a, b) = [a → b] · weights[a]."""
        gathered = np.bincount(self.in_key, weights=vector, minlength=self.key_size)
        return weights * self._key_apply(gathered)[self.out_key]

    def rmatvec(self, vector, weights):
        scattered = np.bincount(self.out_key, weights=weights * vector, minlength=self.key_size)
        return self._key_apply_transpose(scattered)[self.in_key]

    def edge_count(self):
        in_counts = np.bincount(self.in_key, minlength=self.key_size).astype(float)
        return int(self._key_apply(in_counts)[self.out_key].sum())

    def edge_matrix(self, cap=DEFAULT_CAP):
        """The 0/1 transition pattern between states as a CSR matrix."""
        count = self.edge_count()
        if count > cap:
            raise CapExceeded(count, cap, "block transitions")
        states = np.arange(self.size)
        ones = np.ones(self.size)
        out = sparse.csr_matrix((ones, (states, self.out_key)), shape=(self.size, self.key_size))
        into = sparse.csr_matrix((ones, (states, self.in_key)), shape=(self.size, self.key_size))
        if self.coding == "window":
            key = sparse.identity(self.key_size, format="csr")
        elif self.T.is_full:
            key = sparse.csr_matrix(np.ones((self.key_size, self.key_size)))
        else:
            key = sparse.csr_matrix(self.T.matrix.astype(float))
        pattern = (out @ key @ into.T).tocsr()
        pattern.data[:] = 1.0
        pattern.sort_indices()
        return pattern

    def with_values(self, values, bound=None):
        return BlockPotential(self.T, self.q, self.words, values, self.lower, self.upper, self.oscillation,
                              self.coding, self.bound if bound is None else bound)

    def select(self, bound):
        """The same coding weighted by another bound mode (only ``sup``/``inf``/``center``)."""
        if bound == "sup":
            return self.with_values(self.upper, bound)
        elif bound == "inf":
            return self.with_values(self.lower, bound)
        elif bound == "center":
            return self.with_values(0.5 * (self.lower + self.upper), bound)
        elif bound == self.bound:
            return self
        raise ConfigError("Cannot reselect bound %r from stored brackets." % bound)

    def as_dict(self):
        return {
            "q": self.q,
            "coding": self.coding,
            "bound": self.bound,
            "states": self.size,
            "step": self.step,
            "D_q": self.oscillation,
        }


def induce_block_potential(phi, q, T, coding="block", bound="sup", cap=DEFAULT_CAP):
    """
    Induce the locally constant weight Φ over retained q-words.

    ``D_q`` is the largest oscillation of S_qφ over a retained q-cylinder whatever the coding. With the
    window coding the weight of a state is the one-step bound on [ω].
    """
    if q < 1:
        raise ConfigError("Block length q must be at least 1 (got %r)." % q)
    if coding not in CODINGS:
        raise ConfigError("Unknown coding %r." % coding)
    if bound not in BOUNDS:
        raise ConfigError("Unknown bound %r." % bound)
    if coding == "window" and q == 1:
        coding = "block"
    words = admissible_array(T, q, cap)
    q_lower, q_upper = phi.word_bounds(T.symbols, words, q)
    oscillation = float(np.max(q_upper - q_lower))
    step = q if coding == "block" else 1
    if step == q:
        lower, upper = q_lower, q_upper
    else:
        lower, upper = phi.word_bounds(T.symbols, words, step)
    if bound == "sup":
        values = upper
    elif bound == "inf":
        values = lower
    elif bound == "center":
        values = 0.5 * (lower + upper)
    elif phi.locally_constant:
        values = upper
    else:
        values = phi.word_representatives(T.symbols, words, step)
    return BlockPotential(T, q, words, values, lower, upper, oscillation, coding, bound)


def variation_partial_sums(phi, n_max, T, cap=DEFAULT_CAP):
    if n_max < 1:
        raise ConfigError("n_max must be at least 1 (got %r)." % n_max)
    return np.cumsum([phi.variation(m, T, cap) for m in range(1, n_max + 1)]).tolist()


def log_partition_sum(phi, beta, n, T, cap=DEFAULT_CAP, with_remainder=False, level=None):
    """
    log Z_n(βφ) over the truncation, by log-sum-exp of the cylinder sups of βS_nφ.

    With ``with_remainder`` the tail descriptor's bound on the truncated-away part of Z_1 is returned
    too (``inf`` when βφ is not summable, ``None`` without a descriptor or for n > 1). The tail is indexed
    by the truncation ``level`` the descriptor counts in, the alphabet size when not given.
    """
    if n < 1:
        raise ConfigError("n must be at least 1 (got %r)." % n)
    scaled = phi.scaled(beta)
    words = admissible_array(T, n, cap)
    _, upper = scaled.word_bounds(T.symbols, words, n)
    value = float(logsumexp(upper))
    if not with_remainder:
        return value
    remainder = None
    if n == 1 and phi.tail is not None:
        remainder = phi.tail.remainder(beta, T.size if level is None else level)
    return value, remainder


def beta_infinity(phi, tol=1e-6, upper_limit=2.0 ** 40):
    """
    ``max(0, inf{β: Z_1(βφ) < ∞})`` by bisection on the tail descriptor's convergence predicate.
    """
    tail = phi.tail
    if tail is None:
        raise MissingTailDescriptor(phi)
    if not tol > 0:
        raise ConfigError("Tolerance must be > 0 (got %r)." % tol)
    if tail.converges(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while not tail.converges(hi):
        lo, hi = hi, 2 * hi
        if hi > upper_limit:
            raise ConfigError("Tail %r does not converge for any beta <= %g." % (tail, upper_limit))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if tail.converges(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
