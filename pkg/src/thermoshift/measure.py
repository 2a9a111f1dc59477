from __future__ import division

import math

import numpy as np
from scipy import sparse
from scipy.special import xlogy

from .errors import ConfigError
from .shift import SymbolSet
from .shift import TransitionStructure

STATIONARY_SUM_TOLERANCE = 1e-12
ROW_SUM_TOLERANCE = 1e-12
INVARIANCE_TOLERANCE = 1e-10


def gth_stationary(rows):
    """
    Stationary vector of an irreducible stochastic matrix by Grassmann-Taksar-Heyman elimination.

    Subtraction-free, so tiny stationary masses keep full relative accuracy.
    """
    matrix = np.array(rows.toarray() if sparse.issparse(rows) else rows, dtype=float)
    size = matrix.shape[0]
    for n in range(size - 1, 0, -1):
        scale = matrix[n, :n].sum()
        if not scale > 0:
            raise ConfigError("Transition rows are not irreducible (state %s cannot be left downward)." % n)
        matrix[:n, n] /= scale
        matrix[:n, :n] += np.outer(matrix[:n, n], matrix[n, :n])
    stationary = np.zeros(size)
    stationary[0] = 1.0
    for n in range(1, size):
        stationary[n] = stationary[:n] @ matrix[:n, n]
    return stationary / stationary.sum()


class MarkovMeasure(object):
    """
    A stationary Markov measure over states that stand for words of the base alphabet.

    ``words[a]`` is the base-symbol index word of state ``a`` and ``step`` the number of base symbols
    one transition advances: 1 for symbol chains and window codings, q for non-overlapping q-blocks.
    """

    def __init__(self, symbols, words, stationary, rows, step=1, validate=True):
        if not isinstance(symbols, SymbolSet):
            symbols = SymbolSet(symbols)
        self.symbols = symbols
        self.words = np.asarray(words, dtype=np.int64)
        if self.words.ndim == 1:
            self.words = self.words[:, None]
        self.stationary = np.asarray(stationary, dtype=float)
        self.rows = sparse.csr_matrix(rows)
        self.rows.sort_indices()
        self.step = step
        if validate:
            self.validate()

    @classmethod
    def from_rows(cls, symbols, rows, stationary=None):
        """A chain over the symbols themselves; the stationary vector is solved for when omitted."""
        if not isinstance(symbols, SymbolSet):
            symbols = SymbolSet(symbols)
        if stationary is None:
            stationary = gth_stationary(rows)
        return cls(symbols, np.arange(len(symbols)), stationary, rows)

    @classmethod
    def bernoulli(cls, symbols, probabilities):
        probabilities = np.asarray(probabilities, dtype=float)
        rows = np.tile(probabilities, (len(probabilities), 1))
        return cls.from_rows(symbols, rows, probabilities)

    def __len__(self):
        return len(self.stationary)

    @property
    def size(self):
        return len(self.stationary)

    def __repr__(self):
        return "<MarkovMeasure states=%s step=%s>" % (self.size, self.step)

    def validate(self):
        size = self.size
        if self.rows.shape != (size, size) or len(self.words) != size:
            raise ConfigError("Inconsistent measure shapes: %s states, rows %r." % (size, self.rows.shape))
        if (self.stationary < 0).any() or (self.rows.data < 0).any():
            raise ConfigError("Measure entries must be nonnegative.")
        total = self.stationary.sum()
        if abs(total - 1) > STATIONARY_SUM_TOLERANCE:
            raise ConfigError("Stationary vector sums to %.17g, not 1." % total)
        row_sums = np.asarray(self.rows.sum(axis=1)).ravel()
        worst = np.max(np.abs(row_sums - 1))
        if worst > ROW_SUM_TOLERANCE:
            raise ConfigError("Transition rows are not stochastic (worst row sum error %.3g)." % worst)
        drift = np.max(np.abs(self.rows.T @ self.stationary - self.stationary))
        if drift > INVARIANCE_TOLERANCE:
            raise ConfigError("Stationary vector is not invariant (|πQ - π| = %.3g)." % drift)

    def check_support(self, T):
        """Raise unless every positive transition is allowed by ``T`` on the state words."""
        coo = self.rows.tocoo()
        positive = coo.data > 0
        last = self.words[coo.row[positive], -1]
        first = self.words[coo.col[positive], 0]
        if self.step == 1 and self.words.shape[1] > 1:
            bad = ~(self.words[coo.row[positive], 1:] == self.words[coo.col[positive], :-1]).all(axis=1)
        else:
            bad = np.array([not T.allowed(a, b) for a, b in zip(last, first)], dtype=bool)
        if bad.any():
            index = int(np.flatnonzero(bad)[0])
            raise ConfigError("Transition %r -> %r carries mass but is not allowed." % (
                self.state_label(coo.row[positive][index]), self.state_label(coo.col[positive][index])))

    def state_label(self, state):
        word = self.symbols.word(self.words[state])
        return word[0] if len(word) == 1 else word

    def state_labels(self):
        return [self.state_label(state) for state in range(self.size)]

    def entropy(self):
        """Entropy rate per base symbol: −Σ π(a) Σ_b Q(a,b) ln Q(a,b), divided by the step."""
        coo = self.rows.tocoo()
        total = -np.sum(self.stationary[coo.row] * xlogy(coo.data, coo.data))
        return float(total) / self.step

    def expectation(self, values):
        """Σ π(a) values(a), per base symbol."""
        return math.fsum(self.stationary * np.asarray(values, dtype=float)) / self.step

    def integral(self, potential):
        """(value, lower, upper) of ∫φ dμ from the potential's bounds on each state's cylinder."""
        lower, upper = potential.word_bounds(self.symbols, self.words, self.step)
        value = potential.word_representatives(self.symbols, self.words, self.step)
        mass = self.stationary > 0
        return tuple(self.expectation(np.where(mass, part, 0.0)) for part in (value, lower, upper))

    def cylinder_mass(self, states):
        """μ of the cylinder spelled by a sequence of states."""
        mass = self.stationary[states[0]]
        for a, b in zip(states, states[1:]):
            mass *= self.rows[a, b]
        return float(mass)

    def symbol_marginal(self):
        """Mass of each base symbol in the first position."""
        return np.bincount(self.words[:, 0], weights=self.stationary, minlength=len(self.symbols))

    def support(self):
        """The transition structure of positive rows over the states."""
        pattern = self.rows.toarray() > 0
        labels = [tuple(self.symbols.word(row)) if self.words.shape[1] > 1 else self.symbols.label(row[0])
                  for row in self.words]
        return TransitionStructure(labels, pattern)

    def as_dict(self):
        return {
            "states": self.size,
            "step": self.step,
            "stationary": self.stationary if self.size <= 64 else None,
        }
