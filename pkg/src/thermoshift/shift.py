"""
Finite truncations of countable Markov shifts.

Symbols are addressed by their index in a :class:`SymbolSet`; labels are the model-native names
(continued-fraction digits, reduced words over group generators, plain integers). Every iteration
order in the package is the lexicographic order of symbol indices.
"""
from __future__ import division

import numpy as np

from .errors import CapExceeded
from .errors import InvalidTransitions
from .errors import NotPrimitive

DEFAULT_CAP = 10 ** 8


class SymbolSet(object):
    def __init__(self, labels):
        self.labels = tuple(labels)
        if not self.labels:
            raise InvalidTransitions("A symbol set needs at least one symbol.")
        self._index = {}
        for index, label in enumerate(self.labels):
            if label in self._index:
                raise InvalidTransitions("Duplicate symbol label %r." % (label,))
            self._index[label] = index

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label):
        return label in self._index

    def __eq__(self, other):
        return isinstance(other, SymbolSet) and self.labels == other.labels

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        if len(self) > 6:
            return "SymbolSet(%r, ..., %r; size=%s)" % (self.labels[0], self.labels[-1], len(self))
        return "SymbolSet(%r)" % (self.labels,)

    @property
    def size(self):
        return len(self.labels)

    def index(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise KeyError("Symbol %r is not retained in %r." % (label, self))

    def label(self, index):
        return self.labels[index]

    def word(self, indices):
        labels = self.labels
        return tuple(labels[i] for i in indices)


class PrimitivityWitness(object):
    """
    Connector words Λ of a common length N: for all symbols a, b some λ ∈ Λ makes aλb admissible.
    """

    def __init__(self, length, words):
        self.length = length
        self.words = tuple(words)

    def __repr__(self):
        return "PrimitivityWitness(N=%s, words=%r)" % (self.length, self.words)

    def as_dict(self):
        return {"N": self.length, "words": [list(word) for word in self.words]}


class TransitionStructure(object):
    """
    A 0/1 transition matrix over a truncated alphabet.

    ``matrix=None`` stands for the full shift so that very large alphabets never materialize m² entries.
    """

    def __init__(self, symbols, matrix=None, witness=None):
        if not isinstance(symbols, SymbolSet):
            symbols = SymbolSet(symbols)
        self.symbols = symbols
        if matrix is not None:
            matrix = np.array(matrix, dtype=bool)
            m = len(symbols)
            if matrix.shape != (m, m):
                raise InvalidTransitions("Transition matrix must be %sx%s, got %r." % (m, m, matrix.shape))
            if matrix.all():
                matrix = None
            else:
                empty_rows = np.flatnonzero(~matrix.any(axis=1))
                if empty_rows.size:
                    raise InvalidTransitions("Symbol %r has no successor." % (symbols.label(empty_rows[0]),))
                empty_cols = np.flatnonzero(~matrix.any(axis=0))
                if empty_cols.size:
                    raise InvalidTransitions("Symbol %r has no predecessor." % (symbols.label(empty_cols[0]),))
                matrix.setflags(write=False)
        self.matrix = matrix
        self.witness = witness

    @classmethod
    def full(cls, labels):
        return cls(labels)

    def __repr__(self):
        return "TransitionStructure(%r, %s)" % (self.symbols, "full" if self.is_full else "%s allowed" % self.matrix.sum())

    def __len__(self):
        return len(self.symbols)

    @property
    def size(self):
        return len(self.symbols)

    @property
    def is_full(self):
        return self.matrix is None

    def allowed(self, a, b):
        return True if self.matrix is None else bool(self.matrix[a, b])

    def allowed_labels(self, a, b):
        return self.allowed(self.symbols.index(a), self.symbols.index(b))

    def is_admissible(self, indices):
        return all(self.allowed(a, b) for a, b in zip(indices, indices[1:]))

    @property
    def adjacency(self):
        if self.matrix is None:
            return np.ones((self.size, self.size))
        return self.matrix.astype(float)

    def successors(self, a):
        if self.matrix is None:
            return np.arange(self.size)
        return np.flatnonzero(self.matrix[a])

    def apply(self, vector):
        """Return ``T @ vector`` without materializing the full-shift matrix."""
        if self.matrix is None:
            return np.full(self.size, np.sum(vector))
        return self.matrix.astype(float) @ vector

    def apply_transpose(self, vector):
        if self.matrix is None:
            return np.full(self.size, np.sum(vector))
        return self.matrix.T.astype(float) @ vector

    def restrict(self, count):
        """The truncation retaining the first ``count`` symbols."""
        if count >= self.size:
            return self
        symbols = SymbolSet(self.symbols.labels[:count])
        matrix = None if self.matrix is None else self.matrix[:count, :count]
        return TransitionStructure(symbols, matrix)

    def as_dict(self):
        return {
            "symbols": list(self.symbols.labels) if self.size <= 64 else self.size,
            "matrix": "full" if self.matrix is None else self.matrix.astype(int).tolist(),
        }


def _power_counts(T, n):
    """Float row-sum vector of T^(n-1); exact while counts stay below 2**53."""
    counts = np.ones(T.size)
    with np.errstate(over='ignore', invalid='ignore'):
        for _ in range(n - 1):
            counts = T.apply_transpose(counts)
    return counts


def count_admissible(T, n):
    if n < 1:
        raise ValueError("Word length must be at least 1 (got %r)." % n)
    if T.is_full:
        return T.size ** n
    counts = _power_counts(T, n)
    total = float(np.sum(counts))
    if total < 2 ** 53:
        return int(total)
    vector = [1] * T.size
    rows = [T.successors(a).tolist() for a in range(T.size)]
    for _ in range(n - 1):
        vector = [sum(vector[b] for b in rows[a]) for a in range(T.size)]
    return sum(vector)


def count_periodic(T, n):
    """Exact trace of T^n: the number of points of Per_n in the truncation."""
    if n < 1:
        raise ValueError("Period must be at least 1 (got %r)." % n)
    if T.is_full:
        return T.size ** n
    with np.errstate(over='ignore', invalid='ignore'):
        power = np.linalg.matrix_power(T.adjacency, n)
        total = float(np.trace(power))
    if total < 2 ** 53:
        return int(total)
    adjacency = T.matrix.astype(int).astype(object)
    power = np.identity(T.size, dtype=int).astype(object)
    for _ in range(n):
        power = power.dot(adjacency)
    return int(sum(power[i, i] for i in range(T.size)))


def admissible_array(T, n, cap=DEFAULT_CAP):
    """
    All admissible words of length ``n`` as an integer array of shape (count, n), lexicographically sorted.
    """
    count = count_admissible(T, n)
    if count > cap:
        raise CapExceeded(count, cap, "admissible %s-words" % n)
    words = np.arange(T.size, dtype=np.int64)[:, None]
    for _ in range(n - 1):
        if T.is_full:
            words = np.hstack([
                np.repeat(words, T.size, axis=0),
                np.tile(np.arange(T.size, dtype=np.int64), len(words))[:, None],
            ])
        else:
            successors = [T.successors(a) for a in range(T.size)]
            last = words[:, -1]
            fanout = np.array([len(successors[a]) for a in last], dtype=np.int64)
            tails = np.concatenate([successors[a] for a in last]) if len(last) else np.empty(0, dtype=np.int64)
            words = np.hstack([np.repeat(words, fanout, axis=0), tails[:, None].astype(np.int64)])
    return words


def admissible_words(T, n, cap=DEFAULT_CAP):
    """E^n of the truncation as label tuples, lexicographic in symbol indices."""
    return [T.symbols.word(row) for row in admissible_array(T, n, cap)]


def necklaces(T, n, cap=DEFAULT_CAP):
    """
    Cyclically admissible necklaces of length ``n`` with their prime periods.

    Each necklace is the lexicographically least rotation of its orbit and stands for ``prime_period``
    distinct points of Per_n. Generated in lexicographic order (Fredricksen-Kessler-Maiorana).
    """
    count = count_periodic(T, n)
    if count > cap:
        raise CapExceeded(count, cap, "periodic %s-points" % n)
    k = T.size
    allowed = T.allowed
    word = [0] * (n + 1)
    found = []

    def generate(t, period):
        if t > n:
            if n % period == 0 and allowed(word[n], word[1]):
                found.append((tuple(word[1:]), period))
            return
        value = word[t - period]
        if t == 1 or allowed(word[t - 1], value):
            word[t] = value
            generate(t + 1, period)
        for value in range(word[t - period] + 1, k):
            if t == 1 or allowed(word[t - 1], value):
                word[t] = value
                generate(t + 1, t)

    generate(1, 1)
    return found


def rotations(word, period):
    return [word[i:] + word[:i] for i in range(period)]


def periodic_words(T, n, cap=DEFAULT_CAP):
    """
    One entry per point of Per_n in the truncation: ``(word, prime_period)`` with ``word`` a label tuple.
    """
    points = []
    for necklace, period in necklaces(T, n, cap):
        for rotation in rotations(necklace, period):
            points.append((rotation, period))
    points.sort()
    return [(T.symbols.word(word), period) for word, period in points]


def _connector_path(T, start, end, length):
    """An admissible word of ``length`` symbols from ``start`` to ``end``, or None."""
    if length == 1:
        return (start,) if start == end else None
    reach = [np.zeros(T.size, dtype=bool)]
    reach[0][start] = True
    for _ in range(length - 1):
        reach.append(T.apply_transpose(reach[-1].astype(float)) > 0)
    if not reach[-1][end]:
        return None
    path = [end]
    for step in range(length - 2, -1, -1):
        current = path[-1]
        previous = [a for a in np.flatnonzero(reach[step]) if T.allowed(a, current)]
        path.append(int(previous[0]))
    return tuple(reversed(path))


def primitivity_witness(T, N_max=16):
    """
    Smallest connector length N <= N_max with a witness set Λ of length-N words.

    Λ is chosen greedily over (first, last) connector classes; the full shift returns N=0, Λ=∅.
    """
    if N_max < 0:
        raise ValueError("N_max must be nonnegative (got %r)." % N_max)
    if T.is_full:
        return PrimitivityWitness(0, ())
    m = T.size
    adjacency = T.adjacency
    into = adjacency > 0
    previous = power = np.identity(m)
    for N in range(N_max + 1):
        # (T^(N+1))[a, b] > 0 iff a connector of length N joins a to b
        reach = (power @ adjacency) > 0
        if reach.all():
            break
        previous, power = power, np.minimum(power @ adjacency, 1.0)
    else:
        failing = np.argwhere(~reach)[0]
        raise NotPrimitive((T.symbols.label(failing[0]), T.symbols.label(failing[1])), N_max)
    if N == 0:
        return PrimitivityWitness(0, ())
    # connectors from i to j of length N exist iff (T^(N-1))[i, j] > 0
    candidates = np.argwhere(previous > 0)
    uncovered = np.ones((m, m), dtype=bool)
    chosen = []
    while uncovered.any():
        gains = [np.count_nonzero(uncovered & np.outer(into[:, i], into[j, :])) for i, j in candidates]
        i, j = candidates[int(np.argmax(gains))]
        uncovered &= ~np.outer(into[:, i], into[j, :])
        chosen.append(T.symbols.word(_connector_path(T, int(i), int(j), N)))
    return PrimitivityWitness(N, sorted(chosen))
