"""
The induced Bowen–Series shift of a free group of rank r with one parabolic pair, purely symbolically.

Generators are lower-case letters, their inverses upper-case; γ = ``a`` is parabolic. Symbols are
reduced words: ``hg`` (h ≠ γ^±1, g ≠ h⁻¹) and the cusp blocks γ^n g, γ^−n g with g ≠ γ^±1.
"""
from __future__ import division

import string

import numpy as np

from ..errors import ConfigError
from ..potential import LocallyConstantPotential
from ..potential import Observable
from ..shift import TransitionStructure
from ..tails import GeometricTail
from . import Model

GAMMA = "a"


def generators(rank):
    if not 2 <= rank <= len(string.ascii_lowercase):
        raise ConfigError("Rank must be between 2 and 26 (got %r)." % rank)
    letters = string.ascii_lowercase[:rank]
    return [c for letter in letters for c in (letter, letter.upper())]


def inverse(letter):
    return letter.swapcase()


def cusp_power(word):
    """n for γ^±n g, 0 for hg."""
    if word[0] not in (GAMMA, inverse(GAMMA)):
        return 0
    return len(word) - 1


def bowen_series_alphabet(rank, N):
    """(transitions, potential) of the induced alphabet with cusp blocks up to γ^±N."""
    model = BowenSeriesModel(rank, N)
    return model.truncation(N), model.potential


class BowenSeriesModel(Model):
    type = "bowen_series"

    def __init__(self, rank=2, cusp_cutoff=8):
        if cusp_cutoff < 1:
            raise ConfigError("Cusp cutoff must be at least 1 (got %r)." % cusp_cutoff)
        self.rank = rank
        self.max_p = cusp_cutoff
        G0 = generators(rank)
        H0 = [g for g in G0 if g not in (GAMMA, inverse(GAMMA))]
        words = [h + g for h in H0 for g in G0 if g != inverse(h)]
        for n in range(1, cusp_cutoff + 1):
            for c in (GAMMA, inverse(GAMMA)):
                words.extend(c * n + g for g in H0)
        self.words = words
        values = np.array([-float(cusp_power(word) or 1) for word in words])
        tail = GeometricTail(1.0, 2 * len(H0))
        super(BowenSeriesModel, self).__init__(LocallyConstantPotential(words, values, tail), "bowen_series")

    @classmethod
    def from_config(cls, descriptor):
        try:
            return cls(int(descriptor.get("rank", 2)), int(descriptor.get("cusp_cutoff", 8)))
        except (TypeError, ValueError) as exc:
            raise ConfigError("Invalid Bowen-Series descriptor %r: %s" % (descriptor, exc))

    @staticmethod
    def expected_size(rank, N):
        return (2 * rank - 2) * (2 * rank - 1) + 2 * N * (2 * rank - 2)

    def labels_upto(self, p):
        return [word for word in self.words if cusp_power(word) <= p]

    def transitions(self, labels):
        first = np.array([word[0] for word in labels])
        last = np.array([word[-1] for word in labels])
        return TransitionStructure(labels, last[:, None] == first[None, :])

    def observable(self, name):
        if name == "cusp":
            return Observable(name, 1, lambda word: 1.0 if cusp_power(word[0]) else 0.0, (0.0, 1.0))
        return super(BowenSeriesModel, self).observable(name)

    def as_dict(self):
        return {"type": self.type, "rank": self.rank, "cusp_cutoff": self.max_p}
