"""
Bernoulli measure with p_k ∝ 1/(k log² k), k ≥ 2: summable φ = log p with infinite entropy.
"""
from __future__ import division

import numpy as np
from scipy.special import xlogy

from ..errors import ConfigError
from ..potential import LocallyConstantPotential
from ..shift import TransitionStructure
from ..tails import LogPowerTail
from . import Model


def critical_weights(K):
    if K < 3:
        raise ConfigError("Critical Bernoulli cutoff K must be at least 3 (got %r)." % K)
    k = np.arange(2, K + 1, dtype=float)
    weights = 1.0 / (k * np.log(k) ** 2)
    return k, weights / weights.sum()


def entropy_partial_sums(K_values):
    """−Σ p_k log p_k with p renormalized over 2..K, for each K."""
    sums = []
    for K in K_values:
        _, probabilities = critical_weights(K)
        sums.append((K, float(-np.sum(xlogy(probabilities, probabilities)))))
    return sums


class CriticalBernoulliModel(Model):
    type = "critical_bernoulli"

    def __init__(self, K=10 ** 6):
        k, probabilities = critical_weights(K)
        self.K = K
        self.max_p = K
        labels = k.astype(int).tolist()
        # p_k = C / (k log² k) with C = p_2 · 2 log² 2
        constant = float(probabilities[0] * 2 * np.log(2) ** 2)
        super(CriticalBernoulliModel, self).__init__(
            LocallyConstantPotential(labels, np.log(probabilities), LogPowerTail(1.0, 2.0, constant)), "critical_bernoulli")

    @classmethod
    def from_config(cls, descriptor):
        K = descriptor.get("K", 10 ** 6)
        if not isinstance(K, int) or isinstance(K, bool):
            raise ConfigError("Critical Bernoulli K must be an integer (got %r)." % (K,))
        return cls(K)

    def labels_upto(self, p):
        return list(range(2, min(p, self.K) + 1))

    def half(self, p):
        return p // 2 if p // 2 >= 2 else None

    def transitions(self, labels):
        return TransitionStructure.full(labels)

    def diagnostics(self, K_values=None, tol=1e-6):
        if K_values is None:
            K_values = sorted(set(K for K in (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6, self.K) if K <= self.K))
        sums = entropy_partial_sums(K_values)
        increments = [b - a for (_, a), (_, b) in zip(sums, sums[1:])]
        return {
            "entropy_partial_sums": sums,
            "increasing": all(step > 0 for step in increments),
            "beta_infinity": self.beta_infinity(tol),
            "integral": float(np.dot(np.exp(self.potential.values), self.potential.values)),
        }

    def as_dict(self):
        return {"type": self.type, "K": self.K}


def critical_bernoulli(K, K_values=None):
    """(potential, divergence diagnostic) for the cutoff ``K``."""
    model = CriticalBernoulliModel(K)
    return model.potential, model.diagnostics(K_values)
