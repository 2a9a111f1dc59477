from __future__ import division

import math
import statistics

from scipy.stats import norm

from .utils import cached_property


class Proportion(object):
    """A binomial proportion with its Wilson score interval."""
    fields = ("successes", "trials", "estimate", "ci_low", "ci_high", "confidence")

    def __init__(self, successes, trials, confidence=0.95):
        if trials < 1 or not 0 <= successes <= trials:
            raise ValueError("Need 0 <= successes <= trials and trials >= 1 (got %r/%r)." % (successes, trials))
        if not 0 < confidence < 1:
            raise ValueError("Confidence must lie in (0, 1) (got %r)." % confidence)
        self.successes = successes
        self.trials = trials
        self.confidence = confidence

    def __repr__(self):
        return "Proportion(%s/%s, ci=[%.6g, %.6g])" % (self.successes, self.trials, self.ci_low, self.ci_high)

    def as_dict(self):
        return dict(
            (field, getattr(self, field))
            for field in self.fields
        )

    @cached_property
    def estimate(self):
        return self.successes / self.trials

    @cached_property
    def z(self):
        return float(norm.ppf(0.5 + self.confidence / 2))

    @cached_property
    def _wilson(self):
        n, p, z2 = self.trials, self.estimate, self.z ** 2
        scale = 1 + z2 / n
        center = (p + z2 / (2 * n)) / scale
        half = self.z / scale * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n))
        return center, half

    @cached_property
    def ci_low(self):
        if self.successes == 0:
            return 0.0
        center, half = self._wilson
        return max(0.0, center - half)

    @cached_property
    def ci_high(self):
        if self.successes == self.trials:
            return 1.0
        center, half = self._wilson
        return min(1.0, center + half)

    @property
    def interval(self):
        return self.ci_low, self.ci_high

    def covers(self, probability):
        return self.ci_low <= probability <= self.ci_high


class TrialStats(object):
    """Slack of an inequality checked over repeated random trials (positive slack means it held)."""
    fields = ("trials", "violations", "min", "max", "mean", "stddev", "median")
    tolerance = 1e-12

    def __init__(self):
        self.data = []

    def __bool__(self):
        return bool(self.data)

    def as_dict(self):
        return dict(
            (field, getattr(self, field))
            for field in self.fields
        )

    def update(self, slack):
        self.data.append(slack)

    @property
    def trials(self):
        return len(self.data)

    @property
    def violations(self):
        return sum(1 for slack in self.data if slack < -self.tolerance)

    @property
    def min(self):
        return min(self.data)

    @property
    def max(self):
        return max(self.data)

    @property
    def mean(self):
        return statistics.mean(self.data)

    @property
    def stddev(self):
        if len(self.data) > 1:
            return statistics.stdev(self.data)
        else:
            return 0

    @property
    def median(self):
        return statistics.median(self.data)
