import math

import numpy as np
import pytest
from pytest import approx

from thermoshift.errors import ConfigError
from thermoshift.models import load_model
from thermoshift.models.critical import CriticalBernoulliModel
from thermoshift.models.critical import critical_bernoulli
from thermoshift.models.critical import critical_weights
from thermoshift.models.critical import entropy_partial_sums


def test_weights():
    k, probabilities = critical_weights(10)
    assert list(k) == list(range(2, 11))
    assert probabilities.sum() == approx(1.0)
    assert np.all(np.diff(probabilities) < 0)
    assert probabilities[0] / probabilities[1] == approx(3 * math.log(3) ** 2 / (2 * math.log(2) ** 2))


def test_partial_sums():
    sums = entropy_partial_sums([10 ** 3, 10 ** 6])
    assert sums[0] == (1000, approx(2.265504, abs=1e-5))
    assert sums[1] == (1000000, approx(2.744482, abs=1e-5))


def test_diagnostics():
    model = CriticalBernoulliModel(10 ** 5)
    diagnostics = model.diagnostics()
    assert [K for K, _ in diagnostics["entropy_partial_sums"]] == [10 ** 3, 10 ** 4, 10 ** 5]
    assert diagnostics["increasing"]
    assert diagnostics["beta_infinity"] == approx(1.0, abs=1e-5)
    assert diagnostics["integral"] == approx(-diagnostics["entropy_partial_sums"][-1][1])


def test_potential():
    potential, diagnostics = critical_bernoulli(100, [10, 100])
    assert np.exp(potential.values).sum() == approx(1.0)
    assert len(diagnostics["entropy_partial_sums"]) == 2


def test_truncation():
    model = CriticalBernoulliModel(50)
    assert model.truncation(5).symbols.labels == (2, 3, 4, 5)
    assert model.half(5) == 2
    assert model.half(3) is None
    assert not model.is_finite


def test_config():
    assert load_model({"type": "critical_bernoulli", "K": 20}).K == 20
    with pytest.raises(ConfigError):
        load_model({"type": "critical_bernoulli", "K": 2})
    with pytest.raises(ConfigError):
        load_model({"type": "critical_bernoulli", "K": 1.5})
