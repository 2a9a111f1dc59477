import math

import numpy as np
import pytest
from pytest import approx

from thermoshift.errors import ConfigError
from thermoshift.ldp import legendre
from thermoshift.ldp import level1_rate
from thermoshift.ldp import periodic_deviation_rate
from thermoshift.ldp import pressure_curve
from thermoshift.ldp import sample_empirical_deviation
from thermoshift.ldp import sample_sums
from thermoshift.logger import ThermoshiftWarning
from thermoshift.measure import MarkovMeasure
from thermoshift.models.explicit import ExplicitModel
from thermoshift.models.gauss import GaussModel
from thermoshift.potential import induce_block_potential
from thermoshift.thermo import gibbs_measure
from thermoshift.thermo import pressure

LN2 = math.log(2)
# I(0.7) for a fair coin
COIN_RATE = 0.7 * math.log(1.4) + 0.3 * math.log(0.6)


@pytest.fixture(scope="module")
def coin():
    return ExplicitModel.from_config({"type": "explicit", "probabilities": [0.5, 0.5]})


@pytest.fixture(scope="module")
def heads(coin):
    return coin.observable("symbol:1")


@pytest.fixture(scope="module")
def coin_curve(coin, heads):
    return pressure_curve(coin, heads, np.linspace(-5, 5, 1001))


@pytest.fixture(scope="module")
def coin_measure(coin):
    result = pressure(coin)
    return gibbs_measure(result._block, perron=result._perron)


def test_coin_curve(coin_curve):
    assert coin_curve.mean == approx(0.5)
    assert coin_curve.base == approx(0.0, abs=1e-12)
    t = np.asarray(coin_curve.grid)
    assert coin_curve.values == approx(np.log((1 + np.exp(t)) / 2), abs=1e-10)
    assert coin_curve.is_convex()
    assert coin_curve.spacing == approx(0.01)
    assert coin_curve.deltas[0] == 0.0


def test_curve_inserts_zero(coin, heads):
    curve = pressure_curve(coin, heads, [-1.0, 0.5, 2.0])
    assert list(curve.grid) == [-1.0, 0.0, 0.5, 2.0]
    assert curve.values[1] == 0.0


def test_legendre(coin_curve):
    value, index = legendre(coin_curve, 0.7)
    assert value == approx(COIN_RATE, rel=1e-4)
    assert coin_curve.grid[index] == approx(math.log(7 / 3), abs=0.01)
    assert legendre(coin_curve, 0.5)[0] == approx(0.0, abs=1e-12)


def test_level1_rate(coin_curve):
    rate = level1_rate(coin_curve, [0.2, 0.3, 0.4, 0.6, 0.7, 0.8])
    assert rate.minimizer_s == approx(0.5)
    assert rate(0.5) == approx(0.0, abs=1e-12)
    assert rate(0.7) == approx(COIN_RATE, rel=1e-4)
    assert rate.is_convex()
    assert not rate.endpoint
    assert rate.zeros == approx([0.5])
    with pytest.raises(KeyError):
        rate(0.71)


def test_level1_rate_endpoint_warns(coin_curve):
    with pytest.warns(ThermoshiftWarning, match="endpoint"):
        rate = level1_rate(coin_curve, np.linspace(0, 1, 11))
    assert rate(1.0) == approx(LN2, abs=0.01)
    assert rate(0.0) == approx(LN2, abs=0.01)
    assert rate.endpoint == [0.0, 1.0]


def test_level1_rate_refine(coin, heads):
    curve = pressure_curve(coin, heads, np.linspace(-2, 2, 41))
    rate = level1_rate(curve, [0.25, 0.4, 0.75], refine=True)
    assert rate.s_grid == approx([0.25, 0.4, 0.5, 0.75])
    plain = level1_rate(curve, [0.25, 0.4, 0.75], refine=False)
    assert list(plain.s_grid) == [0.25, 0.4, 0.75]
    assert plain.minimizer_s == 0.4


def test_gauss_rate():
    model = GaussModel(K=10)
    curve = pressure_curve(model, "digit:1", np.linspace(-5, 5, 501), q=2)
    assert curve.mean == approx(0.464, abs=0.005)
    value, index = legendre(curve, 0.9)
    assert value == approx(0.477366, rel=0.02)
    assert curve.grid[index] == approx(2.56, abs=0.1)
    assert all(delta is not None and delta > 0 for delta in curve.deltas)
    rates = periodic_deviation_rate(model, "digit:1", 0.9, [12], q=2, method="transfer")
    assert rates[0].rate == approx(value, rel=0.3)


def test_gauss_rate_minimizer():
    model = GaussModel(K=30)
    curve = pressure_curve(model, "digit:1", np.linspace(-5, 5, 501), q=1, estimate_error=False)
    s_grid = np.linspace(0.2, 0.7, 21)
    step = s_grid[1] - s_grid[0]
    oracle = model.target("digit:1")
    rate = level1_rate(curve, s_grid)
    assert len(rate.zeros) == 1
    assert abs(rate.minimizer_s - oracle) <= step
    assert rate.is_convex()
    plain = level1_rate(curve, s_grid, refine=False)
    assert len(plain.zeros) == 0
    assert abs(plain.minimizer_s - oracle) <= step


def test_sample_sums_threads(coin_measure, heads):
    serial = sample_sums(coin_measure, heads, 10, 10000, seed=3)
    threaded = sample_sums(coin_measure, heads, 10, 10000, seed=3, threads=3)
    assert np.array_equal(serial.sums, threaded.sums)
    assert len(serial.sums) == 10000
    assert serial.sums.min() >= 0 and serial.sums.max() <= 10
    assert serial.sums.mean() == approx(5.0, abs=0.1)


def test_sample_sums_respect_transitions(heads):
    rows = np.array([[0.5, 0.5], [1.0, 0.0]])
    mu = MarkovMeasure.from_rows([0, 1], rows)
    batch = sample_sums(mu, heads, 2, 5000, seed=0)
    # 1 → 1 is forbidden, so two steps never show two heads
    assert batch.sums.max() == 1


def test_sample_deviation(coin_measure, heads):
    estimate = sample_empirical_deviation(coin_measure, heads, 0.7, 40, 20000, seed=11)
    assert estimate.probability == approx(0.0082945, rel=0.25)
    assert estimate.rate == approx(0.119804, rel=0.1)
    low, high = estimate.rate_interval
    assert low <= estimate.rate <= high
    assert not estimate.lower_bound
    assert estimate.as_dict()["count"] == 20000


def test_sample_deviation_lower_bound(coin_measure, heads):
    estimate = sample_empirical_deviation(coin_measure, heads, 0.7, 200, 10 ** 5, seed=1)
    assert estimate.hits == 0
    assert estimate.lower_bound
    assert estimate.rate <= COIN_RATE
    assert estimate.rate_interval[1] == math.inf


def test_sample_coverage(coin_measure, heads):
    probability = 0.0576591
    covered = sum(
        sample_empirical_deviation(coin_measure, heads, 0.7, 20, 2000, seed=seed).proportion.covers(probability)
        for seed in range(100)
    )
    assert covered >= 88


def test_sample_validation(coin_measure, heads):
    with pytest.raises(ConfigError):
        sample_empirical_deviation(coin_measure, heads, 0.7, 20, 999, seed=0)
    with pytest.raises(ConfigError):
        sample_empirical_deviation(coin_measure, heads, 0.7, 20, 1000, seed=None)
    with pytest.raises(ConfigError):
        sample_empirical_deviation(coin_measure, heads, 0.7, 0, 1000, seed=0)


def test_sample_needs_unit_step(coin, heads):
    Phi = induce_block_potential(coin.potential.scaled(1.0), 2, coin.truncation(), "block")
    mu = gibbs_measure(Phi)
    with pytest.raises(ConfigError, match="step"):
        sample_sums(mu, heads, 4, 1000, seed=0)


def test_periodic_rate_orbits_and_transfer(coin, heads):
    expected = -math.log(2517 / 2 ** 16) / 16
    orbits = periodic_deviation_rate(coin, heads, 0.7, [16], method="orbits")
    transfer = periodic_deviation_rate(coin, heads, 0.7, [16], method="transfer")
    assert orbits[0].rate == approx(expected)
    assert transfer[0].rate == approx(expected)
    assert transfer[0].as_dict()["rate"] == approx(0.203721, abs=1e-6)


def test_periodic_rate_converges(coin, heads):
    rates = periodic_deviation_rate(coin, heads, 0.7, [64, 512], method="transfer")
    assert rates[1].rate == approx(COIN_RATE, rel=0.1)
    assert rates[0].rate > rates[1].rate > COIN_RATE


def test_periodic_rate_empty_event(coin, heads):
    rates = periodic_deviation_rate(coin, heads, 1.5, [8], method="transfer")
    assert rates[0].rate == math.inf
    rates = periodic_deviation_rate(coin, heads, 1.5, [8], method="orbits")
    assert rates[0].rate == math.inf


def test_periodic_rate_needs_integer_observable():
    model = GaussModel(K=4)
    with pytest.raises(ConfigError, match="integer"):
        periodic_deviation_rate(model, "x:2", 0.5, [8], method="transfer")
