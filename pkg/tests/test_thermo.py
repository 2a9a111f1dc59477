import math

import numpy as np
import pytest
from numpy.random import Generator
from numpy.random import Philox
from numpy.random import SeedSequence
from pytest import approx
from pytest import mark

from thermoshift.errors import NonConvergence
from thermoshift.errors import NotPrimitive
from thermoshift.errors import NotSummable
from thermoshift.models.explicit import ExplicitModel
from thermoshift.models.gauss import GaussModel
from thermoshift.models.gauss import gauss_integral_oracle
from thermoshift.potential import induce_block_potential
from thermoshift.tails import PowerTail
from thermoshift.thermo import binary_entropy
from thermoshift.thermo import block_alphabet
from thermoshift.thermo import dirichlet_measure
from thermoshift.thermo import gibbs_certificate
from thermoshift.thermo import gibbs_measure
from thermoshift.thermo import measure_functionals
from thermoshift.thermo import power_iterate
from thermoshift.thermo import pressure
from thermoshift.thermo import transfer_perron
from thermoshift.thermo import truncated_pressure

LN2 = math.log(2)
GOLDEN_RATIO = (1 + math.sqrt(5)) / 2


@pytest.fixture
def coin():
    return ExplicitModel.from_config({"type": "explicit", "probabilities": [0.5, 0.5]})


@pytest.fixture
def golden():
    return ExplicitModel.from_config({"type": "explicit", "matrix": "golden_mean"})


@pytest.fixture(scope="module")
def gauss():
    return GaussModel(K=64)


@pytest.fixture(scope="module")
def gauss_pressure(gauss):
    return pressure(gauss, 1.0, p=64, q=2, coding="window")


def test_power_iterate():
    matrix = np.array([[2.0, 1.0], [1.0, 2.0]])
    value, vector, iterations = power_iterate(lambda v: matrix @ v, 2)
    assert value == approx(3.0)
    assert vector == approx([0.5, 0.5])
    assert iterations >= 1


def test_power_iterate_nonconvergence():
    matrix = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(NonConvergence) as excinfo:
        power_iterate(lambda v: matrix @ (v * [1.0, 2.0]), 2, max_iter=50)
    assert excinfo.value.iterations == 50


def test_coin_pressure(coin):
    result = pressure(coin)
    assert result.pressure == approx(0.0, abs=1e-12)
    assert result.delta == 0.0
    assert result.cross_check == approx(0.0, abs=1e-12)
    assert result.cross_check_ok
    assert result.as_dict()["states"] == 2


@mark.parametrize('q', [1, 2, 3])
@mark.parametrize('coding', ["block", "window"])
def test_golden_pressure(golden, q, coding):
    result = pressure(golden, q=q, coding=coding)
    assert result.pressure == approx(math.log(GOLDEN_RATIO), abs=1e-10)
    assert result.lower == result.upper == result.pressure


def test_golden_not_primitive_rejected():
    model = ExplicitModel.from_config({"type": "explicit", "matrix": [[0, 1], [1, 0]]})
    with pytest.raises(NotPrimitive):
        pressure(model)
    result = pressure(model, require_primitive=False)
    assert result.pressure == approx(0.0, abs=1e-9)


def test_beta_scaling(coin):
    result = pressure(coin, beta=2.0)
    assert result.pressure == approx(-LN2)
    assert result.beta == 2.0


def test_derivative(coin):
    result = pressure(coin, observable=coin.observable("symbol:1"))
    assert result.derivative == approx(0.5)
    assert result.observable == "symbol:1"


def test_gauss_pressure(gauss_pressure):
    assert gauss_pressure.pressure == approx(-0.00162, abs=5e-4)
    assert gauss_pressure.delta <= 0.03
    assert gauss_pressure.p_half == 32
    assert gauss_pressure.lower <= gauss_pressure.pressure <= gauss_pressure.upper
    assert gauss_pressure.cross_check_n == 2


def test_gauss_not_summable(gauss):
    with pytest.raises(NotSummable) as excinfo:
        pressure(gauss, beta=0.4, p=8)
    assert excinfo.value.beta_infinity == approx(0.5, abs=1e-5)
    assert excinfo.value.exit_code == 3
    assert pressure(gauss, beta=0.4, p=8, allow_divergent=True).pressure > 0


def test_truncated_pressure_increases(gauss):
    values = [truncated_pressure(gauss, 1.0, p, 2, "window", "representative")[0] for p in (4, 8, 16)]
    assert values[0] < values[1] < values[2] < 0


def test_gibbs_measure_golden(golden):
    result = pressure(golden)
    mu = gibbs_measure(result._block, perron=result._perron)
    parry = (1 + math.sqrt(5)) ** 2
    assert mu.stationary[0] == approx(parry / (parry + 4))
    assert mu.rows.toarray() == approx(np.array([[1 / GOLDEN_RATIO, 1 / GOLDEN_RATIO ** 2], [1.0, 0.0]]))
    assert mu.entropy() == approx(math.log(GOLDEN_RATIO))


def test_gibbs_certificate_golden(golden):
    result = pressure(golden)
    mu = gibbs_measure(result._block, perron=result._perron)
    certificate = gibbs_certificate(mu, result._block, result.pressure, 8)
    assert certificate.c == approx(math.sqrt(5))
    assert certificate.running == approx([math.sqrt(5)] * 8)
    assert certificate.n_checked == 8
    assert certificate.side in ("upper", "lower")


def test_gibbs_certificate_coin(coin):
    result = pressure(coin)
    mu = gibbs_measure(result._block)
    certificate = gibbs_certificate(mu, result._block, result.pressure, 6)
    assert certificate.c == approx(1.0)
    assert certificate.as_dict()["n_checked"] == 6


def test_functionals_coin(coin):
    result = pressure(coin)
    mu = gibbs_measure(result._block)
    functionals = measure_functionals(mu, coin.potential, result.pressure)
    h, integral, F = functionals
    assert h == approx(LN2)
    assert integral == approx(-LN2)
    assert F == approx(0.0, abs=1e-12)


def test_gauss_functionals(gauss, gauss_pressure):
    mu = gibbs_measure(gauss_pressure._block, perron=gauss_pressure._perron)
    functionals = measure_functionals(mu, gauss.potential, gauss_pressure.pressure)
    assert functionals.h == approx(2.3731, rel=0.1)
    assert abs(functionals.F) <= 0.03
    assert functionals.integral_lower <= functionals.integral <= functionals.integral_upper
    half = pressure(gauss, 1.0, p=32, q=2, coding="window")
    coarse = measure_functionals(gibbs_measure(half._block, perron=half._perron), gauss.potential, half.pressure)
    assert coarse.h < functionals.h


def worst_gibbs_ratio(mu, potential, P, n_max):
    """Largest of μ[ω]/exp(S_nφ − nP) and its inverse over window cylinders, using exact brackets of S_nφ."""
    worst = 0.0
    paths = [((a,), math.log(mu.stationary[a])) for a in range(mu.size) if mu.stationary[a] > 0]
    for n in range(1, n_max + 1):
        for path, log_mass in paths:
            digits = mu.symbols.word(mu.words[path[0]]) + tuple(mu.symbols.label(mu.words[a, -1]) for a in path[1:])
            lower, upper = potential.birkhoff_bounds(digits, n)
            worst = max(worst, log_mass - lower + n * P, upper - n * P - log_mass)
        if n < n_max:
            paths = [(path + (b,), log_mass + math.log(mu.rows[path[-1], b]))
                     for path, log_mass in paths for b in mu.rows[path[-1]].indices]
    return math.exp(worst)


def test_gauss_certificate_covers_cylinders(gauss):
    result = pressure(gauss, 1.0, p=8, q=2, coding="window")
    mu = gibbs_measure(result._block, perron=result._perron)
    certificate = gibbs_certificate(mu, result._block, result.pressure, 5)
    assert 1 <= certificate.c < math.inf
    assert certificate.running == sorted(certificate.running)
    assert worst_gibbs_ratio(mu, gauss.potential, result.pressure, 3) <= certificate.c * (1 + 1e-9)


def test_gauss_certificate_p30(gauss):
    result = pressure(gauss, 1.0, p=30, q=2, coding="window")
    mu = gibbs_measure(result._block, perron=result._perron)
    certificate = gibbs_certificate(mu, result._block, result.pressure, 6)
    assert certificate.n_checked == 6
    assert len(certificate.running) == 6
    assert certificate.c == certificate.running[-1] < math.inf
    assert worst_gibbs_ratio(mu, gauss.potential, result.pressure, 2) <= certificate.running[1] * (1 + 1e-9)
    assert len(certificate.cylinder) <= 6


def test_gauss_digit_one_mass(gauss):
    result = pressure(gauss, 1.0, p=30, q=1)
    mu = gibbs_measure(result._block, perron=result._perron)
    assert mu.symbol_marginal()[0] == approx(gauss_integral_oracle((1,)), abs=0.02)
    assert gauss_integral_oracle((1,)) == approx(math.log(4 / 3) / LN2)


@mark.parametrize('descriptor', [
    {"type": "explicit", "phi": [0.0, -1.0, -2.0, -0.5]},
    {"type": "explicit", "matrix": "golden_mean"},
])
def test_variational_inequality(descriptor):
    model = ExplicitModel.from_config(descriptor)
    result = pressure(model)
    T = model.truncation()
    for index in range(20):
        mu = dirichlet_measure(T, Generator(Philox(SeedSequence([7, index]))))
        assert measure_functionals(mu, model.potential, result.pressure).F <= 1e-12
    gibbs = gibbs_measure(result._block, perron=result._perron)
    assert measure_functionals(gibbs, model.potential, result.pressure).F == approx(0.0, abs=1e-10)


def test_block_alphabet(golden):
    Phi = induce_block_potential(golden.potential, 2, golden.truncation(), "block")
    T, phi = block_alphabet(Phi)
    assert T.symbols.labels == ((0, 0), (0, 1), (1, 0))
    assert phi.locally_constant
    assert not T.allowed_labels((0, 1), (1, 0))


def test_transfer_perron_normalized(golden):
    Phi = induce_block_potential(golden.potential, 2, golden.truncation(), "window")
    perron = transfer_perron(Phi)
    assert np.dot(perron.left, perron.right) == approx(1.0)
    assert (perron.left > 0).all() and (perron.right > 0).all()


@mark.parametrize('c,expected', [(0.0, 0.0), (1.0, 0.0), (0.5, LN2)])
def test_binary_entropy(c, expected):
    assert binary_entropy(c) == approx(expected)


def test_pressure_with_tail():
    model = ExplicitModel([0.0, -2 * math.log(2), -2 * math.log(3)], tail=PowerTail(2.0))
    result = pressure(model)
    assert result.pressure == approx(math.log(1 + 1 / 4 + 1 / 9))
    assert result.p_half == 1
    assert result.delta == approx(result.pressure - math.log(1 + 1 / 4))
