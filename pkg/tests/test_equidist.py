import math

import numpy as np
import pytest
from pytest import approx
from pytest import mark

from thermoshift.equidist import WindowTransfer
from thermoshift.equidist import choose_method
from thermoshift.equidist import equidist_diagnostics
from thermoshift.equidist import mobius
from thermoshift.equidist import orbit_count
from thermoshift.equidist import orbit_empirical
from thermoshift.equidist import weighted_periodic_measure
from thermoshift.errors import CapExceeded
from thermoshift.errors import ConfigError
from thermoshift.logger import ThermoshiftWarning
from thermoshift.models.bowen_series import BowenSeriesModel
from thermoshift.models.explicit import ExplicitModel
from thermoshift.models.gauss import GaussModel
from thermoshift.shift import TransitionStructure
from thermoshift.shift import necklaces

GOLDEN_RATIO = (1 + math.sqrt(5)) / 2


@pytest.fixture
def golden():
    return ExplicitModel.from_config({"type": "explicit", "matrix": "golden_mean"})


@pytest.fixture(scope="module")
def gauss():
    return GaussModel(K=30)


@mark.parametrize('k,expected', [(1, 1), (2, -1), (3, -1), (4, 0), (6, 1), (12, 0), (30, -1)])
def test_mobius(k, expected):
    assert mobius(k) == expected


@mark.parametrize('n', range(1, 9))
def test_orbit_count_matches_necklaces(n):
    T = TransitionStructure([0, 1, 2], [[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert orbit_count(T, n) == len(necklaces(T, n))


def test_orbit_count_full():
    assert orbit_count(TransitionStructure.full(range(30)), 12) == 44286750060889660


def test_orbit_empirical():
    assert orbit_empirical((1, 2)).weights == {(1,): 0.5, (2,): 0.5}
    assert orbit_empirical((1, 2), q=2).weights == {(1, 2): 0.5, (2, 1): 0.5}
    doubled = orbit_empirical((1, 2), n=4, q=3)
    assert doubled.weights == {(1, 2, 1): 0.5, (2, 1, 2): 0.5}
    assert doubled.marginal(1).weights == {(1,): 0.5, (2,): 0.5}
    with pytest.raises(ConfigError):
        orbit_empirical((1, 2), n=3)


def test_gauss_periodic_orbits():
    model = GaussModel(digits=[1, 2])
    measure = weighted_periodic_measure(model, 2)
    assert [orbit.word for orbit in measure.orbits] == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert [orbit.prime_period for orbit in measure.orbits] == [1, 2, 2, 1]
    assert all(orbit.exact for orbit in measure.orbits)
    assert float(measure.orbits[1].point) == approx(math.sqrt(3) - 1)
    assert math.exp(measure.orbits[1].log_weight[0]) == approx(1 / (2 + math.sqrt(3)) ** 2)
    assert measure.weights.sum() == approx(1.0)
    assert measure.n_orbits == 3
    assert measure.orbits[1].as_dict()["point"]["D"] == 12


def test_golden_orbits_uniform(golden):
    measure = weighted_periodic_measure(golden, 6)
    assert len(measure) == 18
    assert measure.log_normalizer == approx(math.log(18))
    assert measure.log_weight_spread == approx(0.0)
    assert measure.empirical(1).total == approx(1.0)


def test_eta_identity(golden):
    measure = weighted_periodic_measure(golden, 7)
    psi = golden.observable("symbol:0")
    values, weights = measure.eta(psi)
    assert weights.sum() == approx(1.0)
    assert measure.integral(psi) == approx(float(np.dot(values, weights)))


def test_golden_orbits_match_transfer(golden):
    orbits = equidist_diagnostics(golden, "symbol:0", [4, 6, 9], method="orbits")
    transfer = equidist_diagnostics(golden, "symbol:0", [4, 6, 9], method="transfer")
    for n in (4, 6, 9):
        assert orbits.row(n)["integral"] == approx(transfer.row(n)["integral"], abs=1e-9)
        assert orbits.row(n)["log_normalizer"] == approx(transfer.row(n)["log_normalizer"], abs=1e-9)
    parry = GOLDEN_RATIO ** 2 / (GOLDEN_RATIO ** 2 + 1)
    assert transfer.target == approx(parry)
    assert transfer.row(9)["n_orbits"] == orbit_count(golden.truncation(), 9)


def test_bowen_series_orbits_match_transfer():
    model = BowenSeriesModel(2, 2)
    orbits = equidist_diagnostics(model, "cusp", [3, 4], method="orbits")
    transfer = equidist_diagnostics(model, "cusp", [3, 4], method="transfer")
    assert orbits.row(4)["integral"] == approx(transfer.row(4)["integral"], abs=1e-9)
    assert orbits.supported and transfer.supported


def test_gauss_digit_equidistribution(gauss):
    report = equidist_diagnostics(gauss, "digit:1", [4, 12], q=3, method="transfer")
    assert report.m == 3
    assert report.oracle == approx(math.log2(4 / 3))
    assert report.row(12)["integral"] == approx(0.415037, abs=0.02)
    assert report.row(12)["abs_error"] < report.row(4)["abs_error"]
    assert report.row(12)["n_orbits"] == orbit_count(gauss.truncation(), 12)


def test_gauss_x_equidistribution(gauss):
    report = equidist_diagnostics(gauss, "x:3", [4, 12], q=3, method="transfer")
    assert report.row(12)["integral"] == approx(1 / math.log(2) - 1, abs=0.02)
    assert report.row(12)["abs_error"] < report.row(4)["abs_error"]
    assert set(report.as_dict()) >= {"rows", "target", "oracle", "monotone", "supported"}


def test_gauss_orbits_cap(gauss):
    with pytest.raises(CapExceeded):
        equidist_diagnostics(gauss, "digit:1", [8], method="orbits")


def test_choose_method(gauss):
    T = gauss.truncation()
    assert choose_method(T, [2, 3]) == "orbits"
    assert choose_method(T, [2, 4]) == "transfer"
    assert choose_method(T, [2, 4], "orbits") == "orbits"
    with pytest.raises(ConfigError):
        choose_method(T, [2], "exhaustive")


def test_not_primitive_warns():
    model = ExplicitModel.from_config({"type": "explicit", "matrix": [[0, 1], [1, 0]]})
    with pytest.warns(ThermoshiftWarning, match="not primitive"):
        report = equidist_diagnostics(model, "symbol:0", [2, 4], method="orbits")
    assert not report.supported
    assert report.row(2)["integral"] == approx(0.5)
    assert report.row(4)["abs_error"] == approx(0.0, abs=1e-9)


def test_window_transfer_key_cap(gauss):
    with pytest.raises(CapExceeded):
        WindowTransfer(gauss, gauss.observable("digit:1"), 12, 3, "representative", key_cap=100)


def test_invalid_n(golden):
    with pytest.raises(ConfigError):
        equidist_diagnostics(golden, "symbol:0", [0, 2])
