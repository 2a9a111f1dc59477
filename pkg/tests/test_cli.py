import csv
import json
import math
import sys
from collections import namedtuple
from io import StringIO

import pytest
from pytest import approx

from thermoshift import __version__
from thermoshift.cli import make_parser
from thermoshift.cli import run_command
from thermoshift.logger import Logger

pytest_plugins = 'pytester',

COIN = {"type": "explicit", "probabilities": [0.5, 0.5]}
GOLDEN = {"type": "explicit", "matrix": "golden_mean"}
DEFECT = {"type": "explicit", "phi": [-2 * math.log(k + 1) for k in range(8)], "tail": {"kind": "power", "exponent": 2}}


@pytest.fixture
def testdir(testdir, monkeypatch):
    return namedtuple('testdir', 'tmpdir,run')(
        testdir.tmpdir,
        lambda bin, *args: testdir.run(bin+".exe" if sys.platform == "win32" else bin, *args))


@pytest.fixture
def stream():
    return StringIO()


@pytest.fixture
def run(tmp_path, stream):
    def run(command, descriptor, *args):
        config = tmp_path / "config.json"
        config.write_text(json.dumps(descriptor))
        argv = [command, "--config", str(config), "--out", str(tmp_path / "out")] + list(args)
        return run_command(argv, Logger(Logger.NORMAL, file=stream))
    return run


def read_manifest(tmp_path, command):
    return json.loads((tmp_path / "out" / ("%s.json" % command)).read_text())


def read_csv(tmp_path, command):
    with (tmp_path / "out" / ("%s.csv" % command)).open(newline='') as fh:
        return list(csv.DictReader(fh))


def test_help(testdir):
    result = testdir.run('thermoshift', '--help')
    result.stdout.fnmatch_lines([
        "usage: thermoshift *",
        "",
        "Thermodynamic formalism on countable Markov shifts.",
        "",
        "option*:",
        "  -h [COMMAND], --help [COMMAND]",
        "                        Display help and exit.",
        "*",
        "commands:",
        "*",
        "    help                Display help and exit.",
        "    pressure            Pressure of beta*phi*",
        "*",
        "    beta-inf            Summability exponent*",
    ])
    assert result.ret == 0


@pytest.mark.parametrize('args', ['pressure --help', 'help pressure'])
def test_help_pressure(capsys, args):
    assert run_command(args.split()) == 0
    out = capsys.readouterr().out
    assert out.startswith("usage: thermoshift pressure [-h] --config PATH")
    for option in ("--out DIR", "--threads NUM", "--p LEVEL", "--coding CODING", "--beta BETA", "--observable SPEC"):
        assert option in out
    assert "thermoshift pressure --config gauss.json --p 64 --q 2" in out


def test_version(capsys):
    assert run_command(['--version']) == 0
    assert capsys.readouterr().out.strip() == "thermoshift %s" % __version__


def test_no_command(capsys):
    assert run_command([]) == 2
    assert "usage: thermoshift" in capsys.readouterr().err


def test_missing_config(capsys):
    assert run_command(['pressure']) == 2
    assert "--config" in capsys.readouterr().err


def test_invalid_flag(capsys):
    assert run_command(['pressure', '--config', 'x.json', '--p', '0']) == 2
    assert "--p must be at least 1" in capsys.readouterr().err


def test_commands():
    parser = make_parser()
    assert sorted(parser.commands_dispatch) == [
        "beta-inf", "defect-test", "dimension", "equidist", "gibbs-check", "help", "ldp-periodic", "ldp-rate",
        "ldp-sample", "pressure",
    ]


def test_beta_inf(run, tmp_path):
    assert run("beta-inf", {"type": "gauss"}) == 0
    manifest = read_manifest(tmp_path, "beta-inf")
    assert manifest["command"] == "beta-inf"
    assert manifest["version"] == __version__
    assert manifest["results"]["beta_infinity"] == approx(0.5, abs=1e-6)
    assert manifest["results"]["tail"] == {"kind": "power", "exponent": 2.0, "constant": 1.0}
    assert manifest["files"] == ["beta-inf.csv", "beta-inf.json"]
    assert manifest["seed"] is None
    assert set(manifest["machine_info"]) >= {"python_version", "cpu"}
    rows = read_csv(tmp_path, "beta-inf")
    assert float(rows[0]["beta_infinity"]) == approx(0.5, abs=1e-6)


def test_pressure(run, tmp_path):
    assert run("pressure", COIN, "--observable", "symbol:1") == 0
    manifest = read_manifest(tmp_path, "pressure")
    results = manifest["results"]
    assert results["pressure"] == approx(0.0, abs=1e-10)
    assert results["delta"] == 0.0
    assert results["derivative"] == approx(0.5)
    assert results["cross_check_ok"]
    assert manifest["parameters"]["p"] == 1
    assert manifest["config"]["params"]["observable"] == "symbol:1"
    assert manifest["config"]["params"]["threads"] >= 1
    rows = read_csv(tmp_path, "pressure")
    assert list(rows[0]) == ["p", "q", "beta", "pressure", "delta", "lower", "upper", "cross_check"]
    assert len(rows) == 1


def test_pressure_config_params(run, tmp_path):
    config = {"schema": 1, "model": GOLDEN, "params": {"beta": 2.0, "q": 2}}
    assert run("pressure", config, "--beta", "1") == 0
    manifest = read_manifest(tmp_path, "pressure")
    assert manifest["results"]["beta"] == 1.0
    assert manifest["results"]["q"] == 2
    assert manifest["results"]["pressure"] == approx(math.log((1 + math.sqrt(5)) / 2), abs=1e-9)


def test_gibbs_check(run, tmp_path):
    assert run("gibbs-check", GOLDEN, "--n-max", "4") == 0
    results = read_manifest(tmp_path, "gibbs-check")["results"]
    assert 1 <= results["certificate"]["c"] < 10
    assert results["functionals"]["h"] == approx(math.log((1 + math.sqrt(5)) / 2), abs=1e-9)
    assert len(read_csv(tmp_path, "gibbs-check")) == 4


def test_dimension(run, tmp_path):
    assert run("dimension", {"type": "explicit", "phi": [-math.log(3), -math.log(3)]}, "--tol", "1e-8") == 0
    rows = read_csv(tmp_path, "dimension")
    assert float(rows[0]["dimension"]) == approx(math.log(2) / math.log(3), abs=1e-7)


def test_equidist(run, tmp_path):
    assert run("equidist", GOLDEN, "--n", "4..6", "--observable", "symbol:0", "--method", "orbits") == 0
    rows = read_csv(tmp_path, "equidist")
    assert [int(row["n"]) for row in rows] == [4, 5, 6]
    parry = (3 + math.sqrt(5)) / (5 + math.sqrt(5))
    assert float(rows[-1]["target"]) == approx(parry)


def test_ldp_rate(run, tmp_path):
    assert run("ldp-rate", COIN, "--observable", "symbol:1", "--s-grid", "0.2:0.8:7", "--t-grid", "-5:5:201") == 0
    manifest = read_manifest(tmp_path, "ldp-rate")
    assert manifest["parameters"]["s_grid"] == [0.2, 0.8, 7]
    assert manifest["results"]["convex"]
    assert manifest["results"]["rate"]["minimizer_s"] == approx(0.5)
    rows = read_csv(tmp_path, "ldp-rate")
    assert len(rows) >= 7
    assert float(rows[-1]["rate"]) == approx(0.8 * math.log(1.6) + 0.2 * math.log(0.4), rel=1e-3)


def test_ldp_periodic(run, tmp_path):
    assert run("ldp-periodic", COIN, "--observable", "symbol:1", "--threshold", "0.7", "--n", "16") == 0
    rows = read_csv(tmp_path, "ldp-periodic")
    assert float(rows[0]["estimate"]) == approx(-math.log(2517 / 2 ** 16) / 16)
    assert float(rows[0]["target_rate"]) == approx(0.7 * math.log(1.4) + 0.3 * math.log(0.6), rel=2e-3)


def test_ldp_sample(run, tmp_path):
    assert run("ldp-sample", COIN, "--observable", "symbol:1", "--threshold", "0.7", "--n", "20",
               "--count", "2000", "--seed", "5") == 0
    manifest = read_manifest(tmp_path, "ldp-sample")
    assert manifest["seed"] == 5
    assert manifest["results"]["estimates"][0]["count"] == 2000
    rows = read_csv(tmp_path, "ldp-sample")
    assert list(rows[0]) == ["n", "estimate", "ci_low", "ci_high", "target_rate"]


def test_ldp_sample_needs_seed(run, stream):
    assert run("ldp-sample", COIN, "--observable", "symbol:1", "--threshold", "0.7") == 2
    assert "error[config-error]: Sampling commands need a seed" in stream.getvalue()


def test_ldp_rate_needs_observable(run, stream):
    assert run("ldp-rate", COIN) == 2
    assert "needs an observable" in stream.getvalue()


def test_defect_test(run, tmp_path):
    assert run("defect-test", DEFECT, "--p", "4", "--delta", "0.2", "--seed", "0", "--count", "5") == 0
    manifest = read_manifest(tmp_path, "defect-test")
    assert manifest["results"]["summary"]["trials"] == 5
    assert manifest["results"]["summary"]["violations"] == 0
    rows = read_csv(tmp_path, "defect-test")
    assert [row["trial"] for row in rows] == ["0", "1", "2", "3", "4"]
    assert all(row["holds"] == "true" for row in rows)


def test_unknown_model(run, stream):
    assert run("pressure", {"type": "hyperbolic"}) == 2
    assert "error[config-error]: Unknown model type 'hyperbolic'" in stream.getvalue()


def test_unknown_param(run, stream):
    assert run("pressure", {"schema": 1, "model": COIN, "params": {"temperature": 3}}) == 2
    assert "Unknown parameter(s): temperature" in stream.getvalue()


def test_not_summable(run, stream):
    assert run("pressure", {"type": "gauss", "K": 8}, "--beta", "0.4") == 3
    assert "error[not-summable]" in stream.getvalue()


def test_cap_exceeded(run, stream):
    assert run("equidist", {"type": "gauss", "K": 30}, "--n", "8", "--method", "orbits") == 4
    assert "error[cap-exceeded]" in stream.getvalue()


def test_output_is_a_file(tmp_path, stream):
    config = tmp_path / "config.json"
    config.write_text(json.dumps(COIN))
    assert run_command(["pressure", "--config", str(config), "--out", str(config)],
                       Logger(Logger.NORMAL, file=stream)) == 5
    assert "error[io-error]" in stream.getvalue()
