import json

import pytest
from click.testing import CliRunner

from anderson_forge.cli import main


@pytest.fixture
def run():
    runner = CliRunner()

    def _run(*args):
        return runner.invoke(main, list(args))

    return _run


def payload(res):
    assert res.exit_code == 0, res.output
    return json.loads(res.stdout)


def test_pitilde(run):
    out = payload(run("compute", "pitilde", "--q", "2", "--m", "1", "--s", "1", "--prec", "200"))
    assert out["ord_v"] == -4 and out["value"]["prec"] == 200


def test_polylog_matches_log(run):
    a = payload(run("compute", "polylog", "--n", "1", "--alpha", "1/θ"))
    b = payload(run("compute", "log", "--module", "carlitz", "--point", "1/θ"))
    assert a["value"]["digits"] == b["value"][0]["digits"]


def test_omega_degree_zero(run):
    out = payload(run("compute", "omega", "--D", "0"))
    assert len(out["coefficients"]) == 1


@pytest.mark.parametrize(
    "args",
    [
        ("compute", "exp", "--module", "Gn", "--r", "2", "--point", "1/theta,0,1/theta^2"),
        ("compute", "log", "--module", "carlitz-power", "--n", "2", "--point", "0,1/theta"),
        ("compute", "agf", "--module", "drinfeld", "--coeffs", "1,theta", "--point", "1/theta", "--D", "4"),
        ("compute", "quasilog", "--fixture", "cm", "--m", "2", "--s", "0", "--point", "1/theta", "--i", "1"),
        ("compute", "period-matrix", "--m", "2", "--s", "0", "--prec", "80"),
        ("compute", "phi", "--kind", "En", "--r", "3", "--n", "1"),
        ("compute", "psi", "--kind", "Gn", "--n", "1", "--m", "2", "--s", "0", "--D", "4"),
        ("compute", "gh", "--flavor", "En", "--alpha", "1/theta,0,0", "--D", "4"),
        ("compute", "dp", "--flavor", "Gn", "--a", "t^2+1"),
    ],
)
def test_compute_commands(run, args):
    out = payload(run(*args))
    assert out["command"] == args[1]


def test_quasilog_routes_agree(run):
    out = payload(run("compute", "quasilog", "--fixture", "cm", "--m", "2", "--s", "0", "--point", "1/theta", "--i", "0"))
    assert out["routes_agree"] is True


def test_dp_commutes(run):
    assert payload(run("compute", "dp", "--flavor", "En", "--n", "2", "--a", "t+1"))["commutes"] is True


@pytest.mark.parametrize("fmt", ["csv", "table"])
def test_other_formats(run, fmt):
    res = run("compute", "pitilde", "--format", fmt)
    assert res.exit_code == 0 and "ord_v" in res.stdout


def test_out_file(run, tmp_path):
    path = tmp_path / "o.json"
    res = run("compute", "pitilde", "--out", str(path))
    assert res.exit_code == 0 and res.stdout == ""
    assert json.loads(path.read_text())["command"] == "pitilde"


@pytest.mark.parametrize(
    "args",
    [
        ("compute", "pitilde", "--p", "3", "--q", "2"),
        ("compute", "pitilde", "--q", "6"),
        ("compute", "polylog", "--alpha", "foo"),
        ("compute", "polylog", "--alpha", "1/(theta-theta)"),
        ("compute", "period-matrix", "--m", "1"),
        ("compute", "omega", "--D", "-1"),
        ("verify", "nonsense"),
    ],
)
def test_usage_errors_exit_2(run, args):
    assert run(*args).exit_code == 2


def test_computation_errors_exit_3(run):
    res = run("compute", "exp", "--module", "Gn", "--r", "1", "--point", "1")
    assert res.exit_code == 3 and "UnsupportedRank" in res.stderr


def test_verify_examples(run):
    for args in (("conjugation", "--r", "3", "--n", "2"), ("end-to-end", "--flavor", "Gn", "--n", "1"),
                 ("difference-eq", "--fixture", "carlitz")):
        out = payload(run("verify", *args))
        assert out["pass"] is True and "runtime_s" not in out["suites"][0]


def test_verify_is_deterministic_and_timing_optional(run):
    a = run("verify", "sigma-oracle", "--r", "2").stdout
    b = run("verify", "sigma-oracle", "--r", "2", "--jobs", "2").stdout
    assert a == b
    t = payload(run("verify", "exterior", "--timing"))
    assert "runtime_s" in t["suites"][0]


def test_verify_motive_file(run, tmp_path):
    path = tmp_path / "mot.json"
    assert run("compute", "psi", "--fixture", "carlitz", "--D", "6", "--out", str(path)).exit_code == 0
    assert payload(run("verify", "difference-eq", "--motive", str(path)))["pass"] is True
    obj = json.loads(path.read_text())
    obj["motive"]["Psi"][0][0]["coeffs"][2]["coeffs"][0][0] ^= 1
    path.write_text(json.dumps(obj))
    res = run("verify", "difference-eq", "--motive", str(path))
    assert res.exit_code == 1 and json.loads(res.stdout)["pass"] is False
    path.write_text("{not json")
    assert run("verify", "difference-eq", "--motive", str(path)).exit_code == 2


def test_failing_suite_exits_1(run, monkeypatch):
    import anderson_forge.suites as S

    monkeypatch.setattr(S, "chk_exterior", lambda cfg, r, seed: (False, 3, "forced"))
    res = run("verify", "exterior")
    assert res.exit_code == 1 and json.loads(res.stdout)["pass"] is False


def test_bad_seed(run, monkeypatch):
    monkeypatch.setenv("ANDERSON_FORGE_SEED", "x")
    assert run("verify", "exterior").exit_code == 2
