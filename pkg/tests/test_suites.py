import json

import pytest

from anderson_forge.suites import SUITES, SuiteConfig, default_seed, expand, run_suite


@pytest.mark.parametrize("suite", SUITES)
def test_every_suite_expands(suite):
    checks = expand(suite, SuiteConfig())
    assert checks and len({name for name, _, _ in checks}) == len(checks)


def test_unknown_suite():
    with pytest.raises(ValueError):
        expand("nope", SuiteConfig())


def test_filters_narrow_expansion():
    full = expand("conjugation", SuiteConfig(trials=1))
    narrow = expand("conjugation", SuiteConfig(trials=1, r=3, n=1))
    assert len(narrow) == 2 < len(full)
    assert all("r=3 n=1" in name for name, _, _ in narrow)


def test_seed_from_environment(monkeypatch):
    monkeypatch.delenv("ANDERSON_FORGE_SEED", raising=False)
    assert default_seed() == 0
    monkeypatch.setenv("ANDERSON_FORGE_SEED", "17")
    assert default_seed() == 17
    monkeypatch.setenv("ANDERSON_FORGE_SEED", "seventeen")
    with pytest.raises(ValueError):
        default_seed()


@pytest.mark.parametrize(
    "suite,cfg",
    [
        ("omega-feq", SuiteConfig(n=1)),
        ("exterior", SuiteConfig(r=2)),
        ("asp", SuiteConfig(r=2, n=1)),
        ("dp-oracle", SuiteConfig(flavor="En", r=2, n=1)),
        ("conjugation", SuiteConfig(r=2, n=1, trials=1)),
    ],
)
def test_small_runs_pass(suite, cfg):
    rep = run_suite(suite, cfg)
    assert rep.passed, [c for c in rep.checks if not c.passed]


def test_report_json_and_parallel_determinism():
    cfg = SuiteConfig(r=2, seed=5)
    serial = run_suite("sigma-oracle", cfg)
    parallel = run_suite("sigma-oracle", cfg, jobs=2)
    a, b = serial.to_json(), parallel.to_json()
    assert a == b and "runtime_s" not in a
    assert "runtime_s" in serial.to_json(timing=True)
    json.dumps(a)


def test_failing_check_is_reported_not_raised(monkeypatch):
    import anderson_forge.suites as S

    def boom(cfg, r, seed):
        raise S.ForgeError("synthetic")

    monkeypatch.setattr(S, "chk_exterior", boom)
    rep = run_suite("exterior", SuiteConfig(r=2))
    assert not rep.passed and "synthetic" in rep.checks[0].detail
