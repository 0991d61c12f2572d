import pytest

from graphreps.fixtures import FIXTURE_NAMES, build_fixture, load_fixture
from graphreps.mcmc import CheckResult
from graphreps.suites import format_report, run_suite


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_bundled_fixture_files_match_builders(name):
    assert load_fixture(name) == build_fixture(name)


def test_halving_suite_passes():
    results = run_suite("halving", j=3)
    assert results and all(r.passed for r in results)


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")


def test_report_format():
    text = format_report([CheckResult("a", "pass", 0.5, {"x": 1.0}), CheckResult("b", "fail", -1.0)])
    lines = text.splitlines()
    assert lines[0].startswith("PASS") and "x=1" in lines[0]
    assert lines[1].startswith("FAIL")
