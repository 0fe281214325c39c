import pytest

from fermigroupoid.suites import SUITES, CheckResult, SuiteOptions, _Recorder, run_suite


@pytest.mark.parametrize("selector", sorted(SUITES))
def test_every_suite_passes_at_small_size(selector):
    rep = run_suite(selector, SuiteOptions(seed=3, sites=6, samples=20))
    assert rep.passed, [r for r in rep.results if not r.passed]
    assert rep.results and all(r.cases > 0 for r in rep.results)


def test_reports_are_reproducible():
    a = run_suite("car", SuiteOptions(seed=5, samples=20)).to_dict()
    b = run_suite("car", SuiteOptions(seed=5, samples=20)).to_dict()
    assert [r["detail"] for r in a["results"]] == [r["detail"] for r in b["results"]]
    assert a["options"]["seed"] == 5 and a["options"]["pattern"] is None


def test_unknown_selector():
    with pytest.raises(KeyError):
        run_suite("nope")


def test_recorder_turns_exceptions_into_failures():
    rec = _Recorder("demo")
    rec.check("ok", lambda: (True, 3, "fine"))
    rec.check("boom", lambda: 1 / 0)
    assert rec.results[0] == CheckResult("demo", "ok", True, 3, "fine")
    assert not rec.results[1].passed and "ZeroDivisionError" in rec.results[1].detail
