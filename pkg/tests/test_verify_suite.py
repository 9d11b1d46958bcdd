import pytest

from services import extremal_lab
from services.errors import EXIT_CHECK_FAILED, EXIT_OK, InvalidInputError
from services.result_cache import ResultCache
from services.verify_suite import (
    CHECKS,
    CheckSpec,
    SUITE_CORE,
    SUITE_EXTREMAL,
    SUITE_FULL,
    SuiteResult,
    SuiteRunner,
    checks_for,
    parse_perturbations,
    run_suite,
)


def _check(check_id):
    return next(c for c in CHECKS if c.check_id == check_id)


def test_check_ids_are_unique_and_suites_partition():
    ids = [c.check_id for c in CHECKS]
    assert len(ids) == len(set(ids))
    assert len(checks_for(SUITE_FULL)) == len(CHECKS)
    core, extremal = checks_for(SUITE_CORE), checks_for(SUITE_EXTREMAL)
    assert core and extremal
    assert all(c.check_id.startswith("core.") for c in core)
    assert all(c.check_id.startswith("extremal.") for c in extremal)
    with pytest.raises(InvalidInputError):
        checks_for("everything")


def test_parse_perturbations():
    assert parse_perturbations(None) == {}
    assert parse_perturbations(["core.d.U.15:1", "core.members.S.15:-2"]) == \
        {"core.d.U.15": 1, "core.members.S.15": -2}
    for bad in ("core.d.U.15", "no.such.check:1", "core.d.U.15:x"):
        with pytest.raises(InvalidInputError):
            parse_perturbations([bad])


@pytest.mark.parametrize("check_id", [
    "core.members.S.15", "core.index.S.15", "core.index.S.49", "core.d.U.15", "core.d.S.15",
    "core.d.Q.7", "core.witness.chain.77", "core.witness.product.L7.77", "core.e.Q.7",
    "core.e-minus-d.U.15", "core.sumset.squares.7", "core.sumset.mixed.49", "core.sumset.small.5",
    "core.sumset.small.3", "extremal.classes.Q.7", "extremal.unmatched.Q.11", "extremal.converse.Q.7",
    "extremal.unmatched.S.77", "extremal.unmatched.L7.77", "extremal.converse.L7.77",
])
def test_single_checks_pass(check_id):
    outcome = SuiteRunner().run_check(_check(check_id))
    assert outcome.passed, outcome.to_dict()


def test_perturbed_checks_fail():
    runner = SuiteRunner()
    for check_id in ("core.d.U.15", "core.members.S.15", "core.sumset.small.5"):
        outcome = runner.run_check(_check(check_id), delta=1)
        assert not outcome.passed
        assert outcome.actual == _check(check_id).expected


def test_runner_reuses_cached_constants(tmp_path):
    cache = ResultCache(str(tmp_path / "cache.jsonl"))
    first = SuiteRunner(cache=cache)
    first.run_check(_check("core.d.U.77"))
    assert cache.get(77, "U", "D").value == 3
    assert SuiteRunner(cache=ResultCache(cache.path)).record(77, "U").value == 3


def test_result_exit_codes():
    runner = SuiteRunner()
    result = SuiteResult(suite=SUITE_CORE, outcomes=[
        runner.run_check(_check("core.d.U.15"), delta=1),
        runner.run_check(_check("core.d.Q.7")),
    ])
    assert not result.passed
    assert result.exit_code == EXIT_CHECK_FAILED
    assert [o.check_id for o in result.failures] == ["core.d.U.15"]
    assert result.to_dict()['passed'] is False


def test_label_check_counts_classes_without_the_label():
    runner = SuiteRunner()
    present = CheckSpec("extremal.label.Q.7", SUITE_EXTREMAL, "extremal_label_missing",
                        {'n': 7, 'spec': "Q", 'label': "exts.omega1.residue-form"}, 0, "residue form")
    absent = CheckSpec("extremal.label.Q.7", SUITE_EXTREMAL, "extremal_label_missing",
                       {'n': 7, 'spec': "Q", 'label': "exts.prime-split-form"}, 0, "prime split")
    assert runner.run_check(present).passed
    outcome = runner.run_check(absent)
    assert not outcome.passed and outcome.actual == 1


@pytest.mark.slow
def test_label_check_sees_a_broken_prime_split_form(monkeypatch):
    check = _check("extremal.label.S.1001")
    assert SuiteRunner().run_check(check).passed
    monkeypatch.setattr(extremal_lab, "_jacobi_prime_split", lambda y, weights: False)
    assert SuiteRunner().run_check(_check("extremal.unmatched.S.1001")).passed
    outcome = SuiteRunner().run_check(check)
    assert not outcome.passed and outcome.actual > 0


@pytest.mark.slow
def test_core_suite_passes():
    result = run_suite(SUITE_CORE)
    assert result.exit_code == EXIT_OK, [o.to_dict() for o in result.failures]


@pytest.mark.slow
def test_full_suite_passes():
    result = run_suite(SUITE_FULL)
    assert result.exit_code == EXIT_OK, [o.to_dict() for o in result.failures]
