import pytest

from services.errors import (
    EXIT_BUDGET,
    EXIT_CHECK_FAILED,
    EXIT_INVALID_INPUT,
    BudgetExceededError,
    InvalidInputError,
    InvariantBreachError,
    NonUnitError,
    WeightSpecError,
)
from services.settings import CACHE_ENV, CONFIG_ENV, Settings, default_jobs, load_settings


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch, tmp_path):
    monkeypatch.delenv(CONFIG_ENV, raising=False)
    monkeypatch.delenv(CACHE_ENV, raising=False)
    monkeypatch.chdir(tmp_path)


def test_defaults_without_a_file():
    settings = load_settings()
    assert settings.max_nodes == 5_000_000
    assert settings.cache_path == "davenport_cache.jsonl"
    assert settings.jobs == default_jobs() >= 1


def test_file_values(tmp_path):
    config = tmp_path / "custom.ini"
    config.write_text("[search]\nmax_nodes = 1000\njobs = 3\n\n[cache]\npath = here.jsonl\n\n"
                      "[logging]\nlevel = DEBUG\n", encoding="utf-8")
    settings = load_settings(str(config))
    assert (settings.max_nodes, settings.jobs, settings.cache_path, settings.log_level) == \
        (1000, 3, "here.jsonl", "DEBUG")
    assert settings.max_seconds == 600.0


def test_default_file_and_environment(tmp_path, monkeypatch):
    (tmp_path / "davenport.ini").write_text("[search]\nstratify_cap = 10\n", encoding="utf-8")
    assert load_settings().stratify_cap == 10

    other = tmp_path / "other.ini"
    other.write_text("[search]\nstratify_cap = 20\n", encoding="utf-8")
    monkeypatch.setenv(CONFIG_ENV, str(other))
    monkeypatch.setenv(CACHE_ENV, "/tmp/elsewhere.jsonl")
    settings = load_settings()
    assert settings.stratify_cap == 20
    assert settings.cache_path == "/tmp/elsewhere.jsonl"


def test_bad_files(tmp_path):
    with pytest.raises(InvalidInputError):
        load_settings(str(tmp_path / "missing.ini"))
    bad = tmp_path / "bad.ini"
    bad.write_text("[search]\nmax_nodes = lots\n", encoding="utf-8")
    with pytest.raises(InvalidInputError):
        load_settings(str(bad))
    zero = tmp_path / "zero.ini"
    zero.write_text("[search]\njobs = 0\n", encoding="utf-8")
    with pytest.raises(InvalidInputError):
        load_settings(str(zero))


def test_with_overrides_skips_none():
    settings = Settings().with_overrides(cache_path=None, log_level="INFO")
    assert settings.cache_path == Settings().cache_path
    assert settings.log_level == "INFO"


def test_error_exit_codes():
    assert InvalidInputError("x").exit_code == EXIT_INVALID_INPUT
    assert WeightSpecError("Z", "unknown").exit_code == EXIT_INVALID_INPUT
    assert NonUnitError(3, 15).context == {'value': 3, 'modulus': 15}
    assert BudgetExceededError("x", partial=7).exit_code == EXIT_BUDGET
    assert BudgetExceededError("x", partial=7).partial == 7
    assert InvariantBreachError("x").exit_code == EXIT_CHECK_FAILED
