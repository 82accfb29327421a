"""
Tests for shared infrastructure.

Proves that the check ledger is append-only and one-entry-per-line, that
the audited decorator records every outcome, and that reports, exact
helpers and settings behave as documented.

Run:
    python -m pytest tests/test_core.py -v
"""

from fractions import Fraction
from pathlib import Path

import pytest

from src.config import DEFAULT_MAX_STATES, Settings
from src.core.audit import CheckLedger, LedgerError, audited, flatten_field
from src.core.exact import (
    check_pole,
    column_sums,
    format_rational,
    identity,
    kernel_dimension,
    matrices_equal,
    matrix_entries,
    parse_rational,
    permutation_matrix,
    scale,
    sparse_matrix,
)
from src.core.exceptions import (
    BoundExceededError,
    ModelError,
    NotBijectiveError,
    ParseError,
    PoleError,
    PreconditionError,
    SizeMismatchError,
)
from src.core.report import CheckReport, combine


# --- Exception Tests ---

class TestExceptions:
    def test_hierarchy(self):
        for cls in (SizeMismatchError, NotBijectiveError, PoleError, BoundExceededError, PreconditionError, ParseError):
            assert issubclass(cls, ModelError)
        assert issubclass(LedgerError, ModelError)
        assert issubclass(ModelError, Exception)

    def test_parse_error_position(self):
        e = ParseError("bad", 3, 7)
        assert str(e) == "line 3, column 7: bad"
        assert (e.line, e.column) == (3, 7)

    def test_parse_error_without_position(self):
        assert str(ParseError("bad")) == "bad"


# --- Ledger Tests ---

class TestLedger:
    def test_log_creates_file(self, tmp_path):
        ledger = CheckLedger(log_dir=tmp_path)
        ledger.log("ATTEMPT", "check_braided_ybe", "{'n': 3}")
        assert (tmp_path / "checks.log").exists()

    def test_log_format(self, tmp_path):
        ledger = CheckLedger(log_dir=tmp_path)
        ledger.log("PASS", "check_involutive", "{'n': 3}")
        parts = ledger.get_recent(1)[0].split("|")
        assert len(parts) == 4
        assert parts[1] == "PASS"
        assert parts[2] == "check_involutive"

    def test_log_with_detail(self, tmp_path):
        ledger = CheckLedger(log_dir=tmp_path)
        ledger.log("FAIL", "check", "{}", detail="FAIL: 27 cases, 6 violations")
        parts = ledger.get_recent(1)[0].split("|")
        assert len(parts) == 5
        assert parts[4] == "FAIL: 27 cases, 6 violations"

    def test_fields_stay_on_one_line(self, tmp_path):
        ledger = CheckLedger(log_dir=tmp_path)
        ledger.log("FAIL", "check", "a|b", detail="first\nsecond")
        lines = ledger.get_recent(10)
        assert len(lines) == 1
        assert len(lines[0].split("|")) == 5
        assert flatten_field("x|\r\ny") == "x y"

    def test_append_only(self, tmp_path):
        ledger = CheckLedger(log_dir=tmp_path)
        ledger.log("ATTEMPT", "first", "{}")
        CheckLedger(log_dir=tmp_path).log("PASS", "second", "{}")
        assert len(ledger.get_recent(10)) == 2

    def test_get_recent_limit(self, tmp_path):
        ledger = CheckLedger(log_dir=tmp_path)
        for i in range(20):
            ledger.log("ATTEMPT", f"check_{i}", "{}")
        lines = ledger.get_recent(5)
        assert len(lines) == 5
        assert "check_19" in lines[-1]

    def test_get_recent_empty(self, tmp_path):
        assert CheckLedger(log_dir=tmp_path).get_recent(5) == []

    def test_get_recent_by_check(self, tmp_path):
        ledger = CheckLedger(log_dir=tmp_path)
        ledger.log("ATTEMPT", "check_involutive", "{}")
        ledger.log("ATTEMPT", "check_braided_ybe", "{}")
        ledger.log("PASS", "check_involutive", "{}")
        lines = ledger.get_recent(10, check="check_involutive")
        assert [line.split("|")[1] for line in lines] == ["ATTEMPT", "PASS"]

    def test_get_recent_by_status(self, tmp_path):
        ledger = CheckLedger(log_dir=tmp_path)
        ledger.log("PASS", "a", "{}")
        ledger.log("FAIL", "b", "{}", detail="FAIL: 1 cases, 1 violations")
        ledger.log("PASS", "c", "{}")
        assert [line.split("|")[2] for line in ledger.get_recent(10, status="PASS")] == ["a", "c"]

    def test_entries_round_trip_fields(self, tmp_path):
        ledger = CheckLedger(log_dir=tmp_path)
        ledger.log("FAIL", "check_spectral_ybe", "(1/2, 1/3)", detail="FAIL: 729 cases")
        entry = next(ledger.entries())
        assert (entry.status, entry.check, entry.params, entry.detail) == (
            "FAIL", "check_spectral_ybe", "(1/2, 1/3)", "FAIL: 729 cases",
        )

    def test_malformed_line(self, tmp_path):
        (tmp_path / "checks.log").write_text("not a ledger line\n", encoding="utf-8")
        with pytest.raises(LedgerError, match="malformed"):
            list(CheckLedger(log_dir=tmp_path).entries())

    def test_verdicts_keep_latest_outcome(self, tmp_path):
        ledger = CheckLedger(log_dir=tmp_path)
        ledger.log("ATTEMPT", "check_involutive", "{}")
        ledger.log("FAIL", "check_involutive", "{}")
        ledger.log("ATTEMPT", "check_involutive", "{}")
        ledger.log("PASS", "check_involutive", "{}")
        ledger.log("ATTEMPT", "check_braided_ybe", "{}")
        assert ledger.verdicts() == {"check_involutive": "PASS"}

    def test_disabled_writes_nothing(self, tmp_path):
        ledger = CheckLedger(log_dir=tmp_path / "off", enabled=False)
        ledger.log("PASS", "check", "{}")
        assert not (tmp_path / "off").exists()

    def test_unwritable_ledger(self, tmp_path):
        ledger = CheckLedger(log_dir=tmp_path)
        ledger.log_file = tmp_path / "missing" / "checks.log"
        with pytest.raises(LedgerError):
            ledger.log("PASS", "check", "{}")


# --- Audited Decorator Tests ---

class TestAudited:
    def test_pass_is_logged(self, tmp_path):
        ledger = CheckLedger(log_dir=tmp_path)

        @audited(ledger)
        def check_ok(n):
            return CheckReport(name="ok", cases=n)

        check_ok(n=4)
        attempt, done = ledger.get_recent(2)
        assert "|ATTEMPT|check_ok|{'n': 4}" in attempt
        assert "|PASS|check_ok|" in done

    def test_fail_is_logged(self, tmp_path):
        ledger = CheckLedger(log_dir=tmp_path)

        @audited(ledger)
        def check_bad():
            report = CheckReport(name="bad", cases=1)
            report.record((0, 1))
            return report

        assert not check_bad()
        assert ledger.get_recent(1)[0].split("|")[1] == "FAIL"

    def test_error_is_logged_and_raised(self, tmp_path):
        ledger = CheckLedger(log_dir=tmp_path)

        @audited(ledger)
        def check_raises():
            raise PoleError("z = -1")

        with pytest.raises(PoleError):
            check_raises()
        parts = ledger.get_recent(1)[0].split("|")
        assert parts[1] == "ERROR"
        assert parts[4] == "PoleError: z = -1"


# --- Report Tests ---

class TestReport:
    def test_record_caps_list_not_count(self):
        report = CheckReport(name="r", cap=2)
        for i in range(5):
            report.record(i)
        assert report.violation_count == 5
        assert report.violations == [0, 1]
        assert not report.passed

    def test_summary(self):
        report = CheckReport(name="r", cases=9)
        assert report.summary == "pass: 9 cases, 0 violations"

    def test_merge_sorts(self):
        a = CheckReport(name="a", cases=1, violation_count=1, violations=[(2, 0)])
        b = CheckReport(name="b", cases=2, violation_count=1, violations=[(1, 5)])
        a.merge(b)
        assert a.cases == 3
        assert a.violations == [(1, 5), (2, 0)]

    def test_combine_tags_sources(self):
        bad = CheckReport(name="bad", cases=1)
        bad.record("x")
        total = combine("all", [CheckReport(name="good", cases=2), bad])
        assert total.cases == 3
        assert total.violations == [("bad", "x")]
        assert total.notes["good"].startswith("pass")


# --- Exact Arithmetic Tests ---

class TestExact:
    def test_parse_and_format(self):
        assert parse_rational("3/7") == Fraction(3, 7)
        assert parse_rational("0.25") == Fraction(1, 4)
        assert format_rational(2) == "2/1"
        assert format_rational(Fraction(-1, 3)) == "-1/3"

    def test_parse_rejects_garbage(self):
        with pytest.raises(ParseError):
            parse_rational("1/0")
        with pytest.raises(ParseError):
            parse_rational("abc")

    def test_pole(self):
        check_pole(Fraction(0), Fraction(1, 2))
        with pytest.raises(PoleError, match="-1/1"):
            check_pole(Fraction(1), Fraction(-1))

    def test_sparse_round_trip(self):
        entries = {(0, 1): Fraction(1, 2), (1, 0): Fraction(-3)}
        assert matrix_entries(sparse_matrix(entries, 2)) == entries

    def test_zero_entries_dropped(self):
        assert matrix_entries(sparse_matrix({(0, 0): 0, (1, 1): 1}, 2)) == {(1, 1): 1}

    def test_permutation_matrix(self):
        P = permutation_matrix([1, 2, 0])
        assert matrix_entries(P) == {(1, 0): 1, (2, 1): 1, (0, 2): 1}
        assert matrices_equal(P * P * P, identity(3))

    def test_kernel_and_column_sums(self):
        M = sparse_matrix({(0, 0): -1, (1, 0): 1, (0, 1): 1, (1, 1): -1}, 2)
        assert kernel_dimension(M) == 1
        assert column_sums(M) == [0, 0]
        assert matrix_entries(scale(M, Fraction(1, 2)))[(1, 0)] == Fraction(1, 2)


# --- Settings Tests ---

class TestSettings:
    def test_defaults(self, monkeypatch):
        for name in ("YBM_MAX_STATES", "YBM_TOL", "YBM_SEED", "YBM_THREADS", "YBM_LEDGER_DIR"):
            monkeypatch.delenv(name, raising=False)
        settings = Settings.from_env(load_dotenv_file=False)
        assert settings.max_states == DEFAULT_MAX_STATES
        assert settings.ledger_dir == Path("logs/ybmarkov")

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("YBM_MAX_STATES", "512")
        monkeypatch.setenv("YBM_TOL", "1e-9")
        monkeypatch.setenv("YBM_THREADS", "3")
        settings = Settings.from_env(load_dotenv_file=False)
        assert settings.max_states == 512
        assert settings.tol == 1e-9
        assert settings.workers == 3

    def test_bad_environment_value(self, monkeypatch):
        monkeypatch.setenv("YBM_SEED", "lots")
        with pytest.raises(PreconditionError, match="YBM_SEED"):
            Settings.from_env(load_dotenv_file=False)

    def test_dotenv_file(self, tmp_path, monkeypatch):
        monkeypatch.delenv("YBM_MAX_STATES", raising=False)
        monkeypatch.delenv("YBM_SEED", raising=False)
        env = tmp_path / ".env"
        env.write_text("YBM_MAX_STATES=77\nYBM_SEED=4\n", encoding="utf-8")
        settings = Settings.from_env(dotenv_path=env)
        assert (settings.max_states, settings.seed) == (77, 4)

    def test_dotenv_found_from_working_directory(self, tmp_path, monkeypatch):
        monkeypatch.delenv("YBM_REPORT_CAP", raising=False)
        (tmp_path / ".env").write_text("YBM_REPORT_CAP=9\n", encoding="utf-8")
        monkeypatch.chdir(tmp_path)
        assert Settings.from_env().report_cap == 9

    def test_environment_beats_dotenv(self, tmp_path, monkeypatch):
        monkeypatch.setenv("YBM_MAX_STATES", "128")
        env = tmp_path / ".env"
        env.write_text("YBM_MAX_STATES=77\n", encoding="utf-8")
        assert Settings.from_env(dotenv_path=env).max_states == 128

    def test_override_ignores_none(self):
        settings = Settings().override(max_states=64, tol=None)
        assert settings.max_states == 64
        assert settings.tol == Settings().tol

    def test_zero_threads_means_all_cores(self):
        assert Settings(threads=0).workers >= 1
