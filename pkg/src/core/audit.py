"""
Check Ledger - Append-only record of every verification run

Each run writes an ATTEMPT line and then PASS, FAIL or ERROR, with the check
name, its parameters and the report summary. Fields are flattened to one
line before writing; nothing is ever edited or deleted.

Format:
    2026-01-15T10:30:00Z|ATTEMPT|check_braided_ybe|{'n': 3}
    2026-01-15T10:30:01Z|PASS|check_braided_ybe|{'n': 3}|27 cases
"""

import re
from collections import deque
from dataclasses import dataclass
from datetime import datetime, timezone
from functools import wraps
from pathlib import Path
from typing import Iterator

from src.core.exceptions import ModelError

# Characters that would break the one-entry-per-line format
_UNSAFE = re.compile(r"[|\r\n]+")

OUTCOMES = ("PASS", "FAIL", "ERROR")


class LedgerError(ModelError):
    """Raised when the ledger cannot be written."""
    pass


def flatten_field(text: str) -> str:
    """Replace separators and line breaks so a field stays on one ledger line."""
    return _UNSAFE.sub(" ", str(text)).strip()


@dataclass(frozen=True)
class LedgerEntry:
    timestamp: str
    status: str
    check: str
    params: str
    detail: str | None = None

    @classmethod
    def parse(cls, line: str) -> "LedgerEntry":
        fields = line.rstrip("\n").split("|")
        if len(fields) not in (4, 5):
            raise LedgerError(f"malformed ledger line: {line.strip()!r}")
        return cls(*fields)

    def __str__(self) -> str:
        fields = [self.timestamp, self.status, self.check, self.params]
        if self.detail:
            fields.append(self.detail)
        return "|".join(fields)


class CheckLedger:
    """Append-only ledger of verification runs, one ``LedgerEntry`` per line."""

    def __init__(self, log_dir: str | Path | None = None, enabled: bool = True):
        """
        Args:
            log_dir: Directory holding checks.log. Defaults to ./logs/ybmarkov/.
            enabled: If False, log() is a no-op (used by --no-ledger).
        """
        self.log_dir = Path(log_dir) if log_dir is not None else Path("logs/ybmarkov")
        self.enabled = enabled
        if enabled:
            self.log_dir.mkdir(parents=True, exist_ok=True)
        self.log_file = self.log_dir / "checks.log"

    def log(self, status: str, check: str, params: str, detail: str | None = None) -> None:
        """Append one entry; status is ATTEMPT, PASS, FAIL or ERROR."""
        if not self.enabled:
            return
        entry = LedgerEntry(
            timestamp=datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
            status=status,
            check=flatten_field(check),
            params=flatten_field(params),
            detail=flatten_field(detail) if detail else None,
        )
        try:
            with self.log_file.open("a", encoding="utf-8") as f:
                f.write(f"{entry}\n")
        except OSError as e:
            raise LedgerError(f"cannot append to {self.log_file}: {e}") from e

    def entries(self) -> Iterator[LedgerEntry]:
        if not self.log_file.exists():
            return
        with self.log_file.open(encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    yield LedgerEntry.parse(line)

    def get_recent(self, n: int = 10, check: str | None = None, status: str | None = None) -> list[str]:
        """Last ``n`` lines, oldest first, optionally only one check name or status."""
        selected = deque(
            (
                str(e) for e in self.entries()
                if (check is None or e.check == check) and (status is None or e.status == status)
            ),
            maxlen=n,
        )
        return list(selected)

    def verdicts(self) -> dict[str, str]:
        """Latest PASS/FAIL/ERROR per check name."""
        return {e.check: e.status for e in self.entries() if e.status in OUTCOMES}


def audited(ledger: CheckLedger):
    """
    Decorator factory for ledger entries around a check.

    Wraps a function returning an object with a ``passed`` attribute (a
    CheckReport or ReproCheck) and logs ATTEMPT before execution and
    PASS/FAIL/ERROR after, depending on the outcome.

    Args:
        ledger: CheckLedger instance to write to.
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            check = func.__name__
            params = str(kwargs) if kwargs else str(args) if args else "{}"

            ledger.log("ATTEMPT", check, params)

            try:
                result = func(*args, **kwargs)
            except Exception as e:
                ledger.log("ERROR", check, params, detail=f"{type(e).__name__}: {e}")
                raise

            status = "PASS" if getattr(result, "passed", False) else "FAIL"
            ledger.log(status, check, params, detail=getattr(result, "summary", None))
            return result

        return wrapper
    return decorator
