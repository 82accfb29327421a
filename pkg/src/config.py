"""
Runtime settings.

Values come from the environment (plus a .env file loaded with
python-dotenv) and can be overridden by CLI flags.

Usage:
    from src.config import Settings

    settings = Settings.from_env()
    settings = settings.override(max_states=512)
"""

import os
from dataclasses import dataclass, replace
from pathlib import Path

from dotenv import find_dotenv, load_dotenv

from src.core.exceptions import PreconditionError

DEFAULT_MAX_STATES = 4096
DEFAULT_ROOT_SEARCH_BOUND = 8
DEFAULT_REPORT_CAP = 100
DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class Settings:
    """Bounds, tolerances and output locations shared by every subcommand."""
    max_states: int = DEFAULT_MAX_STATES
    root_search_bound: int = DEFAULT_ROOT_SEARCH_BOUND
    report_cap: int = DEFAULT_REPORT_CAP
    tol: float = DEFAULT_TOL
    seed: int = 0
    threads: int = 0
    ledger_dir: Path = Path("logs/ybmarkov")

    @classmethod
    def from_env(cls, load_dotenv_file: bool = True, dotenv_path: str | Path | None = None) -> "Settings":
        """Read YBM_* variables after loading ``dotenv_path`` (default: .env found from the working directory)."""
        if load_dotenv_file:
            load_dotenv(dotenv_path or find_dotenv(usecwd=True))

        def _int(name: str, default: int) -> int:
            raw = os.environ.get(name)
            if raw is None or raw.strip() == "":
                return default
            try:
                return int(raw)
            except ValueError as e:
                raise PreconditionError(f"{name} must be an integer, got {raw!r}") from e

        def _float(name: str, default: float) -> float:
            raw = os.environ.get(name)
            if raw is None or raw.strip() == "":
                return default
            try:
                return float(raw)
            except ValueError as e:
                raise PreconditionError(f"{name} must be a number, got {raw!r}") from e

        return cls(
            max_states=_int("YBM_MAX_STATES", DEFAULT_MAX_STATES),
            root_search_bound=_int("YBM_ROOT_SEARCH_BOUND", DEFAULT_ROOT_SEARCH_BOUND),
            report_cap=_int("YBM_REPORT_CAP", DEFAULT_REPORT_CAP),
            tol=_float("YBM_TOL", DEFAULT_TOL),
            seed=_int("YBM_SEED", 0),
            threads=_int("YBM_THREADS", 0),
            ledger_dir=Path(os.environ.get("YBM_LEDGER_DIR") or "logs/ybmarkov"),
        )

    def override(self, **changes) -> "Settings":
        """Return a copy with the non-None values replaced."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    @property
    def workers(self) -> int:
        """Thread count; 0 means hardware parallelism."""
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)
