"""
Rendering of CLI results as table, JSON or CSV text.

Records are flat dicts. Fractions always render as "num/den", sequences as
"(a,b,c)", so every format is stable for downstream tools.
"""

import csv
import io
import json
import sys
from fractions import Fraction
from typing import Any, Iterable, Sequence

from src.core.exact import format_rational
from src.core.report import CheckReport
from src.models.generator import RateMatrix

FORMATS = ("table", "json", "csv")

# ANSI colors for terminal output
GREEN = "\033[92m"
RED = "\033[91m"
YELLOW = "\033[93m"
CYAN = "\033[96m"
BOLD = "\033[1m"
RESET = "\033[0m"


def _color(code: str) -> str:
    return code if sys.stdout.isatty() else ""


def header(title: str) -> None:
    print(f"\n{_color(BOLD)}{_color(CYAN)}{'=' * 60}")
    print(f"  {title}")
    print(f"{'=' * 60}{_color(RESET)}\n")


def pass_msg(msg: str) -> None:
    print(f"  {_color(GREEN)}[PASS]{_color(RESET)} {msg}")


def fail_msg(msg: str) -> None:
    print(f"  {_color(RED)}[FAIL]{_color(RESET)} {msg}")


def info_msg(msg: str) -> None:
    print(f"  {_color(YELLOW)}[INFO]{_color(RESET)} {msg}")


def render_value(value: Any) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (tuple, list)):
        return "(" + ",".join(str(render_value(v)) for v in value) + ")"
    if isinstance(value, dict):
        return {str(k): render_value(v) for k, v in value.items()}
    if isinstance(value, (int, float, str)):
        return value
    return str(value)


def render(records: Sequence[dict[str, Any]], fmt: str = "table") -> str:
    rows = [{k: render_value(v) for k, v in r.items()} for r in records]
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: json.dumps(v) if isinstance(v, dict) else v for k, v in row.items()})
        return buffer.getvalue()
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    if not rows:
        return ""
    cells = [[str(row.get(c, "")) for c in columns] for row in rows]
    widths = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in cells)
    return "\n".join(lines) + "\n"


def report_records(reports: Iterable[CheckReport]) -> list[dict[str, Any]]:
    return [
        {
            "check": r.name,
            "verdict": "pass" if r.passed else "FAIL",
            "cases": r.cases,
            "violations": r.violation_count,
            "first": repr(r.violations[0]) if r.violations else "",
        }
        for r in reports
    ]


def matrix_triplets(M: RateMatrix) -> str:
    """One "row col num/den" line per nonzero entry, diagonal included."""
    return "".join(f"{row} {col} {format_rational(v)}\n" for (row, col), v in M.entries().items())
