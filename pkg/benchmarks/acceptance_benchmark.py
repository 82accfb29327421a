"""
Acceptance Benchmark

Measures:
1. Wall time of every reproduction item over several iterations
2. Whether each item stays inside its runtime budget
3. Pass/fail of the item itself

Usage:
    python benchmarks/acceptance_benchmark.py
    python benchmarks/acceptance_benchmark.py --iterations 5 --only ybe_soundness sector_theory
"""

import argparse
import statistics
import sys
import time
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config import Settings  # noqa: E402
from src.harness.repro import ITEMS  # noqa: E402

# Seconds; items without an entry have no stated budget
BUDGETS = {
    "ybe_soundness": 10.0,
    "spectral_ybe_and_commutation": 30.0,
    "sector_theory": 120.0,
}


def measure_item(item, settings: Settings, iterations: int) -> tuple[list[float], bool]:
    """Run one item ``iterations`` times; returns wall times and whether every run passed."""
    times = []
    passed = True
    for _ in range(iterations):
        start = time.perf_counter()
        _, _, ok = item(settings)
        times.append(time.perf_counter() - start)
        passed = passed and ok
    return times, passed


def format_stats(times: list[float], label: str) -> str:
    """Format statistics for a list of times."""
    if not times:
        return f"{label}: No data"

    sorted_times = sorted(times)
    p50 = sorted_times[len(sorted_times) // 2]
    p95_idx = min(int(len(sorted_times) * 0.95), len(sorted_times) - 1)
    p95 = sorted_times[p95_idx]

    return (
        f"{label:<30} "
        f"P50: {p50:>7.2f}s  "
        f"P95: {p95:>7.2f}s  "
        f"Min: {min(times):>7.2f}s  "
        f"Max: {max(times):>7.2f}s  "
        f"Avg: {statistics.mean(times):>7.2f}s"
    )


def main():
    parser = argparse.ArgumentParser(description="Acceptance Benchmark")
    parser.add_argument(
        "--iterations", "-n",
        type=int,
        default=3,
        help="Runs per item (default: 3)"
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=0,
        help="Worker threads for the YBE checks, 0 = all cores (default: 0)"
    )
    parser.add_argument(
        "--only",
        nargs="*",
        default=None,
        help="Restrict to these item names"
    )
    args = parser.parse_args()
    settings = Settings.from_env().override(threads=args.threads)

    print()
    print("=" * 60)
    print("  ACCEPTANCE BENCHMARK")
    print("=" * 60)

    summary = []
    for name, _, item in ITEMS:
        if args.only and name not in args.only:
            continue
        print(f"\n--- {name} ({args.iterations} iterations) ---")
        times, passed = measure_item(item, settings, args.iterations)
        print(format_stats(times, name))

        p50 = sorted(times)[len(times) // 2]
        budget = BUDGETS.get(name)
        within = budget is None or p50 < budget
        if budget is not None:
            print(f"Target: <{budget:.0f}s  P50: {p50:.2f}s - {'PASS' if within else 'FAIL'}")
        summary.append((name, p50, passed, within))

    print()
    print("=" * 60)
    print("  SUMMARY")
    print("=" * 60)
    for name, p50, passed, within in summary:
        verdict = "PASS" if passed and within else "FAIL"
        print(f"  {name:<30} {p50:>7.2f}s  ({verdict})")
    print("=" * 60)
    print()
    return 0 if all(p and w for _, _, p, w in summary) else 1


if __name__ == "__main__":
    sys.exit(main())
