"""
Reproduction harness: every acceptance check in one run.

Each item records an expected value, the computed value and a provenance
tag: "stated" for numbers given by the source results, "derived" for
values obtained by hand or by brute force.

Usage:
    from src.harness.repro import run_repro_suite

    report = run_repro_suite()
    sys.exit(0 if report.passed else 1)
"""

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from src.algebra.permutation import Permutation, all_permutations, power
from src.algebra.ybe import (
    SPECTRAL_GRID,
    TwoSiteMap,
    check_braided_ybe,
    check_involutive,
    check_spectral_ybe_grid,
    counterexample_family,
    lyubashenko_map,
)
from src.config import Settings
from src.core.audit import CheckLedger, audited
from src.dynamics.evolve import (
    Mixture,
    ProbabilityVector,
    evolve,
    evolve_to_convergence,
    long_time_limit,
    stationary_currents,
)
from src.models.conjugation import check_conjugation_identity
from src.models.generator import family_markov, twisted_ssep_matrix
from src.models.transfer import check_hamiltonian_extraction, check_transfer_commutation
from src.quench.branching import branching_matrix
from src.quench.closed_forms import check_power_branching
from src.sectors.counting import equal_cycle_counts, ssep_sector_count
from src.sectors.engine import (
    check_stationary,
    enumerate_sectors,
    generator_kernel_dimension,
    stationary_state,
    verify_sector_theory,
)


@dataclass
class ReproCheck:
    name: str
    expected: str
    computed: str
    passed: bool
    provenance: str
    seconds: float = 0.0

    @property
    def summary(self) -> str:
        return f"expected {self.expected}, computed {self.computed}"


@dataclass
class ReproReport:
    checks: list[ReproCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def summary(self) -> str:
        failed = [c.name for c in self.checks if not c.passed]
        return f"{len(self.checks) - len(failed)}/{len(self.checks)} passed" + (f", failed: {failed}" if failed else "")


# Each item returns (expected, computed, passed)
Outcome = tuple[str, str, bool]


def _ybe_soundness(settings: Settings) -> Outcome:
    maps = violations = 0
    for n in (2, 3, 4):
        for g in all_permutations(n):
            m = TwoSiteMap.from_function(n, lambda i, j, g=g, inv=g.inverse(): (g(j), inv(i)))
            maps += 1
            violations += check_involutive(m).violation_count
            violations += check_braided_ybe(m, workers=settings.workers).violation_count
    return "32 maps, 0 violations", f"{maps} maps, {violations} violations", maps == 32 and violations == 0


def _spectral_and_commutation(settings: Settings) -> Outcome:
    m = lyubashenko_map(Permutation.parse("(0 1 2)"))
    reports = [check_spectral_ybe_grid(m)]
    for L in (2, 3):
        reports.append(check_transfer_commutation(m, L, grid=SPECTRAL_GRID, max_states=settings.max_states))
    failing = [r.name for r in reports if not r.passed]
    return "all pass", "all pass" if not failing else f"failing {failing}", not failing


def _hamiltonian_extraction(settings: Settings) -> Outcome:
    cases = [
        ("ssep N=2 L=3", TwoSiteMap.flip(2), None),
        ("lyubashenko (0 1 2) L=3", lyubashenko_map(Permutation.parse("(0 1 2)")), None),
        ("twisted (0 1) N=2 L=3", TwoSiteMap.flip(2), Permutation.parse("(0 1)")),
    ]
    failing = [
        name for name, m, twist in cases
        if not check_hamiltonian_extraction(m, 3, twist=twist, max_states=settings.max_states).passed
    ]
    return "3 exact matches", f"{3 - len(failing)} exact matches", not failing


def _sector_theory(settings: Settings) -> Outcome:
    runs = [(3, L) for L in (2, 3, 4, 5)] + [(4, L) for L in (2, 3)]
    mismatches = checked = 0
    for n, L in runs:
        for f in all_permutations(n):
            checked += 1
            mismatches += verify_sector_theory(f, L, max_states=settings.max_states).violation_count
    return "0 mismatches", f"{mismatches} mismatches over {checked} twists", mismatches == 0


def _stated_counts(settings: Settings) -> Outcome:
    counts = []
    for text in ("(0)(1)(2)", "(0 1)(2)", "(0 1 2)"):
        f = Permutation.parse(text)
        counts.append(len(enumerate_sectors(twisted_ssep_matrix(f, 3, max_states=settings.max_states))))
    M = family_markov(counterexample_family(), 3, max_states=settings.max_states)
    counts.append(len(enumerate_sectors(M)))
    kernel = generator_kernel_dimension(M)
    computed = f"{tuple(counts)}, kernel {kernel}"
    return "(10, 5, 3, 7), kernel 7", computed, counts == [10, 5, 3, 7] and kernel == 7


def _conjugation(settings: Settings) -> Outcome:
    failing = [
        (str(g), L)
        for g in all_permutations(3)
        for L in (2, 3)
        if not check_conjugation_identity(g, L, max_states=settings.max_states).passed
    ]
    return "12 exact identities", f"{12 - len(failing)} exact identities", not failing


def _branching(settings: Settings) -> Outcome:
    reports = [check_power_branching(4, 3, 3, max_states=settings.max_states)]
    reports += [check_power_branching(6, 4, L, max_states=settings.max_states) for L in (2, 3)]
    violations = sum(r.violation_count for r in reports)
    return "0 mismatches", f"{violations} mismatches", violations == 0


def _dynamics(settings: Settings) -> Outcome:
    problems = []

    f = Permutation.parse("(0 1)")
    M = twisted_ssep_matrix(f, 2)
    sectors = enumerate_sectors(M, twist=f)
    for s in sectors:
        state = stationary_state(s)
        if not check_stationary(M, state).passed:
            problems.append(f"stationary {s.id}")
        if stationary_currents(M, state.weights):
            problems.append(f"current {s.id}")

    P = evolve(M, ProbabilityVector.point_mass(2, 2, (0, 0)), 100.0, settings.tol)
    target = ProbabilityVector.from_state(2, 2, stationary_state(sectors[0]))
    if P.total_variation(target) >= 1e-8:
        problems.append("evolve")

    f1 = Permutation.full_cycle(4)
    f2 = power(f1, 2)
    start = enumerate_sectors(twisted_ssep_matrix(f1, 3), twist=f1)[0]
    limit = long_time_limit(stationary_state(start), f2, 3)
    B = branching_matrix(f1, f2, 3)
    predicted = Mixture(sectors=B.cols, weights=B.row(start.id)).to_vector(4, 3)
    if limit.to_vector(4, 3).total_variation(predicted) >= 1e-8:
        problems.append("branching mixture")
    if sorted(limit.weights.values()) != [Fraction(1, 4), Fraction(3, 4)]:
        problems.append("mixture weights")

    M2 = twisted_ssep_matrix(f2, 3)
    relaxed, _ = evolve_to_convergence(M2, ProbabilityVector.from_state(4, 3, stationary_state(start)), settings.tol)
    if relaxed.total_variation(limit.to_vector(4, 3)) >= 1e-8:
        problems.append("long time limit")

    return "no problems", ", ".join(problems) or "no problems", not problems


def _monotonicity(settings: Settings) -> Outcome:
    N, L = 12, 4
    counts = equal_cycle_counts(N, L)
    values = [c for _, c in counts]
    increasing = all(a < b for a, b in zip(values, values[1:]))
    ok = increasing and values[0] == N and values[-1] == ssep_sector_count(N, L)
    return f"increasing from {N} to {ssep_sector_count(N, L)}", str(values), ok


ITEMS: list[tuple[str, str, Callable[[Settings], Outcome]]] = [
    ("ybe_soundness", "derived", _ybe_soundness),
    ("spectral_ybe_and_commutation", "derived", _spectral_and_commutation),
    ("hamiltonian_extraction", "derived", _hamiltonian_extraction),
    ("sector_theory", "derived", _sector_theory),
    ("sector_counts_n3_l3", "stated", _stated_counts),
    ("conjugation_identity", "derived", _conjugation),
    ("branching_closed_forms", "stated", _branching),
    ("stationarity_and_dynamics", "derived", _dynamics),
    ("equal_cycle_monotonicity", "stated", _monotonicity),
]


def run_repro_suite(
    settings: Settings | None = None,
    ledger: CheckLedger | None = None,
    only: list[str] | None = None,
) -> ReproReport:
    settings = settings or Settings()
    report = ReproReport()
    for name, provenance, item in ITEMS:
        if only and name not in only:
            continue

        def run(item=item, name=name, provenance=provenance) -> ReproCheck:
            start = time.perf_counter()
            expected, computed, passed = item(settings)
            return ReproCheck(name, expected, computed, passed, provenance, time.perf_counter() - start)

        run.__name__ = f"repro.{name}"
        if ledger is not None:
            run = audited(ledger)(run)
        report.checks.append(run())
    return report
