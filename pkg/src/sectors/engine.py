"""
Sector enumeration, profile/charge labels and uniform stationary states.

Sectors are the connected components of the jump graph of a generator
(its nonzero off-diagonal entries). For twisted SSEP models each sector is
labelled by a profile and a total charge computed from the twist's species
and charge coordinates.

Usage:
    from src.models.generator import twisted_ssep_matrix
    from src.sectors.engine import enumerate_sectors

    M = twisted_ssep_matrix(f, L=3)
    for sector in enumerate_sectors(M, twist=f):
        print(sector.id, sector.profile, sector.charge, sector.size)
"""

import math
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Sequence

from src.algebra.permutation import Permutation, charge_coordinates
from src.config import DEFAULT_MAX_STATES
from src.core.exact import kernel_dimension
from src.core.report import DEFAULT_REPORT_CAP, CheckReport
from src.models.configuration import decode, state_count
from src.models.generator import RateMatrix, twisted_ssep_matrix
from src.sectors.counting import (
    count_sectors_closed_form,
    divisors,
    count_sectors_equal_cycles,
    sector_cardinality_closed_form,
    ssep_sector_count,
)
from src.sectors.union_find import UnionFind


@dataclass(frozen=True)
class Profile:
    """Occurrences of each species, in canonical cycle order."""
    counts: tuple[int, ...]

    @property
    def L(self) -> int:
        return sum(self.counts)

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.counts) + ")"


@dataclass(frozen=True)
class TotalCharge:
    value: int
    modulus: int

    def __str__(self) -> str:
        return f"{self.value} mod {self.modulus}"


@dataclass(frozen=True)
class Sector:
    id: int
    n: int
    L: int
    representative: tuple[int, ...]
    size: int
    members: tuple[int, ...]
    profile: Profile | None = None
    charge: TotalCharge | None = None

    def __contains__(self, code: int) -> bool:
        return code in self.member_set

    @cached_property
    def member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    @property
    def label(self) -> str:
        if self.profile is None:
            return f"#{self.id}"
        return f"p={self.profile} E={self.charge}"


@dataclass(frozen=True)
class StationaryState:
    sector_id: int
    weights: dict[int, Fraction]

    @property
    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))


def profile_of(sites: Sequence[int], f: Permutation) -> Profile:
    coords = charge_coordinates(f)
    counts = [0] * coords.n_species
    for v in sites:
        counts[coords.species_of[v] - 1] += 1
    return Profile(tuple(counts))


def charge_of(sites: Sequence[int], f: Permutation) -> TotalCharge:
    """Sum of charges modulo the gcd of cycle lengths over the species present."""
    coords = charge_coordinates(f)
    present = {coords.species_of[v] for v in sites}
    if not present:
        return TotalCharge(0, 1)
    D = math.gcd(*(coords.cycle_lengths[s - 1] for s in present))
    return TotalCharge(sum(coords.charge_of[v] for v in sites) % D, D)


def enumerate_sectors(M: RateMatrix, twist: Permutation | None = None) -> list[Sector]:
    """Connected components of the jump graph, ordered by minimal encoding."""
    uf = UnionFind(M.dim)
    for row, col in M.rates:
        uf.union(row, col)

    sectors = []
    for sid, members in enumerate(uf.components()):
        rep = decode(members[0], M.n, M.L)
        sectors.append(Sector(
            id=sid,
            n=M.n,
            L=M.L,
            representative=rep,
            size=len(members),
            members=tuple(members),
            profile=profile_of(rep, twist) if twist is not None else None,
            charge=charge_of(rep, twist) if twist is not None else None,
        ))
    return sectors


def sector_index(sectors: Sequence[Sector], dim: int) -> list[int]:
    """Sector id of every configuration encoding."""
    index = [-1] * dim
    for sector in sectors:
        for code in sector.members:
            index[code] = sector.id
    return index


def stationary_state(sector: Sector) -> StationaryState:
    """Uniform distribution on the sector."""
    w = Fraction(1, sector.size)
    return StationaryState(sector_id=sector.id, weights={code: w for code in sector.members})


def check_stationary(M: RateMatrix, state: StationaryState, cap: int = DEFAULT_REPORT_CAP) -> CheckReport:
    """M·state == 0 and the weights sum to 1, exactly."""
    report = CheckReport(name=f"stationary(sector {state.sector_id})", cases=len(state.weights), cap=cap)
    if state.total != 1:
        report.record(("total", state.total))
    for code, value in sorted(M.apply(state.weights).items()):
        report.record((code, value))
    return report


def generator_kernel_dimension(M: RateMatrix) -> int:
    """Exact dim ker M over QQ."""
    return kernel_dimension(M.to_domain_matrix())


def verify_sector_theory(
    f: Permutation,
    L: int,
    max_states: int | None = DEFAULT_MAX_STATES,
    cap: int = DEFAULT_REPORT_CAP,
) -> CheckReport:
    """
    Orbits of the twisted SSEP against the closed forms:

    (a) orbit partition == partition by (profile, charge)
    (b) orbit count == closed-form count
    (c) every orbit size == closed-form cardinality
    (d) equal-cycle twists: counts strictly increasing over divisors d
    (e) N <= count <= SSEP count
    """
    state_count(f.n, L, max_states)
    M = twisted_ssep_matrix(f, L, max_states=max_states)
    sectors = enumerate_sectors(M, twist=f)
    report = CheckReport(name=f"sector_theory(f={f}, L={L})", cap=cap)

    labels: dict[tuple[Profile, TotalCharge], int] = {}
    for sector in sectors:
        report.cases += 1
        key = (sector.profile, sector.charge)
        for code in sector.members:
            sites = decode(code, f.n, L)
            if (profile_of(sites, f), charge_of(sites, f)) != key:
                report.record(("label_not_constant", sector.id, sites))
                break
        if key in labels:
            report.record(("label_shared", labels[key], sector.id))
        labels[key] = sector.id

        expected_size = sector_cardinality_closed_form(f, sector.profile.counts)
        if sector.size != expected_size:
            report.record(("cardinality", sector.id, sector.size, expected_size))

    expected_count = count_sectors_closed_form(f, L)
    if len(sectors) != expected_count:
        report.record(("count", len(sectors), expected_count))

    lengths = set(f.cycles.lengths)
    if len(lengths) == 1:
        counts = [count_sectors_equal_cycles(f.n, d, L) for d in divisors(f.n)]
        if any(a >= b for a, b in zip(counts, counts[1:])):
            report.record(("not_increasing", tuple(counts)))
        d = len(f.cycles)
        if count_sectors_equal_cycles(f.n, d, L) != expected_count:
            report.record(("equal_cycle_formula", d, expected_count))

    if not f.n <= len(sectors) <= ssep_sector_count(f.n, L):
        report.record(("bounds", len(sectors), f.n, ssep_sector_count(f.n, L)))

    report.notes["sectors"] = len(sectors)
    return report
