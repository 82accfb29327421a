"""
Closed-form branching probabilities for quenches out of a full-cycle twist.

With f1 the full N-cycle, f1-sectors are labelled by the total charge k mod N.
For f2 = f1^(n-1) and N = (n-1)D, f2 has n-1 species (cycles of length D),
species s holding the values s-1, s-1+(n-1), ... . An f2-sector with profile
(p_1..p_(n-1)) and charge l mod D receives probability

    L!/prod(p_s!) * (1/(n-1))^(L-1)

from C_k when (n-1)l + sum_s (s-1) p_s == k (mod N), and 0 otherwise.
The square f2 = f1^2 is the case n = 3.
"""

from fractions import Fraction
from typing import Sequence

from src.algebra.permutation import Permutation, charge_coordinates, power
from src.config import DEFAULT_MAX_STATES
from src.core.exceptions import PreconditionError
from src.core.report import DEFAULT_REPORT_CAP, CheckReport
from src.models.generator import twisted_ssep_matrix
from src.quench.branching import branching_matrix
from src.sectors.counting import compositions, multinomial
from src.sectors.engine import TotalCharge, enumerate_sectors


def closed_form_branching_fullcycle_square(N: int, L: int, k: int, p2: int, p3: int, l: int) -> Fraction:
    """prob(C_k -> C_(p2, p3, l)) for f2 = f1^2; p2 counts even values, p3 odd ones."""
    if N % 2:
        raise PreconditionError(f"the square of a full cycle splits only for even N, got N={N}")
    if p2 < 0 or p3 < 0 or p2 + p3 != L:
        raise PreconditionError(f"profile ({p2}, {p3}) does not sum to L={L}")
    if (k - 2 * l - p3) % N:
        return Fraction(0)
    return multinomial((p2, p3)) * Fraction(1, 2) ** (L - 1)


def closed_form_branching_power(N: int, D: int, L: int, k: int, profile: Sequence[int], l: int) -> Fraction:
    """prob(C_k -> C_(profile, l)) for f2 = f1^(n-1), n = len(profile) + 1."""
    profile = tuple(profile)
    n = len(profile) + 1
    if n < 2 or D < 1 or N != (n - 1) * D:
        raise PreconditionError(f"N={N} is not (n-1)D with n={n}, D={D}")
    if any(p < 0 for p in profile) or sum(profile) != L:
        raise PreconditionError(f"profile {profile} does not sum to L={L}")
    shift = sum(s * p for s, p in enumerate(profile))
    if ((n - 1) * l + shift - k) % N:
        return Fraction(0)
    return multinomial(profile) * Fraction(1, n - 1) ** (L - 1)


def parity_multinomial_sum(L: int, a: int) -> int:
    """sum over p3 == a (mod 2) of L!/(p2! p3!); equals 2^(L-1) for L >= 1."""
    return sum(multinomial((L - p3, p3)) for p3 in range(L + 1) if (p3 - a) % 2 == 0)


def residue_multinomial_sum(L: int, n: int, a: int) -> int:
    """
    sum of L!/prod(p_s!) over profiles of n-1 species with
    sum_s (s-1) p_s == a (mod n-1); equals (n-1)^(L-1).
    """
    if n < 2:
        raise PreconditionError(f"need n >= 2, got {n}")
    total = 0
    for profile in compositions(n - 1, L):
        if (sum(s * p for s, p in enumerate(profile)) - a) % (n - 1) == 0:
            total += multinomial(profile)
    return total


def check_power_branching(
    N: int,
    n: int,
    L: int,
    max_states: int | None = DEFAULT_MAX_STATES,
    cap: int = DEFAULT_REPORT_CAP,
) -> CheckReport:
    """Intersection-based branching from the full N-cycle to its (n-1)-th power, against the closed form."""
    if n < 2 or N % (n - 1):
        raise PreconditionError(f"n-1={n - 1} does not divide N={N}")
    D = N // (n - 1)
    f1 = Permutation.full_cycle(N)
    f2 = power(f1, n - 1)
    B = branching_matrix(f1, f2, L, max_states=max_states)

    report = CheckReport(name=f"power_branching(N={N}, n={n}, L={L})", cap=cap)
    for i, row in enumerate(B.rows):
        k = row.charge.value
        for j, col in enumerate(B.cols):
            report.cases += 1
            if n == 3:
                expected = closed_form_branching_fullcycle_square(N, L, k, *col.profile.counts, col.charge.value)
            else:
                expected = closed_form_branching_power(N, D, L, k, col.profile.counts, col.charge.value)
            actual = B.probability(i, j)
            if actual != expected:
                report.record((k, col.profile.counts, col.charge.value, actual, expected))
    for i, total in enumerate(B.row_sums()):
        if total != 1:
            report.record(("row_sum", i, total))
    return report


def ssep_inclusion_condition(
    p1: Sequence[int],
    p2: Sequence[int],
    E2: TotalCharge,
    f2: Permutation,
) -> bool:
    """
    Whether the SSEP sector with value counts p1 lies in the f2-sector (p2, E2).

    Value counts must add up to the species counts, and the charge carried by
    the values must match E2 modulo its D.
    """
    coords = charge_coordinates(f2)
    if len(p1) != f2.n or len(p2) != coords.n_species:
        return False
    totals = [0] * coords.n_species
    charge = 0
    for v, count in enumerate(p1):
        totals[coords.species_of[v] - 1] += count
        charge += coords.charge_of[v] * count
    if tuple(totals) != tuple(p2):
        return False
    return (charge - E2.value) % E2.modulus == 0


def check_inclusion_condition(
    f2: Permutation,
    L: int,
    max_states: int | None = DEFAULT_MAX_STATES,
    cap: int = DEFAULT_REPORT_CAP,
) -> CheckReport:
    """The inclusion condition agrees with set inclusion of SSEP sectors into f2-sectors."""
    ident = Permutation.identity(f2.n)
    fine = enumerate_sectors(twisted_ssep_matrix(ident, L, max_states=max_states), twist=ident)
    coarse = enumerate_sectors(twisted_ssep_matrix(f2, L, max_states=max_states), twist=f2)

    report = CheckReport(name=f"inclusion_condition(f2={f2}, L={L})", cap=cap)
    for small in fine:
        for big in coarse:
            report.cases += 1
            included = all(code in big for code in small.members)
            predicted = ssep_inclusion_condition(small.profile.counts, big.profile.counts, big.charge, f2)
            if included != predicted:
                report.record((small.id, big.id, included))
    return report
