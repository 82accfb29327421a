"""
Bijections of the configuration space that relate set-theoretical models
to twisted SSEP models.

For a Lyubashenko map built on g, the separable bijections

    V(tau) = (tau_1, g(tau_2), ..., g^(L-1)(tau_L))
    U(tau) = (g^-(L-1)(tau_1), ..., g^-1(tau_(L-1)), tau_L)

turn every bulk bond move into the plain swap, and V carries the whole
generator onto the twisted SSEP with f = g^L. General families only admit
the non-separable versions built from the g_i and f_i.
"""

from dataclasses import dataclass
from typing import Literal

from src.algebra.permutation import Permutation, all_permutations, compose, power
from src.algebra.ybe import SolutionFamily, TwoSiteMap, general_map, lyubashenko_map
from src.config import DEFAULT_MAX_STATES
from src.core.exact import matrices_equal, matrix_entries
from src.core.exceptions import PreconditionError
from src.core.report import DEFAULT_REPORT_CAP, CheckReport
from src.models.configuration import ConfigBijection, all_configurations, decode, state_count
from src.models.generator import bond_moves, family_markov, set_theoretical_markov, twisted_ssep_matrix
from src.sectors.counting import count_sectors_closed_form
from src.sectors.engine import generator_kernel_dimension


def conjugation_V(g: Permutation, L: int) -> ConfigBijection:
    """Separable V with per-site maps Id, g, g^2, ..., g^(L-1)."""
    if L < 1:
        raise PreconditionError(f"L must be positive, got {L}")
    return ConfigBijection.separable_from([power(g, i) for i in range(L)])


def conjugation_U(g: Permutation, L: int) -> ConfigBijection:
    """Separable U with per-site maps (g^-1)^(L-i), i = 1..L."""
    if L < 1:
        raise PreconditionError(f"L must be positive, got {L}")
    return ConfigBijection.separable_from([power(g, -(L - i)) for i in range(1, L + 1)])


def conjugation_UV_general(fam: SolutionFamily, L: int, which: Literal["U", "V"]) -> ConfigBijection:
    """
    Non-separable U or V of a solution family.

    U(tau)_k = f_{tau_L} ... f_{tau_(k+1)}(tau_k)
    V(tau)_k = g_{tau_1} ... g_{tau_(k-1)}(tau_k)
    """
    if which not in ("U", "V"):
        raise PreconditionError(f"which must be 'U' or 'V', got {which!r}")
    if L < 1:
        raise PreconditionError(f"L must be positive, got {L}")
    g, f = fam.g, fam.f

    def rule_v(sites):
        out = []
        for k, v in enumerate(sites):
            for j in range(k - 1, -1, -1):
                v = g[sites[j]](v)
            out.append(v)
        return out

    def rule_u(sites):
        out = []
        for k, v in enumerate(sites):
            for j in range(k + 1, L):
                v = f[sites[j]](v)
            out.append(v)
        return out

    return ConfigBijection.from_function(fam.n, L, rule_v if which == "V" else rule_u)


def _check_bulk_swap(bijection: ConfigBijection, m: TwoSiteMap, L: int, name: str, cap: int) -> CheckReport:
    """W(r_{i,i+1} tau) == P_{i,i+1} W(tau) for every bulk bond i < L."""
    report = CheckReport(name=name, cap=cap)
    moves = bond_moves(m, L, max_states=None)
    n = m.n
    for k in range(L - 1):
        for code, sites in enumerate(all_configurations(n, L)):
            report.cases += 1
            left = decode(bijection.image[moves[k][code]], n, L)
            w = decode(bijection.image[code], n, L)
            right = w[:k] + (w[k + 1], w[k]) + w[k + 2:]
            if left != right:
                report.record((k, sites))
    return report


def check_conjugation_identity(
    g: Permutation,
    L: int,
    max_states: int | None = DEFAULT_MAX_STATES,
    cap: int = DEFAULT_REPORT_CAP,
) -> CheckReport:
    """
    The Lyubashenko generator of g equals V^-1 M_f V with f = g^L.

    Also checks that U, V and the general-family U, V all turn the bulk bond
    moves into plain swaps.
    """
    if L < 2:
        raise PreconditionError(f"periodic chains need L >= 2, got L={L}")
    state_count(g.n, L, max_states)
    f = power(g, L)
    m = lyubashenko_map(g)
    V = conjugation_V(g, L)

    report = CheckReport(name=f"conjugation(g={g}, L={L})", cases=g.n ** L, cap=cap)
    lhs = set_theoretical_markov(m, L, max_states=max_states).to_domain_matrix()
    Vm = V.matrix()
    rhs = Vm.transpose() * twisted_ssep_matrix(f, L, max_states=max_states).to_domain_matrix() * Vm
    if not matrices_equal(lhs, rhs):
        for key, value in sorted(matrix_entries(lhs - rhs).items()):
            report.record(("generator", key, value))

    family = SolutionFamily.lyubashenko(g)
    for name, bijection in (
        ("bulk_V", V),
        ("bulk_U", conjugation_U(g, L)),
        ("bulk_V_general", conjugation_UV_general(family, L, "V")),
        ("bulk_U_general", conjugation_UV_general(family, L, "U")),
    ):
        part = _check_bulk_swap(bijection, m, L, name, cap)
        report.cases += part.cases
        for violation in part.violations:
            report.record((name, violation))

    report.notes["twist"] = str(f)
    return report


def check_family_conjugation(fam: SolutionFamily, L: int, cap: int = DEFAULT_REPORT_CAP) -> CheckReport:
    """r_{i,i+1} == U^-1 P_{i,i+1} U == V^-1 P_{i,i+1} V for the non-separable U, V."""
    m = general_map(fam)
    report = CheckReport(name=f"family_conjugation(L={L})", cap=cap)
    for which in ("U", "V"):
        report.merge(_check_bulk_swap(conjugation_UV_general(fam, L, which), m, L, which, cap))
    return report


@dataclass(frozen=True)
class SeparableWitness:
    first: Permutation
    second: Permutation


def is_separably_conjugate(fam: SolutionFamily) -> SeparableWitness | None:
    """
    A separable W = (w1, w2) with W r W^-1 = P on two sites, or None.

    W can always be normalised to w1 = Id, which forces w2 = g_0; the
    candidate is then checked on every pair.
    """
    m = general_map(fam)
    w1, w2 = Permutation.identity(fam.n), fam.g[0]
    for i in range(fam.n):
        for j in range(fam.n):
            x, y = m(i, j)
            if (w1(x), w2(y)) != (w2(j), w1(i)):
                return None
    return SeparableWitness(first=w1, second=w2)


def cycle_type_representatives(n: int) -> list[Permutation]:
    """One permutation per cycle type of S_n, first in lexicographic order."""
    seen: dict[tuple[int, ...], Permutation] = {}
    for p in all_permutations(n):
        seen.setdefault(p.cycle_type, p)
    return list(seen.values())


def check_family_nonequivalence(
    fam: SolutionFamily,
    L: int,
    max_states: int | None = DEFAULT_MAX_STATES,
    cap: int = DEFAULT_REPORT_CAP,
) -> CheckReport:
    """
    Certify that the family model is not a twisted SSEP in disguise.

    Passes when dim ker M of the family generator differs from the sector
    count of every twist class of S_N; conjugating by the family's U or V
    must then also miss every twisted SSEP generator.
    """
    M = family_markov(fam, L, max_states=max_states)
    kernel = generator_kernel_dimension(M)
    counts = {str(p): count_sectors_closed_form(p, L) for p in cycle_type_representatives(fam.n)}

    report = CheckReport(name=f"family_nonequivalence(L={L})", cases=len(counts), cap=cap)
    report.notes["kernel_dimension"] = kernel
    report.notes["twisted_counts"] = counts
    for twist, count in counts.items():
        if count == kernel:
            report.record(("kernel_matches", twist, count))

    generator = M.to_domain_matrix()
    for which in ("U", "V"):
        W = conjugation_UV_general(fam, L, which).matrix()
        conjugated = W * generator * W.transpose()
        for f in all_permutations(fam.n):
            report.cases += 1
            if matrices_equal(conjugated, twisted_ssep_matrix(f, L, max_states=max_states).to_domain_matrix()):
                report.record(("conjugate_matches", which, str(f)))
    return report


def compose_bijections(a: ConfigBijection, b: ConfigBijection) -> ConfigBijection:
    """a after b."""
    if (a.n, a.L) != (b.n, b.L):
        raise PreconditionError("bijections act on different configuration spaces")
    maps = None
    if a.site_maps is not None and b.site_maps is not None:
        maps = tuple(compose(p, q) for p, q in zip(a.site_maps, b.site_maps))
    return ConfigBijection(n=a.n, L=a.L, image=tuple(a.image[t] for t in b.image), site_maps=maps)
