"""
Transfer matrices t(z) = tr_0 R_{0,L}(z) ... R_{0,1}(z) T_0 and their checks.

R(z) = P R̂(z) with R̂(z) = (z r + Id)/(z + 1). The optional constant twist
T = f^-1 acts on the auxiliary space before the first factor.

Each factor sends a basis state (aux a, site s) to two terms:
    z/(z+1):  (x, y) = r(a, s), then the swap leaves aux = y, site = x
    1/(z+1):  the bare swap, aux = s, site = a
Columns are propagated one configuration at a time as sparse dicts, so no
(N^(L+1))-dimensional operator is ever materialised.

Usage:
    from src.models.transfer import transfer_matrix, check_hamiltonian_extraction

    t = transfer_matrix(m, L=3, z=Fraction(1, 2))
    check_hamiltonian_extraction(m, L=3).passed
"""

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from sympy.polys.matrices import DomainMatrix

from src.algebra.permutation import Permutation
from src.algebra.ybe import TwoSiteMap, baxterize
from src.config import DEFAULT_MAX_STATES
from src.core.exact import check_pole, matrices_equal, matrix_entries, sparse_matrix
from src.core.exceptions import PreconditionError
from src.core.report import DEFAULT_REPORT_CAP, CheckReport
from src.models.configuration import all_configurations, encode, state_count
from src.models.generator import twisted_model_matrix

# One factor of the auxiliary product: (weight, apply r before the swap)
Factor = list[tuple[Fraction, bool]]


def _traced_product(
    m: TwoSiteMap,
    L: int,
    factors: Sequence[Factor],
    twist: Permutation | None,
) -> dict[tuple[int, int], Fraction]:
    n = m.n
    inv = twist.inverse() if twist is not None else None
    entries: dict[tuple[int, int], Fraction] = {}

    for col, sites in enumerate(all_configurations(n, L)):
        for a in range(n):
            start = inv(a) if inv is not None else a
            states: dict[tuple[int, tuple[int, ...]], Fraction] = {(start, sites): Fraction(1)}
            for k in range(L):
                nxt: dict[tuple[int, tuple[int, ...]], Fraction] = {}
                for (aux, cfg), coeff in states.items():
                    s = cfg[k]
                    for weight, use_r in factors[k]:
                        if use_r:
                            x, y = m(aux, s)
                            new_aux, new_site = y, x
                        else:
                            new_aux, new_site = s, aux
                        key = (new_aux, cfg[:k] + (new_site,) + cfg[k + 1:])
                        nxt[key] = nxt.get(key, Fraction(0)) + coeff * weight
                states = {key: c for key, c in nxt.items() if c}
            for (aux, cfg), coeff in states.items():
                if aux == a:
                    row = encode(cfg, n)
                    entries[(row, col)] = entries.get((row, col), Fraction(0)) + coeff
    return entries


def transfer_matrix(
    m: TwoSiteMap,
    L: int,
    z: Fraction,
    twist: Permutation | None = None,
    max_states: int | None = DEFAULT_MAX_STATES,
) -> DomainMatrix:
    """Exact t(z) on the N^L configurations."""
    z = Fraction(z)
    check_pole(z)
    dim = state_count(m.n, L, max_states)
    factor: Factor = [(z / (z + 1), True), (1 / (z + 1), False)]
    return sparse_matrix(_traced_product(m, L, [factor] * L, twist), dim)


def transfer_derivative_at_zero(
    m: TwoSiteMap,
    L: int,
    twist: Permutation | None = None,
    max_states: int | None = DEFAULT_MAX_STATES,
) -> DomainMatrix:
    """
    t'(0) by the product rule.

    R(0) = P and R'(0) = P r - P; the twist is constant so it contributes no term.
    """
    dim = state_count(m.n, L, max_states)
    plain: Factor = [(Fraction(1), False)]
    derived: Factor = [(Fraction(1), True), (Fraction(-1), False)]
    total: dict[tuple[int, int], Fraction] = {}
    for k in range(L):
        factors = [derived if j == k else plain for j in range(L)]
        for key, value in _traced_product(m, L, factors, twist).items():
            total[key] = total.get(key, Fraction(0)) + value
    return sparse_matrix(total, dim)


def _permutation_inverse(matrix: DomainMatrix) -> DomainMatrix:
    """Inverse of a permutation matrix; anything else is rejected."""
    entries = matrix_entries(matrix)
    cols = {col for _, col in entries}
    rows = {row for row, _ in entries}
    size = matrix.shape[0]
    if len(entries) != size or len(rows) != size or len(cols) != size or any(v != 1 for v in entries.values()):
        raise PreconditionError("t(0) is not a permutation matrix")
    return sparse_matrix({(col, row): 1 for row, col in entries}, size)


def check_hamiltonian_extraction(
    m: TwoSiteMap,
    L: int,
    twist: Permutation | None = None,
    max_states: int | None = DEFAULT_MAX_STATES,
    cap: int = DEFAULT_REPORT_CAP,
) -> CheckReport:
    """M == t(0)^-1 t'(0) entrywise, against the bond-built generator."""
    t0 = transfer_matrix(m, L, Fraction(0), twist=twist, max_states=max_states)
    extracted = _permutation_inverse(t0) * transfer_derivative_at_zero(m, L, twist=twist, max_states=max_states)
    expected = twisted_model_matrix(m, L, twist, max_states=max_states).to_domain_matrix()

    report = CheckReport(name="hamiltonian_extraction", cases=m.n ** L, cap=cap)
    if not matrices_equal(extracted, expected):
        for key, value in sorted(matrix_entries(extracted - expected).items()):
            report.record((key, value))
    return report


def default_grid(L: int) -> list[Fraction]:
    """1/2, 1/3, ..., 1/(L+2): L+1 points, enough for degree-L numerators."""
    return [Fraction(1, k) for k in range(2, L + 3)]


def check_transfer_commutation(
    m: TwoSiteMap,
    L: int,
    grid: Iterable[Fraction] | None = None,
    twist: Permutation | None = None,
    max_states: int | None = DEFAULT_MAX_STATES,
    cap: int = DEFAULT_REPORT_CAP,
) -> CheckReport:
    """[t(z), t(z')] == 0 exactly for every pair of grid points."""
    grid = default_grid(L) if grid is None else [Fraction(z) for z in grid]
    cache = {z: transfer_matrix(m, L, z, twist=twist, max_states=max_states) for z in grid}

    report = CheckReport(name="transfer_commutation", cap=cap)
    for z1, z2 in combinations(grid, 2):
        report.cases += 1
        a, b = cache[z1], cache[z2]
        if not matrices_equal(a * b, b * a):
            report.record((z1, z2))
    return report


def check_integrable_twist_matrix(
    m: TwoSiteMap,
    twist_matrix: DomainMatrix,
    u: Fraction,
    v: Fraction,
    cap: int = DEFAULT_REPORT_CAP,
) -> CheckReport:
    """R̂(u-v)(T⊗T) == (T⊗T)R̂(u-v) for a constant N x N twist matrix T."""
    n = m.n
    if twist_matrix.shape != (n, n):
        raise PreconditionError(f"twist must be {n} x {n}, got {twist_matrix.shape}")
    if twist_matrix.to_sparse().rank() != n:
        raise PreconditionError("twist candidate is not invertible")
    u, v = Fraction(u), Fraction(v)
    check_pole(u - v)

    t = matrix_entries(twist_matrix)
    tt = sparse_matrix(
        {
            (r1 * n + r2, c1 * n + c2): a * b
            for (r1, c1), a in t.items()
            for (r2, c2), b in t.items()
        },
        n * n,
    )
    R = baxterize(m, u - v)
    report = CheckReport(name="integrable_twist", cases=n ** 4, cap=cap)
    if not matrices_equal(R * tt, tt * R):
        for key, value in sorted(matrix_entries(R * tt - tt * R).items()):
            report.record((key, value))
    return report


def check_integrable_twist(
    m: TwoSiteMap,
    twist: Permutation,
    u: Fraction,
    v: Fraction,
    cap: int = DEFAULT_REPORT_CAP,
) -> CheckReport:
    """Integrable-twist relation for T = f^-1 as a permutation matrix."""
    inv = twist.inverse()
    matrix = sparse_matrix({(inv(i), i): 1 for i in range(twist.n)}, twist.n)
    return check_integrable_twist_matrix(m, matrix, u, v, cap=cap)
