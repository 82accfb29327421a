"""
Markov generators of set-theoretical models and of the twisted SSEP.

Every generator here is a sum of bond moves, M = sum_b (B_b - Id), where B_b
permutes configurations by applying a two-site map on bond b. Bonds 0..L-2
act on sites (i, i+1); bond L-1 is the periodic bond (L, 1) whose first
factor is site L.

Only positive off-diagonal rates are stored. The diagonal is derived from
them, so every column sums to zero by construction.

Usage:
    from src.algebra.permutation import Permutation
    from src.models.generator import twisted_ssep_matrix

    M = twisted_ssep_matrix(Permutation.parse("(0 1)"), L=3)
    M.to_scipy()  # float CSR copy for time evolution
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from sympy.polys.matrices import DomainMatrix

from src.algebra.permutation import Permutation
from src.algebra.ybe import SolutionFamily, TwoSiteMap, general_map
from src.config import DEFAULT_MAX_STATES
from src.core.exact import identity, matrices_equal, matrix_entries, sparse_matrix
from src.core.exceptions import PreconditionError
from src.core.report import DEFAULT_REPORT_CAP, CheckReport
from src.models.configuration import all_configurations, encode, state_count

# Two-site rate blocks are plain N^2 x N^2 exact matrices
TwoSiteRateBlock = DomainMatrix


@dataclass(eq=False)
class RateMatrix:
    """
    Sparse continuous-time Markov generator on N^L configurations.

    ``rates[(row, col)]`` is the rate of the jump col -> row.
    ``bond_moves[b][col]`` is the configuration reached from col through bond b
    (empty when the generator was not assembled from bonds).
    """
    n: int
    L: int
    rates: dict[tuple[int, int], Fraction]
    bond_moves: tuple[tuple[int, ...], ...] = ()
    label: str = ""
    _columns: dict[int, list[tuple[int, Fraction]]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        cleaned = {}
        for (row, col), rate in self.rates.items():
            rate = Fraction(rate)
            if row == col:
                raise PreconditionError(f"diagonal entry ({row}, {col}) must not be stored")
            if rate < 0:
                raise PreconditionError(f"negative rate {rate} at ({row}, {col})")
            if rate:
                cleaned[(row, col)] = rate
        self.rates = dict(sorted(cleaned.items()))
        for (row, col), rate in self.rates.items():
            self._columns.setdefault(col, []).append((row, rate))

    @classmethod
    def from_bond_moves(cls, n: int, L: int, moves: Sequence[Sequence[int]], label: str = "") -> "RateMatrix":
        rates: dict[tuple[int, int], Fraction] = {}
        for move in moves:
            for col, row in enumerate(move):
                if row != col:
                    rates[(row, col)] = rates.get((row, col), Fraction(0)) + 1
        return cls(n=n, L=L, rates=rates, bond_moves=tuple(tuple(m) for m in moves), label=label)

    @property
    def dim(self) -> int:
        return self.n ** self.L

    @cached_property
    def diagonal(self) -> tuple[Fraction, ...]:
        diag = [Fraction(0)] * self.dim
        for (_, col), rate in self.rates.items():
            diag[col] -= rate
        return tuple(diag)

    def column(self, col: int) -> list[tuple[int, Fraction]]:
        """Outgoing jumps (target, rate) from configuration ``col``, by target."""
        return self._columns.get(col, [])

    def entries(self) -> dict[tuple[int, int], Fraction]:
        """All nonzero entries, diagonal included, in (row, col) order."""
        out = dict(self.rates)
        for i, d in enumerate(self.diagonal):
            if d:
                out[(i, i)] = d
        return dict(sorted(out.items()))

    def is_symmetric(self) -> bool:
        return all(self.rates.get((col, row)) == rate for (row, col), rate in self.rates.items())

    def to_domain_matrix(self) -> DomainMatrix:
        return sparse_matrix(self.entries(), self.dim)

    def to_scipy(self) -> sp.csr_matrix:
        entries = self.entries()
        rows = np.fromiter((r for r, _ in entries), dtype=np.int64, count=len(entries))
        cols = np.fromiter((c for _, c in entries), dtype=np.int64, count=len(entries))
        vals = np.fromiter((float(v) for v in entries.values()), dtype=np.float64, count=len(entries))
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))

    def apply(self, vector: dict[int, Fraction]) -> dict[int, Fraction]:
        """Exact M·v for a sparse vector {encoding: weight}."""
        out: dict[int, Fraction] = {}
        for col, weight in vector.items():
            if not weight:
                continue
            out[col] = out.get(col, Fraction(0)) + self.diagonal[col] * weight
            for row, rate in self.column(col):
                out[row] = out.get(row, Fraction(0)) + rate * weight
        return {k: v for k, v in out.items() if v}

    def bonds_between(self, source: int, target: int) -> list[int]:
        return [b for b, move in enumerate(self.bond_moves) if move[source] == target and source != target]


def bond_moves(
    m: TwoSiteMap,
    L: int,
    twist: Permutation | None = None,
    max_states: int | None = DEFAULT_MAX_STATES,
) -> tuple[tuple[int, ...], ...]:
    """
    Configuration image of every bond move.

    With a twist f the periodic bond is conjugated by f on site L:
    (tau_L, tau_1) -> (f(x), y) where (x, y) = m(f^-1(tau_L), tau_1).
    """
    if L < 2:
        raise PreconditionError(f"periodic chains need L >= 2, got L={L}")
    n = m.n
    state_count(n, L, max_states)
    inv = twist.inverse() if twist is not None else None

    moves: list[list[int]] = [[] for _ in range(L)]
    for sites in all_configurations(n, L):
        for k in range(L - 1):
            x, y = m(sites[k], sites[k + 1])
            moved = sites[:k] + (x, y) + sites[k + 2:]
            moves[k].append(encode(moved, n))

        last, first = sites[L - 1], sites[0]
        if inv is not None:
            x, y = m(inv(last), first)
            x = twist(x)
        else:
            x, y = m(last, first)
        moved = (y,) + sites[1:L - 1] + (x,)
        moves[L - 1].append(encode(moved, n))
    return tuple(tuple(move) for move in moves)


def local_ssep_jump(n: int) -> TwoSiteRateBlock:
    """m = P - Id on two sites."""
    if n < 1:
        raise PreconditionError(f"alphabet size must be positive, got {n}")
    return TwoSiteMap.flip(n).matrix() - identity(n * n)


def twisted_jump(f: Permutation) -> TwoSiteRateBlock:
    """|tau_L, tau_1> -> |f(tau_1), f^-1(tau_L)>, minus the identity."""
    inv = f.inverse()
    move = TwoSiteMap.from_function(f.n, lambda a, b: (f(b), inv(a)))
    return move.matrix() - identity(f.n * f.n)


def factorized_twisted_jump(f: Permutation) -> TwoSiteRateBlock:
    """f_L m_{L,1} f_L^-1 with f acting on the first tensor factor."""
    n = f.n
    first = sparse_matrix({(f(a) * n + b, a * n + b): 1 for a in range(n) for b in range(n)}, n * n)
    first_inv = sparse_matrix({(a * n + b, f(a) * n + b): 1 for a in range(n) for b in range(n)}, n * n)
    return first * local_ssep_jump(n) * first_inv


def check_twisted_jump_factorization(f: Permutation, cap: int = DEFAULT_REPORT_CAP) -> CheckReport:
    report = CheckReport(name="twisted_jump_factorization", cases=f.n ** 4, cap=cap)
    direct, factored = twisted_jump(f), factorized_twisted_jump(f)
    if not matrices_equal(direct, factored):
        for key, value in sorted(matrix_entries(direct - factored).items()):
            report.record((key, value))
    return report


def set_theoretical_markov(m: TwoSiteMap, L: int, max_states: int | None = DEFAULT_MAX_STATES) -> RateMatrix:
    """M = sum_{i<L} m_{i,i+1} + m_{L,1} with m = r - Id."""
    if L < 2:
        raise PreconditionError(f"periodic chains need L >= 2, got L={L}")
    if not m.involutive:
        raise PreconditionError("set-theoretical generators need an involutive two-site map")
    return RateMatrix.from_bond_moves(m.n, L, bond_moves(m, L, max_states=max_states), label="set_theoretical")


def family_markov(fam: SolutionFamily, L: int, max_states: int | None = DEFAULT_MAX_STATES) -> RateMatrix:
    M = set_theoretical_markov(general_map(fam), L, max_states=max_states)
    M.label = "family"
    return M


def twisted_ssep_matrix(f: Permutation, L: int, max_states: int | None = DEFAULT_MAX_STATES) -> RateMatrix:
    """SSEP bonds 1..L-1 plus the bond (L, 1) twisted by f."""
    if L < 2:
        raise PreconditionError(f"periodic chains need L >= 2, got L={L}")
    moves = bond_moves(TwoSiteMap.flip(f.n), L, twist=f, max_states=max_states)
    return RateMatrix.from_bond_moves(f.n, L, moves, label=f"twisted_ssep{f}")


def twisted_model_matrix(
    m: TwoSiteMap,
    L: int,
    twist: Permutation | None,
    max_states: int | None = DEFAULT_MAX_STATES,
) -> RateMatrix:
    """Generator of a set-theoretical model whose periodic bond carries a constant twist."""
    if twist is None:
        return set_theoretical_markov(m, L, max_states=max_states)
    if not m.involutive:
        raise PreconditionError("set-theoretical generators need an involutive two-site map")
    return RateMatrix.from_bond_moves(m.n, L, bond_moves(m, L, twist=twist, max_states=max_states), label="twisted")


def check_generator(M: RateMatrix, cap: int = DEFAULT_REPORT_CAP) -> CheckReport:
    """Column sums, sign pattern and symmetry of a generator."""
    report = CheckReport(name="generator", cases=M.dim, cap=cap)
    sums = [Fraction(0)] * M.dim
    for (row, col), value in M.entries().items():
        sums[col] += value
        if row != col and value < 0:
            report.record(("negative_rate", row, col))
    for col, total in enumerate(sums):
        if total:
            report.record(("column_sum", col, total))
    if not M.is_symmetric():
        report.record(("asymmetric",))
    return report
