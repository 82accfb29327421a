"""
Branching probabilities between the sector structures of two twists.

After a quench from twist f1 to twist f2, the stationary state of an
f1-sector C relaxes into the mixture

    sum over f2-sectors C' of |C ∩ C'| / |C| * S(C')

Probabilities are exact intersection counts; the closed forms in
``closed_forms`` are independent cross-checks.

Usage:
    from src.quench.branching import branching_matrix, classify_relation

    B = branching_matrix(f1, f2, L=3)
    B.row(0)  # {f2-sector id: Fraction}
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from src.algebra.permutation import Permutation, power
from src.config import DEFAULT_MAX_STATES
from src.core.exceptions import PreconditionError, SizeMismatchError
from src.models.generator import twisted_ssep_matrix
from src.sectors.engine import Sector, enumerate_sectors, sector_index

# Pairwise relations between an f1-sector and an f2-sector
EQUAL = "equal"
INCLUDED = "included"
CONTAINS = "contains"
OVERLAP = "overlap"


@dataclass
class BranchingMatrix:
    """Rows: sectors of f1. Columns: sectors of f2. Entries prob(row -> col)."""
    f1: Permutation
    f2: Permutation
    L: int
    rows: list[Sector]
    cols: list[Sector]
    counts: dict[tuple[int, int], int]

    def probability(self, i: int, j: int) -> Fraction:
        return Fraction(self.counts.get((i, j), 0), self.rows[i].size)

    def row(self, i: int) -> dict[int, Fraction]:
        return {j: Fraction(c, self.rows[i].size) for (r, j), c in sorted(self.counts.items()) if r == i}

    def row_sums(self) -> list[Fraction]:
        sums = [Fraction(0)] * len(self.rows)
        for (i, _), c in self.counts.items():
            sums[i] += Fraction(c, self.rows[i].size)
        return sums

    def entries(self) -> dict[tuple[int, int], Fraction]:
        return {(i, j): Fraction(c, self.rows[i].size) for (i, j), c in sorted(self.counts.items())}


def _sectors(f: Permutation, L: int, max_states: int | None) -> list[Sector]:
    return enumerate_sectors(twisted_ssep_matrix(f, L, max_states=max_states), twist=f)


def branching_matrix(
    f1: Permutation,
    f2: Permutation,
    L: int,
    max_states: int | None = DEFAULT_MAX_STATES,
) -> BranchingMatrix:
    if f1.n != f2.n:
        raise SizeMismatchError(f"twists act on {f1.n} and {f2.n} values")
    rows = _sectors(f1, L, max_states)
    cols = _sectors(f2, L, max_states)
    col_of = sector_index(cols, f1.n ** L)

    counts: dict[tuple[int, int], int] = {}
    for sector in rows:
        for code in sector.members:
            key = (sector.id, col_of[code])
            counts[key] = counts.get(key, 0) + 1
    return BranchingMatrix(f1=f1, f2=f2, L=L, rows=rows, cols=cols, counts=dict(sorted(counts.items())))


@dataclass
class RelationReport:
    """
    How the sectors of f1 sit inside those of f2.

    verdict (quench f1 -> f2):
        identical  both partitions coincide
        spreading  every f1-sector lies inside one f2-sector
        splitting  every f2-sector lies inside one f1-sector
        mixed      neither
    """
    verdict: str
    pairs: dict[tuple[int, int], str]
    f1_power_of_f2: int | None
    violations: list[str] = field(default_factory=list)

    @property
    def reverse_verdict(self) -> str:
        """Verdict for the quench f2 -> f1."""
        return {"spreading": "splitting", "splitting": "spreading"}.get(self.verdict, self.verdict)

    @property
    def overlaps(self) -> list[tuple[int, int]]:
        return [pair for pair, kind in self.pairs.items() if kind == OVERLAP]

    @property
    def passed(self) -> bool:
        return not self.violations


def power_exponent(f1: Permutation, f2: Permutation) -> int | None:
    """Smallest k >= 1 with f1 == f2^k, or None."""
    for k in range(1, f2.order + 1):
        if power(f2, k) == f1:
            return k
    return None


def classify_relation(
    f1: Permutation,
    f2: Permutation,
    L: int,
    max_states: int | None = DEFAULT_MAX_STATES,
) -> RelationReport:
    B = branching_matrix(f1, f2, L, max_states=max_states)
    pairs: dict[tuple[int, int], str] = {}
    for (i, j), c in B.counts.items():
        size1, size2 = B.rows[i].size, B.cols[j].size
        if c == size1 and c == size2:
            pairs[(i, j)] = EQUAL
        elif c == size1:
            pairs[(i, j)] = INCLUDED
        elif c == size2:
            pairs[(i, j)] = CONTAINS
        else:
            pairs[(i, j)] = OVERLAP

    spreading = all(kind in (EQUAL, INCLUDED) for kind in pairs.values())
    splitting = all(kind in (EQUAL, CONTAINS) for kind in pairs.values())
    if spreading and splitting:
        verdict = "identical"
    elif spreading:
        verdict = "spreading"
    elif splitting:
        verdict = "splitting"
    else:
        verdict = "mixed"

    k = power_exponent(f1, f2)
    report = RelationReport(verdict=verdict, pairs=pairs, f1_power_of_f2=k)
    if k is not None and not spreading:
        report.violations.append(f"f1 = f2^{k} but some f2-sector is not a union of f1-sectors")
    return report


@dataclass
class SectorChainResult:
    """
    Induced chain on f1-sectors under repeated f1 -> f2 -> f1 quenches.

    ``nested`` is True when every f2-sector is a union of f1-sectors; the
    chain is built from the general branching matrices either way.
    """
    transition: dict[tuple[int, int], Fraction]
    distribution: dict[int, Fraction]
    fixed_point: dict[int, Fraction]
    block: list[int]
    fixed_point_verified: bool
    switches: int
    nested: bool


def _compose(a: dict[tuple[int, int], Fraction], b: dict[tuple[int, int], Fraction]) -> dict[tuple[int, int], Fraction]:
    by_row: dict[int, list[tuple[int, Fraction]]] = {}
    for (j, k), v in b.items():
        by_row.setdefault(j, []).append((k, v))
    out: dict[tuple[int, int], Fraction] = {}
    for (i, j), u in a.items():
        for k, v in by_row.get(j, []):
            out[(i, k)] = out.get((i, k), Fraction(0)) + u * v
    return {key: v for key, v in sorted(out.items()) if v}


def _step(distribution: dict[int, Fraction], transition: dict[tuple[int, int], Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for (i, j), p in transition.items():
        w = distribution.get(i)
        if w:
            out[j] = out.get(j, Fraction(0)) + w * p
    return dict(sorted((k, v) for k, v in out.items() if v))


def _rows_single_valued(B: BranchingMatrix) -> bool:
    """Each row sector meets exactly one column sector."""
    seen: set[int] = set()
    for i, _ in B.counts:
        if i in seen:
            return False
        seen.add(i)
    return True


def oscillation_chain(
    f1: Permutation,
    f2: Permutation,
    L: int,
    start: int,
    switches: int,
    max_states: int | None = DEFAULT_MAX_STATES,
) -> SectorChainResult:
    """
    Transition matrix B12·B21 on f1-sectors, the distribution after
    ``switches`` double quenches from ``start`` and its fixed point.

    The fixed point restricted to the block reachable from ``start`` is
    proportional to the f1-sector sizes; it is verified exactly.
    """
    if switches < 0:
        raise PreconditionError(f"switch count must be nonnegative, got {switches}")
    forward = branching_matrix(f1, f2, L, max_states=max_states)
    backward = branching_matrix(f2, f1, L, max_states=max_states)
    if not 0 <= start < len(forward.rows):
        raise PreconditionError(f"start sector {start} outside 0..{len(forward.rows) - 1}")
    transition = _compose(forward.entries(), backward.entries())

    distribution = {start: Fraction(1)}
    for _ in range(switches):
        distribution = _step(distribution, transition)

    neighbours: dict[int, set[int]] = {}
    for i, j in transition:
        neighbours.setdefault(i, set()).add(j)
    block, queue = {start}, deque([start])
    while queue:
        i = queue.popleft()
        for j in neighbours.get(i, ()):
            if j not in block:
                block.add(j)
                queue.append(j)

    total = sum(forward.rows[i].size for i in block)
    fixed = {i: Fraction(forward.rows[i].size, total) for i in sorted(block)}
    return SectorChainResult(
        transition=transition,
        distribution=distribution,
        fixed_point=fixed,
        block=sorted(block),
        fixed_point_verified=_step(fixed, transition) == fixed,
        switches=switches,
        nested=_rows_single_valued(forward),
    )
