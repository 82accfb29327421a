"""
Closed-form sector counts and cardinalities for twisted SSEP models.

For a twist f with cycle lengths c_1..c_n (species in canonical cycle order):

    |S|   = sum over nonempty X of C(L-1, |X|-1) * gcd(c_x, x in X)
    |C_p| = L! / prod(p_s!) * prod(c_s^p_s) / gcd(c_x, p_x > 0)

All values are exact Python integers.
"""

import math
from itertools import combinations
from typing import Iterator, Sequence

from src.algebra.permutation import Permutation
from src.core.exceptions import PreconditionError, SizeMismatchError


def multinomial(parts: Sequence[int]) -> int:
    """(sum parts)! / prod(part!)."""
    total, result = 0, 1
    for p in parts:
        if p < 0:
            raise PreconditionError(f"negative part {p} in multinomial")
        total += p
        result *= math.comb(total, p)
    return result


def compositions(length: int, total: int) -> Iterator[tuple[int, ...]]:
    """Every tuple of ``length`` nonnegative integers summing to ``total``."""
    if length == 1:
        yield (total,)
        return
    for value in range(total + 1):
        for rest in compositions(length - 1, total - value):
            yield (value,) + rest


def _require_length(L: int) -> None:
    if L < 2:
        raise PreconditionError(f"sector formulas need L >= 2, got L={L}")


def count_sectors_closed_form(f: Permutation, L: int) -> int:
    _require_length(L)
    lengths = f.cycles.lengths
    total = 0
    for size in range(1, len(lengths) + 1):
        weight = math.comb(L - 1, size - 1)
        if weight == 0:
            continue
        for subset in combinations(lengths, size):
            total += weight * math.gcd(*subset)
    return total


def count_sectors_equal_cycles(N: int, d: int, L: int) -> int:
    """Sectors for a twist made of d cycles of length N/d."""
    _require_length(L)
    if d < 1 or N % d:
        raise PreconditionError(f"d={d} does not divide N={N}")
    return (N // d) * math.comb(L + d - 1, L)


def ssep_sector_count(N: int, L: int) -> int:
    """Untwisted count C(N-1+L, N-1)."""
    return math.comb(N - 1 + L, N - 1)


def sector_cardinality_closed_form(f: Permutation, profile: Sequence[int]) -> int:
    """Size of any sector with the given profile; independent of its charge."""
    profile = tuple(profile)
    lengths = f.cycles.lengths
    if len(profile) != len(lengths):
        raise SizeMismatchError(f"profile has {len(profile)} entries, twist has {len(lengths)} species")
    L = sum(profile)
    _require_length(L)
    relevant = [c for c, p in zip(lengths, profile) if p > 0]
    weight = math.prod(c ** p for c, p in zip(lengths, profile))
    return multinomial(profile) * weight // math.gcd(*relevant)


def divisors(N: int) -> list[int]:
    return [d for d in range(1, N + 1) if N % d == 0]


def equal_cycle_counts(N: int, L: int) -> list[tuple[int, int]]:
    """(d, count) over every divisor d of N."""
    return [(d, count_sectors_equal_cycles(N, d, L)) for d in divisors(N)]
