"""
Permutation algebra over {0..N-1}.

Composition, powers, canonical cycle decomposition, the species/charge
relabelling induced by a cycle decomposition, gcd of cycle lengths and
brute-force L-th roots.

Cycle notation is the text format: "(0 2)(1)", "()" or "id" for the
identity, and one-line image notation "[2,1,0]" is accepted too.

Usage:
    from src.algebra.permutation import Permutation, power, cycle_decomposition

    g = Permutation.parse("(0 1 2 3)")
    print(cycle_decomposition(power(g, 2)))   # (0 2)(1 3)
"""

import itertools
import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

from src.config import DEFAULT_ROOT_SEARCH_BOUND
from src.core.exceptions import (
    BoundExceededError,
    NotBijectiveError,
    ParseError,
    PreconditionError,
    SizeMismatchError,
)

_CYCLE_RE = re.compile(r"\(([^()]*)\)")
_IMAGE_RE = re.compile(r"^\[([^\[\]]*)\]$")


@dataclass(frozen=True)
class Permutation:
    """A bijection of {0..n-1}; image[i] is the image of i."""
    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(v) for v in self.image)
        object.__setattr__(self, "image", image)
        n = len(image)
        if n == 0:
            raise PreconditionError("a permutation needs a nonempty alphabet")
        seen: dict[int, int] = {}
        for i, v in enumerate(image):
            if not 0 <= v < n:
                raise NotBijectiveError(f"image of {i} is {v}, outside 0..{n - 1}")
            if v in seen:
                raise NotBijectiveError(f"{seen[v]} and {i} both map to {v}")
            seen[v] = i

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i]

    def __len__(self) -> int:
        return len(self.image)

    def __str__(self) -> str:
        return str(cycle_decomposition(self))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def full_cycle(cls, n: int) -> "Permutation":
        """The N-cycle (0 1 ... N-1)."""
        return cls(tuple((i + 1) % n for i in range(n)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Iterable[int]], n: int) -> "Permutation":
        image = list(range(n))
        touched: set[int] = set()
        for cycle in cycles:
            cycle = list(cycle)
            for k, v in enumerate(cycle):
                if not 0 <= v < n:
                    raise NotBijectiveError(f"cycle element {v} outside 0..{n - 1}")
                if v in touched:
                    raise NotBijectiveError(f"value {v} appears in more than one cycle position")
                touched.add(v)
                image[v] = cycle[(k + 1) % len(cycle)]
        return cls(tuple(image))

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Permutation":
        """
        Parse cycle notation or one-line image notation.

        Args:
            text: "(0 2)(1)", "(0,1,2)", "()", "id", or "[2,1,0]".
            n: Alphabet size. Required for "()"/"id"; inferred otherwise.

        Raises:
            ParseError: On malformed text or a size disagreement.
            NotBijectiveError: If the table is not a bijection.
        """
        raw = text.strip()
        match = _IMAGE_RE.match(raw)
        if match:
            body = match.group(1).strip()
            try:
                values = [int(tok) for tok in re.split(r"[\s,]+", body) if tok]
            except ValueError as e:
                raise ParseError(f"bad image notation {text!r}") from e
            if n is not None and len(values) != n:
                raise ParseError(f"image notation {text!r} has {len(values)} entries, expected {n}")
            return cls(tuple(values))

        if raw.lower() in ("id", "identity", ""):
            if n is None:
                raise ParseError("identity needs an explicit alphabet size")
            return cls.identity(n)

        leftover = _CYCLE_RE.sub("", raw)
        if leftover.strip():
            raise ParseError(f"unexpected text {leftover.strip()!r} in cycle notation {text!r}")
        cycles = []
        for body in _CYCLE_RE.findall(raw):
            try:
                cycles.append([int(tok) for tok in re.split(r"[\s,]+", body.strip()) if tok])
            except ValueError as e:
                raise ParseError(f"bad cycle ({body}) in {text!r}") from e
        largest = max((v for c in cycles for v in c), default=-1)
        if n is None:
            n = largest + 1
            if n == 0:
                raise ParseError("identity needs an explicit alphabet size")
        elif largest >= n:
            raise ParseError(f"value {largest} outside alphabet of size {n} in {text!r}")
        return cls.from_cycles(cycles, n)

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, v in enumerate(self.image):
            inv[v] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self.image))

    @cached_property
    def cycles(self) -> "CycleDecomposition":
        return cycle_decomposition(self)

    @property
    def order(self) -> int:
        """lcm of the cycle lengths."""
        return math.lcm(*self.cycles.lengths)

    @property
    def cycle_type(self) -> tuple[int, ...]:
        """Cycle lengths sorted decreasingly."""
        return tuple(sorted(self.cycles.lengths, reverse=True))


@dataclass(frozen=True)
class CycleDecomposition:
    """Disjoint cycles covering {0..n-1}, fixed points included as 1-cycles."""
    n: int
    cycles: tuple[tuple[int, ...], ...]

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cycles)

    def __len__(self) -> int:
        return len(self.cycles)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.cycles)

    def __str__(self) -> str:
        return "".join("(" + " ".join(str(v) for v in c) + ")" for c in self.cycles)

    def to_permutation(self) -> Permutation:
        return Permutation.from_cycles(self.cycles, self.n)


@dataclass(frozen=True)
class ChargeCoordinates:
    """
    Species/charge relabelling of {0..n-1} along the cycles of a permutation.

    Species are 1-based (s in 1..n_cycles), charges 0-based (e in 0..c_s-1).
    Value v is the e-th element of cycle s.
    """
    species_of: tuple[int, ...]
    charge_of: tuple[int, ...]
    cycle_lengths: tuple[int, ...]
    cycles: tuple[tuple[int, ...], ...]

    @property
    def n_species(self) -> int:
        return len(self.cycle_lengths)

    def value_of(self, species: int, charge: int) -> int:
        """Inverse lookup; the charge is taken modulo the cycle length."""
        cycle = self.cycles[species - 1]
        return cycle[charge % len(cycle)]

    def label(self, value: int) -> str:
        return f"{self.species_of[value]}^({self.charge_of[value]})"


def compose(p: Permutation, q: Permutation) -> Permutation:
    """result(i) = p(q(i))."""
    if p.n != q.n:
        raise SizeMismatchError(f"cannot compose permutations of sizes {p.n} and {q.n}")
    return Permutation(tuple(p.image[q.image[i]] for i in range(p.n)))


def power(p: Permutation, k: int) -> Permutation:
    """p applied k times; negative k uses the inverse."""
    base = p if k >= 0 else p.inverse()
    k = abs(k) % p.order
    image = list(range(p.n))
    for _ in range(k):
        image = [base.image[v] for v in image]
    return Permutation(tuple(image))


def cycle_decomposition(p: Permutation) -> CycleDecomposition:
    """Canonical form: each cycle starts at its minimum, cycles sorted by minimum."""
    visited = [False] * p.n
    cycles = []
    for start in range(p.n):
        if visited[start]:
            continue
        cycle = []
        v = start
        while not visited[v]:
            visited[v] = True
            cycle.append(v)
            v = p.image[v]
        cycles.append(tuple(cycle))
    return CycleDecomposition(n=p.n, cycles=tuple(cycles))


def charge_coordinates(p: Permutation) -> ChargeCoordinates:
    decomposition = p.cycles
    species_of = [0] * p.n
    charge_of = [0] * p.n
    for s, cycle in enumerate(decomposition.cycles, start=1):
        for e, v in enumerate(cycle):
            species_of[v] = s
            charge_of[v] = e
    return ChargeCoordinates(
        species_of=tuple(species_of),
        charge_of=tuple(charge_of),
        cycle_lengths=decomposition.lengths,
        cycles=decomposition.cycles,
    )


def gcd_cycle_lengths(p: Permutation, relevant: Iterable[int]) -> int:
    """gcd of the cycle lengths of the listed (1-based) species."""
    relevant = set(relevant)
    if not relevant:
        raise PreconditionError("gcd over an empty set of species")
    lengths = p.cycles.lengths
    for s in relevant:
        if not 1 <= s <= len(lengths):
            raise PreconditionError(f"species {s} outside 1..{len(lengths)}")
    return math.gcd(*(lengths[s - 1] for s in relevant))


def all_permutations(n: int) -> Iterator[Permutation]:
    """Every element of S_n, image tables in lexicographic order."""
    for image in itertools.permutations(range(n)):
        yield Permutation(image)


def lth_root(f: Permutation, L: int, search_bound: int = DEFAULT_ROOT_SEARCH_BOUND) -> Permutation | None:
    """
    Lexicographically smallest g with g^L = f, or None.

    Exhaustive over S_N, so N is capped by ``search_bound``.
    """
    if L < 1:
        raise PreconditionError(f"root order must be positive, got {L}")
    if f.n > search_bound:
        raise BoundExceededError(
            f"alphabet size {f.n} exceeds the root search bound {search_bound}"
        )
    for g in all_permutations(f.n):
        if power(g, L) == f:
            return g
    return None
