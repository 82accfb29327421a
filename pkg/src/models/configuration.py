"""
Lattice configurations and bijections of the configuration space.

A configuration is an L-tuple over {0..N-1}, encoded as the integer
sum(sites[i] * N**(L-1-i)); site 0 is the most significant digit.
"""

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from sympy.polys.matrices import DomainMatrix

from src.algebra.permutation import Permutation
from src.config import DEFAULT_MAX_STATES
from src.core.exact import permutation_matrix
from src.core.exceptions import BoundExceededError, NotBijectiveError, PreconditionError, SizeMismatchError


def state_count(n: int, L: int, max_states: int | None = DEFAULT_MAX_STATES) -> int:
    """N^L, refusing sizes beyond ``max_states`` (None disables the bound)."""
    if n < 1 or L < 1:
        raise PreconditionError(f"need N >= 1 and L >= 1, got N={n}, L={L}")
    dim = n ** L
    if max_states is not None and dim > max_states:
        raise BoundExceededError(f"N^L = {n}^{L} = {dim} exceeds max_states={max_states}")
    return dim


@dataclass(frozen=True)
class Configuration:
    n: int
    sites: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))
        for i, v in enumerate(self.sites):
            if not 0 <= v < self.n:
                raise PreconditionError(f"site {i + 1} holds {v}, outside 0..{self.n - 1}")

    @property
    def L(self) -> int:
        return len(self.sites)

    def encode(self) -> int:
        return encode(self.sites, self.n)

    @classmethod
    def decode(cls, code: int, n: int, L: int) -> "Configuration":
        return cls(n=n, sites=decode(code, n, L))

    def __str__(self) -> str:
        return "(" + ",".join(str(v) for v in self.sites) + ")"


def encode(sites: Sequence[int], n: int) -> int:
    code = 0
    for v in sites:
        code = code * n + v
    return code


def decode(code: int, n: int, L: int) -> tuple[int, ...]:
    sites = [0] * L
    for i in range(L - 1, -1, -1):
        code, sites[i] = divmod(code, n)
    return tuple(sites)


def all_configurations(n: int, L: int) -> Iterator[tuple[int, ...]]:
    """Site tuples in encoding order."""
    for code in range(n ** L):
        yield decode(code, n, L)


@dataclass(frozen=True)
class ConfigBijection:
    """
    Bijection of the configuration space, stored as an image table of encodings.

    When ``site_maps`` is given the bijection is separable: site i is relabelled
    by site_maps[i] independently of the other sites.
    """
    n: int
    L: int
    image: tuple[int, ...]
    site_maps: tuple[Permutation, ...] | None = None

    def __post_init__(self):
        dim = self.n ** self.L
        if len(self.image) != dim:
            raise SizeMismatchError(f"image table has {len(self.image)} entries, expected {dim}")
        seen: dict[int, int] = {}
        for code, target in enumerate(self.image):
            if target in seen:
                raise NotBijectiveError(
                    f"configurations {decode(seen[target], self.n, self.L)} and "
                    f"{decode(code, self.n, self.L)} share the image {decode(target, self.n, self.L)}"
                )
            seen[target] = code
        if self.site_maps is not None:
            if len(self.site_maps) != self.L:
                raise SizeMismatchError(f"{len(self.site_maps)} site maps for L={self.L}")
            for code, target in enumerate(self.image):
                sites = decode(code, self.n, self.L)
                expected = tuple(p(v) for p, v in zip(self.site_maps, sites))
                if encode(expected, self.n) != target:
                    raise PreconditionError(f"image of {sites} disagrees with the per-site maps")

    @property
    def dim(self) -> int:
        return len(self.image)

    @property
    def separable(self) -> bool:
        return self.site_maps is not None

    def __call__(self, sites: Sequence[int]) -> tuple[int, ...]:
        return decode(self.image[encode(sites, self.n)], self.n, self.L)

    @classmethod
    def from_function(cls, n: int, L: int, rule: Callable[[tuple[int, ...]], Sequence[int]]) -> "ConfigBijection":
        return cls(n=n, L=L, image=tuple(encode(rule(s), n) for s in all_configurations(n, L)))

    @classmethod
    def separable_from(cls, site_maps: Sequence[Permutation]) -> "ConfigBijection":
        site_maps = tuple(site_maps)
        n = site_maps[0].n
        image = tuple(
            encode(tuple(p(v) for p, v in zip(site_maps, s)), n)
            for s in all_configurations(n, len(site_maps))
        )
        return cls(n=n, L=len(site_maps), image=image, site_maps=site_maps)

    def inverse(self) -> "ConfigBijection":
        inv = [0] * self.dim
        for code, target in enumerate(self.image):
            inv[target] = code
        maps = None if self.site_maps is None else tuple(p.inverse() for p in self.site_maps)
        return ConfigBijection(n=self.n, L=self.L, image=tuple(inv), site_maps=maps)

    def is_identity(self) -> bool:
        return all(code == target for code, target in enumerate(self.image))

    def matrix(self) -> DomainMatrix:
        """Permutation matrix |tau> -> |V(tau)>."""
        return permutation_matrix(self.image)
