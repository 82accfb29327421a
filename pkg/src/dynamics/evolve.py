"""
Master-equation evolution d|P>/dt = M|P> by uniformization.

    e^{tM} = sum_k Pois(k; lambda t) (I + M/lambda)^k,  lambda = max|diag| + 1

Only nonnegative combinations of a stochastic matrix are formed, so
positivity is preserved. Long times are split into chunks with
lambda * dt <= MAX_CHUNK_WEIGHT so the leading Poisson weight never underflows.

Usage:
    from src.dynamics.evolve import ProbabilityVector, evolve

    P0 = ProbabilityVector.point_mass(n=2, L=2, sites=(0, 0))
    P = evolve(M, P0, t=50.0, tol=1e-12)
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from src.algebra.permutation import Permutation
from src.config import DEFAULT_MAX_STATES, DEFAULT_TOL
from src.core.exceptions import PreconditionError, SizeMismatchError
from src.models.configuration import Configuration, decode
from src.models.generator import RateMatrix, twisted_ssep_matrix
from src.sectors.engine import Sector, StationaryState, enumerate_sectors

MAX_CHUNK_WEIGHT = 50.0
MAX_POISSON_TERMS = 2000
CONVERGENCE_THRESHOLD = 1e-10
# Per-chunk truncation floor; float64 sums cannot resolve 1 - cumulative below this
BUDGET_FLOOR = 1e-14


@dataclass
class ProbabilityVector:
    """
    Distribution over the N^L configurations.

    ``weights`` is always populated; ``exact`` holds the same distribution as
    Fractions when it was produced without floating point. ``error_bound``
    accumulates the truncation error of every evolve() call behind it.
    """
    n: int
    L: int
    weights: np.ndarray
    exact: dict[int, Fraction] | None = None
    error_bound: float = 0.0

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.shape != (self.n ** self.L,):
            raise SizeMismatchError(f"vector of length {self.weights.shape} for N^L = {self.n ** self.L}")

    @property
    def dim(self) -> int:
        return self.n ** self.L

    @classmethod
    def from_exact(cls, n: int, L: int, exact: Mapping[int, Fraction]) -> "ProbabilityVector":
        exact = {code: Fraction(w) for code, w in sorted(exact.items()) if w}
        if any(not 0 <= code < n ** L for code in exact):
            raise PreconditionError(f"configuration index outside 0..{n ** L - 1}")
        if any(w < 0 for w in exact.values()):
            raise PreconditionError("probabilities must be nonnegative")
        if sum(exact.values(), Fraction(0)) != 1:
            raise PreconditionError("probabilities must sum to 1")
        weights = np.zeros(n ** L)
        for code, w in exact.items():
            weights[code] = float(w)
        return cls(n=n, L=L, weights=weights, exact=exact)

    @classmethod
    def point_mass(cls, n: int, L: int, sites: Sequence[int]) -> "ProbabilityVector":
        config = Configuration(n=n, sites=sites)
        if config.L != L:
            raise PreconditionError(f"configuration of length {config.L} for L={L}")
        return cls.from_exact(n, L, {config.encode(): Fraction(1)})

    @classmethod
    def from_state(cls, n: int, L: int, state: StationaryState) -> "ProbabilityVector":
        return cls.from_exact(n, L, state.weights)

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def total_variation(self, other: "ProbabilityVector") -> float:
        if other.dim != self.dim:
            raise SizeMismatchError(f"cannot compare vectors of length {self.dim} and {other.dim}")
        return 0.5 * float(np.abs(self.weights - other.weights).sum())

    def sector_weights(self, sectors: Sequence[Sector]) -> dict[int, Fraction | float]:
        """Probability carried by each sector; exact when the vector is."""
        if self.exact is not None:
            return {
                s.id: sum((self.exact.get(code, Fraction(0)) for code in s.members), Fraction(0))
                for s in sectors
            }
        return {s.id: float(self.weights[list(s.members)].sum()) for s in sectors}

    def site_occupation(self) -> np.ndarray:
        """L x N matrix: probability that site i holds value v."""
        occupation = np.zeros((self.L, self.n))
        for code in np.flatnonzero(self.weights):
            for i, v in enumerate(decode(int(code), self.n, self.L)):
                occupation[i, v] += self.weights[code]
        return occupation


def _validate(t: float, tol: float) -> None:
    if not math.isfinite(t) or t < 0:
        raise PreconditionError(f"time must be finite and nonnegative, got {t}")
    if not tol > 0:
        raise PreconditionError(f"tolerance must be positive, got {tol}")


def evolve(M: RateMatrix, P0: ProbabilityVector, t: float, tol: float = DEFAULT_TOL) -> ProbabilityVector:
    """
    e^{tM} P0 with total-variation error at most ``error_bound`` of the result.

    The bound is max(tol, chunks * BUDGET_FLOOR): runs with
    lambda * t > MAX_CHUNK_WEIGHT * tol / BUDGET_FLOOR cannot reach ``tol`` in
    float64 and report the larger bound instead.
    """
    _validate(t, tol)
    if P0.dim != M.dim:
        raise SizeMismatchError(f"vector of length {P0.dim} for a generator of size {M.dim}")
    if t == 0:
        return P0

    A = M.to_scipy()
    lam = max((abs(float(d)) for d in M.diagonal), default=0.0) + 1.0
    chunks = max(1, math.ceil(lam * t / MAX_CHUNK_WEIGHT))
    weight = lam * t / chunks
    budget = max(tol / chunks, BUDGET_FLOOR)

    v = P0.weights.copy()
    for _ in range(chunks):
        term = v
        w = math.exp(-weight)
        acc = w * term
        cumulative = w
        k = 0
        while cumulative < 1.0 - budget and k < MAX_POISSON_TERMS:
            k += 1
            term = term + (A @ term) / lam
            w *= weight / k
            acc = acc + w * term
            cumulative += w
            if w == 0.0 or (k > weight and w < budget * 1e-3):
                break
        np.clip(acc, 0.0, None, out=acc)
        v = acc / acc.sum()
    return ProbabilityVector(n=P0.n, L=P0.L, weights=v, error_bound=P0.error_bound + chunks * budget)


def evolve_to_convergence(
    M: RateMatrix,
    P0: ProbabilityVector,
    tol: float = DEFAULT_TOL,
    t0: float = 1.0,
    threshold: float = CONVERGENCE_THRESHOLD,
    max_doublings: int = 40,
) -> tuple[ProbabilityVector, float]:
    """Double t until successive outputs differ by less than ``threshold`` in total variation."""
    t = t0
    current = evolve(M, P0, t, tol)
    for _ in range(max_doublings):
        nxt = evolve(M, current, t, tol)
        t *= 2
        if nxt.total_variation(current) < threshold:
            return nxt, t
        current = nxt
    return current, t


@dataclass
class Mixture:
    """Convex combination of uniform sector states."""
    sectors: list[Sector]
    weights: dict[int, Fraction | float]

    def to_vector(self, n: int, L: int) -> ProbabilityVector:
        exact_weights = all(isinstance(w, Fraction) for w in self.weights.values())
        if exact_weights:
            exact: dict[int, Fraction] = {}
            for s in self.sectors:
                w = self.weights.get(s.id, Fraction(0))
                if w:
                    share = w / s.size
                    for code in s.members:
                        exact[code] = share
            return ProbabilityVector.from_exact(n, L, exact)
        weights = np.zeros(n ** L)
        for s in self.sectors:
            w = float(self.weights.get(s.id, 0.0))
            if w:
                weights[list(s.members)] = w / s.size
        return ProbabilityVector(n=n, L=L, weights=weights)


def sector_projection(M: RateMatrix, P0: ProbabilityVector, twist: Permutation | None = None) -> Mixture:
    """Limit of e^{tM} P0: each sector keeps its weight, spread uniformly."""
    sectors = enumerate_sectors(M, twist=twist)
    weights = P0.sector_weights(sectors)
    return Mixture(sectors=sectors, weights={k: w for k, w in weights.items() if w})


def long_time_limit(
    initial: ProbabilityVector | StationaryState,
    f2: Permutation,
    L: int,
    max_states: int | None = DEFAULT_MAX_STATES,
) -> Mixture:
    """Mixture of f2 stationary states reached after quenching ``initial`` to twist f2."""
    if isinstance(initial, StationaryState):
        initial = ProbabilityVector.from_state(f2.n, L, initial)
    M = twisted_ssep_matrix(f2, L, max_states=max_states)
    return sector_projection(M, initial, twist=f2)


def stationary_currents(M: RateMatrix, state: Mapping[int, Fraction]) -> dict[tuple[int, int], Fraction]:
    """Every nonzero j(a -> b) = M[b, a] S(a) - M[a, b] S(b)."""
    currents: dict[tuple[int, int], Fraction] = {}
    for (b, a), rate in M.rates.items():
        if a >= b and (a, b) in M.rates:
            continue
        j = rate * state.get(a, Fraction(0)) - M.rates.get((a, b), Fraction(0)) * state.get(b, Fraction(0))
        if j:
            currents[(a, b)] = j
    return dict(sorted(currents.items()))
