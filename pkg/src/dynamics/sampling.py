"""
Kinetic Monte Carlo trajectories of a generator.

Holding times are exponential with rate -M[c, c]; the next configuration is
drawn with probability proportional to the column's off-diagonal rates.
Randomness comes from numpy's Philox counter-based generator, so a seed
reproduces a trajectory bit for bit on every platform. Trajectory i of a
batch uses the i-th child of ``SeedSequence(seed)``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from src.core.exceptions import PreconditionError
from src.models.configuration import Configuration, decode, encode
from src.models.generator import RateMatrix


@dataclass(frozen=True)
class Event:
    time: float
    bond: int
    source: tuple[int, ...]
    target: tuple[int, ...]


@dataclass
class Trajectory:
    seed: int
    start: tuple[int, ...]
    t_max: float
    events: list[Event] = field(default_factory=list)
    stream: int = 0

    @property
    def final(self) -> tuple[int, ...]:
        return self.events[-1].target if self.events else self.start

    def state_at(self, t: float) -> tuple[int, ...]:
        state = self.start
        for event in self.events:
            if event.time > t:
                break
            state = event.target
        return state

    def visited(self) -> set[tuple[int, ...]]:
        return {self.start} | {e.target for e in self.events}


def _generator(seed: int | np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _run(M: RateMatrix, c0: Sequence[int], t_max: float, rng: np.random.Generator) -> list[Event]:
    events: list[Event] = []
    code = encode(c0, M.n)
    t = 0.0
    while True:
        rate = -float(M.diagonal[code])
        if rate <= 0.0:
            break
        t += rng.exponential(1.0 / rate)
        if t > t_max:
            break
        column = M.column(code)
        cumulative = np.cumsum([float(r) for _, r in column])
        pick = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
        target = column[min(pick, len(column) - 1)][0]

        bonds = M.bonds_between(code, target)
        bond = bonds[int(rng.integers(len(bonds)))] if bonds else -1
        events.append(Event(t, bond, decode(code, M.n, M.L), decode(target, M.n, M.L)))
        code = target
    return events


def _start(M: RateMatrix, c0: Sequence[int]) -> tuple[int, ...]:
    config = Configuration(n=M.n, sites=c0)
    if config.L != M.L:
        raise PreconditionError(f"configuration of length {config.L} for L={M.L}")
    return config.sites


def sample_trajectory(M: RateMatrix, c0: Sequence[int], t_max: float, seed: int = 0) -> Trajectory:
    if not t_max >= 0:
        raise PreconditionError(f"t_max must be nonnegative, got {t_max}")
    c0 = _start(M, c0)
    return Trajectory(seed=seed, start=c0, t_max=t_max, events=_run(M, c0, t_max, _generator(seed)))


def sample_trajectories(
    M: RateMatrix,
    c0: Sequence[int],
    t_max: float,
    count: int,
    seed: int = 0,
    workers: int = 1,
) -> list[Trajectory]:
    """``count`` independent trajectories; output does not depend on ``workers``."""
    if count < 0:
        raise PreconditionError(f"count must be nonnegative, got {count}")
    c0 = _start(M, c0)
    children = np.random.SeedSequence(seed).spawn(count)

    def one(i: int) -> Trajectory:
        events = _run(M, c0, t_max, _generator(children[i]))
        return Trajectory(seed=seed, start=c0, t_max=t_max, events=events, stream=i)

    if workers <= 1:
        return [one(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(count)))


def empirical_distribution(trajectories: Sequence[Trajectory], t: float) -> dict[tuple[int, ...], float]:
    """Fraction of trajectories in each configuration at time t."""
    counts: dict[tuple[int, ...], int] = {}
    for traj in trajectories:
        state = traj.state_at(t)
        counts[state] = counts.get(state, 0) + 1
    total = len(trajectories)
    return {state: c / total for state, c in sorted(counts.items())}
