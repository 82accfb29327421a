"""
Quench schedules: a start distribution followed by twist switches.

Format (one directive per line, '#' comments):
    N=4                                     # optional; otherwise inferred from the first twist
    L=3
    start=config:0,0,1                      # point mass
    start=sector:2 start-twist=(0 1 2 3)    # uniform on a sector of a twist
    step twist=(0 2)(1 3) mode=stationary   # relax to the exact sector projection
    step twist=(0 1 2 3) mode=duration t=2.5

Stationary steps are exact; a duration step switches the run to floating point
(uniformization) from then on.
"""

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from src.algebra.permutation import Permutation
from src.config import DEFAULT_MAX_STATES, DEFAULT_TOL
from src.core.exact import format_rational
from src.core.exceptions import ModelError, ParseError, PreconditionError
from src.core.syntax import Field, fields_by_line, parse_fields
from src.dynamics.evolve import ProbabilityVector, evolve, sector_projection
from src.models.generator import twisted_ssep_matrix
from src.sectors.engine import enumerate_sectors, stationary_state

Mode = Literal["stationary", "duration"]


@dataclass(frozen=True)
class QuenchStep:
    twist: Permutation
    mode: Mode
    duration: float = 0.0


@dataclass(frozen=True)
class QuenchSchedule:
    L: int
    steps: tuple[QuenchStep, ...]
    start_config: tuple[int, ...] | None = None
    start_sector: int | None = None
    start_twist: Permutation | None = None

    def __post_init__(self):
        if not self.steps:
            raise PreconditionError("a schedule needs at least one step")
        n = self.steps[0].twist.n
        for step in self.steps:
            if step.twist.n != n:
                raise PreconditionError(f"twist {step.twist} acts on {step.twist.n} values, expected {n}")
        if (self.start_config is None) == (self.start_sector is None):
            raise PreconditionError("exactly one of a start configuration or a start sector is required")

    @property
    def n(self) -> int:
        return self.steps[0].twist.n


@dataclass
class StepResult:
    index: int
    step: QuenchStep
    sector_weights: dict[int, Fraction | float]
    sector_labels: dict[int, str]


def _permutation(field: Field, n: int | None = None) -> Permutation:
    if not isinstance(field.value, str):
        raise field.error(f"{field.key} needs a permutation")
    try:
        return Permutation.parse(field.value, n=n)
    except ModelError as e:
        raise field.error(f"bad permutation {field.value!r}: {e}") from e


def _integer(field: Field) -> int:
    try:
        return int(field.value)
    except (TypeError, ValueError) as e:
        raise field.error(f"{field.key} must be an integer, got {field.value!r}") from e


def parse_schedule(text: str) -> QuenchSchedule:
    L = None
    N = None
    start: Field | None = None
    start_twist: Field | None = None
    raw_steps: list[list[Field]] = []

    for line in fields_by_line(parse_fields(text)):
        head = line[0]
        if head.key == "step" and head.value is None:
            raw_steps.append(line)
            continue
        for field in line:
            if field.key == "N":
                N = _integer(field)
            elif field.key == "L":
                L = _integer(field)
            elif field.key == "start":
                start = field
            elif field.key == "start-twist":
                start_twist = field
            else:
                raise field.error(f"unknown directive {field.key!r}")

    if L is None:
        raise ParseError("missing L", 1, 1)
    if not raw_steps:
        raise ParseError("schedule has no steps", 1, 1)

    steps = []
    for line in raw_steps:
        values = {f.key: f for f in line[1:]}
        unknown = set(values) - {"twist", "mode", "t"}
        if unknown:
            raise values[sorted(unknown)[0]].error(f"unknown step field {sorted(unknown)[0]!r}")
        if "twist" not in values:
            raise line[0].error("step without twist")
        n = steps[0].twist.n if steps else N
        twist = _permutation(values["twist"], n)
        mode_field = values.get("mode")
        mode = mode_field.value if mode_field else "stationary"
        if mode not in ("stationary", "duration"):
            raise mode_field.error(f"mode must be stationary or duration, got {mode!r}")
        duration = 0.0
        if mode == "duration":
            if "t" not in values:
                raise line[0].error("duration step without t")
            try:
                duration = float(values["t"].value)
            except ValueError as e:
                raise values["t"].error(f"t must be a number, got {values['t'].value!r}") from e
        steps.append(QuenchStep(twist=twist, mode=mode, duration=duration))

    if start is None or not isinstance(start.value, str):
        raise ParseError("missing start", 1, 1)
    kind, _, rest = start.value.partition(":")
    n = steps[0].twist.n
    try:
        if kind == "config":
            sites = tuple(int(v) for v in rest.split(","))
            return QuenchSchedule(L=L, steps=tuple(steps), start_config=sites)
        if kind == "sector":
            if start_twist is None:
                raise start.error("start=sector needs start-twist")
            return QuenchSchedule(
                L=L,
                steps=tuple(steps),
                start_sector=int(rest),
                start_twist=_permutation(start_twist, n),
            )
    except ValueError as e:
        raise start.error(f"bad start {start.value!r}") from e
    except PreconditionError as e:
        raise start.error(str(e)) from e
    raise start.error(f"start must be config:... or sector:..., got {start.value!r}")


def _initial(schedule: QuenchSchedule, max_states: int | None) -> ProbabilityVector:
    n, L = schedule.n, schedule.L
    if schedule.start_config is not None:
        if len(schedule.start_config) != L or any(not 0 <= v < n for v in schedule.start_config):
            raise PreconditionError(f"start configuration {schedule.start_config} is not in {{0..{n - 1}}}^{L}")
        return ProbabilityVector.point_mass(n, L, schedule.start_config)
    f = schedule.start_twist
    sectors = enumerate_sectors(twisted_ssep_matrix(f, L, max_states=max_states), twist=f)
    if not 0 <= schedule.start_sector < len(sectors):
        raise PreconditionError(f"start sector {schedule.start_sector} outside 0..{len(sectors) - 1}")
    return ProbabilityVector.from_state(n, L, stationary_state(sectors[schedule.start_sector]))


def run_schedule(
    schedule: QuenchSchedule,
    max_states: int | None = DEFAULT_MAX_STATES,
    tol: float = DEFAULT_TOL,
) -> list[StepResult]:
    """Apply every step in order; report sector weights of each step's twist."""
    P = _initial(schedule, max_states)
    results = []
    for index, step in enumerate(schedule.steps):
        M = twisted_ssep_matrix(step.twist, schedule.L, max_states=max_states)
        sectors = enumerate_sectors(M, twist=step.twist)
        if step.mode == "stationary":
            P = sector_projection(M, P, twist=step.twist).to_vector(schedule.n, schedule.L)
        else:
            P = evolve(M, P, step.duration, tol)
        results.append(StepResult(
            index=index,
            step=step,
            sector_weights=P.sector_weights(sectors),
            sector_labels={s.id: s.label for s in sectors},
        ))
    return results


def results_to_csv(results: list[StepResult]) -> str:
    """step,twist,mode,t,sector,label,weight; exact weights as num/den."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["step", "twist", "mode", "t", "sector", "label", "weight"])
    for r in results:
        for sid, weight in r.sector_weights.items():
            text = format_rational(weight) if isinstance(weight, Fraction) else repr(float(weight))
            writer.writerow([r.index, str(r.step.twist), r.step.mode, r.step.duration, sid, r.sector_labels[sid], text])
    return buffer.getvalue()
