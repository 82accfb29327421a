"""
Model files.

Format:
    N=3 L=3 twist=(0 1 2)           # twisted SSEP
    N=3 L=3 lyubashenko=(0 1 2)     # Lyubashenko model of g
    N=3 L=3 family={
        g0=(0 2) g1=() g2=(0 2)
        f0=(0 2) f1=() f2=(0 2)
    }

Permutations use cycle notation, "()" or "id" for the identity, or image
notation [2,1,0]. Errors carry the line and column of the offending text.
"""

from dataclasses import dataclass
from typing import Literal

from src.algebra.permutation import Permutation
from src.algebra.ybe import (
    SolutionFamily,
    TwoSiteMap,
    check_braided_ybe,
    check_involutive,
    general_map,
    lyubashenko_map,
)
from src.config import DEFAULT_MAX_STATES
from src.core.exceptions import ModelError, NotBijectiveError, ParseError, PreconditionError
from src.core.syntax import Field, parse_fields
from src.models.generator import RateMatrix, set_theoretical_markov, twisted_ssep_matrix

Kind = Literal["lyubashenko", "twisted_ssep", "family"]
_KINDS = {"lyubashenko": "lyubashenko", "twist": "twisted_ssep", "family": "family"}


@dataclass(frozen=True)
class ModelSpec:
    N: int
    L: int
    kind: Kind
    g: Permutation | None = None
    twist: Permutation | None = None
    family: SolutionFamily | None = None

    def two_site_map(self) -> TwoSiteMap:
        """The bond map; families must pass the YBE and involutivity checks first."""
        if self.kind == "lyubashenko":
            return lyubashenko_map(self.g)
        if self.kind == "twisted_ssep":
            return TwoSiteMap.flip(self.N)
        m = general_map(self.family)
        if not check_involutive(m).passed or not check_braided_ybe(m).passed:
            raise PreconditionError("family map fails the braided YBE or involutivity")
        return m

    def generator(self, max_states: int | None = DEFAULT_MAX_STATES) -> RateMatrix:
        if self.kind == "twisted_ssep":
            return twisted_ssep_matrix(self.twist, self.L, max_states=max_states)
        return set_theoretical_markov(self.two_site_map(), self.L, max_states=max_states)

    @property
    def sector_twist(self) -> Permutation | None:
        """Twist whose species/charge labels the sectors, when there is one."""
        return self.twist if self.kind == "twisted_ssep" else None


def _permutation(field: Field, n: int) -> Permutation:
    if not isinstance(field.value, str):
        raise field.error(f"{field.key} needs a permutation")
    try:
        return Permutation.parse(field.value, n=n)
    except NotBijectiveError as e:
        raise field.error(f"{field.key}={field.value} is not a bijection: {e}") from e
    except ModelError as e:
        raise field.error(f"bad permutation {field.value!r}: {e}") from e


def _integer(field: Field, minimum: int) -> int:
    try:
        value = int(field.value)
    except (TypeError, ValueError) as e:
        raise field.error(f"{field.key} must be an integer, got {field.value!r}") from e
    if value < minimum:
        raise field.error(f"{field.key} must be at least {minimum}, got {value}")
    return value


def parse_model(text: str) -> ModelSpec:
    fields = parse_fields(text)
    seen: dict[str, Field] = {}
    for f in fields:
        if f.key not in ("N", "L", *_KINDS):
            raise ParseError(f"unknown field {f.key!r}", f.line, f.column)
        if f.key in seen:
            raise ParseError(f"duplicate field {f.key!r}", f.line, f.column)
        seen[f.key] = f

    for key in ("N", "L"):
        if key not in seen:
            raise ParseError(f"missing field {key}", 1, 1)
    N = _integer(seen["N"], 1)
    L = _integer(seen["L"], 2)

    kinds = [k for k in _KINDS if k in seen]
    if len(kinds) != 1:
        raise ParseError("exactly one of lyubashenko, twist or family is required", 1, 1)
    key = kinds[0]
    field = seen[key]

    if key == "lyubashenko":
        return ModelSpec(N=N, L=L, kind="lyubashenko", g=_permutation(field, N))
    if key == "twist":
        return ModelSpec(N=N, L=L, kind="twisted_ssep", twist=_permutation(field, N))

    if not isinstance(field.value, list):
        raise field.error("family needs a {...} block")
    members = {f.key: f for f in field.value}
    expected = {f"{side}{i}" for side in "gf" for i in range(N)}
    for f in field.value:
        if f.key not in expected:
            raise f.error(f"unexpected family member {f.key!r}")
    missing = sorted(expected - set(members))
    if missing:
        raise field.error(f"family is missing {', '.join(missing)}")
    g = tuple(_permutation(members[f"g{i}"], N) for i in range(N))
    f_maps = tuple(_permutation(members[f"f{i}"], N) for i in range(N))
    family = SolutionFamily(n=N, g=g, f=f_maps)
    try:
        general_map(family)
    except NotBijectiveError as e:
        raise field.error(f"family does not define a bijection of pairs: {e}") from e
    return ModelSpec(N=N, L=L, kind="family", family=family)


def format_model(spec: ModelSpec) -> str:
    """Text that parse_model reads back to an equal spec."""
    head = f"N={spec.N} L={spec.L}"
    if spec.kind == "lyubashenko":
        return f"{head} lyubashenko={spec.g}\n"
    if spec.kind == "twisted_ssep":
        return f"{head} twist={spec.twist}\n"
    g = " ".join(f"g{i}={p}" for i, p in enumerate(spec.family.g))
    f = " ".join(f"f{i}={p}" for i, p in enumerate(spec.family.f))
    return f"{head} family={{\n    {g}\n    {f}\n}}\n"
