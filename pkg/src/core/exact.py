"""
Exact rational arithmetic helpers.

Scalars are ``fractions.Fraction`` at every public boundary. Matrices are
sympy ``DomainMatrix`` objects over ``QQ`` in sparse format; this module is
the only place that converts between the two representations.

Usage:
    from src.core.exact import parse_rational, sparse_matrix, matrices_equal

    z = parse_rational("3/7")
    A = sparse_matrix({(0, 1): 1, (1, 0): z}, 2)
"""

from fractions import Fraction
from typing import Iterable, Mapping

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from src.core.exceptions import ParseError, PoleError

Rational = Fraction


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse "p/q", an integer, or a decimal literal into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"not a rational number: {text!r}") from e


def format_rational(value: Fraction | int) -> str:
    """Serialize as "num/den", always with an explicit denominator."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def check_pole(*params: Fraction) -> None:
    """Raise PoleError if any spectral parameter equals -1."""
    for z in params:
        if Fraction(z) == -1:
            raise PoleError(f"spectral parameter {format_rational(z)} is a pole of R(z)")


def qq(value: Fraction | int):
    """Convert a Fraction or int into a QQ domain element."""
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def to_fraction(element) -> Fraction:
    """Convert a QQ domain element back into a Fraction."""
    r = QQ.to_sympy(element)
    return Fraction(int(r.p), int(r.q))


def sparse_matrix(entries: Mapping[tuple[int, int], Fraction | int], size: int | tuple[int, int]) -> DomainMatrix:
    """Build a sparse DomainMatrix over QQ from a {(row, col): value} mapping."""
    shape = (size, size) if isinstance(size, int) else size
    rows: dict[int, dict[int, object]] = {}
    for (i, j), value in entries.items():
        if value:
            rows.setdefault(i, {})[j] = qq(value)
    return DomainMatrix(rows, shape, QQ)


def identity(size: int) -> DomainMatrix:
    return sparse_matrix({(i, i): 1 for i in range(size)}, size)


def permutation_matrix(image: Iterable[int]) -> DomainMatrix:
    """Matrix of the basis map |k> -> |image[k]>."""
    image = list(image)
    return sparse_matrix({(image[k], k): 1 for k in range(len(image))}, len(image))


def matrix_entries(matrix: DomainMatrix) -> dict[tuple[int, int], Fraction]:
    """Nonzero entries of a DomainMatrix as {(row, col): Fraction}."""
    rep = matrix.to_sparse().rep
    return {
        (i, j): to_fraction(value)
        for i, row in rep.items()
        for j, value in row.items()
        if value
    }


def is_zero(matrix: DomainMatrix) -> bool:
    rep = matrix.to_sparse().rep
    return not any(value for row in rep.values() for value in row.values())


def matrices_equal(a: DomainMatrix, b: DomainMatrix) -> bool:
    if a.shape != b.shape:
        return False
    return is_zero(a.to_sparse() - b.to_sparse())


def scale(matrix: DomainMatrix, factor: Fraction | int) -> DomainMatrix:
    return matrix.to_sparse() * qq(factor)


def kernel_dimension(matrix: DomainMatrix) -> int:
    """dim ker = columns - rank, computed exactly over QQ."""
    return matrix.shape[1] - matrix.to_sparse().rank()


def column_sums(matrix: DomainMatrix) -> list[Fraction]:
    sums = [Fraction(0)] * matrix.shape[1]
    for (_, j), value in matrix_entries(matrix).items():
        sums[j] += value
    return sums
