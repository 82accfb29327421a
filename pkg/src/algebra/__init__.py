"""
Permutation algebra and set-theoretical Yang-Baxter solutions.

Usage:
    from src.algebra import Permutation, lyubashenko_map, check_braided_ybe

    r = lyubashenko_map(Permutation.parse("(0 1 2)"))
    check_braided_ybe(r).passed
"""

from src.algebra.permutation import Permutation, compose, power
from src.algebra.ybe import (
    SolutionFamily,
    TwoSiteMap,
    check_braided_ybe,
    check_involutive,
    general_map,
    lyubashenko_map,
)

__all__ = [
    "Permutation",
    "SolutionFamily",
    "TwoSiteMap",
    "check_braided_ybe",
    "check_involutive",
    "compose",
    "general_map",
    "lyubashenko_map",
    "power",
]
