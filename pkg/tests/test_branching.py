"""
Tests for quench branching.

Proves that intersection-based branching probabilities match the closed
forms for full-cycle twists and their powers, that spreading/splitting is
classified correctly, and that the double-quench chain reaches its
size-proportional fixed point.

Run:
    python -m pytest tests/test_branching.py -v
"""

from fractions import Fraction

import pytest

from src.algebra.permutation import Permutation, all_permutations, power
from src.core.exceptions import PreconditionError, SizeMismatchError
from src.quench.branching import (
    CONTAINS,
    EQUAL,
    INCLUDED,
    OVERLAP,
    branching_matrix,
    classify_relation,
    oscillation_chain,
    power_exponent,
)
from src.quench.closed_forms import (
    check_inclusion_condition,
    check_power_branching,
    closed_form_branching_fullcycle_square,
    closed_form_branching_power,
    parity_multinomial_sum,
    residue_multinomial_sum,
)

FULL4 = Permutation.full_cycle(4)
SQUARE4 = power(FULL4, 2)


# --- Branching Matrix Tests ---

class TestBranchingMatrix:
    def test_full_cycle_to_square(self):
        B = branching_matrix(FULL4, SQUARE4, 3)
        assert sorted(B.row(0).values()) == [Fraction(1, 4), Fraction(3, 4)]

    def test_rows_are_stochastic(self):
        B = branching_matrix(FULL4, SQUARE4, 3)
        assert B.row_sums() == [1] * len(B.rows)

    def test_cube_of_six_cycle(self):
        f1 = Permutation.full_cycle(6)
        B = branching_matrix(f1, power(f1, 3), 2)
        assert sorted(B.row(0).values()) == [Fraction(1, 3), Fraction(2, 3)]

    def test_same_twist_is_identity(self):
        B = branching_matrix(FULL4, FULL4, 2)
        assert B.entries() == {(i, i): 1 for i in range(len(B.rows))}

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatchError):
            branching_matrix(FULL4, Permutation.full_cycle(3), 2)


# --- Closed Form Tests ---

class TestClosedForms:
    def test_square_values(self):
        assert closed_form_branching_fullcycle_square(4, 3, 0, 3, 0, 0) == Fraction(1, 4)
        assert closed_form_branching_fullcycle_square(4, 3, 0, 1, 2, 1) == Fraction(3, 4)
        assert closed_form_branching_fullcycle_square(4, 3, 1, 3, 0, 0) == 0

    def test_power_value(self):
        # 3l + 3 == 0 (mod 6) picks l = 1
        assert closed_form_branching_power(6, 2, 2, 0, (0, 1, 1), 1) == Fraction(2, 3)
        assert closed_form_branching_power(6, 2, 2, 0, (0, 1, 1), 0) == 0

    def test_square_is_power_with_n3(self):
        for k in range(4):
            for p3 in range(4):
                for l in range(2):
                    square = closed_form_branching_fullcycle_square(4, 3, k, 3 - p3, p3, l)
                    general = closed_form_branching_power(4, 2, 3, k, (3 - p3, p3), l)
                    assert square == general

    def test_odd_n_rejected(self):
        with pytest.raises(PreconditionError, match="even N"):
            closed_form_branching_fullcycle_square(5, 2, 0, 1, 1, 0)

    def test_bad_profile_rejected(self):
        with pytest.raises(PreconditionError, match="does not sum"):
            closed_form_branching_power(6, 2, 3, 0, (1, 1, 0), 0)

    def test_multinomial_sums(self):
        for L in range(1, 7):
            assert parity_multinomial_sum(L, 0) == parity_multinomial_sum(L, 1) == 2 ** (L - 1)
            for a in range(3):
                assert residue_multinomial_sum(L, 4, a) == 3 ** (L - 1)

    def test_against_intersections(self):
        for N, n, L in ((4, 3, 3), (6, 3, 2), (6, 4, 2), (6, 4, 3), (4, 5, 2)):
            report = check_power_branching(N, n, L)
            assert report.passed, report.summary

    def test_power_needs_divisor(self):
        with pytest.raises(PreconditionError, match="does not divide"):
            check_power_branching(5, 3, 2)

    def test_inclusion_condition(self):
        for text in ("(0 1)(2)", "(0 1 2)", "(0 1 2 3)", "(0 2)(1 3)"):
            assert check_inclusion_condition(Permutation.parse(text), 3).passed


# --- Relation Tests ---

class TestRelations:
    def test_power_exponent(self):
        assert power_exponent(SQUARE4, FULL4) == 2
        assert power_exponent(FULL4, SQUARE4) is None

    def test_power_spreads(self):
        report = classify_relation(SQUARE4, FULL4, 3)
        assert report.verdict == "spreading"
        assert report.reverse_verdict == "splitting"
        assert report.passed
        assert set(report.pairs.values()) <= {EQUAL, INCLUDED}

    def test_reverse_splits(self):
        report = classify_relation(FULL4, SQUARE4, 3)
        assert report.verdict == "splitting"
        assert CONTAINS in report.pairs.values()

    def test_identical(self):
        assert classify_relation(FULL4, FULL4, 2).verdict == "identical"

    def test_mixed(self):
        f1 = Permutation.parse("(0 1)(2)")
        f2 = Permutation.parse("(1 2)(0)")
        report = classify_relation(f1, f2, 2)
        assert report.verdict == "mixed"
        assert report.overlaps
        assert all(report.pairs[pair] == OVERLAP for pair in report.overlaps)


# --- Oscillation Chain Tests ---

class TestOscillationChain:
    def test_fixed_point_proportional_to_size(self):
        result = oscillation_chain(SQUARE4, FULL4, 3, start=0, switches=1)
        assert result.fixed_point_verified
        assert sorted(result.distribution.values()) == [Fraction(1, 4), Fraction(3, 4)]
        assert result.distribution == result.fixed_point
        assert sum(result.fixed_point.values()) == 1

    def test_zero_switches(self):
        result = oscillation_chain(SQUARE4, FULL4, 3, start=0, switches=0)
        assert result.distribution == {0: Fraction(1)}

    def test_spreading_chain_stays_put(self):
        result = oscillation_chain(FULL4, SQUARE4, 3, start=0, switches=5)
        assert result.distribution == {0: Fraction(1)}
        assert result.block == [0]

    def test_nested_when_f1_is_power_of_f2(self):
        assert oscillation_chain(SQUARE4, FULL4, 3, start=0, switches=1).nested
        assert not oscillation_chain(FULL4, SQUARE4, 3, start=0, switches=1).nested

    def test_nested_matches_relation(self):
        for f1 in all_permutations(3):
            for f2 in all_permutations(3):
                result = oscillation_chain(f1, f2, 2, start=0, switches=1)
                verdict = classify_relation(f1, f2, 2).verdict
                assert result.nested == (verdict in ("identical", "spreading")), (f1, f2)
                assert result.fixed_point_verified

    def test_preconditions(self):
        with pytest.raises(PreconditionError, match="nonnegative"):
            oscillation_chain(FULL4, SQUARE4, 2, start=0, switches=-1)
        with pytest.raises(PreconditionError, match="outside"):
            oscillation_chain(FULL4, SQUARE4, 2, start=99, switches=1)
