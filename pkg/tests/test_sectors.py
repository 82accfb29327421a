"""
Tests for sector enumeration and closed-form counting.

Proves that the connected components of every twisted SSEP match the
profile/charge classification, the closed-form counts and cardinalities,
and that uniform states on sectors are exactly stationary.

Run:
    python -m pytest tests/test_sectors.py -v
"""

import math
from fractions import Fraction

import pytest

from src.algebra.permutation import Permutation, all_permutations
from src.algebra.ybe import counterexample_family
from src.core.exceptions import PreconditionError, SizeMismatchError
from src.models.configuration import all_configurations, encode
from src.models.generator import family_markov, twisted_ssep_matrix
from src.sectors.counting import (
    compositions,
    count_sectors_closed_form,
    count_sectors_equal_cycles,
    divisors,
    equal_cycle_counts,
    multinomial,
    sector_cardinality_closed_form,
    ssep_sector_count,
)
from src.sectors.engine import (
    Profile,
    TotalCharge,
    charge_of,
    check_stationary,
    enumerate_sectors,
    generator_kernel_dimension,
    profile_of,
    sector_index,
    stationary_state,
    verify_sector_theory,
)
from src.sectors.union_find import UnionFind


def sectors_of(twist: str | Permutation, L: int):
    f = Permutation.parse(twist) if isinstance(twist, str) else twist
    return enumerate_sectors(twisted_ssep_matrix(f, L), twist=f)


# --- Union-Find Tests ---

class TestUnionFind:
    def test_union_reports_merge(self):
        uf = UnionFind(4)
        assert uf.union(0, 2) is True
        assert uf.union(2, 0) is False
        assert len(uf) == 3

    def test_components_canonical(self):
        uf = UnionFind(5)
        uf.union(4, 1)
        uf.union(3, 0)
        assert uf.components() == [[0, 3], [1, 4], [2]]


# --- Counting Tests ---

class TestCounting:
    def test_multinomial(self):
        assert multinomial((2, 1)) == 3
        assert multinomial((1, 1, 1)) == 6
        assert multinomial(()) == 1

    def test_compositions(self):
        assert sorted(compositions(2, 3)) == [(0, 3), (1, 2), (2, 1), (3, 0)]
        assert len(list(compositions(3, 3))) == 10

    def test_counts_for_n3_l3(self):
        assert count_sectors_closed_form(Permutation.parse("(0)(1)(2)"), 3) == 10
        assert count_sectors_closed_form(Permutation.parse("(0 1)(2)"), 3) == 5
        assert count_sectors_closed_form(Permutation.parse("(0 1 2)"), 3) == 3

    def test_ssep_count(self):
        assert ssep_sector_count(3, 3) == 10
        assert ssep_sector_count(2, 5) == 6

    def test_equal_cycles(self):
        assert divisors(12) == [1, 2, 3, 4, 6, 12]
        assert equal_cycle_counts(12, 4) == [(1, 12), (2, 30), (3, 60), (4, 105), (6, 252), (12, 1365)]
        assert count_sectors_equal_cycles(12, 12, 4) == ssep_sector_count(12, 4)

    def test_equal_cycles_needs_divisor(self):
        with pytest.raises(PreconditionError, match="does not divide"):
            count_sectors_equal_cycles(6, 4, 3)

    def test_cardinality(self):
        f = Permutation.parse("(0 1)(2)")
        assert sector_cardinality_closed_form(f, (3, 0)) == 4
        assert sector_cardinality_closed_form(f, (2, 1)) == 12
        assert sector_cardinality_closed_form(f, (1, 2)) == 6
        assert sector_cardinality_closed_form(f, (0, 3)) == 1

    def test_cardinality_profile_length(self):
        with pytest.raises(SizeMismatchError):
            sector_cardinality_closed_form(Permutation.parse("(0 1)(2)"), (3,))

    def test_short_chain(self):
        with pytest.raises(PreconditionError, match="L >= 2"):
            count_sectors_closed_form(Permutation.full_cycle(3), 1)


# --- Label Tests ---

class TestLabels:
    def test_profile(self):
        f = Permutation.parse("(0 1)(2)")
        assert profile_of((0, 2, 1), f) == Profile((2, 1))
        assert str(Profile((2, 1))) == "(2,1)"

    def test_charge_mod_gcd_of_present_species(self):
        f = Permutation.parse("(0 1 2 3)(4 5)")
        assert charge_of((1, 2), f) == TotalCharge(3, 4)
        assert charge_of((1, 5), f) == TotalCharge(0, 2)
        assert str(TotalCharge(3, 4)) == "3 mod 4"

    def test_fixed_points_have_trivial_charge(self):
        assert charge_of((0, 1, 2), Permutation.identity(3)) == TotalCharge(0, 1)


# --- Enumeration Tests ---

class TestEnumeration:
    def test_sector_counts_n3_l3(self):
        assert len(sectors_of("(0)(1)(2)", 3)) == 10
        assert len(sectors_of("(0 1)(2)", 3)) == 5
        assert len(sectors_of("(0 1 2)", 3)) == 3
        assert len(enumerate_sectors(family_markov(counterexample_family(), 3))) == 7

    def test_ordered_by_minimal_encoding(self):
        sectors = sectors_of("(0 1)(2)", 3)
        assert sectors[0].representative == (0, 0, 0)
        assert sectors[0].profile == Profile((3, 0))
        assert sectors[0].charge == TotalCharge(0, 2)
        assert sectors[0].size == 4
        mins = [s.members[0] for s in sectors]
        assert mins == sorted(mins)

    def test_full_cycle_sizes(self):
        assert [s.size for s in sectors_of("(0 1 2)", 3)] == [9, 9, 9]

    def test_label_and_membership(self):
        sector = sectors_of("(0 1)(2)", 3)[0]
        assert sector.label == "p=(3,0) E=0 mod 2"
        assert encode((0, 0, 0), 3) in sector
        assert encode((2, 2, 2), 3) not in sector

    def test_untwisted_labels(self):
        M = family_markov(counterexample_family(), 3)
        sector = enumerate_sectors(M)[0]
        assert sector.profile is None
        assert sector.label == "#0"

    def test_sector_index(self):
        sectors = sectors_of("(0 1)", 2)
        assert sector_index(sectors, 4) == [0, 1, 1, 0]

    def test_partition_covers_space(self):
        sectors = sectors_of("(0 1 2 3)", 3)
        assert sum(s.size for s in sectors) == 64

    def test_sector_theory_all_twists(self):
        for n in (2, 3, 4):
            for f in all_permutations(n):
                for L in (2, 3, 4, 5):
                    report = verify_sector_theory(f, L)
                    assert report.passed, report.summary

    def test_orbits_are_profile_charge_classes(self):
        for n in (2, 3, 4):
            for f in all_permutations(n):
                for L in (2, 3, 4, 5):
                    classes: dict[tuple, set[int]] = {}
                    for sites in all_configurations(n, L):
                        key = (profile_of(sites, f), charge_of(sites, f))
                        classes.setdefault(key, set()).add(encode(sites, n))
                    orbits = {frozenset(s.members) for s in sectors_of(f, L)}
                    assert orbits == {frozenset(c) for c in classes.values()}, (f, L)

    def test_ssep_sectors_refine_twisted_sectors(self):
        for n in (2, 3):
            for L in (2, 3, 4):
                ssep = sectors_of(Permutation.identity(n), L)
                for f in all_permutations(n):
                    twisted = sectors_of(f, L)
                    index = sector_index(twisted, n ** L)
                    covered: dict[int, set[int]] = {}
                    for sector in ssep:
                        owners = {index[code] for code in sector.members}
                        assert len(owners) == 1, (f, L, sector.id)
                        covered.setdefault(owners.pop(), set()).update(sector.members)
                    assert covered == {s.id: set(s.members) for s in twisted}


# --- Stationary State Tests ---

class TestStationary:
    def test_uniform_state_is_stationary(self):
        f = Permutation.parse("(0 1)(2)")
        M = twisted_ssep_matrix(f, 3)
        for sector in enumerate_sectors(M, twist=f):
            state = stationary_state(sector)
            assert state.total == 1
            assert set(state.weights.values()) == {Fraction(1, sector.size)}
            assert check_stationary(M, state).passed

    def test_point_mass_is_not_stationary(self):
        f = Permutation.parse("(0 1)")
        M = twisted_ssep_matrix(f, 2)
        sector = enumerate_sectors(M, twist=f)[0]
        lopsided = stationary_state(sector)
        lopsided.weights[sector.members[0]] = Fraction(1)
        lopsided.weights[sector.members[1]] = Fraction(0)
        assert not check_stationary(M, lopsided).passed

    def test_kernel_dimension_is_sector_count(self):
        for text, expected in (("(0)(1)(2)", 10), ("(0 1)(2)", 5), ("(0 1 2)", 3)):
            f = Permutation.parse(text)
            assert generator_kernel_dimension(twisted_ssep_matrix(f, 3)) == expected
        assert generator_kernel_dimension(family_markov(counterexample_family(), 3)) == 7

    def test_closed_form_matches_sizes_for_every_profile(self):
        f = Permutation.parse("(0 1 2)(3)")
        sectors = enumerate_sectors(twisted_ssep_matrix(f, 3), twist=f)
        for sector in sectors:
            assert sector.size == sector_cardinality_closed_form(f, sector.profile.counts)
        assert math.fsum(s.size for s in sectors) == 64
