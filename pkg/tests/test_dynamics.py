"""
Tests for master-equation evolution and trajectory sampling.

Proves that uniformization matches a two-state closed form, conserves
sector weights, relaxes quenched states to the predicted mixture, and that
sampled trajectories are reproducible and stay in their sector.

Run:
    python -m pytest tests/test_dynamics.py -v
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from src.algebra.permutation import Permutation, power
from src.core.exceptions import PreconditionError, SizeMismatchError
from src.dynamics.evolve import (
    BUDGET_FLOOR,
    MAX_CHUNK_WEIGHT,
    Mixture,
    ProbabilityVector,
    evolve,
    evolve_to_convergence,
    long_time_limit,
    sector_projection,
    stationary_currents,
)
from src.dynamics.sampling import empirical_distribution, sample_trajectories, sample_trajectory
from src.models.configuration import encode
from src.models.generator import twisted_ssep_matrix
from src.quench.branching import branching_matrix
from src.sectors.engine import enumerate_sectors, sector_index, stationary_state

FLIP = Permutation.parse("(0 1)")


def two_state():
    """N = 2, L = 2 with twist (0 1): (0,0) <-> (1,1) and (0,1) <-> (1,0) at rate 1."""
    return twisted_ssep_matrix(FLIP, 2)


# --- Probability Vector Tests ---

class TestProbabilityVector:
    def test_point_mass(self):
        P = ProbabilityVector.point_mass(2, 2, (1, 1))
        assert P.exact == {3: Fraction(1)}
        assert P.weights[3] == 1.0

    def test_must_sum_to_one(self):
        with pytest.raises(PreconditionError, match="sum to 1"):
            ProbabilityVector.from_exact(2, 2, {0: Fraction(1, 2)})

    def test_wrong_length(self):
        with pytest.raises(SizeMismatchError):
            ProbabilityVector(n=2, L=2, weights=np.zeros(3))

    def test_point_mass_site_out_of_range(self):
        with pytest.raises(PreconditionError, match="site 2 holds 3"):
            ProbabilityVector.point_mass(2, 2, (0, 3))

    def test_point_mass_wrong_length(self):
        with pytest.raises(PreconditionError, match="length 3"):
            ProbabilityVector.point_mass(2, 2, (0, 0, 0))

    def test_index_out_of_range(self):
        with pytest.raises(PreconditionError, match="index outside"):
            ProbabilityVector.from_exact(2, 2, {4: Fraction(1)})

    def test_site_occupation(self):
        P = ProbabilityVector.from_exact(2, 2, {encode((0, 1), 2): Fraction(1, 2), encode((1, 1), 2): Fraction(1, 2)})
        occupation = P.site_occupation()
        assert occupation[0].tolist() == [0.5, 0.5]
        assert occupation[1].tolist() == [0.0, 1.0]

    def test_exact_sector_weights(self):
        M = two_state()
        sectors = enumerate_sectors(M, twist=FLIP)
        P = ProbabilityVector.point_mass(2, 2, (0, 1))
        assert P.sector_weights(sectors) == {0: 0, 1: 1}


# --- Evolution Tests ---

class TestEvolve:
    def test_two_state_closed_form(self):
        M = two_state()
        P0 = ProbabilityVector.point_mass(2, 2, (0, 0))
        for t in (0.1, 0.5, 2.0):
            P = evolve(M, P0, t, tol=1e-12)
            assert P.weights[0] == pytest.approx((1 + math.exp(-2 * t)) / 2, abs=1e-9)
            assert P.weights[3] == pytest.approx((1 - math.exp(-2 * t)) / 2, abs=1e-9)

    def test_zero_time_is_identity(self):
        P0 = ProbabilityVector.point_mass(2, 2, (0, 0))
        assert evolve(two_state(), P0, 0.0) is P0

    def test_long_time_is_chunked(self):
        M = two_state()
        P = evolve(M, ProbabilityVector.point_mass(2, 2, (0, 0)), 500.0)
        assert P.weights[0] == pytest.approx(0.5, abs=1e-9)
        assert P.total == pytest.approx(1.0)

    def test_sector_weights_conserved(self):
        f = Permutation.parse("(0 1)(2)")
        M = twisted_ssep_matrix(f, 3)
        sectors = enumerate_sectors(M, twist=f)
        P0 = ProbabilityVector.point_mass(3, 3, (0, 1, 2))
        P = evolve(M, P0, 3.0)
        before, after = P0.sector_weights(sectors), P.sector_weights(sectors)
        for sid in before:
            assert after[sid] == pytest.approx(float(before[sid]), abs=1e-10)
        assert np.all(P.weights >= 0)

    def test_error_bound_meets_tolerance(self):
        P = evolve(two_state(), ProbabilityVector.point_mass(2, 2, (0, 0)), 1.0, tol=1e-12)
        assert P.error_bound == pytest.approx(1e-12)

    def test_error_bound_accumulates(self):
        M = two_state()
        P = evolve(M, ProbabilityVector.point_mass(2, 2, (0, 0)), 1.0, tol=1e-10)
        P = evolve(M, P, 1.0, tol=1e-10)
        assert P.error_bound == pytest.approx(2e-10)

    def test_very_long_run_reports_floor(self):
        M = two_state()
        lam = max(abs(float(d)) for d in M.diagonal) + 1
        chunks = math.ceil(lam * 1e4 / MAX_CHUNK_WEIGHT)
        P = evolve(M, ProbabilityVector.point_mass(2, 2, (0, 0)), 1e4, tol=1e-12)
        assert P.error_bound == pytest.approx(chunks * BUDGET_FLOOR)
        assert P.error_bound > 1e-12
        assert P.weights[0] == pytest.approx(0.5, abs=1e-9)

    def test_relaxes_to_uniform(self):
        M = two_state()
        sectors = enumerate_sectors(M, twist=FLIP)
        P = evolve(M, ProbabilityVector.point_mass(2, 2, (0, 0)), 100.0)
        target = ProbabilityVector.from_state(2, 2, stationary_state(sectors[0]))
        assert P.total_variation(target) < 1e-8

    def test_negative_time(self):
        with pytest.raises(PreconditionError, match="nonnegative"):
            evolve(two_state(), ProbabilityVector.point_mass(2, 2, (0, 0)), -1.0)

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatchError):
            evolve(two_state(), ProbabilityVector.point_mass(2, 3, (0, 0, 0)), 1.0)

    def test_convergence(self):
        P, t = evolve_to_convergence(two_state(), ProbabilityVector.point_mass(2, 2, (0, 1)))
        assert P.weights[1] == pytest.approx(0.5, abs=1e-9)
        assert t > 1.0


# --- Stationary Current Tests ---

class TestCurrents:
    def test_uniform_states_carry_no_current(self):
        f = Permutation.full_cycle(3)
        M = twisted_ssep_matrix(f, 3)
        for sector in enumerate_sectors(M, twist=f):
            assert stationary_currents(M, stationary_state(sector).weights) == {}

    def test_point_mass_has_current(self):
        currents = stationary_currents(two_state(), {0: Fraction(1)})
        assert currents == {(0, 3): 1}


# --- Quench Tests ---

class TestQuench:
    def test_projection_keeps_sector_weights(self):
        M = two_state()
        mixture = sector_projection(M, ProbabilityVector.point_mass(2, 2, (0, 0)), twist=FLIP)
        assert mixture.weights == {0: 1}
        assert mixture.to_vector(2, 2).exact == {0: Fraction(1, 2), 3: Fraction(1, 2)}

    def test_long_time_limit_matches_branching(self):
        f1 = Permutation.full_cycle(4)
        f2 = power(f1, 2)
        start = enumerate_sectors(twisted_ssep_matrix(f1, 3), twist=f1)[0]
        limit = long_time_limit(stationary_state(start), f2, 3)
        assert sorted(limit.weights.values()) == [Fraction(1, 4), Fraction(3, 4)]

        B = branching_matrix(f1, f2, 3)
        predicted = Mixture(sectors=B.cols, weights=B.row(start.id)).to_vector(4, 3)
        assert limit.to_vector(4, 3).exact == predicted.exact

    def test_quench_relaxes_to_limit(self):
        f1 = Permutation.full_cycle(4)
        f2 = power(f1, 2)
        start = enumerate_sectors(twisted_ssep_matrix(f1, 3), twist=f1)[0]
        P0 = ProbabilityVector.from_state(4, 3, stationary_state(start))
        relaxed, _ = evolve_to_convergence(twisted_ssep_matrix(f2, 3), P0)
        limit = long_time_limit(P0, f2, 3).to_vector(4, 3)
        assert relaxed.total_variation(limit) < 1e-8


# --- Sampling Tests ---

class TestSampling:
    def test_reproducible(self):
        M = twisted_ssep_matrix(Permutation.full_cycle(3), 3)
        a = sample_trajectory(M, (0, 1, 2), 5.0, seed=7)
        b = sample_trajectory(M, (0, 1, 2), 5.0, seed=7)
        assert a.events == b.events

    def test_times_increase_and_stay_in_sector(self):
        f = Permutation.full_cycle(3)
        M = twisted_ssep_matrix(f, 3)
        index = sector_index(enumerate_sectors(M, twist=f), M.dim)
        traj = sample_trajectory(M, (0, 1, 1), 10.0, seed=3)
        times = [e.time for e in traj.events]
        assert times == sorted(times)
        assert all(t <= 10.0 for t in times)
        home = index[encode((0, 1, 1), 3)]
        assert {index[encode(c, 3)] for c in traj.visited()} == {home}

    def test_events_name_a_bond(self):
        M = two_state()
        traj = sample_trajectory(M, (0, 0), 5.0, seed=1)
        assert traj.events
        assert all(e.bond == 1 for e in traj.events)

    def test_frozen_configuration(self):
        M = twisted_ssep_matrix(Permutation.identity(2), 2)
        traj = sample_trajectory(M, (1, 1), 5.0)
        assert traj.events == []
        assert traj.final == (1, 1)

    def test_batch_independent_of_workers(self):
        M = twisted_ssep_matrix(Permutation.full_cycle(3), 2)
        serial = sample_trajectories(M, (0, 1), 3.0, count=8, seed=11, workers=1)
        threaded = sample_trajectories(M, (0, 1), 3.0, count=8, seed=11, workers=4)
        assert [t.events for t in serial] == [t.events for t in threaded]
        assert [t.stream for t in threaded] == list(range(8))

    def test_empirical_matches_evolution(self):
        M = two_state()
        trajectories = sample_trajectories(M, (0, 0), 0.5, count=4000, seed=0)
        empirical = empirical_distribution(trajectories, 0.5)
        expected = (1 + math.exp(-1.0)) / 2
        assert empirical[(0, 0)] == pytest.approx(expected, abs=0.03)

    def test_wrong_length(self):
        with pytest.raises(PreconditionError, match="length"):
            sample_trajectory(two_state(), (0, 0, 0), 1.0)

    def test_site_out_of_range(self):
        with pytest.raises(PreconditionError, match="site 2 holds 3"):
            sample_trajectory(two_state(), (0, 3), 1.0)

    def test_batch_site_out_of_range(self):
        with pytest.raises(PreconditionError, match="outside 0..1"):
            sample_trajectories(two_state(), (2, 0), 1.0, count=2)
