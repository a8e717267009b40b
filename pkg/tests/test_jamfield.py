"""Jamming-field model against closed-form and finite-difference oracles."""

import math

import numpy as np
import pytest

from jamnav.jamfield import (
    DisruptionPolicy,
    JammerField,
    critical_radius,
    is_disrupted,
    probability,
    probability_rate,
)

# Frozen from a 40-digit evaluation of exp(24 * ln 0.9).
P_AT_24 = 0.07976644307687251
# Frozen from 40-digit evaluations of ln(0.5)/ln(A).
R_TAU_A09 = 6.578813478960584
R_TAU_A098 = 34.309618491520674


def fd_rate(field, pos, vel, h=1e-6):
    """Central finite difference of P along straight-line motion (the oracle)."""
    ahead = (pos[0] + vel[0] * h, pos[1] + vel[1] * h)
    behind = (pos[0] - vel[0] * h, pos[1] - vel[1] * h)
    return (probability(field, ahead) - probability(field, behind)) / (2.0 * h)


class TestProbability:
    def test_one_unit_from_center(self):
        f = JammerField(0.0, 0.0, k=1.0, decay_a=0.5)
        assert probability(f, (1.0, 0.0)) == 0.5

    def test_center_returns_k(self):
        f = JammerField(3.0, -2.0, k=1.0, decay_a=0.9)
        assert probability(f, (3.0, -2.0)) == 1.0
        f2 = JammerField(0.0, 0.0, k=0.7, decay_a=0.9)
        assert probability(f2, (0.0, 0.0)) == 0.7

    def test_at_24_meters(self):
        f = JammerField(0.0, 0.0, k=1.0, decay_a=0.9)
        assert probability(f, (24.0, 0.0)) == pytest.approx(P_AT_24, rel=1e-12)

    def test_monotone_decay(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            f = JammerField(rng.uniform(-50, 50), rng.uniform(-50, 50),
                            k=rng.uniform(0.2, 1.0), decay_a=rng.uniform(0.05, 0.99))
            r1 = rng.uniform(0.0, 40.0)
            r2 = r1 + rng.uniform(0.1, 40.0)
            theta = rng.uniform(0, 2 * math.pi)
            p1 = probability(f, (f.pos_x + r1 * math.cos(theta),
                                 f.pos_y + r1 * math.sin(theta)))
            p2 = probability(f, (f.pos_x + r2 * math.cos(theta),
                                 f.pos_y + r2 * math.sin(theta)))
            assert p2 < p1

    def test_radial_symmetry_bit_identical(self):
        f = JammerField(12.5, -3.25, k=1.0, decay_a=0.93)
        rng = np.random.default_rng(3)
        for _ in range(100):
            dx, dy = rng.uniform(-30, 30, size=2)
            a = probability(f, (f.pos_x + dx, f.pos_y + dy))
            b = probability(f, (f.pos_x - dx, f.pos_y - dy))
            assert a == b

    def test_rejects_non_finite(self):
        f = JammerField(0.0, 0.0)
        with pytest.raises(ValueError):
            probability(f, (math.nan, 0.0))
        with pytest.raises(ValueError):
            probability(f, (0.0, math.inf))


class TestProbabilityRate:
    def test_stationary_is_zero(self):
        f = JammerField(0.0, 0.0, k=1.0, decay_a=0.9)
        assert probability_rate(f, (5.0, 7.0), (0.0, 0.0)) == 0.0

    def test_tangential_is_zero(self):
        f = JammerField(0.0, 0.0, k=1.0, decay_a=0.9)
        # velocity perpendicular to the radius at (10, 0)
        assert probability_rate(f, (10.0, 0.0), (0.0, 3.0)) == 0.0

    def test_radial_inbound_example(self):
        f = JammerField(0.0, 0.0, k=1.0, decay_a=0.9)
        rate = probability_rate(f, (10.0, 0.0), (2.0, 0.0))
        assert rate == pytest.approx(-0.073473880495405, rel=1e-12)
        assert rate == pytest.approx(fd_rate(f, (10.0, 0.0), (2.0, 0.0)), rel=1e-6)

    def test_matches_finite_difference_over_seeded_configs(self):
        rng = np.random.default_rng(2024)
        checked = 0
        while checked < 1000:
            f = JammerField(rng.uniform(-100, 100), rng.uniform(-100, 100),
                            k=rng.uniform(0.3, 1.0), decay_a=rng.uniform(0.5, 0.99))
            theta = rng.uniform(0, 2 * math.pi)
            r = rng.uniform(0.5, 80.0)
            pos = (f.pos_x + r * math.cos(theta), f.pos_y + r * math.sin(theta))
            vel = tuple(rng.uniform(-5, 5, size=2))
            analytic = probability_rate(f, pos, vel)
            if abs(analytic) < 1e-3:
                continue  # too close to zero for a relative FD comparison
            assert analytic == pytest.approx(fd_rate(f, pos, vel), rel=1e-6)
            checked += 1

    def test_singular_at_center(self):
        f = JammerField(1.0, 2.0)
        with pytest.raises(ValueError):
            probability_rate(f, (1.0, 2.0), (1.0, 0.0))


class TestCriticalRadius:
    def test_equal_ratio(self):
        f = JammerField(0.0, 0.0, k=1.0, decay_a=0.5)
        assert critical_radius(f, DisruptionPolicy(0.5)) == 1.0

    def test_paper_defaults(self):
        f = JammerField(0.0, 0.0, k=1.0, decay_a=0.9)
        assert critical_radius(f, DisruptionPolicy(0.5)) == pytest.approx(
            R_TAU_A09, rel=1e-12)

    def test_slow_decay(self):
        f = JammerField(0.0, 0.0, k=1.0, decay_a=0.98)
        assert critical_radius(f, DisruptionPolicy(0.5)) == pytest.approx(
            R_TAU_A098, rel=1e-12)

    def test_threshold_unreachable(self):
        f = JammerField(0.0, 0.0, k=0.4, decay_a=0.9)
        with pytest.raises(ValueError, match="threshold unreachable"):
            critical_radius(f, DisruptionPolicy(0.5))

    def test_roundtrip_probability_at_critical_radius(self):
        rng = np.random.default_rng(17)
        for _ in range(500):
            f = JammerField(rng.uniform(-50, 50), rng.uniform(-50, 50),
                            k=rng.uniform(0.3, 1.0), decay_a=rng.uniform(0.05, 0.99))
            p_tau = rng.uniform(0.01, f.k * 0.99)
            policy = DisruptionPolicy(p_tau)
            r_tau = critical_radius(f, policy)
            assert r_tau > 0.0
            p = probability(f, (f.pos_x + r_tau, f.pos_y))
            assert p == pytest.approx(p_tau, rel=1e-12)


class TestIsDisrupted:
    def test_boundary_counts_as_disrupted(self):
        f = JammerField(0.0, 0.0, k=1.0, decay_a=0.9)
        policy = DisruptionPolicy(0.5)
        r_tau = critical_radius(f, policy)
        assert is_disrupted(f, policy, (r_tau, 0.0))

    def test_outside_is_safe(self):
        f = JammerField(0.0, 0.0, k=1.0, decay_a=0.9)
        policy = DisruptionPolicy(0.5)
        r_tau = critical_radius(f, policy)
        assert not is_disrupted(f, policy, (2.0 * r_tau, 0.0))

    def test_six_meters_inside_default_disk(self):
        f = JammerField(0.0, 0.0, k=1.0, decay_a=0.9)
        assert is_disrupted(f, DisruptionPolicy(0.5), (6.0, 0.0))  # 6.0 < 6.5788

    def test_unreachable_threshold_means_safe_everywhere(self):
        f = JammerField(0.0, 0.0, k=0.4, decay_a=0.9)
        policy = DisruptionPolicy(0.5)
        assert not is_disrupted(f, policy, (0.0, 0.0))
        assert not is_disrupted(f, policy, (10.0, 0.0))


class TestValidation:
    def test_field_rejects_bad_constants(self):
        with pytest.raises(ValueError):
            JammerField(0.0, 0.0, k=0.0)
        with pytest.raises(ValueError):
            JammerField(0.0, 0.0, k=1.5)
        with pytest.raises(ValueError):
            JammerField(0.0, 0.0, decay_a=1.0)
        with pytest.raises(ValueError):
            JammerField(0.0, 0.0, decay_a=0.0)
        with pytest.raises(ValueError):
            JammerField(math.inf, 0.0)

    def test_policy_rejects_bad_threshold(self):
        with pytest.raises(ValueError):
            DisruptionPolicy(0.0)
        with pytest.raises(ValueError):
            DisruptionPolicy(1.0)
