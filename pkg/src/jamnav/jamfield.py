"""Closed-form jamming field: disruption probability, its time rate, critical radius."""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class JammerField:
    """Stationary jammer with exponential-decay disruption probability.

    The probability that a receiver at distance r loses its link is
    k * decay_a ** r, so decay_a controls how fast the field falls off
    and k is the value at the center.
    """

    pos_x: float
    pos_y: float
    k: float = 1.0
    decay_a: float = 0.9

    def __post_init__(self):
        if not (math.isfinite(self.pos_x) and math.isfinite(self.pos_y)):
            raise ValueError("jammer center must be finite")
        if not 0.0 < self.k <= 1.0:
            raise ValueError(f"k must be in (0, 1], got {self.k}")
        if not 0.0 < self.decay_a < 1.0:
            raise ValueError(f"decay_a must be in (0, 1), got {self.decay_a}")


@dataclass(frozen=True)
class DisruptionPolicy:
    """Probability threshold at or above which a UAV's communication is lost."""

    p_tau: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.p_tau < 1.0:
            raise ValueError(f"p_tau must be in (0, 1), got {self.p_tau}")


def _offset(field, pos):
    x, y = float(pos[0]), float(pos[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError("position must be finite")
    return x - field.pos_x, y - field.pos_y


def probability(field, pos):
    """Disruption probability k * A^r at pos; equals k at the center."""
    dx, dy = _offset(field, pos)
    r = math.hypot(dx, dy)
    return field.k * field.decay_a ** r


def probability_rate(field, pos, vel):
    """Time derivative of the disruption probability along velocity vel.

    dP/dt = P(r) * ln(A) * (dp . v) / r with dp = pos - center.
    Undefined at the center, where the radial direction does not exist.
    """
    vx, vy = float(vel[0]), float(vel[1])
    if not (math.isfinite(vx) and math.isfinite(vy)):
        raise ValueError("velocity must be finite")
    dx, dy = _offset(field, pos)
    r = math.hypot(dx, dy)
    if r == 0.0:
        raise ValueError("probability rate is singular at the jammer center")
    p = field.k * field.decay_a ** r
    return p * math.log(field.decay_a) * (dx * vx + dy * vy) / r


def critical_radius(field, policy):
    """Distance at which the probability has decayed to the disruption threshold."""
    if policy.p_tau >= field.k:
        raise ValueError(
            f"threshold unreachable: p_tau={policy.p_tau} >= k={field.k}, "
            "no disruption disk exists"
        )
    return math.log(policy.p_tau / field.k) / math.log(field.decay_a)


def is_disrupted(field, policy, pos):
    """True iff pos is inside or on the disruption disk (boundary disrupted)."""
    dx, dy = _offset(field, pos)
    if policy.p_tau >= field.k:
        # No disk exists; fall back to the probability comparison.
        return field.k * field.decay_a ** math.hypot(dx, dy) >= policy.p_tau
    return math.hypot(dx, dy) <= critical_radius(field, policy)
