"""Game primitives: actions, risk attitudes, frontiers and implementability."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .numerics import ValueFunction

EPS_TOL = 1e-9


@dataclass(frozen=True)
class ActionSpec:
    reward: float
    cost: float

    def __post_init__(self):
        for name in ("reward", "cost"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {value}")


@dataclass(frozen=True)
class Instance:
    """Common knowledge (n, r, c). ``actions[0]`` is the default action."""

    actions: tuple[ActionSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        if len(self.actions) < 2:
            raise ValueError("an instance needs at least one non-default action")
        if self.actions[0].reward != 0 or self.actions[0].cost != 0:
            raise ValueError("action 0 must have zero reward and zero cost")

    @classmethod
    def from_vectors(cls, rewards: Sequence[float], costs: Sequence[float]) -> "Instance":
        """Build from full vectors r, c that include the default action at index 0."""
        if len(rewards) != len(costs):
            raise ValueError("rewards and costs differ in length")
        return cls(tuple(ActionSpec(float(r), float(c)) for r, c in zip(rewards, costs)))

    @classmethod
    def from_actions(cls, rewards: Sequence[float], costs: Sequence[float]) -> "Instance":
        """Build from non-default actions only; action 0 is prepended."""
        return cls.from_vectors([0.0, *rewards], [0.0, *costs])

    @property
    def n(self) -> int:
        return len(self.actions) - 1

    @property
    def rewards(self) -> np.ndarray:
        return np.array([a.reward for a in self.actions])

    @property
    def costs(self) -> np.ndarray:
        return np.array([a.cost for a in self.actions])

    def scaled(self, factor: float) -> "Instance":
        return Instance.from_vectors(self.rewards * factor, self.costs * factor)


class RiskAttitude:
    """Base class; use :class:`RiskNeutral` or :class:`RiskAverse`."""

    def money_cost(self, cost: float) -> float:
        """Transfer that exactly compensates ``cost`` when paid with certainty."""
        raise NotImplementedError


@dataclass(frozen=True)
class RiskNeutral(RiskAttitude):
    def money_cost(self, cost):
        return cost


@dataclass(frozen=True)
class RiskAverse(RiskAttitude):
    v: ValueFunction

    def __post_init__(self):
        if not isinstance(self.v, ValueFunction):
            raise TypeError("RiskAverse needs a ValueFunction")

    def money_cost(self, cost):
        return self.v.inverse(cost)


NEUTRAL = RiskNeutral()


class UtilityProfile(NamedTuple):
    x: float  # principal
    y: float  # agent


def hat_action(instance: Instance) -> int:
    """Least costly non-default action, ties broken by larger reward, then lower index."""
    best = 1
    for a in range(2, instance.n + 1):
        cur, cand = instance.actions[best], instance.actions[a]
        if cand.cost < cur.cost or (cand.cost == cur.cost and cand.reward > cur.reward):
            best = a
    return best


def certainty_surplus(instance: Instance, attitude: RiskAttitude, a: int) -> float:
    """r_a - c_a (neutral) or r_a - v^-1(c_a) (averse)."""
    spec = instance.actions[a]
    return spec.reward - attitude.money_cost(spec.cost)


def principal_floor(instance: Instance, attitude: RiskAttitude) -> float:
    return max(0.0, certainty_surplus(instance, attitude, hat_action(instance)))


def money_above_floor(instance: Instance, attitude: RiskAttitude, a: int) -> float:
    """r_a - floor, written to avoid cancellation when the floor is r_hat - m(c_hat).

    For a = hat action this is exactly m(c_hat), however small next to r_hat.
    """
    spec = instance.actions[a]
    h = hat_action(instance)
    if certainty_surplus(instance, attitude, h) > 0:
        hat = instance.actions[h]
        return (spec.reward - hat.reward) + attitude.money_cost(hat.cost)
    return spec.reward


def payment_at(instance: Instance, attitude: RiskAttitude, a: int, x: float) -> float:
    """Expected payment r_a - x leaving the principal x; exact at the floor."""
    if x > principal_floor(instance, attitude):
        return instance.actions[a].reward - x
    return money_above_floor(instance, attitude, a)


def _check_index(instance: Instance, a: int, allow_default: bool = True):
    lo = 0 if allow_default else 1
    if not (lo <= a <= instance.n):
        raise IndexError(f"action {a} outside [{lo}, {instance.n}]")


def is_action_implementable(instance: Instance, attitude: RiskAttitude, a: int) -> bool:
    _check_index(instance, a)
    if a == 0:
        return True
    floor = principal_floor(instance, attitude)
    if certainty_surplus(instance, attitude, a) < floor - EPS_TOL:
        return False
    if isinstance(attitude, RiskAverse):
        # same slack in agent utility, where v' near 0 can blow up an x-space gap
        money = money_above_floor(instance, attitude, a)
        return attitude.v.eval(max(money, 0.0)) - instance.actions[a].cost >= -EPS_TOL
    return True


def implementable_actions(instance: Instance, attitude: RiskAttitude) -> list[int]:
    """Non-default implementable actions in index order."""
    return [a for a in range(1, instance.n + 1) if is_action_implementable(instance, attitude, a)]


def frontier(instance: Instance, attitude: RiskAttitude, a: int, x: float) -> float:
    """Largest agent utility compatible with principal utility ``x`` under action ``a``."""
    _check_index(instance, a, allow_default=False)
    spec = instance.actions[a]
    if x > spec.reward:
        raise ValueError(f"x={x} exceeds r_{a}={spec.reward}")
    if isinstance(attitude, RiskAverse):
        return attitude.v.eval(spec.reward - x) - spec.cost
    return spec.reward - spec.cost - x


def feasible_x_range(instance: Instance, attitude: RiskAttitude, a: int) -> tuple[float, float] | None:
    """Interval of principal utilities on action ``a``'s frontier with y >= 0 and x >= floor."""
    lo = principal_floor(instance, attitude)
    hi = certainty_surplus(instance, attitude, a)
    if hi < lo - EPS_TOL:
        return None
    return lo, max(lo, hi)


def profile_in_action_set(instance: Instance, attitude: RiskAttitude, a: int, p: UtilityProfile,
                          tol: float = EPS_TOL) -> bool:
    """Membership of ``p`` in F_a intersected with the implementable region."""
    if a == 0:
        return abs(p.x) <= tol and abs(p.y) <= tol
    spec = instance.actions[a]
    if p.x < principal_floor(instance, attitude) - tol or p.y < -tol:
        return False
    if p.x > spec.reward + tol:
        return False
    if isinstance(attitude, RiskAverse):
        money = max(payment_at(instance, attitude, a, p.x), 0.0)
        return p.y <= attitude.v.eval(money) - spec.cost + tol
    return abs(p.x + p.y - (spec.reward - spec.cost)) <= tol


def is_profile_implementable(instance: Instance, attitude: RiskAttitude, p: UtilityProfile,
                             tol: float = EPS_TOL) -> int | None:
    """Witness action for an implementable profile, else None.

    (0, 0) is always witnessed by the default action.
    """
    p = UtilityProfile(*p)
    if abs(p.x) <= tol and abs(p.y) <= tol:
        return 0
    for a in range(1, instance.n + 1):
        if profile_in_action_set(instance, attitude, a, p, tol):
            return a
    return None
