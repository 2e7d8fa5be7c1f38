"""Stage 1: choose the implementable utility profile that maximises a social utility function.

The feasible set is split per action (each piece is a segment for a
risk-neutral agent and a convex region under a concave frontier for a
risk-averse one); each piece has a closed-form or one-dimensional-root
optimum, and the outer problem is a comparison over actions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .model import (
    EPS_TOL,
    Instance,
    RiskAttitude,
    RiskAverse,
    UtilityProfile,
    certainty_surplus,
    frontier,
    hat_action,
    implementable_actions,
    is_action_implementable,
    principal_floor,
)
from .numerics import solve_equal_split, solve_tangent_np


class SocialUtility(enum.Enum):
    USF = "usf"
    NASH_PRODUCT = "nash_product"
    ESF = "esf"
    APPROX_FAIRNESS = "approx_fairness"


def evaluate_welfare(kind: SocialUtility, p) -> float:
    x, y = p
    if kind is SocialUtility.USF:
        return x + y
    if kind is SocialUtility.NASH_PRODUCT:
        return x * y
    if kind is SocialUtility.ESF:
        return min(x, y)
    if kind is SocialUtility.APPROX_FAIRNESS:
        return 0.0 - (x - y) ** 2 / 4.0  # 0.0 rather than -0.0 at x = y
    raise ValueError(f"unknown social utility {kind!r}")


@dataclass(frozen=True)
class PlanResult:
    target_action: int
    profile: UtilityProfile
    welfare_value: float
    unique: bool = True
    segment: tuple[float, float] | None = None  # x-interval of the optimal set when not unique


@dataclass(frozen=True)
class _ActionOptimum:
    profile: UtilityProfile
    value: float
    segment: tuple[float, float] | None = None
    crossing: float | None = None  # x where the frontier meets y = x (risk-averse ESF/AF)


def _on_frontier(instance, attitude, a, x) -> UtilityProfile:
    # negative only by rounding at the floor of a barely implementable action
    return UtilityProfile(x, max(0.0, frontier(instance, attitude, a, x)))


def _neutral_optimum(instance, a, kind, floor) -> _ActionOptimum:
    W = instance.actions[a].reward - instance.actions[a].cost
    if W / 2.0 >= floor:
        p = UtilityProfile(W / 2.0, W / 2.0)
    else:
        p = UtilityProfile(floor, W - floor)
    segment = None
    if kind is SocialUtility.USF and W - floor > EPS_TOL:
        segment = (floor, W)
    return _ActionOptimum(p, evaluate_welfare(kind, p), segment)


def _averse_usf(instance, attitude, a) -> UtilityProfile:
    v = attitude.v
    spec = instance.actions[a]
    x1 = certainty_surplus(instance, attitude, hat_action(instance))
    # checked in order; the first match wins
    if v.derivative(v.inverse(spec.cost)) <= 1.0:
        return UtilityProfile(spec.reward - v.inverse(spec.cost), 0.0)
    if x1 >= 0 and v.derivative(spec.reward - x1) > 1.0:
        return _on_frontier(instance, attitude, a, x1)
    if x1 < 0 and v.derivative(spec.reward) > 1.0:
        return _on_frontier(instance, attitude, a, 0.0)
    z = v.derivative_inverse(1.0)
    return UtilityProfile(spec.reward - z, v.eval(z) - spec.cost)


def _averse_optimum(instance, attitude, a, kind, floor) -> _ActionOptimum:
    v = attitude.v
    spec = instance.actions[a]
    if certainty_surplus(instance, attitude, a) <= floor:
        # implementable only within tolerance: the set is the point (floor, 0)
        p = UtilityProfile(floor, 0.0)
        return _ActionOptimum(p, evaluate_welfare(kind, p), crossing=0.0 if floor == 0 else -math.inf)
    if kind is SocialUtility.USF:
        p = _averse_usf(instance, attitude, a)
        return _ActionOptimum(p, evaluate_welfare(kind, p))
    if kind is SocialUtility.NASH_PRODUCT:
        x_a = solve_tangent_np(v, spec.reward, spec.cost)
        p = _on_frontier(instance, attitude, a, max(x_a, floor))
        return _ActionOptimum(p, evaluate_welfare(kind, p))
    # ESF and AF share the y = x crossing of the frontier
    x_a = solve_equal_split(v, spec.reward, spec.cost)
    if x_a >= floor:
        p = UtilityProfile(x_a, x_a)
        segment = (floor, x_a) if kind is SocialUtility.APPROX_FAIRNESS and x_a - floor > EPS_TOL else None
        return _ActionOptimum(p, evaluate_welfare(kind, p), segment, x_a)
    p = _on_frontier(instance, attitude, a, floor)
    return _ActionOptimum(p, evaluate_welfare(kind, p), crossing=x_a)


def _action_optimum(instance, attitude, kind, a) -> _ActionOptimum | None:
    if a < 1 or a > instance.n:
        raise IndexError(f"action {a} outside [1, {instance.n}]")
    if not is_action_implementable(instance, attitude, a):
        return None
    floor = principal_floor(instance, attitude)
    if isinstance(attitude, RiskAverse):
        return _averse_optimum(instance, attitude, a, kind, floor)
    return _neutral_optimum(instance, a, kind, floor)


def plan_action(instance: Instance, attitude: RiskAttitude, kind: SocialUtility, a: int):
    """Best (profile, welfare) among profiles induced through action ``a``, or None."""
    opt = _action_optimum(instance, attitude, kind, a)
    if opt is None:
        return None
    return opt.profile, opt.value


def _default_plan(kind) -> PlanResult:
    p = UtilityProfile(0.0, 0.0)
    return PlanResult(0, p, evaluate_welfare(kind, p))


def plan(instance: Instance, attitude: RiskAttitude, kind: SocialUtility) -> PlanResult:
    actions = implementable_actions(instance, attitude)
    if not actions:
        return _default_plan(kind)
    optima = {a: _action_optimum(instance, attitude, kind, a) for a in actions}

    if isinstance(attitude, RiskAverse) and kind is SocialUtility.ESF:
        return _averse_esf_procedure(instance, attitude, optima)
    if kind is SocialUtility.APPROX_FAIRNESS:
        return _approx_fairness_reduction(optima)
    if not isinstance(attitude, RiskAverse):
        # USF, NP and ESF all pick the action with the largest surplus r_a - c_a
        best = max(actions, key=lambda a: (certainty_surplus(instance, attitude, a), -a))
        opt = optima[best]
        unique = opt.segment is None
        return PlanResult(best, opt.profile, opt.value, unique, opt.segment)
    return _argmax_reduction(optima)


def _argmax_reduction(optima) -> PlanResult:
    best = None
    for a in sorted(optima):
        if best is None or optima[a].value > optima[best].value:
            best = a
    opt = optima[best]
    return PlanResult(best, opt.profile, opt.value, opt.segment is None, opt.segment)


def _averse_esf_procedure(instance, attitude, optima) -> PlanResult:
    floor = principal_floor(instance, attitude)
    # step 1: the y = x crossing for each implementable action
    crossing = {a: opt.crossing for a, opt in optima.items() if opt.crossing >= floor}
    if crossing:
        # step 2: the largest equal split among actions whose crossing is implementable
        best = max(sorted(crossing), key=lambda a: crossing[a])
    else:
        # step 3: every crossing lies left of the floor; compare agent utilities at x = floor
        best = max(sorted(optima), key=lambda a: optima[a].profile.y)
    opt = optima[best]
    return PlanResult(best, opt.profile, opt.value)


def _approx_fairness_reduction(optima) -> PlanResult:
    ideal = [a for a, opt in optima.items() if opt.value >= -EPS_TOL]
    if ideal:
        # every action reaching AF = 0 is optimal; prefer the largest total surplus
        best = max(sorted(ideal), key=lambda a: optima[a].profile.x + optima[a].profile.y)
        opt = optima[best]
        unique = len(ideal) == 1 and opt.segment is None
        return PlanResult(best, opt.profile, opt.value, unique, opt.segment)
    return _argmax_reduction(optima)
