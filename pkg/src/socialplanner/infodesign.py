"""Stage 2: binary-signal information structures that realise a target profile.

Signal 1 is the "high" (paid) signal and signal 2 the "low" (unpaid) one,
so every predicted contract has the form (transfer, 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import (
    EPS_TOL,
    NEUTRAL,
    Instance,
    RiskAttitude,
    RiskAverse,
    UtilityProfile,
    hat_action,
    payment_at,
    profile_in_action_set,
)
from .numerics import ValueFunction, solve_v_ratio
from .planner import PlanResult, SocialUtility, plan

ROW_SUM_TOL = 1e-12


class DesignError(ValueError):
    """The target cannot be realised by the requested construction."""


@dataclass(frozen=True, eq=False)
class InformationStructure:
    """Row-stochastic map from actions 1..n to k signals (row i-1 belongs to action i)."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise ValueError("rows must be a non-empty 2-d array")
        if np.any(rows < 0) or np.any(rows > 1):
            raise ValueError("signal probabilities must lie in [0, 1]")
        if np.any(np.abs(rows.sum(axis=1) - 1.0) > ROW_SUM_TOL):
            raise ValueError("every row must sum to 1")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def k(self) -> int:
        return self.rows.shape[1]

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    def row(self, action: int) -> np.ndarray:
        return self.rows[action - 1]

    @classmethod
    def uninformative(cls, n: int) -> "InformationStructure":
        return cls(np.ones((n, 1)))

    @classmethod
    def binary(cls, high_probs) -> "InformationStructure":
        p = np.asarray(high_probs, dtype=float)
        return cls(np.column_stack([p, 1.0 - p]))

    def __eq__(self, other):
        return isinstance(other, InformationStructure) and np.array_equal(self.rows, other.rows)


@dataclass(frozen=True)
class Contract:
    transfers: tuple[float, ...]

    def __post_init__(self):
        t = tuple(float(x) for x in self.transfers)
        if any(x < 0 for x in t):
            raise ValueError("limited liability: transfers must be nonnegative")
        object.__setattr__(self, "transfers", t)

    @property
    def k(self) -> int:
        return len(self.transfers)


@dataclass(frozen=True)
class DesignOutput:
    structure: InformationStructure
    predicted_contract: Contract
    target_action: int
    target_profile: UtilityProfile
    auxiliaries: dict = field(default_factory=dict)  # s_star, or z_star, p_star, q_star


def transfer_for_profile(instance: Instance, attitude: RiskAttitude, a_star: int, p) -> float:
    """Transfer on the high signal that gives the target utilities.

    Risk-neutral: s* = r - x*. Risk-averse: z* with v(z)/z = (y* + c)/(r - x*).
    """
    p = UtilityProfile(*p)
    if a_star < 1 or not profile_in_action_set(instance, attitude, a_star, p):
        raise DesignError(f"profile {tuple(p)} is not implementable through action {a_star}")
    spec = instance.actions[a_star]
    if not isinstance(attitude, RiskAverse):
        return max(0.0, spec.reward - p.x)
    money = payment_at(instance, attitude, a_star, p.x)
    need = p.y + spec.cost
    if money <= 0:
        if need > EPS_TOL:
            raise DesignError("x* = r_a* leaves no money for a positive agent utility")
        return 0.0
    if need <= 0:
        raise DesignError("a positive payment gap with zero agent compensation has no transfer")
    return solve_v_ratio(attitude.v, need / money)


def _rows_by_category(instance: Instance, a_star: int, high_prob: float, low_prob: float) -> np.ndarray:
    c_star = instance.actions[a_star].cost
    probs = [high_prob if (i == a_star or instance.actions[i].cost > c_star) else low_prob
             for i in range(1, instance.n + 1)]
    return np.array(probs)


def _zero_transfer_design(instance, a_star, p, aux) -> DesignOutput:
    return DesignOutput(InformationStructure.binary(np.ones(instance.n)), Contract((0.0, 0.0)),
                        a_star, p, aux)


def design_neutral(instance: Instance, a_star: int, p) -> DesignOutput:
    p = UtilityProfile(*p)
    s_star = transfer_for_profile(instance, NEUTRAL, a_star, p)
    gap = instance.actions[a_star].cost - instance.actions[hat_action(instance)].cost
    if s_star <= 0:
        if gap > EPS_TOL:
            raise DesignError("zero transfer cannot separate a* from the cheaper action")
        return _zero_transfer_design(instance, a_star, p, {"s_star": 0.0, "p_star": 1.0})
    p_star = 1.0 - gap / s_star
    if p_star < -EPS_TOL:
        raise DesignError(f"p* = {p_star} is negative; target is not implementable")
    p_star = min(1.0, max(0.0, p_star))
    rows = _rows_by_category(instance, a_star, 1.0, p_star)
    return DesignOutput(InformationStructure.binary(rows), Contract((s_star, 0.0)), a_star, p,
                        {"s_star": s_star, "p_star": p_star})


def design_averse(instance: Instance, v: ValueFunction, a_star: int, p) -> DesignOutput:
    p = UtilityProfile(*p)
    attitude = RiskAverse(v)
    z_star = transfer_for_profile(instance, attitude, a_star, p)
    spec = instance.actions[a_star]
    c_hat = instance.actions[hat_action(instance)].cost
    if z_star <= 0 or p.y + spec.cost <= 0:
        return _zero_transfer_design(instance, a_star, p, {"z_star": 0.0, "q_star": 1.0, "p_star": 1.0})
    q_star = payment_at(instance, attitude, a_star, p.x) / z_star
    p_star = q_star * (p.y + c_hat) / (p.y + spec.cost)
    # overshooting 1 is harmless when clipping moves both utilities by less than EPS_TOL
    excess = max(0.0, q_star - 1.0) * max(z_star, v.eval(z_star))
    if not (-EPS_TOL <= p_star <= q_star + EPS_TOL and (q_star <= 1.0 + 1e-9 or excess <= EPS_TOL)):
        raise DesignError(f"expected 0 <= p* <= q* <= 1, got p*={p_star}, q*={q_star}")
    q_star = min(1.0, q_star)
    p_star = min(q_star, max(0.0, p_star))
    rows = _rows_by_category(instance, a_star, q_star, p_star)
    return DesignOutput(InformationStructure.binary(rows), Contract((z_star, 0.0)), a_star, p,
                        {"z_star": z_star, "q_star": q_star, "p_star": p_star})


def design_for_plan(instance: Instance, attitude: RiskAttitude, result: PlanResult) -> DesignOutput:
    if result.target_action == 0:
        return DesignOutput(InformationStructure.uninformative(instance.n), Contract((0.0,)), 0,
                            result.profile, {})
    if isinstance(attitude, RiskAverse):
        return design_averse(instance, attitude.v, result.target_action, result.profile)
    return design_neutral(instance, result.target_action, result.profile)


def design(instance: Instance, attitude: RiskAttitude, kind: SocialUtility) -> DesignOutput:
    return design_for_plan(instance, attitude, plan(instance, attitude, kind))
