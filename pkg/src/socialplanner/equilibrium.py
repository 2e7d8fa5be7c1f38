"""Brute-force oracles for both stages.

The principal's contract problem is solved by enumerating a transfer grid
and playing the agent's best response against every grid contract; Stage 1
is checked by sweeping each action's frontier. None of this reuses the
closed forms in :mod:`socialplanner.planner` or :mod:`socialplanner.infodesign`.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .infodesign import Contract, DesignOutput, InformationStructure
from .model import (
    Instance,
    RiskAttitude,
    RiskAverse,
    UtilityProfile,
    implementable_actions,
    money_above_floor,
    principal_floor,
)
from .planner import PlanResult, SocialUtility

CHUNK = 200_000
FULL_MODE_MAX_K = 3


class GridTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class GridConfig:
    """Transfer grid for the principal.

    ``principal_tie_tol`` (default: ``step``) is the gap in principal utility
    below which contracts inducing different actions count as equally good;
    such ties go to the agent. Discretisation alone moves each action's best
    grid utility by up to one step, so exact indifference between actions is
    otherwise resolved by grid alignment.
    """

    transfer_max: float
    step: float
    tie_tol: float = 1e-9
    principal_tie_tol: float | None = None
    max_evaluations: int = 20_000_000

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.transfer_max >= self.step:
            raise ValueError("transfer_max must be at least one step")
        if not self.tie_tol >= 0:
            raise ValueError("tie_tol must be nonnegative")

    @property
    def action_tie_tol(self) -> float:
        return self.step if self.principal_tie_tol is None else self.principal_tie_tol


def default_transfer_max(instance: Instance, attitude: RiskAttitude) -> float:
    r_max = float(instance.rewards.max())
    bound = 2.0 * r_max
    if isinstance(attitude, RiskAverse):
        v = attitude.v
        bound = max(bound, v.inverse(v.eval(r_max) + float(instance.costs.max())))
    return bound if bound > 0 else 1.0


def default_grid(instance: Instance, attitude: RiskAttitude, step: float | None = None,
                 transfer_max: float | None = None, rel_step: float = 1e-3) -> GridConfig:
    if transfer_max is None:
        transfer_max = default_transfer_max(instance, attitude)
    if step is None:
        step = rel_step * transfer_max
    return GridConfig(transfer_max=transfer_max, step=step)


@dataclass(frozen=True)
class EquilibriumOutcome:
    contract: Contract
    action: int
    profile: UtilityProfile


def _level_bound(grid: GridConfig, attitude: RiskAttitude) -> int:
    """Upper bound on ``len(transfer_levels(grid, attitude))`` without building it."""
    count = grid.transfer_max / grid.step + 1
    if isinstance(attitude, RiskAverse):
        count += attitude.v.eval(grid.transfer_max) / grid.step + 1
    return int(min(count, 2**62))


def transfer_levels(grid: GridConfig, attitude: RiskAttitude) -> np.ndarray:
    """Sorted transfer values available on each signal.

    Uniform in money; for a risk-averse agent also uniform in v(money), so the
    nearest level above any transfer is within one step in both units.
    """
    m = int(math.floor(grid.transfer_max / grid.step + 1e-9))
    levels = np.arange(m + 1) * grid.step
    if isinstance(attitude, RiskAverse):
        v = attitude.v
        u_max = v.eval(grid.transfer_max)
        mu = int(math.floor(u_max / grid.step + 1e-9))
        extra = v.inverse_array(np.arange(mu + 1) * grid.step)
        levels = np.union1d(levels, extra[extra <= grid.transfer_max])
    return levels


def _threads() -> int:
    raw = os.environ.get("INFODESIGN_THREADS", "").strip()
    n = int(raw) if raw else 0
    return n if n > 0 else (os.cpu_count() or 1)


def _payoffs(instance, attitude, rows, T):
    """Agent and principal utilities, shape (m, n + 1), column 0 the default action."""
    expected = T @ rows.T
    r = instance.rewards[1:]
    c = instance.costs[1:]
    if isinstance(attitude, RiskAverse):
        agent = attitude.v.eval_array(T) @ rows.T - c
    else:
        agent = expected - c
    principal = r - expected
    zeros = np.zeros((T.shape[0], 1))
    return np.hstack([zeros, agent]), np.hstack([zeros, principal])


def _best_responses(agent, principal, tie_tol):
    top = agent.max(axis=1, keepdims=True)
    favoured = np.where(agent >= top - tie_tol, principal, -np.inf)
    return np.argmax(favoured, axis=1)


def agent_best_response(instance: Instance, attitude: RiskAttitude, structure: InformationStructure,
                        contract: Contract, tie_tol: float = 1e-9) -> int:
    """Agent's optimal action; near-ties go to the principal, then to the lower index."""
    if structure.n != instance.n:
        raise ValueError(f"structure has {structure.n} rows, instance has {instance.n} actions")
    if contract.k != structure.k:
        raise ValueError(f"contract has {contract.k} entries, structure has {structure.k} signals")
    T = np.asarray(contract.transfers, dtype=float)[None, :]
    agent, principal = _payoffs(instance, attitude, structure.rows, T)
    return int(_best_responses(agent, principal, tie_tol)[0])


def _contracts(levels, k, mode, start, stop):
    idx = np.arange(start, stop)
    if mode == "low_zero":
        T = np.zeros((idx.size, k))
        T[:, 0] = levels[idx]
        return T
    digits = np.unravel_index(idx, (levels.size,) * k)
    return np.column_stack([levels[d] for d in digits])


def _scan_chunk(instance, attitude, rows, levels, k, mode, tie_tol, start, stop):
    """Best (principal utility, contract index, agent utility) per induced action."""
    T = _contracts(levels, k, mode, start, stop)
    agent, principal = _payoffs(instance, attitude, rows, T)
    actions = _best_responses(agent, principal, tie_tol)
    pick = np.arange(T.shape[0])
    u_p = principal[pick, actions]
    u_a = agent[pick, actions]
    best = {}
    for a in np.unique(actions):
        sel = np.flatnonzero(actions == a)
        j = sel[np.argmax(u_p[sel])]
        best[int(a)] = (float(u_p[j]), start + int(j), float(u_a[j]))
    return best


def _merge(into, part):
    for a, cand in part.items():
        cur = into.get(a)
        if cur is None or cand[0] > cur[0] or (cand[0] == cur[0] and cand[1] < cur[1]):
            into[a] = cand


def principal_best_contract(instance: Instance, attitude: RiskAttitude, structure: InformationStructure,
                            grid: GridConfig, mode: str = "low_zero", chunk_size: int = CHUNK,
                            threads: int | None = None) -> EquilibriumOutcome:
    """Principal's optimal grid contract and the equilibrium it induces.

    ``full`` enumerates every k-tuple of transfer levels; ``low_zero`` pays
    only on signal 1. Within an induced action the lexicographically smallest
    contract wins exact ties. The result does not depend on chunking.
    """
    if structure.n != instance.n:
        raise ValueError(f"structure has {structure.n} rows, instance has {instance.n} actions")
    if mode not in ("full", "low_zero"):
        raise ValueError(f"unknown mode {mode!r}")
    k = structure.k
    if mode == "full" and k > FULL_MODE_MAX_K:
        raise GridTooLarge(f"full enumeration supports k <= {FULL_MODE_MAX_K}, got k={k}")
    bound = _level_bound(grid, attitude)
    if (bound if mode == "low_zero" else bound ** k) > 10 * grid.max_evaluations:
        raise GridTooLarge(f"about {bound} transfer levels per signal exceed the evaluation cap")
    levels = transfer_levels(grid, attitude)
    total = levels.size if mode == "low_zero" else levels.size ** k
    if total > grid.max_evaluations:
        raise GridTooLarge(f"{total} contracts exceed the cap of {grid.max_evaluations}")

    bounds = [(s, min(s + chunk_size, total)) for s in range(0, total, chunk_size)]
    args = (instance, attitude, structure.rows, levels, k, mode, grid.tie_tol)
    workers = min(threads or _threads(), len(bounds))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _scan_chunk(*args, *b), bounds))
    else:
        parts = [_scan_chunk(*args, *b) for b in bounds]
    best = {}
    for part in parts:
        _merge(best, part)

    top = max(u for u, _, _ in best.values())
    near = [a for a, (u, _, _) in best.items() if u >= top - grid.action_tie_tol]
    chosen = max(sorted(near), key=lambda a: (best[a][2], best[a][0], -a))
    u_p, index, u_a = best[chosen]
    T = _contracts(levels, k, mode, index, index + 1)[0]
    return EquilibriumOutcome(Contract(tuple(T)), chosen, UtilityProfile(u_p, u_a))


@dataclass(frozen=True)
class VerificationReport:
    induced_action: int
    induced_contract: Contract
    induced_profile: UtilityProfile
    target_action: int
    target_profile: UtilityProfile
    max_abs_err: float
    tolerance: float
    passed: bool


def _same_action(instance, a, b):
    return a == b or instance.actions[a] == instance.actions[b]


def verify_design(instance: Instance, attitude: RiskAttitude, design: DesignOutput, tol: float = 1e-6,
                  grid: GridConfig | None = None, mode: str = "low_zero") -> VerificationReport:
    """Replay the game under the designed structure and compare with the target."""
    if grid is None:
        grid = default_grid(instance, attitude)
    outcome = principal_best_contract(instance, attitude, design.structure, grid, mode)
    target = UtilityProfile(*design.target_profile)
    err = max(abs(outcome.profile.x - target.x), abs(outcome.profile.y - target.y))
    bound = tol + 2.0 * grid.step
    passed = err <= bound and _same_action(instance, outcome.action, design.target_action)
    return VerificationReport(outcome.action, outcome.contract, outcome.profile, design.target_action,
                              target, err, bound, passed)


def _welfare(kind, x, y):
    if kind is SocialUtility.USF:
        return x + y
    if kind is SocialUtility.NASH_PRODUCT:
        return x * y
    if kind is SocialUtility.ESF:
        return np.minimum(x, y)
    return -((x - y) ** 2) / 4.0


def welfare_samples(instance: Instance, attitude: RiskAttitude, kind: SocialUtility, samples: int):
    """Per implementable action: (xs, ys, welfare) on the part of the frontier inside the implementable set.

    Points are floor + t with the payment m0 - t, where m0 is the payment at
    the floor, so the floor sample carries no cancellation error.
    """
    floor = principal_floor(instance, attitude)
    out = {}
    for a in implementable_actions(instance, attitude):
        spec = instance.actions[a]
        m0 = money_above_floor(instance, attitude, a)
        span = max(0.0, m0 - attitude.money_cost(spec.cost))

        def agent(t):
            money = np.maximum(m0 - t, 0.0)
            if isinstance(attitude, RiskAverse):
                return attitude.v.eval_array(money) - spec.cost
            return money - spec.cost

        ts = np.linspace(0.0, span, samples)
        crossing = False
        if kind is SocialUtility.APPROX_FAIRNESS:
            gap = lambda t: floor + t - agent(np.array([t]))[0]
            if gap(0.0) <= 0 <= gap(span):
                tc = 0.0 if gap(0.0) == 0 else brentq(gap, 0.0, span, xtol=1e-14)
                ts = np.append(ts, tc)
                crossing = True
        xs = floor + ts
        ys = np.maximum(agent(ts), 0.0)
        if crossing:
            ys[-1] = xs[-1]  # on the diagonal by construction
        out[a] = (xs, ys, _welfare(kind, xs, ys))
    return out


def brute_force_plan(instance: Instance, attitude: RiskAttitude, kind: SocialUtility,
                     samples: int = 100_000) -> PlanResult:
    """Stage-1 optimum by sweeping every implementable action's frontier."""
    sweeps = welfare_samples(instance, attitude, kind, samples)
    if not sweeps:
        return PlanResult(0, UtilityProfile(0.0, 0.0), float(_welfare(kind, 0.0, 0.0)))
    best = None
    for a, (xs, ys, w) in sorted(sweeps.items()):
        j = int(np.argmax(w))
        cand = (float(w[j]), a, UtilityProfile(float(xs[j]), float(ys[j])))
        if best is None or cand[0] > best[0]:
            best = cand
        elif kind is SocialUtility.APPROX_FAIRNESS and cand[0] == best[0] and sum(cand[2]) > sum(best[2]):
            best = cand
    value, a, p = best
    return PlanResult(a, p, value)
