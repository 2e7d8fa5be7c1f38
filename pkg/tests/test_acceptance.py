"""Acceptance checks. Each test prints one PASS/FAIL line for its criterion."""

import time

import numpy as np
import pytest

from helpers import THREE_ACTIONS, FLOOR_BINDS, TWO_ACTIONS, NEUT, SQRT, random_cases
from socialplanner import NEUTRAL, agent_best_response, default_grid, design_for_plan, plan, verify_design
from socialplanner.equilibrium import brute_force_plan, principal_best_contract, welfare_samples
from socialplanner.model import hat_action, implementable_actions, principal_floor
from socialplanner.numerics import solve_equal_split
from socialplanner.planner import SocialUtility

SEED = 2024
KINDS = list(SocialUtility)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {number}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def cases():
    """200 instances x both attitudes x 4 welfare kinds, planned and designed once."""
    out = []
    for inst, atts in random_cases(200, seed=SEED, max_n=5):
        for att in atts:
            for kind in KINDS:
                res = plan(inst, att, kind)
                out.append((inst, att, kind, res, design_for_plan(inst, att, res)))
    return out


def test_floor_threshold(report):
    floor = principal_floor(THREE_ACTIONS, SQRT)
    report(1, abs(floor - 2.36) <= 1e-9, f"principal floor {floor!r} vs 2.36")


def test_neutral_nash_product(report):
    a = plan(NEUT, NEUTRAL, SocialUtility.NASH_PRODUCT)
    b = plan(FLOOR_BINDS, NEUTRAL, SocialUtility.NASH_PRODUCT)
    ok = (max(abs(a.profile.x - 2.5), abs(a.profile.y - 2.5), abs(a.welfare_value - 6.25)) <= 1e-9
          and max(abs(b.profile.x - 3.5), abs(b.profile.y - 1.5), abs(b.welfare_value - 5.25)) <= 1e-9)
    report(2, ok, f"{tuple(a.profile)} NP={a.welfare_value}; {tuple(b.profile)} NP={b.welfare_value}")


def test_averse_nash_product(report):
    start = time.perf_counter()
    res = plan(TWO_ACTIONS, SQRT, SocialUtility.NASH_PRODUCT)
    elapsed = time.perf_counter() - start
    err = max(abs(res.profile.x - 20 / 9), abs(res.profile.y - 2 / 3), abs(res.welfare_value - 40 / 27))
    report(3, err <= 1e-8, f"profile {tuple(res.profile)}, NP {res.welfare_value}, err {err:.1e}, {elapsed * 1e3:.2f} ms")


def test_design_round_trips(cases, report):
    start = time.perf_counter()
    failures, worst = [], 0.0
    for inst, att, kind, _, out in cases:
        grid = default_grid(inst, att, rel_step=1e-4)
        check = verify_design(inst, att, out, tol=1e-6, grid=grid, mode="low_zero")
        worst = max(worst, check.max_abs_err / check.tolerance)
        if not check.passed:
            failures.append((inst, att, kind, check))
    elapsed = time.perf_counter() - start
    report(4, not failures, f"{len(cases) - len(failures)}/{len(cases)} designs verified, "
                            f"worst err/bound {worst:.3f}, {elapsed:.1f} s")


def _welfare_range(sweeps):
    values = [w for _, _, w in sweeps.values()]
    if not values:
        return 0.0
    allw = np.concatenate(values)
    return float(allw.max() - allw.min())


def test_stage_one_oracle(cases, report):
    start = time.perf_counter()
    failures, worst = 0, 0.0
    for inst, att, kind, res, _ in cases:
        oracle = brute_force_plan(inst, att, kind, samples=100_000)
        span = _welfare_range(welfare_samples(inst, att, kind, 100_000))
        gap = abs(res.welfare_value - oracle.welfare_value)
        bound = max(1e-3 * span, 1e-12)  # absolute floor for flat welfare
        worst = max(worst, gap / bound)
        failures += gap > bound
    elapsed = time.perf_counter() - start
    report(5, failures == 0, f"{len(cases) - failures}/{len(cases)} plans match, "
                             f"worst gap/bound {worst:.2e}, {elapsed:.1f} s")


def _agent_utility(inst, att, out, a):
    t = np.asarray(out.predicted_contract.transfers)
    value = t if att is NEUTRAL else att.v.eval_array(t)
    return float(out.structure.rows[a - 1] @ value) - inst.actions[a].cost


def test_indifference_identities(cases, report):
    bad, checked = [], 0
    for inst, att, _, _, out in cases:
        if out.target_action == 0:
            continue
        checked += 1
        y = out.target_profile.y
        a_hat, a_star = hat_action(inst), out.target_action
        err = max(abs(_agent_utility(inst, att, out, a_hat) - y), abs(_agent_utility(inst, att, out, a_star) - y))
        probs = [out.auxiliaries["p_star"], out.auxiliaries.get("q_star", 1.0)]
        if err > 1e-9 or not all(0.0 <= p <= 1.0 for p in probs):
            bad.append((inst, att, err, probs))
    report(6, checked > 0 and not bad, f"{checked - len(bad)}/{checked} designs satisfy the identities")


def test_derived_auxiliaries(report):
    neutral = design_for_plan(NEUT, NEUTRAL, plan(NEUT, NEUTRAL, SocialUtility.NASH_PRODUCT)).auxiliaries
    averse = design_for_plan(TWO_ACTIONS, SQRT, plan(TWO_ACTIONS, SQRT, SocialUtility.NASH_PRODUCT)).auxiliaries
    ok = (abs(neutral["s_star"] - 5.5) <= 1e-12 and abs(neutral["p_star"] - 9 / 11) <= 1e-12
          and abs(averse["z_star"] - 25 / 9) <= 1e-9 and abs(averse["q_star"] - 1.0) <= 1e-9
          and abs(averse["p_star"] - 0.88) <= 1e-9)
    # independent check: the oracle agent prefers a* = 2 at the designed contract
    struct = design_for_plan(NEUT, NEUTRAL, plan(NEUT, NEUTRAL, SocialUtility.NASH_PRODUCT))
    ok = ok and agent_best_response(NEUT, NEUTRAL, struct.structure, struct.predicted_contract) == 2
    report(7, ok, f"s*={neutral['s_star']!r} p*={neutral['p_star']!r}; "
                  f"z*={averse['z_star']!r} q*={averse['q_star']!r} p*={averse['p_star']!r}")


def _equal_split(inst, att, a):
    spec = inst.actions[a]
    if att is NEUTRAL:
        return (spec.reward - spec.cost) / 2
    return solve_equal_split(att.v, spec.reward, spec.cost)


def test_esf_af_equivalence(report):
    seen, bad = 0, 0
    for inst, atts in random_cases(200, seed=SEED, max_n=5):
        for att in atts:
            floor = principal_floor(inst, att)
            acts = implementable_actions(inst, att)
            if not acts or any(_equal_split(inst, att, a) >= floor for a in acts):
                continue
            seen += 1
            af = plan(inst, att, SocialUtility.APPROX_FAIRNESS).profile
            esf = plan(inst, att, SocialUtility.ESF).profile
            bad += max(abs(af.x - esf.x), abs(af.y - esf.y)) > 1e-9
    report(8, seen > 0 and bad == 0, f"{seen - bad}/{seen} instances with the diagonal outside the set agree")


def _two_signal_cases(count):
    """First ``count`` (instance, attitude, design) triples whose design uses both signals."""
    found = []
    for i, (inst, atts) in enumerate(random_cases(10 * count, seed=SEED + 1, max_n=3)):
        att, kind = atts[i % 2], KINDS[i % len(KINDS)]
        out = design_for_plan(inst, att, plan(inst, att, kind))
        if out.structure.k == 2:
            found.append((inst, att, out))
        if len(found) == count:
            break
    return found


def test_full_grid_consistency(report):
    start = time.perf_counter()
    cases = _two_signal_cases(20)
    bad = 0
    for inst, att, out in cases:
        grid = default_grid(inst, att)
        low = principal_best_contract(inst, att, out.structure, grid, mode="low_zero")
        full = principal_best_contract(inst, att, out.structure, grid, mode="full")
        bad += full.profile.x > low.profile.x + 2 * grid.step
    elapsed = time.perf_counter() - start
    report(9, len(cases) == 20 and bad == 0, f"{len(cases) - bad}/{len(cases)} two-signal instances, {elapsed:.1f} s")
