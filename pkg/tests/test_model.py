import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import THREE_ACTIONS, TWO_ACTIONS, SQRT
from socialplanner import NEUTRAL, ActionSpec, Instance, UtilityProfile
from socialplanner.model import (
    frontier,
    hat_action,
    implementable_actions,
    is_action_implementable,
    is_profile_implementable,
    principal_floor,
)

amounts = st.floats(0.0, 10.0, allow_nan=False, allow_subnormal=False)
instances = st.lists(st.tuples(amounts, amounts), min_size=1, max_size=6).map(
    lambda acts: Instance.from_actions([r for r, _ in acts], [c for _, c in acts]))


class TestInstance:
    def test_default_action_enforced(self):
        with pytest.raises(ValueError):
            Instance.from_vectors([1, 2], [0, 1])

    def test_needs_real_action(self):
        with pytest.raises(ValueError):
            Instance.from_vectors([0], [0])

    def test_negative_values_rejected(self):
        with pytest.raises(ValueError):
            ActionSpec(1.0, -0.1)
        with pytest.raises(ValueError):
            ActionSpec(math.inf, 0.0)


class TestHatAction:
    def test_unique_least_cost(self):
        assert hat_action(Instance.from_vectors([0, 4, 8], [0, 2, 3])) == 1

    def test_reward_breaks_cost_ties(self):
        assert hat_action(Instance.from_vectors([0, 4, 8], [0, 2, 2])) == 2

    def test_three_action_instance(self):
        assert hat_action(THREE_ACTIONS) == 1

    def test_full_ties_go_to_lowest_index(self):
        assert hat_action(Instance.from_vectors([0, 5, 5], [0, 1, 1])) == 1

    @given(instances)
    def test_exhaustive_scan(self, inst):
        a = hat_action(inst)
        costs = inst.costs
        assert all(costs[a] <= costs[b] for b in range(1, inst.n + 1))
        assert all(inst.rewards[a] >= inst.rewards[b] for b in range(1, inst.n + 1) if costs[b] == costs[a])


class TestFloorAndImplementability:
    def test_neutral_floor(self):
        assert principal_floor(Instance.from_vectors([0, 4, 8], [0, 2, 3]), NEUTRAL) == 2.0

    def test_averse_floor(self):
        assert principal_floor(THREE_ACTIONS, SQRT) == pytest.approx(2.36, abs=1e-12)

    def test_floor_clipped_at_zero(self):
        assert principal_floor(Instance.from_vectors([0, 1], [0, 2]), NEUTRAL) == 0.0

    def test_neutral_actions(self):
        assert is_action_implementable(Instance.from_vectors([0, 4, 8], [0, 2, 3]), NEUTRAL, 2)
        assert not is_action_implementable(Instance.from_vectors([0, 4, 4.5], [0, 2, 3]), NEUTRAL, 2)

    def test_averse_action(self):
        assert is_action_implementable(THREE_ACTIONS, SQRT, 3)

    def test_default_always_implementable(self):
        assert is_action_implementable(Instance.from_vectors([0, 1], [0, 2]), NEUTRAL, 0)

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            is_action_implementable(THREE_ACTIONS, SQRT, 4)

    @given(instances)
    def test_hat_action_implementable_when_surplus_nonnegative(self, inst):
        a = hat_action(inst)
        spec = inst.actions[a]
        if spec.reward - spec.cost >= 0:
            assert is_action_implementable(inst, NEUTRAL, a)
        if spec.reward - SQRT.v.inverse(spec.cost) >= 0:
            assert is_action_implementable(inst, SQRT, a)

    @given(instances, st.floats(0.01, 100.0))
    def test_neutral_scaling(self, inst, lam):
        scaled = inst.scaled(lam)
        assert principal_floor(scaled, NEUTRAL) == pytest.approx(lam * principal_floor(inst, NEUTRAL),
                                                                 rel=1e-12, abs=1e-12)
        assert hat_action(scaled) == hat_action(inst)
        for a in range(inst.n + 1):
            surplus = inst.actions[a].reward - inst.actions[a].cost
            margin = abs(surplus - principal_floor(inst, NEUTRAL))
            if margin > 1e-6:  # verdicts at the tolerance edge legitimately depend on scale
                assert is_action_implementable(scaled, NEUTRAL, a) == is_action_implementable(inst, NEUTRAL, a)


class TestFrontier:
    def test_neutral_line(self):
        inst = Instance.from_vectors([0, 8], [0, 3])
        assert frontier(inst, NEUTRAL, 1, 3.0) == 2.0

    def test_averse_curve(self):
        inst = Instance.from_vectors([0, 5], [0, 1])
        assert frontier(inst, SQRT, 1, 20 / 9) == pytest.approx(2 / 3, abs=1e-15)
        assert frontier(inst, SQRT, 1, 5.0) == -1.0

    def test_domain(self):
        inst = Instance.from_vectors([0, 5], [0, 1])
        with pytest.raises(ValueError):
            frontier(inst, SQRT, 1, 5.5)


class TestProfileImplementable:
    def test_averse_witness(self):
        inst = Instance.from_vectors([0, 2, 5], [0, 0.8, 1])
        assert is_profile_implementable(inst, SQRT, UtilityProfile(20 / 9, 2 / 3)) == 2

    def test_below_floor(self):
        assert is_profile_implementable(THREE_ACTIONS, SQRT, UtilityProfile(1, 1)) is None

    def test_default_profile(self):
        assert is_profile_implementable(TWO_ACTIONS, SQRT, UtilityProfile(0, 0)) == 0
        assert is_profile_implementable(TWO_ACTIONS, NEUTRAL, UtilityProfile(0, 0)) == 0

    def test_averse_interior_point(self):
        assert is_profile_implementable(TWO_ACTIONS, SQRT, UtilityProfile(2.0, 0.1)) == 2

    @given(instances, st.floats(0, 12), st.floats(0, 12))
    def test_neutral_witness_properties(self, inst, x, y):
        a = is_profile_implementable(inst, NEUTRAL, UtilityProfile(x, y))
        if a:
            spec = inst.actions[a]
            assert abs(x + y - (spec.reward - spec.cost)) <= 1e-9
            assert x >= principal_floor(inst, NEUTRAL) - 1e-9 and y >= -1e-9

    @given(instances, st.floats(0, 12), st.floats(0, 5))
    def test_averse_witness_properties(self, inst, x, y):
        a = is_profile_implementable(inst, SQRT, UtilityProfile(x, y))
        if a:
            assert y <= frontier(inst, SQRT, a, min(x, inst.actions[a].reward)) + 1e-9
            assert x >= principal_floor(inst, SQRT) - 1e-9 and y >= -1e-9

    @given(instances)
    def test_line_points_witnessed(self, inst):
        floor = principal_floor(inst, NEUTRAL)
        for a in implementable_actions(inst, NEUTRAL):
            w = inst.actions[a].reward - inst.actions[a].cost
            if w < floor:  # implementable only within tolerance
                continue
            for x in (floor, (floor + w) / 2, w):
                if (x, w - x) != (0.0, 0.0):
                    assert is_profile_implementable(inst, NEUTRAL, UtilityProfile(x, w - x)) is not None
