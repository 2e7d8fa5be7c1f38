"""
Choosing a target profile
=========================

Stage 1 picks the implementable (principal, agent) utility pair that
maximises a social utility function. Here we compare the four built-in
welfare functions on one instance, for a risk-neutral agent and for an
agent valuing money as sqrt(z).
"""

from socialplanner import NEUTRAL, Instance, PowerValue, RiskAverse, SocialUtility, plan
from socialplanner.model import hat_action, implementable_actions, principal_floor

# three actions besides the default one: rewards and costs
inst = Instance.from_actions([3, 5, 7], [0.8, 1.0, 1.6])
averse = RiskAverse(PowerValue(alpha=0.5))

for name, att in [("risk-neutral", NEUTRAL), ("sqrt agent", averse)]:
    print(f"{name}: cheapest action {hat_action(inst)}, "
          f"floor {principal_floor(inst, att):.4f}, implementable {implementable_actions(inst, att)}")
    for kind in SocialUtility:
        res = plan(inst, att, kind)
        x, y = res.profile
        note = "" if res.unique else f"  (ties along x in {res.segment})"
        print(f"  {kind.value:16s} action {res.target_action}  x={x:.4f} y={y:.4f}  w={res.welfare_value:.4f}{note}")

# %%
# The principal never receives less than the floor: it can always fall back
# on the cheapest action and pay its cost exactly.
