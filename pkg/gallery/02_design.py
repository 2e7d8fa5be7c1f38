"""
Building the information structure
==================================

Stage 2 turns a target profile into a binary signal and the contract the
principal is expected to offer. The agent is left indifferent between the
target action and the cheapest one.
"""

from socialplanner import NEUTRAL, Instance, PowerValue, RiskAverse, SocialUtility, agent_best_response, design

inst = Instance.from_actions([2, 5], [0.8, 1.0])

for att in (NEUTRAL, RiskAverse(PowerValue(0.5))):
    out = design(inst, att, SocialUtility.NASH_PRODUCT)
    x, y = out.target_profile
    print(f"{type(att).__name__}: target action {out.target_action}, x={x:.4f} y={y:.4f}")
    for a, row in enumerate(out.structure.rows, start=1):
        print(f"  action {a}: P[high]={row[0]:.4f} P[low]={row[1]:.4f}")
    print("  contract", out.predicted_contract.transfers, "aux", {k: round(v, 6) for k, v in out.auxiliaries.items()})
    # the agent, left alone with this contract, picks the target
    print("  agent response:", agent_best_response(inst, att, out.structure, out.predicted_contract))
