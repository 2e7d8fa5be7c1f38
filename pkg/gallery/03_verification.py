"""
Checking a design by brute force
================================

The equilibrium module ignores every closed form. It lets the principal
search a grid of contracts against the designed structure and reports what
the agent ends up doing.
"""

import time

from socialplanner import PowerValue, RiskAverse, SocialUtility, default_grid, design, verify_design
from socialplanner.model import Instance

inst = Instance.from_actions([2, 5], [0.8, 1.0])
att = RiskAverse(PowerValue(0.5))
out = design(inst, att, SocialUtility.ESF)

for rel_step in (1e-2, 1e-3, 1e-4):
    grid = default_grid(inst, att, rel_step=rel_step)
    t0 = time.perf_counter()
    rep = verify_design(inst, att, out, grid=grid)
    print(f"step {grid.step:.2e}: action {rep.induced_action}, "
          f"err {rep.max_abs_err:.2e} <= {rep.tolerance:.2e}? {rep.passed}  ({time.perf_counter() - t0:.3f} s)")

# %%
# The error shrinks with the step: the principal's best grid contract is at
# most one level away from the exact transfer.
