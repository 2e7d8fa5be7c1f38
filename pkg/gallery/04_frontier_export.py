"""
Exporting the frontier
======================

The same CSV the command line writes with ``socialplanner frontier``:
each implementable action's boundary restricted to the implementable set.
"""

import io

from socialplanner import PowerValue, RiskAverse
from socialplanner.cli import frontier_rows, write_frontier_csv
from socialplanner.model import Instance

inst = Instance.from_actions([3, 5, 7], [0.8, 1.0, 1.6])
buf = io.StringIO()
write_frontier_csv(frontier_rows(inst, RiskAverse(PowerValue(0.5)), samples=5), buf)
print(buf.getvalue())
