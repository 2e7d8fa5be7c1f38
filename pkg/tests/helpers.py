import numpy as np

from socialplanner import NEUTRAL, Instance, PowerValue, RiskAverse

SQRT = RiskAverse(PowerValue(0.5, 1.0))

NEUT = Instance.from_vectors([0, 4, 8], [0, 2, 3])
FLOOR_BINDS = Instance.from_vectors([0, 6, 8], [0, 2.5, 3])
THREE_ACTIONS = Instance.from_vectors([0, 3, 5, 7], [0, 0.8, 1, 1.6])
TWO_ACTIONS = Instance.from_vectors([0, 2, 5], [0, 0.8, 1])
EMPTY = Instance.from_vectors([0, 1, 2], [0, 2, 5])


def random_cases(count, seed=0, max_n=5):
    """(instance, [neutral, averse]) pairs with rewards and costs in [0, 10], alpha in [0.3, 0.9]."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        inst = Instance.from_actions(rng.uniform(0, 10, n), rng.uniform(0, 10, n))
        alpha = float(rng.uniform(0.3, 0.9))
        yield inst, (NEUTRAL, RiskAverse(PowerValue(alpha)))
