"""Welfare-targeted signal design for hidden-action contracting.

:mod:`.planner` chooses the target (principal, agent) utility pair and
:mod:`.infodesign` builds a two-signal observation matrix under which the
principal's optimal contract produces it. :mod:`.equilibrium` replays the
game by brute force to check both.
"""

from .equilibrium import (
    EquilibriumOutcome,
    GridConfig,
    agent_best_response,
    brute_force_plan,
    default_grid,
    principal_best_contract,
    verify_design,
)
from .infodesign import (
    Contract,
    DesignError,
    DesignOutput,
    InformationStructure,
    design,
    design_averse,
    design_for_plan,
    design_neutral,
    transfer_for_profile,
)
from .model import (
    NEUTRAL,
    ActionSpec,
    Instance,
    RiskAverse,
    RiskNeutral,
    UtilityProfile,
    frontier,
    hat_action,
    is_action_implementable,
    is_profile_implementable,
    principal_floor,
)
from .numerics import PowerValue, SolverError, ValueFunction
from .planner import PlanResult, SocialUtility, evaluate_welfare, plan, plan_action

__version__ = "0.1.0"
