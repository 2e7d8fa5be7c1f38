"""Command-line front end: instance files in, JSON reports and frontier CSV out.

Instance file (JSON, action 0 implicit)::

    {"actions": [{"reward": 4, "cost": 2}, {"reward": 8, "cost": 3}],
     "agent": {"attitude": "risk_averse",
               "value_function": {"family": "power", "alpha": 0.5, "beta": 1}},
     "welfare": "nash_product"}

Exit codes: 0 success, 1 usage or input error, 2 verification failed,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .equilibrium import GridTooLarge, default_grid, verify_design
from .infodesign import DesignError, design_for_plan
from .model import (
    NEUTRAL,
    ActionSpec,
    Instance,
    RiskAttitude,
    RiskAverse,
    hat_action,
    implementable_actions,
    principal_floor,
    certainty_surplus,
    frontier,
)
from .numerics import PowerValue
from .planner import SocialUtility, plan

EXIT_OK, EXIT_USAGE, EXIT_UNVERIFIED, EXIT_NUMERIC = 0, 1, 2, 3


class InstanceFileError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


def _number(obj, key, path):
    if key not in obj:
        raise InstanceFileError(f"{path}.{key}: missing")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceFileError(f"{path}.{key}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise InstanceFileError(f"{path}.{key}: must be finite")
    return value


def parse_instance(doc) -> tuple[Instance, RiskAttitude, SocialUtility]:
    if not isinstance(doc, dict):
        raise InstanceFileError("$: expected a JSON object")
    actions = doc.get("actions")
    if not isinstance(actions, list) or not actions:
        raise InstanceFileError("$.actions: expected a non-empty list (action 0 is implicit)")
    specs = [ActionSpec(0.0, 0.0)]
    for i, item in enumerate(actions):
        path = f"$.actions[{i}]"
        if not isinstance(item, dict):
            raise InstanceFileError(f"{path}: expected an object with reward and cost")
        reward, cost = _number(item, "reward", path), _number(item, "cost", path)
        if reward < 0 or cost < 0:
            raise InstanceFileError(f"{path}: reward and cost must be nonnegative")
        specs.append(ActionSpec(reward, cost))

    agent = doc.get("agent", {"attitude": "risk_neutral"})
    if not isinstance(agent, dict):
        raise InstanceFileError("$.agent: expected an object")
    kind = agent.get("attitude")
    if kind == "risk_neutral":
        attitude: RiskAttitude = NEUTRAL
    elif kind == "risk_averse":
        vf = agent.get("value_function")
        if not isinstance(vf, dict):
            raise InstanceFileError("$.agent.value_function: required for risk_averse")
        if vf.get("family", "power") != "power":
            raise InstanceFileError(f"$.agent.value_function.family: unsupported {vf.get('family')!r}")
        alpha = _number(vf, "alpha", "$.agent.value_function")
        beta = _number(vf, "beta", "$.agent.value_function") if "beta" in vf else 1.0
        if not 0 < alpha < 1:
            raise InstanceFileError(f"$.agent.value_function.alpha: must lie in (0, 1), got {alpha}")
        if not beta > 0:
            raise InstanceFileError(f"$.agent.value_function.beta: must be positive, got {beta}")
        attitude = RiskAverse(PowerValue(alpha, beta))
    else:
        raise InstanceFileError(f"$.agent.attitude: expected 'risk_neutral' or 'risk_averse', got {kind!r}")

    try:
        welfare = SocialUtility(doc.get("welfare"))
    except ValueError:
        choices = ", ".join(k.value for k in SocialUtility)
        raise InstanceFileError(f"$.welfare: expected one of {choices}, got {doc.get('welfare')!r}") from None
    return Instance(tuple(specs)), attitude, welfare


def load_instance(path) -> tuple[Instance, RiskAttitude, SocialUtility]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return parse_instance(doc)


@dataclass
class PlanReport:
    hat_action: int
    principal_floor: float
    implementable_actions: list
    target_action: int
    profile: dict
    welfare: str
    welfare_value: float
    unique: bool
    segment: list | None = None
    info_structure: dict | None = None
    predicted_contract: list | None = None
    auxiliaries: dict = field(default_factory=dict)
    verification: dict | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "PlanReport":
        return cls(**d)


def run_pipeline(instance: Instance, attitude: RiskAttitude, kind: SocialUtility, stages: int = 3,
                 grid_step: float | None = None, transfer_max: float | None = None,
                 tol: float = 1e-6) -> PlanReport:
    """Plan (stage 1), design (stage 2) and oracle verification (stage 3), up to ``stages``."""
    try:
        result = plan(instance, attitude, kind)
    except (ArithmeticError, ValueError) as exc:
        raise StageError("plan", exc) from exc
    report = PlanReport(
        hat_action=hat_action(instance),
        principal_floor=principal_floor(instance, attitude),
        implementable_actions=implementable_actions(instance, attitude),
        target_action=result.target_action,
        profile={"x": result.profile.x, "y": result.profile.y},
        welfare=kind.value,
        welfare_value=result.welfare_value,
        unique=result.unique,
        segment=list(result.segment) if result.segment else None,
    )
    if stages < 2:
        return report
    try:
        out = design_for_plan(instance, attitude, result)
    except (ArithmeticError, ValueError) as exc:
        raise StageError("design", exc) from exc
    report.info_structure = {"k": out.structure.k, "rows": out.structure.rows.tolist()}
    report.predicted_contract = list(out.predicted_contract.transfers)
    report.auxiliaries = dict(out.auxiliaries)
    if stages < 3:
        return report
    try:
        grid = default_grid(instance, attitude, step=grid_step, transfer_max=transfer_max)
        check = verify_design(instance, attitude, out, tol=tol, grid=grid)
    except (ArithmeticError, ValueError) as exc:
        raise StageError("verify", exc) from exc
    report.verification = {
        "induced_action": check.induced_action,
        "induced_contract": list(check.induced_contract.transfers),
        "induced_profile": {"x": check.induced_profile.x, "y": check.induced_profile.y},
        "max_abs_err": check.max_abs_err,
        "tolerance": check.tolerance,
        "grid_step": grid.step,
        "transfer_max": grid.transfer_max,
        "passed": check.passed,
    }
    return report


def frontier_rows(instance: Instance, attitude: RiskAttitude, samples: int):
    """(action, x, y) samples of each implementable action's frontier inside the implementable set."""
    floor = principal_floor(instance, attitude)
    rows = []
    for a in implementable_actions(instance, attitude):
        hi = max(floor, certainty_surplus(instance, attitude, a))
        count = samples if hi > floor else 1  # a single point when the set touches the frontier once
        for x in np.linspace(floor, hi, count):
            x = float(x)
            rows.append((a, x, frontier(instance, attitude, a, x)))
    return rows


def write_frontier_csv(rows, fh) -> None:
    fh.write("action,x,y\n")
    for a, x, y in rows:
        fh.write(f"{a},{x:.17g},{y:.17g}\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="socialplanner", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in [("plan", "stage 1 only"), ("design", "stages 1 and 2"),
                        ("verify", "stages 1 and 2 plus the grid oracle"),
                        ("run", "everything, optionally with a frontier CSV"),
                        ("frontier", "CSV samples of the implementable frontier")]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("-i", "--input", required=True, help="instance JSON file")
        p.add_argument("-o", "--output", help="output file (default: stdout)")
        p.add_argument("--welfare", choices=[k.value for k in SocialUtility], help="override the file's welfare")
        p.add_argument("--samples", type=int, default=200, help="frontier samples per action")
        p.add_argument("--grid-step", type=float, help="oracle transfer grid step")
        p.add_argument("--transfer-max", type=float, help="oracle transfer grid upper bound")
        if name == "run":
            p.add_argument("--frontier-out", help="also write the frontier CSV here")
    return parser


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        instance, attitude, kind = load_instance(args.input)
    except (OSError, InstanceFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.welfare:
        kind = SocialUtility(args.welfare)
    if args.samples < 2:
        print("error: --samples must be at least 2", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "frontier":
        buf = io.StringIO()
        write_frontier_csv(frontier_rows(instance, attitude, args.samples), buf)
        _emit(buf.getvalue(), args.output)
        return EXIT_OK

    stages = {"plan": 1, "design": 2}.get(args.command, 3)
    try:
        report = run_pipeline(instance, attitude, kind, stages, args.grid_step, args.transfer_max)
    except StageError as exc:
        print(f"error in stage {exc}", file=sys.stderr)
        bad_grid = isinstance(exc.cause, ValueError) and not isinstance(exc.cause, (DesignError, GridTooLarge))
        return EXIT_USAGE if bad_grid else EXIT_NUMERIC
    _emit(json.dumps(report.to_dict(), indent=2) + "\n", args.output)
    if args.command == "run" and args.frontier_out:
        with open(args.frontier_out, "w", encoding="utf-8") as fh:
            write_frontier_csv(frontier_rows(instance, attitude, args.samples), fh)
    if report.verification is not None and not report.verification["passed"]:
        return EXIT_UNVERIFIED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
