"""Inflated beam robot with pouch-level jamming: simulator, experiments, planner."""

from .actions import (Dwell, Grow, HoldMagnet, JamPouch, MoveCarriage, PullCable,
                      ReleaseCable, ReleaseMagnet, SetPressure, Side, UnjamPouch)
from .config import CarriageParams, MechanicsParams, PneumaticsParams, RobotSpec
from .engine import Engine, Trace, deflection_experiment, run
from .planner import GoalShape, compile_actions, fit_joint_angles, plan_for_goal
from .scenario import load_scenario, parse_document

__version__ = "0.1.0"

__all__ = [
    "CarriageParams", "Dwell", "Engine", "GoalShape", "Grow", "HoldMagnet",
    "JamPouch", "MechanicsParams", "MoveCarriage", "PneumaticsParams",
    "PullCable", "ReleaseCable", "ReleaseMagnet", "RobotSpec", "SetPressure",
    "Side", "Trace", "UnjamPouch", "compile_actions", "deflection_experiment",
    "fit_joint_angles", "load_scenario", "parse_document", "plan_for_goal",
    "run",
]
