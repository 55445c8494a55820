"""Policy-iteration RRT# motion planning with a value-iteration RRT# baseline."""

from pirrt.dp import PolicyState, PromisingSet, backup, evaluate, improve_sweep, replan
from pirrt.errors import (ContractViolation, CycleDetectedError, EnvironmentInfeasibleError, InvalidInputError,
                          NonterminationError, PlannerError, ScenarioError)
from pirrt.geometry import Ball, Box, Environment
from pirrt.graph import Graph, RadiusParams
from pirrt.planners import PI_RRTSHARP, RRTSHARP_VI, IterationTrace, PlannerConfig, make_planner, run

__version__ = "0.1.0"

__all__ = [
    "Ball", "Box", "ContractViolation", "CycleDetectedError", "Environment", "EnvironmentInfeasibleError",
    "Graph", "InvalidInputError", "IterationTrace", "NonterminationError", "PI_RRTSHARP", "PlannerConfig",
    "PlannerError", "PolicyState", "PromisingSet", "RRTSHARP_VI", "RadiusParams", "ScenarioError",
    "backup", "evaluate", "improve_sweep", "make_planner", "replan", "run",
]
