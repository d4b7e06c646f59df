"""Assign offloaded tasks to (access point, edge server) paths.

Solvers: greedy minimum-cost (``cga``), demand-aware greedy (``mga``),
fairness-driven greedy (``fga``), distributed deferred-acceptance matching
(``adma``), LP lower bounds (``solve_elr``, ``solve_flr``) and exhaustive
search for small instances. Estimator-style wrappers live in
``edgeoffload.estimators``.
"""

from .estimators import ADMA, CGA, ELR, FGA, FLR, MGA, BruteForce, check_scenario
from .fairness import fga
from .greedy import cga, mga
from .matching import adma, find_blocking_pairs, is_stable
from .metrics import RunReport, jain_index, offloading_ratio, summarize
from .model import (AccessPoint, Assignment, EdgeServer, MobileUser, Path, Scenario,
                    SchemaError, ScenarioError, Task, necessary_feasibility, op1_objective,
                    op2_objective, path_cost, validate_assignment)
from .oracle import BudgetExceeded, brute_force_op1, brute_force_op2
from .relaxation import solve_elr, solve_flr
from .scenario import GenParams, generate, load, save

__version__ = "0.1.0"

__all__ = [
    "ADMA", "AccessPoint", "Assignment", "BruteForce", "BudgetExceeded", "CGA", "ELR",
    "EdgeServer", "FGA", "FLR", "GenParams", "MGA", "MobileUser", "Path", "RunReport",
    "Scenario", "ScenarioError", "SchemaError", "Task", "adma", "brute_force_op1",
    "brute_force_op2", "cga", "check_scenario", "fga", "find_blocking_pairs", "generate",
    "is_stable", "jain_index", "load", "mga", "necessary_feasibility", "offloading_ratio",
    "op1_objective", "op2_objective", "path_cost", "save", "solve_elr", "solve_flr",
    "summarize", "validate_assignment",
]
