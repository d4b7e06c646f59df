"""LP relaxations giving lower bounds for total cost (ELR) and min-max cost (FLR).

Variables are the relaxed path indicators ``x[k, m, n]`` in ``[0, 1]``
flattened in ``(task, AP, ECS)`` order; the fairness relaxation appends one
extra variable ``y >= 0``. Paths with infinite cost are pinned to zero, and
so are paths to an ECS whose whole capacity is below the task's demand: no
integral assignment can use them, so the bound stays valid while becoming
tighter (an instance where some task fits on no server is LP-infeasible).
Fractional solutions are reported as they are. No rounding is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import CAPACITY_TOL, Scenario
from .simplex import FEAS_TOL, linprog_simplex

INTEGRAL_TOL = 1e-7


@dataclass
class LpProblem:
    c: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    upper: np.ndarray
    ub_labels: list[str]
    eq_labels: list[str]
    var_labels: list[str]
    shape: tuple[int, int, int]
    has_y: bool = False

    def __post_init__(self):
        nv = self.c.size
        if self.A_ub.shape != (len(self.b_ub), nv) or self.A_eq.shape != (len(self.b_eq), nv):
            raise ValueError("constraint matrix dimensions do not match the variables")
        if self.upper.size != nv or len(self.var_labels) != nv:
            raise ValueError("bounds/labels do not match the variables")
        if self.n_x != int(np.prod(self.shape)):
            raise ValueError("x-variable count does not match the (task, AP, ECS) shape")

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_x(self) -> int:
        return self.c.size - int(self.has_y)

    @property
    def n_constraints(self) -> int:
        return len(self.b_ub) + len(self.b_eq)

    def to_lp_format(self) -> str:
        """CPLEX LP text, readable by common external solvers."""
        def expr(coefs):
            terms = [f"{'-' if a < 0 else '+'} {abs(a):.17g} {self.var_labels[v]}"
                     for v, a in enumerate(coefs) if a != 0]
            return " ".join(terms) if terms else "0 " + self.var_labels[0]

        lines = ["Minimize", f" obj: {expr(self.c)}", "Subject To"]
        for label, row, b in zip(self.ub_labels, self.A_ub, self.b_ub):
            lines.append(f" {label}: {expr(row)} <= {b:.17g}")
        for label, row, b in zip(self.eq_labels, self.A_eq, self.b_eq):
            lines.append(f" {label}: {expr(row)} = {b:.17g}")
        lines.append("Bounds")
        for name, ub in zip(self.var_labels, self.upper):
            lines.append(f" 0 <= {name} <= {'+inf' if math.isinf(ub) else f'{ub:.17g}'}")
        lines.append("End")
        return "\n".join(lines) + "\n"


@dataclass
class LpSolution:
    status: str
    value: float | None
    x: np.ndarray | None
    y: float | None
    is_integral: bool
    iterations: int
    user_costs: list[float] | None = None
    total_cost: float | None = None
    max_violation: float | None = None


def _base_rows(scenario: Scenario):
    K, B, C = scenario.n_tasks, scenario.n_aps, scenario.n_ecss
    nx = K * B * C
    k_idx, m_idx, n_idx = np.unravel_index(np.arange(nx), (K, B, C))
    ecs_rows = np.zeros((C, nx))
    ecs_rows[n_idx, np.arange(nx)] = scenario.demand[k_idx]
    ap_rows = np.zeros((B, nx))
    ap_rows[m_idx, np.arange(nx)] = 1.0
    task_rows = np.zeros((K, nx))
    task_rows[k_idx, np.arange(nx)] = 1.0
    pi = scenario.cost_tensor.reshape(-1)
    cap = scenario.ecs_caps[n_idx]
    fits_at_all = scenario.demand[k_idx] <= cap + CAPACITY_TOL * np.maximum(1.0, np.abs(cap))
    usable = np.isfinite(pi) & fits_at_all
    labels = [f"x_{scenario.task_ids[k][0]}_{scenario.task_ids[k][1]}_{m}_{n}"
              for k, m, n in zip(k_idx, m_idx, n_idx)]
    return (K, B, C), pi, usable, ecs_rows, ap_rows, task_rows, labels


def build_op1_lp(scenario: Scenario) -> LpProblem:
    shape, pi, usable, ecs_rows, ap_rows, task_rows, labels = _base_rows(scenario)
    K, B, C = shape
    return LpProblem(
        c=np.where(usable, pi, 0.0),
        A_ub=np.vstack([ecs_rows, ap_rows]),
        b_ub=np.concatenate([scenario.ecs_caps, scenario.ap_caps.astype(float)]),
        A_eq=task_rows,
        b_eq=np.ones(K),
        upper=np.where(usable, 1.0, 0.0),
        ub_labels=[f"ecs_{n}" for n in range(C)] + [f"ap_{m}" for m in range(B)],
        eq_labels=[f"task_{i}_{j}" for i, j in scenario.task_ids],
        var_labels=labels,
        shape=shape,
    )


def build_op3_lp(scenario: Scenario) -> LpProblem:
    """Min-max relaxation: minimize ``y`` with ``sum_i cost <= y * |S_i| / eta_i``."""
    shape, pi, usable, ecs_rows, ap_rows, task_rows, labels = _base_rows(scenario)
    K, B, C = shape
    nx = pi.size
    user_rows = np.zeros((scenario.n_users, nx + 1))
    k_of = np.arange(nx) // (B * C)
    user_rows[scenario.owner[k_of], np.arange(nx)] = np.where(usable, pi, 0.0)
    user_rows[:, -1] = -scenario.tasks_per_user / scenario.eta
    pad = np.zeros((B + C, 1))
    c = np.zeros(nx + 1)
    c[-1] = 1.0
    return LpProblem(
        c=c,
        A_ub=np.vstack([np.hstack([np.vstack([ecs_rows, ap_rows]), pad]), user_rows]),
        b_ub=np.concatenate([scenario.ecs_caps, scenario.ap_caps.astype(float),
                             np.zeros(scenario.n_users)]),
        A_eq=np.hstack([task_rows, np.zeros((K, 1))]),
        b_eq=np.ones(K),
        upper=np.append(np.where(usable, 1.0, 0.0), np.inf),
        ub_labels=([f"ecs_{n}" for n in range(C)] + [f"ap_{m}" for m in range(B)]
                   + [f"user_{i}" for i in range(scenario.n_users)]),
        eq_labels=[f"task_{i}_{j}" for i, j in scenario.task_ids],
        var_labels=labels + ["y"],
        shape=shape,
        has_y=True,
    )


def solve_lp(problem: LpProblem, scenario: Scenario) -> LpSolution:
    res = linprog_simplex(problem.c, problem.A_ub, problem.b_ub, problem.A_eq,
                          problem.b_eq, problem.upper)
    if res.status != "optimal":
        return LpSolution(res.status, None, None, None, False, res.iterations)
    v = res.x
    x = v[:problem.n_x]
    viol = max(
        float(np.max(problem.A_ub @ v - problem.b_ub, initial=0.0)),
        float(np.max(np.abs(problem.A_eq @ v - problem.b_eq), initial=0.0)),
    )
    integral = bool(np.all(np.minimum(np.abs(x), np.abs(x - 1.0)) <= INTEGRAL_TOL))
    pi = np.where(problem.upper[:problem.n_x] > 0, scenario.cost_tensor.reshape(-1), 0.0)
    per_task = (pi * x).reshape(problem.shape).sum(axis=(1, 2))
    user_costs = np.bincount(scenario.owner, weights=per_task, minlength=scenario.n_users)
    return LpSolution(
        status="optimal",
        value=res.fun,
        x=x.reshape(problem.shape),
        y=float(v[-1]) if problem.has_y else None,
        is_integral=integral,
        iterations=res.iterations,
        user_costs=[float(c) for c in user_costs],
        total_cost=float(per_task.sum()),
        max_violation=viol,
    )


def solve_elr(scenario: Scenario) -> LpSolution:
    """Lower bound on the minimum total cost."""
    return solve_lp(build_op1_lp(scenario), scenario)


def solve_flr(scenario: Scenario) -> LpSolution:
    """Lower bound on the min-max eta-weighted average cost (``value == y``)."""
    return solve_lp(build_op3_lp(scenario), scenario)


__all__ = ["FEAS_TOL", "LpProblem", "LpSolution", "build_op1_lp", "build_op3_lp",
           "solve_elr", "solve_flr", "solve_lp"]
