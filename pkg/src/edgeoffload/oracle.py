"""Exact solvers by exhaustive depth-first enumeration, for small instances only.

Every task tries each usable (AP, ECS) path, cheapest first. A branch is
cut when the residual resources cannot host the next task or when an
optimistic completion cannot strictly beat the incumbent. The cuts never
discard a strictly better solution, so the result is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Assignment, Scenario, fits, op1_objective, op2_objective

DEFAULT_BUDGET = 10 ** 7


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_paths: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.max_paths <= 0:
            raise ValueError("max_paths must be positive")


@dataclass
class OracleResult:
    feasible: bool
    assignment: Assignment | None
    value: float
    nodes: int


def search_space(scenario: Scenario) -> int:
    return (scenario.n_aps * scenario.n_ecss) ** scenario.n_tasks


def _check_budget(scenario: Scenario, budget) -> None:
    limit = budget.max_paths if isinstance(budget, OracleBudget) else int(budget)
    size = search_space(scenario)
    if size > limit:
        raise BudgetExceeded(
            f"{size} path combinations exceed the oracle budget of {limit}")


def _choices(scenario: Scenario):
    C = scenario.n_ecss
    out = []
    for k in range(scenario.n_tasks):
        cost = scenario.cost_tensor[k].reshape(-1)
        order = sorted((c, idx) for idx, c in enumerate(cost) if math.isfinite(c))
        out.append([(idx // C, idx % C, c) for c, idx in order])
    return out


def _solve(scenario: Scenario, budget, fairness: bool) -> OracleResult:
    _check_budget(scenario, budget)
    K = scenario.n_tasks
    choices = _choices(scenario)
    if any(not ch for ch in choices):
        return OracleResult(False, None, math.inf, 0)
    r = scenario.demand
    owner = scenario.owner
    cheapest = np.array([ch[0][2] for ch in choices])
    # optimistic remaining cost per user from task k onwards
    rest_user = np.zeros((K + 1, scenario.n_users))
    for k in range(K - 1, -1, -1):
        rest_user[k] = rest_user[k + 1]
        rest_user[k, owner[k]] += cheapest[k]
    rest_total = rest_user.sum(axis=1)
    scale = scenario.eta / np.maximum(scenario.tasks_per_user, 1)

    res_q = scenario.ap_caps.astype(int).copy()
    res_r = scenario.ecs_caps.astype(float).copy()
    user_cost = np.zeros(scenario.n_users)
    picked = [None] * K
    best = {"value": math.inf, "paths": None}
    nodes = 0

    def bound(k, partial):
        if fairness:
            return float(np.max(scale * (user_cost + rest_user[k]), initial=0.0))
        return partial + rest_total[k]

    def dfs(k, partial):
        nonlocal nodes
        nodes += 1
        if k == K:
            value = float(np.max(scale * user_cost, initial=0.0)) if fairness else partial
            if value < best["value"]:
                best["value"] = value
                best["paths"] = list(picked)
            return
        i = owner[k]
        for m, n, c in choices[k]:
            if res_q[m] < 1 or not fits(r[k], res_r[n]):
                continue
            user_cost[i] += c
            if bound(k + 1, partial + c) < best["value"]:
                res_q[m] -= 1
                res_r[n] -= r[k]
                picked[k] = (m, n)
                dfs(k + 1, partial + c)
                res_q[m] += 1
                res_r[n] += r[k]
            user_cost[i] -= c

    dfs(0, 0.0)
    if best["paths"] is None:
        return OracleResult(False, None, math.inf, nodes)
    assignment = Assignment()
    for tid, (m, n) in zip(scenario.task_ids, best["paths"]):
        assignment.assign(tid, m, n)
    value = (op2_objective if fairness else op1_objective)(scenario, assignment)
    return OracleResult(True, assignment, value, nodes)


def brute_force_op1(scenario: Scenario, budget=OracleBudget()) -> OracleResult:
    """Minimum total cost over all feasible complete assignments."""
    return _solve(scenario, budget, fairness=False)


def brute_force_op2(scenario: Scenario, budget=OracleBudget()) -> OracleResult:
    """Minimum worst-user eta-weighted average cost over feasible assignments."""
    return _solve(scenario, budget, fairness=True)
