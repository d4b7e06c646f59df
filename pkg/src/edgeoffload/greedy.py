"""Greedy offloading: per-task best path, CGA and the resource-aware MGA variant.

All greedy solvers share one engine. At every step the engine evaluates the
best currently reachable path for each pending task, lets a *selector* pick
one task, commits it and shrinks the residual AP connections and ECS
capacity. It stops once no pending task has a usable path left, which covers
exhausted compute, exhausted connections and an empty pending set alike.
Tasks still pending at that point stay unassigned.

Ties are always broken towards the lowest index (ECS, AP, task, user).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .metrics import RunReport, make_report
from .model import CAPACITY_TOL, Assignment, Scenario, TaskId


class PathChoice(NamedTuple):
    m: int
    n: int
    u: float


class Commit(NamedTuple):
    step: int
    task: TaskId
    m: int
    n: int
    u: float


@dataclass
class SolverState:
    """Mutable residual resources and task bookkeeping for one run."""

    scenario: Scenario
    residual_q: np.ndarray
    residual_r: np.ndarray
    pending: list[list[int]]
    done: list[list[tuple[int, PathChoice]]]
    step: int = 0
    history: list[Commit] = field(default_factory=list)

    @classmethod
    def fresh(cls, scenario: Scenario) -> "SolverState":
        return cls(
            scenario=scenario,
            residual_q=scenario.ap_caps.astype(int).copy(),
            residual_r=scenario.ecs_caps.astype(float).copy(),
            pending=[list(range(len(u.tasks))) for u in scenario.users],
            done=[[] for _ in scenario.users],
        )

    def pending_flat(self) -> np.ndarray:
        idx = self.scenario.task_index
        return np.array([idx[(i, j)] for i, js in enumerate(self.pending) for j in js], dtype=int)

    def accumulated_cost(self, user: int) -> float:
        return sum(c.u for _, c in self.done[user])

    def commit(self, task: TaskId, choice: PathChoice) -> None:
        i, j = task
        if self.residual_q[choice.m] < 1:
            raise RuntimeError(f"AP {choice.m} has no connection left")
        r = self.scenario.task(task).r
        self.residual_q[choice.m] -= 1
        self.residual_r[choice.n] = max(self.residual_r[choice.n] - r, 0.0)
        self.pending[i].remove(j)
        self.done[i].append((j, choice))
        self.history.append(Commit(self.step, task, choice.m, choice.n, choice.u))
        self.step += 1

    def assignment(self) -> Assignment:
        out = Assignment()
        for i, items in enumerate(self.done):
            for j, c in items:
                out.assign((i, j), c.m, c.n)
        return out


def _ecs_open(residual_r: np.ndarray, r: np.ndarray) -> np.ndarray:
    """``(K, C)`` mask of ECSs whose residual capacity can host each demand."""
    slack = CAPACITY_TOL * np.maximum(1.0, np.abs(residual_r))
    return r[:, None] <= residual_r[None, :] + slack[None, :]


def accessible_sets(state: SolverState, task: TaskId) -> tuple[list[int], list[int]]:
    """APs with a free connection and ECSs with room for the task's demand."""
    r = state.scenario.task(task).r
    aps = [m for m in range(state.scenario.n_aps) if state.residual_q[m] >= 1]
    ecss = [int(n) for n in np.flatnonzero(_ecs_open(state.residual_r, np.array([r]))[0])]
    return aps, ecss


def best_paths(scenario: Scenario, state: SolverState, ks: np.ndarray):
    """Vectorised per-task path selection for flat task indices ``ks``.

    For every accessible AP the cheapest-access accessible ECS is taken, then
    the AP with the lowest resulting cost. Returns arrays ``(m, n, u)``;
    ``u`` is ``inf`` where the task has no usable path.
    """
    if ks.size == 0:
        empty = np.empty(0, dtype=int)
        return empty, empty, np.empty(0)
    ecs_ok = _ecs_open(state.residual_r, scenario.demand[ks])
    delta = np.where(ecs_ok[:, None, :], scenario.delta_matrix[None], np.inf)
    n_hat = np.argmin(delta, axis=2)
    d_min = np.take_along_axis(delta, n_hat[:, :, None], axis=2)[:, :, 0]
    gamma = scenario.gamma[ks][:, None]
    u = scenario.ap_cost[ks] + gamma * np.where(np.isfinite(d_min), d_min, 0.0)
    u = np.where(np.isfinite(d_min), u, np.inf)
    u = np.where((state.residual_q >= 1)[None, :], u, np.inf)
    m_o = np.argmin(u, axis=1)
    rows = np.arange(ks.size)
    return m_o, n_hat[rows, m_o], u[rows, m_o]


def best_path(scenario: Scenario, state: SolverState, task: TaskId) -> PathChoice | None:
    m, n, u = best_paths(scenario, state, np.array([scenario.task_index[tuple(task)]]))
    if not math.isfinite(u[0]):
        return None
    return PathChoice(int(m[0]), int(n[0]), float(u[0]))


# A selector receives the state, the flat pending indices and their best
# paths, and returns the position (into ``ks``) of the task to commit.
Selector = Callable[[SolverState, np.ndarray, np.ndarray, np.ndarray, np.ndarray], int]


def run_greedy(scenario: Scenario, select: Selector) -> SolverState:
    state = SolverState.fresh(scenario)
    while True:
        ks = state.pending_flat()
        if ks.size == 0:
            break
        m, n, u = best_paths(scenario, state, ks)
        if not np.isfinite(u).any():
            break
        pos = select(state, ks, m, n, u)
        state.commit(scenario.task_ids[ks[pos]], PathChoice(int(m[pos]), int(n[pos]), float(u[pos])))
    return state


def _select_min_cost(state, ks, m, n, u) -> int:
    # ks is user-major, so the first minimum is the lowest (user, task) among ties
    # -- identical to per-user minimum followed by the cross-user minimum.
    return int(np.argmin(u))


def _report(name: str, scenario: Scenario, state: SolverState, **extra) -> tuple[Assignment, RunReport]:
    assignment = state.assignment()
    return assignment, make_report(name, scenario, assignment, iterations=state.step, **extra)


def cga(scenario: Scenario) -> tuple[Assignment, RunReport]:
    """Centralized greedy: repeatedly commit the globally cheapest pending task."""
    return _report("cga", scenario, run_greedy(scenario, _select_min_cost))


def mga_cost(u, r, epsilon: float, zeta: float):
    """Modified cost ``u**epsilon * r**zeta`` used only to order a user's tasks."""
    if epsilon < 1 or zeta < 1:
        raise ValueError(f"epsilon and zeta must both be >= 1, got {epsilon}, {zeta}")
    u = np.asarray(u, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(u < 0) or np.any(r <= 0):
        raise ValueError("mga_cost needs u >= 0 and r > 0")
    out = np.power(u, epsilon) * np.power(r, zeta)
    return float(out) if out.ndim == 0 else out


def _mga_selector(epsilon: float, zeta: float) -> Selector:
    def select(state, ks, m, n, u):
        scenario = state.scenario
        owners = scenario.owner[ks]
        finite = np.isfinite(u)
        key = np.full(u.shape, np.inf)
        key[finite] = mga_cost(u[finite], scenario.demand[ks][finite], epsilon, zeta)
        best_pos, best_u = -1, math.inf
        for i in np.unique(owners[finite]):
            mine = np.flatnonzero((owners == i) & finite)
            pos = int(mine[np.argmin(key[mine])])
            # across users the comparison stays on the true cost
            if u[pos] < best_u:
                best_pos, best_u = pos, u[pos]
        return best_pos
    return select


def mga(scenario: Scenario, epsilon: float = 1.0, zeta: float = 1.0) -> tuple[Assignment, RunReport]:
    """Modified greedy: within each user, rank tasks by ``u**epsilon * r**zeta``."""
    mga_cost(0.0, 1.0, epsilon, zeta)  # parameter validation
    state = run_greedy(scenario, _mga_selector(epsilon, zeta))
    return _report("mga", scenario, state)
