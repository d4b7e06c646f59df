"""Fairness-oriented greedy (FGA): schedule users by a priority score, then greedy.

At each step the user with the *lowest* priority

    (Y * |S_i| / eta_i - accumulated cost of i's offloaded tasks) / |pending_i|

is served: the lower the score, the less budget per remaining task that user
has left. The served user offloads its cheapest reachable pending task.
"""

from __future__ import annotations

import math

import numpy as np

from .greedy import SolverState, _report, run_greedy
from .metrics import RunReport
from .model import Assignment, Scenario

_TIE_RTOL = 1e-12


def default_Y(scenario: Scenario) -> float:
    """Largest delay + largest energy + largest access cost in the scenario.

    Unreachable (infinite) entries are ignored.
    """
    def finite_max(values):
        vals = [v for v in values if math.isfinite(v)]
        return max(vals, default=0.0)

    tasks = [t for _, t in scenario.iter_tasks()]
    return (finite_max(v for t in tasks for v in t.t)
            + finite_max(v for t in tasks for v in t.e)
            + finite_max(v for row in scenario.delta for v in row))


def priority(state: SolverState, user: int, Y: float) -> float:
    n_pending = len(state.pending[user])
    if n_pending == 0:
        raise ValueError(f"user {user} has no pending tasks")
    u = state.scenario.users[user]
    return (Y * len(u.tasks) / u.eta - state.accumulated_cost(user)) / n_pending


def _fga_selector(Y: float, rng: np.random.Generator):
    def select(state, ks, m, n, u):
        owners = state.scenario.owner[ks]
        finite = np.isfinite(u)
        # users whose every pending task is blocked are skipped this step
        users = np.unique(owners[finite])
        scores = np.array([priority(state, int(i), Y) for i in users])
        low = scores.min()
        tied = users[np.isclose(scores, low, rtol=_TIE_RTOL, atol=_TIE_RTOL * max(1.0, abs(Y)))]
        chosen = int(tied[0]) if tied.size == 1 else int(rng.choice(tied))
        mine = np.flatnonzero((owners == chosen) & finite)
        return int(mine[np.argmin(u[mine])])
    return select


def run_fga(scenario: Scenario, Y: float | None = None, seed: int | None = 0) -> SolverState:
    if Y is None:
        Y = default_Y(scenario) or 1.0
    if not (math.isfinite(Y) and Y > 0):
        raise ValueError(f"Y must be a positive finite constant, got {Y}")
    return run_greedy(scenario, _fga_selector(Y, np.random.default_rng(seed)))


def fga(scenario: Scenario, Y: float | None = None, seed: int | None = 0) -> tuple[Assignment, RunReport]:
    """Fairness-based greedy; ``seed`` drives the random choice among tied users."""
    return _report("fga", scenario, run_fga(scenario, Y, seed), seed=seed)
