"""Estimator-style wrappers around the solvers.

Each solver is a small object with constructor hyperparameters,
``get_params``/``set_params`` (from scikit-learn's ``BaseEstimator``) and a
``fit`` method that takes one scenario and leaves the result in trailing
underscore attributes::

    est = FGA(seed=3).fit("scenario.json")
    est.assignment_, est.report_

``predict`` solves each scenario of an iterable with a fresh clone and
returns the assignments, leaving the estimator itself untouched.
"""

from __future__ import annotations

import math
import os
from collections.abc import Mapping

from sklearn.base import BaseEstimator, clone

from .fairness import fga
from .greedy import cga, mga
from .matching import adma
from .metrics import RunReport, safe_jain, make_report
from .model import Scenario, SchemaError, scenario_from_dict
from .oracle import DEFAULT_BUDGET, brute_force_op1, brute_force_op2
from .relaxation import LpSolution, solve_elr, solve_flr
from .scenario import load_file, loads


def check_scenario(obj) -> Scenario:
    """Coerce a Scenario, a JSON dict (bare or enveloped) or a file path."""
    if isinstance(obj, Scenario):
        return obj
    if isinstance(obj, Mapping):
        return scenario_from_dict(dict(obj.get("scenario", obj)))
    if isinstance(obj, (str, os.PathLike)):
        return load_file(obj).scenario
    if hasattr(obj, "read"):
        return loads(obj.read()).scenario
    raise SchemaError(f"cannot interpret {type(obj).__name__} as a scenario")


def check_is_solved(est) -> None:
    if not hasattr(est, "report_"):
        raise RuntimeError(f"{type(est).__name__} is not fitted yet; call fit(scenario) first")


class OffloadingSolver(BaseEstimator):
    """Base class: subclasses implement ``_solve(scenario) -> (assignment, report)``."""

    name = "base"

    def fit(self, X, y=None):
        scenario = check_scenario(X)
        self.scenario_ = scenario
        self.assignment_, self.report_ = self._solve(scenario)
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).assignment_

    def predict(self, X):
        if isinstance(X, (Scenario, Mapping, str, os.PathLike)):
            return clone(self).fit(X).assignment_
        return [clone(self).fit(s).assignment_ for s in X]

    def score(self, X=None, y=None) -> float:
        """Negated total cost of the last fit, so that larger is better."""
        if X is not None:
            self.fit(X)
        check_is_solved(self)
        obj = self.report_.objective
        return -math.inf if obj is None else -obj

    def _solve(self, scenario: Scenario):
        raise NotImplementedError


class CGA(OffloadingSolver):
    name = "cga"

    def _solve(self, scenario):
        return cga(scenario)


class MGA(OffloadingSolver):
    name = "mga"

    def __init__(self, epsilon: float = 1.0, zeta: float = 1.0):
        self.epsilon = epsilon
        self.zeta = zeta

    def _solve(self, scenario):
        return mga(scenario, self.epsilon, self.zeta)


class FGA(OffloadingSolver):
    name = "fga"

    def __init__(self, Y: float | None = None, seed: int | None = 0):
        self.Y = Y
        self.seed = seed

    def _solve(self, scenario):
        return fga(scenario, Y=self.Y, seed=self.seed)


class ADMA(OffloadingSolver):
    """Distributed matching; ``arrivals`` maps ``(user, task)`` to its first round."""

    name = "adma"

    def __init__(self, seed: int | None = 0, arrivals=None, trace=None):
        self.seed = seed
        self.arrivals = arrivals
        self.trace = trace

    def _solve(self, scenario):
        return adma(scenario, seed=self.seed, arrivals=self.arrivals, trace_sink=self.trace)


class _Relaxation(OffloadingSolver):
    """LP lower bound. ``assignment_`` is ``None``; the LP result is in ``solution_``."""

    _solver = None

    def fit(self, X, y=None):
        scenario = check_scenario(X)
        self.scenario_ = scenario
        self.solution_ = type(self)._solver(scenario)
        self.assignment_ = None
        self.report_ = _lp_report(self.name, scenario, self.solution_)
        return self


class ELR(_Relaxation):
    name = "elr"
    _solver = staticmethod(solve_elr)


class FLR(_Relaxation):
    name = "flr"
    _solver = staticmethod(solve_flr)


def _lp_report(name: str, scenario: Scenario, sol: LpSolution) -> RunReport:
    ok = sol.status == "optimal"
    costs = sol.user_costs if ok else []
    if ok and sol.y is not None:
        fair = sol.y
    elif ok:
        scale = scenario.eta / scenario.tasks_per_user.clip(min=1)
        fair = float(max((s * c for s, c in zip(scale, costs)), default=0.0))
    else:
        fair = None
    return RunReport(
        algorithm=name, scenario_id=scenario.fingerprint, status=sol.status,
        objective=sol.total_cost if ok else None,
        fairness_objective=fair,
        per_user_costs=list(costs),
        jain=safe_jain(costs) if ok else None,
        offloading_ratio=1.0 if ok else 0.0,
        iterations=sol.iterations,
        unassigned=0 if ok else scenario.n_tasks,
        bound=sol.value,
        flags=[] if not ok or sol.is_integral else ["fractional"],
    )


class BruteForce(OffloadingSolver):
    """Exact search; ``objective`` is ``"total"`` (sum of costs) or ``"fair"`` (min-max)."""

    name = "oracle"

    def __init__(self, objective: str = "total", budget: int = DEFAULT_BUDGET):
        self.objective = objective
        self.budget = budget

    def _solve(self, scenario):
        if self.objective not in ("total", "fair"):
            raise ValueError(f"objective must be 'total' or 'fair', got {self.objective!r}")
        search = brute_force_op1 if self.objective == "total" else brute_force_op2
        res = search(scenario, self.budget)
        self.result_ = res
        if not res.feasible:
            return None, RunReport(
                algorithm=self.name, scenario_id=scenario.fingerprint, status="infeasible",
                objective=None, fairness_objective=None, per_user_costs=[], jain=None,
                offloading_ratio=0.0, iterations=res.nodes, unassigned=scenario.n_tasks)
        return res.assignment, make_report(self.name, scenario, res.assignment,
                                           iterations=res.nodes)


ESTIMATORS: dict[str, type[OffloadingSolver]] = {
    cls.name: cls for cls in (CGA, MGA, FGA, ADMA, ELR, FLR, BruteForce)
}


def make_estimator(name: str, **params) -> OffloadingSolver:
    """Build a solver by CLI name, silently dropping parameters it does not take."""
    try:
        cls = ESTIMATORS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ESTIMATORS)}") from None
    accepted = cls._get_param_names()
    return cls(**{k: v for k, v in params.items() if k in accepted and v is not None})
