"""Run reports, Jain's fairness index, offloading ratio and batch summaries."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .model import Assignment, Scenario, offloaded_user_costs, op1_objective, op2_objective

CSV_COLUMNS = ("algo", "param", "mean_cost", "std_cost", "mean_jain", "mean_ratio",
               "mean_iters", "n_scenarios", "seeds", "warning")


def jain_index(values: Sequence[float]) -> float:
    """Jain's fairness index ``(sum U)^2 / (n * sum U^2)``.

    Equals 1 when all entries are equal and ``1/n`` when a single entry
    carries everything.

    Raises
    ------
    ValueError
        If ``values`` is empty or all zero (the index is 0/0 there).
    """
    u = np.asarray(values, dtype=float)
    if u.size == 0:
        raise ValueError("Jain's index needs at least one value")
    sq = float(np.dot(u, u))
    if sq == 0.0:
        raise ValueError("Jain's index is undefined when every value is zero")
    return float(u.sum()) ** 2 / (u.size * sq)


def offloading_ratio(scenario: Scenario, assignment: Assignment) -> float:
    if scenario.n_tasks == 0:
        return 1.0
    done = sum(1 for tid in scenario.task_ids if tid in assignment)
    return done / scenario.n_tasks


@dataclass
class RunReport:
    """Outcome of one solver run on one scenario.

    ``objective`` is the total offloading cost and ``fairness_objective`` the
    worst eta-weighted per-user average; both are ``None`` unless every task
    was offloaded. ``per_user_costs`` only counts offloaded tasks.
    """

    algorithm: str
    scenario_id: str
    status: str
    objective: float | None
    fairness_objective: float | None
    per_user_costs: list[float]
    jain: float | None
    offloading_ratio: float
    iterations: int
    unassigned: int
    rounds: int | None = None
    messages: int | None = None
    stable: bool | None = None
    bound: float | None = None
    seed: int | None = None
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def safe_jain(costs: Sequence[float]) -> float | None:
    try:
        return jain_index(costs)
    except ValueError:
        return None


def make_report(algorithm: str, scenario: Scenario, assignment: Assignment,
                iterations: int, **extra) -> RunReport:
    costs = offloaded_user_costs(scenario, assignment)
    unassigned = len(assignment.unassigned(scenario))
    complete = unassigned == 0
    return RunReport(
        algorithm=algorithm,
        scenario_id=extra.pop("scenario_id", scenario.fingerprint),
        status="complete" if complete else "partial",
        objective=op1_objective(scenario, assignment) if complete else None,
        fairness_objective=op2_objective(scenario, assignment) if complete else None,
        per_user_costs=costs,
        jain=safe_jain(costs),
        offloading_ratio=offloading_ratio(scenario, assignment),
        iterations=iterations,
        unassigned=unassigned,
        **extra,
    )


@dataclass(frozen=True)
class AlgoStats:
    mean_cost: float
    std_cost: float
    mean_jain: float
    mean_ratio: float
    mean_iters: float
    n_costed: int


@dataclass(frozen=True)
class BatchSummary:
    """Per-algorithm aggregates over one batch of scenarios.

    Cost statistics cover runs that offloaded every task (``n_costed`` of
    them); ``nan`` marks a statistic with no contributing run.
    """

    n_scenarios: int
    stats: dict[str, AlgoStats]
    scenario_ids: tuple[str, ...]

    def csv_rows(self, param, seeds: str = "", warnings: dict[str, str] | None = None) -> list[dict]:
        warnings = warnings or {}
        rows = []
        for algo, s in self.stats.items():
            rows.append({
                "algo": algo, "param": param,
                "mean_cost": s.mean_cost, "std_cost": s.std_cost,
                "mean_jain": s.mean_jain, "mean_ratio": s.mean_ratio,
                "mean_iters": s.mean_iters, "n_scenarios": self.n_scenarios,
                "seeds": seeds, "warning": warnings.get(algo, ""),
            })
        return rows


def _mean(values: list[float]) -> float:
    return float(np.mean(values)) if values else math.nan


def summarize(reports: Iterable[RunReport]) -> BatchSummary:
    """Aggregate a batch; population standard deviation for cost.

    Every algorithm in the batch must have been run on the same set of
    scenarios, once each.
    """
    reports = list(reports)
    if not reports:
        raise ValueError("cannot summarize an empty batch")
    by_algo: dict[str, list[RunReport]] = {}
    for rep in reports:
        by_algo.setdefault(rep.algorithm, []).append(rep)
    ids = None
    for algo, group in by_algo.items():
        seen = [r.scenario_id for r in group]
        if len(set(seen)) != len(seen):
            raise ValueError(f"algorithm {algo!r} has repeated scenarios in the batch")
        if ids is None:
            ids = sorted(seen)
        elif sorted(seen) != ids:
            raise ValueError("mixed-scenario batch: algorithms were run on different scenarios")
    stats = {}
    for algo, group in by_algo.items():
        costs = [r.objective for r in group if r.objective is not None]
        stats[algo] = AlgoStats(
            mean_cost=_mean(costs),
            std_cost=float(np.std(costs)) if costs else math.nan,
            mean_jain=_mean([r.jain for r in group if r.jain is not None]),
            mean_ratio=_mean([r.offloading_ratio for r in group]),
            mean_iters=_mean([r.iterations for r in group]),
            n_costed=len(costs),
        )
    return BatchSummary(n_scenarios=len(ids), stats=stats, scenario_ids=tuple(ids))


def _fmt(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return v


def write_csv(rows: Iterable[dict], sink=None) -> str:
    """Write rows with the fixed column order; returns the CSV text."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(row.get(k, "")) for k in CSV_COLUMNS})
    text = buf.getvalue()
    if sink is not None:
        if hasattr(sink, "write"):
            sink.write(text)
        else:
            with open(sink, "w", newline="") as fh:
                fh.write(text)
    return text
