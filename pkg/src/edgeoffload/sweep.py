"""Seeded parameter sweeps producing one CSV row per (algorithm, grid value).

A sweep file is JSON::

    {"algorithms": ["cga", "fga", "elr", "flr"],
     "param": "r_mean", "values": [2, 4, 6, 8, 10],
     "seeds": 1000, "seed_start": 0,
     "base": {"n_users": 5, "n_aps": 3, "n_ecss": 2, "tasks_per_user": 3},
     "epsilon": 1.0, "zeta": 1.0, "budget": 10000000}

Scenario ``s`` of every grid point is ``generate(base | {param: value},
seed_start + s)``; every algorithm sees the same scenarios. Randomised
solvers (FGA tie-breaks, ADMA message order) reuse the scenario seed, so
a sweep is a pure function of its file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path as FsPath

from .estimators import ESTIMATORS, make_estimator
from .metrics import CSV_COLUMNS, RunReport, summarize, write_csv
from .oracle import DEFAULT_BUDGET, search_space
from .scenario import GenParams, generate

SWEEPABLE = ("r_mean", "tasks_per_user", "n_users", "mga_epsilon")


@dataclass(frozen=True)
class SweepSpec:
    algorithms: tuple[str, ...]
    param: str
    values: tuple
    seeds: int = 1
    seed_start: int = 0
    base: GenParams = field(default_factory=GenParams)
    epsilon: float = 1.0
    zeta: float = 1.0
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        unknown = [a for a in self.algorithms if a not in ESTIMATORS]
        if unknown:
            raise ValueError(f"unknown algorithms {unknown}; choose from {sorted(ESTIMATORS)}")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ValueError("algorithms must be listed once each")
        if self.param not in SWEEPABLE:
            raise ValueError(f"param must be one of {SWEEPABLE}, got {self.param!r}")
        if not self.values:
            raise ValueError("the value grid is empty")
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")
        for v in self.values:  # fail early on grid values the generator rejects
            self.params_at(v)
        if self.param == "mga_epsilon" and min(self.values) < 1:
            raise ValueError("mga_epsilon grid values must be >= 1")

    @classmethod
    def from_dict(cls, doc: dict) -> "SweepSpec":
        known = {"algorithms", "param", "values", "seeds", "seed_start", "base",
                 "epsilon", "zeta", "budget"}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown sweep keys: {sorted(extra)}")
        for key in ("algorithms", "param", "values"):
            if key not in doc:
                raise ValueError(f"sweep file is missing {key!r}")
        kw = dict(doc)
        kw["algorithms"] = tuple(kw["algorithms"])
        kw["values"] = tuple(kw["values"])
        kw["base"] = GenParams.from_dict(kw.get("base", {}))
        return cls(**kw)

    @classmethod
    def load(cls, path) -> "SweepSpec":
        return cls.from_dict(json.loads(FsPath(path).read_text()))

    def params_at(self, value) -> GenParams:
        if self.param == "mga_epsilon":
            return self.base
        if self.param in ("tasks_per_user", "n_users"):
            value = int(value)
        return self.base.replace(**{self.param: value})

    def seed_list(self) -> range:
        return range(self.seed_start, self.seed_start + self.seeds)


@dataclass
class PointResult:
    value: object
    reports: dict[str, list[RunReport]]
    warnings: dict[str, str]


def _solver_params(spec: SweepSpec, value, seed: int) -> dict:
    eps = float(value) if spec.param == "mga_epsilon" else spec.epsilon
    return {"epsilon": eps, "zeta": spec.zeta, "seed": seed, "budget": spec.budget}


def run_point(spec: SweepSpec, value) -> PointResult:
    params = spec.params_at(value)
    scenarios = [(seed, generate(params, seed)) for seed in spec.seed_list()]
    reports: dict[str, list[RunReport]] = {}
    warnings: dict[str, str] = {}
    for algo in spec.algorithms:
        if algo == "oracle":
            too_big = sum(search_space(s) > spec.budget for _, s in scenarios)
            if too_big:
                warnings[algo] = (f"skipped: {too_big} of {len(scenarios)} scenarios "
                                  f"exceed the search budget {spec.budget}")
                continue
        reports[algo] = [make_estimator(algo, **_solver_params(spec, value, seed)).fit(s).report_
                         for seed, s in scenarios]
    return PointResult(value, reports, warnings)


def _seed_label(spec: SweepSpec) -> str:
    first, last = spec.seed_start, spec.seed_start + spec.seeds - 1
    return str(first) if first == last else f"{first}-{last}"


def point_rows(spec: SweepSpec, point: PointResult) -> list[dict]:
    label = _seed_label(spec)
    rows = []
    if point.reports:
        summary = summarize(r for group in point.reports.values() for r in group)
        by_algo = {row["algo"]: row for row in
                   summary.csv_rows(point.value, seeds=label, warnings=point.warnings)}
    else:
        by_algo = {}
    for algo in spec.algorithms:
        if algo in by_algo:
            rows.append(by_algo[algo])
        else:
            row = {k: float("nan") for k in CSV_COLUMNS}
            row.update(algo=algo, param=point.value, n_scenarios=0, seeds=label,
                       warning=point.warnings.get(algo, ""))
            rows.append(row)
    return rows


def run_sweep(spec: SweepSpec, progress=None) -> list[dict]:
    """All CSV rows, ordered by algorithm (as listed) then grid value."""
    per_point = []
    for value in spec.values:
        per_point.append(point_rows(spec, run_point(spec, value)))
        if progress is not None:
            progress(value)
    order = {a: i for i, a in enumerate(spec.algorithms)}
    flat = [(order[row["algo"]], vi, row) for vi, rows in enumerate(per_point) for row in rows]
    return [row for _, _, row in sorted(flat, key=lambda t: (t[0], t[1]))]


def sweep_csv(spec: SweepSpec, sink=None) -> str:
    return write_csv(run_sweep(spec), sink)
