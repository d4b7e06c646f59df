"""Seeded random scenarios and JSON persistence.

All random draws are uniform over closed intervals from numpy's PCG64
generator. Draw order is fixed (per user: task count, weights, then per
task demand, delays, energies; finally the access-cost matrix), so a
``(params, seed)`` pair always reproduces the same scenario byte for byte.

Capacity policies
-----------------
``ample``
    ECS capacity totals ``capacity_factor`` (>= 1) times the realised
    demand, split evenly over ECSs, and no ECS gets less than the largest
    single demand (so one big task always fits somewhere); AP connections total
    ``ceil(capacity_factor * n_tasks)`` split evenly (rounded up).
``starved``
    As ``ample`` for APs, but ECS capacity totals ``capacity_factor`` times
    demand with any positive factor, typically below 1.
``explicit``
    Both ``ecs_caps`` and ``ap_caps`` must be given.

Under any policy an explicit ``ecs_caps``/``ap_caps`` (scalar or list)
overrides the policy's value for that resource.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path as FsPath
from typing import Union

import numpy as np

from .model import (AccessPoint, EdgeServer, MobileUser, Scenario, SchemaError, Task,
                    scenario_from_dict, scenario_to_dict)

SCHEMA_VERSION = 1
RNG_ID = "numpy.PCG64"

Range = tuple[float, float]
Weight = Union[float, Range]


@dataclass(frozen=True)
class GenParams:
    n_users: int = 5
    n_aps: int = 3
    n_ecss: int = 2
    tasks_per_user: Union[int, tuple[int, int]] = 3
    r_mean: float = 6.0
    r_halfwidth: float = 1.0
    t_range: Range = (2.0, 6.0)
    e_range: Range = (2.0, 6.0)
    delta_range: Range = (1.0, 6.0)
    alpha: Weight = 1.0
    beta: Weight = 1.0
    gamma: Weight = 1.0
    eta: Weight = 1.0
    equal_r: bool = False
    capacity: str = "ample"
    capacity_factor: float = 1.2
    ecs_caps: Union[float, list, None] = None
    ap_caps: Union[int, list, None] = None

    def __post_init__(self):
        for name in ("n_users", "n_aps", "n_ecss"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        lo, hi = self.task_range
        if lo < 1 or hi < lo:
            raise ValueError(f"tasks_per_user must be >= 1 with low <= high, got {self.tasks_per_user}")
        if self.r_halfwidth < 0 or self.r_mean - self.r_halfwidth <= 0:
            raise ValueError("demand range must stay strictly positive")
        for name in ("t_range", "e_range", "delta_range"):
            lo, hi = getattr(self, name)
            if lo < 0 or hi < lo:
                raise ValueError(f"{name} needs 0 <= low <= high, got {(lo, hi)}")
        for name in ("alpha", "beta", "gamma", "eta"):
            lo, hi = _as_range(getattr(self, name))
            if lo < 0 or hi < lo:
                raise ValueError(f"{name} needs 0 <= low <= high")
        if _as_range(self.eta)[0] <= 0:
            raise ValueError("eta must be > 0")
        if self.capacity not in ("ample", "starved", "explicit"):
            raise ValueError(f"unknown capacity policy {self.capacity!r}")
        if self.capacity == "ample" and self.capacity_factor < 1:
            raise ValueError("the ample policy needs capacity_factor >= 1")
        if self.capacity_factor <= 0:
            raise ValueError("capacity_factor must be > 0")
        if self.capacity == "explicit" and (self.ecs_caps is None or self.ap_caps is None):
            raise ValueError("the explicit policy needs both ecs_caps and ap_caps")

    @property
    def task_range(self) -> tuple[int, int]:
        tpu = self.tasks_per_user
        return (tpu, tpu) if isinstance(tpu, int) else (int(tpu[0]), int(tpu[1]))

    @property
    def r_range(self) -> Range:
        return (self.r_mean - self.r_halfwidth, self.r_mean + self.r_halfwidth)

    def replace(self, **changes) -> "GenParams":
        return GenParams(**{**asdict(self), **changes})

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, doc: dict) -> "GenParams":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown generation parameters: {sorted(unknown)}")
        clean = {k: tuple(v) if isinstance(v, list) and k not in ("ecs_caps", "ap_caps") else v
                 for k, v in doc.items()}
        return cls(**clean)


def _as_range(w) -> Range:
    if isinstance(w, (int, float)):
        return (float(w), float(w))
    return (float(w[0]), float(w[1]))


def _draw(rng: np.random.Generator, w, size=None):
    lo, hi = _as_range(w)
    if lo == hi:
        return lo if size is None else np.full(size, lo)
    return rng.uniform(lo, hi, size)


def _broadcast(value, count: int, name: str) -> list:
    if isinstance(value, (int, float)):
        return [value] * count
    value = list(value)
    if len(value) != count:
        raise ValueError(f"{name} has {len(value)} entries, expected {count}")
    return value


def generate(params: GenParams, seed: int) -> Scenario:
    rng = np.random.Generator(np.random.PCG64(seed))
    B, C = params.n_aps, params.n_ecss
    lo, hi = params.task_range
    shared_r = float(rng.uniform(*params.r_range)) if params.equal_r else None
    users = []
    for _ in range(params.n_users):
        n_tasks = int(rng.integers(lo, hi + 1)) if hi > lo else lo
        alpha, beta, gamma, eta = (float(_draw(rng, getattr(params, w)))
                                   for w in ("alpha", "beta", "gamma", "eta"))
        if alpha == beta == gamma == 0:
            raise ValueError("drawn cost weights are all zero")
        tasks = []
        for _ in range(n_tasks):
            r = shared_r if shared_r is not None else float(rng.uniform(*params.r_range))
            t = rng.uniform(*params.t_range, B)
            e = rng.uniform(*params.e_range, B)
            tasks.append(Task(r, tuple(t.tolist()), tuple(e.tolist())))
        users.append(MobileUser(alpha, beta, gamma, eta, tuple(tasks)))
    delta = rng.uniform(*params.delta_range, (B, C))

    n_tasks = sum(len(u.tasks) for u in users)
    demand = sum(t.r for u in users for t in u.tasks)
    if params.ecs_caps is not None:
        caps = [float(c) for c in _broadcast(params.ecs_caps, C, "ecs_caps")]
    else:
        share = params.capacity_factor * demand / C
        if params.capacity == "ample":
            share = max(share, max(t.r for u in users for t in u.tasks))
        caps = [share] * C
    if params.ap_caps is not None:
        qs = [int(q) for q in _broadcast(params.ap_caps, B, "ap_caps")]
    else:
        factor = max(params.capacity_factor, 1.0)
        qs = [math.ceil(math.ceil(factor * n_tasks) / B)] * B
    return Scenario(tuple(users), tuple(AccessPoint(q) for q in qs),
                    tuple(EdgeServer(c) for c in caps),
                    tuple(tuple(row) for row in delta.tolist()))


@dataclass
class ScenarioFile:
    scenario: Scenario
    metadata: dict = field(default_factory=dict)


def envelope(scenario: Scenario, seed: int | None = None, params: GenParams | None = None) -> dict:
    meta = {"schema_version": SCHEMA_VERSION, "rng": RNG_ID, "seed": seed,
            "params": params.to_dict() if params is not None else None}
    return {"metadata": meta, "scenario": scenario_to_dict(scenario)}


def dumps(scenario: Scenario, metadata: dict | None = None) -> str:
    doc = scenario_to_dict(scenario) if metadata is None else {
        "metadata": metadata, "scenario": scenario_to_dict(scenario)}
    return json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + "\n"


def save(scenario: Scenario, sink, metadata: dict | None = None) -> None:
    text = dumps(scenario, metadata)
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        FsPath(sink).write_text(text)


def loads(text: str) -> ScenarioFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    if isinstance(doc, dict) and "scenario" in doc:
        meta = doc.get("metadata") or {}
        version = meta.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise SchemaError(f"unsupported schema_version {version}")
        return ScenarioFile(scenario_from_dict(doc["scenario"]), meta)
    return ScenarioFile(scenario_from_dict(doc), {})


def load(source) -> Scenario:
    """Read a scenario from a path or file object (bare or enveloped document)."""
    return load_file(source).scenario


def load_file(source) -> ScenarioFile:
    text = source.read() if hasattr(source, "read") else FsPath(source).read_text()
    return loads(text)
