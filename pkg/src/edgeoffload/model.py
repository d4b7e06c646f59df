"""Problem instances, offloading costs and constraint checking.

A :class:`Scenario` holds mobile users (each owning one or more tasks),
access points with a connection limit and edge servers with a compute
capacity. Offloading task ``(i, j)`` through AP ``m`` to ECS ``n`` costs::

    alpha_i * t[i][j][m] + beta_i * e[i][j][m] + gamma_i * delta[m][n]

Infinite ``delta[m][n]`` marks an AP that is not wired to that ECS. Infinite
``t`` or ``e`` entries likewise mark an AP a particular task cannot reach.
Such paths are never chosen by any solver.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, NamedTuple, Sequence

import numpy as np

TaskId = tuple[int, int]

#: Relative slack used for every capacity comparison.
CAPACITY_TOL = 1e-9


class ScenarioError(ValueError):
    """Raised when instance data violates the model invariants."""


class SchemaError(ScenarioError):
    """Raised when a serialized scenario or assignment is malformed."""


class UnassignedTaskError(ValueError):
    """An objective was requested for an assignment that leaves tasks out."""

    def __init__(self, task: TaskId):
        super().__init__(f"task {task} is not assigned")
        self.task = task


def fits(demand: float, capacity: float) -> bool:
    return demand <= capacity + CAPACITY_TOL * max(1.0, abs(capacity))


def _check_cost_vector(values, n_aps: int, name: str) -> tuple[float, ...]:
    values = tuple(float(v) for v in values)
    if len(values) != n_aps:
        raise ScenarioError(f"{name} has {len(values)} entries, expected {n_aps}")
    for v in values:
        if math.isnan(v) or v < 0:
            raise ScenarioError(f"{name} entries must be >= 0, got {v}")
    return values


@dataclass(frozen=True)
class Task:
    """Compute demand ``r`` plus per-AP offloading delay ``t`` and energy ``e``."""

    r: float
    t: tuple[float, ...]
    e: tuple[float, ...]

    def __post_init__(self):
        r = float(self.r)
        if not (math.isfinite(r) and r > 0):
            raise ScenarioError(f"task demand r must be finite and > 0, got {self.r}")
        t = tuple(float(v) for v in self.t)
        e = tuple(float(v) for v in self.e)
        if len(t) != len(e):
            raise ScenarioError(f"t and e need one entry per AP, got {len(t)} and {len(e)}")
        _check_cost_vector(t, len(t), "t")
        _check_cost_vector(e, len(e), "e")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "e", e)


@dataclass(frozen=True)
class MobileUser:
    alpha: float
    beta: float
    gamma: float
    eta: float
    tasks: tuple[Task, ...]

    def __post_init__(self):
        weights = [float(w) for w in (self.alpha, self.beta, self.gamma)]
        if any(not math.isfinite(w) or w < 0 for w in weights):
            raise ScenarioError(f"cost weights must be finite and >= 0, got {weights}")
        if not any(weights):
            raise ScenarioError("alpha, beta and gamma cannot all be zero")
        eta = float(self.eta)
        if not (math.isfinite(eta) and eta > 0):
            raise ScenarioError(f"eta must be finite and > 0, got {self.eta}")
        tasks = tuple(self.tasks)
        if not tasks:
            raise ScenarioError("a mobile user needs at least one task")
        object.__setattr__(self, "alpha", weights[0])
        object.__setattr__(self, "beta", weights[1])
        object.__setattr__(self, "gamma", weights[2])
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "tasks", tasks)


@dataclass(frozen=True)
class AccessPoint:
    q: int

    def __post_init__(self):
        if isinstance(self.q, bool) or int(self.q) != self.q or self.q < 0:
            raise ScenarioError(f"AP capacity q must be a non-negative integer, got {self.q}")
        object.__setattr__(self, "q", int(self.q))


@dataclass(frozen=True)
class EdgeServer:
    cap: float

    def __post_init__(self):
        cap = float(self.cap)
        if not (math.isfinite(cap) and cap >= 0):
            raise ScenarioError(f"ECS capacity must be finite and >= 0, got {self.cap}")
        object.__setattr__(self, "cap", cap)


class Path(NamedTuple):
    ap: int
    ecs: int


class CostBreakdown(NamedTuple):
    delay: float
    energy: float
    access: float
    total: float


@dataclass(frozen=True, eq=False)
class Scenario:
    """Immutable problem instance.

    Besides the nested user/task view, a scenario exposes flattened numpy
    views over all tasks (``task_ids``, ``demand``, ``owner``,
    ``cost_tensor``) that the solvers work on. Flat task ``k`` is
    ``task_ids[k]``; tasks are ordered user-major.
    """

    users: tuple[MobileUser, ...]
    aps: tuple[AccessPoint, ...]
    ecss: tuple[EdgeServer, ...]
    delta: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        users = tuple(self.users)
        aps = tuple(self.aps)
        ecss = tuple(self.ecss)
        if not aps or not ecss:
            raise ScenarioError("a scenario needs at least one AP and one ECS")
        delta = tuple(tuple(float(v) for v in row) for row in self.delta)
        if len(delta) != len(aps) or any(len(row) != len(ecss) for row in delta):
            raise ScenarioError(
                f"delta must be {len(aps)}x{len(ecss)} (APs x ECSs)")
        for row in delta:
            for v in row:
                if math.isnan(v) or v < 0:
                    raise ScenarioError(f"delta entries must be >= 0, got {v}")
        for i, user in enumerate(users):
            for j, task in enumerate(user.tasks):
                _check_cost_vector(task.t, len(aps), f"t of task ({i}, {j})")
                _check_cost_vector(task.e, len(aps), f"e of task ({i}, {j})")
        object.__setattr__(self, "users", users)
        object.__setattr__(self, "aps", aps)
        object.__setattr__(self, "ecss", ecss)
        object.__setattr__(self, "delta", delta)

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return scenario_to_dict(self) == scenario_to_dict(other)

    __hash__ = None

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_aps(self) -> int:
        return len(self.aps)

    @property
    def n_ecss(self) -> int:
        return len(self.ecss)

    @cached_property
    def task_ids(self) -> list[TaskId]:
        return [(i, j) for i, u in enumerate(self.users) for j in range(len(u.tasks))]

    @property
    def n_tasks(self) -> int:
        return len(self.task_ids)

    @cached_property
    def task_index(self) -> dict[TaskId, int]:
        return {tid: k for k, tid in enumerate(self.task_ids)}

    def task(self, tid: TaskId) -> Task:
        i, j = tid
        if not (0 <= i < self.n_users and 0 <= j < len(self.users[i].tasks)):
            raise IndexError(f"no task {tid}")
        return self.users[i].tasks[j]

    def iter_tasks(self) -> Iterator[tuple[TaskId, Task]]:
        for i, user in enumerate(self.users):
            for j, task in enumerate(user.tasks):
                yield (i, j), task

    @cached_property
    def delta_matrix(self) -> np.ndarray:
        return np.array(self.delta, dtype=float).reshape(self.n_aps, self.n_ecss)

    @cached_property
    def demand(self) -> np.ndarray:
        return np.array([t.r for _, t in self.iter_tasks()], dtype=float)

    @cached_property
    def owner(self) -> np.ndarray:
        return np.array([i for i, _ in self.task_ids], dtype=int)

    @cached_property
    def tasks_per_user(self) -> np.ndarray:
        return np.array([len(u.tasks) for u in self.users], dtype=int)

    @cached_property
    def eta(self) -> np.ndarray:
        return np.array([u.eta for u in self.users], dtype=float)

    @cached_property
    def ap_caps(self) -> np.ndarray:
        return np.array([a.q for a in self.aps], dtype=int)

    @cached_property
    def ecs_caps(self) -> np.ndarray:
        return np.array([c.cap for c in self.ecss], dtype=float)

    @cached_property
    def ap_cost(self) -> np.ndarray:
        """``(K, B)`` array of ``alpha*t + beta*e`` per task and AP."""
        out = np.empty((self.n_tasks, self.n_aps))
        for k, ((i, _), task) in enumerate(self.iter_tasks()):
            u = self.users[i]
            out[k] = _weighted(u.alpha, task.t) + _weighted(u.beta, task.e)
        return out

    @cached_property
    def gamma(self) -> np.ndarray:
        return np.array([self.users[i].gamma for i in self.owner], dtype=float)

    @cached_property
    def cost_tensor(self) -> np.ndarray:
        """``(K, B, C)`` array of path cost totals; ``inf`` marks an unusable path."""
        d = self.delta_matrix
        wired = np.isfinite(d)
        access = self.gamma[:, None, None] * np.where(wired, d, 0.0)[None]
        out = self.ap_cost[:, :, None] + np.where(wired[None], access, np.inf)
        out.setflags(write=False)
        return out

    @cached_property
    def fingerprint(self) -> str:
        blob = json.dumps(scenario_to_dict(self), sort_keys=True).encode()
        return hashlib.sha1(blob).hexdigest()[:12]


def _weighted(w: float, values: Sequence[float]) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if w == 0:
        # 0 * inf must still mean "unreachable", not nan
        return np.where(np.isinf(arr), np.inf, 0.0)
    return w * arr


@dataclass
class Assignment:
    """Mapping from task id to the chosen :class:`Path`; absent tasks are unassigned."""

    paths: dict[TaskId, Path] = field(default_factory=dict)

    def assign(self, task: TaskId, ap: int, ecs: int) -> None:
        self.paths[tuple(task)] = Path(int(ap), int(ecs))

    def get(self, task: TaskId) -> Path | None:
        return self.paths.get(tuple(task))

    def __contains__(self, task) -> bool:
        return tuple(task) in self.paths

    def __len__(self) -> int:
        return len(self.paths)

    def unassigned(self, scenario: Scenario) -> list[TaskId]:
        return [tid for tid in scenario.task_ids if tid not in self.paths]

    def is_complete(self, scenario: Scenario) -> bool:
        return not self.unassigned(scenario)

    def by_ecs(self) -> dict[int, list[TaskId]]:
        out: dict[int, list[TaskId]] = {}
        for tid, p in sorted(self.paths.items()):
            out.setdefault(p.ecs, []).append(tid)
        return out

    def to_dict(self) -> dict:
        return {"paths": [
            {"user": i, "task": j, "ap": p.ap, "ecs": p.ecs}
            for (i, j), p in sorted(self.paths.items())
        ]}

    @classmethod
    def from_dict(cls, doc: dict) -> "Assignment":
        if not isinstance(doc, dict) or "paths" not in doc:
            raise SchemaError("assignment document needs a 'paths' list")
        out = cls()
        for n, rec in enumerate(doc["paths"]):
            for key in ("user", "task", "ap", "ecs"):
                if key not in rec:
                    raise SchemaError(f"paths[{n}] is missing '{key}'")
            tid = (int(rec["user"]), int(rec["task"]))
            if tid in out.paths:
                raise SchemaError(f"task {tid} appears more than once")
            out.assign(tid, rec["ap"], rec["ecs"])
        return out


def path_cost(scenario: Scenario, task: TaskId, ap: int, ecs: int) -> CostBreakdown:
    t = scenario.task(task)
    if not 0 <= ap < scenario.n_aps:
        raise IndexError(f"AP index {ap} out of range")
    if not 0 <= ecs < scenario.n_ecss:
        raise IndexError(f"ECS index {ecs} out of range")
    user = scenario.users[task[0]]
    delay, energy, access = t.t[ap], t.e[ap], scenario.delta[ap][ecs]
    total = 0.0
    for w, v in ((user.alpha, delay), (user.beta, energy), (user.gamma, access)):
        if math.isinf(v):
            total = math.inf
        elif w:
            total += w * v
    return CostBreakdown(delay, energy, access, total)


def user_total_cost(scenario: Scenario, assignment: Assignment, user: int) -> float:
    total = 0.0
    for j in range(len(scenario.users[user].tasks)):
        p = assignment.get((user, j))
        if p is None:
            raise UnassignedTaskError((user, j))
        total += path_cost(scenario, (user, j), p.ap, p.ecs).total
    return total


def offloaded_user_costs(scenario: Scenario, assignment: Assignment) -> list[float]:
    """Per-user cost summed over offloaded tasks only (unassigned tasks add 0)."""
    costs = [0.0] * scenario.n_users
    for (i, j), p in assignment.paths.items():
        costs[i] += path_cost(scenario, (i, j), p.ap, p.ecs).total
    return costs


def op1_objective(scenario: Scenario, assignment: Assignment) -> float:
    """Total offloading cost over all users."""
    return sum(user_total_cost(scenario, assignment, i) for i in range(scenario.n_users))


def op2_objective(scenario: Scenario, assignment: Assignment) -> float:
    """Largest eta-weighted average per-task cost over users."""
    if scenario.n_users == 0:
        return 0.0
    return max(
        u.eta * user_total_cost(scenario, assignment, i) / len(u.tasks)
        for i, u in enumerate(scenario.users)
    )


class Violation(NamedTuple):
    kind: str
    index: object
    detail: str


def validate_assignment(scenario: Scenario, assignment: Assignment) -> list[Violation]:
    """List every constraint the assignment breaks; empty means feasible.

    Kinds: ``unknown-task``, ``index``, ``unavailable-path``, ``ecs-capacity``,
    ``ap-capacity`` and ``unassigned``.
    """
    out: list[Violation] = []
    load = np.zeros(scenario.n_ecss)
    conns = np.zeros(scenario.n_aps, dtype=int)
    for tid, p in sorted(assignment.paths.items()):
        if tid not in scenario.task_index:
            out.append(Violation("unknown-task", tid, f"scenario has no task {tid}"))
            continue
        if not (0 <= p.ap < scenario.n_aps and 0 <= p.ecs < scenario.n_ecss):
            out.append(Violation("index", tid, f"path {tuple(p)} out of range"))
            continue
        if not math.isfinite(path_cost(scenario, tid, p.ap, p.ecs).total):
            out.append(Violation("unavailable-path", tid, f"path {tuple(p)} is not usable"))
        load[p.ecs] += scenario.task(tid).r
        conns[p.ap] += 1
    for n, ecs in enumerate(scenario.ecss):
        if not fits(load[n], ecs.cap):
            out.append(Violation("ecs-capacity", n, f"demand {load[n]:g} exceeds R={ecs.cap:g}"))
    for m, ap in enumerate(scenario.aps):
        if conns[m] > ap.q:
            out.append(Violation("ap-capacity", m, f"{conns[m]} connections exceed Q={ap.q}"))
    for tid in assignment.unassigned(scenario):
        out.append(Violation("unassigned", tid, f"task {tid} has no path"))
    return out


@dataclass(frozen=True)
class FeasibilityCheck:
    ok: bool
    demand: float
    capacity: float
    n_tasks: int
    connections: int
    diagnostics: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


def necessary_feasibility(scenario: Scenario) -> FeasibilityCheck:
    """Aggregate resource test: total demand vs. total capacity, tasks vs. connections.

    Passing is necessary but not sufficient; demands may still not pack
    into the individual servers.
    """
    demand = float(scenario.demand.sum())
    capacity = float(scenario.ecs_caps.sum())
    n_tasks = scenario.n_tasks
    conns = int(scenario.ap_caps.sum())
    diag = []
    if not fits(demand, capacity):
        diag.append(f"compute: total demand {demand:g} > total ECS capacity {capacity:g}")
    if n_tasks > conns:
        diag.append(f"connections: {n_tasks} tasks > {conns} AP connections")
    return FeasibilityCheck(not diag, demand, capacity, n_tasks, conns, tuple(diag))


def _encode(v: float):
    return None if math.isinf(v) else v


def _decode(v, where: str) -> float:
    if v is None:
        return math.inf
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{where} must be a number, got {v!r}")
    return float(v)


def scenario_to_dict(scenario: Scenario) -> dict:
    """JSON-ready document. Infinite costs are written as ``null``."""
    return {
        "users": [
            {
                "alpha": u.alpha, "beta": u.beta, "gamma": u.gamma, "eta": u.eta,
                "tasks": [
                    {"r": t.r, "t": [_encode(v) for v in t.t], "e": [_encode(v) for v in t.e]}
                    for t in u.tasks
                ],
            }
            for u in scenario.users
        ],
        "aps": [{"q": a.q} for a in scenario.aps],
        "ecss": [{"cap": c.cap} for c in scenario.ecss],
        "delta": [[_encode(v) for v in row] for row in scenario.delta],
    }


def _require(doc: dict, key: str, where: str):
    if not isinstance(doc, dict):
        raise SchemaError(f"{where} must be an object")
    if key not in doc:
        raise SchemaError(f"missing '{key}' in {where}")
    return doc[key]


def scenario_from_dict(doc: dict) -> Scenario:
    users = []
    for i, u in enumerate(_require(doc, "users", "scenario")):
        where = f"users[{i}]"
        tasks = []
        for j, t in enumerate(_require(u, "tasks", where)):
            tw = f"{where}.tasks[{j}]"
            tasks.append(Task(
                r=_decode(_require(t, "r", tw), f"{tw}.r"),
                t=tuple(_decode(v, f"{tw}.t") for v in _require(t, "t", tw)),
                e=tuple(_decode(v, f"{tw}.e") for v in _require(t, "e", tw)),
            ))
        users.append(MobileUser(
            alpha=_decode(_require(u, "alpha", where), f"{where}.alpha"),
            beta=_decode(_require(u, "beta", where), f"{where}.beta"),
            gamma=_decode(_require(u, "gamma", where), f"{where}.gamma"),
            eta=_decode(_require(u, "eta", where), f"{where}.eta"),
            tasks=tuple(tasks),
        ))
    aps = [AccessPoint(_require(a, "q", f"aps[{m}]")) for m, a in enumerate(_require(doc, "aps", "scenario"))]
    ecss = [EdgeServer(_decode(_require(c, "cap", f"ecss[{n}]"), f"ecss[{n}].cap"))
            for n, c in enumerate(_require(doc, "ecss", "scenario"))]
    delta = [[_decode(v, f"delta[{m}]") for v in row]
             for m, row in enumerate(_require(doc, "delta", "scenario"))]
    return Scenario(tuple(users), tuple(aps), tuple(ecss), tuple(map(tuple, delta)))
