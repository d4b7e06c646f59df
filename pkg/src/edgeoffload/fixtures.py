"""Small hand-built instances with known outcomes.

``example1``
    Two servers (R = 3, 4) and two tasks (r = 1, 5). Aggregate capacity
    suffices but the r = 5 task fits nowhere, so no complete assignment
    exists.
``example2``
    One user, three tasks (r = 3, 2, 2), two servers (R = 4, 6). AP 0
    reaches server 0 cheaply and AP 1 reaches server 1 cheaply; crossing
    over costs 10 more. The effective per-server costs are (1, 2.5),
    (2, 3), (2, 3). Plain greedy places the cheap large task first and pays
    7, while the optimum pays 6.5.
``example3``
    Six single-task users, two servers (R = 10, 12). AP 0 is wired only to
    server 0 and AP 1 only to server 1. Costs at the preferred server are
    1, 2, 3, 4, 5, 2.5 with demands 1, 2, 10, 3, 1, 3. Tasks 3 and 4 cannot
    reach server 0 at all. The last task joins two rounds late
    (``EXAMPLE3_ARRIVALS``).
"""

from __future__ import annotations

import json
from importlib import resources

from .model import AccessPoint, EdgeServer, MobileUser, Scenario, Task
from .scenario import SCHEMA_VERSION, loads

INF = float("inf")

EXAMPLE3_ARRIVALS = {(5, 0): 2}


def example1() -> Scenario:
    users = (
        MobileUser(1.0, 1.0, 1.0, 1.0, (Task(1.0, (1.0,), (1.0,)),)),
        MobileUser(1.0, 1.0, 1.0, 1.0, (Task(5.0, (1.0,), (1.0,)),)),
    )
    return Scenario(users, (AccessPoint(2),), (EdgeServer(3.0), EdgeServer(4.0)),
                    ((1.0, 2.0),))


def example2() -> Scenario:
    tasks = (
        Task(3.0, (1.0, 2.5), (0.0, 0.0)),
        Task(2.0, (2.0, 3.0), (0.0, 0.0)),
        Task(2.0, (2.0, 3.0), (0.0, 0.0)),
    )
    return Scenario((MobileUser(1.0, 1.0, 1.0, 1.0, tasks),),
                    (AccessPoint(3), AccessPoint(3)),
                    (EdgeServer(4.0), EdgeServer(6.0)),
                    ((0.0, 10.0), (10.0, 0.0)))


def example3() -> Scenario:
    # t = (cost via AP 0 -> server 0, cost via AP 1 -> server 1)
    rows = [
        (1.0, (1.0, 1.0)),
        (2.0, (6.0, 2.0)),
        (10.0, (3.0, 3.0)),
        (3.0, (INF, 4.0)),
        (1.0, (INF, 5.0)),
        (3.0, (6.0, 2.5)),
    ]
    users = tuple(MobileUser(1.0, 0.0, 1.0, 1.0, (Task(r, t, (0.0, 0.0)),)) for r, t in rows)
    return Scenario(users, (AccessPoint(6), AccessPoint(6)),
                    (EdgeServer(10.0), EdgeServer(12.0)),
                    ((0.0, INF), (INF, 0.0)))


FIXTURES = {"example1": example1, "example2": example2, "example3": example3}


def load_fixture(name: str) -> Scenario:
    """Load a shipped fixture file from the package data."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}")
    text = resources.files("edgeoffload").joinpath("data", f"{name}.json").read_text()
    return loads(text).scenario


def fixture_metadata(name: str) -> dict:
    meta = {"schema_version": SCHEMA_VERSION, "fixture": name}
    if name == "example3":
        meta["arrivals"] = [{"user": i, "task": j, "round": r}
                            for (i, j), r in EXAMPLE3_ARRIVALS.items()]
    return json.loads(json.dumps(meta))
