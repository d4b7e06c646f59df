import itertools
import math
import time

import numpy as np
import pytest
from hypothesis import strategies as st

from edgeoffload.model import AccessPoint, EdgeServer, MobileUser, Scenario, Task
from edgeoffload.scenario import GenParams, generate


def naive_optimum(scenario: Scenario, fair: bool = False):
    """Reference optimum by plain enumeration of every path tuple (no pruning)."""
    B, C = scenario.n_aps, scenario.n_ecss
    best = math.inf
    for combo in itertools.product(range(B * C), repeat=scenario.n_tasks):
        q = [0] * B
        load = [0.0] * C
        user = [0.0] * scenario.n_users
        ok = True
        for (i, j), idx in zip(scenario.task_ids, combo):
            m, n = divmod(idx, C)
            u = scenario.users[i]
            task = u.tasks[j]
            cost = u.alpha * task.t[m] + u.beta * task.e[m] + u.gamma * scenario.delta[m][n]
            if not math.isfinite(cost):
                ok = False
                break
            q[m] += 1
            load[n] += task.r
            user[i] += cost
        if not ok or any(q[m] > scenario.aps[m].q for m in range(B)):
            continue
        if any(load[n] > scenario.ecss[n].cap + 1e-9 for n in range(C)):
            continue
        if fair:
            value = max(scenario.users[i].eta * user[i] / len(scenario.users[i].tasks)
                        for i in range(scenario.n_users))
        else:
            value = sum(user)
        best = min(best, value)
    return best


def small_params(rng: np.random.Generator) -> GenParams:
    """Random tiny configuration: |C| = |B| = 2, at most 6 tasks, sometimes tight."""
    n_users = int(rng.integers(1, 4))
    tpu = int(rng.integers(1, 7 // n_users + 1))
    tpu = max(1, min(tpu, 6 // n_users))
    factor = float(rng.choice([0.9, 1.0, 1.2, 2.0]))
    return GenParams(n_users=n_users, n_aps=2, n_ecss=2, tasks_per_user=tpu,
                     r_mean=float(rng.uniform(2, 10)), r_halfwidth=1.0,
                     alpha=(0.5, 1.5), beta=(0.5, 1.5), gamma=(0.5, 1.5), eta=(0.5, 2.0),
                     capacity="ample" if factor >= 1 else "starved",
                     capacity_factor=factor)


def random_equal_r(seed: int) -> Scenario:
    """Equal-demand instance with |C| <= 4, |B| <= 8 and at most 40 tasks; AP limits never bind."""
    rng = np.random.default_rng(seed)
    C = int(rng.integers(1, 5))
    B = int(rng.integers(1, 9))
    n_users = int(rng.integers(1, 9))
    tpu = int(rng.integers(1, max(2, 40 // n_users) + 1))
    tpu = min(tpu, 40 // n_users)
    params = GenParams(n_users=n_users, n_aps=B, n_ecss=C, tasks_per_user=tpu, equal_r=True,
                       capacity="starved", capacity_factor=float(rng.uniform(0.3, 1.5)),
                       ap_caps=n_users * tpu)
    return generate(params, seed)


def small_scenarios(count: int, seed: int = 12345):
    rng = np.random.default_rng(seed)
    for k in range(count):
        yield k, generate(small_params(rng), k)


finite = st.floats(min_value=0.0, max_value=10.0, allow_nan=False, allow_infinity=False)


@st.composite
def scenarios(draw, max_users=3, max_tasks=2, max_aps=2, max_ecss=2):
    B = draw(st.integers(1, max_aps))
    C = draw(st.integers(1, max_ecss))
    users = []
    for _ in range(draw(st.integers(1, max_users))):
        tasks = tuple(
            Task(draw(st.floats(0.5, 5.0)),
                 tuple(draw(finite) for _ in range(B)),
                 tuple(draw(finite) for _ in range(B)))
            for _ in range(draw(st.integers(1, max_tasks))))
        users.append(MobileUser(draw(st.floats(0.1, 2.0)), draw(st.floats(0.0, 2.0)),
                                draw(st.floats(0.0, 2.0)), draw(st.floats(0.5, 2.0)), tasks))
    aps = tuple(AccessPoint(draw(st.integers(0, 4))) for _ in range(B))
    ecss = tuple(EdgeServer(draw(st.floats(0.0, 12.0))) for _ in range(C))
    delta = tuple(tuple(draw(finite) for _ in range(C)) for _ in range(B))
    return Scenario(tuple(users), aps, ecss, delta)


@pytest.fixture
def small_system():
    """The desk-scale configuration of the evaluation (|C|=2, |B|=3, |A|=5, S=3)."""
    return GenParams()


ACCEPTANCE_LINES: list[str] = []


class Criterion:
    """Times one acceptance criterion and records a one-line verdict."""

    def __init__(self, number: int, title: str, limit_s: float):
        self.number, self.title, self.limit_s = number, title, limit_s
        self.detail = ""

    def __enter__(self):
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self._t0
        ok = exc_type is None and elapsed < self.limit_s
        verdict = "PASS" if ok else "FAIL"
        if exc_type is not None:
            detail = f"{exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        elif elapsed >= self.limit_s:
            detail = f"over time limit; {self.detail}"
        else:
            detail = self.detail
        ACCEPTANCE_LINES.append(
            f"[{verdict}] criterion {self.number:>2} {self.title}: {detail} "
            f"({elapsed:.1f}s, limit {self.limit_s:g}s)")
        if exc_type is None and not ok:
            raise AssertionError(f"criterion {self.number} took {elapsed:.1f}s "
                                 f"(limit {self.limit_s:g}s)")
        return False


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
