"""Distributed many-to-one matching of tasks to ECSs (ADMA) and stability audits.

Tasks propose; ECSs hold proposals tentatively and rank them by declared
offloading cost (cheapest first, lower task id on ties). A task proposes
to its cheapest ECS it has not been rejected by, always through the AP that
is cheapest for that ECS, so its strategy set has at most one entry per
ECS. AP connection limits are not modelled here.

Message delivery is simulated in rounds. Within a round, proposals reach
their ECSs one at a time in a seeded random order. When every task has
the same demand, the final matching does not depend on that order and is
stable. With heterogeneous demands it may be neither.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .metrics import RunReport, make_report
from .model import Assignment, Scenario, TaskId, fits, path_cost


class Proposal(NamedTuple):
    task: TaskId
    ecs: int
    ap: int
    u: float
    r: float


class Strategy(NamedTuple):
    ecs: int
    ap: int
    u: float


def _rank_key(p: Proposal):
    return (p.u, p.task)


def ocpr_select(cap: float, asking: Sequence[Proposal], slots: int | None = None
                ) -> tuple[list[Proposal], list[Proposal]]:
    """Split an ECS's asking set into accepted and rejected proposals.

    Proposals are ranked by ascending cost. With ``slots`` (equal-demand
    mode) the first ``slots`` are accepted. Otherwise the longest ranked
    prefix whose total demand fits ``cap`` is accepted and everything after
    the first overflow is rejected.
    """
    ranked = sorted(asking, key=_rank_key)
    if slots is not None:
        return ranked[:slots], ranked[slots:]
    used = 0.0
    for z, p in enumerate(ranked):
        if not fits(used + p.r, cap):
            return ranked[:z], ranked[z:]
        used += p.r
    return ranked, []


def reduced_strategies(scenario: Scenario, task: TaskId, rejected=()) -> list[Strategy]:
    """One (ECS, cheapest AP, cost) entry per ECS still open to the task.

    An ECS is open if it has not rejected the task, its nominal capacity can
    host the task, and some AP reaches it at finite cost.
    """
    k = scenario.task_index[tuple(task)]
    r = scenario.demand[k]
    costs = scenario.cost_tensor[k]
    out = []
    for n in range(scenario.n_ecss):
        if n in rejected or not fits(r, scenario.ecs_caps[n]):
            continue
        m = int(np.argmin(costs[:, n]))
        if math.isfinite(costs[m, n]):
            out.append(Strategy(n, m, float(costs[m, n])))
    return out


def equal_demand(scenario: Scenario) -> bool:
    d = scenario.demand
    return d.size == 0 or bool(np.allclose(d, d[0], rtol=1e-12, atol=0.0))


@dataclass
class MatchState:
    rejected: dict[TaskId, set[int]]
    held: dict[int, list[Proposal]]
    exhausted: set[TaskId] = field(default_factory=set)
    proposals: dict[TaskId, list[Proposal]] = field(default_factory=dict)

    def match_of(self, task: TaskId) -> Proposal | None:
        for props in self.held.values():
            for p in props:
                if p.task == task:
                    return p
        return None

    def assignment(self) -> Assignment:
        out = Assignment()
        for props in self.held.values():
            for p in props:
                out.assign(p.task, p.ap, p.ecs)
        return out


@dataclass
class MatchRun:
    state: MatchState
    rounds: int
    n_proposals: int
    n_rejections: int
    equal_r: bool
    trace: list[dict]


def run_adma(scenario: Scenario, seed: int | None = 0,
             arrivals: Mapping[TaskId, int] | None = None) -> MatchRun:
    """Simulate the proposal/rejection rounds.

    ``arrivals`` optionally delays a task's first proposal until the given
    round (0-based); tasks not listed are present from round 0.
    """
    rng = np.random.default_rng(seed)
    equal_r = equal_demand(scenario)
    slots = None
    if equal_r and scenario.n_tasks:
        r = scenario.demand[0]
        slots = [int(math.floor(c / r + 1e-9)) for c in scenario.ecs_caps]
    arrivals = {tuple(k): int(v) for k, v in (arrivals or {}).items()}
    state = MatchState(rejected={t: set() for t in scenario.task_ids},
                       held={n: [] for n in range(scenario.n_ecss)},
                       proposals={t: [] for t in scenario.task_ids})
    matched: set[TaskId] = set()
    trace: list[dict] = []
    n_prop = n_rej = 0
    rounds = 0
    clock = 0
    while True:
        waiting = [t for t in scenario.task_ids
                   if t not in matched and t not in state.exhausted]
        ready = [t for t in waiting if arrivals.get(t, 0) <= clock]
        if not ready:
            later = [arrivals[t] for t in waiting if arrivals.get(t, 0) > clock]
            if not later:
                break
            clock = min(later)
            continue
        batch = []
        for t in ready:
            options = reduced_strategies(scenario, t, state.rejected[t])
            if not options:
                state.exhausted.add(t)
                continue
            best = min(options, key=lambda s: (s.u, s.ecs))
            p = Proposal(t, best.ecs, best.ap, best.u, float(scenario.task(t).r))
            batch.append(p)
        if batch:
            rounds += 1
        for idx in rng.permutation(len(batch)):
            p = batch[idx]
            n_prop += 1
            state.proposals[p.task].append(p)
            trace.append({"round": clock, "kind": "propose", "task": list(p.task),
                          "ecs": p.ecs, "ap": p.ap, "u": p.u})
            accepted, rejected = ocpr_select(
                scenario.ecs_caps[p.ecs], state.held[p.ecs] + [p],
                None if slots is None else slots[p.ecs])
            state.held[p.ecs] = accepted
            matched.update(a.task for a in accepted)
            for q in rejected:
                n_rej += 1
                matched.discard(q.task)
                state.rejected[q.task].add(q.ecs)
                trace.append({"round": clock, "kind": "reject", "task": list(q.task),
                              "ecs": q.ecs, "ap": q.ap, "u": q.u})
        clock += 1
    return MatchRun(state, rounds, n_prop, n_rej, equal_r, trace)


def adma(scenario: Scenario, seed: int | None = 0,
         arrivals: Mapping[TaskId, int] | None = None,
         trace_sink=None) -> tuple[Assignment, RunReport]:
    """Run the matching and report; optionally write the message trace as JSON lines."""
    run = run_adma(scenario, seed, arrivals)
    assignment = run.state.assignment()
    if trace_sink is not None:
        lines = "".join(json.dumps(rec) + "\n" for rec in run.trace)
        if hasattr(trace_sink, "write"):
            trace_sink.write(lines)
        else:
            with open(trace_sink, "w") as fh:
                fh.write(lines)
    flags = [] if run.equal_r else ["unstable-possible"]
    report = make_report("adma", scenario, assignment, iterations=run.rounds,
                         rounds=run.rounds, messages=run.n_proposals + run.n_rejections,
                         stable=is_stable(scenario, assignment), seed=seed, flags=flags)
    return assignment, report


def find_blocking_pairs(scenario: Scenario, assignment: Assignment) -> list[tuple[TaskId, int]]:
    """All (task, ECS) pairs that would rather be matched to each other.

    A task prefers an ECS when its cheapest path there is strictly cheaper
    than its current path (any reachable ECS beats being unassigned). The
    ECS is willing if the task's demand fits next to what it already hosts,
    or if the task is strictly cheaper than the most expensive task it hosts.
    """
    current = {}
    load = np.zeros(scenario.n_ecss)
    worst = np.full(scenario.n_ecss, -math.inf)
    for tid, p in assignment.paths.items():
        c = path_cost(scenario, tid, p.ap, p.ecs).total
        current[tid] = (p.ecs, c)
        load[p.ecs] += scenario.task(tid).r
        worst[p.ecs] = max(worst[p.ecs], c)
    best_to = scenario.cost_tensor.min(axis=1)  # (K, C), AP limits ignored
    out = []
    for k, tid in enumerate(scenario.task_ids):
        r = scenario.demand[k]
        mine, cost_now = current.get(tid, (None, math.inf))
        for n in range(scenario.n_ecss):
            cost = best_to[k, n]
            if n == mine or not math.isfinite(cost) or not cost < cost_now:
                continue
            if not fits(r, scenario.ecs_caps[n]):
                continue
            if fits(load[n] + r, scenario.ecs_caps[n]) or cost < worst[n]:
                out.append((tid, n))
    return out


def is_stable(scenario: Scenario, assignment: Assignment) -> bool:
    return not find_blocking_pairs(scenario, assignment)
