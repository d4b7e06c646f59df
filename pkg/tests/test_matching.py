import io
import json
import math

import pytest

from conftest import random_equal_r
from edgeoffload.fixtures import EXAMPLE3_ARRIVALS, example3
from edgeoffload.greedy import cga
from edgeoffload.matching import (Proposal, adma, equal_demand, find_blocking_pairs, is_stable,
                                  ocpr_select, reduced_strategies, run_adma)
from edgeoffload.model import (AccessPoint, Assignment, EdgeServer, MobileUser, Scenario, Task,
                               validate_assignment)
from edgeoffload.scenario import GenParams, generate


def prop(user, u, r, ecs=0):
    return Proposal((user, 0), ecs, 0, float(u), float(r))


class TestOCPR:
    def test_example3_server2(self):
        asking = [prop(1, 2, 2), prop(2, 3, 10), prop(3, 4, 3), prop(4, 5, 1)]
        acc, rej = ocpr_select(12.0, asking)
        assert {p.task[0] for p in acc} == {1, 2}
        assert {p.task[0] for p in rej} == {3, 4}

    def test_example3_server1(self):
        acc, rej = ocpr_select(10.0, [prop(0, 1, 1), prop(2, 3, 10)])
        assert [p.task[0] for p in rej] == [2]

    def test_all_fit(self):
        asking = [prop(k, k, 1) for k in range(4)]
        acc, rej = ocpr_select(4.0, asking, slots=4)
        assert len(acc) == 4 and rej == []

    def test_slots_take_cheapest(self):
        asking = [prop(k, 10 - k, 1) for k in range(5)]
        acc, rej = ocpr_select(2.0, asking, slots=2)
        assert sorted(p.task[0] for p in acc) == [3, 4]

    def test_ties_go_to_lower_task_id(self):
        acc, _ = ocpr_select(1.0, [prop(2, 1, 1), prop(1, 1, 1)], slots=1)
        assert acc[0].task == (1, 0)

    def test_prefix_stops_at_first_overflow(self):
        # the cheap r=1 entry after the overflow is still rejected
        acc, rej = ocpr_select(5.0, [prop(0, 1, 4), prop(1, 2, 3), prop(2, 3, 1)])
        assert [p.task[0] for p in acc] == [0]
        assert {p.task[0] for p in rej} == {1, 2}


class TestReducedStrategies:
    def test_one_entry_per_server(self):
        s = generate(GenParams(n_aps=3, n_ecss=2), 0)
        assert len(reduced_strategies(s, (0, 0))) == 2

    def test_entry_is_cheapest_ap(self):
        s = generate(GenParams(n_aps=4, n_ecss=3), 1)
        for tid in s.task_ids:
            k = s.task_index[tid]
            for st in reduced_strategies(s, tid):
                assert st.u == pytest.approx(s.cost_tensor[k, :, st.ecs].min())
                assert st.u == pytest.approx(s.cost_tensor[k, st.ap, st.ecs])

    def test_all_rejected(self):
        s = generate(GenParams(), 0)
        assert reduced_strategies(s, (0, 0), rejected={0, 1}) == []

    def test_too_small_server_left_out(self):
        s = example3()
        assert [st.ecs for st in reduced_strategies(s, (2, 0))] == [0, 1]
        assert [st.ecs for st in reduced_strategies(s, (3, 0))] == [1]


class TestExample3:
    def test_final_matching(self):
        a, rep = adma(example3(), arrivals=EXAMPLE3_ARRIVALS)
        assert a.by_ecs() == {0: [(0, 0)], 1: [(1, 0), (5, 0)]}
        assert rep.stable is False
        assert "unstable-possible" in rep.flags

    def test_blocking_pairs(self):
        s = example3()
        a, _ = adma(s, arrivals=EXAMPLE3_ARRIVALS)
        assert set(find_blocking_pairs(s, a)) == {((3, 0), 1), ((4, 0), 1)}
        assert not is_stable(s, a)

    def test_narrated_evictions(self):
        run = run_adma(example3(), arrivals=EXAMPLE3_ARRIVALS)
        rejects = [(tuple(m["task"]), m["ecs"]) for m in run.trace if m["kind"] == "reject"]
        assert ((2, 0), 0) in rejects  # r=10 bounced by the first server
        assert ((3, 0), 1) in rejects and ((4, 0), 1) in rejects
        assert rejects[-1] == ((2, 0), 1)  # the late arrival evicts the big task

    def test_order_independent_outcome(self):
        outcomes = {tuple(sorted(adma(example3(), seed=k, arrivals=EXAMPLE3_ARRIVALS)[0]
                                 .paths.items())) for k in range(6)}
        assert len(outcomes) == 1

    def test_trace_written_as_json_lines(self):
        sink = io.StringIO()
        adma(example3(), arrivals=EXAMPLE3_ARRIVALS, trace_sink=sink)
        records = [json.loads(line) for line in sink.getvalue().splitlines()]
        assert records and all(set(r) == {"round", "kind", "task", "ecs", "ap", "u"} for r in records)
        assert {r["kind"] for r in records} == {"propose", "reject"}


class TestADMA:
    def test_ample_capacity_equals_cga(self):
        for seed in range(15):
            s = generate(GenParams(equal_r=True, capacity_factor=100.0, ap_caps=100), seed)
            a, rep = adma(s, seed=seed)
            assert a.paths == cga(s)[0].paths
            assert rep.messages == s.n_tasks  # one proposal each, no rejections

    def test_equal_r_stable_and_bounded(self):
        for seed in range(60):
            s = random_equal_r(seed)
            run = run_adma(s, seed=seed)
            a = run.state.assignment()
            assert find_blocking_pairs(s, a) == []
            assert run.n_proposals <= s.n_tasks * s.n_ecss
            assert run.rounds <= s.n_tasks * s.n_ecss

    def test_held_never_exceeds_slots(self):
        for seed in range(20):
            s = random_equal_r(seed)
            run = run_adma(s, seed=seed)
            r = s.demand[0]
            for n, held in run.state.held.items():
                assert len(held) <= math.floor(s.ecs_caps[n] / r + 1e-9)

    def test_no_reproposal_after_rejection(self):
        for seed in range(20):
            run = run_adma(random_equal_r(seed), seed=seed)
            for task, props in run.state.proposals.items():
                targets = [p.ecs for p in props]
                assert len(targets) == len(set(targets))

    def test_proposal_costs_nondecreasing(self):
        for seed in range(20):
            run = run_adma(random_equal_r(seed), seed=seed)
            for props in run.state.proposals.values():
                costs = [p.u for p in props]
                assert costs == sorted(costs)

    def test_ignores_ap_caps_only(self):
        for seed in range(20):
            s = random_equal_r(seed)
            a, _ = adma(s, seed=seed)
            kinds = {v.kind for v in validate_assignment(s, a)}
            assert kinds <= {"unassigned", "ap-capacity"}

    def test_order_independent_for_equal_r(self):
        for seed in range(20):
            s = random_equal_r(seed)
            ref = adma(s, seed=0)[0].paths
            for k in range(1, 5):
                assert adma(s, seed=k)[0].paths == ref

    def test_equal_demand_detection(self):
        assert equal_demand(generate(GenParams(equal_r=True), 0))
        assert not equal_demand(generate(GenParams(), 0))


class TestBlockingPairs:
    def test_single_task_unique_server(self):
        user = MobileUser(1, 1, 1, 1, (Task(1.0, (1.0,), (1.0,)),))
        s = Scenario((user,), (AccessPoint(1),), (EdgeServer(1.0),), ((1.0,),))
        a = Assignment()
        a.assign((0, 0), 0, 0)
        assert find_blocking_pairs(s, a) == [] and is_stable(s, a)

    def test_unassigned_task_with_room_blocks(self):
        user = MobileUser(1, 1, 1, 1, (Task(1.0, (1.0,), (1.0,)),))
        s = Scenario((user,), (AccessPoint(1),), (EdgeServer(1.0),), ((1.0,),))
        assert find_blocking_pairs(s, Assignment()) == [((0, 0), 0)]

    def test_full_server_with_cheaper_outsider(self):
        tasks = (Task(1.0, (1.0,), (0.0,)), Task(1.0, (2.0,), (0.0,)))
        user = MobileUser(1, 1, 1, 1, tasks)
        s = Scenario((user,), (AccessPoint(5),), (EdgeServer(1.0), EdgeServer(1.0)),
                     ((0.0, 5.0),))
        a = Assignment()
        a.assign((0, 1), 0, 0)  # the dearer task holds server 0
        a.assign((0, 0), 0, 1)
        assert find_blocking_pairs(s, a) == [((0, 0), 0)]
