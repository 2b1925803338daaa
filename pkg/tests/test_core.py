import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubnet import CapacityLevel, Instance, SegmentSchedule, Solution, check_feasible, evaluate, interhub_flows, kleinrock_cost, segment_cost, validate_instance
from hubnet.core import FEASIBLE, hub_loads
from hubnet.errors import CapacitySaturated, EvaluationInfeasible, FlowExceedsSegments, ValidationError

from helpers import random_instance, random_solution, reference_cost

TWO_SEGMENTS = SegmentSchedule.from_upper([500, 800], [0.108, 0.056], [72, 126])


def test_three_levels_accepted(inst_t1):
    levels = tuple(CapacityLevel.uniform(q, f, 2) for q, f in [(10000, 12.5), (15000, 12.5), (20000, 10)])
    inst = replace(inst_t1, levels=levels)
    assert validate_instance(inst) is inst


def test_equal_capacities_rejected(inst_t1):
    inst = replace(inst_t1, levels=(CapacityLevel.uniform(5, 1, 2), CapacityLevel.uniform(5, 2, 2)))
    with pytest.raises(ValidationError) as err:
        validate_instance(inst)
    assert "NonMonotoneLevels" in err.value.codes


def test_segment_gap_rejected(inst_t1):
    gap = SegmentSchedule((500, 800), (0.108, 0.056), (0, 80), (72, 126))
    with pytest.raises(ValidationError) as err:
        validate_instance(replace(inst_t1, segments=gap))
    assert "NonCoveringSegments" in err.value.codes


def test_every_violation_is_reported(inst_t1):
    w = inst_t1.flows.copy()
    w[0, 1] = -1
    bad = replace(
        inst_t1,
        flows=w,
        levels=(CapacityLevel.uniform(5, 1, 2), CapacityLevel.uniform(5, 2, 2)),
        segments=SegmentSchedule((1, 0), (1, 2), (0, 5), (5, 10)),
    )
    with pytest.raises(ValidationError) as err:
        validate_instance(bad)
    assert {"NegativeEntry", "NonMonotoneLevels", "NonMonotoneSegments"} <= err.value.codes
    assert any("flows" in v.field for v in err.value.violations)


def test_empty_hub_set_rejected(inst_t1):
    bad = replace(inst_t1, hub_candidates=(), access_cost=np.zeros((3, 0)), hub_distance=np.zeros((0, 0)), congestion_factor=np.zeros(0), levels=(CapacityLevel(100, ()),))
    with pytest.raises(ValidationError) as err:
        validate_instance(bad)
    assert "EmptyHubSet" in err.value.codes


def test_interhub_flows_single_hub_is_zero(inst_t1):
    v = interhub_flows(inst_t1, Solution((0, 0, 0), {0: 0}))
    assert not v.any()


def test_interhub_flows_two_hubs(inst_t1):
    # nodes 0 and 2 on hub 0, node 1 on hub 1
    v = interhub_flows(inst_t1, Solution((0, 1, 0), {0: 0, 1: 0}))
    w = inst_t1.flows
    assert v[0, 1] == w[0, 1] + w[2, 1]
    assert v[1, 0] == w[1, 0] + w[1, 2]
    assert v[0, 0] == v[1, 1] == 0


def test_interhub_flows_symmetric():
    inst = random_instance(3, n=6, h=3)
    w = inst.flows + inst.flows.T
    sym = replace(inst, flows=w)
    H = sym.hub_candidates
    sol = Solution(tuple(H[i % len(H)] if i not in H else i for i in range(6)), {k: 0 for k in H})
    v = interhub_flows(sym, sol)
    assert np.array_equal(v, v.T)


def test_kleinrock_examples():
    assert kleinrock_cost(0, 10000, 1) == 0
    assert kleinrock_cost(5000, 10000, 2) == 2
    with pytest.raises(CapacitySaturated):
        kleinrock_cost(10000, 10000, 1)


@given(st.floats(1e-3, 1e6), st.floats(0, 100), st.lists(st.floats(0, 0.999), min_size=3, max_size=3))
def test_kleinrock_increasing_and_convex(q, g, fracs):
    a, b, c = sorted(f * q for f in fracs)
    fa, fb, fc = (kleinrock_cost(x, q, g) for x in (a, b, c))
    assert fa <= fb + 1e-12 <= fc + 2e-12
    if g >= 1e-3 and c - a > 1e-6 * q:
        assert fa < fc
    mid = kleinrock_cost((a + c) / 2, q, g)
    assert mid <= (fa + fc) / 2 + 1e-9 * max(1.0, fc)


def test_segment_cost_examples():
    s, cost = segment_cost(50, TWO_SEGMENTS, 1)
    assert s == 0 and cost == pytest.approx(505.4, abs=1e-9)
    s, cost = segment_cost(126, TWO_SEGMENTS, 1)
    assert s == 1 and cost == pytest.approx(807.056, abs=1e-9)
    assert segment_cost(0, TWO_SEGMENTS, 10) == (0, 5000.0)
    with pytest.raises(FlowExceedsSegments):
        segment_cost(200, TWO_SEGMENTS, 1)


def test_segment_boundary_prefers_lower_index():
    sch = SegmentSchedule.from_upper([1, 1], [1, 1], [5, 10])
    assert segment_cost(5, sch, 1)[0] == 0


@settings(max_examples=60)
@given(st.integers(0, 2**31 - 1))
def test_segment_cost_matches_free_minimum_where_attained(seed):
    rng = np.random.default_rng(seed)
    size = int(rng.integers(1, 4))
    beta = np.cumsum(rng.uniform(0, 5, size))
    alpha = np.sort(rng.uniform(0.01, 2, size))[::-1]
    sch = SegmentSchedule.from_upper(beta, alpha, np.cumsum(rng.uniform(5, 40, size)))
    agreed = 0
    for v in np.linspace(0, sch.max_flow, 301):
        s, cost = segment_cost(v, sch, 1.0)
        free = [b + a * v for b, a in zip(sch.beta, sch.alpha)]
        best = int(np.argmin(free))
        assert cost >= free[best] - 1e-12
        if sch.lower[best] <= v <= sch.upper[best]:
            assert cost == pytest.approx(free[best], rel=1e-12, abs=1e-12)
            agreed += 1
    assert agreed > 0


def test_continuous_concave_schedule_matches_free_minimum():
    # crossings placed exactly on the interval boundaries
    alpha = [2.0, 1.0, 0.25]
    upper = [10.0, 30.0, 100.0]
    beta = [0.0, 10.0, 10.0 + 0.75 * 30.0]
    sch = SegmentSchedule.from_upper(beta, alpha, upper)
    for v in np.linspace(0, 100, 1001):
        free = min(b + a * v for b, a in zip(beta, alpha))
        assert segment_cost(v, sch, 1.0)[1] == pytest.approx(free, rel=1e-12, abs=1e-12)


def test_check_feasible_verdicts(inst_t1):
    assert check_feasible(inst_t1, Solution((0, 0, 0), {0: 0})) == FEASIBLE
    closed = check_feasible(inst_t1, Solution((0, 1, 0), {0: 0}))
    assert not closed and "hub-existence" in closed.constraints
    tight = replace(inst_t1, levels=(CapacityLevel.uniform(20, 50, 2),))
    verdict = check_feasible(tight, Solution((0, 0, 0), {0: 0}))
    assert not verdict and "strict-capacity" in verdict.constraints


def test_evaluate_t1_examples(inst_t1):
    bd = evaluate(inst_t1, Solution((0, 0, 0), {0: 0}))
    assert bd.total == pytest.approx(61.25, abs=1e-12)
    assert (bd.fixed_open, bd.congestion, bd.access) == (50, 0.25, 11)
    assert bd.interhub_fixed == bd.interhub_variable == 0
    bd2 = evaluate(inst_t1, Solution((0, 1, 0), {0: 0, 1: 0}))
    by_hand = 100 + (15 / 85 + 5 / 95) + 3 + 2 * (10 + 6) + 2 * (10 + 5)
    assert bd2.total == pytest.approx(by_hand, abs=1e-12)
    assert round(bd2.total, 3) == 165.229


def test_evaluate_rejects_infeasible(inst_t1):
    with pytest.raises(EvaluationInfeasible):
        evaluate(inst_t1, Solution((0, 1, 0), {0: 0}))


def test_zero_flow_pairs_pay_fixed_segment_cost(inst_t1):
    empty = replace(inst_t1, flows=np.zeros((3, 3)))
    bd = evaluate(empty, Solution((0, 1, 1), {0: 0, 1: 0}))
    assert bd.interhub_fixed == 2 * 2 * 10
    assert bd.interhub_variable == 0


def test_diagonal_flow_counts_in_origin_load(inst_t1):
    w = inst_t1.flows.copy()
    w[2, 2] = 7
    inst = replace(inst_t1, flows=w)
    assert inst.origin_flow[2] == 12
    assert hub_loads(inst, Solution((0, 0, 0), {0: 0}))[0] == 27
    assert inst.with_zero_diagonal().origin_flow[2] == 5


def test_breakdown_total_matches_reference_route():
    rng = np.random.default_rng(11)
    checked = 0
    for seed in range(40):
        inst = random_instance(seed, overrides=True)
        for _ in range(5):
            sol = random_solution(inst, rng)
            ref = reference_cost(inst, sol)
            if ref is None:
                with pytest.raises(EvaluationInfeasible):
                    evaluate(inst, sol)
                continue
            bd = evaluate(inst, sol)
            assert bd.total == pytest.approx(ref, rel=1e-12, abs=1e-9)
            assert min(bd.as_dict().values()) >= 0
            checked += 1
    assert checked > 50


def _permuted(inst: Instance, perm: np.ndarray) -> Instance:
    inv = np.argsort(perm)
    H = [int(inv[k]) for k in inst.hub_candidates]
    order = np.argsort(H)
    return Instance(
        flows=inst.flows[np.ix_(perm, perm)],
        hub_candidates=tuple(sorted(H)),
        access_cost=inst.access_cost[perm][:, order],
        hub_distance=inst.hub_distance[np.ix_(order, order)],
        levels=tuple(CapacityLevel(l.capacity, tuple(np.array(l.fixed_cost)[order])) for l in inst.levels),
        segments=inst.segments,
        congestion_factor=inst.congestion_factor[order],
    )


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_evaluate_is_permutation_invariant(seed, pseed):
    inst = random_instance(seed, n=7, h=3)
    rng = np.random.default_rng(pseed)
    sol = random_solution(inst, rng)
    perm = rng.permutation(inst.node_count)
    inv = np.argsort(perm)
    moved = _permuted(inst, perm)
    sol2 = Solution(tuple(int(inv[sol.assignment[p]]) for p in perm), {int(inv[k]): l for k, l in sol.hub_level.items()})
    try:
        a = evaluate(inst, sol).total
    except EvaluationInfeasible:
        with pytest.raises(EvaluationInfeasible):
            evaluate(moved, sol2)
        return
    assert evaluate(moved, sol2).total == pytest.approx(a, rel=1e-12, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 3))
def test_homogeneous_reduction(seed, alpha):
    from hubnet.instgen import homogenize

    inst = homogenize(random_instance(seed, n=6, h=3), alpha)
    sol = random_solution(inst, np.random.default_rng(seed))
    try:
        bd = evaluate(inst, sol)
    except EvaluationInfeasible:
        return
    v = interhub_flows(inst, sol)
    pos = [inst.hub_position[k] for k in sol.open_hubs]
    dv = sum(inst.hub_distance[a, b] * v[a, b] for a in pos for b in pos if a != b)
    assert bd.interhub_fixed == 0
    assert bd.interhub_variable == pytest.approx(alpha * dv, rel=1e-12, abs=1e-12)


def test_instance_is_immutable(inst_t1):
    with pytest.raises(ValueError):
        inst_t1.flows[0, 0] = 1
    assert math.isclose(inst_t1.total_flow, 20)
