"""Greedy construction followed by first-improvement local search."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass

import numpy as np

from ..core import TOL, CostBreakdown, Instance, Solution, evaluate, interhub_cost, kleinrock_cost, price
from ..errors import CapacitySaturated, FlowExceedsSegments, NoFeasibleSolution

log = logging.getLogger(__name__)

RECHECK_EVERY = 1000
PACK_LIMIT = 100_000
_MOVES = ("reassign", "swap", "open", "close", "level")


@dataclass
class _State:
    """A priced design in candidate positions, with cached loads and arc flows."""

    assign: np.ndarray  # node -> candidate position
    levels: dict[int, int]  # open position -> level
    u: np.ndarray
    v: np.ndarray
    breakdown: CostBreakdown

    @property
    def total(self) -> float:
        return self.breakdown.total

    def solution(self, inst: Instance) -> Solution:
        H = inst.hub_candidates
        return Solution(tuple(H[a] for a in self.assign), {H[a]: l for a, l in self.levels.items()})


def _price_state(inst: Instance, assign: np.ndarray, levels: dict[int, int]) -> _State | None:
    try:
        bd = price(inst, assign, levels)
    except (CapacitySaturated, FlowExceedsSegments):
        return None
    u = np.bincount(assign, weights=inst.origin_flow, minlength=inst.hub_count)
    x = np.zeros((inst.node_count, inst.hub_count))
    x[np.arange(inst.node_count), assign] = 1.0
    v = x.T @ inst.flows @ x
    np.fill_diagonal(v, 0.0)
    return _State(assign, dict(levels), u, v, bd)


def _reassigned(inst: Instance, st: _State, i: int, b: int) -> _State | None:
    """Move spoke ``i`` to open position ``b`` using cached deltas of u and v."""
    a = int(st.assign[i])
    O = inst.origin_flow
    q = inst.capacities
    if not st.u[b] + O[i] < q[st.levels[b]]:
        return None
    w = inst.flows
    out = np.bincount(st.assign, weights=w[i], minlength=inst.hub_count)
    inn = np.bincount(st.assign, weights=w[:, i], minlength=inst.hub_count)
    out[a] -= w[i, i]
    inn[a] -= w[i, i]
    v = st.v.copy()
    v[a, :] -= out
    v[b, :] += out
    v[:, a] -= inn
    v[:, b] += inn
    # flows between i and nodes at its new hub are now internal to b
    v[b, b] = 0.0
    v[a, a] = 0.0
    u = st.u.copy()
    u[a] -= O[i]
    u[b] += O[i]
    g = inst.congestion_factor
    try:
        cong = st.breakdown.congestion
        for h in (a, b):
            cap = float(q[st.levels[h]])
            cong += kleinrock_cost(float(u[h]), cap, float(g[h])) - kleinrock_cost(float(st.u[h]), cap, float(g[h]))
        ih_fixed, ih_var = interhub_cost(inst, v, sorted(st.levels))
    except (CapacitySaturated, FlowExceedsSegments):
        return None
    c = inst.access_cost
    bd = CostBreakdown(
        st.breakdown.fixed_open,
        cong,
        st.breakdown.access + float(c[i, b] - c[i, a]),
        ih_fixed,
        ih_var,
    )
    assign = st.assign.copy()
    assign[i] = b
    return _State(assign, st.levels, u, v, bd)


def _repair_assign(inst: Instance, assign: np.ndarray, levels: dict[int, int], nodes, pack: bool = False) -> np.ndarray | None:
    """Send ``nodes`` to their cheapest open hub with spare strict capacity.

    With ``pack``, a bounded backtracking search takes over when the
    cheapest-first pass gets stuck on a tight packing.
    """
    O = inst.origin_flow
    q = inst.capacities
    c = inst.access_cost
    assign = assign.copy()
    for i in nodes:
        assign[i] = -1
    placed = assign >= 0
    u0 = np.bincount(assign[placed], weights=O[placed], minlength=inst.hub_count)
    u = u0.copy()
    open_pos = sorted(levels)
    order = sorted(nodes, key=lambda i: (-O[i], i))
    out = assign.copy()
    for i in order:
        choices = [b for b in open_pos if u[b] + O[i] < q[levels[b]]]
        if not choices:
            return _pack(inst, assign, levels, order, u0) if pack else None
        b = min(choices, key=lambda b: (c[i, b], b))
        out[i] = b
        u[b] += O[i]
    return out


def _pack(inst, assign, levels, order, u, limit: int = PACK_LIMIT) -> np.ndarray | None:
    O = inst.origin_flow
    q = inst.capacities
    c = inst.access_cost
    open_pos = sorted(levels)
    out = assign.copy()
    budget = [limit]

    def place(depth):
        if depth == len(order):
            return True
        budget[0] -= 1
        if budget[0] < 0:
            return False
        i = order[depth]
        for b in sorted(open_pos, key=lambda b: (c[i, b], b)):
            if u[b] + O[i] < q[levels[b]]:
                u[b] += O[i]
                out[i] = b
                if place(depth + 1):
                    return True
                u[b] -= O[i]
        return False

    return out if place(0) else None


def greedy(inst: Instance) -> _State:
    O = inst.origin_flow
    total = float(O.sum())
    q = inst.capacities
    top = inst.level_count - 1
    Q = float(q[top])
    h = inst.hub_count
    if h * Q <= total or (O >= Q).any():
        raise NoFeasibleSolution("even every candidate open at the largest level cannot host the origin flow")
    H = inst.hub_candidates
    c = inst.access_cost
    cheapest = np.argmin(c, axis=1)
    coverage = np.bincount(cheapest, weights=O, minlength=h)
    f_top = inst.fixed_costs[:, top]
    score = [coverage[a] / f_top[a] if f_top[a] > 0 else (np.inf if coverage[a] > 0 else 0.0) for a in range(h)]
    order = sorted(range(h), key=lambda a: (-score[a], a))

    hub_nodes = set()
    levels: dict[int, int] = {}
    cap = 0.0
    for a in order:
        levels[a] = top
        hub_nodes.add(H[a])
        cap += Q
        if cap <= total:
            continue
        assign = np.full(inst.node_count, -1, dtype=np.intp)
        for b in levels:
            assign[H[b]] = b
        spokes = [i for i in range(inst.node_count) if i not in hub_nodes]
        filled = _repair_assign(inst, assign, levels, spokes, pack=True)
        if filled is None:
            continue
        st = _price_state(inst, filled, levels)
        if st is not None:
            return st
    # segment caps or packing defeated the multi-hub build; fall back to one hub
    for a in order:
        st = _price_state(inst, np.full(inst.node_count, a, dtype=np.intp), {a: top})
        if st is not None:
            return st
    raise NoFeasibleSolution("greedy construction found no feasible design")


def _neighbours(inst: Instance, st: _State, kind: str, rng: random.Random):
    """Yield candidate states of one move type in a seeded order."""
    H = inst.hub_candidates
    n = inst.node_count
    open_pos = sorted(st.levels)
    hub_nodes = {H[a] for a in open_pos}
    spokes = [i for i in range(n) if i not in hub_nodes]
    if kind == "reassign":
        moves = [(i, b) for i in spokes for b in open_pos if b != st.assign[i]]
        rng.shuffle(moves)
        for i, b in moves:
            yield _reassigned(inst, st, i, b)
    elif kind == "swap":
        moves = [(i, j) for x, i in enumerate(spokes) for j in spokes[x + 1 :] if st.assign[i] != st.assign[j]]
        rng.shuffle(moves)
        for i, j in moves:
            a, b = int(st.assign[i]), int(st.assign[j])
            first = _reassigned(inst, st, i, b)
            yield None if first is None else _reassigned(inst, first, j, a)
    elif kind == "open":
        moves = [(a, l) for a in range(inst.hub_count) if a not in st.levels for l in range(inst.level_count)]
        rng.shuffle(moves)
        for a, l in moves:
            levels = dict(st.levels)
            levels[a] = l
            assign = st.assign.copy()
            assign[H[a]] = a
            yield _price_state(inst, assign, levels)
            # second variant: spokes whose cheapest access is the new hub follow it
            movers = [i for i in spokes if i != H[a] and np.argmin(inst.access_cost[i, sorted(levels)]) == sorted(levels).index(a)]
            if movers:
                filled = _repair_assign(inst, assign, levels, movers)
                yield None if filled is None else _price_state(inst, filled, levels)
    elif kind == "close":
        # closing may hand the freed level to a closed candidate in the same step
        closed = [b for b in range(inst.hub_count) if b not in st.levels]
        moves = [(a, None) for a in open_pos if len(open_pos) > 1] + [(a, b) for a in open_pos for b in closed]
        rng.shuffle(moves)
        for a, b in moves:
            levels = {x: l for x, l in st.levels.items() if x != a}
            members = [i for i in range(n) if st.assign[i] == a]
            assign = st.assign
            if b is not None:
                levels[b] = st.levels[a]
                assign = assign.copy()
                assign[H[b]] = b
                members = [i for i in members if i != H[b]]
            filled = _repair_assign(inst, assign, levels, members)
            yield None if filled is None else _price_state(inst, filled, levels)
    elif kind == "level":
        moves = [(a, l) for a in open_pos for l in range(inst.level_count) if l != st.levels[a]]
        rng.shuffle(moves)
        for a, l in moves:
            levels = dict(st.levels)
            levels[a] = l
            yield _price_state(inst, st.assign, levels)


def _improves(new: float, cur: float) -> bool:
    return new < cur - TOL * max(1.0, abs(cur))


def local_search(inst: Instance, st: _State, rng: random.Random, iterations: int, trace: list | None = None) -> _State:
    accepted = 0
    while accepted < iterations:
        kinds = list(_MOVES)
        rng.shuffle(kinds)
        found = None
        for kind in kinds:
            for cand in _neighbours(inst, st, kind, rng):
                if cand is not None and _improves(cand.total, st.total):
                    found = cand
                    break
            if found is not None:
                break
        if found is None:
            break
        st = found
        accepted += 1
        if trace is not None:
            trace.append(st.total)
        if accepted % RECHECK_EVERY == 0:
            exact = evaluate(inst, st.solution(inst)).total
            if abs(exact - st.total) > 1e-6 * max(1.0, abs(exact)):
                raise RuntimeError(f"incremental cost drifted: cached {st.total!r}, exact {exact!r}")
            st = _price_state(inst, st.assign, st.levels)
    return st


def solve_heuristic(
    inst: Instance, seed: int = 0, iterations: int = 10_000, trace: list | None = None
) -> tuple[Solution, CostBreakdown]:
    """Greedy design improved by at most ``iterations`` accepted local-search moves.

    Moves are: reassign a spoke, swap two spokes, open a candidate at a level,
    close a hub (its nodes go to their cheapest open hub, optionally with a
    closed candidate opened at the freed level), change a hub's level. Deterministic for a given ``seed``. When ``trace`` is a list, the
    objective after every accepted move is appended to it.
    """
    st = greedy(inst)
    if trace is not None:
        trace.append(st.total)
    st = local_search(inst, st, random.Random(seed), iterations, trace)
    sol = st.solution(inst)
    return sol, evaluate(inst, sol)
