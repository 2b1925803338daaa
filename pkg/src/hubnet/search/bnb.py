"""Exact best-first branch-and-bound over hub and level decisions.

The outer tree fixes, per candidate, ``closed`` or ``open at level l``. A
fully decided node leaves a single-allocation subproblem that is solved by
enumeration on small instances and by a nested depth-first search over node
assignments otherwise.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..core import TOL, CostBreakdown, Instance, Solution, evaluate, kleinrock_cost, price
from ..errors import CapacitySaturated, FlowExceedsSegments, LimitReached, NoFeasibleSolution, PrunedInfeasible
from .heuristic import solve_heuristic

CLOSED = -1


@dataclass(frozen=True)
class SearchNode:
    """``status[a]`` is ``None`` (undecided), ``CLOSED`` or the open level of candidate position ``a``."""

    status: tuple[int | None, ...]
    lower_bound: float = 0.0
    depth: int = 0

    @classmethod
    def root(cls, inst: Instance) -> "SearchNode":
        return cls((None,) * inst.hub_count)

    @property
    def decided(self) -> bool:
        return all(s is not None for s in self.status)

    @property
    def open_levels(self) -> dict[int, int]:
        return {a: s for a, s in enumerate(self.status) if s is not None and s != CLOSED}


@dataclass(frozen=True)
class SearchConfig:
    time_limit: float | None = None
    gap: float = 0.0
    node_limit: int | None = None
    branching: str = "max-origin-coverage"
    leaf: str = "auto"
    enumerate_max_nodes: int = 12
    bound: str = "strengthened"
    seed_incumbent: bool = True
    seed_iterations: int = 200

    def __post_init__(self):
        for name in ("time_limit", "node_limit"):
            val = getattr(self, name)
            if val is not None and val < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.gap < 0:
            raise ValueError("gap must be nonnegative")
        if self.branching not in ("max-origin-coverage", "input-order"):
            raise ValueError(f"unknown branching rule {self.branching!r}")
        if self.leaf not in ("auto", "enumerate", "nested-bnb"):
            raise ValueError(f"unknown leaf mode {self.leaf!r}")
        if self.bound not in ("basic", "strengthened"):
            raise ValueError(f"unknown bound {self.bound!r}")


@dataclass(frozen=True)
class BnbResult:
    solution: Solution
    breakdown: CostBreakdown
    optimal: bool
    gap: float
    nodes: int

    def __iter__(self):
        # unpacks as (solution, breakdown, optimal)
        return iter((self.solution, self.breakdown, self.optimal))


def lower_bound(inst: Instance, node: SearchNode, strengthened: bool = False) -> float:
    """Valid bound on every completion of ``node``.

    Basic form: committed opening costs plus each node's cheapest access cost
    over the hubs it may still use. ``strengthened`` also charges the
    cheapest segment fixed cost on every arc between committed hubs and the
    congestion a committed hub incurs from its own origin flow.
    """
    status = node.status
    opened = node.open_levels
    allowed = [a for a, s in enumerate(status) if s is None or s != CLOSED]
    if not allowed:
        raise PrunedInfeasible("every candidate is closed")
    O = inst.origin_flow
    q = inst.capacities
    Q = float(q[-1])
    H = inst.hub_candidates
    capacity = sum(float(q[l]) for l in opened.values()) + Q * sum(1 for s in status if s is None)
    if not float(O.sum()) < capacity:
        raise PrunedInfeasible("remaining capacity cannot host the total origin flow")
    f = inst.fixed_costs
    c = inst.access_cost
    bound = sum(float(f[a, l]) for a, l in opened.items())
    own = {H[a]: a for a in opened}
    allowed_arr = np.array(allowed)
    mins = c[:, allowed_arr].min(axis=1)
    for k, a in own.items():
        mins[k] = c[k, a]
    bound += float(mins.sum())
    if strengthened:
        g = inst.congestion_factor
        d = inst.hub_distance
        sch = inst.pair_schedules
        for a, l in opened.items():
            ok = float(O[H[a]])
            if not ok < q[l]:
                raise PrunedInfeasible(f"hub {H[a]} cannot host its own origin flow at level {l}")
            bound += kleinrock_cost(ok, float(q[l]), float(g[a]))
            for b in opened:
                if b != a:
                    bound += float(d[a, b]) * min(sch[a][b].beta)
    return bound


class _Clock:
    def __init__(self, cfg: SearchConfig):
        self.start = time.perf_counter()
        self.cfg = cfg
        self.nodes = 0

    def tick(self) -> bool:
        """Count one node; True when a limit is hit."""
        self.nodes += 1
        cfg = self.cfg
        if cfg.node_limit is not None and self.nodes > cfg.node_limit:
            return True
        return cfg.time_limit is not None and time.perf_counter() - self.start >= cfg.time_limit


class _Incumbent:
    def __init__(self, on_update: Callable | None):
        self.value = math.inf
        self.assign: np.ndarray | None = None
        self.levels: dict[int, int] | None = None
        self.on_update = on_update

    def offer(self, inst: Instance, value: float, assign: np.ndarray, levels: dict[int, int]) -> None:
        if value < self.value:
            self.value = value
            self.assign = assign.copy()
            self.levels = dict(levels)
            if self.on_update is not None:
                self.on_update(self.solution(inst), value)

    def solution(self, inst: Instance) -> Solution | None:
        if self.assign is None:
            return None
        H = inst.hub_candidates
        return Solution(tuple(H[a] for a in self.assign), {H[a]: l for a, l in self.levels.items()})


class _Stop(Exception):
    pass


def _cutoff(inc: _Incumbent, cfg: SearchConfig) -> float:
    if math.isinf(inc.value):
        return math.inf
    return inc.value - cfg.gap * abs(inc.value)


def _solve_enumerate(inst, levels, inc: _Incumbent, cfg, clock) -> None:
    H = inst.hub_candidates
    open_pos = sorted(levels)
    hub_nodes = {H[a] for a in open_pos}
    free = [i for i in range(inst.node_count) if i not in hub_nodes]
    assign = np.zeros(inst.node_count, dtype=np.intp)
    for a in open_pos:
        assign[H[a]] = a
    for choice in itertools.product(open_pos, repeat=len(free)):
        assign[free] = choice
        try:
            value = price(inst, assign, levels).total
        except (CapacitySaturated, FlowExceedsSegments):
            continue
        if value < _cutoff(inc, cfg):
            inc.offer(inst, value, assign, levels)


def _solve_nested(inst, levels, inc: _Incumbent, cfg, clock) -> None:
    """Depth-first search over spoke assignments for fixed open hubs.

    The bound adds, for every unassigned node, its cheapest hub counting
    access cost, congestion growth at current loads and a linear
    under-estimate of the interhub cost towards already assigned nodes.
    """
    H = inst.hub_candidates
    n = inst.node_count
    P = np.array(sorted(levels))
    h = len(P)
    w = inst.flows
    O = inst.origin_flow
    c = inst.access_cost[:, P]
    q = np.array([inst.capacities[levels[a]] for a in P])
    g = inst.congestion_factor[P]
    d = inst.hub_distance[np.ix_(P, P)]
    sch = inst.pair_schedules
    lam = np.zeros((h, h))
    vmax = np.full((h, h), np.inf)
    beta_floor = 0.0
    for x in range(h):
        for y in range(h):
            if x != y:
                sc = sch[P[x]][P[y]]
                lam[x, y] = d[x, y] * min(sc.alpha)
                vmax[x, y] = sc.max_flow + TOL
                beta_floor += d[x, y] * min(sc.beta)
    fixed = float(sum(inst.fixed_costs[a, levels[a]] for a in P))

    def phi(x, load):
        return g[x] * load / (q[x] - load)

    hub_nodes = [H[a] for a in P]
    hub_set = set(hub_nodes)
    free = sorted((i for i in range(n) if i not in hub_set), key=lambda i: (-(O[i] + inst.destination_flow[i]), i))

    where = np.full(n, -1, dtype=np.intp)
    u = np.zeros(h)
    v = np.zeros((h, h))
    inc_cost = np.zeros((n, h))
    access = 0.0
    lin = 0.0

    def place(j, x):
        nonlocal access, lin
        assigned = where >= 0
        if assigned.any():
            idx = where[assigned]
            v[:, x] += np.bincount(idx, weights=w[assigned, j], minlength=h)
            v[x, :] += np.bincount(idx, weights=w[j, assigned], minlength=h)
            v[x, x] = 0.0
        access += float(c[j, x])
        lin += float(inc_cost[j, x])
        u[x] += O[j]
        inc_cost[:] += np.outer(w[:, j], lam[:, x]) + np.outer(w[j, :], lam[x, :])
        where[j] = x

    for x, k in enumerate(hub_nodes):
        if not O[k] < q[x]:
            return
        place(k, x)
    if (v > vmax).any():
        return

    def bound_and_order(depth):
        rest = free[depth:]
        cong = sum(phi(x, u[x]) for x in range(h))
        base = fixed + beta_floor + access + lin + cong
        if not rest:
            return base, None
        if not float(O[rest].sum()) < float((q - u).sum()):
            return math.inf, None
        oi = O[rest][:, None]
        load = u[None, :] + oi
        with np.errstate(divide="ignore", invalid="ignore"):
            marg = np.where(load < q[None, :], g[None, :] * load / (q[None, :] - load) - (g * u / (q - u))[None, :], np.inf)
        est = c[rest] + inc_cost[rest] + marg
        best = est.min(axis=1)
        if np.isinf(best).any():
            return math.inf, None
        return base + float(best.sum()), est[0]

    def dfs(depth):
        if clock.tick():
            raise _Stop
        bnd, order = bound_and_order(depth)
        if not bnd < _cutoff(inc, cfg):
            return
        if order is None:
            assign = np.array([P[x] for x in where], dtype=np.intp)
            try:
                value = price(inst, assign, levels).total
            except (CapacitySaturated, FlowExceedsSegments):
                return
            if value < _cutoff(inc, cfg):
                inc.offer(inst, value, assign, levels)
            return
        j = free[depth]
        for x in sorted(range(h), key=lambda x: (order[x], x)):
            if math.isinf(order[x]):
                break
            saved = (where.copy(), u.copy(), v.copy(), inc_cost.copy(), access, lin)
            place(j, x)
            if not (v > vmax).any():
                dfs(depth + 1)
            restore(saved)

    def restore(saved):
        nonlocal access, lin
        where[:], u[:], v[:], inc_cost[:] = saved[0], saved[1], saved[2], saved[3]
        access, lin = saved[4], saved[5]

    dfs(0)


def _branch_scores(inst: Instance) -> np.ndarray:
    cheapest = np.argmin(inst.access_cost, axis=1)
    return np.bincount(cheapest, weights=inst.origin_flow, minlength=inst.hub_count)


def solve_bnb(inst: Instance, cfg: SearchConfig = SearchConfig(), on_incumbent: Callable | None = None) -> BnbResult:
    """Exact minimizer, proven optimal when the tree is exhausted.

    Raises ``LimitReached`` (carrying the incumbent and gap) when a time or
    node limit stops the search, ``NoFeasibleSolution`` when the tree holds
    no feasible design. ``on_incumbent(solution, value)`` is called on each
    improvement.
    """
    clock = _Clock(cfg)
    inc = _Incumbent(on_incumbent)
    strengthened = cfg.bound == "strengthened"
    leaf = cfg.leaf
    if leaf == "auto":
        leaf = "enumerate" if inst.node_count <= cfg.enumerate_max_nodes else "nested-bnb"

    if cfg.seed_incumbent:
        try:
            sol, bd = solve_heuristic(inst, seed=0, iterations=cfg.seed_iterations)
        except NoFeasibleSolution:
            pass
        else:
            hp = inst.hub_position
            inc.offer(inst, bd.total, np.array([hp[k] for k in sol.assignment], dtype=np.intp), {hp[k]: l for k, l in sol.hub_level.items()})

    def limit(msg, open_bound):
        sol = inc.solution(inst)
        incumbent = None if sol is None else (sol, evaluate(inst, sol))
        gap = None if sol is None else max(0.0, inc.value - open_bound)
        return LimitReached(msg, incumbent, gap)

    if cfg.time_limit == 0:
        raise limit("time limit of 0 s", -math.inf)

    scores = _branch_scores(inst)
    counter = itertools.count()
    root = SearchNode.root(inst)
    try:
        root = SearchNode(root.status, lower_bound(inst, root, strengthened), 0)
    except PrunedInfeasible as exc:
        raise NoFeasibleSolution(str(exc)) from exc
    heap = [(root.lower_bound, 0, next(counter), root)]
    early_stop = False
    while heap:
        lb, _, _, node = heapq.heappop(heap)
        if not lb < _cutoff(inc, cfg):
            early_stop = cfg.gap > 0 and bool(heap or lb < inc.value)
            heap.clear()
            break
        try:
            if clock.tick():
                raise _Stop
            if node.decided:
                levels = node.open_levels
                if leaf == "enumerate":
                    _solve_enumerate(inst, levels, inc, cfg, clock)
                else:
                    _solve_nested(inst, levels, inc, cfg, clock)
                continue
        except _Stop:
            bound = min([lb] + [entry[0] for entry in heap])
            raise limit(f"search stopped after {clock.nodes} nodes", bound) from None
        undecided = [a for a, s in enumerate(node.status) if s is None]
        if cfg.branching == "input-order":
            a = undecided[0]
        else:
            a = max(undecided, key=lambda a: (scores[a], -a))
        for choice in [CLOSED] + list(range(inst.level_count)):
            status = list(node.status)
            status[a] = choice
            child = SearchNode(tuple(status), 0.0, node.depth + 1)
            try:
                bound = lower_bound(inst, child, strengthened)
            except PrunedInfeasible:
                continue
            if bound < _cutoff(inc, cfg):
                heapq.heappush(heap, (bound, -child.depth, next(counter), SearchNode(child.status, bound, child.depth)))

    sol = inc.solution(inst)
    if sol is None:
        raise NoFeasibleSolution("no feasible design exists")
    bd = evaluate(inst, sol)
    gap = 0.0 if not early_stop else cfg.gap * abs(bd.total)
    return BnbResult(sol, bd, not early_stop, gap, clock.nodes)
