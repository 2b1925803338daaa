"""Instance builders shared by the test modules."""

import numpy as np

from hubnet import CapacityLevel, Instance, SegmentSchedule, Solution


def t1() -> Instance:
    w = np.array([[0, 5, 5], [3, 0, 2], [4, 1, 0]], dtype=float)
    return Instance(
        flows=w,
        hub_candidates=(0, 1),
        access_cost=[[0, 8], [8, 0], [3, 4]],
        hub_distance=[[0, 2], [2, 0]],
        levels=(CapacityLevel.uniform(100, 50, 2),),
        segments=SegmentSchedule.from_upper([10], [1], [1000]),
        congestion_factor=1.0,
        name="t1",
    )


def envelope_schedule(rng, size: int, cap: float) -> SegmentSchedule:
    """Random schedule in which no later segment undercuts an earlier one on its interval.

    Betas rise and alphas fall, and each crossing point lies at or beyond the
    earlier segment's upper bound. Under that condition the conic model
    without segment lower-bound rows prices arcs exactly like the evaluator.
    """
    if size == 1:
        return SegmentSchedule.from_upper([rng.uniform(0, 5)], [rng.uniform(0.2, 2)], [cap])
    beta = [rng.uniform(0, 3)]
    alpha = [rng.uniform(0.5, 2)]
    upper = [cap * rng.uniform(0.2, 0.6)]
    for s in range(1, size):
        a = alpha[-1] * rng.uniform(0.2, 0.8)
        # crossing (b - beta) / (alpha - a) must be >= upper[-1]
        b = beta[-1] + (alpha[-1] - a) * upper[-1] * rng.uniform(1.0, 1.5)
        alpha.append(a)
        beta.append(b)
        upper.append(cap if s == size - 1 else upper[-1] + cap * rng.uniform(0.1, 0.3))
    return SegmentSchedule.from_upper(beta, alpha, upper)


def random_instance(seed: int, n=None, h=None, levels=None, segments=None, density=0.7, overrides=False) -> Instance:
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(3, 9))
    h = h or int(rng.integers(1, min(4, n) + 1))
    L = levels or int(rng.integers(1, 3))
    S = segments or int(rng.integers(1, 3))
    xy = rng.uniform(0, 10, size=(n, 2))
    dist = np.hypot(*(xy[:, None, :] - xy[None, :, :]).transpose(2, 0, 1))
    w = np.where(rng.uniform(size=(n, n)) < density, rng.uniform(0, 10, size=(n, n)).round(2), 0.0)
    np.fill_diagonal(w, 0.0)
    hubs = sorted(rng.choice(n, size=h, replace=False).tolist())
    O = w.sum(axis=1)
    total = float(O.sum())
    base = max(total / max(1, h) * rng.uniform(1.05, 1.8), float(O.max()) * 1.05, 1.0)
    caps = sorted(base * (1 + 0.6 * l) for l in range(L))
    lv = []
    for l, q in enumerate(caps):
        lv.append(CapacityLevel(q, tuple(float(x) for x in rng.uniform(5, 40, size=h) * (1 + 0.5 * l))))
    cap = total + 1.0
    sched = envelope_schedule(rng, S, cap)
    ov = {}
    if overrides and h > 1:
        k, m = hubs[0], hubs[1]
        ov[(k, m)] = envelope_schedule(rng, S, cap)
    c = dist[:, hubs] * rng.uniform(0.05, 0.3)
    return Instance(
        flows=w,
        hub_candidates=tuple(hubs),
        access_cost=c.round(4),
        hub_distance=dist[np.ix_(hubs, hubs)].round(4),
        levels=tuple(lv),
        segments=sched,
        congestion_factor=rng.uniform(0.1, 5, size=h).round(3),
        segment_overrides=ov,
        coordinates=xy,
        name=f"random-{seed}",
    )


def random_solution(inst: Instance, rng) -> Solution:
    """A structurally valid design; capacity and segments are not checked."""
    H = inst.hub_candidates
    size = int(rng.integers(1, inst.hub_count + 1))
    chosen = sorted(rng.choice(len(H), size=size, replace=False).tolist())
    hubs = [H[a] for a in chosen]
    assign = [int(hubs[rng.integers(len(hubs))]) for _ in range(inst.node_count)]
    for k in hubs:
        assign[k] = k
    return Solution(tuple(assign), {k: int(rng.integers(inst.level_count)) for k in hubs})


def reference_cost(inst: Instance, sol: Solution) -> float | None:
    """Price a design by looping over origin-destination pairs; None if infeasible.

    Written without any hubnet pricing code so it can serve as a second route.
    """
    n = inst.node_count
    H = list(inst.hub_candidates)
    a = sol.assignment
    if any(k not in sol.hub_level for k in a) or any(a[k] != k for k in sol.hub_level):
        return None
    load = {k: 0.0 for k in sol.hub_level}
    arc = {}
    total = 0.0
    for i in range(n):
        total += float(inst.access_cost[i, H.index(a[i])])
        for j in range(n):
            wij = float(inst.flows[i, j])
            load[a[i]] += wij
            if a[i] != a[j]:
                arc[(a[i], a[j])] = arc.get((a[i], a[j]), 0.0) + wij
    for k, l in sol.hub_level.items():
        q = inst.levels[l].capacity
        p = H.index(k)
        total += inst.levels[l].fixed_cost[p]
        if load[k] >= q:
            return None
        total += float(inst.congestion_factor[p]) * load[k] / (q - load[k])
    for k in sol.hub_level:
        for m in sol.hub_level:
            if k == m:
                continue
            v = arc.get((k, m), 0.0)
            sch = inst.segment_overrides.get((k, m), inst.segments)
            dist = float(inst.hub_distance[H.index(k), H.index(m)])
            options = [
                dist * (b + al * v)
                for b, al, lo, up in zip(sch.beta, sch.alpha, sch.lower, sch.upper)
                if lo - 1e-9 <= v <= up + 1e-9
            ]
            if not options:
                return None
            total += min(options)
    return total


def brute_force(inst: Instance):
    """Minimum of reference_cost over every design, by plain enumeration."""
    import itertools

    H = list(inst.hub_candidates)
    best = None
    for size in range(1, len(H) + 1):
        for hubs in itertools.combinations(H, size):
            for lv in itertools.product(range(inst.level_count), repeat=size):
                for choice in itertools.product(hubs, repeat=inst.node_count):
                    if any(choice[k] != k for k in hubs):
                        continue
                    sol = Solution(tuple(choice), dict(zip(hubs, lv)))
                    val = reference_cost(inst, sol)
                    if val is not None and (best is None or val < best[0]):
                        best = (val, sol)
    return best
