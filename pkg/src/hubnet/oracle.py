"""Brute-force ground truth: every hub set, every level vector, every allocation."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb

from .core import TOL, CostBreakdown, Instance, Solution, evaluate
from .errors import BudgetExceeded, EvaluationInfeasible, Infeasible


@dataclass(frozen=True)
class OracleBudget:
    max_nodes: int = 10
    max_candidates: int = 4
    max_enumerations: int = 10**8

    def __post_init__(self):
        if min(self.max_nodes, self.max_candidates, self.max_enumerations) <= 0:
            raise ValueError("oracle budget limits must be positive")


def enumeration_count(inst: Instance) -> int:
    """Number of complete designs the oracle would price without pruning."""
    n, h, L = inst.node_count, inst.hub_count, inst.level_count
    return sum(comb(h, s) * L**s * s ** (n - s) for s in range(1, h + 1))


def _check_budget(inst: Instance, budget: OracleBudget) -> None:
    if inst.node_count > budget.max_nodes:
        raise BudgetExceeded(f"{inst.node_count} nodes exceed the oracle limit of {budget.max_nodes}")
    if inst.hub_count > budget.max_candidates:
        raise BudgetExceeded(f"{inst.hub_count} candidates exceed the oracle limit of {budget.max_candidates}")
    count = enumeration_count(inst)
    if count > budget.max_enumerations:
        raise BudgetExceeded(f"{count} allocations exceed the oracle limit of {budget.max_enumerations}")


def _better(total, key, best) -> bool:
    if best is None:
        return True
    best_total, best_key = best[0], best[1]
    if total < best_total - TOL:
        return True
    return abs(total - best_total) <= TOL and key < best_key


def _scan(inst: Instance, subsets: list[tuple[int, ...]]):
    """Best design over the given candidate-position subsets.

    Returns ``(total, key, solution, breakdown)`` or ``None``.
    """
    n = inst.node_count
    H = inst.hub_candidates
    c = inst.access_cost
    f = inst.fixed_costs
    L = inst.level_count
    best = None
    for subset in subsets:
        hubs = [H[a] for a in subset]
        hub_set = set(hubs)
        free = [i for i in range(n) if i not in hub_set]
        # every omitted cost term is nonnegative, so this bounds every completion
        access_lb = sum(c[k, a] for k, a in zip(hubs, subset)) + sum(min(c[i, a] for a in subset) for i in free)
        for levels in itertools.product(range(L), repeat=len(subset)):
            fixed = sum(f[a, l] for a, l in zip(subset, levels))
            if best is not None and fixed + access_lb > best[0] + TOL:
                continue
            hub_level = dict(zip(hubs, levels))
            for choice in itertools.product(hubs, repeat=len(free)):
                assignment = [0] * n
                for k in hubs:
                    assignment[k] = k
                for i, k in zip(free, choice):
                    assignment[i] = k
                sol = Solution(tuple(assignment), hub_level)
                try:
                    bd = evaluate(inst, sol)
                except EvaluationInfeasible:
                    continue
                key = (len(subset), sol.assignment, tuple(levels))
                if _better(bd.total, key, best):
                    best = (bd.total, key, sol, bd)
    return best


def _subsets(inst: Instance) -> list[tuple[int, ...]]:
    h = inst.hub_count
    return [s for size in range(1, h + 1) for s in itertools.combinations(range(h), size)]


def solve_exhaustive(
    inst: Instance, budget: OracleBudget = OracleBudget(), workers: int = 1
) -> tuple[Solution, CostBreakdown]:
    """Global minimizer of the exact model.

    Ties within ``1e-9`` go to fewer open hubs, then the lexicographically
    smallest assignment. With ``workers > 1`` hub subsets are split across
    processes; the reduction replays the serial comparison order.
    """
    _check_budget(inst, budget)
    subsets = _subsets(inst)
    if workers <= 1:
        best = _scan(inst, subsets)
    else:
        chunks = [subsets[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan, [inst] * workers, chunks))
        best = None
        for part in sorted((p for p in parts if p is not None), key=lambda p: p[1]):
            if _better(part[0], part[1], best):
                best = part
    if best is None:
        raise Infeasible("no hub set, level choice and allocation satisfies strict capacity and segment coverage")
    return best[2], best[3]
