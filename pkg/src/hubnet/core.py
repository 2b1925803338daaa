"""Instances, solutions and exact pricing of the hub network design model.

Nodes are numbered ``0..n-1``. Hub candidates are a subset of nodes; every
per-hub array (access cost columns, hub distances, fixed costs, congestion
factors) is indexed by *candidate position*, i.e. the position of the node in
``Instance.hub_candidates``. Solutions, in contrast, speak in node ids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    CapacitySaturated,
    EvaluationInfeasible,
    FlowExceedsSegments,
    ValidationError,
    Violation,
)

TOL = 1e-9


def _frozen(a, ndim: int, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    if arr.ndim != ndim:
        arr = arr.reshape((0,) * ndim) if arr.size == 0 else arr
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SegmentSchedule:
    """Piecewise cost menu for one interhub arc.

    Segment ``s`` costs ``beta[s] + alpha[s] * v`` per unit distance and may
    carry a flow ``v`` in ``[lower[s], upper[s]]``.
    """

    beta: tuple[float, ...]
    alpha: tuple[float, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        for name in ("beta", "alpha", "lower", "upper"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))

    @classmethod
    def from_upper(cls, beta: Sequence[float], alpha: Sequence[float], upper: Sequence[float]) -> "SegmentSchedule":
        """Build a contiguous schedule: the first interval starts at 0, each next one at the previous upper bound."""
        upper = [float(x) for x in upper]
        lower = [0.0] + upper[:-1]
        return cls(tuple(beta), tuple(alpha), tuple(lower), tuple(upper))

    @property
    def size(self) -> int:
        return len(self.beta)

    @property
    def max_flow(self) -> float:
        return max(self.upper) if self.upper else 0.0

    def select(self, v: float) -> int:
        """Index of the cheapest segment whose interval holds ``v``; smaller index wins ties."""
        best, best_cost = -1, math.inf
        for s in range(self.size):
            if self.lower[s] - TOL <= v <= self.upper[s] + TOL:
                c = self.beta[s] + self.alpha[s] * v
                if c < best_cost:
                    best, best_cost = s, c
        if best < 0:
            raise FlowExceedsSegments(f"flow {v!r} is outside every segment interval (max {self.max_flow!r})")
        return best


@dataclass(frozen=True)
class CapacityLevel:
    """A hub size: global capacity and a fixed opening cost per candidate position."""

    capacity: float
    fixed_cost: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "capacity", float(self.capacity))
        object.__setattr__(self, "fixed_cost", tuple(float(x) for x in self.fixed_cost))

    @classmethod
    def uniform(cls, capacity: float, fixed_cost: float, n_candidates: int) -> "CapacityLevel":
        return cls(capacity, (float(fixed_cost),) * n_candidates)


@dataclass(frozen=True, eq=False)
class Instance:
    flows: np.ndarray
    hub_candidates: tuple[int, ...]
    access_cost: np.ndarray
    hub_distance: np.ndarray
    levels: tuple[CapacityLevel, ...]
    segments: SegmentSchedule
    congestion_factor: np.ndarray
    # keyed by (from hub node, to hub node)
    segment_overrides: Mapping[tuple[int, int], SegmentSchedule] = field(default_factory=dict)
    coordinates: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "flows", _frozen(self.flows, 2))
        object.__setattr__(self, "hub_candidates", tuple(int(k) for k in self.hub_candidates))
        object.__setattr__(self, "access_cost", _frozen(self.access_cost, 2))
        object.__setattr__(self, "hub_distance", _frozen(self.hub_distance, 2))
        object.__setattr__(self, "levels", tuple(self.levels))
        g = np.array(self.congestion_factor, dtype=float)
        if g.ndim == 0:
            g = np.full(len(self.hub_candidates), float(g))
        object.__setattr__(self, "congestion_factor", _frozen(g, 1))
        object.__setattr__(
            self,
            "segment_overrides",
            {(int(k), int(m)): s for (k, m), s in sorted(dict(self.segment_overrides).items())},
        )
        if self.coordinates is not None:
            object.__setattr__(self, "coordinates", _frozen(self.coordinates, 2))

    # -- derived data -------------------------------------------------------

    @property
    def node_count(self) -> int:
        return self.flows.shape[0]

    @property
    def hub_count(self) -> int:
        return len(self.hub_candidates)

    @property
    def level_count(self) -> int:
        return len(self.levels)

    @cached_property
    def origin_flow(self) -> np.ndarray:
        o = self.flows.sum(axis=1)
        o.setflags(write=False)
        return o

    @cached_property
    def destination_flow(self) -> np.ndarray:
        d = self.flows.sum(axis=0)
        d.setflags(write=False)
        return d

    @cached_property
    def capacities(self) -> np.ndarray:
        return _frozen([lv.capacity for lv in self.levels], 1)

    @cached_property
    def fixed_costs(self) -> np.ndarray:
        """``(hub_count, level_count)`` array of opening costs."""
        return _frozen(np.array([lv.fixed_cost for lv in self.levels], dtype=float).T.reshape(self.hub_count, -1), 2)

    @cached_property
    def hub_position(self) -> dict[int, int]:
        return {k: a for a, k in enumerate(self.hub_candidates)}

    @cached_property
    def pair_schedules(self) -> tuple[tuple[SegmentSchedule, ...], ...]:
        """Schedule for every ordered candidate-position pair."""
        H = self.hub_candidates
        return tuple(
            tuple(self.segment_overrides.get((H[a], H[b]), self.segments) for b in range(len(H)))
            for a in range(len(H))
        )

    def schedule(self, k: int, m: int) -> SegmentSchedule:
        """Schedule of the arc between hub nodes ``k`` and ``m``."""
        return self.segment_overrides.get((k, m), self.segments)

    @property
    def total_flow(self) -> float:
        return float(self.flows.sum())

    def with_zero_diagonal(self) -> "Instance":
        w = np.array(self.flows)
        np.fill_diagonal(w, 0.0)
        return replace(self, flows=w)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        arrays_equal = all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("flows", "access_cost", "hub_distance", "congestion_factor")
        )
        coords_equal = (self.coordinates is None and other.coordinates is None) or (
            self.coordinates is not None
            and other.coordinates is not None
            and np.array_equal(self.coordinates, other.coordinates)
        )
        return (
            arrays_equal
            and coords_equal
            and self.hub_candidates == other.hub_candidates
            and self.levels == other.levels
            and self.segments == other.segments
            and self.segment_overrides == other.segment_overrides
            and self.name == other.name
        )

    __hash__ = None


@dataclass(frozen=True)
class Solution:
    """Single-allocation design.

    ``assignment[i]`` is the hub node serving node ``i``; ``hub_level`` maps
    every open hub node to its capacity level index.
    """

    assignment: tuple[int, ...]
    hub_level: Mapping[int, int]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(k) for k in self.assignment))
        object.__setattr__(self, "hub_level", {int(k): int(v) for k, v in sorted(dict(self.hub_level).items())})

    @property
    def open_hubs(self) -> tuple[int, ...]:
        return tuple(self.hub_level)

    def __hash__(self):
        return hash((self.assignment, tuple(self.hub_level.items())))


@dataclass(frozen=True)
class CostBreakdown:
    fixed_open: float
    congestion: float
    access: float
    interhub_fixed: float
    interhub_variable: float

    @property
    def total(self) -> float:
        return self.fixed_open + self.congestion + self.access + self.interhub_fixed + self.interhub_variable

    def as_dict(self) -> dict[str, float]:
        return {
            "fixed_open": self.fixed_open,
            "congestion": self.congestion,
            "access": self.access,
            "interhub_fixed": self.interhub_fixed,
            "interhub_variable": self.interhub_variable,
            "total": self.total,
        }


@dataclass(frozen=True)
class Infeasibility:
    """One violated model constraint, e.g. ``("strict-capacity", (k,))``."""

    constraint: str
    where: tuple
    detail: str = ""

    def __str__(self) -> str:
        idx = ",".join(str(x) for x in self.where)
        return f"{self.constraint}({idx})" + (f": {self.detail}" if self.detail else "")


@dataclass(frozen=True)
class Feasibility:
    violations: tuple[Infeasibility, ...] = ()

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.feasible

    @property
    def constraints(self) -> set[str]:
        return {v.constraint for v in self.violations}


FEASIBLE = Feasibility()


# -- validation ---------------------------------------------------------------


def _check_matrix(viol, name, arr, shape):
    if arr.shape != shape:
        viol.append(Violation("ShapeMismatch", name, f"expected shape {shape}, got {arr.shape}"))
        return False
    bad = np.argwhere(~np.isfinite(arr))
    for idx in bad[:20]:
        viol.append(Violation("NonFinite", name, f"entry {tuple(int(x) for x in idx)} is not finite"))
    neg = np.argwhere(np.isfinite(arr) & (arr < 0))
    for idx in neg[:20]:
        viol.append(
            Violation("NegativeEntry", name, f"entry {tuple(int(x) for x in idx)} = {arr[tuple(idx)]!r} is negative")
        )
    return True


def _check_schedule(viol, name: str, sch: SegmentSchedule):
    if sch.size == 0 or not (len(sch.alpha) == len(sch.lower) == len(sch.upper) == sch.size):
        viol.append(Violation("ShapeMismatch", name, "segment arrays must be nonempty and of equal length"))
        return
    for key in ("beta", "alpha", "lower", "upper"):
        for s, x in enumerate(getattr(sch, key)):
            if not math.isfinite(x):
                viol.append(Violation("NonFinite", f"{name}.{key}", f"segment {s} value {x!r} is not finite"))
            elif x < 0:
                viol.append(Violation("NegativeEntry", f"{name}.{key}", f"segment {s} value {x!r} is negative"))
    if sch.lower[0] != 0.0:
        viol.append(Violation("NonCoveringSegments", f"{name}.lower", f"first interval starts at {sch.lower[0]!r}, not 0"))
    for s in range(sch.size):
        if sch.lower[s] > sch.upper[s]:
            viol.append(
                Violation("NonCoveringSegments", name, f"segment {s} has lower {sch.lower[s]!r} > upper {sch.upper[s]!r}")
            )
    for s in range(sch.size - 1):
        if sch.lower[s + 1] != sch.upper[s]:
            viol.append(
                Violation(
                    "NonCoveringSegments",
                    name,
                    f"segment {s + 1} starts at {sch.lower[s + 1]!r} but segment {s} ends at {sch.upper[s]!r}",
                )
            )
        if sch.beta[s + 1] < sch.beta[s]:
            viol.append(Violation("NonMonotoneSegments", f"{name}.beta", f"beta decreases at segment {s + 1}"))
        if sch.alpha[s + 1] > sch.alpha[s]:
            viol.append(Violation("NonMonotoneSegments", f"{name}.alpha", f"alpha increases at segment {s + 1}"))


def validate_instance(raw: Instance) -> Instance:
    """Return ``raw`` unchanged if every invariant holds, else raise ``ValidationError`` listing all violations."""
    viol: list[Violation] = []
    w = raw.flows
    n = w.shape[0] if w.ndim == 2 else 0
    if w.ndim != 2 or w.shape[0] != w.shape[1] or n == 0:
        viol.append(Violation("ShapeMismatch", "flows", f"flows must be a nonempty square matrix, got shape {w.shape}"))
    else:
        _check_matrix(viol, "flows", w, (n, n))

    H = raw.hub_candidates
    if not H:
        viol.append(Violation("EmptyHubSet", "hub_candidates", "no hub candidates given"))
    if len(set(H)) != len(H):
        viol.append(Violation("BadCandidate", "hub_candidates", "duplicate candidate indices"))
    for k in H:
        if not 0 <= k < n:
            viol.append(Violation("BadCandidate", "hub_candidates", f"candidate {k} is not a node index"))
    h = len(H)

    _check_matrix(viol, "access_cost", raw.access_cost, (n, h))
    if _check_matrix(viol, "hub_distance", raw.hub_distance, (h, h)):
        for a in range(h):
            if raw.hub_distance[a, a] != 0:
                viol.append(Violation("BadDistance", "hub_distance", f"diagonal entry {a} is {raw.hub_distance[a, a]!r}, not 0"))
    _check_matrix(viol, "congestion_factor", raw.congestion_factor.reshape(1, -1), (1, h))

    if not raw.levels:
        viol.append(Violation("NonMonotoneLevels", "levels", "at least one capacity level is required"))
    for l, lv in enumerate(raw.levels):
        if not (math.isfinite(lv.capacity) and lv.capacity > 0):
            viol.append(Violation("NegativeEntry", f"levels[{l}].q", f"capacity {lv.capacity!r} must be finite and positive"))
        if len(lv.fixed_cost) != h:
            viol.append(Violation("ShapeMismatch", f"levels[{l}].f", f"expected {h} fixed costs, got {len(lv.fixed_cost)}"))
        for a, f in enumerate(lv.fixed_cost):
            if not math.isfinite(f):
                viol.append(Violation("NonFinite", f"levels[{l}].f", f"entry {a} is not finite"))
            elif f < 0:
                viol.append(Violation("NegativeEntry", f"levels[{l}].f", f"entry {a} = {f!r} is negative"))
    for l in range(len(raw.levels) - 1):
        if not raw.levels[l + 1].capacity > raw.levels[l].capacity:
            viol.append(
                Violation(
                    "NonMonotoneLevels",
                    "levels",
                    f"capacity of level {l + 1} ({raw.levels[l + 1].capacity!r}) does not exceed level {l} ({raw.levels[l].capacity!r})",
                )
            )

    _check_schedule(viol, "segments", raw.segments)
    for (k, m), sch in raw.segment_overrides.items():
        if k not in H or m not in H or k == m:
            viol.append(Violation("BadCandidate", "segment_overrides", f"override ({k},{m}) is not an ordered pair of distinct candidates"))
        _check_schedule(viol, f"segment_overrides[{k},{m}]", sch)

    if raw.coordinates is not None and raw.coordinates.shape != (n, 2):
        viol.append(Violation("ShapeMismatch", "coordinates", f"expected shape ({n}, 2), got {raw.coordinates.shape}"))

    if viol:
        raise ValidationError(viol)
    return raw


# -- elementary costs ---------------------------------------------------------


def kleinrock_cost(u: float, capacity: float, g: float) -> float:
    """Congestion charge ``g * u / (capacity - u)`` of a hub with throughput ``u``."""
    if u >= capacity:
        raise CapacitySaturated(f"throughput {u!r} reaches capacity {capacity!r}")
    return g * u / (capacity - u)


def segment_cost(v: float, schedule: SegmentSchedule, d: float) -> tuple[int, float]:
    """Cheapest interval-feasible segment for flow ``v`` and its cost over distance ``d``."""
    s = schedule.select(v)
    return s, d * (schedule.beta[s] + schedule.alpha[s] * v)


# -- solution semantics -------------------------------------------------------


def _positions(inst: Instance, sol: Solution):
    pos = inst.hub_position
    return np.array([pos.get(k, -1) for k in sol.assignment], dtype=np.intp)


def interhub_flows(inst: Instance, sol: Solution) -> np.ndarray:
    """``(hub_count, hub_count)`` matrix of flow on every interhub arc; zero diagonal."""
    return _interhub(inst, _positions(inst, sol))


def _interhub(inst: Instance, assign_pos: np.ndarray) -> np.ndarray:
    h = inst.hub_count
    x = np.zeros((inst.node_count, h))
    x[np.arange(inst.node_count), assign_pos] = 1.0
    v = x.T @ inst.flows @ x
    np.fill_diagonal(v, 0.0)
    return v


def hub_loads(inst: Instance, sol: Solution) -> np.ndarray:
    """Origin-side throughput ``u_k`` per candidate position."""
    return np.bincount(_positions(inst, sol), weights=inst.origin_flow, minlength=inst.hub_count)


def check_feasible(inst: Instance, sol: Solution) -> Feasibility:
    violations = _structural_violations(inst, sol)
    if violations:
        return Feasibility(tuple(violations))
    assign_pos = _positions(inst, sol)
    violations = _capacity_and_segment_violations(inst, sol, assign_pos)
    return Feasibility(tuple(violations)) if violations else FEASIBLE


def _structural_violations(inst: Instance, sol: Solution) -> list[Infeasibility]:
    out: list[Infeasibility] = []
    n = inst.node_count
    if len(sol.assignment) != n:
        out.append(Infeasibility("allocation", (), f"assignment covers {len(sol.assignment)} of {n} nodes"))
        return out
    pos = inst.hub_position
    for k, l in sol.hub_level.items():
        if k not in pos:
            out.append(Infeasibility("hub-existence", (k,), "open hub is not a candidate"))
        elif not 0 <= l < inst.level_count:
            out.append(Infeasibility("capacity-activation", (k,), f"unknown level {l}"))
        elif sol.assignment[k] != k:
            out.append(Infeasibility("hub-existence", (k, k), f"open hub is served by {sol.assignment[k]}"))
    for i, k in enumerate(sol.assignment):
        if k not in pos:
            out.append(Infeasibility("allocation", (i,), f"assigned to non-candidate {k}"))
        elif k not in sol.hub_level:
            out.append(Infeasibility("hub-existence", (i, k), "assigned to a closed hub"))
    return out


def _capacity_and_segment_violations(inst, sol, assign_pos) -> list[Infeasibility]:
    out: list[Infeasibility] = []
    u = np.bincount(assign_pos, weights=inst.origin_flow, minlength=inst.hub_count)
    for k, l in sol.hub_level.items():
        a = inst.hub_position[k]
        if not u[a] < inst.levels[l].capacity:
            out.append(Infeasibility("strict-capacity", (k,), f"throughput {u[a]!r} >= capacity {inst.levels[l].capacity!r}"))
    v = _interhub(inst, assign_pos)
    sch = inst.pair_schedules
    H = inst.hub_candidates
    open_pos = [inst.hub_position[k] for k in sol.hub_level]
    for a in open_pos:
        for b in open_pos:
            if a != b and v[a, b] > sch[a][b].max_flow + TOL:
                out.append(
                    Infeasibility("segment-coverage", (H[a], H[b]), f"flow {v[a, b]!r} exceeds {sch[a][b].max_flow!r}")
                )
    return out


def evaluate(inst: Instance, sol: Solution) -> CostBreakdown:
    """Price a feasible solution; raises ``EvaluationInfeasible`` otherwise."""
    violations = _structural_violations(inst, sol)
    if violations:
        raise EvaluationInfeasible("; ".join(map(str, violations)), violations)
    assign_pos = _positions(inst, sol)
    levels = {inst.hub_position[k]: l for k, l in sol.hub_level.items()}
    try:
        return price(inst, assign_pos, levels)
    except (CapacitySaturated, FlowExceedsSegments) as exc:
        viol = _capacity_and_segment_violations(inst, sol, assign_pos)
        raise EvaluationInfeasible(str(exc), viol) from exc


def price(inst: Instance, assign_pos: np.ndarray, levels: Mapping[int, int]) -> CostBreakdown:
    """Cost of a structurally valid design given as candidate positions.

    ``assign_pos[i]`` is the candidate position serving node ``i`` and
    ``levels`` maps each open position to a level. Raises
    ``CapacitySaturated`` or ``FlowExceedsSegments`` on infeasible loads.
    """
    f = inst.fixed_costs
    q = inst.capacities
    g = inst.congestion_factor
    u = np.bincount(assign_pos, weights=inst.origin_flow, minlength=inst.hub_count)
    fixed = 0.0
    congestion = 0.0
    for a, l in levels.items():
        fixed += f[a, l]
        congestion += kleinrock_cost(float(u[a]), float(q[l]), float(g[a]))
    access = float(inst.access_cost[np.arange(inst.node_count), assign_pos].sum())
    ih_fixed = ih_var = 0.0
    if len(levels) > 1:
        ih_fixed, ih_var = interhub_cost(inst, _interhub(inst, assign_pos), sorted(levels))
    return CostBreakdown(float(fixed), float(congestion), access, ih_fixed, ih_var)


def interhub_cost(inst: Instance, v: np.ndarray, open_pos: Sequence[int]) -> tuple[float, float]:
    """Fixed and variable interhub cost over every ordered pair of open positions.

    Pairs are visited in row-major order of ``open_pos`` (pass it sorted);
    raises ``FlowExceedsSegments`` if a pair's flow fits no segment.
    """
    d = inst.hub_distance
    sch = inst.pair_schedules
    fixed = var = 0.0
    for a in open_pos:
        for b in open_pos:
            if a == b:
                continue
            flow = float(v[a, b])
            sc = sch[a][b]
            s = sc.select(flow)
            fixed += d[a, b] * sc.beta[s]
            var += d[a, b] * sc.alpha[s] * flow
    return float(fixed), float(var)
