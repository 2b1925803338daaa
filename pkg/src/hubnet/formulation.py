"""Flow-based MISOCP model of the hub design problem as a solver-agnostic IR.

Variables, in deterministic order (role, then index tuple):

=====  ==================  ==========================================
role   index               meaning
=====  ==================  ==========================================
x      (i, k)              node ``i`` served by hub node ``k``
t      (k, l)              hub ``k`` open at level ``l``
z      (k, m, s)           arc ``k -> m`` priced with segment ``s``
y      (i, k, m, s)        flow from origin ``i`` on arc ``k -> m``
y      (i, k, k)           flow from origin ``i`` staying inside hub ``k``
u      (k, l)              throughput of hub ``k`` booked on level ``l``
r      (k, l)              congestion epigraph variable
=====  ==================  ==========================================

Every variable is nonnegative; x, t and z are binary. The congestion term
``g u / (q - u)`` enters the objective through ``r`` and one 3-dimensional
second-order cone per (hub, level).

Two conservation layouts are available through ``intra_hub``:

``"self-pair"`` (default)
    adds ``y(i, k, k)`` so that the outflow and inflow rows of every origin
    also account for traffic whose destination shares its hub. The
    throughput row then equals the origin-side load of the hub exactly.
``"literal"``
    only interhub arcs carry ``y``. The outflow/inflow rows then force every
    unit of origin flow onto an interhub arc, which makes any design with
    intra-hub traffic infeasible. Kept to reproduce the printed model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np

from .core import Instance, Solution, check_feasible, hub_loads, interhub_flows
from .errors import EmbeddingInfeasible, EvaluationInfeasible, InstanceTooLarge, NonpositiveCapacity

ROLES = ("x", "t", "z", "y", "u", "r")
BINARY_ROLES = frozenset("xtz")
SENSES = ("=", "<=", ">=")
INTRA_HUB_MODES = ("self-pair", "literal")
DEFAULT_MAX_VARIABLES = 50_000_000

Terms = tuple[tuple[int, float], ...]


def var_name(role: str, index: tuple[int, ...]) -> str:
    return f"{role}({','.join(str(i) for i in index)})"


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str  # "binary" or "continuous"
    role: str
    index: tuple[int, ...]

    @property
    def is_binary(self) -> bool:
        return self.kind == "binary"


@dataclass(frozen=True)
class AffineExpr:
    terms: Terms = ()
    constant: float = 0.0

    def value(self, x: np.ndarray) -> float:
        return math.fsum([c * x[j] for j, c in self.terms] + [self.constant])


@dataclass(frozen=True)
class LinearRow:
    name: str
    terms: Terms
    sense: str
    rhs: float

    def activity(self, x: np.ndarray) -> float:
        return math.fsum(c * x[j] for j, c in self.terms)

    def violation(self, x: np.ndarray) -> float:
        a = self.activity(x)
        if self.sense == "=":
            return abs(a - self.rhs)
        if self.sense == "<=":
            return max(0.0, a - self.rhs)
        return max(0.0, self.rhs - a)


@dataclass(frozen=True)
class Cone:
    """``||(e1, e2)|| <= e0`` over affine expressions."""

    name: str
    e0: AffineExpr
    e1: AffineExpr
    e2: AffineExpr

    @property
    def members(self) -> tuple[AffineExpr, AffineExpr, AffineExpr]:
        return (self.e0, self.e1, self.e2)

    def violation(self, x: np.ndarray) -> float:
        return max(0.0, math.hypot(self.e1.value(x), self.e2.value(x)) - self.e0.value(x))


@dataclass(frozen=True, eq=True)
class ConicModel:
    variables: tuple[Variable, ...]
    objective: Terms
    rows: tuple[LinearRow, ...]
    cones: tuple[Cone, ...]
    objective_constant: float = 0.0
    intra_hub: str = "self-pair"
    lower_bounds: bool = False

    @cached_property
    def index(self) -> dict[str, int]:
        return {v.name: j for j, v in enumerate(self.variables)}

    def var(self, role: str, *index: int) -> int:
        return self.index[var_name(role, index)]

    @property
    def binary_indices(self) -> list[int]:
        return [j for j, v in enumerate(self.variables) if v.is_binary]

    def objective_value(self, x: np.ndarray) -> float:
        return math.fsum([c * x[j] for j, c in self.objective] + [self.objective_constant])

    def max_violation(self, x: np.ndarray) -> tuple[float, str]:
        """Worst violation over rows, cones, nonnegativity and integrality."""
        worst, where = 0.0, ""
        for row in self.rows:
            e = row.violation(x)
            if e > worst:
                worst, where = e, row.name
        for cone in self.cones:
            e = cone.violation(x)
            if e > worst:
                worst, where = e, cone.name
        for j, v in enumerate(self.variables):
            e = max(0.0, -x[j])
            if v.is_binary:
                e = max(e, min(abs(x[j]), abs(x[j] - 1.0)))
            if e > worst:
                worst, where = e, v.name
        return worst, where


@dataclass
class VariableAssignment:
    """Values for every model variable, keyed by name.

    ``reported_objective`` is the objective a solver claimed, when it gave one.
    """

    values: dict[str, float] = field(default_factory=dict)
    reported_objective: float | None = None

    def vector(self, model: ConicModel) -> np.ndarray:
        return np.array([self.values[v.name] for v in model.variables], dtype=float)

    def objective(self, model: ConicModel) -> float:
        return model.objective_value(self.vector(model))


def _terms(acc: Mapping[int, float]) -> Terms:
    return tuple((j, float(c)) for j, c in sorted(acc.items()) if c != 0.0)


def soc_from_hyperbolic(q: float, u_var: int, r_var: int, name: str = "") -> Cone:
    """Cone equivalent to ``r >= u / (q - u)`` with ``0 <= u < q``.

    Emits ``||(2u, q r - q)|| <= q r + q - 2u``.
    """
    if not q > 0:
        raise NonpositiveCapacity(f"capacity must be positive, got {q!r}")
    q = float(q)
    return Cone(
        name,
        AffineExpr(_terms({r_var: q, u_var: -2.0}), q),
        AffineExpr(((u_var, 2.0),)),
        AffineExpr(((r_var, q),), -q),
    )


def variable_count(inst: Instance, intra_hub: str = "self-pair") -> int:
    n, h, L = inst.node_count, inst.hub_count, inst.level_count
    seg = sum(inst.pair_schedules[a][b].size for a in range(h) for b in range(h) if a != b)
    count = n * h + h * L + seg + n * seg + 2 * h * L
    if intra_hub == "self-pair":
        count += n * h
    return count


def build_misocp(
    inst: Instance,
    *,
    intra_hub: str = "self-pair",
    lower_bounds: bool = False,
    max_variables: int = DEFAULT_MAX_VARIABLES,
) -> ConicModel:
    """Build the flow-based MISOCP of ``inst``.

    ``lower_bounds=True`` adds the segment lower-bound rows
    ``sum_i y(i,k,m,s) >= L^s z(k,m,s)``, which the model does not need.
    """
    if intra_hub not in INTRA_HUB_MODES:
        raise ValueError(f"intra_hub must be one of {INTRA_HUB_MODES}, got {intra_hub!r}")
    count = variable_count(inst, intra_hub)
    if count > max_variables:
        raise InstanceTooLarge(f"model needs {count} variables, budget is {max_variables}")

    n = inst.node_count
    H = inst.hub_candidates
    L = inst.level_count
    sch = inst.pair_schedules
    w = inst.flows
    O = inst.origin_flow
    d = inst.hub_distance
    f = inst.fixed_costs
    g = inst.congestion_factor
    c = inst.access_cost

    specs: list[tuple[str, tuple[int, ...]]] = []
    for i in range(n):
        for k in H:
            specs.append(("x", (i, k)))
    for k in H:
        for l in range(L):
            specs.append(("t", (k, l)))
    for a, k in enumerate(H):
        for b, m in enumerate(H):
            if a != b:
                for s in range(sch[a][b].size):
                    specs.append(("z", (k, m, s)))
    for i in range(n):
        for a, k in enumerate(H):
            for b, m in enumerate(H):
                if a != b:
                    for s in range(sch[a][b].size):
                        specs.append(("y", (i, k, m, s)))
                elif intra_hub == "self-pair":
                    specs.append(("y", (i, k, k)))
    for k in H:
        for l in range(L):
            specs.append(("u", (k, l)))
    for k in H:
        for l in range(L):
            specs.append(("r", (k, l)))
    order = {role: p for p, role in enumerate(ROLES)}
    specs.sort(key=lambda rs: (order[rs[0]], rs[1]))
    variables = tuple(
        Variable(var_name(role, idx), "binary" if role in BINARY_ROLES else "continuous", role, idx) for role, idx in specs
    )
    ix = {v.name: j for j, v in enumerate(variables)}

    def X(i, k):
        return ix[var_name("x", (i, k))]

    def Y(*idx):
        return ix[var_name("y", idx)]

    obj: dict[int, float] = {}
    for a, k in enumerate(H):
        for l in range(L):
            obj[ix[var_name("t", (k, l))]] = f[a, l]
            obj[ix[var_name("r", (k, l))]] = g[a]
    for i in range(n):
        for a, k in enumerate(H):
            obj[X(i, k)] = c[i, a]
    for a, k in enumerate(H):
        for b, m in enumerate(H):
            if a == b:
                continue
            for s in range(sch[a][b].size):
                obj[ix[var_name("z", (k, m, s))]] = d[a, b] * sch[a][b].beta[s]
                rate = d[a, b] * sch[a][b].alpha[s]
                for i in range(n):
                    obj[Y(i, k, m, s)] = rate

    rows: list[LinearRow] = []

    def add(name, acc, sense, rhs):
        rows.append(LinearRow(name, _terms(acc), sense, float(rhs)))

    for i in range(n):
        add(f"allocation({i})", {X(i, k): 1.0 for k in H}, "=", 1.0)
    for i in range(n):
        for k in H:
            if i != k:
                add(f"hub-existence({i},{k})", {X(i, k): 1.0, X(k, k): -1.0}, "<=", 0.0)
    for a, k in enumerate(H):
        for b, m in enumerate(H):
            if a != b:
                acc = {ix[var_name("z", (k, m, s))]: 1.0 for s in range(sch[a][b].size)}
                acc[X(k, k)] = -1.0
                acc[X(m, m)] = -1.0
                add(f"segment-activation({k},{m})", acc, ">=", -1.0)
    for k in H:
        acc = {ix[var_name("t", (k, l))]: 1.0 for l in range(L)}
        acc[X(k, k)] = -1.0
        add(f"level-activation({k})", acc, "=", 0.0)
    for a, k in enumerate(H):
        for b, m in enumerate(H):
            if a == b:
                continue
            for s in range(sch[a][b].size):
                zj = ix[var_name("z", (k, m, s))]
                acc = {Y(i, k, m, s): 1.0 for i in range(n)}
                acc[zj] = -sch[a][b].upper[s]
                add(f"segment-upper({k},{m},{s})", acc, "<=", 0.0)
                if lower_bounds:
                    acc = {Y(i, k, m, s): 1.0 for i in range(n)}
                    acc[zj] = -sch[a][b].lower[s]
                    add(f"segment-lower({k},{m},{s})", acc, ">=", 0.0)

    def outgoing(i, a, k):
        acc = {}
        for b, m in enumerate(H):
            if b != a:
                for s in range(sch[a][b].size):
                    acc[Y(i, k, m, s)] = 1.0
            elif intra_hub == "self-pair":
                acc[Y(i, k, k)] = 1.0
        return acc

    for i in range(n):
        for a, k in enumerate(H):
            acc = outgoing(i, a, k)
            acc[X(i, k)] = acc.get(X(i, k), 0.0) - O[i]
            add(f"outflow({i},{k})", acc, "=", 0.0)
    for i in range(n):
        for a, k in enumerate(H):
            acc = {}
            for b, m in enumerate(H):
                if b != a:
                    for s in range(sch[b][a].size):
                        acc[Y(i, m, k, s)] = 1.0
                elif intra_hub == "self-pair":
                    acc[Y(i, k, k)] = 1.0
            for j in range(n):
                if w[i, j] != 0.0:
                    acc[X(j, k)] = acc.get(X(j, k), 0.0) - w[i, j]
            add(f"inflow({i},{k})", acc, "=", 0.0)
    for a, k in enumerate(H):
        acc = {ix[var_name("u", (k, l))]: 1.0 for l in range(L)}
        for i in range(n):
            for j, coef in outgoing(i, a, k).items():
                acc[j] = -coef
        add(f"throughput({k})", acc, "=", 0.0)
    for k in H:
        for l, lv in enumerate(inst.levels):
            add(
                f"level-capacity({k},{l})",
                {ix[var_name("u", (k, l))]: 1.0, ix[var_name("t", (k, l))]: -lv.capacity},
                "<=",
                0.0,
            )

    cones = tuple(
        soc_from_hyperbolic(lv.capacity, ix[var_name("u", (k, l))], ix[var_name("r", (k, l))], f"congestion({k},{l})")
        for k in H
        for l, lv in enumerate(inst.levels)
    )
    return ConicModel(variables, _terms(obj), tuple(rows), cones, 0.0, intra_hub, lower_bounds)


def assignment_from_solution(
    inst: Instance, sol: Solution, model: ConicModel, tol: float = 1e-6
) -> VariableAssignment:
    """Embed a feasible design into the model's variable space and verify every row and cone."""
    verdict = check_feasible(inst, sol)
    if not verdict:
        raise EvaluationInfeasible("; ".join(map(str, verdict.violations)), verdict.violations)
    vals = {v.name: 0.0 for v in model.variables}
    hp = inst.hub_position
    w = inst.flows
    for i, k in enumerate(sol.assignment):
        vals[var_name("x", (i, k))] = 1.0
    u = hub_loads(inst, sol)
    for k, l in sol.hub_level.items():
        vals[var_name("t", (k, l))] = 1.0
        uk = float(u[hp[k]])
        q = inst.levels[l].capacity
        vals[var_name("u", (k, l))] = uk
        vals[var_name("r", (k, l))] = uk / (q - uk)
    v = interhub_flows(inst, sol)
    seg: dict[tuple[int, int], int] = {}
    for k in sol.hub_level:
        for m in sol.hub_level:
            if k != m:
                s = inst.schedule(k, m).select(float(v[hp[k], hp[m]]))
                seg[k, m] = s
                vals[var_name("z", (k, m, s))] = 1.0
    for i, k in enumerate(sol.assignment):
        by_hub: dict[int, float] = {}
        for j, m in enumerate(sol.assignment):
            if w[i, j] != 0.0:
                by_hub[m] = by_hub.get(m, 0.0) + float(w[i, j])
        for m, amount in by_hub.items():
            if m == k:
                key = var_name("y", (i, k, k))
                if key in vals:
                    vals[key] = amount
            else:
                vals[var_name("y", (i, k, m, seg[k, m]))] = amount
    out = VariableAssignment(vals)
    worst, where = model.max_violation(out.vector(model))
    if worst > tol:
        raise EmbeddingInfeasible(f"embedded solution violates {where} by {worst!r}")
    return out
