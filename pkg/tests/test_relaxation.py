"""Continuous relaxation of the conic model never exceeds the exact optimum."""

import numpy as np
import pytest

from hubnet.errors import Infeasible
from hubnet.formulation import ConicModel, build_misocp
from hubnet.oracle import solve_exhaustive

from helpers import random_instance

cp = pytest.importorskip("cvxpy")


def _affine(x, expr):
    idx = [j for j, _ in expr.terms]
    coef = np.array([c for _, c in expr.terms])
    if not idx:
        return cp.Constant(expr.constant)
    return coef @ x[idx] + expr.constant


def relaxation_value(model: ConicModel) -> float:
    x = cp.Variable(len(model.variables))
    cons = [x >= 0]
    cons += [x[j] <= 1 for j in model.binary_indices]
    for row in model.rows:
        lhs = sum(c * x[j] for j, c in row.terms)
        cons.append({"=": lhs == row.rhs, "<=": lhs <= row.rhs, ">=": lhs >= row.rhs}[row.sense])
    for cone in model.cones:
        cons.append(cp.SOC(_affine(x, cone.e0), cp.hstack([_affine(x, cone.e1), _affine(x, cone.e2)])))
    obj = sum(c * x[j] for j, c in model.objective) + model.objective_constant
    prob = cp.Problem(cp.Minimize(obj), cons)
    prob.solve(solver=cp.CLARABEL)
    assert prob.status == cp.OPTIMAL
    return prob.value


def test_t1_relaxation_below_optimum(inst_t1):
    assert relaxation_value(build_misocp(inst_t1)) <= 61.25 + 1e-6


@pytest.mark.parametrize("seed", range(12))
def test_relaxation_is_a_lower_bound(seed):
    inst = random_instance(seed, n=5, h=3)
    try:
        _, bd = solve_exhaustive(inst)
    except Infeasible:
        pytest.skip("instance has no feasible design")
    for lb in (False, True):
        assert relaxation_value(build_misocp(inst, lower_bounds=lb)) <= bd.total + 1e-6 * max(1.0, bd.total)
