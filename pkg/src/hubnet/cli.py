"""Command-line entry point.

Machine-readable output is JSON; human summaries go to stdout and
diagnostics to stderr. Exit codes: 0 ok, 2 validation, 3 io, 4 engine
limit, 5 infeasible, 6 solver failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import statistics
import sys
import time
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .bridge import SolverAdapter, solve_external
from .core import CostBreakdown, Instance, Solution, evaluate, interhub_flows, validate_instance
from .errors import (
    AdapterConfigError,
    BudgetExceeded,
    EvaluationInfeasible,
    HubnetError,
    Infeasible,
    InstanceTooLarge,
    LimitReached,
    Mismatch,
    NoFeasibleSolution,
    ParseError,
    RoundingInfeasible,
    SolverFailure,
    SpecInfeasible,
    ValidationError,
)
from .formulation import INTRA_HUB_MODES, build_misocp
from .instgen import GenSpec, generate, homogenize
from .io import dumps_cbf, dumps_instance, dumps_ir_json, instance_from_dict, read_solution, write_solution
from .oracle import OracleBudget, solve_exhaustive
from .search import SearchConfig, solve_bnb, solve_heuristic

log = logging.getLogger("hubnet")

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_LIMIT, EXIT_INFEASIBLE, EXIT_SOLVER = 0, 2, 3, 4, 5, 6
ENGINES = ("oracle", "bnb", "heuristic", "external")
BUILTIN_PREFIX = "builtin:"

_EXIT_FOR = (
    (ValidationError, EXIT_VALIDATION),
    (ValueError, EXIT_VALIDATION),
    (ParseError, EXIT_IO),
    (OSError, EXIT_IO),
    (BudgetExceeded, EXIT_LIMIT),
    (LimitReached, EXIT_LIMIT),
    (InstanceTooLarge, EXIT_LIMIT),
    (Infeasible, EXIT_INFEASIBLE),
    (NoFeasibleSolution, EXIT_INFEASIBLE),
    (EvaluationInfeasible, EXIT_INFEASIBLE),
    (RoundingInfeasible, EXIT_INFEASIBLE),
    (SpecInfeasible, EXIT_INFEASIBLE),
    (SolverFailure, EXIT_SOLVER),
    (Mismatch, EXIT_SOLVER),
    (AdapterConfigError, EXIT_SOLVER),
)


def exit_code(exc: BaseException) -> int:
    for cls, code in _EXIT_FOR:
        if isinstance(exc, cls):
            return code
    return 1


@dataclass
class RunReport:
    engine: str
    wall_time: float
    breakdown: dict
    total: float
    optimal: bool | None
    gap: float | None
    solution_path: str | None
    instance_digest: str
    extra: dict | None = None


# -- helpers -----------------------------------------------------------------


def _read_bytes(path: str) -> bytes:
    if path.startswith(BUILTIN_PREFIX):
        name = path[len(BUILTIN_PREFIX) :]
        ref = resources.files("hubnet.data") / f"{name}.json"
        if not ref.is_file():
            raise FileNotFoundError(f"no bundled instance named {name!r}")
        return ref.read_bytes()
    return Path(path).read_bytes()


def _load_json(path: str):
    raw = _read_bytes(path)
    try:
        return json.loads(raw.decode("utf-8")), raw
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def load_instance(path: str) -> tuple[Instance, str]:
    """Instance and the sha256 digest of its file content."""
    data, raw = _load_json(path)
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    return instance_from_dict(data), hashlib.sha256(raw).hexdigest()


def _write_json(path: str | None, payload) -> None:
    text = json.dumps(payload, indent=1, sort_keys=False) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _adapter(args) -> SolverAdapter:
    if args.adapter:
        return SolverAdapter.from_file(args.adapter)
    if args.solver_command:
        return SolverAdapter(args.solver_command, timeout=args.solver_timeout)
    raise AdapterConfigError("--engine external needs --adapter CONFIG or --solver-command TEMPLATE")


def run_engine(inst: Instance, engine: str, args) -> tuple[Solution, CostBreakdown, bool | None, float | None, dict]:
    """Solve with one engine; the returned breakdown is always recomputed by core.evaluate."""
    extra: dict = {}
    if engine == "oracle":
        sol, _ = solve_exhaustive(inst, OracleBudget(max_nodes=args.oracle_max_nodes, max_candidates=args.oracle_max_candidates), workers=args.workers)
        optimal, gap = True, 0.0
    elif engine == "bnb":
        cfg = SearchConfig(
            time_limit=args.time_limit,
            gap=args.gap,
            node_limit=args.node_limit,
            branching=args.branching,
            leaf=args.leaf,
        )
        res = solve_bnb(inst, cfg)
        sol, optimal, gap = res.solution, res.optimal, res.gap
        extra["nodes"] = res.nodes
    elif engine == "heuristic":
        sol, _ = solve_heuristic(inst, seed=args.seed, iterations=args.iterations)
        optimal, gap = None, None
    elif engine == "external":
        res = solve_external(inst, _adapter(args), intra_hub=args.intra_hub, lower_bounds=args.lower_bounds)
        sol, optimal, gap = res.solution, None, None
        extra["reported_objective"] = res.reported_objective
    else:
        raise ValueError(f"unknown engine {engine!r}")
    return sol, evaluate(inst, sol), optimal, gap, extra


def plot_data(inst: Instance, sol: Solution) -> dict:
    v = interhub_flows(inst, sol)
    H = inst.hub_candidates
    xy = inst.coordinates
    hubs = []
    for k, l in sol.hub_level.items():
        entry = {"node": k, "level": l, "capacity": float(inst.capacities[l])}
        if xy is not None:
            entry["x"], entry["y"] = float(xy[k, 0]), float(xy[k, 1])
        hubs.append(entry)
    arcs = [
        {"from": H[a], "to": H[b], "flow": float(v[a, b])}
        for a in range(len(H))
        for b in range(len(H))
        if a != b and v[a, b] > 0
    ]
    out = {"hubs": hubs, "assignment": list(sol.assignment), "arcs": arcs}
    if xy is not None:
        out["nodes"] = [[float(x), float(y)] for x, y in xy]
    return out


# -- commands ----------------------------------------------------------------


def cmd_validate(args) -> int:
    try:
        data, _ = _load_json(args.instance)
        validate_instance(instance_from_dict(data, validate=False))
    except ValidationError as exc:
        if args.json:
            _write_json(None, {"valid": False, "violations": [v.as_dict() for v in exc.violations]})
        for v in exc.violations:
            print(str(v), file=sys.stderr)
        return EXIT_VALIDATION
    if args.json:
        _write_json(None, {"valid": True, "violations": []})
    else:
        print(f"{args.instance}: valid")
    return EXIT_OK


def cmd_solve(args) -> int:
    inst, digest = load_instance(args.instance)
    start = time.perf_counter()
    try:
        sol, bd, optimal, gap, extra = run_engine(inst, args.engine, args)
    except LimitReached as exc:
        if exc.incumbent is not None and args.solution:
            write_solution(exc.incumbent[0], args.solution, evaluate(inst, exc.incumbent[0]))
        raise
    wall = time.perf_counter() - start
    if args.solution:
        write_solution(sol, args.solution, bd)
        # a written solution must reload to the same breakdown
        read_solution(args.solution, inst)
    report = RunReport(args.engine, wall, bd.as_dict(), bd.total, optimal, gap, args.solution, digest, extra or None)
    _write_json(args.report, asdict(report))
    if args.report not in (None, "-"):
        print(f"{args.engine}: total {bd.total!r}, open hubs {list(sol.open_hubs)}, {wall:.3f} s")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    inst, _ = load_instance(args.instance)
    sol = read_solution(args.solution)
    bd = evaluate(inst, sol)
    _write_json(args.out, {"breakdown": bd.as_dict(), "total": bd.total})
    return EXIT_OK


def cmd_export(args) -> int:
    inst, _ = load_instance(args.instance)
    model = build_misocp(inst, intra_hub=args.intra_hub, lower_bounds=args.lower_bounds)
    text = dumps_cbf(model) if args.format == "cbf" else dumps_ir_json(model)
    Path(args.out).write_text(text, encoding="utf-8")
    print(f"wrote {args.format} with {len(model.variables)} variables, {len(model.rows)} rows, {len(model.cones)} cones to {args.out}")
    return EXIT_OK


def _gen_spec_from_args(args) -> GenSpec:
    spec = {}
    if args.genspec:
        data, _ = _load_json(args.genspec)
        spec.update(data)
    for key in ("seed", "node_count", "candidate_count", "flow_density", "g", "access_rate", "flow_scale"):
        val = getattr(args, key, None)
        if val is not None:
            spec[key] = val
    return GenSpec.from_dict(spec)


def cmd_generate(args) -> int:
    inst = generate(_gen_spec_from_args(args))
    text = dumps_instance(inst)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


def _scenario(inst: Instance, args) -> dict:
    start = time.perf_counter()
    try:
        sol, bd, optimal, gap, _ = run_engine(inst, args.engine, args)
    except LimitReached as exc:
        if exc.incumbent is None:
            raise
        sol, bd, optimal, gap = exc.incumbent[0], exc.incumbent[1], False, exc.gap
    return {
        "open_hubs": len(sol.open_hubs),
        "levels": {str(k): l for k, l in sol.hub_level.items()},
        "capacities": sorted(float(inst.capacities[l]) for l in sol.hub_level.values()),
        "breakdown": bd.as_dict(),
        "total": bd.total,
        "optimal": optimal,
        "gap": gap,
        "wall_time": time.perf_counter() - start,
        "plot": plot_data(inst, sol),
    }


def compare_instances(instances: list[tuple[str, Instance]], alpha0: float | None, args) -> dict:
    rows = []
    for label, inst in instances:
        a0 = float(inst.segments.alpha[0]) if alpha0 is None else alpha0
        het = _scenario(inst, args)
        hom = _scenario(homogenize(inst, a0), args)
        rows.append({"label": label, "alpha0": a0, "heterogeneous": het, "homogeneous": hom})
    het_counts = [r["heterogeneous"]["open_hubs"] for r in rows]
    hom_counts = [r["homogeneous"]["open_hubs"] for r in rows]
    return {
        "engine": args.engine,
        "runs": rows,
        "summary": {
            "median_open_heterogeneous": statistics.median(het_counts),
            "median_open_homogeneous": statistics.median(hom_counts),
            "seeds_with_fewer_or_equal_hubs": sum(a <= b for a, b in zip(het_counts, hom_counts)),
            "mean_capacity_heterogeneous": float(np.mean([np.mean(r["heterogeneous"]["capacities"]) for r in rows])),
            "mean_capacity_homogeneous": float(np.mean([np.mean(r["homogeneous"]["capacities"]) for r in rows])),
        },
    }


def cmd_compare(args) -> int:
    if args.alpha0 is not None and not args.alpha0 >= 0:
        raise ValueError(f"--alpha0 must be nonnegative, got {args.alpha0!r}")
    data, _ = _load_json(args.input)
    if isinstance(data, dict) and "flows" in data:
        instances = [(args.input, instance_from_dict(data))]
    else:
        base = GenSpec.from_dict(data)
        seeds = range(base.seed, base.seed + args.seeds)
        instances = [(f"seed {s}", generate(GenSpec.from_dict({**base.as_dict(), "seed": s}))) for s in seeds]
    report = compare_instances(instances, args.alpha0, args)
    _write_json(args.out, report)
    out = sys.stdout if args.out not in (None, "-") else sys.stderr
    print(f"{'run':<12} {'het hubs':>8} {'hom hubs':>8} {'het total':>14} {'hom total':>14}", file=out)
    for r in report["runs"]:
        h, m = r["heterogeneous"], r["homogeneous"]
        print(f"{r['label']:<12} {h['open_hubs']:>8} {m['open_hubs']:>8} {h['total']:>14.2f} {m['total']:>14.2f}", file=out)
    s = report["summary"]
    print(f"median open hubs: heterogeneous {s['median_open_heterogeneous']}, homogeneous {s['median_open_homogeneous']}", file=out)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _engine_flags(p: argparse.ArgumentParser, default: str) -> None:
    p.add_argument("--engine", choices=ENGINES, default=default)
    p.add_argument("--time-limit", type=float, default=None, help="bnb wall-clock limit in seconds")
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--gap", type=float, default=0.0, help="bnb relative optimality gap")
    p.add_argument("--branching", choices=("max-origin-coverage", "input-order"), default="max-origin-coverage")
    p.add_argument("--leaf", choices=("auto", "enumerate", "nested-bnb"), default="auto")
    p.add_argument("--seed", type=int, default=0, help="heuristic seed")
    p.add_argument("--iterations", type=int, default=10_000, help="heuristic accepted-move budget")
    p.add_argument("--workers", type=int, default=1, help="oracle worker processes")
    p.add_argument("--oracle-max-nodes", type=int, default=OracleBudget.max_nodes)
    p.add_argument("--oracle-max-candidates", type=int, default=OracleBudget.max_candidates)
    p.add_argument("--adapter", help="JSON file with command, exit_codes, timeout")
    p.add_argument("--solver-command", help="template with {model} and {solution}")
    p.add_argument("--solver-timeout", type=float, default=3600.0)
    p.add_argument("--intra-hub", choices=INTRA_HUB_MODES, default="self-pair")
    p.add_argument("--lower-bounds", action="store_true", help="add segment lower-bound rows to the exported model")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hubnet", description="Capacitated hub network design with congestion and segment costs.")
    ap.add_argument("--version", action="version", version=f"hubnet {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print JSON diagnostics on stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check an instance file")
    p.add_argument("instance", help=f"path, or {BUILTIN_PREFIX}NAME for a bundled instance")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", parents=[common], help="solve an instance and write a run report")
    p.add_argument("instance")
    _engine_flags(p, "bnb")
    p.add_argument("--solution", help="write the solution JSON here")
    p.add_argument("--report", help="write the run report JSON here (default stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("evaluate", parents=[common], help="price a solution file")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export", parents=[common], help="write the conic model")
    p.add_argument("instance")
    p.add_argument("--format", choices=("cbf", "ir-json"), default="cbf")
    p.add_argument("--out", required=True)
    p.add_argument("--intra-hub", choices=INTRA_HUB_MODES, default="self-pair")
    p.add_argument("--lower-bounds", action="store_true")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("generate", parents=[common], help="write a synthetic instance")
    p.add_argument("--genspec", help="GenSpec JSON; flags below override its fields")
    p.add_argument("--seed", type=int)
    p.add_argument("--node-count", dest="node_count", type=int)
    p.add_argument("--candidate-count", dest="candidate_count", type=int)
    p.add_argument("--flow-density", dest="flow_density", type=float)
    p.add_argument("--flow-scale", dest="flow_scale", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--access-rate", dest="access_rate", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("compare", parents=[common], help="heterogeneous versus homogeneous segment costs")
    p.add_argument("input", help="GenSpec JSON (a seeded family) or instance JSON")
    p.add_argument("--alpha0", type=float, default=None, help="homogeneous rate; default is the first segment's alpha")
    p.add_argument("--seeds", type=int, default=10, help="family size for a GenSpec input")
    _engine_flags(p, "heuristic")
    p.add_argument("--out", help="write the comparison JSON here (default stdout)")
    p.set_defaults(func=cmd_compare)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (HubnetError, ValueError, OSError) as exc:
        code = exit_code(exc)
        payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
        if isinstance(exc, ValidationError):
            payload["violations"] = [v.as_dict() for v in exc.violations]
        if isinstance(exc, LimitReached) and exc.incumbent is not None:
            payload["incumbent_total"] = exc.incumbent[1].total
            payload["gap"] = exc.gap
        if getattr(args, "json", False):
            _write_json(None, payload)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
