"""Run an external conic solver on the exported model through files and a child process."""

from __future__ import annotations

import json
import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .core import CostBreakdown, Instance, Solution, evaluate
from .errors import AdapterConfigError, EvaluationInfeasible, Mismatch, RoundingInfeasible, SolverFailure
from .formulation import ConicModel, VariableAssignment, build_misocp, var_name
from .io import read_solver_solution, write_cbf

TMPDIR_ENV = "HUBNET_TMPDIR"
TIMEOUT_ENV = "HUBNET_SOLVER_TIMEOUT"
MISMATCH_RTOL = 1e-4


@dataclass(frozen=True)
class SolverAdapter:
    """How to launch a solver.

    ``command`` is a shell-style template; ``{model}`` is replaced by the CBF
    path and ``{solution}`` by the path the solver must write its
    ``name value`` lines to. Each placeholder must appear exactly once.
    """

    command: str
    exit_codes: tuple[int, ...] = (0,)
    timeout: float | None = 3600.0

    def __post_init__(self):
        object.__setattr__(self, "exit_codes", tuple(int(c) for c in self.exit_codes))
        for key in ("{model}", "{solution}"):
            count = self.command.count(key)
            if count != 1:
                raise AdapterConfigError(f"command template must contain {key} exactly once, found {count}")
        try:
            shlex.split(self.command)
        except ValueError as exc:
            raise AdapterConfigError(f"command template does not parse: {exc}") from exc
        if not self.exit_codes:
            raise AdapterConfigError("exit_codes must not be empty")
        if self.timeout is not None and not self.timeout > 0:
            raise AdapterConfigError("timeout must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "SolverAdapter":
        if not isinstance(data, dict) or "command" not in data:
            raise AdapterConfigError("adapter config needs a 'command' entry")
        extra = set(data) - {"command", "exit_codes", "timeout"}
        if extra:
            raise AdapterConfigError(f"unknown adapter keys: {', '.join(sorted(extra))}")
        return cls(str(data["command"]), tuple(data.get("exit_codes", (0,))), data.get("timeout", 3600.0))

    @classmethod
    def from_file(cls, path) -> "SolverAdapter":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise AdapterConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(data)

    def argv(self, model: Path, solution: Path) -> list[str]:
        parts = shlex.split(self.command)
        return [p.replace("{model}", str(model)).replace("{solution}", str(solution)) for p in parts]

    def effective_timeout(self) -> float | None:
        raw = os.environ.get(TIMEOUT_ENV)
        if raw:
            try:
                val = float(raw)
            except ValueError as exc:
                raise AdapterConfigError(f"{TIMEOUT_ENV}={raw!r} is not a number") from exc
            return val if val > 0 else None
        return self.timeout


@dataclass(frozen=True)
class ExternalResult:
    solution: Solution
    breakdown: CostBreakdown
    reported_objective: float

    @property
    def recomputed_objective(self) -> float:
        return self.breakdown.total

    def __iter__(self):
        return iter((self.solution, self.breakdown, self.reported_objective))


def round_solution(inst: Instance, model: ConicModel, values: VariableAssignment) -> Solution:
    """Design encoded by the x and t binaries after rounding at 0.5."""
    val = values.values
    H = inst.hub_candidates
    levels = {}
    for k in H:
        on = [l for l in range(inst.level_count) if val[var_name("t", (k, l))] >= 0.5]
        if len(on) > 1:
            raise RoundingInfeasible(f"hub {k} has {len(on)} active levels after rounding")
        if on:
            levels[k] = on[0]
    assignment = []
    for i in range(inst.node_count):
        hubs = [k for k in H if val[var_name("x", (i, k))] >= 0.5]
        if len(hubs) != 1:
            raise RoundingInfeasible(f"node {i} is allocated to {len(hubs)} hubs after rounding")
        k = hubs[0]
        if k not in levels:
            raise RoundingInfeasible(f"node {i} is allocated to hub {k}, which has no active level")
        assignment.append(k)
    for k in levels:
        if assignment[k] != k:
            raise RoundingInfeasible(f"open hub {k} is allocated to hub {assignment[k]}")
    return Solution(tuple(assignment), levels)


def _workdir():
    base = os.environ.get(TMPDIR_ENV) or None
    if base is not None:
        Path(base).mkdir(parents=True, exist_ok=True)
    return tempfile.TemporaryDirectory(prefix="hubnet-", dir=base)


def solve_external(inst: Instance, adapter: SolverAdapter, *, intra_hub: str = "self-pair", lower_bounds: bool = False) -> ExternalResult:
    """Export, run the solver, and lift its answer back to a checked design.

    The recomputed breakdown is authoritative; the solver's objective (its
    own report, or the model objective at its values) must agree within
    ``MISMATCH_RTOL`` relative or ``Mismatch`` is raised.
    """
    model = build_misocp(inst, intra_hub=intra_hub, lower_bounds=lower_bounds)
    timeout = adapter.effective_timeout()
    with _workdir() as tmp:
        model_path = Path(tmp) / "model.cbf"
        sol_path = Path(tmp) / "solution.txt"
        write_cbf(model, model_path)
        argv = adapter.argv(model_path, sol_path)
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        except FileNotFoundError as exc:
            raise SolverFailure(f"solver executable not found: {argv[0]}") from exc
        except subprocess.TimeoutExpired as exc:
            raise SolverFailure(f"solver exceeded the {timeout} s timeout") from exc
        if proc.returncode not in adapter.exit_codes:
            tail = (proc.stderr or proc.stdout or "").strip().splitlines()[-5:]
            raise SolverFailure(f"solver exited with status {proc.returncode}: " + " | ".join(tail))
        if not sol_path.exists():
            raise SolverFailure("solver finished without writing a solution file")
        values = read_solver_solution(sol_path, model)
    sol = round_solution(inst, model, values)
    try:
        breakdown = evaluate(inst, sol)
    except EvaluationInfeasible as exc:
        raise RoundingInfeasible(f"rounded design is infeasible: {exc}") from exc
    reported = values.reported_objective
    if reported is None:
        reported = values.objective(model)
    total = breakdown.total
    if abs(reported - total) > MISMATCH_RTOL * max(1.0, abs(total)):
        raise Mismatch(f"solver objective {reported!r} differs from recomputed total {total!r}", reported, total)
    return ExternalResult(sol, breakdown, float(reported))
