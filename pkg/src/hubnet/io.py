"""File formats: instance and solution JSON, CBF v3 export/import, JSON IR, solver solution text.

Instance JSON::

    {
      "nodes": 3,
      "flows": [[0, 5, 5], [3, 0, 2], [4, 1, 0]],      # or {"sparse": [[i, j, w], ...]}
      "hubs": [0, 1],
      "access_cost": [[0, 8], [8, 0], [3, 4]],         # nodes x hubs
      "hub_distance": [[0, 2], [2, 0]],                # hubs x hubs
      "levels": [{"q": 100, "f": 50}],                 # f: scalar or one value per hub
      "segments": {"beta": [10], "alpha": [1], "U": [1000]},
      "segment_overrides": [{"from": 0, "to": 1, "beta": [...], "alpha": [...], "U": [...]}],
      "g": 1,                                          # scalar or one value per hub
      "coordinates": [[x, y], ...],                    # optional
      "zero_diagonal": false                           # optional, drops w_ii on load
    }

A bare list of ``[i, j, w]`` triplets is also read as sparse flows when it is
not shaped like a dense ``nodes x nodes`` matrix.

Solver solution text: one ``name value`` pair per line, ``#`` starts a
comment, and an optional ``objective value`` line reports the solver's
objective.
"""

from __future__ import annotations

import json
import logging
import math
import re
from pathlib import Path

import numpy as np

from .core import CapacityLevel, CostBreakdown, Instance, SegmentSchedule, Solution, evaluate, validate_instance
from .errors import Mismatch, MissingVariable, ParseError
from .formulation import AffineExpr, Cone, ConicModel, LinearRow, Variable, VariableAssignment

log = logging.getLogger(__name__)

_SENSE_TO_DOMAIN = {"=": "L=", "<=": "L-", ">=": "L+"}
_DOMAIN_TO_SENSE = {v: k for k, v in _SENSE_TO_DOMAIN.items()}
_NAME_RE = re.compile(r"^([A-Za-z])\(([-\d,]*)\)$")


def _num(x: float) -> str:
    return repr(float(x))


def _read_json(path) -> dict:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    return data


def _write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


# -- instances ---------------------------------------------------------------


class _Doc:
    """Key access with path context for error messages."""

    def __init__(self, data: dict, where: str = ""):
        self.data = data
        self.where = where

    def key(self, name: str):
        return f"{self.where}.{name}" if self.where else name

    def get(self, name: str, default=...):
        if name not in self.data:
            if default is ...:
                raise ParseError(f"missing key '{self.key(name)}'")
            return default
        return self.data[name]

    def array(self, name: str, ndim: int, default=...) -> np.ndarray:
        raw = self.get(name, default)
        if raw is None:
            return None
        try:
            arr = np.array(raw, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"key '{self.key(name)}': expected a numeric array ({exc})") from exc
        if arr.ndim != ndim and arr.size:
            raise ParseError(f"key '{self.key(name)}': expected {ndim}-D array, got {arr.ndim}-D")
        return arr

    def number(self, name: str, default=...) -> float:
        raw = self.get(name, default)
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ParseError(f"key '{self.key(name)}': expected a number, got {raw!r}")
        return float(raw)


def _per_hub(doc: _Doc, name: str, h: int) -> tuple[float, ...]:
    raw = doc.get(name)
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return (float(raw),) * h
    arr = doc.array(name, 1)
    return tuple(float(x) for x in arr)


def _flows(doc: _Doc, n: int) -> np.ndarray:
    raw = doc.get("flows")
    triplets = None
    if isinstance(raw, dict):
        triplets = _Doc(raw, "flows").get("sparse")
    elif isinstance(raw, list) and not (len(raw) == n and all(isinstance(r, list) and len(r) == n for r in raw)):
        triplets = raw
    if triplets is None:
        w = doc.array("flows", 2)
        if w.shape != (n, n):
            raise ParseError(f"key 'flows': expected {n}x{n} matrix, got shape {w.shape}")
        return w
    w = np.zeros((n, n))
    for t, entry in enumerate(triplets):
        if not (isinstance(entry, list) and len(entry) == 3):
            raise ParseError(f"key 'flows[{t}]': expected [i, j, w] triplet")
        i, j, val = entry
        if not (isinstance(i, int) and isinstance(j, int) and 0 <= i < n and 0 <= j < n):
            raise ParseError(f"key 'flows[{t}]': node indices out of range")
        w[i, j] += float(val)
    return w


def _schedule(doc: _Doc) -> SegmentSchedule:
    beta = doc.array("beta", 1)
    alpha = doc.array("alpha", 1)
    upper = doc.array("U", 1)
    if not (len(beta) == len(alpha) == len(upper)):
        raise ParseError(f"key '{doc.where}': beta, alpha and U must have equal length")
    if "L" in doc.data:
        lower = doc.array("L", 1)
        return SegmentSchedule(tuple(beta), tuple(alpha), tuple(lower), tuple(upper))
    return SegmentSchedule.from_upper(beta, alpha, upper)


def instance_from_dict(data: dict, *, validate: bool = True) -> Instance:
    doc = _Doc(data)
    n = doc.get("nodes")
    if isinstance(n, bool) or not isinstance(n, int) or n <= 0:
        raise ParseError(f"key 'nodes': expected a positive integer, got {n!r}")
    hubs = doc.get("hubs")
    if not isinstance(hubs, list) or not all(isinstance(k, int) and not isinstance(k, bool) for k in hubs):
        raise ParseError("key 'hubs': expected a list of node indices")
    h = len(hubs)
    w = _flows(doc, n)
    if doc.get("zero_diagonal", False):
        np.fill_diagonal(w, 0.0)
    levels_raw = doc.get("levels")
    if not isinstance(levels_raw, list):
        raise ParseError("key 'levels': expected a list")
    levels = []
    for l, lv in enumerate(levels_raw):
        if not isinstance(lv, dict):
            raise ParseError(f"key 'levels[{l}]': expected an object")
        ld = _Doc(lv, f"levels[{l}]")
        levels.append(CapacityLevel(ld.number("q"), _per_hub(ld, "f", h)))
    seg_raw = doc.get("segments")
    if not isinstance(seg_raw, dict):
        raise ParseError("key 'segments': expected an object")
    overrides = {}
    for t, ov in enumerate(doc.get("segment_overrides", [])):
        od = _Doc(ov, f"segment_overrides[{t}]")
        overrides[int(od.number("from")), int(od.number("to"))] = _schedule(od)
    g = _per_hub(doc, "g", h)
    inst = Instance(
        flows=w,
        hub_candidates=tuple(hubs),
        access_cost=doc.array("access_cost", 2),
        hub_distance=doc.array("hub_distance", 2),
        levels=tuple(levels),
        segments=_schedule(_Doc(seg_raw, "segments")),
        congestion_factor=np.array(g, dtype=float),
        segment_overrides=overrides,
        coordinates=doc.array("coordinates", 2, None),
        name=str(doc.get("name", "")),
    )
    return validate_instance(inst) if validate else inst


def read_instance(path, *, validate: bool = True) -> Instance:
    """Load and validate an instance file; scalar ``f`` and ``g`` are broadcast over hubs."""
    return instance_from_dict(_read_json(path), validate=validate)


def _schedule_dict(sch: SegmentSchedule) -> dict:
    return {"beta": list(sch.beta), "alpha": list(sch.alpha), "U": list(sch.upper)}


def instance_to_dict(inst: Instance) -> dict:
    data = {
        "name": inst.name,
        "nodes": inst.node_count,
        "hubs": list(inst.hub_candidates),
        "flows": inst.flows.tolist(),
        "access_cost": inst.access_cost.tolist(),
        "hub_distance": inst.hub_distance.tolist(),
        "levels": [{"q": lv.capacity, "f": list(lv.fixed_cost)} for lv in inst.levels],
        "segments": _schedule_dict(inst.segments),
        "g": inst.congestion_factor.tolist(),
    }
    if inst.segment_overrides:
        data["segment_overrides"] = [
            {"from": k, "to": m, **_schedule_dict(s)} for (k, m), s in inst.segment_overrides.items()
        ]
    if inst.coordinates is not None:
        data["coordinates"] = inst.coordinates.tolist()
    return data


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=1) + "\n"


def write_instance(inst: Instance, path) -> None:
    _write_text(path, dumps_instance(inst))


# -- solutions ---------------------------------------------------------------


def solution_to_dict(sol: Solution, breakdown: CostBreakdown | None = None) -> dict:
    data = {
        "assignment": list(sol.assignment),
        "open_hubs": [{"hub": k, "level": l} for k, l in sol.hub_level.items()],
    }
    if breakdown is not None:
        data["breakdown"] = breakdown.as_dict()
    return data


def write_solution(sol: Solution, path, breakdown: CostBreakdown | None = None) -> None:
    _write_text(path, json.dumps(solution_to_dict(sol, breakdown), indent=1) + "\n")


def solution_from_dict(data: dict, inst: Instance | None = None, tol: float = 1e-6) -> Solution:
    doc = _Doc(data)
    assignment = doc.get("assignment")
    if not isinstance(assignment, list):
        raise ParseError("key 'assignment': expected a list of hub indices")
    hubs = {}
    for t, entry in enumerate(doc.get("open_hubs")):
        ed = _Doc(entry, f"open_hubs[{t}]")
        hubs[int(ed.number("hub"))] = int(ed.number("level"))
    sol = Solution(tuple(int(k) for k in assignment), hubs)
    if inst is not None and "breakdown" in data:
        recorded = data["breakdown"]
        actual = evaluate(inst, sol).as_dict()
        for key, val in actual.items():
            if key in recorded and abs(float(recorded[key]) - val) > tol * max(1.0, abs(val)):
                raise Mismatch(f"recorded {key} {recorded[key]!r} differs from re-evaluation {val!r}", float(recorded[key]), val)
    return sol


def read_solution(path, inst: Instance | None = None) -> Solution:
    """Load a solution file; with ``inst`` given, a recorded breakdown must match re-evaluation."""
    return solution_from_dict(_read_json(path), inst)


# -- conic IR ----------------------------------------------------------------


def _expr_dict(e: AffineExpr) -> dict:
    return {"terms": [[j, c] for j, c in e.terms], "constant": e.constant}


def model_to_dict(model: ConicModel) -> dict:
    return {
        "format": "hubnet-conic-ir",
        "version": 1,
        "intra_hub": model.intra_hub,
        "lower_bounds": model.lower_bounds,
        "variables": [{"name": v.name, "kind": v.kind, "role": v.role, "index": list(v.index)} for v in model.variables],
        "objective": {"sense": "min", "terms": [[j, c] for j, c in model.objective], "constant": model.objective_constant},
        "rows": [{"name": r.name, "sense": r.sense, "rhs": r.rhs, "terms": [[j, c] for j, c in r.terms]} for r in model.rows],
        "cones": [
            {"name": c.name, "e0": _expr_dict(c.e0), "e1": _expr_dict(c.e1), "e2": _expr_dict(c.e2)} for c in model.cones
        ],
    }


def _terms_from(raw) -> tuple[tuple[int, float], ...]:
    return tuple((int(j), float(c)) for j, c in raw)


def model_from_dict(data: dict) -> ConicModel:
    doc = _Doc(data)
    if doc.get("format") != "hubnet-conic-ir":
        raise ParseError("key 'format': not a hubnet conic IR document")
    try:
        variables = tuple(Variable(v["name"], v["kind"], v["role"], tuple(v["index"])) for v in doc.get("variables"))
        obj = doc.get("objective")
        rows = tuple(LinearRow(r["name"], _terms_from(r["terms"]), r["sense"], float(r["rhs"])) for r in doc.get("rows"))
        cones = tuple(
            Cone(
                c["name"],
                *(AffineExpr(_terms_from(c[e]["terms"]), float(c[e]["constant"])) for e in ("e0", "e1", "e2")),
            )
            for c in doc.get("cones")
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed IR entry: {exc!r}") from exc
    return ConicModel(
        variables,
        _terms_from(obj["terms"]),
        rows,
        cones,
        float(obj.get("constant", 0.0)),
        str(doc.get("intra_hub", "self-pair")),
        bool(doc.get("lower_bounds", False)),
    )


def dumps_ir_json(model: ConicModel) -> str:
    return json.dumps(model_to_dict(model), separators=(",", ":")) + "\n"


def write_ir_json(model: ConicModel, path) -> None:
    _write_text(path, dumps_ir_json(model))


def read_ir_json(path) -> ConicModel:
    return model_from_dict(_read_json(path))


# -- CBF ---------------------------------------------------------------------


def dumps_cbf(model: ConicModel) -> str:
    """CBF version 3 text for ``model``.

    Binary variables become INT variables with an extra ``x - 1 <= 0`` row
    each, placed after the model rows. Names and metadata ride along in
    leading ``#`` comments so that :func:`parse_cbf` can rebuild the IR.
    """
    out: list[str] = []
    emit = out.append
    emit("# hubnet conic model")
    emit(f"# intra_hub {model.intra_hub}")
    emit(f"# lower_bounds {int(model.lower_bounds)}")
    emit(f"# model_rows {len(model.rows)}")
    for j, v in enumerate(model.variables):
        emit(f"# var {j} {v.kind} {v.name}")
    for r, row in enumerate(model.rows):
        emit(f"# row {r} {row.name}")
    for c, cone in enumerate(model.cones):
        emit(f"# cone {c} {cone.name}")
    emit("VER")
    emit("3")
    emit("")
    emit("OBJSENSE")
    emit("MIN")
    emit("")
    nvar = len(model.variables)
    emit("VAR")
    emit(f"{nvar} {1 if nvar else 0}")
    if nvar:
        emit(f"L+ {nvar}")
    emit("")
    binaries = model.binary_indices
    if binaries:
        emit("INT")
        emit(str(len(binaries)))
        out.extend(str(j) for j in binaries)
        emit("")

    # (domain, terms, constant) per affine row
    affine: list[tuple[str, tuple, float]] = []
    for row in model.rows:
        affine.append((_SENSE_TO_DOMAIN[row.sense], row.terms, -row.rhs))
    for j in binaries:
        affine.append(("L-", ((j, 1.0),), -1.0))
    cone_start = len(affine)
    for cone in model.cones:
        for e in cone.members:
            affine.append(("Q", e.terms, e.constant))

    chunks: list[tuple[str, int]] = []
    for dom, _, _ in affine[:cone_start]:
        if chunks and chunks[-1][0] == dom:
            chunks[-1] = (dom, chunks[-1][1] + 1)
        else:
            chunks.append((dom, 1))
    chunks.extend(("Q", 3) for _ in model.cones)
    if affine:
        emit("CON")
        emit(f"{len(affine)} {len(chunks)}")
        out.extend(f"{dom} {size}" for dom, size in chunks)
        emit("")

    if model.objective:
        emit("OBJACOORD")
        emit(str(len(model.objective)))
        out.extend(f"{j} {_num(c)}" for j, c in model.objective)
        emit("")
    if model.objective_constant:
        emit("OBJBCOORD")
        emit(_num(model.objective_constant))
        emit("")
    acoord = [(r, j, c) for r, (_, terms, _) in enumerate(affine) for j, c in terms]
    if acoord:
        emit("ACOORD")
        emit(str(len(acoord)))
        out.extend(f"{r} {j} {_num(c)}" for r, j, c in acoord)
        emit("")
    bcoord = [(r, b) for r, (_, _, b) in enumerate(affine) if b != 0.0]
    if bcoord:
        emit("BCOORD")
        emit(str(len(bcoord)))
        out.extend(f"{r} {_num(b)}" for r, b in bcoord)
        emit("")
    return "\n".join(out) + "\n"


def write_cbf(model: ConicModel, path) -> None:
    _write_text(path, dumps_cbf(model))


def _parse_index(name: str) -> tuple[str, tuple[int, ...]]:
    m = _NAME_RE.match(name)
    if not m:
        return "", ()
    idx = tuple(int(x) for x in m.group(2).split(",") if x)
    return m.group(1), idx


def parses_cbf(text: str, source: str = "<string>") -> ConicModel:
    meta: dict[str, str] = {}
    var_meta: dict[int, tuple[str, str]] = {}
    row_names: dict[int, str] = {}
    cone_names: dict[int, str] = {}
    tokens: list[tuple[int, str]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if stripped.startswith("#"):
            parts = stripped[1:].split()
            if len(parts) >= 2 and parts[0] in ("intra_hub", "lower_bounds", "model_rows"):
                meta[parts[0]] = parts[1]
            elif len(parts) == 4 and parts[0] == "var":
                var_meta[int(parts[1])] = (parts[2], parts[3])
            elif len(parts) == 3 and parts[0] == "row":
                row_names[int(parts[1])] = parts[2]
            elif len(parts) == 3 and parts[0] == "cone":
                cone_names[int(parts[1])] = parts[2]
            continue
        if stripped:
            tokens.append((lineno, stripped))

    pos = 0

    def next_line() -> tuple[int, str]:
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError(f"{source}: unexpected end of file")
        tok = tokens[pos]
        pos += 1
        return tok

    def ints(line: tuple[int, str], count: int) -> list[int]:
        parts = line[1].split()
        try:
            vals = [int(p) for p in parts]
        except ValueError as exc:
            raise ParseError(f"{source}: line {line[0]}: expected integers, got {line[1]!r}") from exc
        if len(vals) != count:
            raise ParseError(f"{source}: line {line[0]}: expected {count} integers")
        return vals

    def coords(line: tuple[int, str], nint: int) -> tuple[list[int], float]:
        parts = line[1].split()
        if len(parts) != nint + 1:
            raise ParseError(f"{source}: line {line[0]}: expected {nint} indices and a value")
        try:
            return [int(p) for p in parts[:nint]], float(parts[nint])
        except ValueError as exc:
            raise ParseError(f"{source}: line {line[0]}: bad coordinate {line[1]!r}") from exc

    nvar = 0
    int_vars: set[int] = set()
    domains: list[str] = []
    objective: dict[int, float] = {}
    obj_const = 0.0
    acoord: dict[int, dict[int, float]] = {}
    bcoord: dict[int, float] = {}
    while pos < len(tokens):
        lineno, key = next_line()
        if key == "VER":
            ver = ints(next_line(), 1)[0]
            if ver > 3:
                raise ParseError(f"{source}: line {lineno}: unsupported CBF version {ver}")
        elif key == "OBJSENSE":
            sense = next_line()[1]
            if sense != "MIN":
                raise ParseError(f"{source}: line {lineno}: only MIN objectives are supported")
        elif key == "VAR":
            nvar, nchunks = ints(next_line(), 2)
            seen = 0
            for _ in range(nchunks):
                line = next_line()
                parts = line[1].split()
                if len(parts) != 2 or parts[0] != "L+":
                    raise ParseError(f"{source}: line {line[0]}: only L+ variable domains are supported")
                seen += int(parts[1])
            if seen != nvar:
                raise ParseError(f"{source}: line {lineno}: VAR chunks cover {seen} of {nvar} variables")
        elif key == "INT":
            count = ints(next_line(), 1)[0]
            for _ in range(count):
                int_vars.add(ints(next_line(), 1)[0])
        elif key == "CON":
            ncon, nchunks = ints(next_line(), 2)
            for _ in range(nchunks):
                line = next_line()
                parts = line[1].split()
                if len(parts) != 2 or parts[0] not in ("L=", "L-", "L+", "Q"):
                    raise ParseError(f"{source}: line {line[0]}: unsupported constraint domain {line[1]!r}")
                size = int(parts[1])
                if parts[0] == "Q" and size != 3:
                    raise ParseError(f"{source}: line {line[0]}: only 3-dimensional quadratic cones are supported")
                if parts[0] == "Q":
                    domains.extend(["Q0", "Q", "Q"])
                else:
                    domains.extend([parts[0]] * size)
            if len(domains) != ncon:
                raise ParseError(f"{source}: line {lineno}: CON chunks cover {len(domains)} of {ncon} rows")
        elif key == "OBJACOORD":
            for _ in range(ints(next_line(), 1)[0]):
                (j,), c = coords(next_line(), 1)
                objective[j] = objective.get(j, 0.0) + c
        elif key == "OBJBCOORD":
            line = next_line()
            try:
                obj_const = float(line[1])
            except ValueError as exc:
                raise ParseError(f"{source}: line {line[0]}: bad objective constant") from exc
        elif key == "ACOORD":
            for _ in range(ints(next_line(), 1)[0]):
                (r, j), c = coords(next_line(), 2)
                acoord.setdefault(r, {})
                acoord[r][j] = acoord[r].get(j, 0.0) + c
        elif key == "BCOORD":
            for _ in range(ints(next_line(), 1)[0]):
                (r,), b = coords(next_line(), 1)
                bcoord[r] = bcoord.get(r, 0.0) + b
        else:
            raise ParseError(f"{source}: line {lineno}: unknown section {key!r}")

    for j in list(objective) + [j for r in acoord.values() for j in r]:
        if not 0 <= j < nvar:
            raise ParseError(f"{source}: variable index {j} out of range")

    variables = []
    for j in range(nvar):
        if j in var_meta:
            kind, name = var_meta[j]
        else:
            kind, name = ("binary" if j in int_vars else "continuous"), f"v{j}"
        role, idx = _parse_index(name)
        variables.append(Variable(name, kind, role, idx))

    def expr(r: int) -> tuple[tuple[tuple[int, float], ...], float]:
        terms = tuple(sorted((j, c) for j, c in acoord.get(r, {}).items()))
        return terms, bcoord.get(r, 0.0)

    n_model_rows = int(meta["model_rows"]) if "model_rows" in meta else None
    rows, cones = [], []
    linear_seen = 0
    r = 0
    while r < len(domains):
        dom = domains[r]
        if dom == "Q0":
            members = [AffineExpr(*expr(r + t)) for t in range(3)]
            cones.append(Cone(cone_names.get(len(cones), f"cone{len(cones)}"), *members))
            r += 3
            continue
        if n_model_rows is None or linear_seen < n_model_rows:
            terms, b = expr(r)
            rows.append(LinearRow(row_names.get(len(rows), f"row{len(rows)}"), terms, _DOMAIN_TO_SENSE[dom], -b + 0.0))
        linear_seen += 1
        r += 1
    return ConicModel(
        tuple(variables),
        tuple(sorted(objective.items())),
        tuple(rows),
        tuple(cones),
        obj_const,
        meta.get("intra_hub", "self-pair"),
        bool(int(meta.get("lower_bounds", "0"))),
    )


def parse_cbf(path) -> ConicModel:
    """Read a CBF file; inverts :func:`write_cbf` on files written by this package."""
    path = Path(path)
    return parses_cbf(path.read_text(encoding="utf-8"), str(path))


# -- solver solution text ----------------------------------------------------


def parse_solver_solution(text: str, model: ConicModel, source: str = "<string>") -> VariableAssignment:
    values: dict[str, float] = {}
    reported = None
    known = model.index
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 2:
            raise ParseError(f"{source}: line {lineno}: expected 'name value', got {body!r}")
        name, raw = parts
        try:
            val = float(raw)
        except ValueError as exc:
            raise ParseError(f"{source}: line {lineno}: bad value {raw!r}") from exc
        if not math.isfinite(val):
            raise ParseError(f"{source}: line {lineno}: value for {name} is not finite")
        if name == "objective":
            reported = val
        elif name in known:
            values[name] = val
        else:
            log.warning("%s: line %d: ignoring unknown variable %s", source, lineno, name)
    missing = [v.name for v in model.variables if v.name not in values]
    if missing:
        shown = ", ".join(missing[:5]) + (" ..." if len(missing) > 5 else "")
        raise MissingVariable(f"{source}: {len(missing)} model variable(s) missing: {shown}")
    return VariableAssignment(values, reported)


def read_solver_solution(path, model: ConicModel) -> VariableAssignment:
    """Read a ``name value`` solution file; unknown names are ignored with a warning."""
    path = Path(path)
    return parse_solver_solution(path.read_text(encoding="utf-8"), model, str(path))


def write_solver_solution(values: dict[str, float], path, objective: float | None = None) -> None:
    lines = []
    if objective is not None:
        lines.append(f"objective {_num(objective)}")
    lines.extend(f"{name} {_num(val)}" for name, val in values.items())
    _write_text(path, "\n".join(lines) + "\n")


__all__ = [
    "dumps_cbf",
    "dumps_instance",
    "dumps_ir_json",
    "instance_from_dict",
    "instance_to_dict",
    "model_from_dict",
    "model_to_dict",
    "parse_cbf",
    "parse_solver_solution",
    "parses_cbf",
    "read_instance",
    "read_ir_json",
    "read_solution",
    "read_solver_solution",
    "solution_from_dict",
    "solution_to_dict",
    "write_cbf",
    "write_instance",
    "write_ir_json",
    "write_solution",
    "write_solver_solution",
]
