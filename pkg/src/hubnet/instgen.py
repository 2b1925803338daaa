"""Seeded synthetic instances and the homogeneous-scale baseline.

Randomness comes from the Philox-4x64 counter-based generator, read through
its raw 64-bit output only: a uniform draw is ``(raw >> 11) * 2**-53``. The
seed goes through ``numpy.random.SeedSequence``. Neither step depends on the
platform or on numpy's distribution algorithms, so a seed reproduces the
same instance everywhere.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .core import CapacityLevel, Instance, SegmentSchedule, validate_instance
from .errors import SpecInfeasible, ValidationError

DEFAULT_CAPACITY = (10000.0, 15000.0, 20000.0)
DEFAULT_FIXED = (12.5, 12.5, 10.0)
DEFAULT_BETA = (500.0, 800.0)
DEFAULT_ALPHA = (0.108, 0.056)
DEFAULT_UPPER = (72.0, 126.0)

MAX_RETRIES = 100


@dataclass(frozen=True)
class GenSpec:
    """Parameters of the synthetic family.

    ``flow_scale`` maps the bounds of ``segment_upper`` onto synthetic flow
    units: bounds are multiplied and variable rates divided by it, fixed
    rates are kept. ``None`` picks the smallest scale at which the top
    segment carries the whole demand, so segment coverage never rules out a
    design.
    """

    seed: int = 0
    node_count: int = 20
    candidate_count: int = 6
    plane_size: float = 100.0
    flow_density: float = 0.5
    flow_range: tuple[float, float] = (40.0, 400.0)
    level_capacity: tuple[float, ...] = DEFAULT_CAPACITY
    level_fixed: tuple[float, ...] = DEFAULT_FIXED
    segment_beta: tuple[float, ...] = DEFAULT_BETA
    segment_alpha: tuple[float, ...] = DEFAULT_ALPHA
    segment_upper: tuple[float, ...] = DEFAULT_UPPER
    flow_scale: float | None = None
    g: float = 2000.0
    access_rate: float = 0.01
    name: str = ""

    def __post_init__(self):
        for name in ("flow_range", "level_capacity", "level_fixed", "segment_beta", "segment_alpha", "segment_upper"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        problems = []
        if self.node_count < 1:
            problems.append("node_count must be positive")
        if not 1 <= self.candidate_count <= self.node_count:
            problems.append("candidate_count must lie in [1, node_count]")
        if not self.plane_size > 0:
            problems.append("plane_size must be positive")
        if not 0 <= self.flow_density <= 1:
            problems.append("flow_density must lie in [0, 1]")
        lo, hi = self.flow_range if len(self.flow_range) == 2 else (-1.0, -1.0)
        if not 0 < lo <= hi:
            problems.append("flow_range must be (low, high) with 0 < low <= high")
        if not self.level_capacity or len(self.level_capacity) != len(self.level_fixed):
            problems.append("level_capacity and level_fixed need equal nonzero length")
        if any(q <= 0 for q in self.level_capacity) or any(f < 0 for f in self.level_fixed):
            problems.append("capacities must be positive and fixed costs nonnegative")
        if not len(self.segment_beta) == len(self.segment_alpha) == len(self.segment_upper) >= 1:
            problems.append("segment_beta, segment_alpha and segment_upper need equal nonzero length")
        if self.flow_scale is not None and not self.flow_scale > 0:
            problems.append("flow_scale must be positive")
        if self.g < 0 or self.access_rate < 0:
            problems.append("g and access_rate must be nonnegative")
        if problems:
            raise ValueError("; ".join(problems))

    @classmethod
    def from_dict(cls, data: dict) -> "GenSpec":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown GenSpec fields: {', '.join(unknown)}")
        return cls(**data)

    def as_dict(self) -> dict:
        out = asdict(self)
        for k, v in out.items():
            if isinstance(v, tuple):
                out[k] = list(v)
        return out


class _Stream:
    def __init__(self, seed: int, attempt: int):
        self._bits = np.random.Philox(np.random.SeedSequence([int(seed), int(attempt)]))

    def uniform(self, size: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        raw = self._bits.random_raw(size)
        unit = (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return low + (high - low) * unit

    def choice(self, n: int, k: int) -> list[int]:
        """``k`` distinct items of ``range(n)`` by a seeded partial shuffle."""
        items = list(range(n))
        draws = self.uniform(k)
        for j in range(k):
            pick = j + min(int(draws[j] * (n - j)), n - j - 1)
            items[j], items[pick] = items[pick], items[j]
        return sorted(items[:k])


def _draw(spec: GenSpec, attempt: int) -> Instance:
    rs = _Stream(spec.seed, attempt)
    n, h = spec.node_count, spec.candidate_count
    xy = rs.uniform(2 * n, 0.0, spec.plane_size).reshape(n, 2)
    present = rs.uniform(n * n) < spec.flow_density
    size = rs.uniform(n * n, *spec.flow_range)
    w = np.where(present, size, 0.0).reshape(n, n)
    np.fill_diagonal(w, 0.0)
    hubs = rs.choice(n, h)

    dist = np.sqrt(((xy[:, None, :] - xy[None, :, :]) ** 2).sum(axis=2))
    O, D = w.sum(axis=1), w.sum(axis=0)
    # collection from i to k plus distribution from k back to i
    access = spec.access_rate * dist[:, hubs] * (O + D)[:, None]

    total = float(w.sum())
    scale = spec.flow_scale
    if scale is None:
        scale = max(total, 1.0) / max(spec.segment_upper)
    upper = [u * scale for u in spec.segment_upper]
    segments = SegmentSchedule.from_upper(spec.segment_beta, [a / scale for a in spec.segment_alpha], upper)
    levels = tuple(CapacityLevel.uniform(q, f, h) for q, f in zip(spec.level_capacity, spec.level_fixed))
    return Instance(
        flows=w,
        hub_candidates=tuple(hubs),
        access_cost=access,
        hub_distance=dist[np.ix_(hubs, hubs)],
        levels=levels,
        segments=segments,
        congestion_factor=spec.g,
        coordinates=xy,
        name=spec.name or f"synthetic-{spec.seed}",
    )


def generate(spec: GenSpec) -> Instance:
    """Draw a validated instance; identical specs give identical instances.

    A draw whose largest origin flow reaches the largest capacity is
    redrawn, up to ``MAX_RETRIES`` times.
    """
    top = max(spec.level_capacity)
    for attempt in range(MAX_RETRIES):
        inst = _draw(spec, attempt)
        if float(inst.origin_flow.max(initial=0.0)) < top:
            try:
                return validate_instance(inst)
            except ValidationError:
                continue
    raise SpecInfeasible(f"no draw in {MAX_RETRIES} attempts has every origin flow below capacity {top!r}")


def homogenize(inst: Instance, alpha0: float) -> Instance:
    """Same instance with one proportional segment on every arc.

    The single segment has ``beta = 0``, ``alpha = alpha0`` and covers
    ``[0, total origin flow]``, so every design stays segment-feasible.
    """
    alpha0 = float(alpha0)
    if not alpha0 >= 0:
        raise ValueError(f"alpha0 must be nonnegative, got {alpha0!r}")
    schedule = SegmentSchedule((0.0,), (alpha0,), (0.0,), (float(inst.origin_flow.sum()),))
    return replace(inst, segments=schedule, segment_overrides={})
