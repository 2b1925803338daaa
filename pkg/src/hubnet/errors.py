"""Exception hierarchy shared by every hubnet module."""

from __future__ import annotations

from dataclasses import dataclass


class HubnetError(Exception):
    """Base class for all errors raised by hubnet."""


@dataclass(frozen=True)
class Violation:
    """One failed instance invariant.

    ``code`` is one of ``NonCoveringSegments``, ``NegativeEntry``,
    ``NonMonotoneLevels``, ``EmptyHubSet``, ``NonMonotoneSegments``,
    ``ShapeMismatch``, ``NonFinite``, ``BadCandidate`` or ``BadDistance``.
    """

    code: str
    field: str
    detail: str

    def as_dict(self) -> dict[str, str]:
        return {"code": self.code, "field": self.field, "detail": self.detail}

    def __str__(self) -> str:
        return f"{self.code} [{self.field}]: {self.detail}"


class ValidationError(HubnetError):
    """Raised by ``validate_instance`` with every violation found."""

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        lines = "\n  ".join(str(v) for v in self.violations)
        super().__init__(f"{len(self.violations)} instance violation(s):\n  {lines}")

    @property
    def codes(self) -> set[str]:
        return {v.code for v in self.violations}


class CapacitySaturated(HubnetError):
    """Hub throughput reached its capacity; the congestion cost diverges."""


class FlowExceedsSegments(HubnetError):
    """Interhub flow lies above the last segment's upper bound."""


class EvaluationInfeasible(HubnetError):
    """A solution cannot be priced because it violates the model."""

    def __init__(self, message: str, violations: tuple = ()):
        super().__init__(message)
        self.violations = tuple(violations)


class InstanceTooLarge(HubnetError):
    pass


class EmbeddingInfeasible(HubnetError):
    """A combinatorial solution mapped into the conic model violates a row or cone."""


class NonpositiveCapacity(HubnetError):
    pass


class ParseError(HubnetError):
    """Malformed input file; the message carries line or key context."""


class MissingVariable(HubnetError):
    pass


class BudgetExceeded(HubnetError):
    pass


class Infeasible(HubnetError):
    """No configuration satisfies strict capacity and segment coverage."""


class PrunedInfeasible(HubnetError):
    """A search node cannot be completed to a feasible solution."""


class NoFeasibleSolution(HubnetError):
    pass


class LimitReached(HubnetError):
    """A time or node limit stopped the search.

    ``incumbent`` is ``(Solution, CostBreakdown)`` or ``None``; ``gap`` is the
    absolute difference between incumbent and best open bound, when known.
    """

    def __init__(self, message: str, incumbent=None, gap: float | None = None):
        super().__init__(message)
        self.incumbent = incumbent
        self.gap = gap


class AdapterConfigError(HubnetError):
    pass


class SolverFailure(HubnetError):
    pass


class Mismatch(HubnetError):
    def __init__(self, message: str, reported: float, recomputed: float):
        super().__init__(message)
        self.reported = reported
        self.recomputed = recomputed


class RoundingInfeasible(HubnetError):
    pass


class SpecInfeasible(HubnetError):
    pass
