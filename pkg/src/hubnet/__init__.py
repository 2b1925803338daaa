"""Hub network design with capacity, congestion and heterogeneous economies of scale."""

from .core import (
    CapacityLevel,
    CostBreakdown,
    Instance,
    SegmentSchedule,
    Solution,
    check_feasible,
    evaluate,
    interhub_flows,
    kleinrock_cost,
    segment_cost,
    validate_instance,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityLevel",
    "CostBreakdown",
    "Instance",
    "SegmentSchedule",
    "Solution",
    "check_feasible",
    "evaluate",
    "interhub_flows",
    "kleinrock_cost",
    "segment_cost",
    "validate_instance",
]
