from .bnb import BnbResult, SearchConfig, SearchNode, lower_bound, solve_bnb
from .heuristic import solve_heuristic

__all__ = ["BnbResult", "SearchConfig", "SearchNode", "lower_bound", "solve_bnb", "solve_heuristic"]
