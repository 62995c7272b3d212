"""Exact mixed-binary linear programming: bounded simplex plus branch-and-bound."""

from .lpfile import write_lp
from .model import LpResult, MilpModel, MilpSolution
from .solve import LpSession, solve_lp, solve_milp

__all__ = ["MilpModel", "MilpSolution", "LpResult", "solve_lp", "solve_milp", "write_lp", "LpSession"]
