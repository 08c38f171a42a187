"""Solver execution: external MILP solvers over files, and an exhaustive BFS oracle."""

from .external import (
    DEFAULT_TIMEOUT,
    SolutionParseError,
    SolverError,
    SolverJob,
    SolverNotFound,
    available_profiles,
    build_command,
    format_start,
    load_profile,
    parse_solution,
    resolve_binary,
    solve_external,
    solve_model,
    solver_available,
)
from .oracle import OracleLimitError, OracleResult, bfs_oracle, successors

__all__ = [name for name in dir() if not name.startswith("_")]
