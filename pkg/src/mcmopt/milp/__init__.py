"""Solver-agnostic MILP models, linearization helpers and LP text I/O."""

from .linearize import (
    add_indicator,
    big_m_of,
    define,
    encode_and,
    encode_greater,
    encode_max,
    encode_min,
    encode_one_hot_table,
    encode_or,
    one_hot_value,
)
from .lpformat import LpParseError, ParsedLp, constraint_set, emit_lp, emit_mip_start, parse_lp, parse_mip_start
from .model import (
    BINARY,
    INTEGER,
    BindingCheck,
    Constraint,
    LinExpr,
    MilpModel,
    ModelError,
    SolutionBinding,
    Status,
    Var,
    check_binding,
)

__all__ = [name for name in dir() if not name.startswith("_")]
