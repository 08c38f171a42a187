"""Adder graphs: validation, simulation, word lengths, costs and error analysis."""

from .analysis import (
    BudgetReport,
    ErrorInterval,
    InputRangeError,
    NegativeDatapathError,
    NodeBounds,
    NodeMetrics,
    adder_depth,
    check_error_budget,
    clear_below,
    count_onebit_analytic,
    count_onebit_structural,
    evaluate_exact,
    msb_of,
    node_bounds,
    propagate_error,
    propagate_with_zeros,
    ripple_layout,
    ripple_simulate,
    simulate_all,
    simulate_truncated,
    trailing_zeros,
    truncation_error,
)
from .core import MINUS, PLUS, AdderGraph, AdderNode, Output, ValidationReport, reachable, validate

__all__ = [
    "MINUS",
    "PLUS",
    "AdderGraph",
    "AdderNode",
    "BudgetReport",
    "ErrorInterval",
    "InputRangeError",
    "NegativeDatapathError",
    "NodeBounds",
    "NodeMetrics",
    "Output",
    "ValidationReport",
    "adder_depth",
    "check_error_budget",
    "clear_below",
    "count_onebit_analytic",
    "count_onebit_structural",
    "evaluate_exact",
    "msb_of",
    "node_bounds",
    "propagate_error",
    "propagate_with_zeros",
    "reachable",
    "ripple_layout",
    "ripple_simulate",
    "simulate_all",
    "simulate_truncated",
    "trailing_zeros",
    "truncation_error",
    "validate",
]
