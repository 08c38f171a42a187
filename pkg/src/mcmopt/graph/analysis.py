"""Bit-accurate evaluation, adder depth, word lengths, one-bit adder costs and error bounds.

Conventions shared with the ILP models:

* ``msb`` of a node is the index of the top bit of ``x_max * c + eps_sup``
  (the largest value the node can carry, errors included).
* ``sum_msb`` is the same for the adder output before the negative shift,
  ``x_max * c * 2**neg_shift + eps_sup``; the one-bit adders work on this word.
* Operand bit ranges: left ``[max(s, t_l), msb_left + s]``, right
  ``[t_r, msb_right]``.
* Error intervals are not shrunk by a negative shift.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numeric import msb_index
from .core import MINUS, PLUS, AdderGraph, AdderNode


class NegativeDatapathError(ArithmeticError):
    pass


class InputRangeError(ValueError):
    pass


def clear_below(value, t: int):
    """Zero every bit of weight below 2**t."""
    if t <= 0:
        return value
    return (value >> t) << t


# -- evaluation ---------------------------------------------------------------


def evaluate_exact(graph: AdderGraph, x: int) -> list[int]:
    if not 0 <= x <= graph.x_max:
        raise InputRangeError(f"x={x} outside [0, {graph.x_max}]")
    values = [x]
    for n in graph.nodes:
        total = n.sign_left * (values[n.left] << n.left_shift) + n.sign_right * values[n.right]
        values.append(total >> n.neg_shift)
    return values


def _truncated_step(n: AdderNode, v_left, v_right):
    left = clear_below(v_left << n.left_shift, n.trunc_left)
    right = clear_below(v_right, n.trunc_right)
    return n.sign_left * left + n.sign_right * right


def simulate_truncated(graph: AdderGraph, x: int) -> list[tuple[int, int]]:
    """(approx value, approx - exact) per node, index 0 being the input."""
    exact = evaluate_exact(graph, x)
    approx = [x]
    for n in graph.nodes:
        total = _truncated_step(n, approx[n.left], approx[n.right])
        if total < 0:
            raise NegativeDatapathError(f"node {n.index} sum is negative ({total}) for x={x}")
        approx.append(total >> n.neg_shift)
    return [(a, a - e) for a, e in zip(approx, exact)]


def simulate_all(graph: AdderGraph) -> tuple[np.ndarray, np.ndarray]:
    """Exact and truncated values for every input in [0, x_max].

    Returns two arrays of shape (len(nodes) + 1, x_max + 1).
    """
    xs_py = range(graph.x_max + 1)
    top = graph.x_max * max([1] + [n.fundamental << (n.neg_shift + 1) for n in graph.nodes])
    top = max(top, graph.x_max * max([1] + [graph.fundamental(n.left) << (n.left_shift + 1) for n in graph.nodes]))
    dtype = np.int64 if top < 2**61 else object
    xs = np.array(list(xs_py), dtype=dtype)
    exact = [xs]
    approx = [xs]
    for n in graph.nodes:
        total = n.sign_left * (exact[n.left] << n.left_shift) + n.sign_right * exact[n.right]
        exact.append(total >> n.neg_shift)
        total = _truncated_step(n, approx[n.left], approx[n.right])
        if (total < 0).any():
            bad = int(np.argmax(total < 0))
            raise NegativeDatapathError(f"node {n.index} sum is negative for x={bad}")
        approx.append(total >> n.neg_shift)
    return np.stack(exact), np.stack(approx)


# -- adder depth ----------------------------------------------------------------


def adder_depth(graph: AdderGraph) -> tuple[list[int], int]:
    depth = [0]
    for n in graph.nodes:
        depth.append(max(depth[n.left], depth[n.right]) + 1)
    return depth, max(depth)


# -- error propagation --------------------------------------------------------------


@dataclass(frozen=True)
class ErrorInterval:
    eps_inf: int = 0
    eps_sup: int = 0

    def __add__(self, other: "ErrorInterval") -> "ErrorInterval":
        return ErrorInterval(self.eps_inf + other.eps_inf, self.eps_sup + other.eps_sup)

    def scaled(self, shift: int) -> "ErrorInterval":
        return ErrorInterval(self.eps_inf << shift, self.eps_sup << shift)

    def negated(self) -> "ErrorInterval":
        return ErrorInterval(self.eps_sup, self.eps_inf)

    def truncated(self, eps_t: int) -> "ErrorInterval":
        return ErrorInterval(self.eps_inf + eps_t, self.eps_sup)

    def contains(self, deviation: int) -> bool:
        return -self.eps_inf <= deviation <= self.eps_sup


def truncation_error(t: int, zeros: int) -> int:
    """Largest value removed by clearing bits below 2**t when the low ``zeros`` bits are known zero."""
    return max((1 << t) - (1 << zeros), 0)


@dataclass(frozen=True)
class OperandError:
    interval: ErrorInterval  # after shift and truncation, before the sign
    eps_t: int
    low: int  # guaranteed trailing zeros after truncation


def operand_errors(
    node: AdderNode, errors: list[ErrorInterval], zeros: list[int]
) -> tuple[OperandError, OperandError]:
    z_left = zeros[node.left] + node.left_shift
    et_left = truncation_error(node.trunc_left, z_left)
    left = OperandError(
        errors[node.left].scaled(node.left_shift).truncated(et_left), et_left, max(z_left, node.trunc_left)
    )
    z_right = zeros[node.right]
    et_right = truncation_error(node.trunc_right, z_right)
    right = OperandError(errors[node.right].truncated(et_right), et_right, max(z_right, node.trunc_right))
    return left, right


def combine(node: AdderNode, left: ErrorInterval, right: ErrorInterval) -> ErrorInterval:
    """Apply the signs (a minus swaps the bounds) and add the intervals."""
    if node.sign_left == MINUS:
        left = left.negated()
    if node.sign_right == MINUS:
        right = right.negated()
    return left + right


def propagate_with_zeros(graph: AdderGraph) -> tuple[list[ErrorInterval], list[int]]:
    errors = [ErrorInterval()]
    zeros = [0]
    for n in graph.nodes:
        left, right = operand_errors(n, errors, zeros)
        errors.append(combine(n, left.interval, right.interval))
        zeros.append(max(min(left.low, right.low) - n.neg_shift, 0))
    return errors, zeros


def propagate_error(graph: AdderGraph) -> list[ErrorInterval]:
    return propagate_with_zeros(graph)[0]


def trailing_zeros(graph: AdderGraph) -> list[int]:
    return propagate_with_zeros(graph)[1]


@dataclass
class BudgetLine:
    output: int
    target: int
    node: int
    budget: int
    interval: ErrorInterval

    @property
    def margin(self) -> int:
        return self.budget - max(self.interval.eps_inf, self.interval.eps_sup)

    @property
    def ok(self) -> bool:
        return self.margin >= 0


@dataclass
class BudgetReport:
    lines: list[BudgetLine]

    @property
    def ok(self) -> bool:
        return all(line.ok for line in self.lines)


def check_error_budget(graph: AdderGraph, budgets: dict[int, int] | list[int]) -> BudgetReport:
    """Compare propagated intervals against per-output budgets.

    ``budgets`` is keyed by output position (a list works too); budgets are in
    units of the output node's LSB. Outputs without a budget are not checked.
    """
    if isinstance(budgets, list):
        budgets = dict(enumerate(budgets))
    errors = propagate_error(graph)
    lines = []
    for j, out in enumerate(graph.outputs):
        if j not in budgets:
            continue
        lines.append(BudgetLine(j, out.target, out.node, budgets[j], errors[out.node]))
    return BudgetReport(lines)


# -- word lengths -----------------------------------------------------------------


def msb_of(node: int, graph: AdderGraph, error: ErrorInterval | None = None) -> int:
    eps_sup = error.eps_sup if error is not None else 0
    return msb_index(graph.x_max * graph.fundamental(node) + eps_sup)


def sum_msb_of(node: AdderNode, graph: AdderGraph, error: ErrorInterval | None = None) -> int:
    eps_sup = error.eps_sup if error is not None else 0
    return msb_index(graph.x_max * (node.fundamental << node.neg_shift) + eps_sup)


@dataclass(frozen=True)
class NodeBounds:
    msb: int
    sum_msb: int
    lo_left: int
    hi_left: int
    lo_right: int
    hi_right: int


def node_bounds(graph: AdderGraph, errors: list[ErrorInterval] | None = None) -> dict[int, NodeBounds]:
    if errors is None:
        errors = propagate_error(graph)
    msb = [msb_of(k, graph, errors[k]) for k in range(len(graph.nodes) + 1)]
    out = {}
    for n in graph.nodes:
        out[n.index] = NodeBounds(
            msb=msb[n.index],
            sum_msb=sum_msb_of(n, graph, errors[n.index]),
            lo_left=max(n.left_shift, n.trunc_left),
            hi_left=msb[n.left] + n.left_shift,
            lo_right=n.trunc_right,
            hi_right=msb[n.right],
        )
    return out


# -- one-bit adder costs ------------------------------------------------------------


@dataclass(frozen=True)
class NodeMetrics:
    msb: int
    sum_msb: int
    adder_depth: int
    onebit_cost: int
    gain: int
    carry_msb: int
    trailing_zeros: int


def _gain(node: AdderNode, b: NodeBounds) -> tuple[int, int]:
    if node.sign_left == PLUS and node.sign_right == PLUS:
        if b.lo_left > b.hi_right or b.lo_right > b.hi_left:
            # operands do not overlap: every output bit is a wire
            return b.sum_msb + 1, 0
        return max(b.lo_left, b.lo_right), b.sum_msb - max(b.hi_left, b.hi_right)
    if node.sign_right == MINUS:
        return b.lo_right, 0
    return b.lo_left, 0


def count_onebit_analytic(graph: AdderGraph) -> tuple[dict[int, NodeMetrics], int]:
    errors, zeros = propagate_with_zeros(graph)
    bounds = node_bounds(graph, errors)
    depth, _ = adder_depth(graph)
    metrics = {}
    for n in graph.nodes:
        b = bounds[n.index]
        gain, carry = _gain(n, b)
        cost = max(b.sum_msb + 1 - gain - carry, 0)
        metrics[n.index] = NodeMetrics(b.msb, b.sum_msb, depth[n.index], cost, gain, carry, zeros[n.index])
    return metrics, sum(m.onebit_cost for m in metrics.values())


# Position kinds of the ripple construction.
WIRE_LEFT, WIRE_RIGHT, ZERO, CELL, CARRY = "wl", "wr", "0", "fa", "co"


def ripple_layout(node: AdderNode, b: NodeBounds) -> list[str]:
    """Bit positions 0..sum_msb of the adder, each a wire, a constant, a cell or the carry-out."""
    in_left = lambda p: b.lo_left <= p <= b.hi_left  # noqa: E731
    in_right = lambda p: b.lo_right <= p <= b.hi_right  # noqa: E731
    kinds = []
    if node.sign_left == PLUS and node.sign_right == PLUS:
        carry = False
        for p in range(b.sum_msb + 1):
            both, one = in_left(p) and in_right(p), in_left(p) or in_right(p)
            if both or (one and carry):
                kinds.append(CELL)
                carry = True
            elif one:
                kinds.append(WIRE_LEFT if in_left(p) else WIRE_RIGHT)
            elif carry:
                kinds.append(CARRY)
                carry = False
            else:
                kinds.append(ZERO)
        return kinds
    if node.sign_right == MINUS:
        low, minuend, wire = b.lo_right, in_left, WIRE_LEFT
    else:
        low, minuend, wire = b.lo_left, in_right, WIRE_RIGHT
    for p in range(b.sum_msb + 1):
        if p >= low:
            kinds.append(CELL)
        else:
            kinds.append(wire if minuend(p) else ZERO)
    return kinds


def count_onebit_structural(graph: AdderGraph) -> tuple[dict[int, int], int]:
    bounds = node_bounds(graph)
    costs = {n.index: ripple_layout(n, bounds[n.index]).count(CELL) for n in graph.nodes}
    return costs, sum(costs.values())


def _bit(v: int, p: int) -> int:
    return (v >> p) & 1


def ripple_simulate(graph: AdderGraph, x: int) -> list[int]:
    """Evaluate every node through its ripple layout, bit by bit.

    Raises AssertionError if an operand has set bits outside its declared
    range, which would make a wire position unsound.
    """
    bounds = node_bounds(graph)
    values = [x]
    for n in graph.nodes:
        b = bounds[n.index]
        left = clear_below(values[n.left] << n.left_shift, n.trunc_left)
        right = clear_below(values[n.right], n.trunc_right)
        assert left >> (b.hi_left + 1) == 0 and right >> (b.hi_right + 1) == 0, f"node {n.index}: operand wider than bound"
        assert left & ((1 << b.lo_left) - 1) == 0 and right & ((1 << b.lo_right) - 1) == 0
        kinds = ripple_layout(n, b)
        plus = n.sign_left == PLUS and n.sign_right == PLUS
        if plus:
            a_op, b_op, carry = left, right, 0
        elif n.sign_right == MINUS:
            a_op, b_op, carry = left, right, None
        else:
            a_op, b_op, carry = right, left, None
        out = 0
        for p, kind in enumerate(kinds):
            if kind == CELL:
                if plus:
                    bit_b = _bit(b_op, p)
                else:
                    bit_b = 1 - _bit(b_op, p)  # two's complement of the subtrahend
                    if carry is None:
                        carry = 1
                s = _bit(a_op, p) + bit_b + carry
                out |= (s & 1) << p
                carry = s >> 1
            elif kind == WIRE_LEFT:
                out |= _bit(left, p) << p
            elif kind == WIRE_RIGHT:
                out |= _bit(right, p) << p
            elif kind == CARRY:
                out |= (carry or 0) << p
                carry = 0
        values.append(out >> n.neg_shift)
    return values
