"""Adder graph domain model and structural validation."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..numeric import normalize_constant

PLUS = 1
MINUS = -1


@dataclass(frozen=True)
class AdderNode:
    """One shift-and-add node.

    Computes ``(sign_left * clear(2**left_shift * v_left, trunc_left)
    + sign_right * clear(v_right, trunc_right)) >> neg_shift`` where ``clear``
    zeroes bits of weight below ``2**t``. Node 0 is the input and is not stored.
    """

    index: int
    left: int
    right: int
    left_shift: int
    neg_shift: int
    sign_left: int
    sign_right: int
    fundamental: int
    trunc_left: int = 0
    trunc_right: int = 0

    @property
    def truncated(self) -> bool:
        return bool(self.trunc_left or self.trunc_right)


@dataclass(frozen=True)
class Output:
    target: int
    node: int
    post_shift: int = 0
    negate: bool = False


@dataclass(frozen=True)
class AdderGraph:
    nodes: tuple[AdderNode, ...]
    input_wordlength: int
    outputs: tuple[Output, ...] = ()
    input_max: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if self.input_max is None:
            object.__setattr__(self, "input_max", (1 << self.input_wordlength) - 1)

    @property
    def x_max(self) -> int:
        return self.input_max  # type: ignore[return-value]

    def node(self, index: int) -> AdderNode:
        return self.nodes[index - 1]

    def fundamental(self, index: int) -> int:
        return 1 if index == 0 else self.nodes[index - 1].fundamental

    def fundamentals(self) -> list[int]:
        return [1] + [n.fundamental for n in self.nodes]

    @property
    def truncated(self) -> bool:
        return any(n.truncated for n in self.nodes)

    def without_truncations(self) -> "AdderGraph":
        from dataclasses import replace

        return replace(self, nodes=tuple(replace(n, trunc_left=0, trunc_right=0) for n in self.nodes))


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, where: str, rule: str) -> None:
        self.violations.append(f"{where}: {rule}")

    def __str__(self) -> str:
        return "ok" if self.ok else "; ".join(self.violations)


def raw_sum(node: AdderNode, c_left: int, c_right: int) -> int:
    return node.sign_left * (c_left << node.left_shift) + node.sign_right * c_right


def validate(graph: AdderGraph) -> ValidationReport:
    report = ValidationReport()
    if graph.input_wordlength < 1:
        report.add("graph", "input word length must be positive")
    if graph.x_max < 1:
        report.add("graph", "input bound must be positive")
    for pos, node in enumerate(graph.nodes, start=1):
        where = f"node {pos}"
        if node.index != pos:
            report.add(where, f"index {node.index} out of topological order")
        if not (0 <= node.left < pos and 0 <= node.right < pos):
            report.add(where, "input reference not topologically earlier")
            continue
        if node.left_shift < 0 or node.neg_shift < 0 or node.trunc_left < 0 or node.trunc_right < 0:
            report.add(where, "negative shift or truncation")
            continue
        if node.sign_left not in (PLUS, MINUS) or node.sign_right not in (PLUS, MINUS):
            report.add(where, "sign must be +1 or -1")
            continue
        if node.sign_left == MINUS and node.sign_right == MINUS:
            report.add(where, "both inputs negated")
        if node.neg_shift > 0 and node.left_shift > 0:
            report.add(where, "negative shift requires zero left shift")
        if node.fundamental < 1:
            report.add(where, "fundamental not positive")
        if node.fundamental % 2 == 0:
            report.add(where, "fundamental not odd")
        total = raw_sum(node, graph.fundamental(node.left), graph.fundamental(node.right))
        if total != node.fundamental << node.neg_shift:
            report.add(
                where,
                f"fundamental mismatch: inputs give {total}/2^{node.neg_shift}, node claims {node.fundamental}",
            )
    for j, out in enumerate(graph.outputs):
        where = f"output {j}"
        if not 0 <= out.node <= len(graph.nodes):
            report.add(where, "references a missing node")
            continue
        try:
            norm = normalize_constant(out.target)
        except ValueError:
            report.add(where, "zero target")
            continue
        if graph.fundamental(out.node) != norm.odd:
            report.add(where, f"node fundamental {graph.fundamental(out.node)} != odd part {norm.odd}")
        if out.post_shift != norm.shift or out.negate != norm.negated:
            report.add(where, "post shift/negation do not rebuild the target")
    if report.ok and graph.truncated:
        _validate_truncations(graph, report)
    return report


def _validate_truncations(graph: AdderGraph, report: ValidationReport) -> None:
    from .analysis import node_bounds, propagate_error

    errors = propagate_error(graph)
    bounds = node_bounds(graph, errors)
    for node in graph.nodes:
        b = bounds[node.index]
        where = f"node {node.index}"
        if node.trunc_left > b.hi_left:
            report.add(where, "left truncation removes the whole operand")
        if node.trunc_right > b.hi_right:
            report.add(where, "right truncation removes the whole operand")
        if MINUS in (node.sign_left, node.sign_right):
            exact_sum = graph.fundamental(node.index) << node.neg_shift
            if errors[node.index].eps_inf > exact_sum:
                report.add(where, "possible negative datapath (eps_inf exceeds the exact sum at x=1)")


def reachable(graph: AdderGraph) -> set[int]:
    """Nodes that feed some output (including the input)."""
    live: set[int] = set()
    stack = [o.node for o in graph.outputs]
    while stack:
        k = stack.pop()
        if k in live:
            continue
        live.add(k)
        if k:
            n = graph.node(k)
            stack.extend((n.left, n.right))
    return live
