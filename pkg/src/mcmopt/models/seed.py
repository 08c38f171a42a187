"""Warm starts: the CSD expansion as a graph, and any graph as a model binding."""

from __future__ import annotations

from ..graph import MINUS, PLUS, AdderGraph, AdderNode, Output
from ..milp import ModelError, SolutionBinding, Status, check_binding
from ..numeric import csd, normalize_constant
from .builder import ModelBundle


class SeedError(ValueError):
    pass


def attach_outputs(nodes: list[AdderNode], targets, input_wordlength: int, input_max: int | None = None) -> AdderGraph:
    where = {1: 0}
    for n in nodes:
        where.setdefault(n.fundamental, n.index)
    outputs = []
    for t in targets:
        norm = normalize_constant(t)
        if norm.odd not in where:
            raise SeedError(f"no node realizes target {t}")
        outputs.append(Output(t, where[norm.odd], norm.shift, norm.negated))
    return AdderGraph(tuple(nodes), input_wordlength, tuple(outputs), input_max)


def csd_graph(targets, input_wordlength: int = 8) -> AdderGraph:
    """One chain per target following its CSD digits from the top; equal fundamentals are shared.

    Each step computes ``acc * 2**gap +/- x``, so every intermediate value is
    odd and the graph uses at most ``sum(nnz - 1)`` adders.
    """
    nodes: list[AdderNode] = []
    index = {1: 0}
    for t in targets:
        odd = normalize_constant(t).odd
        if odd in index:
            continue
        digits = csd(odd).digits
        positions = [p for p, d in enumerate(digits) if d]
        acc, prev = 1, positions[-1]
        for p in reversed(positions[:-1]):
            d = digits[p]
            value = (acc << (prev - p)) + d
            if value not in index:
                node = AdderNode(
                    index=len(nodes) + 1,
                    left=index[acc],
                    right=0,
                    left_shift=prev - p,
                    neg_shift=0,
                    sign_left=PLUS,
                    sign_right=PLUS if d > 0 else MINUS,
                    fundamental=value,
                )
                nodes.append(node)
                index[value] = node.index
            acc, prev = value, p
    return attach_outputs(nodes, targets, input_wordlength)


def graph_to_binding(bundle: ModelBundle, graph: AdderGraph) -> SolutionBinding:
    """Bind a graph to the model's variables; raises SeedError when the binding is infeasible."""
    model = bundle.model
    n = bundle.n_adders
    if len(graph.nodes) > n:
        raise SeedError(f"graph has {len(graph.nodes)} adders, model allows {n}")
    values: dict[str, int] = {}

    def onehot(prefix: str, chosen: int, size: int) -> None:
        for k in range(size):
            values[f"{prefix}_{k}"] = int(k == chosen)

    S = bundle.sizes["S_max"] + 1
    NS = bundle.sizes["NS_max"] + 1
    for a in range(1, n + 1):
        if a <= len(graph.nodes):
            node = graph.node(a)
            if node.left_shift >= S or node.neg_shift >= NS:
                raise SeedError(f"node {a}: shift outside the model range")
            values[f"u_{a}"] = 1
            onehot(f"csel_{a}_l", node.left, a)
            onehot(f"csel_{a}_r", node.right, a)
            onehot(f"sigma_{a}", node.left_shift, S)
            onehot(f"psineg_{a}", node.neg_shift, NS)
            values[f"phil_{a}"] = int(node.sign_left == MINUS)
            values[f"phir_{a}"] = int(node.sign_right == MINUS)
            tl, tr = node.trunc_left, node.trunc_right
        else:
            # an idle adder computes (-1 + 1) / 2 = 0
            values[f"u_{a}"] = 0
            onehot(f"csel_{a}_l", 0, a)
            onehot(f"csel_{a}_r", 0, a)
            onehot(f"sigma_{a}", 0, S)
            onehot(f"psineg_{a}", 1, NS)
            values[f"phil_{a}"] = 1
            values[f"phir_{a}"] = 0
            tl = tr = 0
        if f"tl_{a}" in model.vars:
            values[f"tl_{a}"], values[f"tr_{a}"] = tl, tr
        elif tl or tr:
            raise SeedError(f"node {a} is truncated but the model has no truncations")
    fundamentals = graph.fundamentals()
    for j, target in enumerate(bundle.targets):
        if target not in fundamentals:
            raise SeedError(f"graph does not realize target {target}")
        chosen = fundamentals.index(target)
        for a in range(1, n + 1):
            values[f"o_{a}_{j}"] = int(a == chosen)
    try:
        full = model.complete(values)
    except (KeyError, ValueError, ModelError) as exc:
        raise SeedError(f"cannot complete binding: {exc}") from exc
    check = check_binding(model, full)
    if not check:
        raise SeedError(f"infeasible binding: {check.violation}")
    return SolutionBinding(full, model.objective_value(full), Status.FEASIBLE, "seed")


def csd_binding(bundle: ModelBundle) -> SolutionBinding:
    inst = bundle.instance
    return graph_to_binding(bundle, csd_graph(inst.targets, inst.input_wordlength or 8))
