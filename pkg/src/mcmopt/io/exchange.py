"""One-line adder-graph exchange string.

Grammar (entries separated by whitespace)::

    I(w_in; x_max)
    A(c; c_l,shift_l,sign_l; c_r,shift_r,sign_r; neg_shift; t_l,t_r; stage)
    O(target; c; post_shift; negate)

Inputs are referenced by fundamental (the earliest node realizing it), signs
are ``+`` or ``-``, ``negate`` is 0 or 1. The stage is the adder depth and is
checked on parse.
"""

from __future__ import annotations

import re
from dataclasses import replace

from ..graph import MINUS, PLUS, AdderGraph, AdderNode, Output, adder_depth, validate


class ExchangeError(ValueError):
    pass


_ENTRY = re.compile(r"([AIO])\(([^()]*)\)")


def canonical(graph: AdderGraph) -> AdderGraph:
    """Point every reference at the earliest node with the same fundamental.

    This is the graph a reader of the exchange string reconstructs.
    """
    first: dict[int, int] = {}
    for k, c in enumerate(graph.fundamentals()):
        first.setdefault(c, k)
    fund = graph.fundamentals()
    nodes = tuple(replace(n, left=first[fund[n.left]], right=first[fund[n.right]]) for n in graph.nodes)
    outputs = tuple(replace(o, node=first[fund[o.node]]) for o in graph.outputs)
    return replace(graph, nodes=nodes, outputs=outputs)


def to_exchange(graph: AdderGraph) -> str:
    depth, _ = adder_depth(canonical(graph))
    parts = [f"I({graph.input_wordlength};{graph.x_max})"]
    fund = graph.fundamentals()
    sign = {PLUS: "+", MINUS: "-"}
    for n in graph.nodes:
        parts.append(
            f"A({n.fundamental};{fund[n.left]},{n.left_shift},{sign[n.sign_left]};"
            f"{fund[n.right]},0,{sign[n.sign_right]};{n.neg_shift};{n.trunc_left},{n.trunc_right};{depth[n.index]})"
        )
    for o in graph.outputs:
        parts.append(f"O({o.target};{graph.fundamental(o.node)};{o.post_shift};{int(o.negate)})")
    return " ".join(parts)


def _fields(body: str, count: int, pos: int, kind: str) -> list[list[str]]:
    groups = [g.strip() for g in body.split(";")]
    if len(groups) != count:
        raise ExchangeError(f"column {pos}: {kind}(...) expects {count} fields, got {len(groups)}")
    return [[p.strip() for p in g.split(",")] for g in groups]


def _num(text: str, pos: int, what: str) -> int:
    if not re.fullmatch(r"-?\d+", text):
        raise ExchangeError(f"column {pos}: {what} must be an integer, got {text!r}")
    return int(text)


def _sign(text: str, pos: int) -> int:
    if text == "+":
        return PLUS
    if text == "-":
        return MINUS
    raise ExchangeError(f"column {pos}: sign must be + or -, got {text!r}")


def from_exchange(text: str) -> AdderGraph:
    if not isinstance(text, str):
        raise ExchangeError("exchange string must be text")
    pos = 0
    header = None
    nodes: list[AdderNode] = []
    outputs: list[Output] = []
    stages: list[tuple[int, int]] = []
    index = {1: 0}
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _ENTRY.match(text, pos)
        col = pos + 1
        if not m:
            raise ExchangeError(f"column {col}: expected I(...), A(...) or O(...)")
        kind, body = m.group(1), m.group(2)
        pos = m.end()
        if kind == "I":
            if header is not None or nodes or outputs:
                raise ExchangeError(f"column {col}: I(...) must come first and only once")
            f = _fields(body, 2, col, "I")
            if any(len(g) != 1 for g in f):
                raise ExchangeError(f"column {col}: malformed I(...) fields")
            header = (_num(f[0][0], col, "w_in"), _num(f[1][0], col, "x_max"))
        elif kind == "A":
            if outputs:
                raise ExchangeError(f"column {col}: adders must precede outputs")
            f = _fields(body, 6, col, "A")
            if [len(g) for g in f] != [1, 3, 3, 1, 2, 1]:
                raise ExchangeError(f"column {col}: malformed A(...) fields")
            c = _num(f[0][0], col, "fundamental")
            refs = []
            for g in (f[1], f[2]):
                ref = _num(g[0], col, "input")
                if ref not in index:
                    raise ExchangeError(f"column {col}: input {ref} is not an earlier fundamental")
                refs.append((index[ref], _num(g[1], col, "shift"), _sign(g[2], col)))
            if refs[1][1] != 0:
                raise ExchangeError(f"column {col}: only the left input may be shifted")
            node = AdderNode(
                index=len(nodes) + 1,
                left=refs[0][0],
                right=refs[1][0],
                left_shift=refs[0][1],
                neg_shift=_num(f[3][0], col, "neg_shift"),
                sign_left=refs[0][2],
                sign_right=refs[1][2],
                fundamental=c,
                trunc_left=_num(f[4][0], col, "t_l"),
                trunc_right=_num(f[4][1], col, "t_r"),
            )
            nodes.append(node)
            index.setdefault(c, node.index)
            stages.append((_num(f[5][0], col, "stage"), col))
        else:
            f = _fields(body, 4, col, "O")
            if any(len(g) != 1 for g in f):
                raise ExchangeError(f"column {col}: malformed O(...) fields")
            c = _num(f[1][0], col, "fundamental")
            if c not in index:
                raise ExchangeError(f"column {col}: no node realizes {c}")
            negate = _num(f[3][0], col, "negate")
            if negate not in (0, 1):
                raise ExchangeError(f"column {col}: negate must be 0 or 1")
            outputs.append(Output(_num(f[0][0], col, "target"), index[c], _num(f[2][0], col, "post_shift"), bool(negate)))
    if header is None:
        raise ExchangeError("column 1: missing I(w_in; x_max) header")
    if header[0] < 1 or header[1] < 1:
        raise ExchangeError("column 1: input word length and bound must be positive")
    graph = AdderGraph(tuple(nodes), header[0], tuple(outputs), header[1])
    report = validate(graph)
    if not report.ok:
        raise ExchangeError(f"invalid graph: {report}")
    depth, _ = adder_depth(graph)
    for n, (stage, col) in zip(nodes, stages):
        if depth[n.index] != stage:
            raise ExchangeError(f"column {col}: stage {stage} but the adder depth is {depth[n.index]}")
    return graph


def isomorphic(a: AdderGraph, b: AdderGraph) -> bool:
    """Same nodes in the same order up to references by fundamental, and same outputs."""
    if (a.input_wordlength, a.x_max) != (b.input_wordlength, b.x_max) or len(a.nodes) != len(b.nodes):
        return False
    fa, fb = a.fundamentals(), b.fundamentals()
    for x, y in zip(a.nodes, b.nodes):
        kx = (x.fundamental, fa[x.left], fa[x.right], x.left_shift, x.neg_shift, x.sign_left, x.sign_right, x.trunc_left, x.trunc_right)
        ky = (y.fundamental, fb[y.left], fb[y.right], y.left_shift, y.neg_shift, y.sign_left, y.sign_right, y.trunc_left, y.trunc_right)
        if kx != ky:
            return False
    oa = [(o.target, fa[o.node], o.post_shift, o.negate) for o in a.outputs]
    ob = [(o.target, fb[o.node], o.post_shift, o.negate) for o in b.outputs]
    return oa == ob
