"""Graphviz rendering of adder graphs."""

from __future__ import annotations

from ..graph import MINUS, AdderGraph


def to_dot(graph: AdderGraph, name: str = "adder_graph") -> str:
    outs: dict[int, list[str]] = {}
    for o in graph.outputs:
        label = f"{'-' if o.negate else ''}{o.target}x"
        outs.setdefault(o.node, []).append(label)
    lines = [f"digraph {name} {{", "  rankdir=TB;", '  node [shape=ellipse, fontname="Helvetica"];']
    extra = ', peripheries=2' if 0 in outs else ""
    lines.append(f'  n0 [label="x", shape=box{extra}];')
    for n in graph.nodes:
        label = str(n.fundamental)
        if n.neg_shift:
            label += f"\\n>>{n.neg_shift}"
        if n.index in outs:
            label += "\\n" + ", ".join(outs[n.index])
        extra = ", peripheries=2" if n.index in outs else ""
        lines.append(f'  n{n.index} [label="{label}"{extra}];')
    for n in graph.nodes:
        for src, shift, sign, trunc, port in (
            (n.left, n.left_shift, n.sign_left, n.trunc_left, "l"),
            (n.right, 0, n.sign_right, n.trunc_right, "r"),
        ):
            parts = ["-" if sign == MINUS else "+"]
            if shift:
                parts.append(f"<<{shift}")
            if trunc:
                parts.append(f"t={trunc}")
            lines.append(f'  n{src} -> n{n.index} [label="{" ".join(parts)}", headlabel="{port}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
