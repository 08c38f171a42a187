"""Turn a solver binding back into a validated adder graph."""

from __future__ import annotations

from ..graph import MINUS, PLUS, AdderNode, adder_depth, count_onebit_analytic, propagate_error, validate
from ..graph.core import AdderGraph
from ..milp import SolutionBinding, check_binding
from .builder import ModelBundle
from .seed import SeedError, attach_outputs


class DecodeError(ValueError):
    pass


DEFAULT_INPUT_WORDLENGTH = 8


def _pick(values, prefix: str, size: int) -> int:
    hits = [k for k in range(size) if values[f"{prefix}_{k}"] == 1]
    if len(hits) != 1:
        raise DecodeError(f"{prefix}: expected exactly one selection, got {hits}")
    return hits[0]


def decode(bundle: ModelBundle, binding: SolutionBinding, drift_check: bool = True) -> AdderGraph:
    if not binding.has_solution:
        raise DecodeError(f"no solution to decode (status {binding.status.value})")
    check = check_binding(bundle.model, binding.values)
    if not check:
        raise DecodeError(f"binding rejected: {check.violation}")
    v = binding.values
    inst = bundle.instance
    S = bundle.sizes["S_max"] + 1
    NS = bundle.sizes["NS_max"] + 1

    index = {0: 0}
    nodes: list[AdderNode] = []
    for a in range(1, bundle.n_adders + 1):
        if v[f"u_{a}"] != 1:
            continue
        left = _pick(v, f"csel_{a}_l", a)
        right = _pick(v, f"csel_{a}_r", a)
        for k in (left, right):
            if k not in index:
                raise DecodeError(f"adder {a}: dangling selection of dropped adder {k}")
        index[a] = len(nodes) + 1
        nodes.append(
            AdderNode(
                index=index[a],
                left=index[left],
                right=index[right],
                left_shift=_pick(v, f"sigma_{a}", S),
                neg_shift=_pick(v, f"psineg_{a}", NS),
                sign_left=MINUS if v[f"phil_{a}"] else PLUS,
                sign_right=MINUS if v[f"phir_{a}"] else PLUS,
                fundamental=v[f"c_{a}"],
                trunc_left=v.get(f"tl_{a}", 0),
                trunc_right=v.get(f"tr_{a}", 0),
            )
        )
    try:
        graph = attach_outputs(
            nodes,
            inst.targets,
            inst.input_wordlength or DEFAULT_INPUT_WORDLENGTH,
        )
    except SeedError as exc:
        raise DecodeError(str(exc)) from exc
    # outputs must follow o_a_j, not merely any node with the right fundamental
    for j, target in enumerate(bundle.targets):
        chosen = [a for a in range(1, bundle.n_adders + 1) if v[f"o_{a}_{j}"] == 1]
        if len(chosen) != 1 or v[f"c_{chosen[0]}"] != target:
            raise DecodeError(f"output for target {target} is not covered exactly once")
    report = validate(graph)
    if not report.ok:
        raise DecodeError(f"decoded graph is invalid: {report}")
    if drift_check:
        _check_drift(bundle, v, graph, index)
    return graph


def _check_drift(bundle: ModelBundle, v, graph: AdderGraph, index: dict[int, int]) -> None:
    depth, _ = adder_depth(graph)
    metrics = count_onebit_analytic(graph)[0] if bundle.flavor in ("bits", "truncated") else {}
    errors = propagate_error(graph) if bundle.flavor == "truncated" else None
    problems = []
    for a, k in index.items():
        if a == 0:
            continue
        expect = {}
        if bundle.flavor != "adders":
            expect[f"ad_{a}"] = depth[k]
        if metrics:
            expect[f"B_{a}"] = metrics[k].onebit_cost
            expect[f"msb_{a}"] = metrics[k].msb
            expect[f"msbS_{a}"] = metrics[k].sum_msb
        if errors is not None:
            expect[f"einf_{a}"] = errors[k].eps_inf
            expect[f"esup_{a}"] = errors[k].eps_sup
            expect[f"z_{a}"] = metrics[k].trailing_zeros
        for name, value in expect.items():
            if v[name] != value:
                problems.append(f"{name}={v[name]} but the graph gives {value}")
    if problems:
        raise DecodeError("model/decoder drift: " + "; ".join(problems))
