"""Exhaustive breadth-first search for the minimum adder count of small instances.

States are sets of fundamentals (so orderings of the same nodes collapse into
one state). A node combines two members ``a, b`` of the set as
``(+-2**s * a +- b) / 2**ns`` under the same ranges the MILP models use:
``c <= 2**w``, shifted operand and sum ``<= 2**(w+1)``, ``s <= S_max``,
``ns <= w + 1`` and ``ns > 0`` only with ``s = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..graph import MINUS, PLUS, AdderGraph, AdderNode, validate
from ..models.seed import attach_outputs
from ..numeric import adder_count_upper_bound, default_wordlength, odd_targets

STATE_LIMIT = 10**7


class OracleLimitError(RuntimeError):
    pass


@dataclass
class OracleResult:
    optimum_adders: int
    witness: AdderGraph
    explored_states: int


Recipe = tuple[int, int, int, int, int, int]  # left, right, shift, neg_shift, sign_left, sign_right


@lru_cache(maxsize=None)
def _pair_results(a: int, b: int, w: int, s_max: int, neg_shifts: bool) -> tuple[tuple[int, Recipe], ...]:
    """Odd fundamentals reachable from ``a`` (shifted, left) and ``b`` (right)."""
    top, wide = 1 << w, 1 << (w + 1)
    found: dict[int, Recipe] = {}
    for s in range(s_max + 1):
        left = a << s
        if left > wide:
            break
        for sl, sr in ((PLUS, PLUS), (PLUS, MINUS), (MINUS, PLUS)):
            total = sl * left + sr * b
            if total <= 0 or total > wide:
                continue
            ns = (total & -total).bit_length() - 1
            if ns and (s or not neg_shifts or ns > w + 1):
                continue
            c = total >> ns
            if c <= top and c not in found:
                found[c] = (a, b, s, ns, sl, sr)
    return tuple(found.items())


def successors(values: frozenset[int], w: int, s_max: int, neg_shifts: bool = True) -> dict[int, Recipe]:
    out: dict[int, Recipe] = {}
    for a in sorted(values):
        for b in sorted(values):
            for c, recipe in _pair_results(a, b, w, s_max, neg_shifts):
                if c not in values and c not in out:
                    out[c] = recipe
    return out


def _witness(chain: list[tuple[int, Recipe]], targets, input_wordlength: int) -> AdderGraph:
    index = {1: 0}
    nodes = []
    for c, (a, b, s, ns, sl, sr) in chain:
        node = AdderNode(len(nodes) + 1, index[a], index[b], s, ns, sl, sr, c)
        nodes.append(node)
        index[c] = node.index
    return attach_outputs(nodes, targets, input_wordlength)


def bfs_oracle(
    targets,
    max_adders: int | None = None,
    wordlength: int | None = None,
    s_max: int | None = None,
    negative_shifts: bool = True,
    input_wordlength: int = 8,
    state_limit: int = STATE_LIMIT,
) -> OracleResult:
    goal = frozenset(odd_targets(targets))
    w = wordlength if wordlength is not None else default_wordlength(goal)
    s_max = w if s_max is None else s_max
    bound = adder_count_upper_bound(goal) if max_adders is None else max_adders
    if not goal:
        return OracleResult(0, _witness([], targets, input_wordlength), 1)

    start = frozenset({1})
    parent: dict[frozenset[int], tuple[frozenset[int], int, Recipe] | None] = {start: None}
    level = [start]
    explored = 1
    for depth in range(bound):
        # does one more adder finish any state of this level?
        for state in level:
            missing = goal - state
            if len(missing) == 1:
                (c,) = missing
                recipe = successors(state, w, s_max, negative_shifts).get(c)
                if recipe is not None:
                    chain = [(c, recipe)]
                    while parent[state] is not None:
                        prev, value, rec = parent[state]
                        chain.append((value, rec))
                        state = prev
                    chain.reverse()
                    graph = _witness(chain, targets, input_wordlength)
                    assert validate(graph).ok
                    return OracleResult(depth + 1, graph, explored)
        if depth + 1 >= bound:
            break
        nxt = []
        for state in level:
            for c, recipe in successors(state, w, s_max, negative_shifts).items():
                new = state | {c}
                if new in parent:
                    continue
                # prune states that cannot cover the remaining targets in time
                if len(new) - 1 + len(goal - new) > bound:
                    continue
                parent[new] = (state, c, recipe)
                nxt.append(new)
                explored += 1
                if explored > state_limit:
                    raise OracleLimitError(f"state-space guard exceeded ({state_limit} states)")
        level = nxt
    raise OracleLimitError(f"no adder graph with at most {bound} adders")
