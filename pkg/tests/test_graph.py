import random
from dataclasses import replace

import numpy as np
import pytest

from graphgen import random_graph, random_truncated_graph
from mcmopt.graph import (
    MINUS,
    PLUS,
    AdderGraph,
    AdderNode,
    ErrorInterval,
    InputRangeError,
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
    reachable,
    ripple_layout,
    ripple_simulate,
    simulate_all,
    simulate_truncated,
    truncation_error,
    validate,
)
from mcmopt.models import attach_outputs


def single(node: AdderNode, w_in: int = 3) -> AdderGraph:
    return attach_outputs([node], [node.fundamental], w_in)


SEVEN = AdderNode(1, 0, 0, 3, 0, PLUS, MINUS, 7)
SEVENTEEN = AdderNode(1, 0, 0, 4, 0, PLUS, PLUS, 17)
THREE = AdderNode(1, 0, 0, 1, 0, PLUS, PLUS, 3)


class TestValidate:
    def test_chain_ok(self, chain_graph):
        assert validate(chain_graph).ok

    def test_neg_shift_ok(self, neg_shift_graph):
        assert validate(neg_shift_graph).ok
        assert neg_shift_graph.node(3).neg_shift == 1

    def test_even_fundamental(self):
        g = AdderGraph((AdderNode(1, 0, 0, 2, 0, PLUS, PLUS, 6),), 3)
        assert any("fundamental not odd" in v for v in validate(g).violations)

    @pytest.mark.parametrize(
        "node, rule",
        [
            (AdderNode(1, 0, 0, 1, 0, MINUS, MINUS, 3), "both inputs negated"),
            (AdderNode(1, 0, 0, 1, 1, PLUS, PLUS, 3), "negative shift requires zero left shift"),
            (AdderNode(1, 0, 0, 1, 0, PLUS, PLUS, 5), "fundamental mismatch"),
            (AdderNode(1, 0, 1, 1, 0, PLUS, PLUS, 3), "not topologically earlier"),
        ],
    )
    def test_violations(self, node, rule):
        report = validate(AdderGraph((node,), 3))
        assert not report.ok and rule in str(report)

    def test_output_mismatch(self, chain_graph):
        bad = replace(chain_graph, outputs=(replace(chain_graph.outputs[0], post_shift=1),))
        assert "post shift" in str(validate(bad))

    def test_truncation_beyond_operand(self):
        g = single(replace(SEVENTEEN, trunc_right=3))
        assert "removes the whole operand" in str(validate(g))

    def test_negative_datapath_guard(self):
        # 3 = 4x - x with the 4x operand cut at bit 2 can go negative
        g = single(AdderNode(1, 0, 0, 2, 0, PLUS, MINUS, 3, 4, 0), w_in=4)
        assert "negative datapath" in str(validate(g))

    def test_reachable(self, chain_graph):
        assert reachable(chain_graph) == {0, 1, 2, 3}


class TestSimulation:
    def test_exact_values(self, neg_shift_graph):
        assert evaluate_exact(neg_shift_graph, 0) == [0, 0, 0, 0]
        assert evaluate_exact(neg_shift_graph, 1) == neg_shift_graph.fundamentals()
        assert evaluate_exact(neg_shift_graph, 1)[3] == (7 + 31) // 2

    def test_input_range(self, chain_graph):
        with pytest.raises(InputRangeError):
            evaluate_exact(chain_graph, 8)

    def test_clear_below(self):
        assert clear_below(0b10111, 3) == 0b10000
        assert clear_below(5, 0) == 5

    def test_exact_graph_has_no_deviation(self, chain_graph):
        for x in range(8):
            assert all(d == 0 for _, d in simulate_truncated(chain_graph, x))

    def test_truncated_seven(self):
        g = single(replace(SEVEN, trunc_right=1))
        approx, dev = simulate_truncated(g, 1)[1]
        assert (approx, dev) == (8, 1)

    def test_seventeen_topology_within_budget(self, seventeen_graph):
        budgets = [32, 32]
        for x in range(8):
            sim = simulate_truncated(seventeen_graph, x)
            for b, out in zip(budgets, seventeen_graph.outputs):
                assert abs(sim[out.node][1]) <= b

    def test_simulate_all_matches_scalar(self, seventeen_graph):
        exact, approx = simulate_all(seventeen_graph)
        assert exact.shape == (4, 8)
        for x in range(8):
            sim = simulate_truncated(seventeen_graph, x)
            assert list(approx[:, x]) == [a for a, _ in sim]
            assert list(exact[:, x]) == evaluate_exact(seventeen_graph, x)


class TestDepthAndMsb:
    def test_depths(self, chain_graph, two_level_graph):
        assert adder_depth(chain_graph)[1] == 3
        assert adder_depth(two_level_graph)[1] == 2
        assert adder_depth(AdderGraph((), 3))[1] == 0

    def test_msb(self, two_level_graph):
        assert msb_of(0, two_level_graph) == 2
        assert msb_of(2, two_level_graph) == 8
        assert msb_of(0, AdderGraph((), 1, input_max=1)) == 0
        assert msb_of(0, two_level_graph, ErrorInterval(0, 1)) == 3


class TestCosts:
    @pytest.mark.parametrize("node, cost", [(SEVEN, 6), (SEVENTEEN, 0), (THREE, 3)])
    def test_structural(self, node, cost):
        per_node, total = count_onebit_structural(single(node))
        assert per_node[1] == cost == total

    def test_analytic_cases(self):
        m, total = count_onebit_analytic(single(SEVENTEEN))
        assert total == 0 and m[1].gain == m[1].sum_msb + 1
        m, total = count_onebit_analytic(single(SEVEN))
        assert (m[1].gain, total) == (0, 6)
        m, _ = count_onebit_analytic(single(replace(THREE, trunc_left=1, trunc_right=1)))
        assert m[1].gain == 1

    def test_chain_costs_more_than_two_level(self, chain_graph, two_level_graph):
        chain = count_onebit_structural(chain_graph)[1]
        assert 20 <= chain <= 24
        assert count_onebit_structural(two_level_graph)[1] < chain

    def test_ripple_layout_marks_cells(self):
        layout = ripple_layout(SEVEN, node_bounds(single(SEVEN))[1])
        assert layout == ["fa"] * 6

    def test_counters_agree_on_random_graphs(self):
        rng = random.Random(7)
        for _ in range(200):
            g = random_truncated_graph(rng) if rng.random() < 0.5 else random_graph(rng)
            assert count_onebit_analytic(g)[1] == count_onebit_structural(g)[1]

    def test_ripple_simulation_is_bit_exact(self, seventeen_graph, neg_shift_graph):
        for g in (seventeen_graph, neg_shift_graph):
            _, approx = simulate_all(g)
            for x in range(0, g.x_max + 1, 3):
                assert ripple_simulate(g, x) == list(approx[:, x])


class TestErrors:
    def test_exact_graph(self, chain_graph):
        assert all(e == ErrorInterval() for e in propagate_error(chain_graph))

    def test_right_truncation(self):
        g = single(AdderNode(1, 0, 0, 2, 0, PLUS, PLUS, 5, 0, 2))
        assert propagate_error(g)[1] == ErrorInterval(3, 0)

    def test_error_free_truncation(self):
        nodes = [
            AdderNode(1, 0, 0, 3, 0, PLUS, PLUS, 9, 0, 2),
            AdderNode(2, 0, 1, 1, 0, PLUS, PLUS, 11, 0, 2),
        ]
        g = attach_outputs(nodes, [11], 3)
        errors, zeros = propagate_with_zeros(g)
        assert zeros[1] == 2
        assert errors[2] == errors[1] == ErrorInterval(3, 0)

    def test_truncation_error(self):
        assert truncation_error(2, 0) == 3
        assert truncation_error(2, 2) == 0
        assert truncation_error(4, 1) == 14
        assert truncation_error(0, 3) == 0

    def test_subtraction_swaps(self):
        g = single(replace(SEVEN, trunc_right=1))
        assert propagate_error(g)[1] == ErrorInterval(0, 1)

    def test_budget_pass_and_fail(self, chain_graph, seventeen_graph):
        assert check_error_budget(chain_graph, [0, 0]).ok
        report = check_error_budget(seventeen_graph, [32, 32])
        assert report.ok and [line.margin for line in report.lines] == [17, 3]
        g = single(AdderNode(1, 0, 0, 3, 0, PLUS, PLUS, 9, 0, 3), w_in=4)
        bad = check_error_budget(g, {0: 6})
        assert not bad.ok and bad.lines[0].margin == -1

    def test_intervals_sound_on_random_graphs(self):
        rng = random.Random(11)
        for _ in range(200):
            g = random_truncated_graph(rng, max_w_in=6)
            errors = propagate_error(g)
            exact, approx = simulate_all(g)
            dev = approx - exact
            for k, e in enumerate(errors):
                assert -e.eps_inf <= int(np.min(dev[k])) and int(np.max(dev[k])) <= e.eps_sup
