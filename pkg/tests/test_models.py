import pytest

from mcmopt.backend import solve_model
from mcmopt.graph import adder_depth, check_error_budget, count_onebit_analytic, count_onebit_structural, simulate_all, validate
from mcmopt.milp import SolutionBinding, Status, check_binding
from mcmopt.models import (
    DecodeError,
    Instance,
    InstanceError,
    SeedError,
    TriviallyInfeasible,
    build,
    build_mcm_ad,
    build_mcm_adders,
    build_mcm_bits,
    build_tmcm,
    csd_binding,
    csd_graph,
    decode,
    half_ulp_budgets,
    parse_budget,
)
from mcmopt.numeric import ad_lower_bound

solver = pytest.mark.solver


def solve(bundle, profile, timeout=120):
    try:
        start = csd_binding(bundle)
    except SeedError:
        start = None  # fewer adder slots than the CSD expansion uses
    binding = solve_model(bundle.model, profile, timeout, start)
    return binding, (decode(bundle, binding) if binding.has_solution else None)


class TestInstance:
    def test_aliases_and_sizes(self):
        inst = Instance((49, 51), metric="tmcm", input_wordlength=3, budgets=(32, 32))
        assert inst.metric == "truncated"
        assert inst.odd_targets == [49, 51] and inst.x_max == 7
        assert inst.n_adders == 5

    @pytest.mark.parametrize(
        "kwargs, match",
        [
            (dict(targets=()), "empty"),
            (dict(targets=(7,), metric="fastest"), "unknown metric"),
            (dict(targets=(7,), metric="bits"), "input_wordlength"),
            (dict(targets=(7,), metric="truncated", input_wordlength=3), "budgets"),
            (dict(targets=(7, 9), metric="truncated", input_wordlength=3, budgets=(1,)), "1 budgets for 2"),
            (dict(targets=(7,), budgets=(-1,)), "non-negative"),
        ],
    )
    def test_rejects(self, kwargs, match):
        with pytest.raises(InstanceError, match=match):
            Instance(**kwargs)

    def test_half_ulp(self):
        assert half_ulp_budgets((49, 51), 3, 3) == (32, 32)
        assert parse_budget("0.5ulp@3", (49, 51), 3) == (32, 32)
        assert parse_budget("5", (7, 9), None) == (5, 5)
        with pytest.raises(InstanceError):
            parse_budget("half", (7,), 3)
        with pytest.raises(InstanceError):
            parse_budget("0.5ulp@3", (7,), None)


class TestWarmStart:
    @pytest.mark.parametrize("targets", [(7,), (45,), (7, 19, 31), (49, 51), (1,), (-12, 3, 96)])
    @pytest.mark.parametrize("metric", ["adders", "adders_ad", "bits", "truncated"])
    def test_csd_binding_is_feasible(self, targets, metric):
        kw = dict(input_wordlength=3) if metric in ("bits", "truncated") else {}
        if metric == "truncated":
            kw["budgets"] = tuple(4 for _ in targets)
        bundle = build(Instance(targets, metric=metric, **kw))
        assert check_binding(bundle.model, csd_binding(bundle))

    def test_csd_graph_valid(self):
        g = csd_graph((45, 49, 51, 7), 4)
        assert validate(g).ok
        assert len(g.nodes) <= 1 + 2 + 3 + 3


class TestBuild:
    def test_trivially_infeasible_depth(self):
        with pytest.raises(TriviallyInfeasible):
            build_mcm_ad(Instance((49, 51), ad_bound=1))

    def test_flavor_guards(self):
        with pytest.raises(InstanceError):
            build_mcm_bits(Instance((7,)))
        with pytest.raises(InstanceError):
            build_tmcm(Instance((7,), metric="bits", input_wordlength=3))

    def test_native_indicators(self):
        bundle = build(Instance((7,)), native_indicators=True)
        assert bundle.model.stats()["indicators"] > 0
        assert check_binding(bundle.model, csd_binding(bundle))

    def test_tampered_binding_rejected(self):
        bundle = build_mcm_adders(Instance((7,)))
        values = dict(csd_binding(bundle).values)
        values["c_1"] -= 2
        with pytest.raises(DecodeError, match="violated"):
            decode(bundle, SolutionBinding(values))

    def test_empty_graph_for_one(self):
        bundle = build_mcm_adders(Instance((1,)))
        graph = decode(bundle, csd_binding(bundle))
        assert graph.nodes == () and graph.outputs[0].node == 0


@solver
class TestAdders:
    def test_seven(self, profile):
        binding, graph = solve(build_mcm_adders(Instance((7,), adder_bound=1)), profile)
        assert binding.status == Status.OPTIMAL and binding.objective_value == 1

    def test_forty_five_needs_two(self, profile):
        binding, _ = solve(build_mcm_adders(Instance((45,), adder_bound=1)), profile)
        assert binding.status == Status.INFEASIBLE
        binding, graph = solve(build_mcm_adders(Instance((45,))), profile)
        assert binding.objective_value == 2 and len(graph.nodes) == 2

    def test_negative_shift_needed(self, profile):
        binding, graph = solve(build_mcm_adders(Instance((7, 19, 31))), profile)
        assert binding.objective_value == 3
        node19 = next(n for n in graph.nodes if n.fundamental == 19)
        assert node19.neg_shift == 1


@solver
class TestDepth:
    def test_49_51(self, profile):
        binding, graph = solve(build_mcm_ad(Instance((49, 51))), profile)
        assert len(graph.nodes) == 3 and adder_depth(graph)[1] == 2
        assert binding.objective_value == 5 * 3 + 2

    def test_seven(self, profile):
        _, graph = solve(build_mcm_ad(Instance((7,))), profile)
        assert len(graph.nodes) == 1 and adder_depth(graph)[1] == 1


@solver
class TestBits:
    def test_49_51(self, profile):
        _, graph = solve(build_mcm_bits(Instance((49, 51), metric="bits", input_wordlength=3, adder_bound=3)), profile)
        structural = count_onebit_structural(graph)[1]
        assert structural <= 9
        assert count_onebit_analytic(graph)[1] == structural
        depth, _ = adder_depth(graph)
        for out in graph.outputs:
            assert depth[out.node] >= ad_lower_bound(graph.fundamental(out.node))


@solver
class TestTruncated:
    def test_49_51_half_ulp(self, profile):
        inst = Instance((49, 51), metric="truncated", input_wordlength=3, adder_bound=3, budgets=(32, 32))
        _, graph = solve(build_tmcm(inst), profile)
        assert count_onebit_structural(graph)[1] <= 4
        assert check_error_budget(graph, [32, 32]).ok
        exact, approx = simulate_all(graph)
        for out in graph.outputs:
            assert abs(approx[out.node] - exact[out.node]).max() <= 32

    def test_zero_budget_matches_bits(self, profile):
        kw = dict(input_wordlength=3, adder_bound=2)
        b_bits, _ = solve(build_mcm_bits(Instance((45,), metric="bits", **kw)), profile)
        b_trunc, g = solve(build_tmcm(Instance((45,), metric="truncated", budgets=(0,), **kw)), profile)
        assert b_bits.objective_value == b_trunc.objective_value
        assert not g.truncated
