import pytest

from mcmopt.backend import (
    OracleLimitError,
    SolutionParseError,
    SolverJob,
    SolverNotFound,
    available_profiles,
    bfs_oracle,
    build_command,
    format_start,
    load_profile,
    parse_solution,
    solve_external,
    solve_model,
    solver_available,
)
from mcmopt.graph import validate
from mcmopt.milp import Status, check_binding, emit_lp
from mcmopt.models import Instance, build, build_mcm_adders, csd_binding

PROFILES = [p for p in ("cbc", "highs") if solver_available(p)]


class TestProfiles:
    def test_shipped(self):
        assert {"cbc", "highs"} <= set(available_profiles())

    def test_unknown(self):
        with pytest.raises(SolverNotFound):
            load_profile("gurobi-in-a-box")

    def test_command_with_and_without_start(self):
        profile = load_profile("cbc")
        files = {"lp": "m.lp", "start": "s.mst", "solution": "o.sol", "log": "l.txt"}
        cmd = build_command(profile, "cbc", files, 30, True)
        assert cmd[:2] == ["cbc", "m.lp"] and "-mips" in cmd and cmd[-1] == "o.sol"
        assert "-mips" not in build_command(profile, "cbc", files, 30, False)

    def test_cbc_start_format(self):
        text = format_start(load_profile("cbc"), "u_1 1\nc_1 7\n", 1)
        assert text.splitlines() == ["Feasible - objective value 1", "0 u_1 1 0", "1 c_1 7 0"]

    def test_missing_binary_env(self, monkeypatch):
        monkeypatch.setenv("MCMOPT_CBC_BIN", "/nonexistent/cbc")
        assert not solver_available("cbc")


class TestParser:
    def test_cbc_optimal(self):
        text = "Optimal - objective value 1.00000000\n      0 u_1 1 0\n      1 c_1 7 0\n"
        b = parse_solution(load_profile("cbc"), text)
        assert b.status == Status.OPTIMAL and b.objective_value == 1 and b.values == {"u_1": 1, "c_1": 7}

    def test_cbc_infeasible(self):
        b = parse_solution(load_profile("cbc"), "Infeasible - objective value 0\n")
        assert b.status == Status.INFEASIBLE and not b.has_solution

    def test_timeout_without_incumbent(self):
        b = parse_solution(load_profile("cbc"), "Stopped on time (no integer solution - continuous used)\n")
        assert b.status == Status.ERROR

    def test_highs_feasible(self):
        b = parse_solution(load_profile("highs"), "feasible objective 12\nx 3\ny 0.9999999\n")
        assert b.status == Status.FEASIBLE and b.values == {"x": 3, "y": 1}

    @pytest.mark.parametrize(
        "text, where",
        [
            ("Optimal - objective value 1\n      0 u_1\n", "line 2"),
            ("Optimal - objective value 1\n 0 u_1 1 0\n 1 c_1 seven 0\n", "line 3"),
            ("Solved somehow\n", "line 1"),
            ("", "line 1"),
        ],
    )
    def test_malformed(self, text, where):
        with pytest.raises(SolutionParseError, match=where):
            parse_solution(load_profile("cbc"), text)

    def test_job_validates_timeout(self):
        with pytest.raises(ValueError):
            SolverJob("x", timeout=0)


@pytest.mark.solver
@pytest.mark.parametrize("name", PROFILES)
class TestSolvers:
    def test_seven_optimal(self, name, tmp_path):
        bundle = build_mcm_adders(Instance((7,)))
        b = solve_model(bundle.model, name, 60, csd_binding(bundle), str(tmp_path))
        assert b.status == Status.OPTIMAL and b.objective_value == 1
        assert check_binding(bundle.model, b)
        assert (tmp_path / "model.lp").read_text() == emit_lp(bundle.model)
        assert (tmp_path / "log.txt").exists()

    def test_unknown_variable_rejected(self, name, tmp_path):
        bundle = build_mcm_adders(Instance((7,)))
        other = build_mcm_adders(Instance((7, 19, 31)))
        with pytest.raises(SolutionParseError, match="unknown variables"):
            solve_external(SolverJob(emit_lp(other.model), None, 60, name, str(tmp_path)), bundle.model)

    def test_short_timeout(self, name):
        inst = Instance((45, 89, 111, 213), metric="bits", input_wordlength=8)
        bundle = build(inst)
        b = solve_model(bundle.model, name, 1, csd_binding(bundle))
        assert b.status in (Status.FEASIBLE, Status.OPTIMAL, Status.ERROR)
        if b.has_solution:
            assert check_binding(bundle.model, b)
        else:
            assert b.message


class TestOracle:
    @pytest.mark.parametrize("targets, optimum", [((45,), 2), ((7, 19, 31), 3), ((1,), 0), ((7,), 1), ((49, 51), 3)])
    def test_optimum(self, targets, optimum):
        r = bfs_oracle(targets)
        assert r.optimum_adders == optimum
        assert validate(r.witness).ok and len(r.witness.nodes) == optimum

    def test_without_negative_shifts(self):
        assert bfs_oracle((7, 19, 31), negative_shifts=False).optimum_adders == 4

    def test_witness_for_45(self):
        funds = [n.fundamental for n in bfs_oracle((45,)).witness.nodes]
        assert funds[-1] == 45 and len(funds) == 2

    def test_bound_too_small(self):
        with pytest.raises(OracleLimitError):
            bfs_oracle((45,), max_adders=1)

    def test_state_guard(self):
        with pytest.raises(OracleLimitError):
            bfs_oracle((1023, 4093, 2731), state_limit=50)
