"""Request handlers shared by the HTTP app and the in-process CLI."""

from __future__ import annotations

from ..backend import OracleLimitError, bfs_oracle
from ..graph import count_onebit_analytic, count_onebit_structural, propagate_error
from ..io import ExchangeError, from_exchange, to_dot, to_exchange
from ..milp import emit_lp, emit_mip_start
from ..models import InstanceError, SeedError, TriviallyInfeasible, build, csd_binding
from ..pipeline import SolveResult, StageError, make_instance, solve_instance, verify_graph
from .schemas import (
    CostResponse,
    EmitRequest,
    EmitResponse,
    GraphRequest,
    NodeCost,
    OracleRequest,
    OracleResponse,
    ReportResponse,
    SolveRequest,
)


class RequestError(ValueError):
    """Bad input, tagged with the pipeline stage that rejected it."""

    def __init__(self, stage: str, detail: str):
        super().__init__(f"[{stage}] {detail}")
        self.stage = stage
        self.detail = detail


def _instance(req: SolveRequest):
    try:
        return make_instance(
            req.constants,
            req.metric,
            req.wordlength_in,
            req.error,
            req.adder_bound,
            req.ad_bound,
            req.timeout,
            req.symmetry_breaking,
            req.adder_slack,
        )
    except (InstanceError, ValueError) as exc:
        raise RequestError("normalize", str(exc)) from None


def report_response(result_report, graph=None) -> ReportResponse:
    body = result_report.to_dict()
    body["targets"] = list(body["targets"])
    return ReportResponse(**body, dot=to_dot(graph) if graph is not None else None, text=result_report.to_text())


def run_solve(req: SolveRequest, workdir: str | None = None) -> tuple[ReportResponse, SolveResult]:
    inst = _instance(req)
    try:
        result = solve_instance(inst, req.solver, req.timeout, req.warm_start, workdir, req.native_indicators)
    except StageError as exc:
        raise RequestError(exc.stage, exc.message) from None
    return report_response(result.report, result.graph), result


def run_verify(req: GraphRequest) -> ReportResponse:
    try:
        graph = from_exchange(req.graph)
    except ExchangeError as exc:
        raise RequestError("parse", str(exc)) from None
    if req.error is not None and len(req.error) != len(graph.outputs):
        raise RequestError("normalize", f"{len(req.error)} budgets for {len(graph.outputs)} outputs")
    return report_response(verify_graph(graph, req.error), graph)


def run_cost(req: GraphRequest) -> CostResponse:
    try:
        graph = from_exchange(req.graph)
    except ExchangeError as exc:
        raise RequestError("parse", str(exc)) from None
    metrics, total = count_onebit_analytic(graph)
    structural, total_s = count_onebit_structural(graph)
    errors = propagate_error(graph)
    nodes = [
        NodeCost(
            node=n.index,
            fundamental=n.fundamental,
            msb=metrics[n.index].msb,
            sum_msb=metrics[n.index].sum_msb,
            adder_depth=metrics[n.index].adder_depth,
            gain=metrics[n.index].gain,
            carry=metrics[n.index].carry_msb,
            onebit_analytic=metrics[n.index].onebit_cost,
            onebit_structural=structural[n.index],
            eps_inf=errors[n.index].eps_inf,
            eps_sup=errors[n.index].eps_sup,
        )
        for n in graph.nodes
    ]
    return CostResponse(nodes=nodes, total_analytic=total, total_structural=total_s)


def run_emit(req: EmitRequest) -> EmitResponse:
    inst = _instance(req)
    try:
        bundle = build(inst, None, req.native_indicators)
    except TriviallyInfeasible as exc:
        raise RequestError("build", f"infeasible: {exc}") from None
    except InstanceError as exc:
        raise RequestError("build", str(exc)) from None
    start = None
    if req.warm_start == "auto":
        try:
            start = emit_mip_start(bundle.model, csd_binding(bundle))
        except SeedError:
            start = None
    return EmitResponse(lp=emit_lp(bundle.model), start=start, stats=bundle.model.stats())


def run_oracle(req: OracleRequest) -> OracleResponse:
    try:
        result = bfs_oracle(req.constants, req.max_adders, req.wordlength, negative_shifts=req.negative_shifts)
    except OracleLimitError as exc:
        raise RequestError("oracle", str(exc)) from None
    except ValueError as exc:
        raise RequestError("normalize", str(exc)) from None
    return OracleResponse(
        optimum_adders=result.optimum_adders,
        explored_states=result.explored_states,
        exchange=to_exchange(result.witness),
    )
