"""End-to-end runs: build, warm start, solve, decode and re-verify.

The solver is untrusted: a run is marked verified only when the decoded graph
passes validation, both cost counters agree, every budget holds, the adder
depth respects the CSD lower bound and (for small input word lengths) an
exhaustive simulation stays inside the predicted error intervals.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .backend import DEFAULT_TIMEOUT, SolverError, solve_model, solver_available
from .graph import (
    AdderGraph,
    NegativeDatapathError,
    adder_depth,
    check_error_budget,
    count_onebit_analytic,
    count_onebit_structural,
    propagate_error,
    ripple_simulate,
    simulate_all,
    validate,
)
from .io import emit_instance, to_dot, to_exchange
from .milp import SolutionBinding, Status, check_binding, emit_lp
from .models import (
    DEFAULT_INPUT_WORDLENGTH,
    DecodeError,
    Instance,
    InstanceError,
    ModelBundle,
    SeedError,
    TriviallyInfeasible,
    attach_outputs,
    build,
    csd_graph,
    decode,
    graph_to_binding,
    parse_budget,
)
from .numeric import ad_lower_bound, normalize_constant

log = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 12


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.message = message


@dataclass
class OutputLine:
    target: int
    node: int
    budget: int | None
    eps_inf: int
    eps_sup: int
    observed_min: int | None = None
    observed_max: int | None = None

    @property
    def ok(self) -> bool:
        if self.budget is not None and max(self.eps_inf, self.eps_sup) > self.budget:
            return False
        if self.observed_min is not None and not -self.eps_inf <= self.observed_min <= self.observed_max <= self.eps_sup:
            return False
        return True


@dataclass
class RunReport:
    targets: tuple[int, ...]
    flavor: str
    status: str
    adders: int = 0
    adder_depth: int = 0
    onebit_analytic: int = 0
    onebit_structural: int = 0
    objective: int | None = None
    outputs: list[OutputLine] = field(default_factory=list)
    exhaustive: bool = False
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    exchange: str = ""
    wall_time: float = 0.0

    @property
    def verified(self) -> bool:
        return not self.failures and self.status in ("optimal", "feasible")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["verified"] = self.verified
        for line, src in zip(out["outputs"], self.outputs):
            line["ok"] = src.ok
        return out

    def to_text(self, with_time: bool = True) -> str:
        rows = [
            f"targets        {', '.join(map(str, self.targets))}",
            f"flavor         {self.flavor}",
            f"status         {self.status}",
            f"objective      {'-' if self.objective is None else self.objective}",
            f"adders (N_A)   {self.adders}",
            f"adder depth    {self.adder_depth}",
            f"one-bit (#B)   analytic {self.onebit_analytic}, structural {self.onebit_structural}",
            f"simulation     {'exhaustive' if self.exhaustive else 'interval prediction only'}",
        ]
        if self.outputs:
            rows.append("outputs")
            for o in self.outputs:
                budget = "-" if o.budget is None else str(o.budget)
                seen = "" if o.observed_min is None else f" observed [{o.observed_min}, {o.observed_max}]"
                rows.append(
                    f"  {o.target:>8} node {o.node:<3} budget {budget:>6} "
                    f"interval [-{o.eps_inf}, {o.eps_sup}]{seen} {'ok' if o.ok else 'FAIL'}"
                )
        rows.append(f"graph          {self.exchange or '-'}")
        for note in self.notes:
            rows.append(f"note           {note}")
        for failure in self.failures:
            rows.append(f"FAIL           {failure}")
        rows.append(f"verified       {'yes' if self.verified else 'no'}")
        if with_time:
            rows.append(f"wall time      {self.wall_time:.2f}s")
        return "\n".join(rows) + "\n"


def verify_graph(graph: AdderGraph, budgets=None, exhaustive_limit: int = EXHAUSTIVE_LIMIT) -> RunReport:
    """Every check the library can run on a graph, collected into a report."""
    report = RunReport(tuple(o.target for o in graph.outputs), "verify", "feasible")
    structure = validate(graph)
    if not structure.ok:
        report.failures += structure.violations
        return report
    _fill_metrics(report, graph)
    if report.onebit_analytic != report.onebit_structural:
        report.failures.append(
            f"one-bit counters disagree: analytic {report.onebit_analytic}, structural {report.onebit_structural}"
        )
    depth, _ = adder_depth(graph)
    for o in graph.outputs:
        odd = normalize_constant(o.target).odd
        if odd != 1 and depth[o.node] < ad_lower_bound(odd):
            report.failures.append(f"target {o.target}: depth {depth[o.node]} below the CSD bound")
    if isinstance(budgets, (list, tuple)):
        budgets = dict(enumerate(budgets))
    budgets = budgets or {}
    errors = propagate_error(graph)
    for j, o in enumerate(graph.outputs):
        report.outputs.append(OutputLine(o.target, o.node, budgets.get(j), errors[o.node].eps_inf, errors[o.node].eps_sup))
    for line in check_error_budget(graph, budgets).lines:
        if not line.ok:
            report.failures.append(f"output {line.output} ({line.target}): budget exceeded, margin {line.margin}")
    if graph.input_wordlength <= exhaustive_limit:
        report.exhaustive = True
        _exhaustive(graph, errors, report)
    else:
        report.notes.append(f"w_in = {graph.input_wordlength} > {exhaustive_limit}: no exhaustive simulation")
    return report


def _fill_metrics(report: RunReport, graph: AdderGraph) -> None:
    report.adders = len(graph.nodes)
    report.adder_depth = adder_depth(graph)[1]
    report.onebit_analytic = count_onebit_analytic(graph)[1]
    report.onebit_structural = count_onebit_structural(graph)[1]
    report.exchange = to_exchange(graph)


def _exhaustive(graph: AdderGraph, errors, report: RunReport) -> None:
    try:
        exact, approx = simulate_all(graph)
    except NegativeDatapathError as exc:
        report.failures.append(f"simulation: {exc}")
        return
    dev = approx - exact
    for k in range(1, len(graph.nodes) + 1):
        lo, hi = int(np.min(dev[k])), int(np.max(dev[k]))
        if lo < -errors[k].eps_inf or hi > errors[k].eps_sup:
            report.failures.append(f"node {k}: deviation [{lo}, {hi}] outside [-{errors[k].eps_inf}, {errors[k].eps_sup}]")
    for line in report.outputs:
        line.observed_min = int(np.min(dev[line.node]))
        line.observed_max = int(np.max(dev[line.node]))
        if line.budget is not None and max(-line.observed_min, line.observed_max) > line.budget:
            report.failures.append(f"output {line.target}: simulated deviation exceeds budget {line.budget}")
    for x in range(graph.x_max + 1):
        bits = ripple_simulate(graph, x)
        if any(int(b) != int(a) for b, a in zip(bits, approx[:, x])):
            report.failures.append(f"ripple layout disagrees with simulation at x={x}")
            break


@dataclass
class SolveResult:
    report: RunReport
    graph: AdderGraph | None = None
    bundle: ModelBundle | None = None
    binding: SolutionBinding | None = None
    lp: str = ""


def _solution_text(bundle: ModelBundle, binding: SolutionBinding) -> str:
    return "".join(f"{name} {binding.values[name]}\n" for name in bundle.model.vars)


def _seed(bundle: ModelBundle, graph: AdderGraph | None) -> SolutionBinding | None:
    if graph is None:
        return None
    try:
        return graph_to_binding(bundle, graph)
    except SeedError as exc:
        log.info("warm start rejected: %s", exc)
        return None


def _solve_bundle(bundle, profile, timeout, start, workdir) -> SolutionBinding:
    try:
        binding = solve_model(bundle.model, profile, timeout, start, workdir)
    except SolverError as exc:
        raise StageError("solve", str(exc)) from exc
    if binding.has_solution:
        check = check_binding(bundle.model, binding)
        if not check:
            raise StageError("check", f"solver returned an infeasible point: {check.violation}")
    return binding


def solve_instance(
    inst: Instance,
    profile: str | None = None,
    timeout: float | None = None,
    warm_start: str = "auto",
    workdir: str | None = None,
    native_indicators: bool = False,
) -> SolveResult:
    started = time.monotonic()
    profile = profile or default_profile()
    timeout = timeout or inst.timeout or DEFAULT_TIMEOUT
    flavor = inst.metric
    report = RunReport(inst.targets, flavor, "error")
    w_in = inst.input_wordlength or DEFAULT_INPUT_WORDLENGTH
    workdir_path = Path(workdir) if workdir else None

    def done(result: SolveResult) -> SolveResult:
        result.report.wall_time = time.monotonic() - started
        return result

    if not inst.odd_targets:
        graph = attach_outputs([], inst.targets, w_in)
        report = verify_graph(graph, inst.budgets)
        report.flavor, report.status, report.objective = flavor, "optimal", 0
        report.notes.append("every target is a power of two: no adder needed")
        return done(SolveResult(report, graph))

    if flavor == "truncated" and inst.budgets is not None and not any(inst.budgets):
        report.notes.append("all budgets are 0: the truncated model degenerates to the one-bit model")

    prior_graph = None
    if flavor in ("bits", "truncated") and inst.adder_bound is None:
        # the adder count of an adders-optimal graph bounds the one-bit models
        first = inst.with_(metric="adders", budgets=None, adder_bound=None, adder_slack=0)
        sub = solve_instance(first, profile, timeout, warm_start, str(workdir_path / "adders") if workdir_path else None)
        if sub.graph is not None and sub.report.status == "optimal":
            inst = inst.with_(adder_bound=len(sub.graph.nodes))
            prior_graph = sub.graph
            report.notes.append(f"adder bound {len(sub.graph.nodes)} taken from the adders optimum")
        else:
            report.notes.append("adders pre-solve not optimal: CSD adder bound used")
    try:
        bundle = build(inst, flavor, native_indicators)
    except TriviallyInfeasible as exc:
        report.status = "infeasible"
        report.failures.append(str(exc))
        return done(SolveResult(report))
    except InstanceError as exc:
        raise StageError("build", str(exc)) from exc
    lp = emit_lp(bundle.model)

    start = None
    if warm_start == "auto":
        start = _seed(bundle, prior_graph) or _seed(bundle, csd_graph(inst.targets, w_in))
        if start is not None:
            report.notes.append(f"warm start with objective {start.objective_value}")
    binding = _solve_bundle(bundle, profile, timeout, start, str(workdir_path / "solver") if workdir_path else None)
    report.status = binding.status.value
    result = SolveResult(report, None, bundle, binding, lp)
    if not binding.has_solution:
        report.failures.append(f"solver status {binding.status.value}: {binding.message}")
        return done(result)
    report.objective = binding.objective_value
    try:
        graph = decode(bundle, binding)
    except DecodeError as exc:
        raise StageError("decode", str(exc)) from exc
    budgets = inst.budgets if flavor == "truncated" else None
    checked = verify_graph(graph, budgets)
    checked.flavor, checked.status, checked.objective = flavor, report.status, report.objective
    checked.notes = report.notes + checked.notes
    result.report, result.graph = checked, graph
    return done(result)


def write_artifacts(result: SolveResult, out: str, inst: Instance | None = None, emit=("dot", "exchange", "lp", "report")) -> list[str]:
    folder = Path(out)
    folder.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name: str, text: str) -> None:
        (folder / name).write_text(text)
        written.append(str(folder / name))

    if "report" in emit:
        put("report.txt", result.report.to_text())
    if result.graph is not None:
        if "dot" in emit:
            put("graph.dot", to_dot(result.graph))
        if "exchange" in emit:
            put("graph.mcm", to_exchange(result.graph) + "\n")
    if "lp" in emit and result.lp:
        put("model.lp", result.lp)
    if result.bundle is not None and result.binding is not None and result.binding.has_solution:
        put("solution.sol", _solution_text(result.bundle, result.binding))
    if inst is not None:
        put("instance.txt", emit_instance(inst))
    return written


def make_instance(
    constants,
    metric: str = "adders",
    input_wordlength: int | None = None,
    error: str | None = None,
    adder_bound: int | None = None,
    ad_bound: int | None = None,
    timeout: float | None = None,
    symmetry_breaking: bool = True,
    adder_slack: int = 0,
) -> Instance:
    """Instance from front-end style arguments (``error`` is an integer or ``0.5ulp@k``)."""
    targets = tuple(int(c) for c in constants)
    budgets = parse_budget(error, targets, input_wordlength) if error is not None else None
    return Instance(
        targets=targets,
        metric=metric,
        input_wordlength=input_wordlength,
        budgets=budgets,
        adder_bound=adder_bound,
        ad_bound=ad_bound,
        timeout=timeout or DEFAULT_TIMEOUT,
        symmetry_breaking=symmetry_breaking,
        adder_slack=adder_slack,
    )


def default_profile() -> str:
    """``MCMOPT_SOLVER`` if set, else HiGHS when highspy is importable, else CBC."""
    if os.environ.get("MCMOPT_SOLVER"):
        return os.environ["MCMOPT_SOLVER"]
    return "highs" if solver_available("highs") else "cbc"


__all__ = [
    "default_profile",
    "make_instance",
    "OutputLine",
    "RunReport",
    "SolveResult",
    "StageError",
    "Status",
    "solve_instance",
    "verify_graph",
    "write_artifacts",
]
