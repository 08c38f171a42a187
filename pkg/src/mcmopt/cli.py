"""Command-line front end: ``mcmopt {solve,verify,cost,emit,oracle}``.

Runs the pipeline in process unless ``--server URL`` is given, in which case
the same request bodies are posted to a running service. A bare flag list
(``mcmopt --constants 7,19,31``) means ``solve``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from pydantic import BaseModel, ValidationError

from . import __version__
from .service import operations as ops
from .service.schemas import (
    CostResponse,
    EmitRequest,
    EmitResponse,
    GraphRequest,
    OracleRequest,
    OracleResponse,
    ReportResponse,
    SolveRequest,
)

EMIT_CHOICES = ("dot", "exchange", "lp", "report")
COMMANDS = ("solve", "verify", "cost", "emit", "oracle")

EXIT_OK = 0
EXIT_FAILED = 1  # ran to completion but a verification or status check failed
EXIT_STAGE = 2  # a pipeline stage rejected the input


class CliError(Exception):
    def __init__(self, stage: str, detail: str):
        super().__init__(f"[{stage}] {detail}")
        self.stage = stage


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit_list(text: str) -> tuple[str, ...]:
    items = tuple(t for t in text.replace(" ", "").split(",") if t)
    bad = [t for t in items if t not in EMIT_CHOICES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown --emit item(s) {', '.join(bad)}; choose from {', '.join(EMIT_CHOICES)}")
    return items


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--server", metavar="URL", help="post the request to a running service instead of solving locally")
    p.add_argument("--json", action="store_true", help="print the response as JSON")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_instance(p: argparse.ArgumentParser) -> None:
    p.add_argument("--constants", type=_int_list, required=True, help="comma-separated target constants")
    p.add_argument("--metric", choices=("adders", "adders-ad", "bits", "tmcm"), default="adders")
    p.add_argument("--wordlength-in", type=int, help="input word length w_in")
    p.add_argument("--error", help='error budget: an integer or "0.5ulp@k"')
    p.add_argument("--adder-bound", type=int, help="number of adder slots (default: CSD bound or adders optimum)")
    p.add_argument("--ad-bound", type=int, help="maximum adder depth")
    p.add_argument("--timeout", type=float, default=1800.0, help="solver time limit in seconds")
    p.add_argument("--warm-start", choices=("auto", "off"), default="auto")
    p.add_argument("--adder-slack", type=int, default=0, help="extra adder slots beyond the bound")
    p.add_argument("--no-symmetry", action="store_true", help="drop the symmetry-breaking rows")
    p.add_argument("--native-indicators", action="store_true", help="emit indicator rows instead of big-M")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcmopt", description="Multiplierless constant multiplication by ILP.")
    parser.add_argument("--version", action="version", version=f"mcmopt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="build, solve, decode and verify")
    _add_instance(p)
    p.add_argument("--solver", help="solver profile (highs or cbc; default: highs if installed)")
    p.add_argument("--out", help="directory for report.txt, graph.dot, graph.mcm, model.lp, solution.sol")
    p.add_argument("--emit", type=_emit_list, default=EMIT_CHOICES, help="comma list of dot,exchange,lp,report")
    _add_common(p)

    for name, text in (("verify", "re-verify a graph in exchange format"), ("cost", "per-node cost and error table")):
        p = sub.add_parser(name, help=text)
        p.add_argument("graph", help="exchange-format file ('-' for stdin)")
        p.add_argument("--error", type=_int_list, help="budget per output, comma-separated")
        _add_common(p)

    p = sub.add_parser("emit", help="write the LP model (and warm start) without solving")
    _add_instance(p)
    p.add_argument("--out", help="directory for model.lp and start.mst (default: LP to stdout)")
    _add_common(p)

    p = sub.add_parser("oracle", help="exhaustive breadth-first adder count for small instances")
    p.add_argument("--constants", type=_int_list, required=True)
    p.add_argument("--max-adders", type=int)
    p.add_argument("--wordlength", type=int, help="maximum intermediate word length")
    p.add_argument("--no-negative-shifts", action="store_true")
    _add_common(p)
    return parser


def _solve_request(args, cls=SolveRequest) -> BaseModel:
    fields = dict(
        constants=args.constants,
        metric=args.metric,
        wordlength_in=args.wordlength_in,
        error=args.error,
        adder_bound=args.adder_bound,
        ad_bound=args.ad_bound,
        timeout=args.timeout,
        warm_start=args.warm_start,
        symmetry_breaking=not args.no_symmetry,
        adder_slack=args.adder_slack,
        native_indicators=args.native_indicators,
    )
    if cls is SolveRequest:
        fields["solver"] = args.solver
    return cls(**fields)


def _read_graph(path: str) -> str:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise CliError("parse", f"cannot read {path}: {exc.strerror}") from None
    return " ".join(text.split())


def _remote(url: str, route: str, body: BaseModel, response_cls, timeout: float | None = None):
    import httpx

    try:
        resp = httpx.post(url.rstrip("/") + route, json=body.model_dump(), timeout=(timeout or 60.0) + 60.0)
    except httpx.HTTPError as exc:
        raise CliError("server", f"{url}: {exc}") from None
    if resp.status_code == 422:
        detail = resp.json()
        if "stage" in detail:
            raise CliError(detail["stage"], detail["detail"])
        raise CliError("normalize", json.dumps(detail.get("detail", detail)))
    if resp.status_code != 200:
        raise CliError("server", f"{url}{route}: HTTP {resp.status_code}")
    return response_cls.model_validate(resp.json())


def _call(args, route: str, body: BaseModel, response_cls, local):
    if args.server:
        return _remote(args.server, route, body, response_cls, getattr(args, "timeout", None))
    try:
        return local(body)
    except ops.RequestError as exc:
        raise CliError(exc.stage, exc.detail) from None


def _print(args, response: BaseModel, text: str) -> None:
    if args.json:
        print(response.model_dump_json(indent=2))
    else:
        sys.stdout.write(text)


def _write(folder: Path, name: str, text: str, written: list[str]) -> None:
    folder.mkdir(parents=True, exist_ok=True)
    (folder / name).write_text(text)
    written.append(str(folder / name))


def cmd_solve(args) -> int:
    from .pipeline import write_artifacts

    req = _solve_request(args)
    result = None
    if args.server:
        report = _remote(args.server, "/solve", req, ReportResponse, req.timeout)
    else:
        try:
            report, result = ops.run_solve(req)
        except ops.RequestError as exc:
            raise CliError(exc.stage, exc.detail) from None
    if args.out:
        written: list[str] = []
        if result is not None:
            written = write_artifacts(result, args.out, None, args.emit)
        else:
            # a remote run only returns the report, the graph and its drawing
            folder = Path(args.out)
            if "report" in args.emit:
                _write(folder, "report.txt", report.text, written)
            if report.exchange and "exchange" in args.emit:
                _write(folder, "graph.mcm", report.exchange + "\n", written)
            if report.dot and "dot" in args.emit:
                _write(folder, "graph.dot", report.dot, written)
        logging.getLogger("mcmopt").info("wrote %s", ", ".join(written))
    _print(args, report, report.text)
    return EXIT_OK if report.verified else EXIT_FAILED


def cmd_verify(args) -> int:
    req = GraphRequest(graph=_read_graph(args.graph), error=args.error)
    report = _call(args, "/verify", req, ReportResponse, ops.run_verify)
    _print(args, report, report.text)
    return EXIT_OK if report.verified else EXIT_FAILED


def cmd_cost(args) -> int:
    req = GraphRequest(graph=_read_graph(args.graph), error=args.error)
    cost = _call(args, "/cost", req, CostResponse, ops.run_cost)
    rows = [f"{'node':>4} {'c':>8} {'msb':>4} {'msbS':>4} {'AD':>3} {'g':>3} {'psi':>3} {'B':>3} {'B_rc':>4} {'eps':>12}"]
    for n in cost.nodes:
        rows.append(
            f"{n.node:>4} {n.fundamental:>8} {n.msb:>4} {n.sum_msb:>4} {n.adder_depth:>3} {n.gain:>3} "
            f"{n.carry:>3} {n.onebit_analytic:>3} {n.onebit_structural:>4} {f'[-{n.eps_inf}, {n.eps_sup}]':>12}"
        )
    rows.append(f"total one-bit adders: analytic {cost.total_analytic}, structural {cost.total_structural}")
    _print(args, cost, "\n".join(rows) + "\n")
    return EXIT_OK if cost.total_analytic == cost.total_structural else EXIT_FAILED


def cmd_emit(args) -> int:
    req = _solve_request(args, EmitRequest)
    out = _call(args, "/emit", req, EmitResponse, ops.run_emit)
    if args.out:
        written: list[str] = []
        _write(Path(args.out), "model.lp", out.lp, written)
        if out.start is not None:
            _write(Path(args.out), "start.mst", out.start, written)
        text = "".join(f"wrote {w}\n" for w in written)
        text += " ".join(f"{k}={v}" for k, v in out.stats.items()) + "\n"
        _print(args, out, text)
    else:
        _print(args, out, out.lp)
    return EXIT_OK


def cmd_oracle(args) -> int:
    req = OracleRequest(
        constants=args.constants,
        max_adders=args.max_adders,
        wordlength=args.wordlength,
        negative_shifts=not args.no_negative_shifts,
    )
    out = _call(args, "/oracle", req, OracleResponse, ops.run_oracle)
    text = f"optimum adders  {out.optimum_adders}\nexplored states {out.explored_states}\nwitness         {out.exchange}\n"
    _print(args, out, text)
    return EXIT_OK


HANDLERS = {"solve": cmd_solve, "verify": cmd_verify, "cost": cmd_cost, "emit": cmd_emit, "oracle": cmd_oracle}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0].startswith("-") and argv[0] not in ("-h", "--help", "--version"):
        argv.insert(0, "solve")
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return HANDLERS[args.command](args)
    except CliError as exc:
        print(f"mcmopt: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except ValidationError as exc:
        print(f"mcmopt: [normalize] {exc.errors()[0]['loc'][-1]}: {exc.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())
