"""CPLEX-style LP text emission, a small reference parser, and MIP-start files."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .model import BINARY, INTEGER, LinExpr, MilpModel, ModelError, SolutionBinding, check_binding

_WRAP = 78
_SENSE_OUT = {"<=": "<=", ">=": ">=", "==": "="}
_SENSE_IN = {"<=": "<=", "=<": "<=", "<": "<=", ">=": ">=", "=>": ">=", ">": ">=", "=": "=="}


def _terms(expr: LinExpr, model: MilpModel) -> list[str]:
    out = []
    for name, coef in expr.terms.items():
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        out.append(f"{sign} {name}" if mag == 1 else f"{sign} {mag} {name}")
    if not out:
        # some readers reject an empty row body
        out.append(f"+ 0 {next(iter(model.vars))}")
    if out[0].startswith("+ "):
        out[0] = out[0][2:]
    return out


def _wrap(head: str, tokens: list[str], tail: str = "") -> list[str]:
    lines, cur = [], head
    for tok in tokens + ([tail] if tail else []):
        if len(cur) + 1 + len(tok) > _WRAP and cur.strip():
            lines.append(cur)
            cur = "   " + tok
        else:
            cur = f"{cur} {tok}" if cur else tok
    lines.append(cur)
    return lines


def emit_lp(model: MilpModel) -> str:
    """Deterministic LP document; constraints in insertion order, variables in declaration order."""
    if not model.vars:
        raise ModelError("cannot emit a model without variables")
    lines = [f"\\ {model.name}"]
    for key in sorted(model.metadata):
        lines.append(f"\\ {key}: {model.metadata[key]}")
    lines.append("Minimize")
    obj = LinExpr(model.objective.terms)
    lines += _wrap(" obj:", _terms(obj, model))
    lines.append("Subject To")
    for c in model.constraints:
        head = f" {c.name}:"
        if c.guard is not None:
            head += f" {c.guard[0]} = {c.guard[1]} ->"
        lines += _wrap(head, _terms(c.lhs, model), f"{_SENSE_OUT[c.sense]} {c.rhs}")
    lines.append("Bounds")
    for v in model.vars.values():
        if v.kind == BINARY:
            continue
        if v.lower == v.upper:
            lines.append(f" {v.name} = {v.lower}")
        else:
            lines.append(f" {v.lower} <= {v.name} <= {v.upper}")
    generals = [v.name for v in model.vars.values() if v.kind == INTEGER]
    binaries = [v.name for v in model.vars.values() if v.kind == BINARY]
    if generals:
        lines.append("Generals")
        lines += _wrap("", generals)
    if binaries:
        lines.append("Binaries")
        lines += _wrap("", binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"


@dataclass
class ParsedLp:
    objective: dict[str, int] = field(default_factory=dict)
    rows: dict[str, tuple[dict[str, int], str, int, tuple[str, int] | None]] = field(default_factory=dict)
    bounds: dict[str, tuple[int, int]] = field(default_factory=dict)
    generals: list[str] = field(default_factory=list)
    binaries: list[str] = field(default_factory=list)


class LpParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*([+-])?\s*(\d+)?\s*([A-Za-z_][\w\[\],.]*)")


def _parse_terms(text: str, where: str) -> dict[str, int]:
    terms: dict[str, int] = {}
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise LpParseError(f"{where}: cannot parse terms at column {pos + 1}: {text[pos:pos + 20]!r}")
        sign = -1 if m.group(1) == "-" else 1
        coef = int(m.group(2)) if m.group(2) else 1
        terms[m.group(3)] = terms.get(m.group(3), 0) + sign * coef
        pos = m.end()
        while pos < len(text) and text[pos] == " ":
            pos += 1
    return {k: v for k, v in terms.items() if v}


def parse_lp(text: str) -> ParsedLp:
    """Reference reader for documents produced by :func:`emit_lp` (used to check round trips)."""
    out = ParsedLp()
    section = None
    statements: list[tuple[str, int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("\\", 1)[0].rstrip()
        if not line.strip():
            continue
        key = line.strip().lower()
        if key in ("minimize", "subject to", "bounds", "generals", "binaries", "end"):
            section = key
            continue
        if section is None:
            raise LpParseError(f"line {lineno}: content before any section")
        if line.startswith("   ") and statements and statements[-1][0] == section:
            s, n, body = statements[-1]
            statements[-1] = (s, n, body + " " + line.strip())
        else:
            statements.append((section, lineno, line.strip()))
    for section, lineno, body in statements:
        where = f"line {lineno}"
        if section == "minimize":
            name, _, rest = body.partition(":")
            out.objective = _parse_terms(rest, where)
        elif section == "subject to":
            name, _, rest = body.partition(":")
            guard = None
            if "->" in rest:
                g, _, rest = rest.partition("->")
                gname, _, gval = g.partition("=")
                guard = (gname.strip(), int(gval))
            m = re.match(r"(.*?)(<=|>=|=<|=>|=|<|>)\s*(-?\d+)\s*$", rest)
            if not m:
                raise LpParseError(f"{where}: missing relation in row {name.strip()}")
            out.rows[name.strip()] = (_parse_terms(m.group(1), where), _SENSE_IN[m.group(2)], int(m.group(3)), guard)
        elif section == "bounds":
            m = re.match(r"(-?\d+)\s*<=\s*(\S+)\s*<=\s*(-?\d+)$", body)
            if m:
                out.bounds[m.group(2)] = (int(m.group(1)), int(m.group(3)))
                continue
            m = re.match(r"(\S+)\s*=\s*(-?\d+)$", body)
            if not m:
                raise LpParseError(f"{where}: bad bound {body!r}")
            out.bounds[m.group(1)] = (int(m.group(2)), int(m.group(2)))
        elif section == "generals":
            out.generals += body.split()
        elif section == "binaries":
            out.binaries += body.split()
    return out


def constraint_set(model: MilpModel) -> dict[str, tuple[dict[str, int], str, int, tuple[str, int] | None]]:
    """The model's rows in the same shape :func:`parse_lp` returns."""
    return {c.name: (dict(c.lhs.terms), c.sense, c.rhs, c.guard) for c in model.constraints}


def emit_mip_start(model: MilpModel, binding: SolutionBinding | dict) -> str:
    """``name value`` per variable, in declaration order; the binding must be feasible."""
    values = binding.values if isinstance(binding, SolutionBinding) else binding
    check = check_binding(model, values)
    if not check:
        raise ModelError(f"infeasible MIP start: {check.violation}")
    return "".join(f"{name} {values[name]}\n" for name in model.vars)


def parse_mip_start(text: str) -> dict[str, int]:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise LpParseError(f"line {lineno}: expected 'name value'")
        values[parts[0]] = int(parts[1])
    return values

