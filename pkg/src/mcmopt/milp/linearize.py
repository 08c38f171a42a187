"""Linearization helpers: indicators, big-M rewriting, one-hot tables, max/min and boolean gates.

Every helper that introduces auxiliary variables also registers a derivation so
that a binding can be completed from the values of the operands.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .model import Constraint, LinExpr, MilpModel, ModelError, Var, _as_expr


def _guard_name(guard: Var | str) -> str:
    return guard.name if isinstance(guard, Var) else guard


def add_indicator(
    model: MilpModel,
    guard: Var | str,
    active_when: int,
    body: Constraint,
    name: str = "",
    mode: str | None = None,
) -> list[Constraint]:
    """Enforce ``body`` only when ``guard == active_when``.

    In big-M mode ``a.x <= b`` becomes ``a.x <= b + M(1 - y)`` (or ``+ M y`` for
    ``active_when = 0``) with ``M = max(a.x) - b`` over the variable bounds, the
    smallest constant that makes the row vacuous when the guard is inactive.
    Equalities become two such rows.
    """
    mode = mode or model.indicator_mode
    gname = _guard_name(guard)
    gvar = model.vars.get(gname)
    if gvar is None or gvar.kind != "binary":
        raise ModelError(f"indicator guard {gname} must be a declared binary")
    if active_when not in (0, 1):
        raise ModelError("indicator activating value must be 0 or 1")
    if body.guard is not None:
        raise ModelError("indicator body must be a plain linear constraint")
    if mode == "native":
        return [model.add(Constraint(body.expr, body.sense, guard=(gname, active_when)), name)]

    rows: list[tuple[LinExpr, str]] = []
    if body.sense in ("<=", "=="):
        rows.append((body.expr, "le"))
    if body.sense in (">=", "=="):
        rows.append((-body.expr, "ge"))
    out = []
    for expr, tag in rows:
        # expr <= 0 when active
        _, hi = model.bounds(expr)
        if hi == float("inf"):
            raise ModelError(f"cannot derive M for {name or 'indicator'}: unbounded body")
        big_m = max(hi, 0)
        if active_when == 1:
            row = expr + big_m * model.vars[gname] - big_m
        else:
            row = expr - big_m * model.vars[gname]
        rname = f"{name}_{tag}" if name and len(rows) > 1 else name
        out.append(model.add(row <= 0, rname))
    return out


def big_m_of(model: MilpModel, row: Constraint) -> int:
    """Recover the tightest M a big-M row could have been built with (used in tests)."""
    _, hi = model.bounds(row.expr)
    return hi


def encode_one_hot_table(
    model: MilpModel,
    selectors: Mapping[int, Var],
    target,
    result,
    factor=lambda s: 1 << s,
    name: str = "table",
    add_sum: bool = True,
) -> list[Constraint]:
    """``result = factor(s) * target`` for the single selector ``s`` set to one."""
    if not selectors:
        raise ModelError(f"{name}: empty table")
    target, result = _as_expr(target), _as_expr(result)
    rows = []
    if add_sum:
        rows.append(model.add(LinExpr.sum(selectors.values()) == 1, f"{name}_onehot"))
    for s, sel in selectors.items():
        rows += add_indicator(model, sel, 1, result - factor(s) * target == 0, f"{name}_{s}")
    return rows


def one_hot_value(model: MilpModel, selectors: Mapping[int, Var], value_expr, name: str) -> list[Constraint]:
    """Tie an integer expression to a one-hot encoding: sum(selectors)=1, sum(s*sel_s) = value."""
    rows = [model.add(LinExpr.sum(selectors.values()) == 1, f"{name}_onehot")]
    rows.append(model.add(LinExpr.sum(s * v for s, v in selectors.items()) == _as_expr(value_expr), f"{name}_value"))

    def derive(values, sel=dict(selectors), expr=_as_expr(value_expr)):
        v = expr.value(values)
        if v not in sel:
            raise ModelError(f"{name}: value {v} outside the one-hot range")
        return {var.name: int(s == v) for s, var in sel.items()}

    model.derive(selectors.values(), derive)
    return rows


def _extremum(model: MilpModel, result: Var, operands: Sequence, name: str, sign: int) -> list[Constraint]:
    ops = [_as_expr(o) for o in operands]
    if not ops:
        raise ModelError(f"{name}: no operands")
    if len(ops) == 1:
        row = model.add(result.expr() == ops[0], f"{name}_eq")
        model.derive([result], lambda v, e=ops[0]: {result.name: e.value(v)})
        return [row]
    rows = []
    deltas = [model.binary(f"{name}_sel{i}") for i in range(len(ops))]
    rows.append(model.add(LinExpr.sum(deltas) == 1, f"{name}_onehot"))
    for i, (op, d) in enumerate(zip(ops, deltas)):
        if sign > 0:
            rows.append(model.add(result - op >= 0, f"{name}_ge{i}"))
            rows += add_indicator(model, d, 1, result - op <= 0, f"{name}_le{i}", mode="bigM")
        else:
            rows.append(model.add(result - op <= 0, f"{name}_le{i}"))
            rows += add_indicator(model, d, 1, result - op >= 0, f"{name}_ge{i}", mode="bigM")

    def derive(values):
        vals = [op.value(values) for op in ops]
        best = max(vals) if sign > 0 else min(vals)
        pick = vals.index(best)
        out = {d.name: int(i == pick) for i, d in enumerate(deltas)}
        out[result.name] = best
        return out

    model.derive([result, *deltas], derive)
    return rows


def encode_max(model: MilpModel, result: Var, operands: Sequence, name: str) -> list[Constraint]:
    """``result = max(operands)``: result >= each, result <= op_i + M_i(1 - d_i), sum(d) = 1."""
    return _extremum(model, result, operands, name, +1)


def encode_min(model: MilpModel, result: Var, operands: Sequence, name: str) -> list[Constraint]:
    return _extremum(model, result, operands, name, -1)


def encode_greater(model: MilpModel, flag: Var, lhs, rhs, name: str) -> list[Constraint]:
    """``flag = 1`` exactly when ``lhs > rhs`` (integer operands)."""
    diff = _as_expr(lhs) - _as_expr(rhs)
    rows = add_indicator(model, flag, 1, diff >= 1, f"{name}_on")
    rows += add_indicator(model, flag, 0, diff <= 0, f"{name}_off")
    model.derive([flag], lambda v: {flag.name: int(diff.value(v) > 0)})
    return rows


def encode_and(model: MilpModel, result: Var, a, b, name: str) -> list[Constraint]:
    """``result = a AND b`` for 0/1 expressions."""
    a, b = _as_expr(a), _as_expr(b)
    rows = [
        model.add(result - a <= 0, f"{name}_a"),
        model.add(result - b <= 0, f"{name}_b"),
        model.add(result - a - b >= -1, f"{name}_ab"),
    ]
    model.derive([result], lambda v: {result.name: int(a.value(v) == 1 and b.value(v) == 1)})
    return rows


def encode_or(model: MilpModel, result: Var, a, b, name: str) -> list[Constraint]:
    a, b = _as_expr(a), _as_expr(b)
    rows = [
        model.add(result - a >= 0, f"{name}_a"),
        model.add(result - b >= 0, f"{name}_b"),
        model.add(result - a - b <= 0, f"{name}_ab"),
    ]
    model.derive([result], lambda v: {result.name: int(a.value(v) == 1 or b.value(v) == 1)})
    return rows


def define(model: MilpModel, var: Var, expr, name: str) -> Constraint:
    """``var = expr`` with the matching derivation."""
    expr = _as_expr(expr)
    row = model.add(var.expr() == expr, name)
    model.derive([var], lambda v: {var.name: expr.value(v)})
    return row
