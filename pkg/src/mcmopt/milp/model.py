"""Solver-agnostic MILP intermediate representation with exact arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union

Number = Union[int, Fraction]

BINARY = "binary"
INTEGER = "integer"


class ModelError(ValueError):
    pass


class Var:
    __slots__ = ("name", "kind", "lower", "upper")

    def __init__(self, name: str, kind: str, lower: int, upper: int):
        self.name = name
        self.kind = kind
        self.lower = lower
        self.upper = upper

    def __repr__(self) -> str:
        return f"Var({self.name!r}, {self.kind}, [{self.lower}, {self.upper}])"

    def __hash__(self) -> int:
        return hash(self.name)

    def expr(self) -> "LinExpr":
        return LinExpr({self.name: 1})

    # arithmetic delegates to LinExpr
    def __add__(self, other):
        return self.expr() + other

    __radd__ = __add__

    def __sub__(self, other):
        return self.expr() - other

    def __rsub__(self, other):
        return (-self.expr()) + other

    def __mul__(self, k):
        return self.expr() * k

    __rmul__ = __mul__

    def __neg__(self):
        return -self.expr()

    def __le__(self, other):
        return self.expr() <= other

    def __ge__(self, other):
        return self.expr() >= other

    def __eq__(self, other):  # type: ignore[override]
        return self.expr() == other


def _as_expr(value) -> "LinExpr":
    if isinstance(value, LinExpr):
        return value
    if isinstance(value, Var):
        return value.expr()
    if isinstance(value, (int, Fraction)):
        return LinExpr({}, value)
    raise TypeError(f"cannot use {type(value).__name__} in a linear expression")


class LinExpr:
    """Sparse linear expression ``sum(coef * var) + constant`` keyed by variable name."""

    __slots__ = ("terms", "constant")

    def __init__(self, terms: Mapping[str, Number] | None = None, constant: Number = 0):
        self.terms: dict[str, Number] = {k: v for k, v in (terms or {}).items() if v != 0}
        self.constant: Number = constant

    @classmethod
    def sum(cls, items: Iterable) -> "LinExpr":
        out = cls()
        for item in items:
            out = out._iadd(_as_expr(item), 1)
        return out

    def _iadd(self, other: "LinExpr", k: Number) -> "LinExpr":
        terms = dict(self.terms)
        for name, coef in other.terms.items():
            terms[name] = terms.get(name, 0) + k * coef
        return LinExpr(terms, self.constant + k * other.constant)

    def __add__(self, other):
        return self._iadd(_as_expr(other), 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._iadd(_as_expr(other), -1)

    def __rsub__(self, other):
        return _as_expr(other)._iadd(self, -1)

    def __neg__(self):
        return LinExpr({k: -v for k, v in self.terms.items()}, -self.constant)

    def __mul__(self, k):
        if not isinstance(k, (int, Fraction)):
            raise TypeError("only constant scaling keeps an expression linear")
        return LinExpr({n: k * v for n, v in self.terms.items()}, k * self.constant)

    __rmul__ = __mul__

    def __le__(self, other):
        return Constraint(self - other, "<=")

    def __ge__(self, other):
        return Constraint(self - other, ">=")

    def __eq__(self, other):  # type: ignore[override]
        return Constraint(self - other, "==")

    __hash__ = None  # type: ignore[assignment]

    def value(self, values: Mapping[str, Number]) -> Number:
        return sum((coef * values[name] for name, coef in self.terms.items()), self.constant)

    def __repr__(self) -> str:
        parts = [f"{v}*{k}" for k, v in self.terms.items()]
        if self.constant or not parts:
            parts.append(str(self.constant))
        return " + ".join(parts)


class Sense(str, Enum):
    LE = "<="
    GE = ">="
    EQ = "=="


@dataclass(eq=False)
class Constraint:
    """``expr (sense) 0`` with an optional indicator guard ``(var name, active value)``."""

    expr: LinExpr
    sense: str
    guard: tuple[str, int] | None = None
    name: str = ""

    def __post_init__(self):
        self.sense = Sense(self.sense).value
        self._normalize()

    def _normalize(self) -> None:
        # clear dyadic (or any rational) coefficients by scaling the whole row
        dens = [Fraction(c).denominator for c in self.expr.terms.values()]
        dens.append(Fraction(self.expr.constant).denominator)
        scale = math.lcm(*dens) if dens else 1
        terms = {k: int(Fraction(v) * scale) for k, v in self.expr.terms.items()}
        self.expr = LinExpr(terms, int(Fraction(self.expr.constant) * scale))

    @property
    def lhs(self) -> LinExpr:
        return LinExpr(self.expr.terms)

    @property
    def rhs(self) -> int:
        return -self.expr.constant  # type: ignore[return-value]

    def satisfied(self, values: Mapping[str, Number]) -> bool:
        if self.guard is not None and values[self.guard[0]] != self.guard[1]:
            return True
        v = self.expr.value(values)
        if self.sense == "<=":
            return v <= 0
        if self.sense == ">=":
            return v >= 0
        return v == 0

    def __bool__(self):
        raise TypeError("constraints have no truth value; pass them to MilpModel.add")


@dataclass
class MilpModel:
    name: str = "model"
    indicator_mode: str = "bigM"  # or "native"
    vars: dict[str, Var] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)
    objective: LinExpr = field(default_factory=LinExpr)
    metadata: dict[str, str] = field(default_factory=dict)
    derivations: list[tuple[tuple[str, ...], Callable[[dict], Mapping[str, int]]]] = field(default_factory=list)
    primaries: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.indicator_mode not in ("bigM", "native"):
            raise ModelError(f"unknown indicator mode {self.indicator_mode!r}")
        self._names: set[str] = set()

    # -- declarations --

    def add_var(self, name: str, kind: str = INTEGER, lower: int = 0, upper: int = 1, primary: bool = False) -> Var:
        if name in self.vars:
            raise ModelError(f"duplicate variable {name}")
        if kind == BINARY:
            lower, upper = max(lower, 0), min(upper, 1)
        if lower > upper:
            raise ModelError(f"empty domain for {name}: [{lower}, {upper}]")
        var = Var(name, kind, lower, upper)
        self.vars[name] = var
        if primary:
            self.primaries.append(name)
        return var

    def binary(self, name: str, primary: bool = False) -> Var:
        return self.add_var(name, BINARY, 0, 1, primary=primary)

    def integer(self, name: str, lower: int, upper: int, primary: bool = False) -> Var:
        return self.add_var(name, INTEGER, lower, upper, primary=primary)

    def add(self, constraint: Constraint, name: str = "") -> Constraint:
        if not isinstance(constraint, Constraint):
            raise TypeError("expected a Constraint (did a comparison collapse to bool?)")
        for var in constraint.expr.terms:
            if var not in self.vars:
                raise ModelError(f"constraint {name or '?'} uses undeclared variable {var}")
        if constraint.guard is not None:
            guard = self.vars.get(constraint.guard[0])
            if guard is None or guard.kind != BINARY:
                raise ModelError(f"indicator guard {constraint.guard[0]} must be a declared binary")
        if name:
            if name in self._names:
                raise ModelError(f"duplicate constraint name {name}")
            self._names.add(name)
            constraint.name = name
        else:
            constraint.name = f"R{len(self.constraints)}"
            self._names.add(constraint.name)
        self.constraints.append(constraint)
        return constraint

    def minimize(self, expr) -> None:
        expr = _as_expr(expr)
        for var in expr.terms:
            if var not in self.vars:
                raise ModelError(f"objective uses undeclared variable {var}")
        self.objective = expr

    def derive(self, targets: Iterable[str | Var], fn: Callable[[dict], Mapping[str, int]]) -> None:
        """Register how to compute auxiliary variables from already-known values."""
        names = tuple(t.name if isinstance(t, Var) else t for t in targets)
        self.derivations.append((names, fn))

    # -- evaluation helpers --

    def bounds(self, expr) -> tuple[Number, Number]:
        expr = _as_expr(expr)
        lo = hi = expr.constant
        for name, coef in expr.terms.items():
            v = self.vars[name]
            if coef > 0:
                lo += coef * v.lower
                hi += coef * v.upper
            else:
                lo += coef * v.upper
                hi += coef * v.lower
        return lo, hi

    def complete(self, values: Mapping[str, int]) -> dict[str, int]:
        """Fill every derived variable by running the registered derivations in order."""
        out = dict(values)
        for names, fn in self.derivations:
            produced = fn(out)
            missing = set(names) - set(produced)
            if missing:
                raise ModelError(f"derivation for {names} did not produce {sorted(missing)}")
            out.update({k: int(v) for k, v in produced.items()})
        return out

    def objective_value(self, values: Mapping[str, int]) -> int:
        return int(self.objective.value(values))

    def stats(self) -> dict[str, int]:
        return {
            "variables": len(self.vars),
            "binaries": sum(v.kind == BINARY for v in self.vars.values()),
            "constraints": len(self.constraints),
            "indicators": sum(c.guard is not None for c in self.constraints),
        }


class Status(str, Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    ERROR = "error"


@dataclass
class SolutionBinding:
    values: dict[str, int]
    objective_value: int | None = None
    status: Status = Status.OPTIMAL
    message: str = ""

    @property
    def has_solution(self) -> bool:
        return self.status in (Status.OPTIMAL, Status.FEASIBLE)


@dataclass
class BindingCheck:
    ok: bool
    violation: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_binding(model: MilpModel, binding: SolutionBinding | Mapping[str, int]) -> BindingCheck:
    values = binding.values if isinstance(binding, SolutionBinding) else binding
    if not values:
        return BindingCheck(False, "empty binding")
    for name, var in model.vars.items():
        if name not in values:
            return BindingCheck(False, f"variable {name} has no value")
        v = values[name]
        if not isinstance(v, int) or isinstance(v, bool):
            return BindingCheck(False, f"variable {name} is not an integer ({v!r})")
        if not var.lower <= v <= var.upper:
            return BindingCheck(False, f"bound violation: {name}={v} outside [{var.lower}, {var.upper}]")
    for c in model.constraints:
        if not c.satisfied(values):
            lhs = c.lhs.value(values)
            guard = f" [guard {c.guard[0]}={c.guard[1]}]" if c.guard else ""
            return BindingCheck(False, f"constraint {c.name} violated: {lhs} {c.sense} {c.rhs}{guard}")
    if isinstance(binding, SolutionBinding) and binding.objective_value is not None:
        obj = model.objective_value(values)
        if obj != binding.objective_value:
            return BindingCheck(False, f"objective mismatch: reported {binding.objective_value}, recomputed {obj}")
    return BindingCheck(True)
