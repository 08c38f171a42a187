"""Instance files: one ``key = value`` per line, ``#`` comments, repeatable ``note`` lines.

Example::

    targets = 49, 51
    metric = truncated
    input_wordlength = 3
    budgets = 32, 32
    note = faithful 3-bit outputs
"""

from __future__ import annotations

from ..models.instance import DEFAULT_TIMEOUT, Instance, InstanceError

_INT_FIELDS = ("adder_bound", "wordlength", "s_max", "s_min", "input_wordlength", "ad_bound", "adder_slack")
_LIST_FIELDS = ("targets", "budgets")
_ORDER = (
    "targets",
    "metric",
    "input_wordlength",
    "budgets",
    "adder_bound",
    "ad_bound",
    "wordlength",
    "s_max",
    "s_min",
    "adder_slack",
    "timeout",
    "symmetry_breaking",
)


class InstanceFileError(ValueError):
    pass


def _int(text: str, line: int, col: int) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise InstanceFileError(f"line {line}, column {col}: malformed integer {text.strip()!r}") from None


def parse_instance(document: str) -> Instance:
    fields: dict = {}
    notes: list[str] = []
    for lineno, raw in enumerate(document.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if "=" not in line:
            raise InstanceFileError(f"line {lineno}, column 1: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        col = line.index("=") + 2
        if key == "note":
            notes.append(value.strip())
            continue
        if key not in _ORDER:
            raise InstanceFileError(f"line {lineno}, column {raw.index(key) + 1}: unknown key {key!r}")
        if key in fields:
            raise InstanceFileError(f"line {lineno}, column {raw.index(key) + 1}: duplicate key {key!r}")
        if key in _LIST_FIELDS:
            parts = value.split(",")
            if not any(p.strip() for p in parts):
                raise InstanceFileError(f"line {lineno}, column {col}: empty list for {key!r}")
            items, start = [], col - 1
            for p in parts:
                items.append(_int(p, lineno, start + 1 + len(p) - len(p.lstrip())))
                start += len(p) + 1
            fields[key] = tuple(items)
        elif key in _INT_FIELDS:
            fields[key] = _int(value, lineno, col)
        elif key == "timeout":
            try:
                fields[key] = float(value)
            except ValueError:
                raise InstanceFileError(f"line {lineno}, column {col}: malformed number {value.strip()!r}") from None
        elif key == "symmetry_breaking":
            flag = value.strip().lower()
            if flag not in ("true", "false"):
                raise InstanceFileError(f"line {lineno}, column {col}: expected true or false")
            fields[key] = flag == "true"
        else:
            fields[key] = value.strip()
    if "targets" not in fields:
        raise InstanceFileError("missing required field 'targets'")
    try:
        return Instance(notes=tuple(notes), **fields)
    except InstanceError as exc:
        raise InstanceFileError(f"invalid instance: {exc}") from None


def emit_instance(inst: Instance) -> str:
    lines = [f"targets = {', '.join(map(str, inst.targets))}", f"metric = {inst.metric}"]
    for key in _ORDER[2:]:
        value = getattr(inst, key)
        if value is None:
            continue
        if key == "timeout" and value == DEFAULT_TIMEOUT:
            continue
        if key == "symmetry_breaking":
            if value:
                continue
            value = "false"
        if key == "adder_slack" and value == 0:
            continue
        if key in _LIST_FIELDS:
            value = ", ".join(map(str, value))
        elif key == "timeout":
            value = f"{value:g}"
        lines.append(f"{key} = {value}")
    lines += [f"note = {n}" for n in inst.notes]
    return "\n".join(lines) + "\n"
