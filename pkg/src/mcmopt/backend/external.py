"""Run an external MILP solver over files: LP in, solution file out.

Solvers are described by JSON profiles (``profiles/*.json``): a command
template, how to format a MIP start, and a column-based parser for the
solution file. Adding a solver means adding a profile.
"""

from __future__ import annotations

import json
import math
import os
import shutil
import subprocess
import sys
import tempfile
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..milp import MilpModel, SolutionBinding, Status, emit_lp, emit_mip_start

DEFAULT_TIMEOUT = 1800.0
GRACE_SECONDS = 30.0


class SolverError(RuntimeError):
    pass


class SolverNotFound(SolverError):
    pass


class SolutionParseError(SolverError):
    pass


@dataclass
class SolverJob:
    lp: str
    start: str | None = None  # "name value" lines
    timeout: float = DEFAULT_TIMEOUT
    profile: str = "cbc"
    workdir: str | None = None

    def __post_init__(self):
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")


def load_profile(name_or_path: str) -> dict:
    path = Path(name_or_path)
    if path.suffix == ".json" and path.exists():
        text = path.read_text()
    else:
        try:
            text = resources.files("mcmopt.backend").joinpath("profiles", f"{name_or_path}.json").read_text()
        except FileNotFoundError:
            raise SolverNotFound(f"unknown solver profile {name_or_path!r}") from None
    return json.loads(text)


def available_profiles() -> list[str]:
    folder = resources.files("mcmopt.backend").joinpath("profiles")
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def _pulp_cbc() -> str | None:
    try:
        import pulp
    except ImportError:
        return None
    path = Path(pulp.__file__).parent / "solverdir" / "cbc" / "linux" / "i64" / "cbc"
    return str(path) if path.exists() else None


def resolve_binary(profile: dict) -> str:
    override = os.environ.get(profile.get("binary_env") or "")
    if override:
        if not (shutil.which(override) or Path(override).exists()):
            raise SolverNotFound(f"{profile['binary_env']}={override} does not exist")
        return override
    binary = profile["binary"]
    if binary == "{python}":
        return sys.executable
    found = shutil.which(binary)
    if found:
        return found
    if profile.get("fallback") == "pulp-cbc":
        found = _pulp_cbc()
        if found:
            return found
    raise SolverNotFound(f"solver binary {binary!r} not found (set {profile.get('binary_env')})")


def solver_available(name: str) -> bool:
    try:
        profile = load_profile(name)
        resolve_binary(profile)
    except SolverError:
        return False
    if name == "highs":
        try:
            import highspy  # noqa: F401
        except ImportError:
            return False
    return True


def format_start(profile: dict, start: str, objective: int | None) -> str:
    fmt = profile["start_format"]
    lines = []
    if fmt.get("header"):
        lines.append(fmt["header"].format(objective=objective if objective is not None else 0))
    for index, row in enumerate(start.splitlines()):
        if row.strip():
            name, value = row.split()
            lines.append(fmt["line"].format(index=index, name=name, value=value))
    return "\n".join(lines) + "\n"


def build_command(profile: dict, binary: str, files: dict[str, str], timeout: float, with_start: bool) -> list[str]:
    subst = dict(files, binary=binary, timeout=f"{timeout:g}")
    cmd: list[str] = []
    for part in profile["command"]:
        if part == "{start_args}":
            if with_start:
                cmd += [p.format(**subst) for p in profile["start_args"]]
        else:
            cmd.append(part.format(**subst))
    return cmd


def parse_solution(profile: dict, text: str) -> SolutionBinding:
    fmt = profile["parser"]
    lines = text.splitlines()
    if len(lines) <= fmt["status_line"]:
        raise SolutionParseError("solution file: line 1: missing status line")
    head = lines[fmt["status_line"]].strip()
    status = None
    for prefix, tag in fmt["status_prefixes"]:
        if head.startswith(prefix):
            status = Status(tag)
            break
    if status is None:
        raise SolutionParseError(f"solution file: line {fmt['status_line'] + 1}: unknown status {head!r}")
    if status not in (Status.OPTIMAL, Status.FEASIBLE):
        return SolutionBinding({}, None, status, head)
    objective = None
    marker = fmt.get("objective_after")
    if marker and marker in head:
        try:
            obj = float(head.split(marker, 1)[1].split()[0])
            objective = int(round(obj)) if math.isfinite(obj) else None
        except (ValueError, IndexError):
            raise SolutionParseError(f"solution file: line {fmt['status_line'] + 1}: bad objective") from None
    values: dict[str, float] = {}
    prefix = fmt.get("strip_prefix") or ""
    for lineno in range(fmt["first_value_line"], len(lines)):
        raw = lines[lineno].strip()
        if not raw:
            continue
        if prefix and raw.startswith(prefix):
            raw = raw[len(prefix):].strip()
        cols = raw.split()
        if len(cols) < fmt["min_columns"]:
            raise SolutionParseError(f"solution file: line {lineno + 1}: expected {fmt['min_columns']} columns")
        try:
            values[cols[fmt["name_column"]]] = float(cols[fmt["value_column"]])
        except ValueError:
            raise SolutionParseError(f"solution file: line {lineno + 1}: bad value {cols[fmt['value_column']]!r}") from None
    rounded = {k: int(round(v)) for k, v in values.items()}
    return SolutionBinding(rounded, objective, status, head)


def solve_external(job: SolverJob, model: MilpModel | None = None) -> SolutionBinding:
    """Run the job; with ``model`` given, missing values are filled with the profile default.

    Never fabricates a solution: no solution file or an unknown status gives
    ``Status.ERROR`` with the reason in ``message``.
    """
    profile = load_profile(job.profile)
    binary = resolve_binary(profile)
    workdir = Path(job.workdir or tempfile.mkdtemp(prefix="mcmopt-"))
    workdir.mkdir(parents=True, exist_ok=True)
    files = {
        "lp": str(workdir / "model.lp"),
        "start": str(workdir / "start.mst"),
        "solution": str(workdir / "solution.sol"),
        "log": str(workdir / "log.txt"),
    }
    Path(files["lp"]).write_text(job.lp)
    sol_path = Path(files["solution"])
    if sol_path.exists():
        sol_path.unlink()
    if job.start:
        Path(files["start"]).write_text(format_start(profile, job.start, None))
    cmd = build_command(profile, binary, files, job.timeout, bool(job.start))
    env = dict(os.environ)
    src_root = str(Path(__file__).resolve().parents[2])
    env["PYTHONPATH"] = os.pathsep.join(filter(None, [src_root, env.get("PYTHONPATH")]))
    with open(files["log"], "w") as log:
        log.write("$ " + " ".join(cmd) + "\n")
        log.flush()
        try:
            proc = subprocess.run(cmd, stdout=log, stderr=subprocess.STDOUT, timeout=job.timeout + GRACE_SECONDS, env=env)
            code = proc.returncode
        except subprocess.TimeoutExpired:
            code = None
        except OSError as exc:
            raise SolverNotFound(f"cannot run {cmd[0]}: {exc}") from exc
    if not sol_path.exists():
        why = "killed after timeout" if code is None else f"exit code {code}"
        return SolutionBinding({}, None, Status.ERROR, f"no solution file ({why}); see {files['log']}")
    binding = parse_solution(profile, sol_path.read_text())
    if binding.has_solution and model is not None:
        missing = profile["parser"].get("missing_value", 0)
        unknown = set(binding.values) - set(model.vars)
        if unknown:
            raise SolutionParseError(f"solution names unknown variables: {sorted(unknown)[:5]}")
        binding.values = {name: binding.values.get(name, missing) for name in model.vars}
    return binding


def solve_model(
    model: MilpModel,
    profile: str = "cbc",
    timeout: float = DEFAULT_TIMEOUT,
    start: SolutionBinding | None = None,
    workdir: str | None = None,
) -> SolutionBinding:
    lp = emit_lp(model)
    start_text = emit_mip_start(model, start) if start is not None else None
    return solve_external(SolverJob(lp, start_text, timeout, profile, workdir), model)
