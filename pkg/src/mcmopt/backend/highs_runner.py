"""Command-line wrapper around highspy that speaks the file protocol of the highs profile.

Writes ``<status> objective <value>`` on the first line of the solution file,
then one ``name value`` line per column.
"""

from __future__ import annotations

import argparse
import sys


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="python3 -m mcmopt.backend.highs_runner")
    parser.add_argument("lp")
    parser.add_argument("--solution", required=True)
    parser.add_argument("--time-limit", type=float, default=1800.0)
    parser.add_argument("--start")
    args = parser.parse_args(argv)

    try:
        import highspy
    except ImportError:
        print("highspy is not installed", file=sys.stderr)
        return 3

    h = highspy.Highs()
    h.setOptionValue("time_limit", args.time_limit)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 0.0)
    if h.readModel(args.lp) != highspy.HighsStatus.kOk:
        print(f"cannot read {args.lp}", file=sys.stderr)
        return 2
    names = list(h.getLp().col_names_)
    if args.start:
        given = {}
        with open(args.start) as fh:
            for line in fh:
                parts = line.split()
                if len(parts) == 2:
                    given[parts[0]] = float(parts[1])
        sol = highspy.HighsSolution()
        sol.col_value = [given.get(n, 0.0) for n in names]
        sol.value_valid = True
        h.setSolution(sol)
    h.run()

    status = h.getModelStatus()
    info = h.getInfo()
    has_point = info.primal_solution_status == 2  # feasible point available
    if status == highspy.HighsModelStatus.kOptimal:
        tag = "optimal"
    elif status == highspy.HighsModelStatus.kInfeasible:
        tag = "infeasible"
    elif has_point:
        tag = "feasible"
    else:
        tag = "error"
    with open(args.solution, "w") as fh:
        if tag in ("optimal", "feasible"):
            fh.write(f"{tag} objective {info.objective_function_value!r}\n")
            for name, value in zip(names, h.getSolution().col_value):
                fh.write(f"{name} {value!r}\n")
        else:
            fh.write(f"{tag} objective nan\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
