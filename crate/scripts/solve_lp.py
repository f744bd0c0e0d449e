#!/usr/bin/env python3
"""Solve an exported barrier model with scipy's MILP solver (HiGHS).

Reads the LP subset written by `barrier solve --lp`: a `Minimize` objective,
`Subject To` rows of the form `name: [+-] v [+-] v ... (>=|<=|=) rhs`, a
`Binary` section, and `End`. Prints the optimal objective value, or
`infeasible`.

    python3 scripts/solve_lp.py model.lp
"""

import re
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

TERM = re.compile(r"([+-])?\s*(\d+(?:\.\d+)?)?\s*([A-Za-z_][A-Za-z0-9_]*)")


def parse_linear(text):
    coeffs = {}
    for sign, num, var in TERM.findall(text):
        c = float(num) if num else 1.0
        if sign == "-":
            c = -c
        coeffs[var] = coeffs.get(var, 0.0) + c
    return coeffs


def parse(text):
    section = None
    objective = {}
    rows = []
    binaries = []
    pending = ""
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in ("minimize", "minimum", "min"):
            section = "obj"
            continue
        if key in ("subject to", "such that", "st", "s.t."):
            section = "rows"
            continue
        if key in ("binary", "binaries", "bin"):
            section = "bin"
            continue
        if key == "end":
            break
        if section == "obj":
            body = line.split(":", 1)[1] if ":" in line else line
            objective.update(parse_linear(body))
        elif section == "rows":
            pending += " " + line
            m = re.search(r"(>=|<=|=)\s*(-?\d+(?:\.\d+)?)\s*$", pending)
            if not m:
                continue
            body = pending[: m.start()]
            body = body.split(":", 1)[1] if ":" in body else body
            rows.append((parse_linear(body), m.group(1), float(m.group(2))))
            pending = ""
        elif section == "bin":
            binaries.extend(line.split())
    return objective, rows, binaries


def solve(text):
    objective, rows, binaries = parse(text)
    names = sorted(set(binaries) | set(objective) | {v for r in rows for v in r[0]})
    if not names:
        return 0
    index = {v: i for i, v in enumerate(names)}
    c = np.zeros(len(names))
    for v, k in objective.items():
        c[index[v]] = k
    constraints = []
    if rows:
        a = np.zeros((len(rows), len(names)))
        lo = np.full(len(rows), -np.inf)
        hi = np.full(len(rows), np.inf)
        for r, (coeffs, op, rhs) in enumerate(rows):
            for v, k in coeffs.items():
                a[r, index[v]] = k
            if op in (">=", "="):
                lo[r] = rhs
            if op in ("<=", "="):
                hi[r] = rhs
        constraints.append(LinearConstraint(a, lo, hi))
    res = milp(c, constraints=constraints, integrality=np.ones(len(names)), bounds=Bounds(0, 1))
    if res.status == 2:
        return None
    if not res.success:
        raise SystemExit(f"solver failed: {res.message}")
    return int(round(res.fun))


def main():
    if len(sys.argv) != 2:
        raise SystemExit("usage: solve_lp.py MODEL.lp")
    with open(sys.argv[1]) as f:
        value = solve(f.read())
    print("infeasible" if value is None else value)


if __name__ == "__main__":
    main()
