#!/usr/bin/env python3
"""Reference solve of an exported .lp model with scipy's HiGHS backend.

Used by the test suite to cross-check the built-in simplex. Parses the
canonical subset of the LP text format that export_lp writes and prints the
status and objective value.
"""
import sys

import numpy as np
from scipy.optimize import linprog


def parse(text):
    variables = []
    var_index = {}
    free = set()
    objective = None
    constraints = []  # (name, terms, rel, rhs)
    section = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            tokens = line[1:].split()
            if tokens and tokens[0] == "vars:":
                for name in tokens[1:]:
                    var_index[name] = len(variables)
                    variables.append(name)
            continue
        if line in ("Maximize", "Subject To", "Bounds", "End"):
            section = line
            continue
        if section == "Maximize":
            assert line.startswith("obj:"), line
            objective = line.split()[1]
        elif section == "Subject To":
            name, rest = line.split(":", 1)
            tokens = rest.split()
            terms = []
            sign = 1.0
            i = 0
            rel = None
            rhs = None
            while i < len(tokens):
                tok = tokens[i]
                if tok in ("<=", ">=", "="):
                    rel = tok
                    rhs = float(tokens[i + 1])
                    break
                if tok == "+":
                    sign = 1.0
                elif tok == "-":
                    sign = -1.0
                else:
                    try:
                        coef = float(tok)
                        i += 1
                        terms.append((var_index[tokens[i]], sign * coef))
                    except ValueError:
                        terms.append((var_index[tok], sign))
                    sign = 1.0
                i += 1
            constraints.append((name, terms, rel, rhs))
        elif section == "Bounds":
            tokens = line.split()
            assert len(tokens) == 2 and tokens[1] == "free", line
            free.add(tokens[0])
    return variables, free, objective, constraints


def main():
    if len(sys.argv) != 2:
        print("usage: solve_lp.py MODEL.lp", file=sys.stderr)
        return 2
    with open(sys.argv[1]) as fh:
        variables, free, objective, constraints = parse(fh.read())
    n = len(variables)
    c = np.zeros(n)
    c[variables.index(objective)] = -1.0  # maximize
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for _name, terms, rel, rhs in constraints:
        row = np.zeros(n)
        for var, coef in terms:
            row[var] += coef
        if rel == "<=":
            A_ub.append(row)
            b_ub.append(rhs)
        elif rel == ">=":
            A_ub.append(-row)
            b_ub.append(-rhs)
        else:
            A_eq.append(row)
            b_eq.append(rhs)
    bounds = [(None, None) if v in free else (0, None) for v in variables]
    res = linprog(
        c,
        A_ub=np.array(A_ub) if A_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(A_eq) if A_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=bounds,
        method="highs",
    )
    if res.status == 0:
        print(f"optimal {-res.fun:.12f}")
        return 0
    if res.status == 3:
        print("unbounded")
        return 0
    print(f"status {res.status}: {res.message}")
    return 1


if __name__ == "__main__":
    sys.exit(main())
