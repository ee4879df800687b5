''' Exact rational linear programming.

Two-phase tableau simplex over Fractions with Bland's rule, so it always terminates and
every returned point satisfies its constraints exactly.
'''
from dataclasses import dataclass
from fractions import Fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: list = None
    objective: Fraction = None


def _pivot(T, basis, row, col):
    piv = T[row][col]
    T[row] = [v / piv for v in T[row]]
    for i in range(len(T)):
        if i != row and T[i][col] != 0:
            f = T[i][col]
            T[i] = [a - f * b for a, b in zip(T[i], T[row])]
    basis[row] = col


def _run(T, basis, cost, allowed):
    """
    Minimize cost.x on tableau T (last column is the right-hand side) with Bland's rule.
    Only columns in `allowed` may enter.

    Returns:
        OPTIMAL or UNBOUNDED
    """
    ncols = len(T[0]) - 1
    while True:
        entering = None
        for j in allowed:
            reduced = cost[j] - sum(cost[basis[i]] * T[i][j] for i in range(len(T)))
            if reduced < 0:
                entering = j
                break
        if entering is None:
            return OPTIMAL
        best = None
        for i in range(len(T)):
            if T[i][entering] > 0:
                ratio = T[i][ncols] / T[i][entering]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return UNBOUNDED
        _pivot(T, basis, best[1], entering)


def solve_standard(c, A, b):
    """
    min c.x  subject to  A x = b, x >= 0.

    Args:
        c: n costs
        A: m x n rows
        b: m right-hand sides
    Returns:
        LPResult
    """
    c = [Fraction(v) for v in c]
    n = len(c)
    rows = []
    for row, rhs in zip(A, b):
        row = [Fraction(v) for v in row]
        rhs = Fraction(rhs)
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
        rows.append(row)
        rows[-1] = row + [rhs]
    m = len(rows)
    # phase I: one artificial per row
    T = [r[:n] + [Fraction(int(i == k)) for k in range(m)] + [r[n]] for i, r in enumerate(rows)]
    basis = [n + i for i in range(m)]
    cost1 = [Fraction(0)] * n + [Fraction(1)] * m
    _run(T, basis, cost1, range(n + m))
    if sum(T[i][-1] for i in range(m) if basis[i] >= n) > 0:
        return LPResult(INFEASIBLE)
    # drive remaining (zero-level) artificials out, dropping redundant rows
    keep = []
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if T[i][j] != 0), None)
            if col is None:
                continue
            _pivot(T, basis, i, col)
        keep.append(i)
    T = [T[i][:n] + [T[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    status = _run(T, basis, c, range(n))
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        x[j] = T[i][-1]
    return LPResult(OPTIMAL, x, sum(ci * xi for ci, xi in zip(c, x)))


def linprog_exact(c, A_ub=(), b_ub=(), A_eq=(), b_eq=()):
    """
    min c.x  subject to  A_ub x <= b_ub, A_eq x = b_eq, x >= 0, in exact arithmetic.
    Slack variables are appended after x and stripped from the result.
    """
    n = len(c)
    k = len(A_ub)
    A = []
    b = []
    for i, (row, rhs) in enumerate(zip(A_ub, b_ub)):
        A.append(list(row) + [int(i == s) for s in range(k)])
        b.append(rhs)
    for row, rhs in zip(A_eq, b_eq):
        A.append(list(row) + [0] * k)
        b.append(rhs)
    res = solve_standard(list(c) + [0] * k, A, b)
    if res.status == OPTIMAL:
        res.x = res.x[:n]
    return res
