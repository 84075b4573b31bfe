"""Independent oracles used by the tests.

Nothing here may call into the package's solver or miner: the point is to
check the fast implementations against slow, obviously-correct ones.
"""

from __future__ import annotations

import itertools

import numpy as np


def closed_itemsets_bruteforce(dense: np.ndarray, min_support: int):
    """All closed frequent itemsets by scanning every one of the 2^n subsets.

    Returns {(items 1-based): support}.  An itemset is closed when every
    strict superset has strictly smaller support.
    """
    m, n = dense.shape
    rows = [frozenset(j for j in range(n) if dense[i, j]) for i in range(m)]

    support = {}
    for r in range(n + 1):
        for combo in itertools.combinations(range(n), r):
            s = sum(1 for row in rows if set(combo) <= row)
            support[combo] = s

    closed = {}
    for combo, s in support.items():
        if not combo or s < min_support:
            continue
        is_closed = True
        for extra in range(n):
            if extra in combo:
                continue
            bigger = tuple(sorted(combo + (extra,)))
            if support[bigger] == s:
                is_closed = False
                break
        if is_closed:
            closed[tuple(j + 1 for j in combo)] = s
    return closed


def enumerate_margin_classes(shape=(3, 3)):
    """Group all binary matrices of the shape by (row sums, col sums)."""
    m, n = shape
    classes: dict[tuple, list[np.ndarray]] = {}
    for bits in itertools.product([0, 1], repeat=m * n):
        mat = np.array(bits, dtype=float).reshape(m, n)
        key = (
            tuple(int(x) for x in mat.sum(axis=1)),
            tuple(int(x) for x in mat.sum(axis=0)),
        )
        classes.setdefault(key, []).append(mat)
    return classes


def _peel_forced_cells(row_targets, col_targets):
    """Cells forced by zero or saturated margins, by elementary reasoning:
    a row whose target is 0 is all zeros; a row whose target equals the
    number of undetermined columns is all ones there (and the column
    targets drop accordingly); same for columns.  Iterate to a fixpoint."""
    r = [float(x) for x in row_targets]
    c = [float(x) for x in col_targets]
    rows = set(range(len(r)))
    cols = set(range(len(c)))
    forced = {}
    changed = True
    while changed:
        changed = False
        for i in sorted(rows):
            if r[i] == 0:
                for j in cols:
                    forced[(i, j)] = 0
                rows.discard(i)
                changed = True
            elif r[i] == len(cols):
                for j in sorted(cols):
                    forced[(i, j)] = 1
                    c[j] -= 1
                rows.discard(i)
                changed = True
        for j in sorted(cols):
            if j not in cols:
                continue
            if c[j] == 0:
                for i in rows:
                    forced[(i, j)] = 0
                cols.discard(j)
                changed = True
            elif c[j] == len(rows):
                for i in sorted(rows):
                    forced[(i, j)] = 1
                    r[i] -= 1
                cols.discard(j)
                changed = True
    return forced, sorted(rows), sorted(cols), r, c


def maxent_distribution_direct(row_targets, col_targets, shape=(3, 3)):
    """Entropy-maximizing distribution over all binary matrices of the
    shape, subject to expected margins, via a generic convex solver on the
    outcome simplex (after peeling cells forced by degenerate margins).

    Returns a dict mapping matrix bytes (flattened 0/1 tuple) -> probability.
    """
    import cvxpy as cp

    m, n = shape
    forced, rows, cols, r, c = _peel_forced_cells(row_targets, col_targets)
    free = [(i, j) for i in rows for j in cols]
    f = len(free)
    outcomes = list(itertools.product([0, 1], repeat=f))
    if f == 0:
        q = np.array([1.0])
    else:
        cons_rows = []
        d = []
        for i in rows:
            cons_rows.append([1.0 if cell[0] == i else 0.0 for cell in free])
            d.append(r[i])
        for j in cols:
            cons_rows.append([1.0 if cell[1] == j else 0.0 for cell in free])
            d.append(c[j])
        a = np.array(cons_rows) @ np.array(outcomes, dtype=float).T
        q_var = cp.Variable(len(outcomes), nonneg=True)
        problem = cp.Problem(
            cp.Maximize(cp.sum(cp.entr(q_var))),
            [cp.sum(q_var) == 1, a @ q_var == np.array(d)],
        )
        problem.solve(
            solver="CLARABEL", tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12
        )
        if problem.status not in ("optimal",):
            problem.solve(solver="SCS", eps=1e-11, max_iters=200000)
        q = np.asarray(q_var.value)

    dist = {}
    for idx, outcome in enumerate(outcomes):
        mat = np.zeros((m, n), dtype=int)
        for cell, v in zip(free, outcome):
            mat[cell] = v
        for cell, v in forced.items():
            mat[cell] = v
        dist[tuple(mat.ravel())] = float(q[idx]) if f else 1.0
    return dist
