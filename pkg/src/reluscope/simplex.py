"""Dense two-phase simplex for the small feasibility programs used here.

Solves  maximize c.z  subject to  A z <= b,  z >= 0  on a plain numpy
tableau.  Pivoting follows Bland's rule (smallest eligible index enters,
ties in the ratio test broken by smallest basic index), which rules out
cycling on the degenerate programs that region feasibility produces, at
the cost of a few extra pivots.  Problem sizes here are tiny (tens of rows
and columns), so no factorization or sparsity is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

# reduced costs within this of zero count as zero; also the smallest pivot
# magnitude accepted by the ratio test
_EPS = 1e-11

_MAX_ITERS = 50_000


@dataclass(frozen=True)
class LpResult:
    status: str
    objective: float | None
    x: np.ndarray | None


def _pivot(rows: np.ndarray, cost: np.ndarray, basis: list[int], r: int, c: int):
    rows[r] /= rows[r, c]
    col = rows[:, c].copy()
    col[r] = 0.0
    rows -= np.outer(col, rows[r])
    if cost[c] != 0.0:
        cost -= cost[c] * rows[r]
    basis[r] = c


def _bland_min(rows, cost, basis, num_cols: int) -> str:
    """Minimize the reduced-cost row over columns < num_cols. Returns a status."""
    for _ in range(_MAX_ITERS):
        enter = -1
        for j in range(num_cols):
            if cost[j] < -_EPS:
                enter = j
                break
        if enter < 0:
            return OPTIMAL
        leave = -1
        best = np.inf
        for i in range(rows.shape[0]):
            a = rows[i, enter]
            if a > _EPS:
                ratio = rows[i, -1] / a
                if ratio < best - _EPS or (ratio < best + _EPS and (leave < 0 or basis[i] < basis[leave])):
                    best = ratio
                    leave = i
        if leave < 0:
            return UNBOUNDED
        _pivot(rows, cost, basis, leave, enter)
    raise ArithmeticError("simplex failed to terminate within the iteration cap")


def solve_max(c, a_ub, b_ub) -> LpResult:
    """Maximize c.z subject to a_ub @ z <= b_ub and z >= 0."""
    c = np.asarray(c, dtype=float)
    a = np.atleast_2d(np.asarray(a_ub, dtype=float))
    b = np.asarray(b_ub, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise ValidationError("objective must be a non-empty vector")
    n = c.shape[0]
    if a.size == 0:
        a = a.reshape(0, n)
    m = a.shape[0]
    if a.shape[1] != n or b.shape != (m,):
        raise ValidationError(
            f"constraint shapes {a.shape} / {b.shape} do not match {n} variables"
        )
    if not (np.all(np.isfinite(c)) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValidationError("LP data must be finite")

    if m == 0:
        if np.any(c > _EPS):
            return LpResult(UNBOUNDED, None, None)
        return LpResult(OPTIMAL, 0.0, np.zeros(n))

    # Standard form: flip rows with negative rhs so b >= 0, give every row a
    # slack (sign -1 on flipped rows), and an artificial where the slack
    # cannot start basic.
    flip = b < 0.0
    a_std = np.where(flip[:, None], -a, a)
    b_std = np.where(flip, -b, b)
    art_rows = np.flatnonzero(flip)
    num_art = art_rows.size

    total = n + m + num_art
    rows = np.zeros((m, total + 1))
    rows[:, :n] = a_std
    rows[np.arange(m), n + np.arange(m)] = np.where(flip, -1.0, 1.0)
    art_cols = {}
    for idx, r in enumerate(art_rows):
        rows[r, n + m + idx] = 1.0
        art_cols[int(r)] = n + m + idx
    rows[:, -1] = b_std

    basis = [art_cols.get(i, n + i) for i in range(m)]

    # phase 1: minimize the sum of artificials
    cost = np.zeros(total + 1)
    cost[n + m:total] = 1.0
    for i, bi in enumerate(basis):
        if cost[bi] != 0.0:
            cost -= cost[bi] * rows[i]
    status = _bland_min(rows, cost, basis, total)
    if status != OPTIMAL:  # phase 1 is bounded below by 0, so this is defensive
        raise ArithmeticError("phase 1 of the simplex reported an unbounded program")

    art_value = sum(rows[i, -1] for i, bi in enumerate(basis) if bi >= n + m)
    if art_value > 1e-9 * (1.0 + float(np.abs(b).max())):
        return LpResult(INFEASIBLE, None, None)

    # drive leftover artificials out of the basis; drop rows that turn out
    # to be redundant
    keep = np.ones(m, dtype=bool)
    for i in range(m):
        if basis[i] < n + m:
            continue
        pivot_col = -1
        for j in range(n + m):
            if abs(rows[i, j]) > _EPS:
                pivot_col = j
                break
        if pivot_col < 0:
            keep[i] = False
        else:
            _pivot(rows, cost, basis, i, pivot_col)
    if not np.all(keep):
        rows = rows[keep]
        basis = [bi for i, bi in enumerate(basis) if keep[i]]

    # phase 2: minimize -c.z over structural and slack columns only
    cost = np.zeros(total + 1)
    cost[:n] = -c
    for i, bi in enumerate(basis):
        if cost[bi] != 0.0:
            cost -= cost[bi] * rows[i]
    status = _bland_min(rows, cost, basis, n + m)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, None, None)

    z = np.zeros(total)
    for i, bi in enumerate(basis):
        z[bi] = rows[i, -1]
    x = z[:n].copy()
    # tiny negative components are pivot noise
    x[np.abs(x) < _EPS] = np.maximum(x[np.abs(x) < _EPS], 0.0)
    return LpResult(OPTIMAL, float(c @ x), x)
