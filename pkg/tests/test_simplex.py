import numpy as np
import pytest
from scipy.optimize import linprog

from reluscope import ValidationError
from reluscope.simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, solve_max


def _scipy_max(c, a, b):
    # probe feasibility separately: HiGHS presolve may report an unbounded
    # program as infeasible when it detects dual infeasibility first
    feas = linprog(np.zeros(len(c)), A_ub=a, b_ub=b, bounds=(0, None), method="highs")
    if feas.status == 2:
        return INFEASIBLE, None
    assert feas.status == 0
    res = linprog(-np.asarray(c), A_ub=a, b_ub=b, bounds=(0, None), method="highs")
    if res.status == 0:
        return OPTIMAL, -res.fun
    if res.status in (2, 3):
        return UNBOUNDED, None
    raise AssertionError(f"unexpected scipy status {res.status}")


def test_known_small_program():
    # max x + y st x + y <= 1: optimum 1 along the whole segment
    res = solve_max([1.0, 1.0], [[1.0, 1.0]], [1.0])
    assert res.status == OPTIMAL
    assert abs(res.objective - 1.0) < 1e-9
    assert np.all(res.x >= -1e-12)


def test_infeasible_program():
    # x <= -1 with x >= 0
    res = solve_max([1.0], [[1.0]], [-1.0])
    assert res.status == INFEASIBLE
    assert res.x is None


def test_unbounded_program():
    res = solve_max([1.0, 0.0], [[0.0, 1.0]], [5.0])
    assert res.status == UNBOUNDED


def test_no_constraints():
    res = solve_max([-1.0, -2.0], np.zeros((0, 2)), np.zeros(0))
    assert res.status == OPTIMAL
    assert res.objective == 0.0
    res = solve_max([1.0], np.zeros((0, 1)), np.zeros(0))
    assert res.status == UNBOUNDED


def test_degenerate_vertices_terminate():
    # many constraints meeting at the origin; Bland's rule must not cycle
    a = np.array([[1.0, 1.0], [1.0, 2.0], [2.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    b = np.array([0.0, 0.0, 0.0, 0.0, 0.0])
    res = solve_max([1.0, 1.0], a, b)
    assert res.status == OPTIMAL
    assert abs(res.objective) < 1e-9


def test_negative_rhs_needs_phase_one():
    # -x <= -2 means x >= 2; max -x has optimum -2
    res = solve_max([-1.0], [[-1.0]], [-2.0])
    assert res.status == OPTIMAL
    assert abs(res.objective + 2.0) < 1e-9
    assert abs(res.x[0] - 2.0) < 1e-9


def test_matches_scipy_on_random_programs():
    rng = np.random.default_rng(606)
    statuses = {OPTIMAL: 0, INFEASIBLE: 0, UNBOUNDED: 0}
    for _ in range(200):
        n = int(rng.integers(1, 6))
        m = int(rng.integers(1, 9))
        a = rng.uniform(-2.0, 2.0, size=(m, n))
        b = rng.uniform(-1.5, 2.5, size=m)
        c = rng.uniform(-2.0, 2.0, size=n)
        ours = solve_max(c, a, b)
        status, objective = _scipy_max(c, a, b)
        assert ours.status == status, f"{ours.status} vs scipy {status}"
        statuses[status] += 1
        if status == OPTIMAL:
            assert abs(ours.objective - objective) <= 1e-7 * (1.0 + abs(objective))
            # the reported point must actually be feasible
            assert np.all(a @ ours.x <= b + 1e-8)
            assert np.all(ours.x >= -1e-10)
    # the sweep should exercise all three outcomes
    assert min(statuses.values()) > 0


def test_bounded_feasibility_style_programs():
    # the exact structure the region checks build: box rows plus slack column
    rng = np.random.default_rng(707)
    for _ in range(100):
        n = int(rng.integers(1, 4))
        k = int(rng.integers(0, 6))
        rows = []
        rhs = []
        for _ in range(k):
            normal = rng.uniform(-1.0, 1.0, size=n)
            rows.append(np.concatenate([-normal, [1.0]]))
            rhs.append(rng.uniform(-0.5, 1.0))
        for i in range(n):
            e = np.zeros(n + 1)
            e[i] = 1.0
            rows.append(e)
            rhs.append(10.0)
        t_row = np.zeros(n + 1)
        t_row[n] = 1.0
        rows.append(t_row)
        rhs.append(1.0)
        c = t_row
        ours = solve_max(c, np.array(rows), np.array(rhs))
        status, objective = _scipy_max(c, np.array(rows), np.array(rhs))
        assert ours.status == status
        if status == OPTIMAL:
            assert abs(ours.objective - objective) <= 1e-8 * (1.0 + abs(objective))


def test_input_validation():
    with pytest.raises(ValidationError):
        solve_max([], np.zeros((0, 0)), np.zeros(0))
    with pytest.raises(ValidationError):
        solve_max([1.0], [[1.0, 2.0]], [1.0])
    with pytest.raises(ValidationError):
        solve_max([np.nan], [[1.0]], [1.0])
