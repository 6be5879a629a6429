"""Exact rational simplex: known optima, statuses, duality properties."""

import random
from fractions import Fraction as F

from matchlab.simplex import solve_lp


def test_simple_box():
    # max x + y  s.t.  x <= 2, y <= 3
    sol = solve_lp([F(1), F(1)], [[F(1), F(0)], [F(0), F(1)]], [F(2), F(3)])
    assert sol.status == "optimal"
    assert sol.x == [F(2), F(3)] and sol.objective == 5
    assert sol.duals == [F(1), F(1)]


def test_fractional_vertex():
    # max 3x + 5y  s.t.  x + 2y <= 4, 3x + 2y <= 6
    sol = solve_lp([F(3), F(5)],
                   [[F(1), F(2)], [F(3), F(2)]], [F(4), F(6)])
    assert sol.status == "optimal"
    assert sol.x == [F(1), F(3, 2)]
    assert sol.objective == F(21, 2)


def test_equality_constraints():
    # max x - y  s.t.  x + y = 1
    sol = solve_lp([F(1), F(-1)], a_eq=[[F(1), F(1)]], b_eq=[F(1)])
    assert sol.status == "optimal"
    assert sol.x == [F(1), F(0)] and sol.objective == 1


def test_negative_rhs_normalization():
    # max -x  s.t.  -x <= -2   (i.e. x >= 2)  ->  x = 2
    sol = solve_lp([F(-1)], [[F(-1)]], [F(-2)])
    assert sol.status == "optimal"
    assert sol.x == [F(2)] and sol.objective == -2


def test_infeasible():
    sol = solve_lp([F(1)], [[F(1)]], [F(1)],
                   a_eq=[[F(1)]], b_eq=[F(5)])
    assert sol.status == "infeasible"


def test_unbounded():
    sol = solve_lp([F(1)], [[F(-1)]], [F(0)])
    assert sol.status == "unbounded"


def test_degenerate_cycling_guard():
    # classic degenerate LP; Bland's rule must terminate
    c = [F(3, 4), F(-150), F(1, 50), F(-6)]
    a = [[F(1, 4), F(-60), F(-1, 25), F(9)],
         [F(1, 2), F(-90), F(-1, 50), F(3)],
         [F(0), F(0), F(1), F(0)]]
    b = [F(0), F(0), F(1)]
    sol = solve_lp(c, a, b)
    assert sol.status == "optimal"
    assert sol.objective == F(1, 20)


def test_reduced_costs_nonpositive_at_optimum():
    sol = solve_lp([F(2), F(1)], [[F(1), F(1)]], [F(1)])
    assert sol.status == "optimal"
    assert all(rc <= 0 for rc in sol.reduced_costs)
    # the basic variable's reduced cost is exactly zero
    assert sol.reduced_costs[0] == 0


def test_random_duality():
    """Strong duality and dual feasibility on random bounded max-LPs."""
    rng = random.Random(3)
    for _ in range(25):
        nv, nr = rng.randint(1, 4), rng.randint(1, 4)
        c = [F(rng.randint(0, 5)) for _ in range(nv)]
        a = [[F(rng.randint(0, 4)) for _ in range(nv)] for _ in range(nr)]
        # ensure boundedness: every variable capped
        a.append([F(1)] * nv)
        b = [F(rng.randint(1, 6)) for _ in range(nr)] + [F(10)]
        sol = solve_lp(c, a, b)
        assert sol.status == "optimal"
        # primal feasibility
        for row, bound in zip(a, b):
            assert sum(r * x for r, x in zip(row, sol.x)) <= bound
        # dual feasibility (y >= 0, A^T y >= c) and strong duality
        y = sol.duals
        assert all(v >= 0 for v in y)
        for j in range(nv):
            assert sum(a[i][j] * y[i] for i in range(len(a))) >= c[j]
        assert sum(yi * bi for yi, bi in zip(y, b)) == sol.objective
