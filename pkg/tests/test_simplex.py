import numpy as np
import pytest
from scipy.optimize import linprog

from edgeoffload.simplex import SimplexError, linprog_simplex


def random_lp(rng, n=6, m_ub=4, m_eq=2):
    c = rng.normal(size=n)
    A_ub = rng.normal(size=(m_ub, n))
    x0 = rng.uniform(0, 1, n)
    b_ub = A_ub @ x0 + rng.uniform(0, 1, m_ub)
    A_eq = rng.uniform(0, 1, (m_eq, n))
    b_eq = A_eq @ x0
    return c, A_ub, b_ub, A_eq, b_eq


def test_textbook_example():
    # max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18  ->  x=2, y=6, value 36
    res = linprog_simplex([-3, -5], A_ub=[[1, 0], [0, 2], [3, 2]], b_ub=[4, 12, 18])
    assert res.status == "optimal"
    assert res.fun == pytest.approx(-36)
    assert res.x == pytest.approx([2, 6])


def test_infeasible():
    res = linprog_simplex([1, 1], A_eq=[[1, 1]], b_eq=[3], upper=[1, 1])
    assert res.status == "infeasible"


def test_unbounded():
    res = linprog_simplex([-1, 0], A_ub=[[0, 1]], b_ub=[1])
    assert res.status == "unbounded"


def test_negative_rhs_rows():
    # x + y >= 2 written as -x - y <= -2
    res = linprog_simplex([1, 2], A_ub=[[-1, -1]], b_ub=[-2])
    assert res.status == "optimal" and res.fun == pytest.approx(2)


def test_upper_bounds_respected():
    res = linprog_simplex([-1, -1], A_ub=[[1, 1]], b_ub=[10], upper=[2, 3])
    assert res.fun == pytest.approx(-5)
    assert res.x == pytest.approx([2, 3])


def test_zero_upper_pins_variable():
    res = linprog_simplex([-5, -1], A_ub=[[1, 1]], b_ub=[1], upper=[0, np.inf])
    assert res.x[0] == 0 and res.fun == pytest.approx(-1)


def test_redundant_equalities():
    res = linprog_simplex([1, 1, 1], A_eq=[[1, 1, 0], [2, 2, 0], [0, 0, 1]], b_eq=[1, 2, 1])
    assert res.status == "optimal" and res.fun == pytest.approx(2)


def test_degenerate_problem_terminates():
    # Beale's cycling example for the textbook Dantzig rule
    c = [-0.75, 150, -0.02, 6]
    A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    res = linprog_simplex(c, A_ub=A, b_ub=[0, 0, 1])
    assert res.status == "optimal" and res.fun == pytest.approx(-0.05)


def test_iteration_cap_raises_with_diagnostics():
    rng = np.random.default_rng(0)
    c, A_ub, b_ub, A_eq, b_eq = random_lp(rng, n=20, m_ub=10, m_eq=3)
    with pytest.raises(SimplexError, match="pivots"):
        linprog_simplex(c, A_ub, b_ub, A_eq, b_eq, upper=np.ones(20), max_iter=1)


@pytest.mark.parametrize("seed", range(40))
def test_agrees_with_highs(seed):
    rng = np.random.default_rng(seed)
    c, A_ub, b_ub, A_eq, b_eq = random_lp(rng)
    upper = rng.choice([1.0, 2.0, np.inf], size=c.size)
    mine = linprog_simplex(c, A_ub, b_ub, A_eq, b_eq, upper)
    ref = linprog(c, A_ub, b_ub, A_eq, b_eq, bounds=list(zip([0] * c.size, upper)),
                  method="highs")
    if ref.status == 0:
        assert mine.status == "optimal"
        assert mine.fun == pytest.approx(ref.fun, rel=1e-7, abs=1e-7)
        assert np.all(A_ub @ mine.x <= b_ub + 1e-7)
        assert np.allclose(A_eq @ mine.x, b_eq, atol=1e-7)
    elif ref.status == 3:
        assert mine.status == "unbounded"
