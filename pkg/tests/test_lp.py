"""Simplex solver: trivial programs, planted optima, duality, failure modes."""

from __future__ import annotations

import numpy as np
import pytest

from helson_lab.errors import Infeasible, Unbounded
from helson_lab.linprog import lp_solve


def test_min_x_with_lower_bound():
    # min x s.t. x >= 3, written as -x <= -3
    res = lp_solve(c=[1.0], A_ub=[[-1.0]], b_ub=[-3.0])
    assert res.objective == pytest.approx(3.0, abs=1e-9)
    assert res.x[0] == pytest.approx(3.0, abs=1e-9)


def test_split_variable_pair():
    # min u+v s.t. u-v = 1 -> (u,v) = (1,0)
    res = lp_solve(c=[1.0, 1.0], A_eq=[[1.0, -1.0]], b_eq=[1.0])
    assert res.objective == pytest.approx(1.0, abs=1e-10)
    assert res.x == pytest.approx([1.0, 0.0], abs=1e-10)


def test_infeasible_detected():
    # x <= -1 with x >= 0
    with pytest.raises(Infeasible):
        lp_solve(c=[1.0], A_ub=[[1.0]], b_ub=[-1.0])


def test_unbounded_detected():
    # min -x with x only bounded below
    with pytest.raises(Unbounded):
        lp_solve(c=[-1.0], A_ub=[[-1.0]], b_ub=[0.0])


def test_redundant_rows_handled():
    res = lp_solve(
        c=[1.0, 2.0],
        A_eq=[[1.0, 1.0], [2.0, 2.0]],  # second row redundant
        b_eq=[1.0, 2.0],
    )
    assert res.objective == pytest.approx(1.0, abs=1e-9)
    assert res.x == pytest.approx([1.0, 0.0], abs=1e-9)


def _planted_lp(rng: np.random.Generator, m: int, n: int):
    """Random equality-form LP with a known unique optimum.

    Choose a basis B, positive x_B, and duals y; costs are set so reduced
    costs vanish on B and are strictly positive off B.
    """
    A = rng.normal(size=(m, n))
    basis = rng.choice(n, size=m, replace=False)
    xB = rng.uniform(0.5, 2.0, size=m)
    x = np.zeros(n)
    x[basis] = xB
    b = A @ x
    y = rng.normal(size=m)
    c = A.T @ y
    mask = np.ones(n, dtype=bool)
    mask[basis] = False
    c[mask] += rng.uniform(0.1, 1.0, size=n - m)
    return c, A, b, x, float(c @ x)


@pytest.mark.parametrize("seed", range(10))
def test_planted_optimum(seed):
    rng = np.random.default_rng(100 + seed)
    m, n = 12, 30
    c, A, b, x_star, obj_star = _planted_lp(rng, m, n)
    res = lp_solve(c, A_eq=A, b_eq=b)
    assert res.objective == pytest.approx(obj_star, abs=1e-7)
    assert np.allclose(res.x, x_star, atol=1e-7)
    assert res.duality_gap <= 1e-8 * (1 + abs(res.objective))


@pytest.mark.parametrize("seed", range(5))
def test_planted_with_inequalities(seed):
    rng = np.random.default_rng(500 + seed)
    m, n = 8, 20
    c, A, b, x_star, obj_star = _planted_lp(rng, m, n)
    # slack inequalities that are loose at the optimum do not move it
    G = rng.normal(size=(5, n))
    h = G @ x_star + rng.uniform(0.5, 1.0, size=5)
    res = lp_solve(c, A_eq=A, b_eq=b, A_ub=G, b_ub=h)
    assert res.objective == pytest.approx(obj_star, abs=1e-7)
    assert res.duality_gap <= 1e-8 * (1 + abs(res.objective))


def test_duals_certify_optimum():
    rng = np.random.default_rng(42)
    c, A, b, x_star, obj_star = _planted_lp(rng, 10, 25)
    res = lp_solve(c, A_eq=A, b_eq=b)
    # dual feasibility: A^T y <= c
    assert np.all(A.T @ res.duals_eq <= c + 1e-7)
    assert float(b @ res.duals_eq) == pytest.approx(res.objective, abs=1e-7)


def test_degenerate_program_terminates():
    # many ties in the ratio test
    n = 12
    A = np.vstack([np.eye(n), np.ones((1, n))])
    b = np.concatenate([np.zeros(n), [0.0]])
    c = -np.ones(n)
    res = lp_solve(c, A_ub=A, b_ub=b)
    assert res.objective == pytest.approx(0.0, abs=1e-9)
