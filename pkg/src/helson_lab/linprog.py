"""Linear programming front end.

Solves   min c.x   s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0
(callers split free variables into differences of nonnegative ones).

Thin wrapper over scipy's HiGHS dual simplex.  It exists to pin down the
conventions the rest of the package relies on: a single dense calling form,
duals reported as sensitivities dz/db for both row groups, an explicit
duality gap, and this package's error taxonomy (Infeasible / Unbounded /
SolverStall) instead of status codes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog as _scipy_linprog

from .errors import Infeasible, OutOfRange, SolverStall, Unbounded


@dataclass
class LPResult:
    status: str
    x: np.ndarray
    objective: float
    duals_eq: np.ndarray
    duals_ub: np.ndarray
    iterations: int
    duality_gap: float


def lp_solve(
    c,
    A_eq=None,
    b_eq=None,
    A_ub=None,
    b_ub=None,
    max_iter: int = 100_000,
) -> LPResult:
    """Solve min c.x s.t. A_eq x = b_eq, A_ub x <= b_ub, x >= 0.

    Stated envelope: up to 1e4 variables and about 1e3 rows; a hard guard
    rejects anything past 1e4 x 4096.  Optimality is certified by the dual
    values (duality_gap <= 1e-8 * (1 + |objective|) in practice).
    """
    c = np.asarray(c, dtype=float).ravel()
    n = c.size
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    m_eq, m_ub = A_eq.shape[0], A_ub.shape[0]
    if A_eq.shape != (m_eq, n) or A_ub.shape != (m_ub, n):
        raise OutOfRange("constraint matrix width does not match len(c)")
    if b_eq.size != m_eq or b_ub.size != m_ub:
        raise OutOfRange("right-hand side length does not match its matrix")
    if n > 10_000 or m_eq + m_ub > 4096:
        raise OutOfRange(f"LP size {n} x {m_eq + m_ub} exceeds the dense solver envelope")

    res = _scipy_linprog(
        c,
        A_ub=A_ub if m_ub else None,
        b_ub=b_ub if m_ub else None,
        A_eq=A_eq if m_eq else None,
        b_eq=b_eq if m_eq else None,
        bounds=(0.0, None),
        method="highs",
        options={"maxiter": int(max_iter)},
    )
    if res.status == 2:
        raise Infeasible("no feasible point satisfies the constraints")
    if res.status == 3:
        raise Unbounded("objective unbounded over the feasible set")
    if res.status != 0:
        raise SolverStall(f"LP backend gave up: {res.message}")

    x = np.asarray(res.x, dtype=float)
    duals_eq = (
        np.asarray(res.eqlin.marginals, dtype=float) if m_eq else np.zeros(0)
    )
    duals_ub = (
        np.asarray(res.ineqlin.marginals, dtype=float) if m_ub else np.zeros(0)
    )
    objective = float(c @ x)
    dual_obj = float(b_eq @ duals_eq + b_ub @ duals_ub)
    gap = abs(objective - dual_obj)
    iters = int(np.sum(res.nit)) if np.ndim(res.nit) else int(res.nit)
    return LPResult("optimal", x, objective, duals_eq, duals_ub, iters, gap)
