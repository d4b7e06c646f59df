"""Dense two-phase tableau simplex for small linear programs.

Solves::

    minimize    c @ x
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                0 <= x <= upper

Entering columns are picked by the most negative reduced cost; after a run
of degenerate pivots the solver switches to Bland's rule (lowest index
entering, lowest basic index on ratio ties) until progress resumes, which
rules out cycling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEAS_TOL = 1e-7
OPT_TOL = 1e-9
PIVOT_TOL = 1e-11
DEGENERATE_STREAK = 20


class SimplexError(RuntimeError):
    """The iteration limit was hit before the method terminated."""


@dataclass
class SimplexResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    fun: float | None
    iterations: int


def _as_2d(A, n):
    if A is None:
        return np.zeros((0, n))
    return np.atleast_2d(np.asarray(A, dtype=float)).reshape(-1, n)


def _implied_upper(A_eq, b_eq, upper):
    """Columns whose finite upper bound already follows from an equality row.

    If a row has only non-negative coefficients, then ``a_k x_k <= b`` for
    every column in it, so ``x_k <= b / a_k`` holds without an extra row.
    """
    implied = np.zeros(upper.size, dtype=bool)
    for row, b in zip(A_eq, b_eq):
        if np.any(row < 0):
            continue
        pos = row > 0
        implied[pos] |= b / row[pos] <= upper[pos] + FEAS_TOL
    return implied


class _Tableau:
    def __init__(self, T, basis, max_iter):
        self.T = T
        self.basis = basis
        self.iterations = 0
        self.max_iter = max_iter

    def pivot(self, row, col):
        T = self.T
        T[row] /= T[row, col]
        others = np.flatnonzero(np.abs(T[:, col]) > 0)
        others = others[others != row]
        T[others] -= np.outer(T[others, col], T[row])
        self.basis[row] = col

    def optimize(self, ncols, phase):
        """Pivot until optimal over the first ``ncols`` columns; False if unbounded."""
        T = self.T
        m = T.shape[0] - 1
        streak = 0
        while True:
            reduced = T[-1, :ncols]
            candidates = np.flatnonzero(reduced < -OPT_TOL)
            if candidates.size == 0:
                return True
            bland = streak >= DEGENERATE_STREAK
            col = int(candidates[0]) if bland else int(candidates[np.argmin(reduced[candidates])])
            column = T[:m, col]
            rows = np.flatnonzero(column > PIVOT_TOL)
            if rows.size == 0:
                return False
            ratios = T[rows, -1] / column[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            row = int(ties[np.argmin(self.basis[ties])]) if bland or ties.size > 1 else int(ties[0])
            streak = streak + 1 if best <= FEAS_TOL * 1e-3 else 0
            self.pivot(row, col)
            self.iterations += 1
            if self.iterations > self.max_iter:
                raise SimplexError(
                    f"simplex did not terminate within {self.max_iter} pivots "
                    f"(phase {phase}, {m} rows, {ncols} columns, "
                    f"objective {-T[-1, -1]:.6g})")


def linprog_simplex(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, upper=None,
                    max_iter: int | None = None) -> SimplexResult:
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub, A_eq = _as_2d(A_ub, n), _as_2d(A_eq, n)
    b_ub = np.asarray(b_ub if b_ub is not None else [], dtype=float).reshape(-1)
    b_eq = np.asarray(b_eq if b_eq is not None else [], dtype=float).reshape(-1)
    upper = np.full(n, np.inf) if upper is None else np.asarray(upper, dtype=float).copy()

    keep = upper > 0
    cols = np.flatnonzero(keep)
    ck, Aub, Aeq, uk = c[cols], A_ub[:, cols], A_eq[:, cols], upper[cols]
    bounded = np.isfinite(uk) & ~_implied_upper(Aeq, b_eq, uk)
    if bounded.any():
        extra = np.eye(cols.size)[bounded]
        Aub = np.vstack([Aub, extra])
        b_ub = np.concatenate([b_ub, uk[bounded]])

    # rows: inequality rows then equality rows, all with rhs >= 0
    n_ub, n_eq, nx = Aub.shape[0], Aeq.shape[0], cols.size
    A = np.vstack([Aub, Aeq])
    b = np.concatenate([b_ub, b_eq])
    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign
    m = n_ub + n_eq
    slack = np.zeros((m, n_ub))
    slack[np.arange(n_ub), np.arange(n_ub)] = sign[:n_ub]
    needs_art = np.ones(m, dtype=bool)
    needs_art[:n_ub] = sign[:n_ub] < 0
    art_rows = np.flatnonzero(needs_art)
    art = np.zeros((m, art_rows.size))
    art[art_rows, np.arange(art_rows.size)] = 1.0

    n_struct = nx + n_ub
    T = np.zeros((m + 1, n_struct + art_rows.size + 1))
    T[:m, :nx] = A
    T[:m, nx:n_struct] = slack
    T[:m, n_struct:-1] = art
    T[:m, -1] = b
    basis = np.empty(m, dtype=int)
    basis[~needs_art] = nx + np.flatnonzero(~needs_art)
    basis[art_rows] = n_struct + np.arange(art_rows.size)
    if max_iter is None:
        max_iter = 50 * (m + T.shape[1])
    tab = _Tableau(T, basis, max_iter)

    if art_rows.size:
        T[-1, :] = -T[art_rows].sum(axis=0)
        T[-1, n_struct:-1] = 0.0
        tab.optimize(T.shape[1] - 1, phase=1)
        if -T[-1, -1] > FEAS_TOL * max(1.0, np.abs(b).max(initial=0.0)):
            return SimplexResult("infeasible", None, None, tab.iterations)
        # drive zero-level artificials out of the basis; drop redundant rows
        drop = []
        for row in range(m):
            if tab.basis[row] < n_struct:
                continue
            nz = np.flatnonzero(np.abs(T[row, :n_struct]) > 1e-9)
            if nz.size:
                tab.pivot(row, int(nz[0]))
            else:
                drop.append(row)
        if drop:
            keep_rows = np.setdiff1d(np.arange(m + 1), drop)
            tab.T = T = T[keep_rows]
            tab.basis = basis = np.delete(tab.basis, drop)
            m -= len(drop)
        tab.T = T = np.hstack([T[:, :n_struct], T[:, -1:]])

    cost = np.concatenate([ck, np.zeros(n_ub)])
    T[-1, :-1] = cost - cost[tab.basis] @ T[:m, :-1]
    T[-1, -1] = -cost[tab.basis] @ T[:m, -1]
    if not tab.optimize(n_struct, phase=2):
        return SimplexResult("unbounded", None, None, tab.iterations)
    xs = np.zeros(n_struct)
    xs[tab.basis] = T[:m, -1]
    x = np.zeros(n)
    x[cols] = np.maximum(xs[:nx], 0.0)
    return SimplexResult("optimal", x, float(c @ x), tab.iterations)
