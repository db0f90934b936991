"""Dense tableau simplex for small LPs whose origin is feasible."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure

OPT_TOL = 1e-9
PIVOT_TOL = 1e-12


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    iterations: int


def maximize(c, A_ub, b_ub, max_iter: int | None = None) -> LPResult:
    """Solve ``max c.x  s.t.  A_ub x <= b_ub, x >= 0`` with ``b_ub >= 0``.

    The slack basis is then feasible, so a single phase suffices. Pivoting
    uses Bland's rule: the LPs built by :mod:`measureflow.flatnorm` are
    heavily degenerate (almost every right-hand side is zero) and Dantzig's
    rule can cycle on them.

    Raises
    ------
    NumericalFailure
        If the iteration cap is hit or the problem looks unbounded.
    """
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A_ub, dtype=float))
    b = np.asarray(b_ub, dtype=float)
    m, n = A.shape
    if np.any(b < 0):
        raise ValueError("maximize() requires b_ub >= 0 (origin feasible)")
    if max_iter is None:
        max_iter = 10 * (n + 2) ** 2

    # tableau: [A | I | b] with objective row [-c | 0 | 0]
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    basis = list(range(n, n + m))

    it = 0
    while True:
        red = T[m, :-1]
        entering = np.flatnonzero(red < -OPT_TOL)
        if entering.size == 0:
            break
        if it >= max_iter:
            raise NumericalFailure(f"simplex hit iteration cap ({max_iter})")
        col = int(entering[0])
        colv = T[:m, col]
        rows = np.flatnonzero(colv > PIVOT_TOL)
        if rows.size == 0:
            raise NumericalFailure("LP appears unbounded")
        ratios = T[rows, -1] / colv[rows]
        best = ratios.min()
        ties = rows[ratios <= best + PIVOT_TOL]
        row = int(min(ties, key=lambda r: basis[r]))

        T[row] /= T[row, col]
        others = np.arange(m + 1) != row
        T[others] -= np.outer(T[others, col], T[row])
        basis[row] = col
        it += 1

    x = np.zeros(n + m)
    for r, j in enumerate(basis):
        x[j] = T[r, -1]
    return LPResult(x=x[:n], objective=float(T[m, -1]), iterations=it)
