"""Dense two-phase tableau simplex (Dantzig pricing, Bland's rule against stalling).

Small problems only (a few hundred rows and columns).  The pivot order is
fully deterministic, which makes LP certificates reproducible bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LPInfeasible, LPUnbounded


@dataclass
class LPResult:
    x: np.ndarray
    fun: float
    iterations: int


def _pivot(T: np.ndarray, r: int, c: int) -> None:
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _iterate(T, basis, ncols, tol, max_iter, it, stall_limit=50):
    """Pivot to optimality.

    Entering column by the most negative reduced cost with a Harris ratio test;
    after ``stall_limit`` consecutive degenerate pivots switch to Bland's
    smallest-index rule (which cannot cycle) until the objective moves again.
    """
    m = T.shape[0] - 1
    stalled = 0
    while True:
        if it >= max_iter:
            raise RuntimeError("simplex iteration limit reached")
        d = T[-1, :ncols]
        cand = np.nonzero(d < -tol)[0]
        if cand.size == 0:
            return it
        bland = stalled >= stall_limit
        j = int(cand[0]) if bland else int(cand[np.argmin(d[cand])])
        col = T[:m, j]
        pos = np.nonzero(col > tol)[0]
        if pos.size == 0:
            raise LPUnbounded("objective unbounded below")
        ratios = T[pos, -1] / col[pos]
        best = ratios.min()
        if bland:
            ties = pos[ratios <= best + tol * max(1.0, abs(best))]
            r = int(min(ties, key=lambda i: basis[i]))
        else:
            # Harris two-pass test: allow a tiny infeasibility, then take the
            # largest pivot among the admissible rows
            theta = np.min((np.maximum(T[pos, -1], 0.0) + tol) / col[pos])
            adm = pos[ratios <= theta]
            r = int(adm[np.argmax(col[adm])])
            best = max(float(T[r, -1] / col[r]), 0.0)
        stalled = stalled + 1 if best <= tol else 0
        _pivot(T, r, j)
        rhs = T[:m, -1]
        rhs[(rhs < 0) & (rhs > -tol)] = 0.0
        basis[r] = j
        it += 1


def linprog_simplex(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, *, tol: float = 1e-9, max_iter: int = 100_000) -> LPResult:
    """Minimize ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x == b_eq``, ``x >= 0``."""
    c = np.asarray(c, dtype=float)
    nv = c.size
    rows, rhs, kinds = [], [], []
    if A_ub is not None:
        for a, b in zip(np.atleast_2d(A_ub), np.atleast_1d(b_ub)):
            rows.append(np.asarray(a, dtype=float))
            rhs.append(float(b))
            kinds.append("ub")
    if A_eq is not None:
        for a, b in zip(np.atleast_2d(A_eq), np.atleast_1d(b_eq)):
            rows.append(np.asarray(a, dtype=float))
            rhs.append(float(b))
            kinds.append("eq")
    m = len(rows)
    n_slack = sum(k == "ub" for k in kinds)
    # every row gets an artificial unless its slack can start in the basis
    needs_art = [k == "eq" or b < 0 for k, b in zip(kinds, rhs)]
    n_art = sum(needs_art)
    ncols = nv + n_slack + n_art
    T = np.zeros((m + 1, ncols + 1))
    basis = [0] * m
    s = nv
    a = nv + n_slack
    for i, (row, b, kind) in enumerate(zip(rows, rhs, kinds)):
        sign = -1.0 if b < 0 else 1.0
        T[i, :nv] = sign * row
        T[i, -1] = sign * b
        if kind == "ub":
            T[i, s] = sign
            if not needs_art[i]:
                basis[i] = s
            s += 1
        if needs_art[i]:
            T[i, a] = 1.0
            basis[i] = a
            a += 1
    it = 0
    if n_art:
        art_rows = [i for i in range(m) if needs_art[i]]
        T[-1, :] = 0.0
        T[-1, : nv + n_slack] = -T[art_rows, : nv + n_slack].sum(axis=0)
        T[-1, -1] = -T[art_rows, -1].sum()
        it = _iterate(T, basis, ncols, tol, max_iter, it)
        if -T[-1, -1] > 1e-7 * max(1.0, np.abs(rhs).max() if rhs else 1.0):
            raise LPInfeasible(f"phase one ended with infeasibility {-T[-1, -1]:.3g}")
        # drive zero-level artificials out of the basis
        keep = []
        for i in range(m):
            if basis[i] >= nv + n_slack:
                cand = np.nonzero(np.abs(T[i, : nv + n_slack]) > tol)[0]
                if cand.size:
                    j = int(cand[0])
                    _pivot(T, i, j)
                    basis[i] = j
                    keep.append(i)
            else:
                keep.append(i)
        T = np.vstack([T[keep], T[-1:]])
        basis = [basis[i] for i in keep]
        T = np.delete(T, np.s_[nv + n_slack : ncols], axis=1)
        ncols = nv + n_slack
        m = len(keep)
    cost = np.zeros(ncols)
    cost[:nv] = c
    T[-1, :] = 0.0
    T[-1, :ncols] = cost
    for i, j in enumerate(basis):
        if cost[j] != 0.0:
            T[-1] -= cost[j] * T[i]
    it = _iterate(T, basis, ncols, tol, max_iter, it)
    x = np.zeros(ncols)
    for i, j in enumerate(basis):
        x[j] = T[i, -1]
    x = x[:nv]
    return LPResult(x=x, fun=float(c @ x), iterations=it)
