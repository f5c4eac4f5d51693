"""Dense two-phase primal simplex with Bland's rule.

Problems are stated in maximization form over rows tagged ``"<="`` or
``"=="`` and per-variable bounds (any of them may be infinite).  The
solver is deliberately small and deterministic: the master problems of
the nucleolus procedure have ``n + 1`` columns and up to a thousand rows,
so robustness matters more than speed.  Tall problems are solved through
their dual, which keeps the tableau small.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NumericalError

logger = logging.getLogger(__name__)

LE = "<="
EQ = "=="

FEAS_TOL = 1e-8
OPT_TOL = 1e-9
PIVOT_TOL = 1e-11
CLUSTER_TOL = 1e-7
DUAL_RATIO = 3

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NUMERICAL = "numerical"


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """max objective @ x  s.t.  rows @ x (<= | ==) rhs,  lower <= x <= upper."""

    objective: np.ndarray
    rows: np.ndarray
    senses: tuple
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    @classmethod
    def build(cls, objective, rows=(), senses=(), rhs=(), lower=None, upper=None):
        c = np.asarray(objective, dtype=float).ravel()
        k = c.size
        A = np.asarray(rows, dtype=float).reshape(-1, k)
        b = np.asarray(rhs, dtype=float).ravel()
        senses = tuple(senses)
        if len(senses) != A.shape[0] or b.size != A.shape[0]:
            raise ValueError("rows, senses and rhs must have matching lengths")
        if any(s not in (LE, EQ) for s in senses):
            raise ValueError(f"row senses must be {LE!r} or {EQ!r}")
        lo = np.full(k, -np.inf) if lower is None else np.asarray(lower, dtype=float).ravel()
        hi = np.full(k, np.inf) if upper is None else np.asarray(upper, dtype=float).ravel()
        if lo.size != k or hi.size != k:
            raise ValueError("bounds must have one entry per variable")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("coefficients must be finite")
        if np.any(lo > hi) or np.any(lo == np.inf) or np.any(hi == -np.inf):
            raise ValueError("inconsistent variable bounds")
        return cls(c, A, senses, b, lo, hi)

    @property
    def n_vars(self):
        return self.objective.size

    @property
    def n_rows(self):
        return self.rows.shape[0]

    def with_row(self, coeffs, sense, value):
        return LinearProgram.build(
            self.objective,
            np.vstack([self.rows, np.asarray(coeffs, dtype=float)[None, :]]),
            self.senses + (sense,),
            np.append(self.rhs, value),
            self.lower,
            self.upper,
        )

    def with_objective(self, objective):
        return LinearProgram(
            np.asarray(objective, dtype=float).ravel(),
            self.rows, self.senses, self.rhs, self.lower, self.upper,
        )


@dataclass
class LpSolution:
    status: str
    x: np.ndarray = field(default_factory=lambda: np.empty(0))
    duals: np.ndarray = field(default_factory=lambda: np.empty(0))
    objective: float = float("nan")
    iterations: int = 0

    @property
    def optimal(self):
        return self.status == OPTIMAL


class _StandardForm:
    """Maps the bounded problem onto  A u (+ slacks) = b,  u >= 0."""

    def __init__(self, lp: LinearProgram):
        k = lp.n_vars
        offset = np.zeros(k)
        cols = []  # (var index, sign)
        bound_rows = []
        for j in range(k):
            lo, hi = lp.lower[j], lp.upper[j]
            if np.isfinite(lo):
                offset[j] = lo
                cols.append((j, 1.0))
                if np.isfinite(hi):
                    bound_rows.append((len(cols) - 1, hi - lo))
            elif np.isfinite(hi):
                offset[j] = hi
                cols.append((j, -1.0))
            else:
                cols.append((j, 1.0))
                cols.append((j, -1.0))
        T = np.zeros((k, len(cols)))
        for col, (j, sign) in enumerate(cols):
            T[j, col] = sign
        self.offset = offset
        self.T = T

        A = lp.rows @ T
        b = lp.rhs - lp.rows @ offset
        senses = list(lp.senses)
        for col, width in bound_rows:
            row = np.zeros(len(cols))
            row[col] = 1.0
            A = np.vstack([A, row])
            b = np.append(b, width)
            senses.append(LE)
        self.n_orig_rows = lp.n_rows
        self.n_struct = len(cols)

        m = A.shape[0]
        le_rows = [i for i in range(m) if senses[i] == LE]
        slack_of = {i: self.n_struct + s for s, i in enumerate(le_rows)}
        n_cols = self.n_struct + len(le_rows)
        full = np.zeros((m, n_cols))
        full[:, : self.n_struct] = A
        for i, col in slack_of.items():
            full[i, col] = 1.0
        self.A = full
        self.b = b
        self.c = np.zeros(n_cols)
        self.c[: self.n_struct] = lp.objective @ T
        self.c0 = float(lp.objective @ offset)
        self.slack_of = slack_of
        self.m = m

    def recover(self, u):
        return self.offset + self.T @ u[: self.n_struct]


def _pivot(tab, d, basis, r, q):
    tab[r] /= tab[r, q]
    col = tab[:, q].copy()
    col[r] = 0.0
    tab -= np.outer(col, tab[r])
    d -= d[q] * tab[r]
    basis[r] = q


def _simplex(tab, d, basis, banned, max_iter, verbose):
    """Bland-rule iterations on a tableau whose last column is the rhs."""
    n_cols = tab.shape[1] - 1
    for it in range(max_iter):
        if verbose:
            logger.debug("tableau iteration %d\n%s\nreduced costs %s", it, tab, d)
        entering = -1
        for j in range(n_cols):
            if d[j] > OPT_TOL and not banned[j]:
                entering = j
                break
        if entering < 0:
            return OPTIMAL, it
        col = tab[:, entering]
        rows = np.nonzero(col > PIVOT_TOL)[0]
        if rows.size == 0:
            return UNBOUNDED, it
        ratios = np.maximum(tab[rows, -1], 0.0) / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
        leave = min(ties, key=lambda i: basis[i])
        _pivot(tab, d, basis, leave, entering)
    return NUMERICAL, max_iter


def _independent_rows(sf):
    """Indices of rows to keep: every slack row plus a maximal independent set of equalities."""
    keep = []
    basis = []
    for i in range(sf.m):
        if i in sf.slack_of:
            keep.append(i)
            continue
        v = sf.A[i].copy()
        norm = np.linalg.norm(v)
        for q in basis:
            v -= (q @ v) * q
        r = np.linalg.norm(v)
        if r > 1e-9 * max(norm, 1.0):
            basis.append(v / r)
            keep.append(i)
    return np.array(keep, dtype=int)


def solve(lp: LinearProgram, verbose=False) -> LpSolution:
    """Solve ``lp``; pivoting is deterministic so reruns are bit-identical.

    Tall problems (many more rows than variables) are solved through their
    dual, whose tableau has one row per variable.  The primal tableau is
    used whenever the dual route cannot certify an optimum.
    """
    n_bounds = int(np.isfinite(lp.lower).sum() + np.isfinite(lp.upper).sum())
    if lp.n_rows + n_bounds > DUAL_RATIO * (lp.n_vars + 1):
        sol = _solve_via_dual(lp, verbose)
        if sol is not None:
            return sol
    return _solve_primal(lp, verbose)


def _solve_via_dual(lp: LinearProgram, verbose):
    """max c x s.t. A x (<=|==) b  as  min b pi s.t. A' pi == c, pi_LE >= 0."""
    A, b, senses = lp.rows, lp.rhs, list(lp.senses)
    eye = np.eye(lp.n_vars)
    lo_idx = np.flatnonzero(np.isfinite(lp.lower))
    hi_idx = np.flatnonzero(np.isfinite(lp.upper))
    A = np.vstack([A, -eye[lo_idx], eye[hi_idx]])
    b = np.concatenate([b, -lp.lower[lo_idx], lp.upper[hi_idx]])
    senses += [LE] * (lo_idx.size + hi_idx.size)
    free = np.array([s == EQ for s in senses])
    dual = LinearProgram(
        objective=-b,
        rows=A.T.copy(),
        senses=(EQ,) * lp.n_vars,
        rhs=lp.objective.copy(),
        lower=np.where(free, -np.inf, 0.0),
        upper=np.full(b.size, np.inf),
    )
    sol = _solve_primal(dual, verbose)
    if sol.status == UNBOUNDED:
        return LpSolution(INFEASIBLE, iterations=sol.iterations)
    if sol.status != OPTIMAL:
        return None
    x = -sol.duals
    resid = lp.rows @ x - lp.rhs
    viol = np.where(np.array(lp.senses) == EQ, np.abs(resid), np.maximum(resid, 0.0))
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if (viol.size and viol.max() > FEAS_TOL * scale * 10) or np.any(x < lp.lower - FEAS_TOL * scale) \
            or np.any(x > lp.upper + FEAS_TOL * scale):
        return None
    x = np.clip(x, lp.lower, lp.upper)
    return LpSolution(
        OPTIMAL,
        x=x,
        duals=sol.x[: lp.n_rows].copy(),
        objective=float(lp.objective @ x),
        iterations=sol.iterations,
    )


def _solve_primal(lp: LinearProgram, verbose=False) -> LpSolution:
    sf = _StandardForm(lp)
    rows = _independent_rows(sf)
    A = sf.A[rows].copy()
    b = sf.b[rows].copy()
    m, n_cols = A.shape

    # rows whose slack cannot start basic get an artificial
    basis = [-1] * m
    art_rows = []
    for i in range(m):
        if b[i] < 0:
            A[i] = -A[i]
            b[i] = -b[i]
        slack = sf.slack_of.get(int(rows[i]))
        if slack is not None and A[i, slack] > 0:
            basis[i] = slack
        else:
            art_rows.append(i)
    n_art = len(art_rows)
    tab = np.zeros((m, n_cols + n_art + 1))
    tab[:, :n_cols] = A
    tab[:, -1] = b
    for a, i in enumerate(art_rows):
        tab[i, n_cols + a] = 1.0
        basis[i] = n_cols + a
    total_cols = n_cols + n_art
    max_iter = 50 * (m + total_cols) + 100
    iterations = 0
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))

    if n_art:
        c1 = np.zeros(total_cols + 1)
        c1[n_cols:total_cols] = -1.0
        d = c1 - c1[basis] @ tab
        d[-1] = 0.0
        status, it = _simplex(tab, d, basis, np.zeros(total_cols, bool), max_iter, verbose)
        iterations += it
        if status != OPTIMAL:
            return LpSolution(NUMERICAL, iterations=iterations)
        infeas = sum(tab[i, -1] for i in range(m) if basis[i] >= n_cols)
        if infeas > FEAS_TOL * scale:
            return LpSolution(INFEASIBLE, iterations=iterations)
        # drive zero-valued artificials out; rows where that fails are redundant
        keep = np.ones(m, bool)
        for i in range(m):
            if basis[i] < n_cols:
                continue
            cand = np.nonzero(np.abs(tab[i, :n_cols]) > 1e-7)[0]
            if cand.size:
                _pivot(tab, d, basis, i, int(cand[0]))
            else:
                keep[i] = False
        tab = tab[keep]
        basis = [basis[i] for i in range(m) if keep[i]]
        kept_rows = rows[keep]
    else:
        kept_rows = rows

    tab = np.hstack([tab[:, :n_cols], tab[:, -1:]])
    c2 = np.append(sf.c, 0.0)
    d = c2 - c2[basis] @ tab
    d[-1] = 0.0
    status, it = _simplex(tab, d, basis, np.zeros(n_cols, bool), max_iter, verbose)
    iterations += it
    if status != OPTIMAL:
        return LpSolution(status, iterations=iterations)

    # refactor from the original data for clean primal/dual values
    B = sf.A[np.ix_(kept_rows, basis)]
    try:
        u_B = np.linalg.solve(B, sf.b[kept_rows])
        pi_kept = np.linalg.solve(B.T, sf.c[basis])
    except np.linalg.LinAlgError:
        return LpSolution(NUMERICAL, iterations=iterations)
    u = np.zeros(n_cols)
    u[basis] = u_B
    pi = np.zeros(sf.m)
    pi[kept_rows] = pi_kept
    x = sf.recover(u)
    resid = lp.rows @ x - lp.rhs
    viol = np.where(np.array(lp.senses) == EQ, np.abs(resid), np.maximum(resid, 0.0))
    if viol.size and viol.max() > FEAS_TOL * scale * 10:
        # dropped equalities were inconsistent with the kept ones
        return LpSolution(INFEASIBLE, iterations=iterations)
    return LpSolution(
        OPTIMAL,
        x=x,
        duals=pi[: sf.n_orig_rows],
        objective=float(lp.objective @ x),
        iterations=iterations,
    )


def face_extent(lp: LinearProgram, value, direction):
    """(min, max) of ``direction @ x`` over the optimal face ``objective @ x == value``."""
    face = lp.with_row(lp.objective, EQ, value)
    direction = np.asarray(direction, dtype=float)
    bounds = []
    for sign in (-1.0, 1.0):
        sol = solve(face.with_objective(sign * direction))
        if sol.status == UNBOUNDED:
            bounds.append(np.inf)
        elif sol.status == OPTIMAL:
            bounds.append(sol.objective)
        else:
            raise NumericalError(f"optimal-face probe ended with status {sol.status}")
    return -bounds[0], bounds[1]


def probe_range(lp: LinearProgram, value, index):
    """(min, max) attainable by variable ``index`` among optimal solutions."""
    direction = np.zeros(lp.n_vars)
    direction[index] = 1.0
    return face_extent(lp, value, direction)
