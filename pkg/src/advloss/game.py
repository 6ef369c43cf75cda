"""Exact solvers for the two linear programs behind the surrogate losses.

The adversary game

    max_{q, v}  v + f.q   s.t.  L q >= v 1,  q in the simplex,

is what every surrogate loss evaluates; the predictor game

    min_p  max_i  (L^T p + f)_i   s.t.  p in the simplex,

is its dual and produces the randomized prediction.  Both are solved by
a dense two-phase primal simplex with Bland's rule; problem sizes are a
handful of rows, so there is no reason for anything fancier.  The slack
variable v is unbounded below in the raw formulation, which is handled
by shifting it with a bound it can never reach at an optimum (the
largest loss entry), making the feasible set compact.

``enumerate_vertices`` exhaustively lists the extreme points of the
adversary's feasible polytope by rank-complete equality subsystems.  It
is combinatorial and guarded, and exists as an independent oracle for
the simplex path, so the two must never be merged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from .errors import SolverFailure, TooLarge
from .matrices import validate_loss_matrix

_PIVOT_TOL = 1e-10
_FEAS_TOL = 1e-9


@dataclass
class GameSolution:
    """Optimal strategies and value of one side of the game.

    ``q`` is the worst-case label distribution (length k), ``p`` the
    predictor's randomized strategy over its options (length l), ``v``
    the slack variable at the optimum, and ``value`` the objective:
    ``v + f.q`` for the adversary game, ``v`` itself for the predictor
    game.
    """

    v: float
    value: float
    q: Optional[np.ndarray] = None
    p: Optional[np.ndarray] = None


@dataclass(frozen=True)
class PolytopeVertex:
    """An extreme point [q; v] with its tight constraint rows."""

    point: np.ndarray = field(repr=False)
    active_rows: tuple[int, ...]


class _Simplex:
    """Dense two-phase primal simplex, Bland's rule, for max c.x, Ax=b, x>=0."""

    def __init__(self, c, A, b, max_pivots):
        A = np.array(A, dtype=float)
        b = np.array(b, dtype=float)
        flip = b < 0
        A[flip] *= -1.0
        b[flip] = -b[flip]
        self.c = np.asarray(c, dtype=float)
        self.A = A
        self.b = b
        self.flip = flip
        self.m, self.n = A.shape
        self.max_pivots = max_pivots
        self.pivots = 0
        self.rows = list(range(self.m))  # surviving rows, original indexing

    def solve(self):
        m, n = self.m, self.n
        T = np.hstack([self.A, np.eye(m), self.b[:, None]])
        basis = list(range(n, n + m))

        # Phase 1: drive the artificial variables to zero.
        obj = np.zeros(n + m + 1)
        obj[n:n + m] = -1.0
        for i, bi in enumerate(basis):
            obj -= obj[bi] * T[i]
        self._pivot_loop(T, basis, obj, eligible=n + m)
        if obj[-1] < -1e-7:
            raise SolverFailure("linear program infeasible")
        T = self._evict_artificials(T, basis, n)

        # Phase 2: optimize the real objective; artificials stay out.
        obj = np.zeros(T.shape[1])
        obj[:n] = self.c
        for i, bi in enumerate(basis):
            obj -= obj[bi] * T[i]
        self._pivot_loop(T, basis, obj, eligible=n)

        return self._extract(basis)

    def _pivot_loop(self, T, basis, obj, eligible):
        while True:
            enter = -1
            for j in range(eligible):
                if obj[j] > _PIVOT_TOL:
                    enter = j
                    break
            if enter < 0:
                return
            ratios = np.full(T.shape[0], np.inf)
            positive = T[:, enter] > _PIVOT_TOL
            ratios[positive] = T[positive, -1] / T[positive, enter]
            best = ratios.min()
            if not np.isfinite(best):
                raise SolverFailure("linear program unbounded")
            leave = -1
            for i in range(T.shape[0]):
                if ratios[i] <= best + _PIVOT_TOL and (
                        leave < 0 or basis[i] < basis[leave]):
                    leave = i
            self.pivots += 1
            if self.pivots > self.max_pivots:
                raise SolverFailure(
                    f"pivot cap {self.max_pivots} exceeded on a "
                    f"{T.shape[0]}x{self.n} program")
            self._pivot(T, basis, obj, leave, enter)

    @staticmethod
    def _pivot(T, basis, obj, row, col):
        T[row] /= T[row, col]
        for i in range(T.shape[0]):
            if i != row and T[i, col] != 0.0:
                T[i] -= T[i, col] * T[row]
        if obj[col] != 0.0:
            obj -= obj[col] * T[row]
        basis[row] = col

    def _evict_artificials(self, T, basis, n):
        """Pivot leftover zero-level artificials out; drop redundant rows."""
        drop = []
        for i in range(len(basis)):
            if basis[i] < n:
                continue
            col = -1
            for j in range(n):
                if j not in basis and abs(T[i, j]) > _PIVOT_TOL:
                    col = j
                    break
            if col >= 0:
                dummy = np.zeros(T.shape[1])
                self._pivot(T, basis, dummy, i, col)
            else:
                drop.append(i)
        if drop:
            keep = [i for i in range(T.shape[0]) if i not in drop]
            T = T[keep]
            basis[:] = [basis[i] for i in keep]
            self.rows = [self.rows[i] for i in keep]
        return T

    def _extract(self, basis):
        rows = self.rows
        B = self.A[rows][:, basis]
        x = np.zeros(self.n)
        try:
            xb = np.linalg.solve(B, self.b[rows])
            yb = np.linalg.solve(B.T, self.c[basis])
        except np.linalg.LinAlgError as exc:
            raise SolverFailure(f"singular optimal basis: {exc}") from None
        x[basis] = xb
        duals = np.zeros(self.m)
        duals[rows] = yb
        duals[self.flip] *= -1.0
        return x, float(self.c @ x), duals


def solve_lp_max(c, A_eq, b_eq, max_pivots):
    """Maximize ``c.x`` subject to ``A_eq x = b_eq`` and ``x >= 0``.

    Returns ``(x, value, duals)`` with one dual multiplier per row.
    """
    return _Simplex(c, A_eq, b_eq, max_pivots).solve()


def default_pivot_cap(n_classes: int, n_options: int) -> int:
    return 10 * (n_classes + n_options + 2)


def solve_adversary_game(loss_matrix, f, max_pivots: Optional[int] = None) -> GameSolution:
    """Worst-case label distribution for potentials ``f``.

    Maximizes ``v + f.q`` subject to ``L q >= v 1`` and ``q`` in the
    simplex.  The returned ``p`` is the predictor strategy read off the
    optimal dual multipliers of the row constraints.
    """
    L = validate_loss_matrix(loss_matrix)
    f = np.asarray(f, dtype=float)
    l, k = L.shape
    if f.shape != (k,):
        raise SolverFailure(
            f"potentials shape {f.shape} does not match {k} loss columns")
    if max_pivots is None:
        max_pivots = default_pivot_cap(k, l)

    # x = [q, u, s] with u = v + shift >= 0; each row L_i.q >= v becomes
    # u - L_i.q + s_i = shift.
    shift = max(float(L.max()), 0.0)
    n = k + 1 + l
    A = np.zeros((l + 1, n))
    b = np.zeros(l + 1)
    A[:l, :k] = -L
    A[:l, k] = 1.0
    A[:l, k + 1:] = np.eye(l)
    b[:l] = shift
    A[l, :k] = 1.0
    b[l] = 1.0
    c = np.zeros(n)
    c[:k] = f
    c[k] = 1.0

    x, value, duals = solve_lp_max(c, A, b, max_pivots)
    q = np.maximum(x[:k], 0.0)
    v = x[k] - shift
    p = np.maximum(duals[:l], 0.0)
    total = p.sum()
    if total > 0:
        p = p / total
    return GameSolution(v=v, value=float(value - shift), q=q, p=p)


def solve_predictor_game(loss_matrix, f, max_pivots: Optional[int] = None) -> GameSolution:
    """Randomized prediction minimizing the worst-case column value.

    Minimizes ``max_i (L^T p + f)_i`` over ``p`` in the simplex; the
    optimum equals the adversary game's value (strong duality).
    """
    L = validate_loss_matrix(loss_matrix)
    f = np.asarray(f, dtype=float)
    l, k = L.shape
    if f.shape != (k,):
        raise SolverFailure(
            f"potentials shape {f.shape} does not match {k} loss columns")
    if max_pivots is None:
        max_pivots = default_pivot_cap(k, l)

    # x = [p, w, t] with w = v + shift >= 0; each column constraint
    # v >= (L^T p)_i + f_i becomes (L^T p)_i - w + t_i = -f_i - shift.
    shift = max(0.0, -float(f.max()))
    n = l + 1 + k
    A = np.zeros((k + 1, n))
    b = np.zeros(k + 1)
    A[:k, :l] = L.T
    A[:k, l] = -1.0
    A[:k, l + 1:] = np.eye(k)
    b[:k] = -f - shift
    A[k, :l] = 1.0
    b[k] = 1.0
    c = np.zeros(n)
    c[l] = -1.0

    x, value, _ = solve_lp_max(c, A, b, max_pivots)
    p = np.maximum(x[:l], 0.0)
    v = x[l] - shift
    return GameSolution(v=float(v), value=float(v), p=p)


def adversary_polytope(loss_matrix) -> tuple[np.ndarray, np.ndarray]:
    """Half-space form ``A [q; v] >= b`` of the adversary's feasible set.

    Rows in order: the l loss rows, the k non-negativity rows, then the
    two opposed sum-to-one rows.
    """
    L = validate_loss_matrix(loss_matrix)
    l, k = L.shape
    A = np.zeros((l + k + 2, k + 1))
    b = np.zeros(l + k + 2)
    A[:l, :k] = L
    A[:l, k] = -1.0
    A[l:l + k, :k] = np.eye(k)
    A[l + k, :k] = 1.0
    A[l + k + 1, :k] = -1.0
    b[l + k] = 1.0
    b[l + k + 1] = -1.0
    return A, b


def enumerate_vertices(loss_matrix) -> list[PolytopeVertex]:
    """All extreme points of the adversary polytope, each listed once.

    A point is a vertex exactly when the constraints tight at it have
    rank k+1, so it suffices to scan all square subsystems that include
    the sum-to-one row.  Exhaustive and intended as a test oracle; the
    guard keeps the combinatorics sane.
    """
    L = validate_loss_matrix(loss_matrix)
    l, k = L.shape
    if k + l > 20:
        raise TooLarge(f"vertex enumeration guarded to k + l <= 20, got {k + l}")

    A, b = adversary_polytope(L)
    sum_row = l + k
    points: list[np.ndarray] = []
    vertices: list[PolytopeVertex] = []
    for subset in combinations(range(l + k), k):
        rows = list(subset) + [sum_row]
        M = A[rows]
        try:
            point = np.linalg.solve(M, b[rows])
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.abs(M @ point - b[rows]) <= _FEAS_TOL):
            continue  # numerically near-singular system
        if np.any(A @ point < b - _FEAS_TOL):
            continue
        if any(np.allclose(point, seen, atol=1e-8, rtol=0.0) for seen in points):
            continue
        active = tuple(np.flatnonzero(np.abs(A @ point - b) <= _FEAS_TOL))
        if np.linalg.matrix_rank(A[list(active)]) != k + 1:
            continue
        points.append(point)
        vertices.append(PolytopeVertex(point=point, active_rows=active))
    return vertices
