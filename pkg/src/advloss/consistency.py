"""Numerical Fisher-consistency checks.

With potentials free to take any value (the all-measurable-functions
regime at a single input), minimizing the expected surrogate under a
known label distribution d must recover a Bayes-optimal answer for the
target loss.  This module optimizes the potentials directly, then
checks the optimality characterizations: the potential argmax lands
inside the Bayes set, potentials mirror the negated Bayes row of the
loss matrix up to a constant, and the prediction game's strategy
achieves the Bayes risk.

The objective g(f) = sum_y d_y AL(f, y) has subgradient q*(f) - d and
known minimum equal to the Bayes risk, so a target-value step rule
drives the gap to zero quickly on these piecewise-linear problems.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BudgetExceeded
from .game import solve_adversary_game, solve_lp_max, solve_predictor_game
from .losses import adversary_optimum
from .matrices import Abstain, LossSpec, build_loss_matrix


def bayes_set(loss_matrix, d, tol: float = 1e-12) -> list[int]:
    """1-based rows of the loss matrix minimizing expected loss under d."""
    L = np.asarray(loss_matrix, dtype=float)
    risks = L @ np.asarray(d, dtype=float)
    return [int(i) + 1 for i in np.flatnonzero(risks <= risks.min() + tol)]


def _check_distribution(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if d.ndim != 1 or d.size < 2:
        raise ValueError(f"need a distribution over >= 2 classes, got {d.shape}")
    if np.any(d <= 0):
        raise ValueError("distribution entries must be strictly positive")
    if abs(d.sum() - 1.0) > 1e-9:
        raise ValueError(f"distribution sums to {d.sum()}, expected 1")
    return d


def minimize_expected_al(spec: LossSpec, d, budget: int = 20000,
                         tol: float = 1e-9, restarts: int = 10,
                         seed: int = 0) -> np.ndarray:
    """Potentials minimizing sum_y d_y AL(f, y) over all of R^k.

    Two phases, both driven only by the loss's adversary oracle:
    target-value subgradient steps toward the known optimum (the Bayes
    risk), then, if those stall short of ``tol``, a cutting-plane loop
    over the supporting hyperplanes collected so far, which terminates
    finitely on these piecewise-linear objectives.  Random restarts
    rerun both phases from fresh points.  Raises BudgetExceeded when no
    run reaches ``tol``.
    """
    d = _check_distribution(d)
    k = d.shape[0]
    L = build_loss_matrix(spec, k)
    bayes_risk = float((L @ d).min())
    rng = np.random.default_rng(seed)

    best_f: Optional[np.ndarray] = None
    best_gap = np.inf
    cuts: dict[tuple, tuple[np.ndarray, float]] = {}  # distinct (q, v) supports

    def probe(f: np.ndarray):
        nonlocal best_f, best_gap
        objective, q = adversary_optimum(spec, f)
        gap = (objective - d @ f) - bayes_risk
        if gap < best_gap:
            best_gap = gap
            best_f = f.copy()
        cuts[tuple(np.round(q, 12))] = (q, objective - float(q @ f))
        return gap, q

    polyak_steps = min(budget, 2000)
    plane_steps = min(budget, 500)
    for attempt in range(restarts + 1):
        f = (np.zeros(k) if attempt == 0
             else rng.normal(scale=1.0 + attempt, size=k))
        stall = 0
        last_best = np.inf
        for _ in range(polyak_steps):
            gap, q = probe(f)
            if best_gap <= tol:
                return best_f
            if best_gap > last_best - 1e-8:
                stall += 1
                if stall >= 100:
                    break
            else:
                stall = 0
                last_best = best_gap
            direction = q - d
            norm_sq = float(direction @ direction)
            if norm_sq < 1e-24:
                break  # zero subgradient: f is optimal
            f = f - (gap / norm_sq) * direction
        for _ in range(plane_steps):
            f = _cut_model_argmin(list(cuts.values()), d, float(L.max()))
            probe(f)
            if best_gap <= tol:
                return best_f
    if best_gap <= tol:
        return best_f
    raise BudgetExceeded(
        f"expected-surrogate gap {best_gap:.3e} > {tol:.1e} after "
        f"{restarts + 1} runs of {budget} steps")


def _cut_model_argmin(cuts, d, loss_max: float) -> np.ndarray:
    """Minimizer of the current cutting-plane model over a safe box.

    The model is max over collected cuts of (q - d).f + v; since some
    exact optimizer lies in ||f||_inf <= loss_max/2 + 1 (potentials are
    translation invariant), the box never cuts off the optimum.
    """
    k = d.shape[0]
    radius = 0.5 * loss_max + 1.0
    span = 2.0 * radius
    bound = span + loss_max + 1.0  # |model value| cap over the box
    m = len(cuts)
    # variables: [h (k), s (1), cut slacks (m), box slacks (k)]
    n = k + 1 + m + k
    A = np.zeros((m + k, n))
    b = np.zeros(m + k)
    for i, (q, v) in enumerate(cuts):
        grad = q - d
        A[i, :k] = grad
        A[i, k] = -1.0
        A[i, k + 1 + i] = 1.0
        b[i] = -v - bound + radius * float(grad.sum())
    A[m:, :k] = np.eye(k)
    A[m:, k + 1 + m:] = np.eye(k)
    b[m:] = span
    c = np.zeros(n)
    c[k] = -1.0
    x, _, _ = solve_lp_max(c, A, b, max_pivots=60 * (m + k + 2))
    return x[:k] - radius


def nearest_optimal_adversary(loss_matrix, f, d, opt_slack: float = 1e-9
                              ) -> np.ndarray:
    """Adversary distribution on the game's optimal face closest to d.

    Minimizes the sup-norm distance to d over near-optimal feasible
    points; used to certify the stationarity of optimized potentials.
    """
    L = np.asarray(loss_matrix, dtype=float)
    f = np.asarray(f, dtype=float)
    d = np.asarray(d, dtype=float)
    l, k = L.shape
    opt = solve_adversary_game(L, f).value
    shift = max(float(L.max()), 0.0)

    # variables [q (k), u (1), t (1), slacks (l + 1 + 2k)]
    n_slack = l + 1 + 2 * k
    n = k + 2 + n_slack
    rows = l + 1 + 2 * k + 1
    A = np.zeros((rows, n))
    b = np.zeros(rows)
    # game feasibility: -Lq + u + s_i = shift
    A[:l, :k] = -L
    A[:l, k] = 1.0
    A[:l, k + 2:k + 2 + l] = np.eye(l)
    b[:l] = shift
    # near-optimality: f.q + u - surplus = opt + shift - slack
    A[l, :k] = f
    A[l, k] = 1.0
    A[l, k + 2 + l] = -1.0
    b[l] = opt + shift - opt_slack
    # |q - d| <= t, split into two one-sided rows per coordinate
    base = l + 1
    scol = k + 2 + l + 1
    for i in range(k):
        A[base + i, i] = 1.0
        A[base + i, k + 1] = -1.0
        A[base + i, scol + i] = 1.0
        b[base + i] = d[i]
        A[base + k + i, i] = -1.0
        A[base + k + i, k + 1] = -1.0
        A[base + k + i, scol + k + i] = 1.0
        b[base + k + i] = -d[i]
    A[-1, :k] = 1.0
    b[-1] = 1.0
    c = np.zeros(n)
    c[k + 1] = -1.0
    x, _, _ = solve_lp_max(c, A, b, max_pivots=200 * (k + l + 2))
    return np.maximum(x[:k], 0.0)


@dataclass
class TrialResult:
    d: np.ndarray = field(repr=False)
    argmax_set: list[int]
    bayes: list[int]
    reflective_residual: float
    bayes_value_error: Optional[float]
    ok: bool

    def line(self) -> str:
        d = "[" + " ".join(f"{v:.4f}" for v in self.d) + "]"
        verdict = "ok" if self.ok else "VIOLATION"
        extra = ("" if self.bayes_value_error is None
                 else f" bayes_value_err={self.bayes_value_error:.2e}")
        return (f"d={d} argmax={self.argmax_set} bayes={self.bayes} "
                f"reflective={self.reflective_residual:.2e}{extra} {verdict}")


@dataclass
class ConsistencyReport:
    spec: LossSpec
    n_classes: int
    trials: list[TrialResult]

    @property
    def violations(self) -> int:
        return sum(not t.ok for t in self.trials)

    def to_text(self) -> str:
        head = (f"consistency check: {self.spec!r}, k={self.n_classes}, "
                f"{len(self.trials)} trials, {self.violations} violation(s)")
        return "\n".join([head] + [t.line() for t in self.trials])


def check_consistency(spec: LossSpec, n_classes: int, trials: int,
                      seed: int = 0, tol: float = 1e-3,
                      reflective_tol: float = 5e-3,
                      budget: int = 20000) -> ConsistencyReport:
    """Optimize potentials against random true distributions and verify.

    Each trial draws a strictly positive d with a unique Bayes-optimal
    option, minimizes the expected surrogate, and checks:

    - potential-argmax losses: every near-maximal potential index lies
      in the Bayes set, and potentials reflect the negated Bayes row of
      the loss matrix up to a constant;
    - abstention: the prediction game's optimal strategy achieves the
      Bayes risk under d (options and labels differ, so the argmax
      check does not apply), plus the same reflective structure.

    Violations are recorded in the report, never raised.
    """
    k = int(n_classes)
    L = build_loss_matrix(spec, k)
    rng = np.random.default_rng(seed)
    results = []
    for _ in range(trials):
        d = _draw_unique_bayes(rng, L, k)
        f = minimize_expected_al(spec, d, budget=budget,
                                 seed=int(rng.integers(2 ** 31)))
        bayes = bayes_set(L, d, tol=1e-9)
        best_row = bayes[0] - 1
        mirrored = f + L[best_row]  # constant over classes at an exact optimum
        reflective = float(mirrored.max() - mirrored.min())

        if isinstance(spec, Abstain):
            strategy = solve_predictor_game(L, f).p
            value_err = abs(float(strategy @ (L @ d)) - float((L @ d).min()))
            ok = value_err <= tol and reflective <= reflective_tol
            argmax_set = [int(np.argmax(f)) + 1]
            results.append(TrialResult(d, argmax_set, bayes, reflective,
                                       value_err, ok))
        else:
            argmax_set = [int(i) + 1 for i in
                          np.flatnonzero(f >= f.max() - tol)]
            ok = (set(argmax_set) <= set(bayes)
                  and reflective <= reflective_tol)
            results.append(TrialResult(d, argmax_set, bayes, reflective,
                                       None, ok))
    return ConsistencyReport(spec=spec, n_classes=k, trials=results)


def _draw_unique_bayes(rng, L, k, min_mass: float = 0.01,
                       min_margin: float = 1e-3) -> np.ndarray:
    """Strictly positive d whose Bayes-optimal option is unique."""
    while True:
        d = rng.dirichlet(np.ones(k))
        if d.min() < min_mass:
            continue
        risks = np.sort(L @ d)
        if risks[1] - risks[0] >= min_margin:
            return d
