"""Feasibility region for 1->2 asymmetric approximate cloning and the leakage lower bound.

A cloner whose two output branches act like global depolarizing channels with
parameters (p1, p2) exists only inside a feasibility region in the unit
square. Two forms of that region are implemented: one involving a square root
(undefined where its discriminant is negative, including the whole symmetric
line) and a quadratic form. The quadratic form is authoritative here: its
qubit reductions check out by hand (symmetric line p >= 1/4, boundary root
0.305573 at p1 = 0.2) while the square-root form is undefined at exactly the
operating points of interest, so the latter is evaluated only on its real
domain and only diagnostically.

Branch 1 is handed to the legitimate receiver (its depolarization bounds the
detectable disturbance), branch 2 feeds the eavesdropper, so the best
undetected leakage comes from minimizing p2 subject to a disturbance cap on p1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import trace_distance
from .states import CqEnsemble

__all__ = [
    "CloningBoundResult",
    "region_sqrt_form",
    "region_quadratic_form",
    "quadratic_coefficients",
    "min_feasible_p2",
    "cloning_lower_bound",
    "lower_bound_sweep",
    "region_disagreement_report",
]

FEAS_TOL = 1e-12


def quadratic_coefficients(d: int) -> tuple[float, float, float]:
    """(diagonal a, off-diagonal b, linear c) of the quadratic feasibility form."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    a = 2.0 * d * d - 1.0 - d**4 / 4.0
    b = 1.0 - d**4 / 4.0
    c = -2.0 - d * d
    return a, b, c


def region_quadratic_form(p1: float, p2: float, d: int) -> tuple[bool, float]:
    """Evaluate the quadratic feasibility constraint q(p1, p2) <= 0.

    Returns (satisfied, slack) where slack is the value of q; feasible points
    have slack <= 1e-12.
    """
    _check_point(p1, p2)
    a, b, c = quadratic_coefficients(d)
    q = a * (p1 * p1 + p2 * p2) + 2.0 * b * p1 * p2 + c * (p1 + p2) + 3.0
    return q <= FEAS_TOL, q


def region_sqrt_form(p1: float, p2: float, d: int) -> tuple[bool, bool, float]:
    """Evaluate the square-root form of the region on its real domain.

    Returns (defined, satisfied, lhs_minus_rhs). When the discriminant is
    negative the form is undefined and no feasibility judgement is made.
    """
    _check_point(p1, p2)
    if d < 2:
        raise ValueError("dimension must be at least 2")
    disc = d * d * (p1 - p2) ** 2 - 4.0 * (1.0 - p1) * (1.0 - p2)
    if disc < -FEAS_TOL:
        return False, False, float("nan")
    root = np.sqrt(max(disc, 0.0))
    lhs = d / 2.0 * (d * (2.0 - p1 - p2) + root) - (2.0 - p1 - p2)
    diff = lhs - (d * d - 1.0)
    return True, diff <= FEAS_TOL, diff


def min_feasible_p2(p1: float, d: int) -> float | None:
    """Smallest p2 in [0, 1] satisfying the quadratic constraint at fixed p1.

    Returns None when no p2 in [0, 1] is feasible. Handles both orientations
    of the parabola in p2 (the diagonal coefficient changes sign at d = 3).
    """
    a, b, c = quadratic_coefficients(d)
    # q(p2) = a p2^2 + beta p2 + gamma at fixed p1
    beta = 2.0 * b * p1 + c
    gamma = a * p1 * p1 + c * p1 + 3.0
    if abs(a) < 1e-30:
        if abs(beta) < 1e-30:
            return 0.0 if gamma <= FEAS_TOL else None
        root = -gamma / beta
        if beta < 0.0:
            lo = max(root, 0.0)
            return lo if lo <= 1.0 else None
        return 0.0 if root >= 0.0 else None
    disc = beta * beta - 4.0 * a * gamma
    if disc < 0.0:
        # no real roots: sign of q is the sign of a everywhere
        return 0.0 if a < 0.0 else None
    root_lo = (-beta - np.sqrt(disc)) / (2.0 * a)
    root_hi = (-beta + np.sqrt(disc)) / (2.0 * a)
    root_lo, root_hi = min(root_lo, root_hi), max(root_lo, root_hi)
    if a > 0.0:
        # feasible between the roots
        lo = max(root_lo, 0.0)
        if lo <= min(root_hi, 1.0) + FEAS_TOL:
            return min(lo, 1.0)
        return None
    # a < 0: feasible outside the open interval (root_lo, root_hi)
    if root_lo >= -FEAS_TOL:
        return 0.0
    if root_hi <= 1.0 + FEAS_TOL:
        return min(max(root_hi, 0.0), 1.0)
    return None


@dataclass(frozen=True)
class CloningBoundResult:
    """Solution of the leakage lower-bound program at a disturbance level alpha."""

    p1_star: float
    p2_star: float
    lower_bits: float
    feasible: bool
    p1_cap: float
    alpha: float
    q_bits: float
    slack: float  # quadratic-form value at the optimum (<= 1e-12 when feasible)

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "p1_star": self.p1_star,
            "p2_star": self.p2_star,
            "lower_bits": self.lower_bits,
            "feasible": self.feasible,
            "p1_cap": self.p1_cap,
            "q_bits": self.q_bits,
            "slack": self.slack,
        }


def disturbance_cap(e: CqEnsemble, alpha: float) -> float:
    """Largest p1 keeping the receiver-branch disturbance below alpha for every state.

    The cap is min_x alpha / ||I/d - rho^x||_1n; a maximally mixed encoding
    state makes its constraint vacuous (zero denominator).
    """
    d = e.dim
    eye = np.eye(d, dtype=complex) / d
    cap = float("inf")
    for s in e.states:
        denom = trace_distance(eye, s.mat)
        if denom <= 1e-12:
            continue
        cap = min(cap, alpha / denom)
    return min(cap, 1.0)


def cloning_lower_bound(
    e: CqEnsemble,
    alpha: float,
    q_bits: float,
    grid: int = 256,
    refine_iters: int = 80,
) -> CloningBoundResult:
    """Minimize the eavesdropper-branch depolarization p2 under the alpha cap on p1.

    Scans a coarse p1 grid over [0, p1_cap] and refines around the best cell
    by golden-section search (the feasible set is convex for qubits; for
    d > 2 the result is a best-found point without optimality guarantees).
    lower_bits = log2(p2* + (1 - p2*) 2^q_bits).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if q_bits < 0.0:
        raise ValueError("q_bits must be non-negative")
    d = e.dim
    cap = disturbance_cap(e, alpha)

    def objective(p1: float) -> float:
        p2 = min_feasible_p2(p1, d)
        return p2 if p2 is not None else float("inf")

    points = np.linspace(0.0, cap, grid) if cap > 0 else np.array([0.0])
    values = np.array([objective(p) for p in points])
    best_idx = int(np.argmin(values))

    lo = points[max(best_idx - 1, 0)]
    hi = points[min(best_idx + 1, len(points) - 1)]
    best_p1, best_p2 = float(points[best_idx]), float(values[best_idx])
    if hi > lo and np.isfinite(best_p2):
        gold = (np.sqrt(5.0) - 1.0) / 2.0
        x1 = hi - gold * (hi - lo)
        x2 = lo + gold * (hi - lo)
        f1, f2 = objective(x1), objective(x2)
        for _ in range(refine_iters):
            if f1 <= f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - gold * (hi - lo)
                f1 = objective(x1)
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + gold * (hi - lo)
                f2 = objective(x2)
        for cand, val in ((x1, f1), (x2, f2)):
            if val < best_p2 or (val == best_p2 and cand < best_p1):
                best_p1, best_p2 = float(cand), float(val)

    if not np.isfinite(best_p2):
        return CloningBoundResult(
            p1_star=float("nan"),
            p2_star=float("nan"),
            lower_bits=0.0,
            feasible=False,
            p1_cap=cap,
            alpha=alpha,
            q_bits=q_bits,
            slack=float("nan"),
        )
    _, slack = region_quadratic_form(best_p1, best_p2, d)
    bits = q_bits if best_p2 == 0.0 else float(
        np.log2(best_p2 + (1.0 - best_p2) * 2.0**q_bits)
    )
    return CloningBoundResult(
        p1_star=best_p1,
        p2_star=best_p2,
        lower_bits=bits,
        feasible=True,
        p1_cap=cap,
        alpha=alpha,
        q_bits=q_bits,
        slack=slack,
    )


def lower_bound_sweep(e: CqEnsemble, alphas, q_bits: float) -> list[CloningBoundResult]:
    """Lower bound at each alpha, ordered as given."""
    return [cloning_lower_bound(e, float(a), q_bits) for a in alphas]


def region_disagreement_report(d: int = 2, grid: int = 200) -> dict:
    """Compare the two printed region forms over a grid (diagnostic, no judgement).

    Counts the points where the square-root form is defined and how often its
    verdict differs from the quadratic form's. The two do not algebraically
    agree; this report records the mismatch instead of resolving it.
    """
    pts = np.linspace(0.0, 1.0, grid)
    defined = 0
    both_feasible = 0
    sqrt_only = 0
    quad_only = 0
    for p1 in pts:
        for p2 in pts:
            ok_def, ok_sqrt, _ = region_sqrt_form(float(p1), float(p2), d)
            ok_quad, _ = region_quadratic_form(float(p1), float(p2), d)
            if not ok_def:
                continue
            defined += 1
            if ok_sqrt and ok_quad:
                both_feasible += 1
            elif ok_sqrt:
                sqrt_only += 1
            elif ok_quad:
                quad_only += 1
    return {
        "dim": d,
        "grid": grid,
        "points": grid * grid,
        "sqrt_defined": defined,
        "agree_feasible": both_feasible,
        "sqrt_only_feasible": sqrt_only,
        "quad_only_feasible": quad_only,
    }


def _check_point(p1: float, p2: float) -> None:
    if not (0.0 <= p1 <= 1.0 and 0.0 <= p2 <= 1.0):
        raise ValueError(f"(p1, p2) must lie in the unit square, got ({p1}, {p2})")
