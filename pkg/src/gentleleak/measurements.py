"""POVMs, measurement implementations, and (alpha, delta)-gentleness certification.

A POVM only fixes outcome statistics; the post-measurement state needs an
implementation {B_y} with B_y† B_y = F_y. Gentleness of a measurement is a
property of one implementation: with probability at least 1 - delta over
outcomes, the post-measurement state stays within trace distance alpha of
every state in the protected set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOLS,
    SchemaError,
    as_complex_matrix,
    as_hermitian,
    eig_hermitian,
    is_unitary,
    matrix_from_json,
    matrix_to_json,
    psd_sqrt,
    trace_distance,
    trace_norm,
)
from .states import CqEnsemble, DensityOperator, average_state

__all__ = [
    "ZERO_PROB",
    "ZeroProbabilityOutcome",
    "Povm",
    "PovmImplementation",
    "GentlenessSpec",
    "GentlenessCertificate",
    "GentleConstruction",
    "EpsilonCalibration",
    "born_probabilities",
    "post_measurement_state",
    "certify_gentle",
    "gentle_povm",
    "max_certified_epsilon",
    "projective_povm",
    "first_order_disturbance",
    "povm_to_json",
    "povm_from_json",
]

# Outcomes at or below this probability are excluded from disturbance events;
# their post-measurement state is a 0/0 expression.
ZERO_PROB = 1e-12


class ZeroProbabilityOutcome(ValueError):
    """Requested the post-measurement state of an outcome that cannot occur."""


@dataclass(frozen=True)
class Povm:
    """Positive operators {F_y} summing to the identity."""

    elements: tuple[np.ndarray, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        elems = tuple(as_hermitian(f) for f in self.elements)
        if not elems:
            raise ValueError("POVM needs at least one element")
        d = elems[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for i, f in enumerate(elems):
            if f.shape[0] != d:
                raise ValueError(f"element {i} has dimension {f.shape[0]}, expected {d}")
            w, _ = eig_hermitian(f)
            if w[-1] < -DEFAULT_TOLS.psd:
                raise ValueError(f"element {i} is not PSD: min eigenvalue {w[-1]:.3e}")
            total += f
        resid = np.max(np.abs(total - np.eye(d)))
        if resid > DEFAULT_TOLS.completeness:
            raise ValueError(f"POVM completeness residual {resid:.3e}")
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(len(elems)))
        if len(labels) != len(elems):
            raise ValueError("labels must align with elements")
        for f in elems:
            f.flags.writeable = False
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class PovmImplementation:
    """Operators {B_y} with B_y† B_y = F_y, aligned with a Povm."""

    povm: Povm
    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(as_complex_matrix(b) for b in self.operators)
        if len(ops) != len(self.povm):
            raise ValueError("one operator per POVM element required")
        for i, (b, f) in enumerate(zip(ops, self.povm.elements)):
            resid = np.max(np.abs(b.conj().T @ b - f))
            if resid > DEFAULT_TOLS.completeness:
                raise ValueError(f"operator {i}: B†B differs from F by {resid:.3e}")
        for b in ops:
            b.flags.writeable = False
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.povm.dim

    def __len__(self) -> int:
        return len(self.operators)


@dataclass(frozen=True)
class GentlenessSpec:
    """Detection-avoidance budget: disturbance cap alpha, exception probability delta."""

    alpha: float
    delta: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must be in [0, 1], got {self.delta}")


def born_probabilities(e: CqEnsemble, povm: Povm) -> np.ndarray:
    """Outcome distribution P[y | x] = tr(rho^x F_y), shape (outcomes, labels).

    Columns sum to one; entries are clipped to [0, 1] after a -1e-10 check.
    """
    if povm.dim != e.dim:
        raise ValueError(f"dimension mismatch: POVM {povm.dim}, ensemble {e.dim}")
    f = np.stack(povm.elements)
    p = np.einsum("yij,xji->yx", f, e.state_mats()).real
    if np.min(p) < -1e-10:
        raise ValueError(f"negative Born probability {np.min(p):.3e}")
    colsums = p.sum(axis=0)
    if np.max(np.abs(colsums - 1.0)) > DEFAULT_TOLS.completeness:
        raise ValueError("Born columns do not sum to 1; POVM incomplete?")
    return np.clip(p, 0.0, 1.0)


def post_measurement_state(
    rho: DensityOperator, impl: PovmImplementation, y: int
) -> DensityOperator:
    """Collapsed state B_y rho B_y† / tr(rho F_y) after observing outcome y."""
    if rho.dim != impl.dim:
        raise ValueError("dimension mismatch between state and implementation")
    b = impl.operators[y]
    out = b @ rho.mat @ b.conj().T
    prob = float(np.trace(out).real)
    if prob <= ZERO_PROB:
        raise ZeroProbabilityOutcome(
            f"outcome {y} has probability {prob:.3e} <= {ZERO_PROB}; post state undefined"
        )
    return DensityOperator(out / prob)


@dataclass(frozen=True)
class GentlenessCertificate:
    """Result of checking one implementation against an (alpha, delta) budget.

    worst_prob is the probability of the all-states-close event under the
    least favorable driving state (per-state mode) or under the ensemble
    average (average-state mode). worst_disturbance is the largest observed
    post-measurement deviation over outcomes and states.
    """

    certified: bool
    worst_prob: float
    worst_disturbance: float
    mode: str
    outcome_labels: tuple[str, ...]
    outcome_good: tuple[bool, ...]
    outcome_disturbance: tuple[float, ...]  # max over states; -1 when never triggered
    outcome_probs: np.ndarray  # (outcomes, states)

    def to_json(self) -> dict:
        return {
            "certified": self.certified,
            "worst_prob": self.worst_prob,
            "worst_disturbance": self.worst_disturbance,
            "mode": self.mode,
            "outcomes": [
                {
                    "label": lab,
                    "good": good,
                    "max_disturbance": dist if dist >= 0 else None,
                    "probabilities": [float(p) for p in probs],
                }
                for lab, good, dist, probs in zip(
                    self.outcome_labels,
                    self.outcome_good,
                    self.outcome_disturbance,
                    self.outcome_probs,
                )
            ],
        }


def certify_gentle(
    e: CqEnsemble,
    impl: PovmImplementation,
    spec: GentlenessSpec,
    mode: str = "per-state",
) -> GentlenessCertificate:
    """Decide whether an implementation meets the (alpha, delta) budget on the ensemble.

    An outcome is good when every ensemble state that can produce it stays
    within alpha of itself after the collapse. ``per-state`` mode scores the
    good-event probability under each state separately and takes the minimum
    (never over-certifies); ``average-state`` draws outcomes from the mean state.
    """
    if mode not in ("per-state", "average-state"):
        raise ValueError(f"unknown mode {mode!r}")
    probs = born_probabilities(e, impl.povm)  # (outcomes, states)
    n_out = len(impl)

    good = []
    dists = []
    for y in range(n_out):
        worst = -1.0
        ok = True
        for k, s in enumerate(e.states):
            if probs[y, k] <= ZERO_PROB:
                continue
            dist = trace_distance(post_measurement_state(s, impl, y).mat, s.mat)
            worst = max(worst, dist)
            # 1e-12 slack so exactly-gentle branches survive roundoff at alpha = 0
            if dist > spec.alpha + 1e-12:
                ok = False
        good.append(ok)
        dists.append(worst)

    good_arr = np.array(good)
    if mode == "per-state":
        per_state = probs[good_arr, :].sum(axis=0) if good_arr.any() else np.zeros(len(e))
        worst_prob = float(per_state.min())
    else:
        weights = probs @ e.probs  # outcome distribution under the average state
        worst_prob = float(weights[good_arr].sum()) if good_arr.any() else 0.0

    return GentlenessCertificate(
        certified=bool(worst_prob >= 1.0 - spec.delta - 1e-12),
        worst_prob=worst_prob,
        worst_disturbance=max((x for x in dists if x >= 0), default=0.0),
        mode=mode,
        outcome_labels=impl.povm.labels,
        outcome_good=tuple(good),
        outcome_disturbance=tuple(dists),
        outcome_probs=probs,
    )


@dataclass(frozen=True)
class GentleConstruction:
    """Three-outcome weak probe of an operator M with 0 <= M <= I.

    The implementation is {B+, B-, B0} with
        B+ = sqrt((1 - 2 eps^2)/2) I + eps M,
        B- = sqrt((1 - 2 eps^2)/2) I - eps M,
        B0 = sqrt(2) eps (I - M^2)^(1/2),
    all Hermitian, so B† B = B B† and the outcome operators sum to I exactly.
    """

    probe: np.ndarray
    epsilon: float
    implementation: PovmImplementation


def gentle_povm(m, epsilon: float, tol: float = 1e-9) -> GentleConstruction:
    """Build the three-outcome gentle probe for operator m at strength epsilon.

    Requires 0 <= m <= I (within ``tol``) and epsilon <= 1/10.
    """
    a = as_hermitian(m)
    if not 0.0 <= epsilon <= 0.1:
        raise ValueError(f"epsilon must be in [0, 0.1], got {epsilon}")
    w, _ = eig_hermitian(a)
    if w[-1] < -tol or w[0] > 1.0 + tol:
        raise ValueError(f"probe eigenvalues must lie in [0, 1], got [{w[-1]:.3e}, {w[0]:.3e}]")
    d = a.shape[0]
    eye = np.eye(d, dtype=complex)
    c = np.sqrt((1.0 - 2.0 * epsilon**2) / 2.0)
    b_plus = c * eye + epsilon * a
    b_minus = c * eye - epsilon * a
    gap = eye - a @ a
    # clip roundoff so the square root stays defined at the M = I boundary
    b_zero = np.sqrt(2.0) * epsilon * psd_sqrt((gap + gap.conj().T) / 2.0, tol=tol)
    povm = Povm(
        (b_plus @ b_plus, b_minus @ b_minus, b_zero @ b_zero), labels=("+", "-", "0")
    )
    impl = PovmImplementation(povm, (b_plus, b_minus, b_zero))
    return GentleConstruction(probe=a, epsilon=epsilon, implementation=impl)


def first_order_disturbance(m, rho: DensityOperator, epsilon: float) -> float:
    """Leading-order post-measurement deviation of the '+' branch of the probe.

    eps * sqrt(2/(1-2 eps^2)) * || M rho + rho M - 2 tr(rho M) rho ||_1 / 2.
    The normalized expansion requires the minus sign on the trace term (the
    plus-signed variant is not traceless, so it cannot be a difference of
    states); exact disturbances in tests are checked against this form.
    """
    a = as_hermitian(m)
    lead = a @ rho.mat + rho.mat @ a - 2.0 * np.trace(rho.mat @ a).real * rho.mat
    return float(epsilon * np.sqrt(2.0 / (1.0 - 2.0 * epsilon**2)) * 0.5 * trace_norm(lead))


@dataclass(frozen=True)
class EpsilonCalibration:
    """Largest certified probe strength for a given budget, with the analytic cap.

    ``epsilon`` comes from bisecting the numerical certifier over [0, 1/10];
    ``analytic_cap`` is min(sqrt(delta / (2 (1 - tr(M^2 rho)))), 1/10) with rho
    the ensemble average, the non-constructive sufficient bound. ``capped``
    applies the analytic cap on top of the certified value.
    """

    epsilon: float
    analytic_cap: float

    @property
    def capped(self) -> float:
        return min(self.epsilon, self.analytic_cap)


def max_certified_epsilon(
    m,
    spec: GentlenessSpec,
    e: CqEnsemble,
    mode: str = "per-state",
    iterations: int = 31,
) -> EpsilonCalibration:
    """Bisect for the largest epsilon whose gentle probe certifies at (alpha, delta)."""
    a = as_hermitian(m)
    avg = average_state(e).mat
    slack = 1.0 - float(np.trace(a @ a @ avg).real)
    if slack <= 1e-15:
        cap = 0.1
    else:
        cap = min(float(np.sqrt(max(spec.delta, 0.0) / (2.0 * slack))), 0.1)

    def certifies(eps: float) -> bool:
        if eps == 0.0:
            return True
        return certify_gentle(e, gentle_povm(a, eps).implementation, spec, mode).certified

    if certifies(0.1):
        return EpsilonCalibration(epsilon=0.1, analytic_cap=cap)
    lo, hi = 0.0, 0.1
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if certifies(mid):
            lo = mid
        else:
            hi = mid
    return EpsilonCalibration(epsilon=lo, analytic_cap=cap)


def projective_povm(basis) -> PovmImplementation:
    """Rank-one projective measurement onto the columns of a unitary basis; B_y = F_y."""
    u = as_complex_matrix(basis)
    if not is_unitary(u):
        raise ValueError("basis matrix is not unitary")
    d = u.shape[0]
    projs = tuple(np.outer(u[:, j], u[:, j].conj()) for j in range(d))
    povm = Povm(projs)
    return PovmImplementation(povm, projs)


def povm_to_json(impl_or_povm) -> dict:
    if isinstance(impl_or_povm, PovmImplementation):
        povm, impl = impl_or_povm.povm, impl_or_povm
    else:
        povm, impl = impl_or_povm, None
    doc = {
        "labels": list(povm.labels),
        "elements": [matrix_to_json(f) for f in povm.elements],
    }
    if impl is not None:
        doc["implementation"] = [matrix_to_json(b) for b in impl.operators]
    return doc


def povm_from_json(doc) -> tuple[Povm, PovmImplementation | None]:
    """Parse the POVM schema; the implementation block is optional."""
    if not isinstance(doc, dict) or "elements" not in doc:
        raise SchemaError("POVM document needs an 'elements' list")
    elements = doc["elements"]
    if not isinstance(elements, list) or not elements:
        raise SchemaError("'elements' must be a non-empty list")
    mats = []
    for i, raw in enumerate(elements):
        try:
            mats.append(matrix_from_json(raw))
        except SchemaError as exc:
            raise SchemaError(f"element {i}: {exc}") from exc
    labels = tuple(str(x) for x in doc.get("labels", []) or ())
    try:
        povm = Povm(tuple(mats), labels)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    impl = None
    if "implementation" in doc:
        ops = doc["implementation"]
        if not isinstance(ops, list) or len(ops) != len(mats):
            raise SchemaError("'implementation' must list one operator per element")
        try:
            impl = PovmImplementation(povm, tuple(matrix_from_json(b) for b in ops))
        except (SchemaError, ValueError) as exc:
            raise SchemaError(f"implementation: {exc}") from exc
    return povm, impl
