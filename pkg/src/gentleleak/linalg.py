"""Dense complex linear algebra for small Hermitian problems (d <= ~16).

Everything operates on plain ``numpy`` arrays of ``complex128``. The
eigensolver is a cyclic Jacobi iteration with complex rotations, which is
dependency-free and numerically robust at the dimensions this package
targets. ``numpy.linalg`` is deliberately not used for the production
eigenpath; tests cross-check against it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOLS",
    "ConvergenceError",
    "NotPsdError",
    "SchemaError",
    "as_complex_matrix",
    "as_hermitian",
    "eig_hermitian",
    "trace_norm",
    "trace_distance",
    "operator_abs",
    "psd_sqrt",
    "psd_inv_sqrt",
    "positive_part",
    "is_psd",
    "commutator",
    "is_unitary",
    "haar_unitary",
    "random_hermitian",
    "random_contraction",
    "random_density",
    "matrix_to_json",
    "matrix_from_json",
]


class ConvergenceError(RuntimeError):
    """Iterative routine failed to reach its tolerance within its budget."""


class NotPsdError(ValueError):
    """Matrix has an eigenvalue below the PSD tolerance."""


class SchemaError(ValueError):
    """A JSON document does not match the expected schema."""


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances, overridable per call site (never via environment).

    hermiticity: max-entry asymmetry allowed before symmetrization is refused
    psd: slack on the smallest eigenvalue for PSD checks
    eig_offdiag: relative off-diagonal Frobenius target for the Jacobi sweep
    max_sweeps: Jacobi sweep budget
    completeness: max-entry residual allowed in sum(F_y) - I
    unit_trace: |tr - 1| allowed for density operators
    """

    hermiticity: float = 1e-10
    psd: float = 1e-10
    eig_offdiag: float = 1e-12
    max_sweeps: int = 100
    completeness: float = 1e-9
    unit_trace: float = 1e-10


DEFAULT_TOLS = Tolerances()


def as_complex_matrix(m) -> np.ndarray:
    """Validate and return a finite square complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix has non-finite entries")
    return a


def as_hermitian(m, tol: float = DEFAULT_TOLS.hermiticity) -> np.ndarray:
    """Check Hermiticity and return the symmetrized matrix (M + M†)/2.

    Raises ValueError if any entry of M - M† exceeds ``tol`` in magnitude;
    the symmetrization absorbs roundoff from channel applications.
    """
    a = as_complex_matrix(m)
    asym = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if asym > tol:
        raise ValueError(f"matrix is not Hermitian: max asymmetry {asym:.3e} > {tol:.3e}")
    return (a + a.conj().T) / 2.0


def eig_hermitian(
    m,
    tol: float = DEFAULT_TOLS.eig_offdiag,
    max_sweeps: int = DEFAULT_TOLS.max_sweeps,
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with eigenvalues ``w`` real and sorted descending and
    unitary ``v`` whose columns are the matching eigenvectors, so that
    ``m @ v == v @ diag(w)``. Convergence target is an off-diagonal Frobenius
    norm of ``tol`` (relative to the matrix scale when that exceeds 1).
    """
    a = as_hermitian(m)
    d = a.shape[0]
    if d == 1:
        return np.array([a[0, 0].real]), np.eye(1, dtype=complex)

    v = np.eye(d, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    target = tol * scale
    # Rotations on entries this far below the target cannot block convergence.
    skip = 0.1 * target / d

    def offdiag(x: np.ndarray) -> float:
        return float(np.linalg.norm(x - np.diag(np.diag(x))))

    off = offdiag(a)
    sweeps = 0
    while off > target:
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi sweep limit {max_sweeps} reached, off-diagonal residual {off:.3e}"
            )
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                r = abs(apq)
                if r <= skip:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0.0 else 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c

                # a <- R† a R with the (p,q) plane rotation
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * np.conj(phase) * col_q
                a[:, q] = s * phase * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * np.conj(phase) * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

                vcol_p, vcol_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vcol_p - s * np.conj(phase) * vcol_q
                v[:, q] = s * phase * vcol_p + c * vcol_q
        sweeps += 1
        off = offdiag(a)

    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def trace_norm(m) -> float:
    """Trace norm ||M||_1 = tr sqrt(M†M); sum of |eigenvalues| when Hermitian."""
    a = as_complex_matrix(m)
    if np.max(np.abs(a - a.conj().T)) <= DEFAULT_TOLS.hermiticity:
        w, _ = eig_hermitian(a)
        return float(np.sum(np.abs(w)))
    w, _ = eig_hermitian(a.conj().T @ a)
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def trace_distance(rho, sigma) -> float:
    """Normalized trace distance (1/2)||rho - sigma||_1 between Hermitian operators."""
    a = as_hermitian(rho)
    b = as_hermitian(sigma)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    w, _ = eig_hermitian(a - b)
    return 0.5 * float(np.sum(np.abs(w)))


def operator_abs(m) -> np.ndarray:
    """Operator absolute value |M| = sqrt(M†M)."""
    a = as_complex_matrix(m)
    if np.max(np.abs(a - a.conj().T)) <= DEFAULT_TOLS.hermiticity:
        w, v = eig_hermitian(a)
        return (v * np.abs(w)) @ v.conj().T
    w, v = eig_hermitian(a.conj().T @ a)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def _eig_psd(m, tol: float) -> tuple[np.ndarray, np.ndarray]:
    w, v = eig_hermitian(m)
    if w[-1] < -tol:
        raise NotPsdError(f"matrix is not PSD: min eigenvalue {w[-1]:.3e} < -{tol:.3e}")
    return np.clip(w, 0.0, None), v


def psd_sqrt(m, tol: float = DEFAULT_TOLS.psd) -> np.ndarray:
    """Principal square root of a PSD Hermitian matrix."""
    w, v = _eig_psd(m, tol)
    root = (v * np.sqrt(w)) @ v.conj().T
    return (root + root.conj().T) / 2.0


def psd_inv_sqrt(m, tol: float = DEFAULT_TOLS.psd, floor: float = 1e-300) -> np.ndarray:
    """Inverse square root of a positive definite Hermitian matrix."""
    w, v = _eig_psd(m, tol)
    if w[0] <= 0.0:
        raise NotPsdError("matrix is zero; no inverse square root")
    inv = (v * (1.0 / np.sqrt(np.maximum(w, floor)))) @ v.conj().T
    return (inv + inv.conj().T) / 2.0


def positive_part(m) -> np.ndarray:
    """Positive part of a Hermitian matrix: eigenvalues clipped at zero."""
    w, v = eig_hermitian(m)
    pos = (v * np.clip(w, 0.0, None)) @ v.conj().T
    return (pos + pos.conj().T) / 2.0


def is_psd(m, tol: float = DEFAULT_TOLS.psd) -> bool:
    """True iff the smallest eigenvalue of the Hermitian matrix is >= -tol."""
    w, _ = eig_hermitian(m)
    return bool(w[-1] >= -tol)


def commutator(a, b) -> np.ndarray:
    """AB - BA."""
    x = as_complex_matrix(a)
    y = as_complex_matrix(b)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return x @ y - y @ x


def is_unitary(u, tol: float = 1e-9) -> bool:
    a = as_complex_matrix(u)
    return bool(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))) <= tol)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary: orthonormalize a matrix of standard complex Gaussians."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    # fix the phase ambiguity of QR so the distribution is Haar
    ph = np.diag(r).copy()
    ph = ph / np.abs(ph)
    return q * ph


def random_hermitian(d: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (z + z.conj().T) / 2.0


def random_contraction(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random Hermitian M with 0 <= M <= I (uniform eigenvalues, Haar basis)."""
    u = haar_unitary(d, rng)
    w = rng.uniform(0.0, 1.0, size=d)
    m = (u * w) @ u.conj().T
    return (m + m.conj().T) / 2.0


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a normalized Wishart draw."""
    k = rank or d
    z = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = z @ z.conj().T
    m = (m + m.conj().T) / 2.0
    return m / np.trace(m).real


def matrix_to_json(m) -> dict:
    """Serialize a complex matrix as {"dim": d, "entries": [[[re, im], ...], ...]}."""
    a = as_complex_matrix(m)
    d = a.shape[0]
    entries = [[[float(a[i, j].real), float(a[i, j].imag)] for j in range(d)] for i in range(d)]
    return {"dim": d, "entries": entries}


def matrix_from_json(doc) -> np.ndarray:
    """Parse the matrix schema produced by :func:`matrix_to_json`."""
    if not isinstance(doc, dict) or "dim" not in doc or "entries" not in doc:
        raise SchemaError("matrix document must have 'dim' and 'entries'")
    d = doc["dim"]
    if not isinstance(d, int) or d < 1:
        raise SchemaError(f"matrix 'dim' must be a positive integer, got {d!r}")
    entries = doc["entries"]
    if len(entries) != d or any(len(row) != d for row in entries):
        raise SchemaError(f"matrix 'entries' must be {d}x{d}")
    try:
        a = np.array(
            [[complex(cell[0], cell[1]) for cell in row] for row in entries], dtype=complex
        )
    except (TypeError, IndexError) as exc:
        raise SchemaError(f"matrix entries must be [re, im] pairs: {exc}") from exc
    return as_complex_matrix(a)
