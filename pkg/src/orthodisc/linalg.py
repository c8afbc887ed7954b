"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Dimensions never
exceed a few thousand, so nothing here is sparse or iterative.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, replace

import numpy as np

from orthodisc.errors import DimensionError, NotHermitianError, NotPSDError

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.array([[1, 0], [0, 1j]], dtype=complex)
SDG = S.conj().T


@dataclass(frozen=True)
class Tolerance:
    validation: float = 1e-10
    reconstruction: float = 1e-9


TOL = Tolerance()


def set_tolerance(**kwargs) -> Tolerance:
    """Replace the module-wide tolerances; returns the previous setting."""
    global TOL
    old = TOL
    TOL = replace(TOL, **kwargs)
    return old


@contextmanager
def tolerance(**kwargs):
    old = set_tolerance(**kwargs)
    try:
        yield TOL
    finally:
        set_tolerance(validation=old.validation, reconstruction=old.reconstruction)


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def as_vector(v) -> np.ndarray:
    a = np.asarray(v, dtype=complex)
    if a.ndim != 1:
        raise DimensionError(f"expected a 1-D vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector has non-finite entries")
    return a


def frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


def _require_square(m: np.ndarray) -> None:
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*factors) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for f in factors:
        out = np.kron(out, as_matrix(f))
    return out


def max_norm(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def is_unitary(m, tol: float | None = None) -> bool:
    """True iff ``max|m m^dagger - I| <= tol``."""
    m = as_matrix(m)
    _require_square(m)
    tol = TOL.validation if tol is None else tol
    if tol <= 0:
        raise ValueError("tol must be positive")
    return max_norm(m @ m.conj().T - np.eye(m.shape[0])) <= tol


def is_hermitian(m, tol: float | None = None) -> bool:
    m = as_matrix(m)
    _require_square(m)
    tol = TOL.validation if tol is None else tol
    return max_norm(m - m.conj().T) <= tol


def hermitian_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns ``(eigenvalues, Q)`` with eigenvalues ascending and the matching
    eigenvectors as the columns of ``Q``, so that ``m = Q diag(eigenvalues) Q^dagger``.
    """
    m = as_matrix(m)
    _require_square(m)
    if not is_hermitian(m):
        raise NotHermitianError(
            f"matrix is not Hermitian (max|m - m^dagger| = {max_norm(m - m.conj().T):.3g})"
        )
    # eigh only reads one triangle; symmetrize so both halves contribute
    w, q = np.linalg.eigh((m + m.conj().T) / 2)
    return w, q


def psd_sqrt(m, clamp: bool = False) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-tol, 0)`` are treated as zero. With ``clamp=True`` every
    negative eigenvalue is set to zero instead of raising.
    """
    w, q = hermitian_eig(m)
    if not clamp and w.size and w[0] < -TOL.validation:
        raise NotPSDError(f"matrix has negative eigenvalue {w[0]:.3g}")
    # below the numerical-rank cutoff an eigenvalue is roundoff, not signal
    cutoff = w.size * np.finfo(float).eps * max(float(np.max(np.abs(w), initial=0.0)), 1.0)
    w = np.where(w <= cutoff, 0.0, w)
    return (q * np.sqrt(w)) @ q.conj().T


def equal_up_to_phase(a, b, tol: float) -> bool:
    """Compare two arrays modulo a global phase, using the max-norm."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return False
    inner = np.vdot(a.ravel(), b.ravel())
    phase = inner / abs(inner) if abs(inner) > 0 else 1.0
    return max_norm(a * phase - b) <= tol


def overlap(u, v) -> float:
    """|<u|v>| for two state vectors."""
    return float(abs(np.vdot(as_vector(u), as_vector(v))))
