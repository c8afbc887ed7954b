"""Single-qubit state tomography and density-matrix comparison metrics."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from orthodisc import linalg
from orthodisc.errors import DimensionError, NotHermitianError, ValidationError

# Outcome 0 of each Pauli-basis measurement projects onto these states.
# The y-basis outcome 0 is (|0> - i|1>)/sqrt(2), i.e. <Y> = 1 - 2*py0.
BASIS_ZERO = {
    "x": np.array([1, 1], dtype=complex) / np.sqrt(2),
    "y": np.array([1, -1j], dtype=complex) / np.sqrt(2),
    "z": np.array([1, 0], dtype=complex),
}


class UnphysicalStateWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace matrix tagged as theoretical or experimental.

    ``physical`` is False when the matrix has a negative eigenvalue beyond
    tolerance, which happens for tomographic reconstructions from noisy
    statistics. Such matrices are kept as-is rather than projected.
    """

    data: np.ndarray
    role: str = "theoretical"
    physical: bool = True

    def __post_init__(self):
        m = linalg.frozen(linalg.as_matrix(self.data))
        if m.shape[0] != m.shape[1] or m.shape[0] & (m.shape[0] - 1):
            raise DimensionError(f"density matrix must be 2**n square, got {m.shape}")
        tol = linalg.TOL.reconstruction
        if linalg.max_norm(m - m.conj().T) > tol:
            raise NotHermitianError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > tol:
            raise ValidationError(f"density matrix has trace {np.trace(m).real:.12g}")
        object.__setattr__(self, "data", m)
        object.__setattr__(self, "physical", bool(np.linalg.eigvalsh(m)[0] >= -tol))

    @classmethod
    def pure(cls, psi, role: str = "theoretical") -> "DensityMatrix":
        psi = linalg.as_vector(psi)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), role)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.data, dtype=dtype)


@dataclass(frozen=True)
class PauliStats:
    """Probabilities of outcome 0 when measuring in the x, y and z bases."""

    px0: float
    py0: float
    pz0: float
    shots: int = 8192

    def __post_init__(self):
        for name in ("px0", "py0", "pz0"):
            p = getattr(self, name)
            if not (isinstance(p, (int, float)) and 0 <= p <= 1):
                raise ValueError(f"{name} must be a probability in [0, 1], got {p!r}")

    @classmethod
    def from_state(cls, rho, shots: int = 8192) -> "PauliStats":
        """Exact outcome probabilities for ``rho`` (a 2x2 density matrix)."""
        m = np.asarray(rho, dtype=complex)
        p = {b: float(np.real(np.vdot(v, m @ v))) for b, v in BASIS_ZERO.items()}
        return cls(p["x"], p["y"], p["z"], shots)

    @property
    def bloch(self) -> np.ndarray:
        return np.array([2 * self.px0 - 1, 1 - 2 * self.py0, 2 * self.pz0 - 1])


def _as_density(m) -> np.ndarray:
    if isinstance(m, DensityMatrix):
        return m.data
    return linalg.as_matrix(m)


def reconstruct_single_qubit(stats: PauliStats) -> DensityMatrix:
    """rho = (I + rx X + ry Y + rz Z) / 2 from the three Pauli expectation values.

    A Bloch vector longer than 1 gives an unphysical matrix; it is returned
    with ``physical=False`` and an UnphysicalStateWarning.
    """
    rx, ry, rz = stats.bloch
    rho = 0.5 * (linalg.I2 + rx * linalg.X + ry * linalg.Y + rz * linalg.Z)
    dm = DensityMatrix(rho, role="experimental")
    if not dm.physical:
        warnings.warn(
            f"Bloch vector norm {np.linalg.norm(stats.bloch):.4f} exceeds 1",
            UnphysicalStateWarning,
            stacklevel=2,
        )
    return dm


def _check_dims(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


def fidelity(rho_t, rho_e) -> float:
    """Tr sqrt(sqrt(rho_t) rho_e sqrt(rho_t)) (not squared).

    Evaluated as the sum of singular values of sqrt(rho_t) sqrt(rho_e), which
    is the same quantity but avoids square-rooting roundoff-level eigenvalues
    of rank-deficient (e.g. pure) inputs. DensityMatrix inputs flagged
    unphysical have their negative eigenvalues clamped to zero; raw arrays
    must be positive semidefinite.
    """
    clamp = any(isinstance(m, DensityMatrix) and not m.physical for m in (rho_t, rho_e))
    a, b = _as_density(rho_t), _as_density(rho_e)
    _check_dims(a, b)
    sa = linalg.psd_sqrt(a, clamp=clamp)
    sb = linalg.psd_sqrt(b, clamp=clamp)
    return float(np.sum(np.linalg.svd(sa @ sb, compute_uv=False)))


def avg_abs_deviation(rho_t, rho_e) -> float:
    """Mean over all N**2 entries of |rho_t[i, j] - rho_e[i, j]|."""
    a, b = _as_density(rho_t), _as_density(rho_e)
    _check_dims(a, b)
    return float(np.mean(np.abs(a - b)))


def max_abs_deviation(rho_t, rho_e) -> float:
    a, b = _as_density(rho_t), _as_density(rho_e)
    _check_dims(a, b)
    return float(np.max(np.abs(a - b)))


def metrics(rho_t, rho_e) -> dict[str, float]:
    return {
        "fidelity": fidelity(rho_t, rho_e),
        "avg_abs_dev": avg_abs_deviation(rho_t, rho_e),
        "max_abs_dev": max_abs_deviation(rho_t, rho_e),
    }
