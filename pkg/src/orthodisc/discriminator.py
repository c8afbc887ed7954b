"""Orthogonal state sets, eigenvalue arrays and the discriminator operators.

Every state phi_i of a set of 2**n orthogonal states is made a simultaneous
eigenvector of n Hermitian, involutory operators U_j with eigenvalue e_j^i in
{+1, -1}. The column (e_1^i, ..., e_n^i) is the signature of phi_i, read off
the ancillas of the discrimination circuit as bit j = 0 for +1 and 1 for -1.

States and array entries are 0-based here; error messages count from 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from orthodisc import linalg
from orthodisc.errors import (
    DimensionError,
    EigenvalueArrayError,
    NoMatchError,
    NormalizationError,
    OrthogonalityError,
    ValidationError,
)

MAX_DEFAULT_QUBITS = 4


@dataclass(frozen=True)
class OrthogonalStateSet:
    n_qubits: int
    states: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @property
    def matrix(self) -> np.ndarray:
        """The states stacked as columns (the unitary change of basis V)."""
        return np.column_stack(self.states)

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.states[i]


@dataclass(frozen=True)
class EigenvalueArraySet:
    n_qubits: int
    arrays: tuple[tuple[int, ...], ...]

    def signature(self, i: int) -> tuple[int, ...]:
        """Ancilla bits expected for state ``i``."""
        return tuple(0 if row[i] == 1 else 1 for row in self.arrays)

    def diagonal(self, j: int) -> np.ndarray:
        return np.diag(np.array(self.arrays[j], dtype=complex))


@dataclass(frozen=True)
class DiscriminatorSet:
    state_set: OrthogonalStateSet
    arrays: EigenvalueArraySet
    operators: tuple[np.ndarray, ...]

    @property
    def n_qubits(self) -> int:
        return self.state_set.n_qubits


def _n_from_count(count: int) -> int:
    n = count.bit_length() - 1
    if count < 2 or 2**n != count:
        raise ValidationError(f"expected 2**n states, got {count}")
    return n


def validate_state_set(states: Sequence, n: int | None = None) -> OrthogonalStateSet:
    """Check that ``states`` are 2**n orthonormal vectors of dimension 2**n."""
    vecs = [linalg.as_vector(s) for s in states]
    if n is None:
        n = _n_from_count(len(vecs))
    if n < 1:
        raise ValidationError(f"n must be a positive integer, got {n}")
    dim = 2**n
    if len(vecs) != dim:
        raise ValidationError(f"{n}-qubit set needs {dim} states, got {len(vecs)}")
    tol = linalg.TOL.validation
    for i, v in enumerate(vecs):
        if v.shape != (dim,):
            raise DimensionError(f"state {i + 1} has dimension {v.shape[0]}, expected {dim}")
        norm = np.linalg.norm(v)
        if abs(norm - 1) > tol:
            raise NormalizationError(f"state {i + 1} has norm {norm:.12g}, expected 1")
    for i in range(dim):
        for j in range(i + 1, dim):
            ov = abs(np.vdot(vecs[i], vecs[j]))
            if ov > tol:
                raise OrthogonalityError(i, j, float(ov))
    return OrthogonalStateSet(n, tuple(linalg.frozen(v) for v in vecs))


def default_eigenvalue_arrays(n: int) -> EigenvalueArraySet:
    """Arrays whose signature columns enumerate all n-bit patterns in order.

    Row j gives +1 to state i when bit j of i (most significant first) is 0,
    so state i is read out as the binary expansion of i.
    """
    if not 1 <= n <= MAX_DEFAULT_QUBITS:
        raise ValueError(f"n must be between 1 and {MAX_DEFAULT_QUBITS}, got {n}")
    dim = 2**n
    rows = tuple(
        tuple(1 if (i >> (n - 1 - j)) & 1 == 0 else -1 for i in range(dim)) for j in range(n)
    )
    return EigenvalueArraySet(n, rows)


def validate_eigenvalue_arrays(arrays: Sequence[Sequence[int]]) -> EigenvalueArraySet:
    """Check balance, row independence and signature distinctness.

    Balanced, mutually non-equal, non-complementary rows are not enough for
    n >= 3 (a row may be the elementwise product of two others), so distinct
    signature columns are checked as well.
    """
    rows = [tuple(int(e) for e in row) for row in arrays]
    if not rows:
        raise EigenvalueArrayError("no eigenvalue arrays given")
    if len({len(row) for row in rows}) != 1:
        raise EigenvalueArrayError("eigenvalue arrays have different lengths")
    for j, row in enumerate(rows):
        if any(e not in (1, -1) for e in row):
            raise EigenvalueArrayError(f"row {j + 1} has entries outside {{+1, -1}}", rows=(j,))
        if sum(row) != 0:
            raise EigenvalueArrayError(
                f"row {j + 1} is unbalanced: {row.count(1)} x (+1) vs {row.count(-1)} x (-1)",
                rows=(j,),
            )
        for m in range(j):
            if row == rows[m]:
                raise EigenvalueArrayError(f"row {j + 1} equals row {m + 1}", rows=(m, j))
            if row == tuple(-e for e in rows[m]):
                raise EigenvalueArrayError(
                    f"row {j + 1} is the complement of row {m + 1}", rows=(m, j)
                )
    n = len(rows)
    dim = 2**n
    if len(rows[0]) != dim:
        raise EigenvalueArrayError(
            f"{n} arrays label {dim} states, but the arrays have length {len(rows[0])}"
        )
    seen: dict[tuple[int, ...], int] = {}
    for i in range(dim):
        col = tuple(row[i] for row in rows)
        if col in seen:
            first = seen[col]
            raise EigenvalueArrayError(
                f"states {first + 1} and {i + 1} share the signature {col}", states=(first, i)
            )
        seen[col] = i
    return EigenvalueArraySet(n, tuple(rows))


def build_operators(
    state_set: OrthogonalStateSet, arrays: EigenvalueArraySet
) -> DiscriminatorSet:
    """Synthesize U_j = V M_j V^dagger for every eigenvalue array.

    V has the states as columns, so phi_i is the eigenvector of U_j with
    eigenvalue e_j^i. V is unitary, hence V^dagger is its inverse.
    """
    if state_set.n_qubits != arrays.n_qubits:
        raise DimensionError(
            f"state set has {state_set.n_qubits} qubits but arrays describe {arrays.n_qubits}"
        )
    v = state_set.matrix
    ops = []
    tol = linalg.TOL
    for j in range(arrays.n_qubits):
        u = v @ arrays.diagonal(j) @ v.conj().T
        if not linalg.is_unitary(u, tol.validation) or not linalg.is_hermitian(u, tol.validation):
            raise ValidationError(f"U_{j + 1} is not a Hermitian unitary; is the state set orthonormal?")
        ops.append(linalg.frozen(u))
    return DiscriminatorSet(state_set, arrays, tuple(ops))


def discriminator(states: Sequence, arrays: Sequence[Sequence[int]] | None = None) -> DiscriminatorSet:
    """Validate ``states`` (and ``arrays``, default binary) and build the operators."""
    state_set = validate_state_set(states)
    if arrays is None:
        arr = default_eigenvalue_arrays(state_set.n_qubits)
    else:
        arr = validate_eigenvalue_arrays(arrays)
    return build_operators(state_set, arr)


def _theta(alpha: float, beta: float) -> float:
    if abs(alpha**2 + beta**2 - 1) > linalg.TOL.validation:
        raise NormalizationError(f"alpha**2 + beta**2 = {alpha**2 + beta**2:.12g}, expected 1")
    if alpha == 0:
        raise ValidationError("alpha = 0 leaves the rotation angle undefined")
    return 2 * math.atan(beta / alpha)


def reflection(theta: float) -> np.ndarray:
    """[[cos t, sin t], [sin t, -cos t]]: +1 on (cos t/2, sin t/2), -1 on its orthogonal."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


def family_single(alpha: float, beta: float) -> tuple[OrthogonalStateSet, DiscriminatorSet]:
    """The set {a|0> + b|1>, b|0> - a|1>} with the array (+1, -1).

    Returns the validated states and a discriminator whose single operator is
    the closed-form reflection at theta = 2 atan(beta/alpha).
    """
    theta = _theta(alpha, beta)
    states = validate_state_set([[alpha, beta], [beta, -alpha]], 1)
    arrays = default_eigenvalue_arrays(1)
    op = linalg.frozen(reflection(theta))
    return states, DiscriminatorSet(states, arrays, (op,))


def family_two(alpha: float, beta: float) -> tuple[OrthogonalStateSet, DiscriminatorSet]:
    """Two-qubit product set whose second qubit carries the superposition.

    States: a|00> + b|01>, a|10> + b|11>, b|10> - a|11>, b|00> - a|01>, with
    the default arrays (+1,+1,-1,-1) and (+1,-1,+1,-1). The operators are
    I (x) R(theta) and Z (x) R(theta) with R the single-qubit reflection.
    """
    theta = _theta(alpha, beta)
    a, b = alpha, beta
    states = validate_state_set(
        [[a, b, 0, 0], [0, 0, a, b], [0, 0, b, -a], [b, -a, 0, 0]], 2
    )
    r = reflection(theta)
    ops = (linalg.frozen(np.kron(linalg.I2, r)), linalg.frozen(np.kron(linalg.Z, r)))
    return states, DiscriminatorSet(states, default_eigenvalue_arrays(2), ops)


BELL_ARRAYS = ((1, -1, 1, -1), (-1, 1, 1, -1))


def bell_states() -> list[np.ndarray]:
    """Phi+, Phi-, Psi+, Psi- in that order."""
    r = 1 / math.sqrt(2)
    return [
        np.array([r, 0, 0, r], dtype=complex),
        np.array([r, 0, 0, -r], dtype=complex),
        np.array([0, r, r, 0], dtype=complex),
        np.array([0, r, -r, 0], dtype=complex),
    ]


def bell_set() -> DiscriminatorSet:
    """Bell basis with arrays chosen so that U_1 = X (x) X and U_2 = Y (x) Y."""
    return build_operators(
        validate_state_set(bell_states(), 2), validate_eigenvalue_arrays(BELL_ARRAYS)
    )


def signature_of(arrays: EigenvalueArraySet, i: int) -> tuple[int, ...]:
    return arrays.signature(i)


def decode_signature(arrays: EigenvalueArraySet, bits: Sequence[int]) -> int:
    """Map ancilla bits back to the (0-based) index of the state they identify."""
    bits = tuple(int(b) for b in bits)
    if len(bits) != arrays.n_qubits:
        raise DimensionError(f"expected {arrays.n_qubits} bits, got {len(bits)}")
    for i in range(2**arrays.n_qubits):
        if arrays.signature(i) == bits:
            return i
    raise NoMatchError(f"no state has signature {bits}")
