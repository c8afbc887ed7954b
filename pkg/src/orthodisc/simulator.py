"""Exact statevector simulation with measurement collapse, shots and noise.

Noise is simulated by trajectories: each shot stays a pure state, and
depolarizing noise inserts random Pauli errors on the qubits a gate touched.
Every shot draws from its own generator seeded by ``(seed, shot)``, so a
histogram does not depend on the order in which shots are executed.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from orthodisc import linalg
from orthodisc.circuit import Circuit, Gate, Measure
from orthodisc.errors import DimensionError, FactorizationError, NormalizationError

INPUT_NORM_TOL = 1e-8
_PAULIS = (linalg.X, linalg.Y, linalg.Z)


@dataclass(frozen=True)
class NoiseModel:
    readout_flip: float = 0.0
    depol1: float = 0.0
    depol2: float = 0.0

    def __post_init__(self):
        if not 0 <= self.readout_flip <= 0.5:
            raise ValueError(f"readout_flip must lie in [0, 0.5], got {self.readout_flip}")
        for name in ("depol1", "depol2"):
            p = getattr(self, name)
            if not 0 <= p <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")

    @property
    def has_gate_noise(self) -> bool:
        return self.depol1 > 0 or self.depol2 > 0

    def depol_for(self, gate: Gate) -> float:
        return self.depol1 if len(gate.qubits) == 1 else self.depol2


NOISELESS = NoiseModel()


@dataclass(frozen=True)
class Trajectory:
    """Result of one shot.

    ``bits`` is what the classical register recorded (after readout error),
    ``outcomes`` the projective results that actually collapsed the state.
    """

    bits: tuple[int, ...]
    state: np.ndarray
    outcomes: tuple[int, ...] = ()

    @property
    def key(self) -> str:
        return "".join(map(str, self.bits))

    def __iter__(self):
        # unpacks as (bits, final)
        return iter((self.bits, self.state))


@dataclass
class ShotHistogram:
    shots: int
    counts: dict[str, int]
    seed: int
    n_clbits: int = field(default=0)

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not add up to the number of shots")
        if not self.n_clbits and self.counts:
            self.n_clbits = len(next(iter(self.counts)))

    def probability(self, key: str) -> float:
        return self.counts.get(key, 0) / self.shots

    def probabilities(self) -> dict[str, float]:
        return {k: c / self.shots for k, c in sorted(self.counts.items())}

    def marginal(self, clbit: int) -> tuple[float, float]:
        """(P(bit = 0), P(bit = 1)) for one classical bit."""
        ones = sum(c for k, c in self.counts.items() if k[clbit] == "1")
        return (self.shots - ones) / self.shots, ones / self.shots

    def most_common(self) -> str:
        """Majority outcome; ties go to the numerically smallest bit string."""
        return min(self.counts, key=lambda k: (-self.counts[k], int(k, 2) if k else 0))


def shot_rng(seed: int, shot: int) -> np.random.Generator:
    return np.random.default_rng([seed, shot])


def _depol_rng(seed: int, shot: int) -> np.random.Generator:
    return np.random.default_rng([seed, shot, 1])


def prepare_input(circuit: Circuit, psi) -> np.ndarray:
    """Full-register statevector from either a full or a state-register input.

    A vector of dimension 2**len(state_qubits) (and not 2**width) is placed on
    the state qubits with every other qubit in |0>.
    """
    psi = linalg.as_vector(psi)
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > INPUT_NORM_TOL:
        raise NormalizationError(f"input state has norm {norm:.12g}")
    w = circuit.width
    if psi.shape[0] == 2**w:
        return psi.copy()
    k = len(circuit.state_qubits)
    if psi.shape[0] != 2**k:
        raise DimensionError(
            f"input dimension {psi.shape[0]} matches neither the register (2**{w}) "
            f"nor the state qubits (2**{k})"
        )
    rest = [q for q in range(w) if q not in circuit.state_qubits]
    zeros = np.zeros(2 ** len(rest), dtype=complex)
    zeros[0] = 1
    # axes ordered as state qubits then the rest; permute into register order
    full = np.tensordot(psi.reshape([2] * k), zeros.reshape([2] * len(rest)), axes=0) if rest else psi.reshape([2] * k)
    order = list(circuit.state_qubits) + rest
    full = np.transpose(full, np.argsort(order))
    return full.reshape(-1)


def apply_matrix(state: np.ndarray, matrix: np.ndarray, targets, control=None) -> np.ndarray:
    """Apply ``matrix`` to ``targets`` of a ``[2]*width`` tensor, returning a new tensor."""
    out = state.copy()
    targets = list(targets)
    if control is None:
        sub = out
        axes = targets
    else:
        idx = [slice(None)] * out.ndim
        idx[control] = 1
        sub = out[tuple(idx)]
        axes = [t - (t > control) for t in targets]
    k = len(axes)
    moved = np.moveaxis(sub, axes, range(k))
    shape = moved.shape
    new = (matrix @ moved.reshape(2**k, -1)).reshape(shape)
    sub[...] = np.moveaxis(new, range(k), axes)
    return out


def apply_gate(state: np.ndarray, gate: Gate) -> np.ndarray:
    return apply_matrix(state, gate.target_matrix(), gate.targets, gate.control)


def apply_noise(state: np.ndarray, gate: Gate, noise: NoiseModel, rng: np.random.Generator) -> np.ndarray:
    """With probability p, hit every qubit the gate touched with a random X, Y or Z."""
    p = noise.depol_for(gate)
    if p <= 0 or rng.random() >= p:
        return state
    for q in gate.qubits:
        state = apply_matrix(state, _PAULIS[rng.integers(3)], (q,))
    return state


def readout(bit: int, noise: NoiseModel, r: float) -> int:
    return bit ^ 1 if r < noise.readout_flip else bit


def _prob_zero(state: np.ndarray, qubit: int) -> float:
    idx = [slice(None)] * state.ndim
    idx[qubit] = 0
    return float(np.sum(np.abs(state[tuple(idx)]) ** 2))


def collapse(state: np.ndarray, qubit: int, outcome: int, prob: float) -> np.ndarray:
    out = state.copy()
    idx = [slice(None)] * out.ndim
    idx[qubit] = 1 - outcome
    out[tuple(idx)] = 0
    return out / np.sqrt(prob)


def _segments(circuit: Circuit) -> list[tuple[list[Gate], Measure | None]]:
    segs, gates = [], []
    for ins in circuit.instructions:
        if isinstance(ins, Measure):
            segs.append((gates, ins))
            gates = []
        else:
            gates.append(ins)
    if gates:
        segs.append((gates, None))
    return segs


def _trajectory(circuit, state, rng, noise, depol_rng, cache, segments) -> Trajectory:
    outcomes: list[int] = []
    bits = [0] * circuit.n_clbits
    for k, (gates, meas) in enumerate(segments):
        key = (k, tuple(outcomes))
        if cache is not None and key in cache:
            state, p0 = cache[key]
        else:
            for g in gates:
                state = apply_gate(state, g)
                if depol_rng is not None:
                    state = apply_noise(state, g, noise, depol_rng)
            p0 = _prob_zero(state, meas.qubit) if meas is not None else 1.0
            if cache is not None:
                cache[key] = (state, p0)
        if meas is None:
            continue
        outcome = 0 if rng.random() < p0 else 1
        ckey = ("c", k, tuple(outcomes), outcome)
        if cache is not None and ckey in cache:
            state = cache[ckey]
        else:
            state = collapse(state, meas.qubit, outcome, p0 if outcome == 0 else 1 - p0)
            if cache is not None:
                cache[ckey] = state
        outcomes.append(outcome)
        bits[meas.clbit] = readout(outcome, noise, rng.random())
    return Trajectory(tuple(bits), state.reshape(-1), tuple(outcomes))


def simulate(
    circuit: Circuit,
    psi,
    seed: int = 0,
    noise: NoiseModel | None = None,
    shot: int = 0,
) -> Trajectory:
    """Run one shot of ``circuit`` on ``psi``.

    Gates act as unitaries on the full register; each measurement samples the
    Born rule and collapses and renormalizes the state. ``simulate(c, psi, s)``
    reproduces shot 0 of ``run_shots(c, psi, ..., seed=s)``.
    """
    noise = noise or NOISELESS
    state = prepare_input(circuit, psi).reshape([2] * circuit.width)
    depol = _depol_rng(seed, shot) if noise.has_gate_noise else None
    return _trajectory(circuit, state, shot_rng(seed, shot), noise, depol, None, _segments(circuit))


def run_shots(
    circuit: Circuit,
    psi,
    shots: int = 8192,
    seed: int = 0,
    noise: NoiseModel | None = None,
    on_shot: Callable[[int, Trajectory], None] | None = None,
) -> ShotHistogram:
    """Repeat ``simulate`` for shots 0..shots-1 and histogram the recorded bits.

    Keys are bit strings with classical bit 0 leftmost. Without gate noise the
    pre-measurement states are shared between shots; the random draws per
    shot are the same as in ``simulate``.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    noise = noise or NOISELESS
    state = prepare_input(circuit, psi).reshape([2] * circuit.width)
    segments = _segments(circuit)
    cache = None if noise.has_gate_noise else {}
    counts: Counter[str] = Counter()
    for s in range(shots):
        depol = _depol_rng(seed, s) if noise.has_gate_noise else None
        traj = _trajectory(circuit, state, shot_rng(seed, s), noise, depol, cache, segments)
        counts[traj.key] += 1
        if on_shot is not None:
            on_shot(s, traj)
    return ShotHistogram(shots, dict(sorted(counts.items())), seed, circuit.n_clbits)


def post_measurement_state(
    final,
    state_qubits: Sequence[int],
    ancilla_outcome: Sequence[int] | None = None,
    ancilla_qubits: Sequence[int] | None = None,
) -> np.ndarray:
    """State of ``state_qubits`` once the rest of the register is in a basis state.

    Raises FactorizationError if the state register is still entangled with
    the other qubits. With ``ancilla_qubits`` given, also checks that those
    qubits are in ``ancilla_outcome``.
    """
    final = linalg.as_vector(final)
    w = final.shape[0].bit_length() - 1
    if 2**w != final.shape[0]:
        raise DimensionError("statevector length is not a power of two")
    tensor = final.reshape([2] * w)
    state_qubits = list(state_qubits)
    if ancilla_qubits is not None and ancilla_outcome is not None:
        idx = [slice(None)] * w
        for q, b in zip(ancilla_qubits, ancilla_outcome):
            idx[q] = int(b)
        weight = float(np.sum(np.abs(tensor[tuple(idx)]) ** 2))
        if abs(weight - np.sum(np.abs(final) ** 2)) > linalg.TOL.reconstruction:
            raise FactorizationError(
                f"ancillas are not in the measured state {tuple(ancilla_outcome)} (weight {weight:.3g})"
            )
    rest = [q for q in range(w) if q not in state_qubits]
    mat = np.transpose(tensor, rest + state_qubits).reshape(2 ** len(rest), 2 ** len(state_qubits))
    _, s, vh = np.linalg.svd(mat)
    total = float(np.sum(s**2))
    residue = 1 - s[0] ** 2 / total
    if residue > linalg.TOL.reconstruction:
        raise FactorizationError(f"state register is entangled with the rest (residue {residue:.3g})")
    return vh[0] / np.linalg.norm(vh[0])
