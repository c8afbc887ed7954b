"""Gate-level circuit representation and the discrimination circuit builder.

Qubit 0 is the most significant bit of a basis-state index, matching ket
notation |q0 q1 ...> read left to right. Classical bit j records ancilla j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np

from orthodisc import linalg
from orthodisc.discriminator import DiscriminatorSet
from orthodisc.errors import DimensionError, ValidationError

SINGLE_QUBIT = ("H", "X", "Y", "Z", "S", "SDG", "RY")
CONTROLLED = ("CNOT", "CZ", "CY", "CU")
NATIVE = SINGLE_QUBIT + ("CNOT", "CZ", "CY")

_FIXED = {
    "H": linalg.H,
    "X": linalg.X,
    "Y": linalg.Y,
    "Z": linalg.Z,
    "S": linalg.S,
    "SDG": linalg.SDG,
    "CNOT": linalg.X,
    "CZ": linalg.Z,
    "CY": linalg.Y,
}


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True, eq=False)
class Gate:
    """One gate application.

    ``targets`` lists the qubits the (uncontrolled) matrix acts on, first
    target as the most significant. For CU gates ``matrix`` holds that
    matrix; other kinds derive it from ``kind`` and ``angle``.
    """

    kind: str
    targets: tuple[int, ...]
    control: int | None = None
    angle: float | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if self.kind not in SINGLE_QUBIT + CONTROLLED:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in CONTROLLED and self.control is None:
            raise ValueError(f"{self.kind} needs a control qubit")
        if self.kind in SINGLE_QUBIT and self.control is not None:
            raise ValueError(f"{self.kind} takes no control qubit")
        if self.kind == "RY" and self.angle is None:
            raise ValueError("RY needs an angle")
        if self.control is not None and self.control in self.targets:
            raise ValueError("control qubit cannot also be a target")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError("duplicate target qubits")
        if self.kind == "CU":
            if self.matrix is None:
                raise ValueError("CU needs a matrix")
            m = linalg.frozen(self.matrix)
            if m.shape != (2 ** len(self.targets),) * 2:
                raise DimensionError(
                    f"CU matrix shape {m.shape} does not match {len(self.targets)} targets"
                )
            if not linalg.is_unitary(m, linalg.TOL.validation):
                raise ValidationError("CU matrix is not unitary")
            object.__setattr__(self, "matrix", m)
        elif len(self.targets) != 1:
            raise ValueError(f"{self.kind} acts on exactly one target")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets if self.control is None else (self.control, *self.targets)

    def target_matrix(self) -> np.ndarray:
        """Matrix applied to the targets (when the control, if any, is |1>)."""
        if self.kind == "CU":
            return self.matrix
        if self.kind == "RY":
            return ry(self.angle)
        return _FIXED[self.kind]

    def remap(self, mapping) -> "Gate":
        return Gate(
            self.kind,
            tuple(mapping[t] for t in self.targets),
            None if self.control is None else mapping[self.control],
            self.angle,
            self.matrix,
        )

    def _key(self):
        m = None if self.matrix is None else self.matrix.tobytes()
        return (self.kind, self.targets, self.control, self.angle, m)

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __str__(self):
        name = self.kind if self.angle is None else f"{self.kind}({self.angle:.6g})"
        if self.control is None:
            return f"{name} q{self.targets[0]}"
        return f"{name} q{self.control}->" + ",".join(f"q{t}" for t in self.targets)


@dataclass(frozen=True)
class Measure:
    qubit: int
    clbit: int

    def remap(self, mapping) -> "Measure":
        return Measure(mapping[self.qubit], self.clbit)


Instruction = Union[Gate, Measure]


@dataclass(frozen=True)
class Circuit:
    width: int
    ancilla_qubits: tuple[int, ...]
    state_qubits: tuple[int, ...]
    instructions: tuple[Instruction, ...] = ()
    n_clbits: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "ancilla_qubits", tuple(self.ancilla_qubits))
        object.__setattr__(self, "state_qubits", tuple(self.state_qubits))
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if self.n_clbits is None:
            n = max((m.clbit + 1 for m in self.measurements_iter()), default=0)
            object.__setattr__(self, "n_clbits", n)
        if set(self.ancilla_qubits) & set(self.state_qubits):
            raise ValueError("ancilla and state qubits overlap")
        for q in self.ancilla_qubits + self.state_qubits:
            if not 0 <= q < self.width:
                raise ValueError(f"qubit {q} outside register of width {self.width}")
        for ins in self.instructions:
            qs = ins.qubits if isinstance(ins, Gate) else (ins.qubit,)
            if any(not 0 <= q < self.width for q in qs):
                raise ValueError(f"{ins} touches a qubit outside width {self.width}")
            if isinstance(ins, Measure) and not 0 <= ins.clbit < self.n_clbits:
                raise ValueError(f"classical bit {ins.clbit} out of range")

    def measurements_iter(self) -> Iterator[Measure]:
        return (i for i in self.instructions if isinstance(i, Measure))

    @property
    def gates(self) -> list[Gate]:
        return [i for i in self.instructions if isinstance(i, Gate)]

    @property
    def measurements(self) -> list[tuple[int, int]]:
        return [(m.qubit, m.clbit) for m in self.measurements_iter()]

    def with_instructions(self, instructions, **changes) -> "Circuit":
        fields = dict(
            width=self.width,
            ancilla_qubits=self.ancilla_qubits,
            state_qubits=self.state_qubits,
            n_clbits=self.n_clbits,
        )
        fields.update(changes)
        return Circuit(instructions=tuple(instructions), **fields)

    def __str__(self):
        lines = [f"Circuit(width={self.width}, ancillas={self.ancilla_qubits}, states={self.state_qubits})"]
        for ins in self.instructions:
            if isinstance(ins, Measure):
                lines.append(f"  MEASURE q{ins.qubit} -> c{ins.clbit}")
            else:
                lines.append(f"  {ins}")
        return "\n".join(lines)


def build_discrimination_circuit(
    disc: DiscriminatorSet,
    ancillas: Sequence[int] | None = None,
    states: Sequence[int] | None = None,
) -> Circuit:
    """H - controlled-U_j - H on ancilla j, then measure it into bit j.

    By default the n ancillas occupy qubits 0..n-1 and the state register
    qubits n..2n-1.
    """
    n = disc.n_qubits
    ancillas = tuple(range(n)) if ancillas is None else tuple(ancillas)
    states = tuple(range(n, 2 * n)) if states is None else tuple(states)
    if len(ancillas) != n or len(states) != n:
        raise DimensionError(f"need {n} ancilla and {n} state qubits")
    ops: list[Instruction] = []
    for j, (a, u) in enumerate(zip(ancillas, disc.operators)):
        ops.append(Gate("H", (a,)))
        ops.append(Gate("CU", states, control=a, matrix=u))
        ops.append(Gate("H", (a,)))
        ops.append(Measure(a, j))
    width = max(ancillas + states) + 1
    return Circuit(width, ancillas, states, tuple(ops), n_clbits=n)
