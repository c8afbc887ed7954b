"""Mapping discrimination circuits onto directed coupling maps.

Controlled operators are first split into controlled single-qubit factors,
then every two-qubit gate is placed on a physical edge: CNOTs against the
edge direction are reversed with Hadamards, CZ becomes H-CNOT-H on whichever
direction exists, and CY becomes Sdg-CNOT-S. No SWAPs are ever inserted; a
gate between uncoupled physical qubits raises UnroutableError.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from os import PathLike
from typing import Iterable, Mapping, Sequence

import numpy as np

from orthodisc import linalg
from orthodisc.circuit import NATIVE, Circuit, Gate, Measure
from orthodisc.errors import UnroutableError, UnsupportedGateError


@dataclass(frozen=True)
class CouplingMap:
    n_physical: int
    edges: frozenset[tuple[int, int]]
    name: str = "custom"

    def __post_init__(self):
        edges = frozenset((int(c), int(t)) for c, t in self.edges)
        for c, t in edges:
            if c == t:
                raise ValueError(f"self-edge on qubit {c}")
            if not (0 <= c < self.n_physical and 0 <= t < self.n_physical):
                raise ValueError(f"edge {c}->{t} outside {self.n_physical} qubits")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_adjacency(cls, n_physical: int, adjacency: Mapping[int, Iterable[int]], name="custom"):
        """Build from ``{control: [targets, ...]}``."""
        return cls(n_physical, frozenset((c, t) for c, ts in adjacency.items() for t in ts), name)

    @classmethod
    def from_json(cls, source) -> "CouplingMap":
        """Load ``{"n_physical": int, "edges": [[c, t], ...]}`` from a dict or a path."""
        if isinstance(source, (str, PathLike)):
            with open(source) as fh:
                source = json.load(fh)
        try:
            n = int(source["n_physical"])
            edges = [tuple(e) for e in source["edges"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"coupling map needs n_physical and edges: {exc}") from exc
        if any(len(e) != 2 for e in edges):
            raise ValueError("every edge must be a [control, target] pair")
        return cls(n, frozenset(edges), source.get("name", "custom"))

    def coupled(self, a: int, b: int) -> bool:
        return (a, b) in self.edges or (b, a) in self.edges


IBMQX4 = CouplingMap.from_adjacency(5, {1: [0], 2: [0, 1, 4], 3: [2, 4]}, "ibmqx4")
IBMQX2 = CouplingMap.from_adjacency(5, {0: [1, 2], 1: [2], 3: [2, 4], 4: [2]}, "ibmqx2")
PRESETS = {"ibmqx2": IBMQX2, "ibmqx4": IBMQX4}

# (ancillas, state qubits) used on each device, keyed by register size.
# Two-qubit sets need ancilla 2 coupled to both state qubits, hence (3, 0).
DEVICE_LAYOUTS = {
    ("ibmqx4", 1): ((1,), (0,)),
    ("ibmqx2", 1): ((0,), (1,)),
    ("ibmqx4", 2): ((3, 0), (1, 2)),
    ("ibmqx2", 2): ((3, 0), (1, 2)),
}


@dataclass(frozen=True)
class Layout:
    """Physical qubit for each logical qubit (indexed by logical qubit)."""

    physical: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "physical", tuple(int(p) for p in self.physical))
        if len(set(self.physical)) != len(self.physical):
            raise ValueError(f"layout {self.physical} maps two logical qubits to one physical qubit")

    @classmethod
    def identity(cls, width: int) -> "Layout":
        return cls(tuple(range(width)))

    @classmethod
    def from_registers(cls, circuit: Circuit, ancillas: Sequence[int], states: Sequence[int]) -> "Layout":
        mapping = dict(zip(circuit.ancilla_qubits, ancillas))
        mapping.update(zip(circuit.state_qubits, states))
        if len(mapping) != circuit.width or len(ancillas) != len(circuit.ancilla_qubits) or len(states) != len(circuit.state_qubits):
            raise ValueError("layout must place every ancilla and state qubit")
        return cls(tuple(mapping[q] for q in range(circuit.width)))

    def __getitem__(self, q: int) -> int:
        return self.physical[q]


def resolve_device(device) -> CouplingMap | None:
    if device is None or isinstance(device, CouplingMap):
        return device
    if isinstance(device, str) and device in PRESETS:
        return PRESETS[device]
    if isinstance(device, (str, PathLike, dict)):
        return CouplingMap.from_json(device)
    raise ValueError(f"unknown device {device!r}")


def default_layout(circuit: Circuit, cmap: CouplingMap) -> Layout:
    """Identity for circuits already on the device, otherwise the standard placement for that device."""
    if circuit.width == cmap.n_physical:
        return Layout.identity(circuit.width)
    key = (cmap.name, len(circuit.ancilla_qubits))
    if key in DEVICE_LAYOUTS:
        anc, st = DEVICE_LAYOUTS[key]
        return Layout.from_registers(circuit, anc, st)
    if circuit.width <= cmap.n_physical:
        return Layout.identity(circuit.width)
    raise ValueError(f"circuit of width {circuit.width} does not fit {cmap.n_physical} physical qubits")


# -- controlled-operator decomposition -----------------------------------------

_PAULI_FACTORS = (("I", linalg.I2), ("X", linalg.X), ("Y", linalg.Y), ("Z", linalg.Z))


def _kron_factors(m: np.ndarray, tol: float) -> list[np.ndarray]:
    """Split ``m`` into 2x2 Kronecker factors, or raise UnsupportedGateError."""
    factors = []
    while m.shape[0] > 2:
        r = m.shape[0] // 2
        blocks = m.reshape(2, r, 2, r).transpose(0, 2, 1, 3).reshape(4, r * r)
        u, s, vh = np.linalg.svd(blocks)
        if s[1] > tol * s[0]:
            raise UnsupportedGateError("controlled operator is not a tensor product of single-qubit gates")
        factors.append(u[:, 0].reshape(2, 2) * np.sqrt(s[0]))
        m = vh[0].reshape(r, r) * np.sqrt(s[0])
    factors.append(m)
    return factors


def _identify(a: np.ndarray, tol: float) -> tuple[str, float | None, np.ndarray]:
    """Name a 2x2 factor (up to phase) as I, X, Y, Z or a real reflection R(theta)."""
    a = a / np.sqrt(abs(np.linalg.det(a)))
    for name, c in _PAULI_FACTORS:
        phase = np.vdot(c, a) / 2
        if abs(abs(phase) - 1) <= tol and linalg.max_norm(a - phase * c) <= tol:
            return name, None, c
    big = a[0, 0] if abs(a[0, 0]) >= abs(a[0, 1]) else a[0, 1]
    r = a * (abs(big) / big)
    if (
        linalg.max_norm(r.imag) <= tol
        and abs(r[1, 1] + r[0, 0]) <= tol
        and abs(r[1, 0] - r[0, 1]) <= tol
    ):
        theta = math.atan2(r[0, 1].real, r[0, 0].real)
        c, s = math.cos(theta), math.sin(theta)
        return "R", theta, np.array([[c, s], [s, -c]], dtype=complex)
    raise UnsupportedGateError("factor is neither a Pauli nor a real reflection")


_PHASE_GATES = {0: None, 1: "S", 2: "Z", 3: "SDG"}


def decompose_controlled(gate: Gate) -> list[Gate]:
    """Rewrite a CU gate into controlled single-qubit gates.

    Identity factors are dropped, X/Y/Z factors become CNOT/CY/CZ and a real
    reflection R(theta) becomes RY(-theta), CZ, RY(theta) on its target. A
    leftover phase of +-i or -1 on the controlled operator is put on the
    control as S, Sdg or Z. Non-CU gates are returned unchanged.
    """
    if gate.kind != "CU":
        return [gate]
    tol = max(linalg.TOL.validation, 1e-9)
    factors = _kron_factors(np.asarray(gate.matrix), tol)
    ctrl = gate.control
    out: list[Gate] = []
    canon = []
    for target, f in zip(gate.targets, factors):
        name, theta, c = _identify(f, tol)
        canon.append(c)
        if name == "X":
            out.append(Gate("CNOT", (target,), ctrl))
        elif name == "Y":
            out.append(Gate("CY", (target,), ctrl))
        elif name == "Z":
            out.append(Gate("CZ", (target,), ctrl))
        elif name == "R":
            out += [Gate("RY", (target,), angle=-theta), Gate("CZ", (target,), ctrl), Gate("RY", (target,), angle=theta)]
    k = linalg.kron_all(*canon)
    phase = np.vdot(k, gate.matrix) / k.shape[0]
    if linalg.max_norm(gate.matrix - phase * k) > tol:
        raise UnsupportedGateError("could not reassemble the controlled operator from its factors")
    quarter = np.angle(phase) / (math.pi / 2)
    if abs(quarter - round(quarter)) > tol:
        raise UnsupportedGateError(f"relative phase {np.angle(phase):.6g} on the control is not a multiple of pi/2")
    fix = _PHASE_GATES[round(quarter) % 4]
    if fix is not None:
        out.append(Gate(fix, (ctrl,)))
    return out


def decompose_circuit(circuit: Circuit) -> Circuit:
    ops = []
    for ins in circuit.instructions:
        ops.extend(decompose_controlled(ins) if isinstance(ins, Gate) else [ins])
    return circuit.with_instructions(ops)


# -- direction fixing ----------------------------------------------------------


def _cnot(control: int, target: int, cmap: CouplingMap, original: Gate) -> list[Gate]:
    if (control, target) in cmap.edges:
        return [Gate("CNOT", (target,), control)]
    if (target, control) in cmap.edges:
        hs = [Gate("H", (control,)), Gate("H", (target,))]
        return hs + [Gate("CNOT", (control,), target)] + hs
    raise UnroutableError(original, (control, target))


def rewrite_direction(circuit: Circuit, cmap: CouplingMap, layout: Layout | None = None) -> Circuit:
    """Place a native-gate circuit on ``cmap`` and fix two-qubit gate directions.

    The result lives on all ``cmap.n_physical`` qubits and uses only
    single-qubit gates and CNOTs along existing edges.
    """
    layout = default_layout(circuit, cmap) if layout is None else layout
    if len(layout.physical) != circuit.width:
        raise ValueError(f"layout covers {len(layout.physical)} qubits, circuit has {circuit.width}")
    if any(not 0 <= p < cmap.n_physical for p in layout.physical):
        raise ValueError(f"layout {layout.physical} leaves the {cmap.n_physical}-qubit device")
    ops: list = []
    for ins in circuit.instructions:
        if isinstance(ins, Measure):
            ops.append(ins.remap(layout))
            continue
        if ins.kind not in NATIVE:
            raise UnsupportedGateError(f"{ins.kind} must be decomposed before direction fixing")
        g = ins.remap(layout)
        if g.control is None:
            ops.append(g)
            continue
        c, t = g.control, g.targets[0]
        if g.kind == "CNOT":
            ops += _cnot(c, t, cmap, g)
        elif g.kind == "CZ":
            # symmetric: put the Hadamards on whichever qubit the edge targets
            if (c, t) in cmap.edges:
                ops += [Gate("H", (t,)), Gate("CNOT", (t,), c), Gate("H", (t,))]
            elif (t, c) in cmap.edges:
                ops += [Gate("H", (c,)), Gate("CNOT", (c,), t), Gate("H", (c,))]
            else:
                raise UnroutableError(g, (c, t))
        elif g.kind == "CY":
            ops += [Gate("SDG", (t,))] + _cnot(c, t, cmap, g) + [Gate("S", (t,))]
    return Circuit(
        cmap.n_physical,
        tuple(layout[q] for q in circuit.ancilla_qubits),
        tuple(layout[q] for q in circuit.state_qubits),
        tuple(ops),
        n_clbits=circuit.n_clbits,
    )


def transpile(circuit: Circuit, device=None, layout: Layout | Sequence[int] | None = None) -> Circuit:
    """Decompose every CU gate, then (if a device is given) map onto its coupling map.

    ``device`` is a preset name ("ibmqx2", "ibmqx4"), a CouplingMap, a JSON
    path, or None for decomposition only.
    """
    out = decompose_circuit(circuit)
    cmap = resolve_device(device)
    if cmap is None:
        return out
    if layout is not None and not isinstance(layout, Layout):
        layout = Layout(tuple(layout))
    return rewrite_direction(out, cmap, layout)
