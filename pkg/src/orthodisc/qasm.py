"""OpenQASM 2.0 emission and a small parser for reading it back."""

from __future__ import annotations

import math
import re
import warnings

from orthodisc.circuit import Circuit, Gate, Measure
from orthodisc.errors import UnsupportedGateError

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";'

MNEMONIC = {
    "H": "h",
    "X": "x",
    "Y": "y",
    "Z": "z",
    "S": "s",
    "SDG": "sdg",
    "RY": "ry",
    "CNOT": "cx",
    "CZ": "cz",
    "CY": "cy",
}
KIND = {v: k for k, v in MNEMONIC.items()}


def format_angle(theta: float) -> str:
    return f"{theta:.15g}"


def export_qasm(circuit: Circuit) -> str:
    """Serialize ``circuit`` as an OpenQASM 2.0 program (one ``q`` and one ``c`` register).

    CU gates are decomposed on the fly with a warning; transpile first to
    avoid that.
    """
    if any(isinstance(i, Gate) and i.kind == "CU" for i in circuit.instructions):
        from orthodisc.transpiler import decompose_circuit

        warnings.warn("circuit contains CU gates; decomposing before export", stacklevel=2)
        circuit = decompose_circuit(circuit)
    lines = [HEADER, f"qreg q[{circuit.width}];"]
    if circuit.n_clbits:
        lines.append(f"creg c[{circuit.n_clbits}];")
    for ins in circuit.instructions:
        if isinstance(ins, Measure):
            lines.append(f"measure q[{ins.qubit}] -> c[{ins.clbit}];")
            continue
        if ins.kind not in MNEMONIC:
            raise UnsupportedGateError(f"no OpenQASM 2.0 mnemonic for {ins.kind}")
        name = MNEMONIC[ins.kind]
        if ins.angle is not None:
            name += f"({format_angle(ins.angle)})"
        qubits = ",".join(f"q[{q}]" for q in ins.qubits)
        lines.append(f"{name} {qubits};")
    return "\n".join(lines) + "\n"


_REG = re.compile(r"^(qreg|creg)\s+(\w+)\s*\[\s*(\d+)\s*\]$")
_MEASURE = re.compile(r"^measure\s+(\w+)\s*\[\s*(\d+)\s*\]\s*->\s*(\w+)\s*\[\s*(\d+)\s*\]$")
_GATE = re.compile(r"^([a-z]+)\s*(?:\(([^)]*)\))?\s+(.+)$")
_ARG = re.compile(r"^(\w+)\s*\[\s*(\d+)\s*\]$")


def _angle(expr: str, lineno: int) -> float:
    expr = expr.strip()
    if not re.fullmatch(r"[0-9eE.+\-*/ ()pi]+", expr):
        raise ValueError(f"line {lineno}: cannot evaluate angle {expr!r}")
    return float(eval(expr, {"__builtins__": {}}, {"pi": math.pi}))


def parse_qasm(text: str, ancilla_qubits=None, state_qubits=()) -> Circuit:
    """Read the OpenQASM 2.0 subset written by ``export_qasm``.

    Without ``ancilla_qubits`` the measured qubits are taken as the ancillas.
    """
    width = clbits = None
    ops: list = []
    statements = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0]
        statements += [(lineno, s.strip()) for s in line.split(";") if s.strip()]
    for lineno, stmt in statements:
        if stmt.startswith("OPENQASM"):
            if stmt.split()[1] != "2.0":
                raise ValueError(f"line {lineno}: unsupported version {stmt}")
            continue
        if stmt.startswith("include") or stmt.startswith("barrier"):
            continue
        if m := _REG.match(stmt):
            if m.group(1) == "qreg":
                width = int(m.group(3))
            else:
                clbits = int(m.group(3))
            continue
        if m := _MEASURE.match(stmt):
            ops.append(Measure(int(m.group(2)), int(m.group(4))))
            continue
        m = _GATE.match(stmt)
        if not m or m.group(1) not in KIND:
            raise ValueError(f"line {lineno}: unrecognized statement {stmt!r}")
        kind = KIND[m.group(1)]
        qs = []
        for arg in m.group(3).split(","):
            a = _ARG.match(arg.strip())
            if not a:
                raise ValueError(f"line {lineno}: bad qubit argument {arg!r}")
            qs.append(int(a.group(2)))
        angle = _angle(m.group(2), lineno) if m.group(2) is not None else None
        if kind in ("CNOT", "CZ", "CY"):
            ops.append(Gate(kind, (qs[1],), control=qs[0]))
        else:
            ops.append(Gate(kind, (qs[0],), angle=angle))
    if width is None:
        raise ValueError("no qreg declaration")
    if ancilla_qubits is None:
        ancilla_qubits = tuple(dict.fromkeys(o.qubit for o in ops if isinstance(o, Measure)))
    return Circuit(width, tuple(ancilla_qubits), tuple(state_qubits), tuple(ops), n_clbits=clbits or 0)
