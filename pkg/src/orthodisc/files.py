"""JSON file formats: state-set inputs, Pauli statistics and result records.

Complex numbers are always written as ``[re, im]`` pairs.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from orthodisc import discriminator as dsc
from orthodisc.tomography import PauliStats


class FileFormatError(ValueError):
    """A file could not be parsed; the message names the offending field."""


@dataclass(frozen=True)
class StateSetFile:
    n_qubits: int
    states: tuple[np.ndarray, ...] | None = None
    eigenvalue_arrays: tuple[tuple[int, ...], ...] | None = None
    family: dict | None = None
    sha256: str = ""

    def build(self) -> dsc.DiscriminatorSet:
        """Validate and synthesize the discriminator this file describes."""
        if self.family is not None:
            kind = self.family["kind"]
            if kind == "bell":
                return dsc.bell_set()
            fn = dsc.family_single if kind == "single" else dsc.family_two
            return fn(self.family["alpha"], self.family["beta"])[1]
        state_set = dsc.validate_state_set(self.states, self.n_qubits)
        arrays = self.arrays()
        return dsc.build_operators(state_set, arrays)

    def arrays(self) -> dsc.EigenvalueArraySet:
        if self.eigenvalue_arrays is None:
            return dsc.default_eigenvalue_arrays(self.n_qubits)
        return dsc.validate_eigenvalue_arrays(self.eigenvalue_arrays)


def _load_json(path) -> tuple[Any, str]:
    raw = Path(path).read_bytes()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    except UnicodeDecodeError as exc:
        raise FileFormatError(f"{path}: not UTF-8 text") from exc
    return data, hashlib.sha256(raw).hexdigest()


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise FileFormatError(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def complex_from_json(value, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(_number(value, where))
    if not isinstance(value, list) or len(value) != 2:
        raise FileFormatError(f"{where}: expected an [re, im] pair, got {value!r}")
    return complex(_number(value[0], where + "[0]"), _number(value[1], where + "[1]"))


def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    # normalize -0.0 so records are byte-stable
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def matrix_to_json(m) -> list:
    return [[complex_to_json(z) for z in row] for row in np.asarray(m)]


def matrix_from_json(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise FileFormatError(f"{where}: expected a list of rows")
    return np.array(
        [[complex_from_json(z, f"{where}[{i}][{j}]") for j, z in enumerate(row)] for i, row in enumerate(value)]
    )


def parse_state_set(data: dict, source: str = "<input>", sha256: str = "") -> StateSetFile:
    if not isinstance(data, dict):
        raise FileFormatError(f"{source}: top level must be a JSON object")
    has_states, has_family = "states" in data, "family" in data
    if has_states == has_family:
        raise FileFormatError(f"{source}: give exactly one of 'states' or 'family'")
    family = None
    states = None
    if has_family:
        fam = data["family"]
        if not isinstance(fam, dict) or fam.get("kind") not in ("single", "two", "bell"):
            raise FileFormatError(f"{source}: family.kind must be 'single', 'two' or 'bell'")
        family = {"kind": fam["kind"]}
        if fam["kind"] != "bell":
            if "alpha" not in fam:
                raise FileFormatError(f"{source}: family.alpha is required")
            alpha = _number(fam["alpha"], f"{source}: family.alpha")
            if "beta" in fam:
                beta = _number(fam["beta"], f"{source}: family.beta")
            else:
                beta = math.sqrt(max(0.0, 1 - alpha**2))
            family.update(alpha=alpha, beta=beta)
        n_default = 1 if fam["kind"] == "single" else 2
    else:
        raw = data["states"]
        if not isinstance(raw, list) or not raw:
            raise FileFormatError(f"{source}: 'states' must be a non-empty list")
        states = []
        for i, amps in enumerate(raw):
            if not isinstance(amps, list):
                raise FileFormatError(f"{source}: states[{i}] must be a list of amplitudes")
            states.append(np.array([complex_from_json(z, f"{source}: states[{i}][{k}]") for k, z in enumerate(amps)]))
        n_default = max(1, len(states).bit_length() - 1)
    n = data.get("n_qubits", n_default)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise FileFormatError(f"{source}: n_qubits must be a positive integer, got {n!r}")
    arrays = None
    if "eigenvalue_arrays" in data:
        raw = data["eigenvalue_arrays"]
        if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
            raise FileFormatError(f"{source}: eigenvalue_arrays must be a list of rows")
        for j, row in enumerate(raw):
            for k, e in enumerate(row):
                if isinstance(e, bool) or e not in (1, -1):
                    raise FileFormatError(f"{source}: eigenvalue_arrays[{j}][{k}] must be +1 or -1, got {e!r}")
        if has_family:
            raise FileFormatError(f"{source}: eigenvalue_arrays cannot be combined with a family")
        arrays = tuple(tuple(int(e) for e in row) for row in raw)
    return StateSetFile(n, None if states is None else tuple(states), arrays, family, sha256)


def load_state_set(path) -> StateSetFile:
    data, digest = _load_json(path)
    return parse_state_set(data, str(path), digest)


def parse_pauli_stats(data: dict, source: str = "<input>") -> PauliStats:
    if not isinstance(data, dict):
        raise FileFormatError(f"{source}: top level must be a JSON object")
    missing = [k for k in ("px0", "py0", "pz0") if k not in data]
    if missing:
        raise FileFormatError(f"{source}: missing basis probabilities {', '.join(missing)}")
    probs = []
    for k in ("px0", "py0", "pz0"):
        p = _number(data[k], f"{source}: {k}")
        if not 0 <= p <= 1:
            raise FileFormatError(f"{source}: {k} = {p} is not a probability")
        probs.append(p)
    shots = data.get("shots", 8192)
    if isinstance(shots, bool) or not isinstance(shots, int) or shots < 1:
        raise FileFormatError(f"{source}: shots must be a positive integer")
    return PauliStats(*probs, shots=shots)


def load_pauli_stats(path) -> tuple[PauliStats, dict, str]:
    data, digest = _load_json(path)
    return parse_pauli_stats(data, str(path)), data, digest


def load_json(path) -> tuple[Any, str]:
    return _load_json(path)


def dumps(record: dict) -> str:
    return json.dumps(record, indent=2, sort_keys=True) + "\n"
