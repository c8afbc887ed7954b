"""Command-line interface: ``orthodisc {validate,run,tomo,export}``.

Exit status: 0 success, 2 unreadable input, 3 failed validation,
4 unroutable on the chosen device, 5 any other runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from collections import Counter
from pathlib import Path

import numpy as np

from orthodisc import __version__
from orthodisc import discriminator as dsc
from orthodisc import files
from orthodisc.circuit import build_discrimination_circuit
from orthodisc.errors import DiscriminationError, UnroutableError, UnsupportedGateError, ValidationError
from orthodisc.qasm import export_qasm
from orthodisc.simulator import NoiseModel, post_measurement_state, run_shots
from orthodisc.tomography import DensityMatrix, metrics, reconstruct_single_qubit
from orthodisc.transpiler import Layout, resolve_device, transpile

log = logging.getLogger("orthodisc")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_UNROUTABLE = 4
EXIT_RUNTIME = 5

NAMED_TARGETS = {
    "0": [1, 0],
    "1": [0, 1],
    "+": [1 / np.sqrt(2), 1 / np.sqrt(2)],
    "-": [1 / np.sqrt(2), -1 / np.sqrt(2)],
}


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _emit(record: dict, args, table_lines: list[str]) -> None:
    text = files.dumps(record) if args.format == "json" else "\n".join(table_lines) + "\n"
    if getattr(args, "out", None) and args.command != "export":
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _noise(args) -> NoiseModel:
    try:
        return NoiseModel(args.noise_readout, args.noise_depol1, args.noise_depol2)
    except ValueError as exc:
        raise CLIError(str(exc), EXIT_PARSE) from exc


def _layout(args):
    if not args.layout:
        return None
    try:
        return Layout(tuple(int(p) for p in args.layout.split(",")))
    except ValueError as exc:
        raise CLIError(f"--layout: {exc}", EXIT_PARSE) from exc


def _device(args):
    if not args.device:
        return None
    try:
        return resolve_device(args.device)
    except (OSError, ValueError) as exc:
        raise CLIError(f"--device: {exc}", EXIT_PARSE) from exc


def _config(args) -> dict:
    return {
        "shots": args.shots,
        "seed": args.seed,
        "noise": {
            "readout_flip": args.noise_readout,
            "depol1": args.noise_depol1,
            "depol2": args.noise_depol2,
        },
        "device": args.device,
        "layout": args.layout,
    }


def _input_record(path, digest: str) -> dict:
    return {"path": str(path), "sha256": digest}


def _compile(spec: files.StateSetFile, args):
    disc = spec.build()
    circuit = build_discrimination_circuit(disc)
    device, layout = _device(args), _layout(args)
    if layout is not None and device is None:
        raise CLIError("--layout needs --device", EXIT_PARSE)
    if device is not None:
        circuit = transpile(circuit, device, layout)
    return disc, circuit


def cmd_validate(args) -> int:
    spec = files.load_state_set(args.input)
    checks: dict[str, str] = {}
    errors = []
    n = spec.n_qubits
    state_set = None
    try:
        if spec.family is not None:
            state_set = spec.build().state_set
        else:
            state_set = dsc.validate_state_set(spec.states, n)
        checks["states"] = "ok"
    except ValidationError as exc:
        checks["states"] = "failed"
        errors.append({"check": "states", "message": str(exc), **_error_detail(exc)})
    try:
        arrays = spec.arrays() if spec.family is None else spec.build().arrays
        checks["eigenvalue_arrays"] = "ok"
    except (ValidationError, ValueError) as exc:
        arrays = None
        checks["eigenvalue_arrays"] = "failed"
        errors.append({"check": "eigenvalue_arrays", "message": str(exc), **_error_detail(exc)})
    if state_set is not None and arrays is not None:
        try:
            dsc.build_operators(state_set, arrays)
            checks["operators"] = "ok"
        except ValidationError as exc:
            checks["operators"] = "failed"
            errors.append({"check": "operators", "message": str(exc)})
    valid = not errors
    record = {
        "command": "validate",
        "input": _input_record(args.input, spec.sha256),
        "n_qubits": n,
        "valid": valid,
        "checks": checks,
        "errors": errors,
    }
    lines = [f"input: {args.input}", f"n_qubits: {n}"]
    lines += [f"{k}: {v}" for k, v in checks.items()]
    lines += [f"error ({e['check']}): {e['message']}" for e in errors]
    lines.append("valid" if valid else "INVALID")
    _emit(record, args, lines)
    return EXIT_OK if valid else EXIT_VALIDATION


def _error_detail(exc) -> dict:
    detail = {}
    if hasattr(exc, "indices"):
        detail["states"] = [i + 1 for i in exc.indices]
        detail["overlap"] = exc.overlap
    if getattr(exc, "rows", ()):
        detail["rows"] = [r + 1 for r in exc.rows]
    if getattr(exc, "states", ()):
        detail["states"] = [i + 1 for i in exc.states]
    return detail


def cmd_run(args) -> int:
    spec = files.load_state_set(args.input)
    disc, circuit = _compile(spec, args)
    dim = 2**disc.n_qubits
    if not 1 <= args.state <= dim:
        raise CLIError(f"--state must be between 1 and {dim}", EXIT_PARSE)
    psi = disc.state_set[args.state - 1]
    overlaps: list[float] = []
    seen: dict[int, tuple[np.ndarray, float]] = {}

    def track(_, traj):
        # noiseless shots share final-state arrays; the stored reference keeps ids unique
        key = id(traj.state)
        if key not in seen:
            post = post_measurement_state(traj.state, circuit.state_qubits)
            seen[key] = (traj.state, float(abs(np.vdot(psi, post))))
        overlaps.append(seen[key][1])

    hist = run_shots(circuit, psi, args.shots, args.seed, _noise(args), on_shot=track)
    seen.clear()
    top = max(hist.counts.values())
    tied = [k for k, c in hist.counts.items() if c == top]
    # ties go to the lowest state index, not the lowest bit string
    decoded, majority = min((dsc.decode_signature(disc.arrays, [int(b) for b in k]) + 1, k) for k in tied)
    expected = "".join(map(str, disc.arrays.signature(args.state - 1)))
    ancilla = [dict(zip(("0", "1"), hist.marginal(j))) for j in range(disc.n_qubits)]
    record = {
        "command": "run",
        "version": __version__,
        "input": _input_record(args.input, spec.sha256),
        "config": _config(args),
        "state": args.state,
        "expected_signature": expected,
        "counts": hist.counts,
        "probabilities": hist.probabilities(),
        "ancilla_probabilities": ancilla,
        "majority": majority,
        "majority_tie": len(tied) > 1,
        "decoded_state": decoded,
        "correct": decoded == args.state,
        "post_measurement_overlap": {"mean": float(np.mean(overlaps)), "min": float(np.min(overlaps))},
        "gates": len(circuit.gates),
    }
    lines = [
        f"input: {args.input}  state: {args.state}  shots: {args.shots}  seed: {args.seed}",
        f"device: {args.device or 'none'}",
        "outcome  count  probability",
    ]
    lines += [f"{k:>7}  {c:>5}  {c / hist.shots:.4f}" for k, c in hist.counts.items()]
    for j, p in enumerate(ancilla):
        lines.append(f"ancilla {j + 1}: P(0) = {p['0']:.4f}  P(1) = {p['1']:.4f}")
    lines.append(f"decoded state: {decoded} (expected signature {expected}, majority {majority}"
                 + (", tie broken toward lower index)" if len(tied) > 1 else ")"))
    lines.append(f"post-measurement overlap: mean {np.mean(overlaps):.10f}  min {np.min(overlaps):.10f}")
    _emit(record, args, lines)
    return EXIT_OK


def _target(args, data: dict) -> np.ndarray:
    if args.target is not None:
        if args.target in NAMED_TARGETS:
            return DensityMatrix.pure(NAMED_TARGETS[args.target]).data
        tdata, _ = files.load_json(args.target)
        return files.matrix_from_json(tdata, f"{args.target}")
    if "target" in data:
        return files.matrix_from_json(data["target"], f"{args.input}: target")
    return DensityMatrix.pure(NAMED_TARGETS["0"]).data


def cmd_tomo(args) -> int:
    stats, data, digest = files.load_pauli_stats(args.input)
    try:
        rho_t = DensityMatrix(_target(args, data))
    except (ValueError, OSError) as exc:
        raise CLIError(f"target: {exc}", EXIT_PARSE) from exc
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rho_e = reconstruct_single_qubit(stats)
    m = metrics(rho_t, rho_e)
    record = {
        "command": "tomo",
        "version": __version__,
        "input": _input_record(args.input, digest),
        "stats": {"px0": stats.px0, "py0": stats.py0, "pz0": stats.pz0, "shots": stats.shots},
        "theoretical": files.matrix_to_json(rho_t.data),
        "reconstructed": files.matrix_to_json(rho_e.data),
        "physical": rho_e.physical,
        **m,
    }
    r = rho_e.data
    lines = [
        f"reconstructed density matrix ({'physical' if rho_e.physical else 'UNPHYSICAL'}):",
        f"  [{r[0, 0].real:.4f}, {r[0, 1].real:+.4f}{r[0, 1].imag:+.4f}i]",
        f"  [{r[1, 0].real:+.4f}{r[1, 0].imag:+.4f}i, {r[1, 1].real:.4f}]",
        f"fidelity: {m['fidelity']:.5f}",
        f"average absolute deviation: {m['avg_abs_dev']:.5f}",
        f"maximum absolute deviation: {m['max_abs_dev']:.5f}",
    ]
    _emit(record, args, lines)
    return EXIT_OK


def cmd_export(args) -> int:
    spec = files.load_state_set(args.input)
    _, circuit = _compile(spec, args)
    if not args.device:
        circuit = transpile(circuit)
    text = export_qasm(circuit)
    counts = Counter(g.kind for g in circuit.gates)
    summary = f"{len(circuit.gates)} gates: " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    if args.out:
        Path(args.out).write_text(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return EXIT_OK


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--out", help="write output here instead of stdout")


def _run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shots", type=int, default=8192)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-readout", type=float, default=0.0)
    p.add_argument("--noise-depol1", type=float, default=0.0)
    p.add_argument("--noise-depol2", type=float, default=0.0)


def _device_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--device", help="ibmqx2, ibmqx4 or a coupling-map JSON file")
    p.add_argument("--layout", help="comma-separated physical qubits for ancillas then state qubits")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orthodisc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a state set and its eigenvalue arrays")
    p.add_argument("input")
    _common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="simulate the discrimination circuit on one member of the set")
    p.add_argument("input")
    p.add_argument("--state", type=int, default=1, help="1-based index of the input state")
    _run_options(p)
    _device_options(p)
    _common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("tomo", help="reconstruct a single-qubit density matrix and compare")
    p.add_argument("input")
    p.add_argument("--target", help="0, 1, +, - or a JSON matrix file (default: stats file 'target' or 0)")
    _common(p)
    p.set_defaults(func=cmd_tomo)

    p = sub.add_parser("export", help="write the (transpiled) circuit as OpenQASM 2.0")
    p.add_argument("input")
    _device_options(p)
    p.add_argument("--out", help="QASM output path (default stdout)")
    p.set_defaults(func=cmd_export, format="table")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    if getattr(args, "shots", 1) < 1:
        print("error: --shots must be >= 1", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (files.FileFormatError, OSError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UnroutableError as exc:
        print(f"unroutable: {exc}", file=sys.stderr)
        return EXIT_UNROUTABLE
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DiscriminationError, UnsupportedGateError, ValueError) as exc:
        log.debug("runtime failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
