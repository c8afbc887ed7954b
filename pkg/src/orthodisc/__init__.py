"""Non-destructive discrimination of orthogonal quantum states.

Synthesizes phase-kickback discrimination circuits for sets of 2**n orthogonal
n-qubit states, simulates them with shot sampling and optional noise, maps them
onto directed coupling maps, and computes single-qubit tomography metrics.
"""

from orthodisc.errors import (
    DimensionError,
    DiscriminationError,
    EigenvalueArrayError,
    NoMatchError,
    NotHermitianError,
    NotPSDError,
    OrthogonalityError,
    UnroutableError,
    UnsupportedGateError,
    ValidationError,
)
from orthodisc.discriminator import (
    DiscriminatorSet,
    EigenvalueArraySet,
    OrthogonalStateSet,
    bell_set,
    build_operators,
    decode_signature,
    default_eigenvalue_arrays,
    family_single,
    family_two,
    validate_eigenvalue_arrays,
    validate_state_set,
)
from orthodisc.circuit import Circuit, Gate, build_discrimination_circuit
from orthodisc.simulator import (
    NoiseModel,
    ShotHistogram,
    post_measurement_state,
    run_shots,
    simulate,
)
from orthodisc.tomography import (
    DensityMatrix,
    PauliStats,
    avg_abs_deviation,
    fidelity,
    max_abs_deviation,
    reconstruct_single_qubit,
)
from orthodisc.transpiler import (
    IBMQX2,
    IBMQX4,
    CouplingMap,
    Layout,
    decompose_controlled,
    rewrite_direction,
    transpile,
)
from orthodisc.qasm import export_qasm, parse_qasm

__version__ = "0.1.0"
