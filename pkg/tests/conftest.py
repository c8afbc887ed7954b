import math

import numpy as np
import pytest

from orthodisc import discriminator as dsc
from orthodisc.circuit import build_discrimination_circuit

R2 = 1 / math.sqrt(2)

# filled by test_acceptance.py, printed at the end of the session
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0][2:])):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


@pytest.fixture
def hadamard_disc():
    return dsc.discriminator([[R2, R2], [R2, -R2]])


@pytest.fixture
def two_qubit_disc():
    return dsc.family_two(R2, R2)[1]


@pytest.fixture
def bell_disc():
    return dsc.bell_set()


@pytest.fixture
def hadamard_circuit(hadamard_disc):
    return build_discrimination_circuit(hadamard_disc)


def random_orthonormal(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, _ = np.linalg.qr(a)
    return [q[:, i] for i in range(dim)]
