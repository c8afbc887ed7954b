import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthodisc.errors import DimensionError, NotHermitianError, NotPSDError, ValidationError
from orthodisc.tomography import (
    DensityMatrix,
    PauliStats,
    UnphysicalStateWarning,
    avg_abs_deviation,
    fidelity,
    max_abs_deviation,
    metrics,
    reconstruct_single_qubit,
)

# Reference targets and measured matrices from hardware runs
ZERO = np.diag([1, 0]).astype(complex)
ZERO_MEASURED = np.array([[0.969, 0.045 - 0.027j], [0.045 + 0.027j, 0.031]])
ONE = np.diag([0, 1]).astype(complex)
ONE_MEASURED = np.array([[0.125, 0.045 - 0.031j], [0.045 + 0.031j, 0.875]])


def projector_probability(rho, vec):
    """Independent oracle: <v|rho|v> for an explicitly written basis vector."""
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return float(np.real(v.conj() @ rho @ v))


def oracle_stats(rho):
    return PauliStats(
        projector_probability(rho, [1, 1]),
        projector_probability(rho, [1, -1j]),
        projector_probability(rho, [1, 0]),
    )


def random_density(rng, dim, pure=False):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    if pure:
        v = a[:, 0] / np.linalg.norm(a[:, 0])
        return np.outer(v, v.conj())
    rho = a @ a.conj().T
    return rho / np.trace(rho)


class TestDensityMatrix:
    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            DensityMatrix([[1, 1], [0, 0]])

    def test_rejects_bad_trace(self):
        with pytest.raises(ValidationError):
            DensityMatrix(np.eye(2))

    def test_flags_negative_eigenvalue(self):
        assert not DensityMatrix([[1.1, 0], [0, -0.1]], role="experimental").physical

    def test_pure(self):
        dm = DensityMatrix.pure([0, 1])
        np.testing.assert_allclose(np.asarray(dm), ONE)
        assert dm.role == "theoretical" and dm.physical


class TestReconstruct:
    def test_pole_state(self):
        np.testing.assert_allclose(reconstruct_single_qubit(PauliStats(0.5, 0.5, 1.0)).data, ZERO, atol=1e-15)

    def test_reproduces_printed_experimental_matrix(self):
        rho = reconstruct_single_qubit(PauliStats(0.545, 0.473, 0.969))
        assert np.max(np.abs(rho.data - ZERO_MEASURED)) <= 5e-4
        assert rho.role == "experimental"

    def test_near_one_example(self):
        rho = reconstruct_single_qubit(PauliStats(0.51, 0.49, 0.082)).data
        assert rho[0, 0] == pytest.approx(0.082)
        assert rho[0, 1] == pytest.approx(0.01 - 0.01j)
        assert rho[1, 0] == pytest.approx(0.01 + 0.01j)

    def test_matches_projector_oracle_axes(self):
        # +1 eigenstates of X, Y, Z each reconstruct from their own oracle statistics
        for vec in ([1, 1], [1, 1j], [1, 0]):
            v = np.asarray(vec, dtype=complex) / np.linalg.norm(vec)
            rho = np.outer(v, v.conj())
            np.testing.assert_allclose(reconstruct_single_qubit(oracle_stats(rho)).data, rho, atol=1e-12)

    def test_unphysical_flagged_and_warned(self):
        with pytest.warns(UnphysicalStateWarning):
            rho = reconstruct_single_qubit(PauliStats(1.0, 1.0, 1.0))
        assert not rho.physical
        assert np.trace(rho.data) == pytest.approx(1)

    def test_physical_does_not_warn(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            reconstruct_single_qubit(PauliStats(0.545, 0.473, 0.969))

    def test_stats_range(self):
        with pytest.raises(ValueError):
            PauliStats(1.2, 0.5, 0.5)

    @settings(max_examples=100)
    @given(st.integers(0, 2**32 - 1))
    def test_round_trip(self, seed):
        rho = random_density(np.random.default_rng(seed), 2)
        got = reconstruct_single_qubit(oracle_stats(rho)).data
        assert np.max(np.abs(got - rho)) <= 1e-12

    @settings(max_examples=50)
    @given(st.integers(0, 2**32 - 1))
    def test_from_state_agrees_with_oracle(self, seed):
        rho = random_density(np.random.default_rng(seed), 2)
        a, b = PauliStats.from_state(rho), oracle_stats(rho)
        assert (a.px0, a.py0, a.pz0) == pytest.approx((b.px0, b.py0, b.pz0), abs=1e-14)


class TestFidelity:
    @pytest.mark.parametrize(
        "target, measured, expected",
        [
            (ZERO, ZERO_MEASURED, math.sqrt(0.969)),
            (ONE, ONE_MEASURED, math.sqrt(0.875)),
        ],
    )
    def test_printed_pairs(self, target, measured, expected):
        assert fidelity(target, measured) == pytest.approx(expected, abs=1e-9)

    def test_orthogonal_pure_states(self):
        assert fidelity(ZERO, ONE) == pytest.approx(0, abs=1e-9)

    @settings(max_examples=50)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4]))
    def test_self_fidelity(self, seed, dim):
        rho = random_density(np.random.default_rng(seed), dim)
        assert fidelity(rho, rho) == pytest.approx(1, abs=1e-9)

    @settings(max_examples=50)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4]))
    def test_symmetric(self, seed, dim):
        rng = np.random.default_rng(seed)
        a, b = random_density(rng, dim), random_density(rng, dim)
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-9)

    @settings(max_examples=50)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4]))
    def test_pure_target_closed_form(self, seed, dim):
        rng = np.random.default_rng(seed)
        psi_rho = random_density(rng, dim, pure=True)
        w, v = np.linalg.eigh(psi_rho)
        psi = v[:, -1]
        rho = random_density(rng, dim)
        expected = math.sqrt(max(0.0, float(np.real(psi.conj() @ rho @ psi))))
        f = fidelity(psi_rho, rho)
        assert f == pytest.approx(expected, abs=1e-9)
        assert 0 <= f <= 1 + 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            fidelity(ZERO, np.eye(4) / 4)

    def test_raw_non_psd_rejected(self):
        with pytest.raises(NotPSDError):
            fidelity(ZERO, np.array([[1.2, 0], [0, -0.2]]))

    def test_flagged_unphysical_is_clamped(self):
        bad = DensityMatrix([[1.05, 0], [0, -0.05]], role="experimental")
        assert not bad.physical
        f = fidelity(DensityMatrix(ZERO), bad)
        assert math.isfinite(f) and f == pytest.approx(math.sqrt(1.05))


class TestDeviation:
    def test_identical(self):
        assert avg_abs_deviation(ZERO_MEASURED, ZERO_MEASURED) == 0
        assert max_abs_deviation(ZERO_MEASURED, ZERO_MEASURED) == 0

    def test_first_pair(self):
        off = abs(0.045 - 0.027j)
        assert max_abs_deviation(ZERO, ZERO_MEASURED) == pytest.approx(off)
        assert avg_abs_deviation(ZERO, ZERO_MEASURED) == pytest.approx((0.031 + 2 * off + 0.031) / 4)

    def test_second_pair(self):
        off = abs(0.045 - 0.031j)
        assert avg_abs_deviation(ONE, ONE_MEASURED) == pytest.approx((0.125 + 2 * off + 0.125) / 4)
        assert max_abs_deviation(ONE, ONE_MEASURED) == pytest.approx(0.125)

    def test_modulus_keeps_imaginary_part(self):
        assert max_abs_deviation(np.zeros((2, 2)), np.array([[0, 0.3j], [0, 0]])) == pytest.approx(0.3)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            avg_abs_deviation(ZERO, np.eye(4))

    @settings(max_examples=50)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4]))
    def test_avg_bounded_by_max(self, seed, dim):
        rng = np.random.default_rng(seed)
        a, b = random_density(rng, dim), random_density(rng, dim)
        assert 0 <= avg_abs_deviation(a, b) <= max_abs_deviation(a, b)

    @settings(max_examples=30)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4]))
    def test_unit_fidelity_means_zero_deviation(self, seed, dim):
        rho = random_density(np.random.default_rng(seed), dim, pure=True)
        m = metrics(rho, rho.copy())
        assert m["fidelity"] == pytest.approx(1, abs=1e-9)
        assert m["avg_abs_dev"] <= 1e-8 and m["max_abs_dev"] <= 1e-8


def test_metrics_record_keys():
    assert set(metrics(ZERO, ZERO_MEASURED)) == {"fidelity", "avg_abs_dev", "max_abs_dev"}
