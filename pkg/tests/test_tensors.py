"""Labeled tensor algebra: frozen matrix values plus structural properties."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pointerlab.tensors import (
    DensityMatrix,
    DimensionSpec,
    Operator,
    StateVector,
    eigh,
    embed,
    expectation,
    kron_operators,
    kron_states,
    partial_trace,
    pure_density,
    schmidt,
    trace_distance,
    unitary_from_generator,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

Q = DimensionSpec.of(("q", 2))
R = DimensionSpec.of(("r", 2))


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def _random_state(rng, dims: DimensionSpec) -> StateVector:
    v = rng.normal(size=dims.total) + 1j * rng.normal(size=dims.total)
    return StateVector(dims, v / np.linalg.norm(v))


def _random_unitary(rng, n: int) -> np.ndarray:
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestDimensionSpec:
    def test_lookup(self):
        dims = DimensionSpec.of(("s", 2), ("A", 16), ("B", 8))
        assert dims.labels == ("s", "A", "B")
        assert dims.sizes == (2, 16, 8)
        assert dims.total == 256
        assert dims.axis("B") == 2
        assert dims.dim("A") == 16
        assert dims.subset(["B", "s"]).labels == ("s", "B")

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            DimensionSpec.of(("s", 2), ("s", 3))

    def test_unknown_label_rejected(self):
        with pytest.raises(KeyError):
            DimensionSpec.of(("s", 2)).axis("t")


class TestConstructorValidation:
    def test_operator_rejects_false_hermitian_claim(self):
        with pytest.raises(ValueError, match="Hermitian"):
            Operator(Q, np.array([[0, 1], [0, 0]], dtype=complex), hermitian=True)

    def test_state_rejects_wrong_norm(self):
        with pytest.raises(ValueError, match="norm"):
            StateVector(Q, np.array([1.0, 1.0]))

    def test_unnormalized_state_allowed_when_flagged(self):
        StateVector(Q, np.array([1.0, 1.0]), normalized=False)

    def test_density_rejects_negative_spectrum(self):
        m = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(ValueError, match="eigenvalue"):
            DensityMatrix(Q, m)

    def test_density_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(Q, np.diag([0.7, 0.7]).astype(complex))

    def test_density_unnormalized_trace_allowed(self):
        DensityMatrix(Q, np.diag([0.7, 0.7]).astype(complex), normalized=False)

    def test_density_rejects_nonhermitian(self):
        m = np.array([[0.5, 0.3], [0.0, 0.5]], dtype=complex)
        with pytest.raises(ValueError, match="Hermiticity"):
            DensityMatrix(Q, m)


class TestKron:
    def test_sigma_x_kron_sigma_z_frozen(self):
        got = kron_operators(Operator(Q, SX, hermitian=True), Operator(R, SZ, hermitian=True))
        expected = np.array(
            [
                [0, 0, 1, 0],
                [0, 0, 0, -1],
                [1, 0, 0, 0],
                [0, -1, 0, 0],
            ],
            dtype=complex,
        )
        assert got.dims.labels == ("q", "r")
        np.testing.assert_array_equal(got.matrix, expected)

    def test_kron_states_index_order(self):
        a = StateVector(Q, np.array([1.0, 0.0]))
        b = StateVector(R, np.array([0.0, 1.0]))
        joint = kron_states(a, b)
        # |0>_q |1>_r sits at flat index 0*2 + 1
        np.testing.assert_array_equal(joint.amplitudes, [0, 1, 0, 0])

    def test_label_collision_rejected(self):
        a = StateVector(Q, np.array([1.0, 0.0]))
        with pytest.raises(ValueError, match="duplicate"):
            kron_states(a, a)


class TestPartialTrace:
    def test_bell_reduces_to_maximally_mixed(self):
        dims = Q.merge(R)
        bell = StateVector(dims, np.array([1, 0, 0, 1]) / np.sqrt(2))
        reduced = partial_trace(pure_density(bell), keep=["q"])
        np.testing.assert_allclose(reduced.matrix, np.eye(2) / 2, atol=1e-14)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_product_state_reduces_to_own_density(self, seed):
        rng = _rng(seed)
        a = _random_state(rng, Q)
        b = _random_state(rng, R)
        reduced = partial_trace(pure_density(kron_states(a, b)), keep=["q"])
        np.testing.assert_allclose(
            reduced.matrix, pure_density(a).matrix, atol=1e-12
        )

    def test_keep_order_follows_dims(self):
        dims = DimensionSpec.of(("a", 2), ("b", 3), ("c", 2))
        rng = _rng(7)
        rho = pure_density(_random_state(rng, dims))
        reduced = partial_trace(rho, keep=["c", "a"])
        assert reduced.dims.labels == ("a", "c")
        assert abs(reduced.trace - 1.0) < 1e-12


class TestEigh:
    def test_sigma_x_frozen(self):
        w, v = eigh(Operator(Q, SX, hermitian=True))
        np.testing.assert_allclose(w, [-1.0, 1.0], atol=1e-14)
        # eigenvectors up to phase
        for col, target in zip(v.T, ([1, -1], [1, 1])):
            overlap = abs(np.vdot(col, np.array(target) / np.sqrt(2)))
            assert abs(overlap - 1.0) < 1e-12

    def test_rejects_nonhermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            eigh(Operator(Q, np.array([[0, 1], [0, 0]], dtype=complex)))


class TestUnitaryFromGenerator:
    def test_sigma_z_quarter_turn_frozen(self):
        u = unitary_from_generator(Operator(Q, SZ, hermitian=True), np.pi / 2)
        np.testing.assert_allclose(u, np.diag([-1j, 1j]), atol=1e-14)

    def test_matches_closed_form_rotation(self):
        # exp(-i theta sigma_x) = cos(theta) I - i sin(theta) sigma_x
        theta = 0.731
        u = unitary_from_generator(Operator(Q, SX, hermitian=True), theta)
        expected = np.cos(theta) * np.eye(2) - 1j * np.sin(theta) * SX
        np.testing.assert_allclose(u, expected, atol=1e-14)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(-5, 5))
    def test_result_is_unitary(self, seed, scale):
        rng = _rng(seed)
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = (m + m.conj().T) / 2
        dims = DimensionSpec.of(("x", 4))
        u = unitary_from_generator(Operator(dims, h, hermitian=True), scale)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-12)


class TestSchmidt:
    def test_bell_frozen(self):
        dims = Q.merge(R)
        bell = StateVector(dims, np.array([1, 0, 0, 1]) / np.sqrt(2))
        coeffs, rank = schmidt(bell, (("q",), ("r",)))
        assert rank == 2
        np.testing.assert_allclose(coeffs[:2], [2**-0.5, 2**-0.5], atol=1e-14)

    def test_product_state_rank_one(self):
        rng = _rng(3)
        joint = kron_states(_random_state(rng, Q), _random_state(rng, R))
        coeffs, rank = schmidt(joint, (("q",), ("r",)))
        assert rank == 1
        assert abs(coeffs[0] - 1.0) < 1e-12

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_coefficients_invariant_under_local_unitaries(self, seed):
        rng = _rng(seed)
        dims = Q.merge(R)
        state = _random_state(rng, dims)
        coeffs, _ = schmidt(state, (("q",), ("r",)))
        rotated = np.kron(_random_unitary(rng, 2), _random_unitary(rng, 2)) @ state.amplitudes
        coeffs2, _ = schmidt(StateVector(dims, rotated), (("q",), ("r",)))
        np.testing.assert_allclose(coeffs, coeffs2, atol=1e-10)
        assert abs(np.sum(coeffs**2) - 1.0) < 1e-10

    def test_cut_must_partition(self):
        dims = Q.merge(R)
        state = _random_state(_rng(0), dims)
        with pytest.raises(ValueError, match="partition"):
            schmidt(state, (("q",), ("q",)))


class TestDistanceAndExpectation:
    def test_trace_distance_extremes(self):
        up = pure_density(StateVector(Q, np.array([1.0, 0.0])))
        down = pure_density(StateVector(Q, np.array([0.0, 1.0])))
        assert abs(trace_distance(up, down) - 1.0) < 1e-14
        assert trace_distance(up, up) < 1e-14

    def test_expectation_frozen(self):
        plus = StateVector(Q, np.array([1.0, 1.0]) / np.sqrt(2))
        assert abs(expectation(Operator(Q, SX, hermitian=True), plus) - 1.0) < 1e-14
        assert abs(expectation(Operator(Q, SZ, hermitian=True), plus)) < 1e-14


class TestEmbed:
    def test_matches_explicit_kron(self):
        dims = DimensionSpec.of(("s", 2), ("A", 4), ("B", 3))
        op = Operator(DimensionSpec.of(("A", 4)), np.diag([0, 1, 2, 3]).astype(complex), hermitian=True)
        expected = np.kron(np.kron(np.eye(2), op.matrix), np.eye(3))
        np.testing.assert_array_equal(embed(op, dims).matrix, expected)

    def test_rejects_noncontiguous_block(self):
        dims = DimensionSpec.of(("s", 2), ("A", 4), ("B", 3))
        op = Operator(
            DimensionSpec.of(("s", 2), ("B", 3)), np.eye(6, dtype=complex), hermitian=True
        )
        with pytest.raises(ValueError, match="contiguous"):
            embed(op, dims)
