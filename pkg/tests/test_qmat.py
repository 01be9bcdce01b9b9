import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import random_hermitian, random_state
from switchthermo import qmat
from switchthermo.errors import DimensionError, InvalidStateError, NotHermitianError
from switchthermo.qmat import (
    KET_0,
    KET_1,
    KET_PLUS,
    DensityMatrix,
    dagger,
    herm_eigvals,
    jacobi_eigh,
    matmul,
    partial_trace,
    projector,
    tensor,
    trace,
    trace_distance,
)

I2 = np.eye(2)
I4 = np.eye(4)


def test_tensor_identity():
    assert_allclose(tensor(I2, I2), I4, atol=0)


def test_tensor_basis_projectors():
    assert_allclose(tensor(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]), atol=0)


def test_tensor_plus_with_zero():
    expected = np.zeros((4, 4))
    for i, j in [(0, 0), (0, 2), (2, 0), (2, 2)]:
        expected[i, j] = 0.5
    assert_allclose(tensor(projector(KET_PLUS), projector(KET_0)), expected, atol=1e-16)


def test_tensor_matches_kron(rng):
    a, b = random_hermitian(rng, 2), random_hermitian(rng, 2)
    assert_allclose(tensor(a, b), np.kron(a, b), atol=1e-15)


def test_tensor_rejects_large():
    with pytest.raises(DimensionError):
        tensor(I4, I2)


def test_partial_trace_product(rng):
    rho, sigma = random_state(rng), random_state(rng)
    joint = tensor(rho.mat, sigma.mat)
    assert_allclose(partial_trace(joint, "system"), rho.mat, atol=1e-12)
    assert_allclose(partial_trace(joint, "controller"), sigma.mat, atol=1e-12)


def test_partial_trace_maximally_mixed():
    assert_allclose(partial_trace(I4 / 4, "controller"), I2 / 2, atol=0)


def test_partial_trace_linear_and_trace_preserving(rng):
    for _ in range(50):
        a, b = random_hermitian(rng, 4), random_hermitian(rng, 4)
        c = rng.standard_normal()
        for keep in ("system", "controller"):
            lhs = partial_trace(a + c * b, keep)
            rhs = partial_trace(a, keep) + c * partial_trace(b, keep)
            assert_allclose(lhs, rhs, atol=1e-12)
            assert abs(np.trace(partial_trace(a, keep)) - np.trace(a)) <= 1e-12


def test_partial_trace_errors():
    with pytest.raises(DimensionError):
        partial_trace(I2)
    with pytest.raises(ValueError):
        partial_trace(I4, "environment")


@pytest.mark.parametrize(
    "mat, expected",
    [
        (np.diag([0.8, 0.2]), [0.2, 0.8]),
        (projector(KET_PLUS), [0.0, 1.0]),
        (np.array([[0.5, 0.3], [0.3, 0.5]]), [0.2, 0.8]),
    ],
)
def test_eigvals_2x2_examples(mat, expected):
    assert_allclose(herm_eigvals(mat), expected, atol=1e-15)


def test_eigvals_plus_projector_exact():
    assert herm_eigvals(DensityMatrix.pure(KET_PLUS)) == [0.0, 1.0]


@pytest.mark.parametrize("dim", [2, 4])
def test_eigvals_against_lapack(rng, dim):
    for _ in range(200):
        a = random_hermitian(rng, dim)
        assert_allclose(herm_eigvals(a), np.linalg.eigvalsh(a), atol=1e-12)


@pytest.mark.parametrize("dim", [2, 4])
def test_eigvals_sum_to_trace(rng, dim):
    for _ in range(1000):
        a = random_hermitian(rng, dim)
        assert abs(sum(herm_eigvals(a)) - np.trace(a).real) <= 1e-12


def test_jacobi_reconstruction(rng):
    for _ in range(300):
        a = random_hermitian(rng, 4)
        w, v, sweeps = jacobi_eigh(a)
        assert sweeps <= qmat.JACOBI_MAX_SWEEPS
        assert_allclose(v @ v.conj().T, I4, atol=1e-12)
        assert qmat.max_abs(v @ np.diag(w) @ v.conj().T - a) <= 1e-10


def test_jacobi_degenerate_and_diagonal():
    w, v, sweeps = jacobi_eigh(np.diag([0.3, 0.3, 0.2, 0.2]))
    assert sweeps == 0
    assert_allclose(w, [0.2, 0.2, 0.3, 0.3], atol=0)
    assert_allclose(herm_eigvals(I4 / 4), [0.25] * 4, atol=1e-16)


def test_jacobi_complex_phases():
    # rank-1 projector with complex amplitudes
    v = np.array([1, 1j, -1, -1j]) / 2
    assert_allclose(herm_eigvals(np.outer(v, v.conj())), [0, 0, 0, 1], atol=1e-14)


def test_eigvals_reject_non_hermitian():
    with pytest.raises(NotHermitianError):
        herm_eigvals(np.array([[0, 1], [0, 0]]))


def test_ring_operations(rng):
    a = random_hermitian(rng, 4) + 1j * random_hermitian(rng, 4)
    b = random_hermitian(rng, 4)
    assert_allclose(matmul(I4, a), a, atol=0)
    assert_allclose(dagger(dagger(a)), a, atol=0)
    assert abs(trace(matmul(a, b)) - trace(matmul(b, a))) <= 1e-12
    f1 = math.sqrt(0.2) * np.diag([1.0, -1.0])
    assert_allclose(dagger(f1), f1, atol=0)
    r = 0.7
    assert abs(trace(matmul(np.diag([r, 1 - r]), np.diag([0, 1]))) - (1 - r)) <= 1e-15
    with pytest.raises(DimensionError):
        matmul(I2, I4)
    with pytest.raises(DimensionError):
        qmat.add(I2, I4)


def test_trace_distance_examples():
    rho = DensityMatrix.diag(0.8, 0.2)
    assert trace_distance(rho, rho) == 0
    assert trace_distance(DensityMatrix.pure(KET_0), DensityMatrix.pure(KET_1)) == pytest.approx(1, abs=1e-15)
    assert trace_distance(rho, DensityMatrix.diag(0.5, 0.5)) == pytest.approx(0.3, abs=1e-15)
    with pytest.raises(DimensionError):
        trace_distance(rho, I4 / 4)


def test_trace_distance_properties(rng):
    for dim in (2, 4):
        for _ in range(100):
            a, b = random_state(rng, dim), random_state(rng, dim)
            d = trace_distance(a, b)
            assert 0 <= d <= 1 + 1e-12
            assert d == pytest.approx(trace_distance(b, a), abs=1e-12)
            oracle = 0.5 * np.abs(np.linalg.eigvalsh(a.mat - b.mat)).sum()
            assert d == pytest.approx(oracle, abs=1e-12)


def test_density_matrix_validation():
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([0.6, 0.6]))
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([1.2, -0.2]))
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.array([[0.5, 0.5], [0.1, 0.5]]))
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(DimensionError):
        DensityMatrix(np.eye(3) / 3)


def test_density_matrix_is_immutable():
    rho = DensityMatrix.diag(0.8, 0.2)
    with pytest.raises(ValueError):
        rho.mat[0, 0] = 1.0


def test_psd_tolerance_admits_rounding():
    DensityMatrix(np.diag([1 + 5e-11, -5e-11]))
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([1 + 1e-9, -1e-9]))
