from __future__ import annotations

from itertools import product

import numpy as np
import pytest

from torpedo.errors import StrategyError, DimensionError
from torpedo.qudit import (
    INF,
    Dit,
    SymplecticMatrix,
    half,
    pauli_x,
    pauli_z,
    is_prime,
    is_unitary,
    mub_system,
    displacement,
    is_hermitian,
    root_of_unity,
    qubit_mub_system,
    torpedo_questions,
    symplectic_unitary,
    mub_basis_symplectic,
    unitary_with_first_column,
)


ODD_PRIMES = (3, 5, 7)


def test_dit_arithmetic_wraps_modulo_d() -> None:
    # Arrange
    a, b = Dit(4, 5), Dit(3, 5)

    # Act / Assert
    assert int(a + b) == 2
    assert int(a - b) == 1
    assert int(a * b) == 2
    assert int(-a) == 1
    assert int(a * a.inverse()) == 1


def test_dit_inverse_of_zero_is_rejected() -> None:
    with pytest.raises(ZeroDivisionError):
        Dit(0, 7).inverse()


@pytest.mark.parametrize('d', [2, 3, 5])
def test_pauli_operators_have_order_d(d: int) -> None:
    # Arrange
    X, Z = pauli_x(d), pauli_z(d)
    identity = np.eye(d)

    # Act
    x_power = np.linalg.matrix_power(X, d)
    z_power = np.linalg.matrix_power(Z, d)

    # Assert
    assert np.allclose(x_power, identity)
    assert np.allclose(z_power, identity)
    assert np.allclose(Z @ X, root_of_unity(d, 1) * X @ Z)


@pytest.mark.parametrize('d', ODD_PRIMES)
def test_displacements_compose_with_the_symplectic_phase(d: int) -> None:
    h = half(d)
    for (x, z), (x2, z2) in product(product(range(d), repeat=2), repeat=2):
        # Act
        product_ = displacement(d, x, z) @ displacement(d, x2, z2)

        # Assert
        expected = root_of_unity(d, h * (z * x2 - x * z2)) * displacement(d, x + x2, z + z2)
        assert np.allclose(product_, expected, atol=1e-12)


@pytest.mark.parametrize('d', ODD_PRIMES)
def test_displacements_are_unitary_and_orthogonal(d: int) -> None:
    points = list(product(range(d), repeat=2))
    for x, z in points:
        D = displacement(d, x, z)
        assert is_unitary(D)
        for x2, z2 in points:
            overlap = np.trace(D.conj().T @ displacement(d, x2, z2))
            assert abs(overlap - (d if (x, z) == (x2, z2) else 0)) < 1e-9


def test_displacement_needs_an_odd_prime() -> None:
    with pytest.raises(DimensionError):
        displacement(2, 1, 1)
    with pytest.raises(DimensionError):
        displacement(9, 1, 1)


def test_symplectic_matrix_requires_unit_determinant() -> None:
    with pytest.raises(ValueError, match='determinant'):
        SymplecticMatrix(1, 1, 1, 1, 5)


@pytest.mark.parametrize('d', ODD_PRIMES)
def test_symplectic_unitaries_conjugate_displacements(d: int, rng: np.random.Generator) -> None:
    for _ in range(10):
        # Arrange
        F = SymplecticMatrix.random(d, rng)
        U = symplectic_unitary(F)
        x, z = (int(v) for v in rng.integers(0, d, size=2))

        # Act
        image = U @ displacement(d, x, z) @ U.conj().T

        # Assert
        assert is_unitary(U)
        target = displacement(d, *F.apply(x, z))
        assert abs(abs(np.trace(target.conj().T @ image)) - d) < 1e-9


@pytest.mark.parametrize('d', ODD_PRIMES)
def test_symplectic_composition_and_inverse(d: int, rng: np.random.Generator) -> None:
    F, G = SymplecticMatrix.random(d, rng), SymplecticMatrix.random(d, rng)

    assert (F @ F.inverse()).rows == SymplecticMatrix.identity(d).rows
    assert (F @ G).apply(1, 2) == F.apply(*G.apply(1, 2))


@pytest.mark.parametrize('d', ODD_PRIMES)
def test_mub_system_is_complete_and_unbiased(d: int) -> None:
    # Act
    mubs = mub_system(d)

    # Assert
    assert mubs.questions == torpedo_questions(d)
    assert len(mubs.unitaries) == d + 1
    assert mubs.max_bias_error() < 1e-9
    for q in mubs.questions:
        total = sum(mubs.projector(q, k) for k in range(d))
        assert np.allclose(total, np.eye(d))
        for k in range(d):
            P = mubs.projector(q, k)
            assert is_hermitian(P)
            assert np.allclose(P @ P, P)
            assert abs(np.trace(P) - 1) < 1e-12


@pytest.mark.parametrize('d', ODD_PRIMES)
def test_mub_bases_diagonalise_their_displacement(d: int) -> None:
    mubs = mub_system(d)
    for q in mubs.questions:
        D = displacement(d, 0, 1) if q == INF else displacement(d, 1, q)
        for k in range(d):
            v = mubs.basis_vector(q, k)
            assert abs(abs(np.vdot(v, D @ v)) - 1) < 1e-9


def test_infinite_question_measures_the_computational_basis() -> None:
    assert mub_basis_symplectic(5, INF).rows == ((1, 0), (0, 1))
    assert np.allclose(mub_system(5).unitaries[0], np.eye(5))


def test_qubit_mub_system_uses_z_x_y() -> None:
    mubs = qubit_mub_system()

    assert mubs.questions == (INF, 0, 1)
    assert abs(mubs.max_bias_error()) < 1e-12


def test_unitary_completion_keeps_first_column(rng: np.random.Generator) -> None:
    # Arrange
    v = rng.normal(size=5) + 1j * rng.normal(size=5)
    v /= np.linalg.norm(v)

    # Act
    U = unitary_with_first_column(v)

    # Assert
    assert is_unitary(U)
    assert np.allclose(U[:, 0], v)


def test_unitary_completion_rejects_unnormalised_vectors() -> None:
    with pytest.raises(StrategyError):
        unitary_with_first_column([1.0, 1.0])


def test_primality() -> None:
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
