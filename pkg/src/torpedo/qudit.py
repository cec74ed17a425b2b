"""
Single-qudit linear algebra over prime dimensions.

Conventions used throughout the package:

* ``X|k> = |k+1>`` and ``Z|k> = w^k |k>`` with ``w = exp(2 pi i / d)``, so that ``ZX = w XZ``.
* ``D(x, z) = w^(h x z) X^x Z^z`` where ``h`` is the inverse of 2 modulo an odd prime ``d``.
  With this definition ``D(v) D(v') = w^(h (z x' - x z')) D(v + v')``.
* Measurement questions are labelled ``'inf', 0, 1, ..., d-1``. Basis ``q`` is the eigenbasis of
  ``D(0, 1)`` for ``'inf'`` and of ``D(1, q)`` otherwise, with outcome ``k`` assigned to the
  eigenvalue ``w^k``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cache, cached_property
from typing import TYPE_CHECKING, Final, Literal

import numpy as np
import numpy.typing as npt

from torpedo.errors import DimensionError, StrategyError


if TYPE_CHECKING:
    from collections.abc import Sequence


logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]
Question = int | Literal['inf']

INF: Final = 'inf'
CONSTRUCTION_TOL: Final = 1e-12
ASSERTION_TOL: Final = 1e-9


def is_prime(n: int) -> bool:
    """
    >>> [p for p in range(20) if is_prime(p)]
    [2, 3, 5, 7, 11, 13, 17, 19]
    """
    if n < 2:
        return False
    return all(n % f for f in range(2, int(n**0.5) + 1))


def require_dimension(d: int) -> None:
    if d < 2:
        raise DimensionError(f'dimension must be at least 2, got {d}')


def require_prime(d: int) -> None:
    if not is_prime(d):
        raise DimensionError(f'dimension must be prime, got {d}')


def require_odd_prime(d: int) -> None:
    require_prime(d)
    if d == 2:
        raise DimensionError('dimension 2 has no inverse of 2; use the qubit constructions instead')


def half(d: int) -> int:
    """Inverse of 2 modulo an odd ``d``.

    >>> half(3), half(5), half(7)
    (2, 3, 4)
    """
    return (d + 1) // 2


def frozen[T: np.ndarray](array: T) -> T:
    array.flags.writeable = False
    return array


@dataclass(frozen=True, slots=True)
class Dit:
    """An element of the ring of integers modulo ``modulus``.

    >>> Dit(5, 3)
    Dit(value=2, modulus=3)
    >>> Dit(2, 3) * Dit(2, 3)
    Dit(value=1, modulus=3)
    >>> Dit(2, 5).inverse()
    Dit(value=3, modulus=5)
    >>> int(Dit(1, 7) - 3)
    5
    """

    value: int
    modulus: int

    def __post_init__(self) -> None:
        require_dimension(self.modulus)
        object.__setattr__(self, 'value', self.value % self.modulus)

    def _coerce(self, other: Dit | int) -> int:
        if isinstance(other, Dit):
            if other.modulus != self.modulus:
                raise ValueError(f'cannot combine dits modulo {self.modulus} and {other.modulus}')
            return other.value
        return other

    def __add__(self, other: Dit | int) -> Dit:
        return Dit(self.value + self._coerce(other), self.modulus)

    def __sub__(self, other: Dit | int) -> Dit:
        return Dit(self.value - self._coerce(other), self.modulus)

    def __mul__(self, other: Dit | int) -> Dit:
        return Dit(self.value * self._coerce(other), self.modulus)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self) -> Dit:
        return Dit(-self.value, self.modulus)

    def inverse(self) -> Dit:
        if self.value == 0:
            raise ZeroDivisionError('zero has no inverse')
        require_prime(self.modulus)
        return Dit(pow(self.value, -1, self.modulus), self.modulus)

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value


def is_unitary(matrix: npt.ArrayLike, tol: float = CONSTRUCTION_TOL) -> bool:
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) <= tol)


def is_hermitian(matrix: npt.ArrayLike, tol: float = CONSTRUCTION_TOL) -> bool:
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def root_of_unity(d: int, power: int) -> complex:
    """
    >>> abs(root_of_unity(3, 3) - 1) < 1e-12
    True
    """
    require_dimension(d)
    return complex(np.exp(2j * np.pi * (int(power) % d) / d))


def _phases(d: int, exponents: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    return np.exp(2j * np.pi * (np.asarray(exponents, dtype=np.int64) % d) / d)


@cache
def pauli_x(d: int) -> ComplexMatrix:
    require_dimension(d)
    return frozen(np.roll(np.eye(d, dtype=np.complex128), 1, axis=0))


@cache
def pauli_z(d: int) -> ComplexMatrix:
    require_dimension(d)
    return frozen(np.diag(_phases(d, np.arange(d))))


@cache
def pauli_y() -> ComplexMatrix:
    return frozen(1j * pauli_x(2) @ pauli_z(2))


@cache
def _displacement(d: int, x: int, z: int) -> ComplexMatrix:
    word = np.linalg.matrix_power(pauli_x(d), x) @ np.linalg.matrix_power(pauli_z(d), z)
    return frozen(root_of_unity(d, half(d) * x * z) * word)


def displacement(d: int, x: Dit | int, z: Dit | int) -> ComplexMatrix:
    require_odd_prime(d)
    return _displacement(d, int(x) % d, int(z) % d)


@cache
def _qubit_word(x: int, z: int) -> ComplexMatrix:
    return frozen(np.linalg.matrix_power(pauli_x(2), x) @ np.linalg.matrix_power(pauli_z(2), z))


def qubit_pauli_word(x: Dit | int, z: Dit | int) -> ComplexMatrix:
    """Plain word ``X^x Z^z`` without the half-integer phase."""
    return _qubit_word(int(x) % 2, int(z) % 2)


def weyl_word(d: int, x: int, z: int) -> ComplexMatrix:
    """Displacement for odd ``d`` and the plain Pauli word for qubits."""
    if d == 2:
        return qubit_pauli_word(x, z)
    return displacement(d, x, z)


@dataclass(frozen=True, slots=True)
class SymplecticMatrix:
    """A 2x2 matrix ``[[alpha, beta], [gamma, epsilon]]`` over Z_d with unit determinant."""

    alpha: int
    beta: int
    gamma: int
    epsilon: int
    d: int

    def __post_init__(self) -> None:
        require_prime(self.d)
        for name in ('alpha', 'beta', 'gamma', 'epsilon'):
            object.__setattr__(self, name, int(getattr(self, name)) % self.d)
        if (self.alpha * self.epsilon - self.beta * self.gamma) % self.d != 1:
            raise ValueError(f'determinant of {self.rows} is not 1 modulo {self.d}')

    @property
    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.alpha, self.beta), (self.gamma, self.epsilon))

    def apply(self, x: int, z: int) -> tuple[int, int]:
        return (self.alpha * x + self.beta * z) % self.d, (self.gamma * x + self.epsilon * z) % self.d

    def __matmul__(self, other: SymplecticMatrix) -> SymplecticMatrix:
        return SymplecticMatrix(
            self.alpha * other.alpha + self.beta * other.gamma,
            self.alpha * other.beta + self.beta * other.epsilon,
            self.gamma * other.alpha + self.epsilon * other.gamma,
            self.gamma * other.beta + self.epsilon * other.epsilon,
            self.d,
        )

    def inverse(self) -> SymplecticMatrix:
        return SymplecticMatrix(self.epsilon, -self.beta, -self.gamma, self.alpha, self.d)

    @classmethod
    def identity(cls, d: int) -> SymplecticMatrix:
        return cls(1, 0, 0, 1, d)

    @classmethod
    def fourier(cls, d: int) -> SymplecticMatrix:
        return cls(0, -1, 1, 0, d)

    @classmethod
    def random(cls, d: int, rng: np.random.Generator) -> SymplecticMatrix:
        while True:
            alpha, beta, gamma = (int(v) for v in rng.integers(0, d, size=3))
            if alpha:
                return cls(alpha, beta, gamma, (1 + beta * gamma) * pow(alpha, -1, d), d)
            if (beta * gamma) % d == d - 1:
                return cls(alpha, beta, gamma, int(rng.integers(0, d)), d)


def symplectic_unitary(F: SymplecticMatrix) -> ComplexMatrix:
    """
    The Clifford unitary ``U_F`` with ``U_F D(v) U_F^dagger`` proportional to ``D(F v)``.

    For ``beta != 0`` the entries are ``w^(h beta^-1 (alpha k^2 - 2 j k + epsilon j^2)) / sqrt(d)``;
    for ``beta == 0`` the matrix maps ``|k>`` to ``w^(h alpha gamma k^2) |alpha k>``.
    """
    d = F.d
    require_odd_prime(d)
    h = half(d)
    j = np.arange(d, dtype=np.int64)
    if F.beta:
        rows, cols = np.meshgrid(j, j, indexing='ij')
        b_inv = pow(F.beta, -1, d)
        exponent = h * b_inv * (F.alpha * cols**2 - 2 * rows * cols + F.epsilon * rows**2)
        return frozen(_phases(d, exponent) / np.sqrt(d))

    unitary = np.zeros((d, d), dtype=np.complex128)
    unitary[(F.alpha * j) % d, j] = _phases(d, h * F.alpha * F.gamma * j**2)
    return frozen(unitary)


@dataclass(frozen=True, eq=False)
class BasisMeasurement:
    """
    Rank-1 projective measurements, one orthonormal basis per question.

    Column ``k`` of ``unitaries[i]`` is the basis vector for outcome ``k`` of ``questions[i]``.
    """

    questions: tuple[Question, ...]
    unitaries: tuple[ComplexMatrix, ...]

    def __post_init__(self) -> None:
        if len(self.questions) != len(self.unitaries):
            raise StrategyError('each question needs exactly one basis')
        if not self.unitaries:
            raise StrategyError('a measurement needs at least one question')
        dims = {u.shape for u in self.unitaries}
        if len(dims) != 1:
            raise StrategyError(f'bases have inconsistent shapes: {sorted(dims)}')
        for q, u in zip(self.questions, self.unitaries, strict=True):
            if not is_unitary(u, ASSERTION_TOL):
                raise StrategyError(f'basis for question {q!r} is not orthonormal')
        unitaries = tuple(frozen(np.array(u, dtype=np.complex128)) for u in self.unitaries)
        object.__setattr__(self, 'unitaries', unitaries)

    @property
    def d(self) -> int:
        return self.unitaries[0].shape[0]

    def question_index(self, q: Question) -> int:
        try:
            return self.questions.index(q)
        except ValueError:
            raise KeyError(f'unknown question {q!r}') from None

    def basis_vector(self, q: Question, k: int) -> npt.NDArray[np.complex128]:
        return self.unitaries[self.question_index(q)][:, k]

    def measurement_gate(self, q: Question) -> ComplexMatrix:
        """The gate applied before a computational-basis readout to realise question ``q``."""
        return frozen(self.unitaries[self.question_index(q)].conj().T)

    @cached_property
    def projectors(self) -> npt.NDArray[np.complex128]:
        """Array indexed ``[question, outcome, row, col]``."""
        stack = np.stack(self.unitaries)
        return frozen(np.einsum('qak,qbk->qkab', stack, stack.conj()))

    def projector(self, q: Question, k: int) -> ComplexMatrix:
        return self.projectors[self.question_index(q), k]

    def max_bias_error(self) -> float:
        """Largest deviation of a cross-basis overlap ``|<a|b>|^2`` from ``1/d``."""
        worst = 0.0
        for i, u in enumerate(self.unitaries):
            for v in self.unitaries[i + 1 :]:
                overlaps = np.abs(u.conj().T @ v) ** 2
                worst = max(worst, float(np.max(np.abs(overlaps - 1 / self.d))))
        return worst


@dataclass(frozen=True, eq=False)
class MubSystem(BasisMeasurement):
    def __post_init__(self) -> None:
        super().__post_init__()
        if len(self.questions) != self.d + 1:
            raise StrategyError(f'a complete MUB in dimension {self.d} has {self.d + 1} bases')
        error = self.max_bias_error()
        if error > ASSERTION_TOL:
            raise StrategyError(f'bases are not mutually unbiased (deviation {error:.3e})')


def torpedo_questions(d: int) -> tuple[Question, ...]:
    return (INF, *range(d))


def mub_basis_symplectic(d: int, q: Question) -> SymplecticMatrix:
    """The symplectic matrix whose Clifford unitary holds basis ``q`` in its columns."""
    if q == INF:
        return SymplecticMatrix.identity(d)
    return SymplecticMatrix(0, 1, -1, int(q), d)


@cache
def mub_system(d: int) -> MubSystem:
    require_odd_prime(d)
    questions = torpedo_questions(d)
    unitaries = tuple(symplectic_unitary(mub_basis_symplectic(d, q)) for q in questions)
    logger.debug('Built MUB system for d=%d', d)
    return MubSystem(questions, unitaries)


@cache
def qubit_bases() -> dict[str, ComplexMatrix]:
    """Eigenbases of Z, X and Y with the +1 eigenvector first (outcome 0)."""
    s = 1 / np.sqrt(2)
    return {
        'Z': frozen(np.eye(2, dtype=np.complex128)),
        'X': frozen(np.array([[s, s], [s, -s]], dtype=np.complex128)),
        'Y': frozen(np.array([[s, s], [1j * s, -1j * s]], dtype=np.complex128)),
    }


@cache
def qubit_mub_system() -> MubSystem:
    bases = qubit_bases()
    return MubSystem(torpedo_questions(2), (bases['Z'], bases['X'], bases['Y']))


def unitary_with_first_column(vector: Sequence[complex] | npt.NDArray[np.complex128]) -> ComplexMatrix:
    """Complete a unit vector to a unitary whose first column is exactly that vector."""
    v = np.asarray(vector, dtype=np.complex128)
    if abs(np.linalg.norm(v) - 1) > ASSERTION_TOL:
        raise StrategyError('vector must be normalised')
    q, r = np.linalg.qr(np.column_stack([v, np.eye(len(v), dtype=np.complex128)]))
    q[:, 0] *= r[0, 0]
    return frozen(q)


__all__ = (
    'ASSERTION_TOL',
    'CONSTRUCTION_TOL',
    'INF',
    'BasisMeasurement',
    'ComplexMatrix',
    'Dit',
    'MubSystem',
    'Question',
    'SymplecticMatrix',
    'displacement',
    'frozen',
    'half',
    'is_hermitian',
    'is_prime',
    'is_unitary',
    'mub_basis_symplectic',
    'mub_system',
    'pauli_x',
    'pauli_y',
    'pauli_z',
    'qubit_bases',
    'qubit_mub_system',
    'qubit_pauli_word',
    'require_dimension',
    'require_odd_prime',
    'require_prime',
    'root_of_unity',
    'symplectic_unitary',
    'torpedo_questions',
    'unitary_with_first_column',
    'weyl_word',
)
