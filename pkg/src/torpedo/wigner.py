"""Phase-point operators and discrete Wigner functions for odd prime dimensions."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cache
from types import MappingProxyType
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt
from scipy.linalg import eigh

from torpedo.errors import ConsistencyError, StrategyError
from torpedo.qudit import (
    INF,
    ASSERTION_TOL,
    CONSTRUCTION_TOL,
    Dit,
    Question,
    ComplexMatrix,
    frozen,
    pauli_y,
    mub_system,
    displacement,
    is_hermitian,
    qubit_pauli_word,
    require_odd_prime,
    torpedo_questions,
)


if TYPE_CHECKING:
    from collections.abc import Mapping
    from pathlib import Path


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PhasePointOperator:
    d: int
    x: int
    z: int
    matrix: ComplexMatrix

    @property
    def point(self) -> tuple[int, int]:
        return self.x, self.z

    def eigenvalues(self) -> npt.NDArray[np.float64]:
        return eigh(self.matrix, eigvals_only=True)


@cache
def origin_phase_point(d: int) -> ComplexMatrix:
    """``A(0, 0)``, the parity operator sending ``|j>`` to ``|-j>``."""
    require_odd_prime(d)
    j = np.arange(d)
    matrix = np.zeros((d, d), dtype=np.complex128)
    matrix[(-j) % d, j] = 1
    return frozen(matrix)


def phase_point_closed_form(d: int, x: int, z: int) -> ComplexMatrix:
    """Entries ``delta(2x, j + k) w^(z (j - k))``."""
    require_odd_prime(d)
    rows, cols = np.meshgrid(np.arange(d), np.arange(d), indexing='ij')
    support = (rows + cols) % d == (2 * x) % d
    phases = np.exp(2j * np.pi * ((z * (rows - cols)) % d) / d)
    return frozen(np.where(support, phases, 0).astype(np.complex128))


@cache
def _phase_point(d: int, x: int, z: int) -> PhasePointOperator:
    D = displacement(d, x, z)
    matrix = D @ origin_phase_point(d) @ D.conj().T
    deviation = float(np.max(np.abs(matrix - phase_point_closed_form(d, x, z))))
    if deviation > CONSTRUCTION_TOL:
        raise ConsistencyError(f'A({x},{z}) for d={d} disagrees with its closed form by {deviation:.3e}')
    return PhasePointOperator(d, x, z, frozen(matrix))


def phase_point_operator(d: int, x: Dit | int, z: Dit | int) -> PhasePointOperator:
    require_odd_prime(d)
    return _phase_point(d, int(x) % d, int(z) % d)


@cache
def phase_point_stack(d: int) -> npt.NDArray[np.complex128]:
    """All ``A(x, z)`` as an array indexed ``[x, z, row, col]``."""
    require_odd_prime(d)
    stack = np.array([[phase_point_operator(d, x, z).matrix for z in range(d)] for x in range(d)])
    return frozen(stack)


def qubit_phase_point(x: Dit | int, z: Dit | int) -> ComplexMatrix:
    """Translate of ``(I - X - Y - Z) / 2``; Hermitian with unit trace but not positive."""
    X, Z = qubit_pauli_word(1, 0), qubit_pauli_word(0, 1)
    origin = (np.eye(2) - X - pauli_y() - Z) / 2
    W = qubit_pauli_word(x, z)
    return frozen(W @ origin @ W.conj().T)


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """Quasi-probabilities indexed ``values[x, z]`` (rows are x, columns are z)."""

    d: int
    values: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        if self.values.shape != (self.d, self.d):
            raise StrategyError(f'expected a {self.d}x{self.d} grid, got shape {self.values.shape}')
        object.__setattr__(self, 'values', frozen(np.array(self.values, dtype=np.float64)))

    def translate(self, a: int, b: int) -> WignerGrid:
        return WignerGrid(self.d, np.roll(self.values, (a, b), axis=(0, 1)))

    def to_rows(self) -> list[list[float]]:
        return self.values.tolist()

    def to_csv(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, self.values, delimiter=',', fmt='%.17g')


def wigner_function(Q: npt.ArrayLike, d: int) -> WignerGrid:
    require_odd_prime(d)
    rho = np.asarray(Q, dtype=np.complex128)
    if rho.shape != (d, d):
        raise StrategyError(f'operator must be {d}x{d}, got shape {rho.shape}')
    if not is_hermitian(rho, ASSERTION_TOL):
        raise StrategyError('operator is not Hermitian')
    if abs(np.trace(rho) - 1) > ASSERTION_TOL:
        raise StrategyError(f'operator trace is {np.trace(rho):.6g}, expected 1')

    raw = np.einsum('xzjk,kj->xz', phase_point_stack(d), rho) / d
    if np.max(np.abs(raw.imag)) > ASSERTION_TOL:
        raise ConsistencyError('Wigner function of a Hermitian operator came out complex')
    return WignerGrid(d, raw.real)


def negativity(W: WignerGrid) -> float:
    """Sum of absolute quasi-probabilities; 1 exactly when the grid is nonnegative."""
    return float(np.abs(W.values).sum())


def minus_eigenspace(A: PhasePointOperator) -> list[npt.NDArray[np.complex128]]:
    require_odd_prime(A.d)
    evals, evecs = eigh(A.matrix)
    vectors = evecs[:, evals < 0]
    expected = (A.d - 1) // 2
    if vectors.shape[1] != expected:
        raise ConsistencyError(f'A{A.point} has {vectors.shape[1]} negative eigenvalues, expected {expected}')
    residual = float(np.max(np.abs(A.matrix @ vectors + vectors))) if expected else 0.0
    if residual > ASSERTION_TOL:
        raise ConsistencyError(f'eigenvector residual {residual:.3e} for A{A.point}')
    return [frozen(vectors[:, i].copy()) for i in range(expected)]


def line_points(d: int, q: Question, c: int) -> tuple[tuple[int, int], ...]:
    """Cells of the line with label ``c`` in direction ``q``: ``x = c`` or ``q x - z = c``."""
    if q == INF:
        return tuple((c % d, z) for z in range(d))
    return tuple((x, (int(q) * x - c) % d) for x in range(d))


@cache
def line_outcome_table(d: int) -> Mapping[tuple[Question, int], int]:
    """
    Outcome label of the MUB measurement that corresponds to each line.

    Outcome ``k`` of basis ``q`` is matched to the line whose phase points all give it
    probability one; the table is built once per dimension and then reused.
    """
    mubs = mub_system(d)
    table: dict[tuple[Question, int], int] = {}
    for q in torpedo_questions(d):
        for c in range(d):
            points = line_points(d, q, c)
            matches = [
                k
                for k in range(d)
                if all(
                    abs(np.trace(mubs.projector(q, k) @ phase_point_operator(d, x, z).matrix) - 1)
                    < ASSERTION_TOL
                    for x, z in points
                )
            ]
            if len(matches) != 1:
                raise ConsistencyError(f'line {c} in direction {q!r} matches outcomes {matches}')
            table[q, c] = matches[0]
    logger.debug('Line/outcome table for d=%d built', d)
    return MappingProxyType(table)


def line_marginal(W: WignerGrid, q: Question, c: int) -> float:
    return float(sum(W.values[x, z] for x, z in line_points(W.d, q, c)))


def outcome_probability(W: WignerGrid, q: Question, k: int) -> float:
    """Born probability of outcome ``k`` in basis ``q`` read off the Wigner grid."""
    table = line_outcome_table(W.d)
    (line,) = (c for c in range(W.d) if table[q, c] == k)
    return line_marginal(W, q, line)


__all__ = (
    'PhasePointOperator',
    'WignerGrid',
    'line_marginal',
    'line_outcome_table',
    'line_points',
    'minus_eigenspace',
    'negativity',
    'origin_phase_point',
    'outcome_probability',
    'phase_point_closed_form',
    'phase_point_operator',
    'phase_point_stack',
    'qubit_phase_point',
    'wigner_function',
)
