"""
Transformational staging of pair tasks.

A fixed initial state is acted on by a map controlled by ``x``, then one controlled by ``z``, then
one controlled by the question, and finally read out in the computational basis. Classically the maps
are column-stochastic matrices acting on probability vectors; in the quantum variant they are
unitaries acting on a ket.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import product
from typing import TYPE_CHECKING, Final, Self

import numpy as np
import numpy.typing as npt

from torpedo.errors import DimensionError, StrategyError
from torpedo.qudit import (
    ASSERTION_TOL,
    CONSTRUCTION_TOL,
    ComplexMatrix,
    frozen,
    is_unitary,
    mub_system,
    pauli_x,
    pauli_z,
    require_odd_prime,
    unitary_with_first_column,
)
from torpedo.tasks import (
    QUBIT_BASIS_ASSIGNMENT,
    ClassicalStrategy,
    EmpiricalBehaviour,
    HermitianStrategy,
    perfect_torpedo_strategy,
    qubit_fiducial,
    qubit_measurement,
    torpedo_forbidden,
    torpedo_task,
)
from torpedo.wigner import minus_eigenspace, phase_point_operator


if TYPE_CHECKING:
    from collections.abc import Callable

    from torpedo.tasks import FloatTable, RetrievalTask


logger = logging.getLogger(__name__)

VANISHING_TOL: Final = 1e-12


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """
    Column-stochastic map on probability vectors over ``d`` hidden values.

    >>> (StochasticMatrix.shift(3, 1) @ StochasticMatrix.shift(3, 2)).is_permutation()
    True
    >>> StochasticMatrix.constant(2, 1).apply([0.5, 0.5]).tolist()
    [0.0, 1.0]
    """

    matrix: FloatTable

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StrategyError(f'a stochastic matrix must be square, got shape {m.shape}')
        if m.min() < 0 or np.max(np.abs(m.sum(axis=0) - 1)) > CONSTRUCTION_TOL:
            raise StrategyError('every column must be a probability distribution')
        object.__setattr__(self, 'matrix', frozen(m))

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, d: int) -> Self:
        return cls(np.eye(d))

    @classmethod
    def from_function(cls, d: int, fn: Callable[[int], int]) -> Self:
        """Deterministic map sending hidden value ``j`` to ``fn(j)``."""
        m = np.zeros((d, d))
        for j in range(d):
            m[fn(j) % d, j] = 1
        return cls(m)

    @classmethod
    def shift(cls, d: int, k: int) -> Self:
        """The reversible gate ``j -> j + k``."""
        return cls.from_function(d, lambda j: j + k)

    @classmethod
    def constant(cls, d: int, c: int) -> Self:
        return cls.from_function(d, lambda _: c)

    def __matmul__(self, other: StochasticMatrix) -> StochasticMatrix:
        """``self @ other`` applies ``other`` first."""
        return StochasticMatrix(self.matrix @ other.matrix)

    def apply(self, vector: npt.ArrayLike) -> npt.NDArray[np.float64]:
        return self.matrix @ np.asarray(vector, dtype=np.float64)

    def is_permutation(self) -> bool:
        return bool(np.all((self.matrix == 0) | (self.matrix == 1)) and np.all(self.matrix.sum(axis=1) == 1))


@dataclass(frozen=True, eq=False)
class TransformationStrategy:
    """
    Hidden-variable maps ``T_q T_z T_x`` on the initial value ``f_initial``.

    Either ``x_maps`` and ``z_maps`` are given, or ``input_maps`` holds one global map per input of
    the task (in task order).
    """

    d: int
    question_maps: tuple[StochasticMatrix, ...]
    x_maps: tuple[StochasticMatrix, ...] = ()
    z_maps: tuple[StochasticMatrix, ...] = ()
    input_maps: tuple[StochasticMatrix, ...] = ()
    initial: int = 0

    def __post_init__(self) -> None:
        factorized = bool(self.x_maps) and bool(self.z_maps)
        if factorized == bool(self.input_maps):
            raise StrategyError('give either x and z maps or one global map per input')
        maps = (*self.question_maps, *self.x_maps, *self.z_maps, *self.input_maps)
        if any(m.d != self.d for m in maps):
            raise StrategyError(f'every map must act on {self.d} hidden values')
        if factorized and not len(self.x_maps) == len(self.z_maps) == self.d:
            raise StrategyError(f'x and z maps need one entry per value in Z_{self.d}')

    @property
    def factorized(self) -> bool:
        return not self.input_maps

    def preparation(self, index: int, x: int, z: int) -> StochasticMatrix:
        if self.factorized:
            return self.z_maps[z] @ self.x_maps[x]
        return self.input_maps[index]

    @property
    def questions(self) -> int:
        return len(self.question_maps)

    def maps(self) -> tuple[StochasticMatrix, ...]:
        return (*self.x_maps, *self.z_maps, *self.input_maps, *self.question_maps)


@dataclass(frozen=True, eq=False)
class CircuitStrategy:
    """
    The quantum analogue: ``U_q U_z U_x |initial>`` read out in the computational basis.

    With ``input_gates`` set, one gate per input replaces the ``x`` and ``z`` gates.
    """

    initial: npt.NDArray[np.complex128]
    question_gates: tuple[ComplexMatrix, ...]
    x_gates: tuple[ComplexMatrix, ...] = ()
    z_gates: tuple[ComplexMatrix, ...] = ()
    input_gates: tuple[ComplexMatrix, ...] = ()

    def __post_init__(self) -> None:
        ket = np.array(self.initial, dtype=np.complex128)
        if abs(np.linalg.norm(ket) - 1) > ASSERTION_TOL:
            raise StrategyError('the initial state must be normalised')
        factorized = bool(self.x_gates) and bool(self.z_gates)
        if factorized == bool(self.input_gates):
            raise StrategyError('give either x and z gates or one global gate per input')
        for gate in (*self.question_gates, *self.x_gates, *self.z_gates, *self.input_gates):
            if gate.shape != (len(ket), len(ket)) or not is_unitary(gate, ASSERTION_TOL):
                raise StrategyError(f'every gate must be a {len(ket)}x{len(ket)} unitary')
        object.__setattr__(self, 'initial', frozen(ket))

    @property
    def d(self) -> int:
        return len(self.initial)

    @property
    def factorized(self) -> bool:
        return not self.input_gates

    @property
    def questions(self) -> int:
        return len(self.question_gates)

    def prepared(self, index: int, x: int, z: int) -> npt.NDArray[np.complex128]:
        if self.factorized:
            return self.z_gates[z] @ (self.x_gates[x] @ self.initial)
        return self.input_gates[index] @ self.initial


def _require_pair_task(task: RetrievalTask) -> None:
    if not task.is_pair_task():
        raise StrategyError(f'the transformational form needs inputs in Z_d x Z_d, task {task.name} has others')


def behaviour_from_transformational(
    s: TransformationStrategy | CircuitStrategy,
    task: RetrievalTask,
) -> EmpiricalBehaviour:
    _require_pair_task(task)
    if s.d != task.d or s.questions != len(task.questions):
        raise StrategyError('strategy dimensions do not match the task')

    if isinstance(s, TransformationStrategy):
        start = np.eye(s.d)[s.initial]
        states = np.array([s.preparation(i, x, z).apply(start) for i, (x, z) in enumerate(task.inputs)])
        readout = np.array([m.matrix for m in s.question_maps])
        table = np.einsum('qab,ib->iqa', readout, states)
    else:
        kets = np.array([s.prepared(i, x, z) for i, (x, z) in enumerate(task.inputs)])
        gates = np.array(s.question_gates)
        table = np.abs(np.einsum('qab,ib->iqa', gates, kets)) ** 2
    return EmpiricalBehaviour(task, table)


def count_transformational_constraints(s: TransformationStrategy | CircuitStrategy, task: RetrievalTask) -> int:
    """Number of losing answers that the strategy never produces."""
    table = behaviour_from_transformational(s, task).table
    return int(np.count_nonzero(~task.winning & (table <= VANISHING_TOL)))


def _classical_to_transformational(s: ClassicalStrategy, task: RetrievalTask) -> TransformationStrategy:
    d = task.d
    if s.messages != d or s.encoding.shape[0] != len(task.inputs):
        raise StrategyError(f'a strategy with {s.messages} messages cannot be staged on {d} hidden values')
    # T_x prepares f_x, then column x of T_z is the encoding distribution of input (x, z)
    x_maps = tuple(StochasticMatrix.constant(d, x) for x in range(d))
    z_maps = tuple(
        StochasticMatrix(np.array([s.encoding[task.input_index((x, z))] for x in range(d)]).T) for z in range(d)
    )
    question_maps = tuple(StochasticMatrix(s.decoding[:, qi, :].T) for qi in range(len(task.questions)))
    return TransformationStrategy(d, question_maps, x_maps=x_maps, z_maps=z_maps)


def _quantum_to_circuit(s: HermitianStrategy, task: RetrievalTask) -> CircuitStrategy:
    d = task.d
    vectors = s.pure_vectors()
    if vectors is None:
        raise StrategyError('only strategies with pure message states have a circuit form')
    question_gates = tuple(s.measurement.measurement_gate(q) for q in task.questions)

    if s.fiducial is not None:
        X, Z = pauli_x(d), pauli_z(d)
        x_gates = tuple(np.linalg.matrix_power(X, x) for x in range(d))
        z_gates = tuple(np.linalg.matrix_power(Z, z) for z in range(d))
        translates = [z_gates[z] @ x_gates[x] @ s.fiducial for x, z in task.inputs]
        if all(abs(abs(np.vdot(v, t)) - 1) <= ASSERTION_TOL for v, t in zip(vectors, translates, strict=True)):
            return CircuitStrategy(s.fiducial, question_gates, x_gates=x_gates, z_gates=z_gates)
        logger.debug('Message states are not Pauli translates of the fiducial; using global gates')

    initial = np.eye(d, dtype=np.complex128)[0]
    input_gates = tuple(unitary_with_first_column(v) for v in vectors)
    return CircuitStrategy(initial, question_gates, input_gates=input_gates)


def pam_to_transformational(
    s: ClassicalStrategy | HermitianStrategy,
    task: RetrievalTask,
) -> TransformationStrategy | CircuitStrategy:
    """
    Restage a prepare-and-measure strategy so that it yields the same behaviour.

    Classical strategies get ``T_x = const x`` followed by ``T_z`` carrying the encoding. Quantum
    strategies whose states are Pauli translates of one fiducial become ``X^x``, ``Z^z`` gates on
    that fiducial; any other pure strategy is prepared by one global gate per input.
    """
    _require_pair_task(task)
    if isinstance(s, ClassicalStrategy):
        return _classical_to_transformational(s, task)
    if s.d != task.d or s.measurement.questions != task.questions:
        raise StrategyError('strategy dimensions do not match the task')
    return _quantum_to_circuit(s, task)


def reversible_gate_strategy_d3() -> TransformationStrategy:
    """Cyclic shifts only; wins with probability 11/12 on the d = 3 torpedo task."""
    d = 3
    shift = StochasticMatrix.shift
    return TransformationStrategy(
        d,
        question_maps=(shift(d, 0), shift(d, 1), shift(d, 2), shift(d, 1)),
        x_maps=(shift(d, 0), shift(d, 0), shift(d, 1)),
        z_maps=(shift(d, 0), shift(d, 2), shift(d, 1)),
    )


def circuit_torpedo_strategy(d: int) -> CircuitStrategy:
    """Fiducial, then ``X^x``, ``Z^z`` and the gate rotating basis ``q`` onto the computational basis."""
    if d == 2:
        measurement = qubit_measurement(QUBIT_BASIS_ASSIGNMENT)
        fiducial = qubit_fiducial()
    else:
        require_odd_prime(d)
        measurement = mub_system(d)
        fiducial = perfect_torpedo_strategy(d).fiducial
        assert fiducial is not None
    return CircuitStrategy(
        fiducial,
        tuple(measurement.measurement_gate(q) for q in measurement.questions),
        x_gates=tuple(np.linalg.matrix_power(pauli_x(d), x) for x in range(d)),
        z_gates=tuple(np.linalg.matrix_power(pauli_z(d), z) for z in range(d)),
    )


def _functions(d: int) -> npt.NDArray[np.int64]:
    """All maps Z_d -> Z_d as rows ``f[j]``."""
    return np.array(list(product(range(d), repeat=d)), dtype=np.int64)


def brute_force_transformational_bound(d: int = 2, *, global_preparation: bool = False) -> int:
    """
    Most torpedo constraints any deterministic transformational strategy satisfies jointly.

    Every choice of deterministic maps is scanned: ``T_x`` and ``T_z`` per value (or one global map per
    input) and ``T_q`` per question.
    """
    if d != 2:
        raise DimensionError('the transformational brute force is only tractable for d = 2')
    task = torpedo_task(d)
    functions = _functions(d)
    n = len(functions)
    forbidden = np.array([[torpedo_forbidden(d, q, x, z) for q in task.questions] for x, z in task.inputs])

    if global_preparation:
        preparations = product(range(n), repeat=len(task.inputs))
        hidden_values = [functions[list(choice), 0] for choice in preparations]
    else:
        hidden_values = []
        for tx in product(range(n), repeat=d):
            for tz in product(range(n), repeat=d):
                hidden_values.append(
                    np.array([functions[tz[z], functions[tx[x], 0]] for x, z in task.inputs], dtype=np.int64),
                )

    best = 0
    for hidden in hidden_values:
        # per question and readout map, how many inputs avoid the losing answer
        answers = functions[:, hidden]  # [map, input]
        counts = (answers[None, :, :] != forbidden.T[:, None, :]).sum(axis=2)  # [question, map]
        grids = np.meshgrid(*counts, indexing='ij')
        best = max(best, int(np.sum(grids, axis=0).max()))
    logger.debug('Transformational brute force (global=%s) for d=%d: %d', global_preparation, d, best)
    return best


def minus_projector_identity(d: int) -> float:
    """Largest entrywise gap between ``(I - A(x, z)) / (d - 1)`` and the normalised -1 eigenprojector."""
    require_odd_prime(d)
    worst = 0.0
    for x, z in product(range(d), repeat=2):
        A = phase_point_operator(d, x, z)
        vectors = minus_eigenspace(A)
        projector = sum(np.outer(v, v.conj()) for v in vectors) / len(vectors)
        worst = max(worst, float(np.max(np.abs((np.eye(d) - A.matrix) / (d - 1) - projector))))
    return worst


@dataclass(frozen=True, slots=True)
class ComplementReport:
    d: int
    checked: int
    max_deviation: float
    projector_deviation: float

    @property
    def holds(self) -> bool:
        return self.max_deviation <= VANISHING_TOL and self.projector_deviation <= ASSERTION_TOL


def verify_phase_point_complement(d: int) -> ComplementReport:
    """
    Measure ``(I - A(x, z)) / (d - 1)`` in every basis and compare with ``(1 - delta(k, forbidden)) / (d - 1)``.

    The forbidden outcome of basis ``q`` is the answer the torpedo task rules out for cell ``(x, z)``.
    """
    require_odd_prime(d)
    mubs = mub_system(d)
    deviation = 0.0
    checked = 0
    for x, z in product(range(d), repeat=2):
        state = (np.eye(d) - phase_point_operator(d, x, z).matrix) / (d - 1)
        for q in mubs.questions:
            gate = mubs.measurement_gate(q)
            probabilities = np.diag(gate @ state @ gate.conj().T).real
            expected = np.full(d, 1 / (d - 1))
            expected[torpedo_forbidden(d, q, x, z)] = 0
            deviation = max(deviation, float(np.max(np.abs(probabilities - expected))))
            checked += d
    return ComplementReport(d, checked, deviation, minus_projector_identity(d))


def identity_strategy(d: int, questions: int) -> TransformationStrategy:
    """Every map the identity; always reads out hidden value 0."""
    ident = StochasticMatrix.identity(d)
    return TransformationStrategy(d, (ident,) * questions, x_maps=(ident,) * d, z_maps=(ident,) * d)


__all__ = (
    'CircuitStrategy',
    'ComplementReport',
    'StochasticMatrix',
    'TransformationStrategy',
    'behaviour_from_transformational',
    'brute_force_transformational_bound',
    'circuit_torpedo_strategy',
    'count_transformational_constraints',
    'identity_strategy',
    'minus_projector_identity',
    'pam_to_transformational',
    'reversible_gate_strategy_d3',
    'verify_phase_point_complement',
)
