"""
Retrieval tasks, strategies and empirical behaviours.

Behaviour tables are indexed ``[input, question, answer]`` with inputs and questions in the
order the task lists them. Winning relations are stored the same way as boolean tables.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cache, cached_property
from itertools import permutations, product
from typing import TYPE_CHECKING, Final, Self

import numpy as np
import numpy.typing as npt
from scipy.linalg import eigh

from torpedo.errors import DimensionError, StrategyError
from torpedo.qudit import (
    INF,
    ASSERTION_TOL,
    CONSTRUCTION_TOL,
    Question,
    ComplexMatrix,
    BasisMeasurement,
    frozen,
    pauli_x,
    pauli_y,
    pauli_z,
    mub_system,
    qubit_bases,
    displacement,
    is_hermitian,
    require_prime,
    qubit_pauli_word,
    require_odd_prime,
    torpedo_questions,
)
from torpedo.wigner import qubit_phase_point


if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Mapping, Sequence


logger = logging.getLogger(__name__)

Input = tuple[int, ...]
BoolTable = npt.NDArray[np.bool_]
FloatTable = npt.NDArray[np.float64]

NEGATIVE_TOL: Final = 1e-12

# (4,1)_3 random access code, quoted from the literature rather than computed here
QRAC_41_3_CLASSICAL: Final = Fraction(16, 27)
QRAC_41_3_QUANTUM: Final = 0.637

# question -> (Pauli basis, outcome labels swapped); re-derived by search_qubit_assignment()
QUBIT_BASIS_ASSIGNMENT: Final[Mapping[Question, tuple[str, bool]]] = {
    INF: ('Z', False),
    0: ('X', False),
    1: ('Y', False),
}


@dataclass(frozen=True, eq=False)
class RetrievalTask:
    name: str
    d: int
    n: int
    inputs: tuple[Input, ...]
    questions: tuple[Question, ...]
    winning: BoolTable

    def __post_init__(self) -> None:
        expected = (len(self.inputs), len(self.questions), self.d)
        if self.winning.shape != expected:
            raise StrategyError(f'winning table has shape {self.winning.shape}, expected {expected}')
        if any(len(i) != self.n for i in self.inputs):
            raise StrategyError(f'every input must have arity {self.n}')
        if len(set(self.inputs)) != len(self.inputs):
            raise StrategyError('inputs must be distinct')
        object.__setattr__(self, 'winning', frozen(np.array(self.winning, dtype=np.bool_)))

    @cached_property
    def _input_positions(self) -> dict[Input, int]:
        return {inp: i for i, inp in enumerate(self.inputs)}

    @property
    def contexts(self) -> int:
        return len(self.inputs) * len(self.questions)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.winning.shape

    def input_index(self, inp: Sequence[int]) -> int:
        return self._input_positions[tuple(inp)]

    def question_index(self, q: Question) -> int:
        return self.questions.index(q)

    def winning_set(self, q: Question, inp: Sequence[int]) -> frozenset[int]:
        row = self.winning[self.input_index(inp), self.question_index(q)]
        return frozenset(int(c) for c in np.flatnonzero(row))

    def winning_mask(self, i: int, qi: int) -> int:
        """Winning answers of context ``(inputs[i], questions[qi])`` as a bitmask."""
        return sum(1 << int(c) for c in np.flatnonzero(self.winning[i, qi]))

    @property
    def forbidden_counts(self) -> npt.NDArray[np.int64]:
        return (~self.winning).sum(axis=2)

    def is_pair_task(self) -> bool:
        """True when the inputs are exactly Z_d x Z_d in row-major order."""
        return self.n == 2 and self.inputs == tuple(product(range(self.d), repeat=2))

    def same_shape(self, other: RetrievalTask) -> bool:
        return (
            self.d == other.d
            and self.inputs == other.inputs
            and self.questions == other.questions
            and bool(np.array_equal(self.winning, other.winning))
        )


def _build_task(
    name: str,
    d: int,
    inputs: Iterable[Input],
    questions: tuple[Question, ...],
    rule: Callable[[Question, Input], Iterable[int]],
) -> RetrievalTask:
    inputs = tuple(inputs)
    winning = np.zeros((len(inputs), len(questions), d), dtype=np.bool_)
    for i, inp in enumerate(inputs):
        for qi, q in enumerate(questions):
            for c in rule(q, inp):
                winning[i, qi, c % d] = True
    return RetrievalTask(name, d, len(inputs[0]), inputs, questions, winning)


def torpedo_forbidden(d: int, q: Question, x: int, z: int) -> int:
    """The single losing answer for cell ``(x, z)`` in direction ``q``."""
    if q == INF:
        return x % d
    return (int(q) * x - z) % d


@cache
def torpedo_task(d: int) -> RetrievalTask:
    require_prime(d)

    def rule(q: Question, inp: Input) -> list[int]:
        bad = torpedo_forbidden(d, q, *inp)
        return [a for a in range(d) if a != bad]

    return _build_task('torpedo', d, product(range(d), repeat=2), torpedo_questions(d), rule)


@cache
def modified_torpedo_task(d: int) -> RetrievalTask:
    require_odd_prime(d)
    if d < 5:
        raise DimensionError('the modified game needs d >= 5; for d = 3 use the standard torpedo task')

    def rule(q: Question, inp: Input) -> list[int]:
        x, z, ell = inp
        if q == INF:
            return [x + ell + 1, x - ell - 1]
        bad = torpedo_forbidden(d, q, x, z)
        return [a for a in range(d) if a != bad]

    inputs = product(range(d), range(d), range((d - 1) // 2))
    return _build_task('modified-torpedo', d, inputs, torpedo_questions(d), rule)


@cache
def qrac_task(n: int, d: int) -> RetrievalTask:
    require_prime(d)
    if n < 2:
        raise DimensionError(f'a random access code needs at least 2 input dits, got {n}')
    questions = tuple(range(1, n + 1))
    return _build_task('qrac', d, product(range(d), repeat=n), questions, lambda q, inp: [inp[int(q) - 1]])


def restricted_qrac_equivalence() -> bool:
    """Qubit torpedo on questions {inf, 0} is the (2,1)_2 code with complemented answers."""
    torpedo = torpedo_task(2)
    qrac = qrac_task(2, 2)
    restricted = torpedo.winning[:, [torpedo.question_index(INF), torpedo.question_index(0)], :]
    return torpedo.inputs == qrac.inputs and bool(np.array_equal(restricted, qrac.winning[:, :, ::-1]))


@dataclass(frozen=True, eq=False)
class EmpiricalBehaviour:
    task: RetrievalTask
    table: FloatTable
    quasi: bool = False

    def __post_init__(self) -> None:
        table = np.array(self.table, dtype=np.float64)
        if table.shape != self.task.shape:
            raise StrategyError(f'behaviour has shape {table.shape}, task expects {self.task.shape}')
        sums = table.sum(axis=2)
        if np.max(np.abs(sums - 1)) > ASSERTION_TOL:
            raise StrategyError('every context distribution must sum to 1')
        if not self.quasi and table.min() < -NEGATIVE_TOL:
            raise StrategyError('negative probability in a behaviour not marked quasi')
        object.__setattr__(self, 'table', frozen(table))

    @classmethod
    def from_table(cls, task: RetrievalTask, table: npt.ArrayLike) -> EmpiricalBehaviour:
        values = np.asarray(table, dtype=np.float64)
        return cls(task, values, quasi=bool(values.min() < -NEGATIVE_TOL))

    @classmethod
    def uniform(cls, task: RetrievalTask) -> EmpiricalBehaviour:
        return cls(task, np.full(task.shape, 1 / task.d))

    def mix(self, other: EmpiricalBehaviour, t: float) -> EmpiricalBehaviour:
        """``(1 - t) * self + t * other``."""
        if not self.task.same_shape(other.task):
            raise StrategyError('cannot mix behaviours of different tasks')
        return EmpiricalBehaviour.from_table(self.task, (1 - t) * self.table + t * other.table)

    def probability(self, inp: Sequence[int], q: Question, c: int) -> float:
        return float(self.table[self.task.input_index(inp), self.task.question_index(q), c])

    def forbidden_mass(self) -> float:
        """Largest probability placed on a losing answer."""
        losing = self.table[~self.task.winning]
        return float(losing.max()) if losing.size else 0.0

    def support(self, tol: float = NEGATIVE_TOL) -> BoolTable:
        return self.table > tol


@dataclass(frozen=True, eq=False)
class ClassicalStrategy:
    """``encoding[i, j] = p_E(j | input i)`` and ``decoding[j, q, c] = p_D(c | j, q)``."""

    encoding: FloatTable
    decoding: FloatTable

    def __post_init__(self) -> None:
        encoding = np.array(self.encoding, dtype=np.float64)
        decoding = np.array(self.decoding, dtype=np.float64)
        if encoding.ndim != 2 or decoding.ndim != 3 or encoding.shape[1] != decoding.shape[0]:
            raise StrategyError('encoding and decoding shapes do not compose')
        for name, dist in (('encoding', encoding), ('decoding', decoding)):
            if dist.min() < 0 or np.max(np.abs(dist.sum(axis=-1) - 1)) > CONSTRUCTION_TOL:
                raise StrategyError(f'{name} is not stochastic')
        object.__setattr__(self, 'encoding', frozen(encoding))
        object.__setattr__(self, 'decoding', frozen(decoding))

    @classmethod
    def deterministic(cls, colours: Sequence[int], decisions: npt.ArrayLike, d: int) -> ClassicalStrategy:
        """From a message per input and an answer per ``(message, question)``."""
        decisions = np.asarray(decisions, dtype=np.int64)
        messages = decisions.shape[0]
        encoding = np.eye(messages)[np.asarray(colours, dtype=np.int64)]
        decoding = np.eye(d)[decisions]
        return cls(encoding, decoding)

    @property
    def messages(self) -> int:
        return self.encoding.shape[1]


@dataclass(frozen=True, eq=False)
class HermitianStrategy:
    """
    Message operators per input plus a projective measurement per question.

    ``fiducial`` is set when the operators are the Weyl translates of one pure state, which lets the
    strategy be rewritten as a circuit of Pauli gates.
    """

    states: npt.NDArray[np.complex128]
    measurement: BasisMeasurement
    fiducial: npt.NDArray[np.complex128] | None = None

    def __post_init__(self) -> None:
        states = np.array(self.states, dtype=np.complex128)
        d = self.measurement.d
        if states.ndim != 3 or states.shape[1:] != (d, d):
            raise StrategyError(f'states must be an array of {d}x{d} operators')
        for i, rho in enumerate(states):
            if not is_hermitian(rho, ASSERTION_TOL):
                raise StrategyError(f'operator for input #{i} is not Hermitian')
            if abs(np.trace(rho) - 1) > ASSERTION_TOL:
                raise StrategyError(f'operator for input #{i} does not have unit trace')
        object.__setattr__(self, 'states', frozen(states))
        if self.fiducial is not None:
            object.__setattr__(self, 'fiducial', frozen(np.array(self.fiducial, dtype=np.complex128)))

    @classmethod
    def from_vectors(
        cls,
        vectors: Iterable[npt.ArrayLike],
        measurement: BasisMeasurement,
        fiducial: npt.ArrayLike | None = None,
    ) -> Self:
        kets = np.array(list(vectors), dtype=np.complex128)
        states = np.einsum('ia,ib->iab', kets, kets.conj())
        return cls(states, measurement, None if fiducial is None else np.asarray(fiducial))

    @property
    def d(self) -> int:
        return self.measurement.d

    def pure_vectors(self) -> list[npt.NDArray[np.complex128]] | None:
        """State vectors when every operator is a rank-1 projector, else None."""
        vectors = []
        for rho in self.states:
            evals, evecs = eigh(rho)
            if abs(evals[-1] - 1) > ASSERTION_TOL:
                return None
            vectors.append(evecs[:, -1])
        return vectors


@dataclass(frozen=True, eq=False)
class QuantumStrategy(HermitianStrategy):
    def __post_init__(self) -> None:
        super().__post_init__()
        for i, rho in enumerate(self.states):
            if eigh(rho, eigvals_only=True)[0] < -ASSERTION_TOL:
                raise StrategyError(f'state for input #{i} is not positive semidefinite')


def behaviour_from_classical(s: ClassicalStrategy, task: RetrievalTask) -> EmpiricalBehaviour:
    if s.encoding.shape[0] != len(task.inputs) or s.decoding.shape[1:] != task.shape[1:]:
        raise StrategyError('strategy dimensions do not match the task')
    table = np.einsum('ij,jqc->iqc', s.encoding, s.decoding)
    return EmpiricalBehaviour(task, table, quasi=False)


def behaviour_from_quantum(s: HermitianStrategy, task: RetrievalTask) -> EmpiricalBehaviour:
    if s.measurement.questions != task.questions:
        raise StrategyError('measurement questions do not match the task')
    if s.states.shape[0] != len(task.inputs) or s.d != task.d:
        raise StrategyError('strategy dimensions do not match the task')
    projectors = s.measurement.projectors
    resolution = projectors.sum(axis=1) - np.eye(s.d)
    if np.max(np.abs(resolution)) > ASSERTION_TOL:
        raise StrategyError('measurement does not resolve the identity')

    table = np.einsum('iab,qcba->iqc', s.states, projectors).real
    if isinstance(s, QuantumStrategy):
        return EmpiricalBehaviour(task, table, quasi=False)
    return EmpiricalBehaviour.from_table(task, table)


def task_value(task: RetrievalTask, e: EmpiricalBehaviour) -> float:
    if not task.same_shape(e.task):
        raise StrategyError('behaviour belongs to a different task')
    return float((e.table * task.winning).sum() / task.contexts)


def _torpedo_fiducial(d: int, ell: int) -> npt.NDArray[np.complex128]:
    fiducial = np.zeros(d, dtype=np.complex128)
    fiducial[ell + 1] = 1
    fiducial[-(ell + 1) % d] = -1
    return fiducial / np.sqrt(2)


def _check_ell(d: int, ell: int) -> None:
    if not 0 <= ell < (d - 1) // 2:
        raise DimensionError(f'ell must lie in [0, {(d - 1) // 2}) for d={d}, got {ell}')


def perfect_torpedo_strategy(d: int, ell: int = 0) -> QuantumStrategy:
    """Translates ``D(x, z)`` of ``(|ell+1> - |-(ell+1)>) / sqrt(2)`` measured in the MUB."""
    require_odd_prime(d)
    _check_ell(d, ell)
    fiducial = _torpedo_fiducial(d, ell)
    vectors = (displacement(d, x, z) @ fiducial for x, z in torpedo_task(d).inputs)
    return QuantumStrategy.from_vectors(vectors, mub_system(d), fiducial)


def perfect_modified_torpedo_strategy(d: int) -> QuantumStrategy:
    task = modified_torpedo_task(d)
    fiducials = [_torpedo_fiducial(d, ell) for ell in range((d - 1) // 2)]
    vectors = (displacement(d, x, z) @ fiducials[ell] for x, z, ell in task.inputs)
    return QuantumStrategy.from_vectors(vectors, mub_system(d))


def qubit_measurement(assignment: Mapping[Question, tuple[str, bool]]) -> BasisMeasurement:
    bases = qubit_bases()
    unitaries = []
    for q in torpedo_questions(2):
        name, swapped = assignment[q]
        basis = bases[name]
        unitaries.append(basis[:, ::-1] if swapped else basis)
    return BasisMeasurement(torpedo_questions(2), tuple(unitaries))


@cache
def qubit_fiducial() -> npt.NDArray[np.complex128]:
    """Pure state with Bloch vector ``-(1, 1, 1) / sqrt(3)``."""
    rho = (np.eye(2) - (pauli_x(2) + pauli_y() + pauli_z(2)) / np.sqrt(3)) / 2
    _, evecs = eigh(rho)
    return frozen(evecs[:, -1].copy())


def _qubit_strategy(assignment: Mapping[Question, tuple[str, bool]]) -> QuantumStrategy:
    fiducial = qubit_fiducial()
    vectors = (qubit_pauli_word(x, z) @ fiducial for x, z in torpedo_task(2).inputs)
    return QuantumStrategy.from_vectors(vectors, qubit_measurement(assignment), fiducial)


def search_qubit_assignment() -> tuple[dict[Question, tuple[str, bool]], float]:
    """Best question-to-basis assignment over all 3! orders and 2^3 relabellings."""
    task = torpedo_task(2)
    best: tuple[dict[Question, tuple[str, bool]], float] | None = None
    for order in permutations(('Z', 'X', 'Y')):
        for swaps in product((False, True), repeat=3):
            assignment = dict(zip(torpedo_questions(2), zip(order, swaps, strict=True), strict=True))
            value = task_value(task, behaviour_from_quantum(_qubit_strategy(assignment), task))
            if best is None or value > best[1] + ASSERTION_TOL:
                best = (assignment, value)
    assert best is not None
    return best


def qubit_torpedo_strategy() -> QuantumStrategy:
    return _qubit_strategy(QUBIT_BASIS_ASSIGNMENT)


def postquantum_qubit_torpedo_strategy() -> HermitianStrategy:
    states = np.array([qubit_phase_point(x, z) for x, z in torpedo_task(2).inputs])
    return HermitianStrategy(states, qubit_measurement(QUBIT_BASIS_ASSIGNMENT))


def qubit_quantum_value() -> float:
    """Analytic value of the qubit strategy, ``(1 + 1/sqrt(3)) / 2``."""
    return (1 + 1 / np.sqrt(3)) / 2


def _qrac_labels(d: int) -> list[tuple[int, ...]]:
    return list(product(range(d), repeat=d + 1))


def qrac_state_value(d: int, states: Mapping[tuple[int, ...], npt.ArrayLike]) -> float:
    """Average success of the (d+1, 1)_d code that measures one MUB per question."""
    require_odd_prime(d)
    projectors = mub_system(d).projectors
    labels = _qrac_labels(d)
    missing = [k for k in labels if k not in states]
    if missing:
        raise StrategyError(f'{len(missing)} of the {len(labels)} inputs have no state')

    questions = np.arange(d + 1)
    total = 0.0
    for k in labels:
        rho = np.asarray(states[k], dtype=np.complex128)
        effect = projectors[questions, np.asarray(k)].sum(axis=0)
        total += float(np.trace(rho @ effect).real)
    return total / ((d + 1) * d ** (d + 1))


def _qrac_effect(d: int, k: tuple[int, ...]) -> ComplexMatrix:
    projectors = mub_system(d).projectors
    return projectors[np.arange(d + 1), np.asarray(k)].sum(axis=0)


def phase_point_qrac_states(d: int) -> dict[tuple[int, ...], ComplexMatrix]:
    """``A_k = sum_i P_i^{k_i} - I``: unit trace, ``Tr(A_k^2) = d``, not positive."""
    return {k: _qrac_effect(d, k) - np.eye(d) for k in _qrac_labels(d)}


def maximally_mixed_qrac_states(d: int) -> dict[tuple[int, ...], ComplexMatrix]:
    mixed = np.eye(d, dtype=np.complex128) / d
    return dict.fromkeys(_qrac_labels(d), mixed)


def eigenvector_qrac_states(d: int) -> dict[tuple[int, ...], ComplexMatrix]:
    """Projector onto the top eigenvector of each ``A_k``."""
    states = {}
    for k, A in phase_point_qrac_states(d).items():
        _, evecs = eigh(A)
        top = evecs[:, -1]
        states[k] = np.outer(top, top.conj())
    return states


def qrac21_strategies() -> tuple[ClassicalStrategy, QuantumStrategy]:
    """
    Optimal strategies for the (2,1)_2 code.

    Classically the first bit is sent and the second is guessed as 0. The quantum message is
    ``(|0> + e^{i phi}|1>) / sqrt(2)`` with ``e^{i phi} = ((-1)^x1 + i (-1)^x2) / sqrt(2)``,
    read out in the X basis for bit 1 and the Y basis for bit 2, the +1 eigenvalue meaning 0.
    """
    task = qrac_task(2, 2)
    colours = [x1 for x1, _ in task.inputs]
    classical = ClassicalStrategy.deterministic(colours, [[0, 0], [1, 0]], 2)

    vectors = []
    for x1, x2 in task.inputs:
        phase = ((-1) ** x1 + 1j * (-1) ** x2) / np.sqrt(2)
        vectors.append(np.array([1, phase]) / np.sqrt(2))
    bases = qubit_bases()
    measurement = BasisMeasurement(task.questions, (bases['X'], bases['Y']))
    quantum = QuantumStrategy.from_vectors(vectors, measurement)
    return classical, quantum


__all__ = (
    'QRAC_41_3_CLASSICAL',
    'QRAC_41_3_QUANTUM',
    'QUBIT_BASIS_ASSIGNMENT',
    'ClassicalStrategy',
    'EmpiricalBehaviour',
    'HermitianStrategy',
    'Input',
    'QuantumStrategy',
    'RetrievalTask',
    'behaviour_from_classical',
    'behaviour_from_quantum',
    'eigenvector_qrac_states',
    'maximally_mixed_qrac_states',
    'modified_torpedo_task',
    'perfect_modified_torpedo_strategy',
    'perfect_torpedo_strategy',
    'phase_point_qrac_states',
    'postquantum_qubit_torpedo_strategy',
    'qrac21_strategies',
    'qrac_state_value',
    'qrac_task',
    'qubit_fiducial',
    'qubit_measurement',
    'qubit_quantum_value',
    'qubit_torpedo_strategy',
    'restricted_qrac_equivalence',
    'search_qubit_assignment',
    'task_value',
    'torpedo_forbidden',
    'torpedo_task',
)
