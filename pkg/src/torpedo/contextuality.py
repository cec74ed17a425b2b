"""
Bounded-memory hidden-variable models and the noncontextual fraction.

Deterministic vertices are (encoding, decoding) pairs. Every pricing step reduces to the same scan:
for each colouring up to relabelling, sum the weights of every colour class and let the decoder take
the best answer per (colour, question).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import TYPE_CHECKING, Final, Literal, NamedTuple

import numpy as np
import numpy.typing as npt
from scipy.optimize import linprog

from torpedo.classical import (
    MAX_EXHAUSTIVE_CELLS,
    MAX_EXHAUSTIVE_DIMENSION,
    DeterministicEncoding,
    class_sums,
    optimal_colouring,
    canonical_colouring_array,
)
from torpedo.errors import ConsistencyError, ScalabilityError, StrategyError
from torpedo.qudit import INF, ASSERTION_TOL
from torpedo.tasks import ClassicalStrategy, EmpiricalBehaviour, task_value, torpedo_task


if TYPE_CHECKING:
    from torpedo.tasks import FloatTable, RetrievalTask


logger = logging.getLogger(__name__)

Method = Literal['auto', 'enumerate', 'column-generation']

PRICING_TOL: Final = 1e-10
VANISHING_TOL: Final = 1e-12
MAX_ENUMERATED_VERTICES: Final = 1 << 16
MAX_COLUMN_ITERATIONS: Final = 2000
LP_OPTIONS: Final = {'primal_feasibility_tolerance': 1e-10, 'dual_feasibility_tolerance': 1e-10}


@dataclass(frozen=True, slots=True)
class DeterministicVertex:
    """An encoding together with a decoding ``decoding[colour][question]``."""

    encoding: DeterministicEncoding
    decoding: tuple[tuple[int, ...], ...]

    def answers(self) -> npt.NDArray[np.int64]:
        """Answer per ``[input, question]``."""
        return np.asarray(self.decoding, dtype=np.int64)[self.encoding.as_array()]

    def table(self, task: RetrievalTask) -> FloatTable:
        if self.encoding.cells != len(task.inputs) or len(self.decoding[0]) != len(task.questions):
            raise StrategyError(f'vertex does not fit task {task.name}')
        return (self.answers()[:, :, None] == np.arange(task.d)).astype(np.float64)

    def to_strategy(self) -> ClassicalStrategy:
        return ClassicalStrategy.deterministic(self.encoding.colours, self.decoding, self.encoding.d)

    def decoding_string(self) -> str:
        """Decoding as one dit string per colour, joined by ``/``."""
        return '/'.join(str(DeterministicEncoding(self.encoding.d, row)) for row in self.decoding)


class VertexScore(NamedTuple):
    score: float
    vertex: DeterministicVertex


def _require_scannable(task: RetrievalTask) -> None:
    if task.d > MAX_EXHAUSTIVE_DIMENSION or len(task.inputs) > MAX_EXHAUSTIVE_CELLS:
        raise ScalabilityError(
            f'vertex scans are limited to d <= {MAX_EXHAUSTIVE_DIMENSION} '
            f'(task {task.name} has d={task.d} and {len(task.inputs)} inputs)',
        )


def best_vertex(weights: npt.ArrayLike, task: RetrievalTask) -> VertexScore:
    """
    Maximise ``sum weights[i, q, g(f(i), q)]`` over deterministic vertices ``(f, g)``.

    Integer weights give an exact integer score.
    """
    _require_scannable(task)
    w = np.asarray(weights)
    if w.shape != task.shape:
        raise StrategyError(f'weights have shape {w.shape}, task expects {task.shape}')
    encodings = canonical_colouring_array(len(task.inputs), task.d)
    sums = class_sums(encodings, w, task.d)
    scores = sums.max(axis=3).sum(axis=(1, 2))
    best = int(np.argmax(scores))
    decoding = tuple(tuple(int(c) for c in row) for row in sums[best].argmax(axis=2))
    vertex = DeterministicVertex(DeterministicEncoding(task.d, tuple(encodings[best])), decoding)
    return VertexScore(scores[best].item(), vertex)


class VertexSet(NamedTuple):
    vertices: tuple[DeterministicVertex, ...]
    tables: npt.NDArray[np.float64]  # [vertex, input, question, answer]


def _vertex_count(task: RetrievalTask) -> int:
    return len(canonical_colouring_array(len(task.inputs), task.d)) * task.d ** (task.d * len(task.questions))


def enumerate_vertices(task: RetrievalTask) -> VertexSet:
    """Every distinct deterministic behaviour of a small task, one representative vertex each."""
    _require_scannable(task)
    d, questions = task.d, len(task.questions)
    encodings = canonical_colouring_array(len(task.inputs), d)
    count = _vertex_count(task)
    if count > MAX_ENUMERATED_VERTICES:
        raise ScalabilityError(f'{count} vertices is too many to enumerate; use column generation')

    decodings = np.array(list(product(range(d), repeat=d * questions)), dtype=np.int64)
    decodings = decodings.reshape(-1, d, questions)
    # answers[g, e, i, q] = decodings[g, encodings[e, i], q]
    answers = decodings[:, encodings, :].reshape(-1, len(task.inputs), questions)
    tables = (answers[..., None] == np.arange(d)).astype(np.float64)
    _, keep = np.unique(tables.reshape(len(tables), -1), axis=0, return_index=True)
    keep.sort()

    vertices = []
    for index in keep:
        g, e = divmod(int(index), len(encodings))
        encoding = DeterministicEncoding(d, tuple(encodings[e]))
        decoding = tuple(tuple(int(c) for c in row) for row in decodings[g])
        vertices.append(DeterministicVertex(encoding, decoding))
    logger.debug('Enumerated %d distinct vertices out of %d for %s d=%d', len(keep), count, task.name, d)
    return VertexSet(tuple(vertices), tables[keep])


@dataclass(frozen=True, eq=False)
class DecompositionResult:
    """
    Solution of ``max sum(lambda) s.t. sum lambda_s e_s <= e, lambda >= 0``.

    ``residual`` is the normalised remainder ``e'`` (None when the noncontextual part is everything)
    and ``dual`` the certificate ``y(c | i, q) >= 0`` whose objective ``y . e`` bounds the fraction.
    """

    ncf: float
    weights: tuple[tuple[DeterministicVertex, float], ...]
    residual: FloatTable | None
    dual: FloatTable
    gap: float
    feasibility: float
    method: Method
    iterations: int

    @property
    def cf(self) -> float:
        return 1 - self.ncf


class _LPSolution(NamedTuple):
    value: float
    weights: npt.NDArray[np.float64]
    dual: npt.NDArray[np.float64]


def _solve_restricted(columns: npt.NDArray[np.float64], target: npt.NDArray[np.float64]) -> _LPSolution:
    res = linprog(
        c=-np.ones(len(columns)),
        A_ub=columns.T,
        b_ub=target,
        bounds=(0, None),
        method='highs',
        options=LP_OPTIONS,
    )
    if res.status != 0:
        raise ConsistencyError(f'noncontextual fraction LP failed: {res.message}')
    return _LPSolution(-float(res.fun), np.asarray(res.x), -np.asarray(res.ineqlin.marginals))


def _random_vertex(task: RetrievalTask, rng: np.random.Generator) -> DeterministicVertex:
    d = task.d
    colours = tuple(int(c) for c in rng.integers(0, d, size=len(task.inputs)))
    decoding = tuple(tuple(int(c) for c in row) for row in rng.integers(0, d, size=(d, len(task.questions))))
    return DeterministicVertex(DeterministicEncoding(d, colours), decoding)


def _column_generation(
    e: EmpiricalBehaviour,
    seed: int,
) -> tuple[_LPSolution, list[DeterministicVertex], npt.NDArray[np.float64], int]:
    task = e.task
    target = e.table.ravel()
    rng = np.random.default_rng(seed)
    start = [best_vertex(task.winning.astype(np.int64), task).vertex]
    start += [_random_vertex(task, rng) for _ in range(task.d)]

    vertices: list[DeterministicVertex] = []
    seen: set[bytes] = set()
    rows: list[npt.NDArray[np.float64]] = []

    def add(vertex: DeterministicVertex) -> bool:
        row = vertex.table(task).ravel()
        key = row.astype(np.bool_).tobytes()
        if key in seen:
            return False
        seen.add(key)
        vertices.append(vertex)
        rows.append(row)
        return True

    for vertex in start:
        add(vertex)

    for iteration in range(1, MAX_COLUMN_ITERATIONS + 1):
        columns = np.array(rows)
        solution = _solve_restricted(columns, target)
        score, candidate = best_vertex(-solution.dual.reshape(task.shape), task)
        reduced_cost = 1 + score
        logger.debug('Iteration %d: ncf %.12f, reduced cost %.3e', iteration, solution.value, reduced_cost)
        if reduced_cost <= PRICING_TOL:
            return solution, vertices, columns, iteration
        if not add(candidate):
            logger.warning('Pricing returned a known vertex with reduced cost %.3e; stopping', reduced_cost)
            return solution, vertices, columns, iteration
    raise ConsistencyError(f'column generation did not converge in {MAX_COLUMN_ITERATIONS} iterations')


def ncf(e: EmpiricalBehaviour, method: Method = 'auto', seed: int = 0) -> DecompositionResult:
    """
    Noncontextual fraction of a behaviour.

    ``'enumerate'`` solves one LP over every distinct deterministic behaviour; ``'column-generation'``
    grows the vertex set with the pricing scan until no vertex has positive reduced cost. ``'auto'``
    enumerates when that is affordable.
    """
    if e.quasi:
        raise StrategyError('the noncontextual fraction is undefined for behaviours with negative entries')
    task = e.task
    _require_scannable(task)

    if method == 'auto':
        method = 'enumerate' if _vertex_count(task) <= MAX_ENUMERATED_VERTICES else 'column-generation'

    if method == 'enumerate':
        vertex_set = enumerate_vertices(task)
        vertices = list(vertex_set.vertices)
        columns = vertex_set.tables.reshape(len(vertices), -1)
        solution = _solve_restricted(columns, e.table.ravel())
        iterations = 1
    else:
        solution, vertices, columns, iterations = _column_generation(e, seed)

    return _certify(e, solution, vertices, columns, method, iterations)


def _certify(
    e: EmpiricalBehaviour,
    solution: _LPSolution,
    vertices: list[DeterministicVertex],
    columns: npt.NDArray[np.float64],
    method: Method,
    iterations: int,
) -> DecompositionResult:
    task = e.task
    target = e.table.ravel()
    weights = np.clip(solution.weights, 0, None)
    value = float(weights.sum())
    mixture = weights @ columns
    feasibility = max(0.0, float(np.max(mixture - target)))
    dual = np.clip(solution.dual, 0, None)
    gap = abs(value - float(dual @ target))

    if abs(value - solution.value) > ASSERTION_TOL or feasibility > ASSERTION_TOL:
        raise ConsistencyError(f'LP weights fail the feasibility check (residual {feasibility:.3e})')
    if gap > 1e-7:
        raise ConsistencyError(f'primal and dual objectives differ by {gap:.3e}')

    value = min(max(value, 0.0), 1.0)
    residual = None
    if value < 1 - ASSERTION_TOL:
        residual = np.clip(target - mixture, 0, None).reshape(task.shape) / (1 - value)
    kept = tuple((v, float(w)) for v, w in zip(vertices, weights, strict=True) if w > VANISHING_TOL)
    logger.info('Noncontextual fraction %.9f via %s (%d iterations, gap %.2e)', value, method, iterations, gap)
    return DecompositionResult(
        ncf=value,
        weights=kept,
        residual=residual,
        dual=dual.reshape(task.shape),
        gap=gap,
        feasibility=feasibility,
        method=method,
        iterations=iterations,
    )


def strong_contextuality_check(e: EmpiricalBehaviour) -> tuple[bool, DeterministicVertex | None]:
    """
    Strongly contextual iff no deterministic vertex lives inside the support of ``e``.

    Returns a vertex with that property as witness when one exists.
    """
    task = e.task
    score, vertex = best_vertex(e.support().astype(np.int64), task)
    if score < task.contexts:
        return True, None
    return False, vertex


@dataclass(frozen=True, eq=False)
class HiddenVariableModel:
    """
    Preparations ``states[i, h]`` and response functions ``effects[q, c, h]`` over ``d`` hidden values.

    The behaviour is ``e(c | i, q) = effects[q, c] . states[i]``.
    """

    d: int
    states: FloatTable
    effects: FloatTable

    def __post_init__(self) -> None:
        states = np.array(self.states, dtype=np.float64)
        effects = np.array(self.effects, dtype=np.float64)
        if states.ndim != 2 or states.shape[1] != self.d or effects.ndim != 3 or effects.shape[2] != self.d:
            raise StrategyError(f'hidden-variable arrays must range over {self.d} hidden values')
        if states.min() < 0 or np.max(np.abs(states.sum(axis=1) - 1)) > ASSERTION_TOL:
            raise StrategyError('each preparation must be a probability vector')
        if effects.min() < 0 or np.max(np.abs(effects.sum(axis=1) - 1)) > ASSERTION_TOL:
            raise StrategyError('response functions of every question must sum to the all-ones vector')
        object.__setattr__(self, 'states', states)
        object.__setattr__(self, 'effects', effects)

    @classmethod
    def from_vertex(cls, vertex: DeterministicVertex) -> HiddenVariableModel:
        d = vertex.encoding.d
        states = np.eye(d)[vertex.encoding.as_array()]
        # effects[q, c, h] = [g(h, q) == c]
        decoding = np.asarray(vertex.decoding, dtype=np.int64)
        effects = (decoding.T[:, None, :] == np.arange(d)[None, :, None]).astype(np.float64)
        return cls(d, states, effects)

    @classmethod
    def uniform(cls, task: RetrievalTask) -> HiddenVariableModel:
        d = task.d
        return cls(d, np.full((len(task.inputs), d), 1 / d), np.full((len(task.questions), d, d), 1 / d))

    def behaviour(self, task: RetrievalTask) -> EmpiricalBehaviour:
        if self.states.shape[0] != len(task.inputs) or self.effects.shape[:2] != task.shape[1:]:
            raise StrategyError(f'model does not fit task {task.name}')
        return EmpiricalBehaviour(task, np.einsum('qch,ih->iqc', self.effects, self.states))


def count_satisfied_constraints(m: HiddenVariableModel, task: RetrievalTask) -> int:
    """Number of losing answers ``c`` of each context whose probability ``v_q^c . lambda_i`` vanishes."""
    table = m.behaviour(task).table
    return int(np.count_nonzero(~task.winning & (table <= VANISHING_TOL)))


def max_satisfied_constraints(task: RetrievalTask) -> int:
    """Largest number of vanishing constraints any deterministic vertex meets."""
    losing = (~task.winning).astype(np.int64)
    score, _ = best_vertex(-losing, task)
    return int(losing.sum()) + int(score)


def torpedo_d3_hidden_variable_model() -> HiddenVariableModel:
    """
    A trit model meeting 33 of the 36 torpedo constraints.

    Hidden value ``h`` is assigned by the optimal colouring ``001102221`` and question ``q`` responds
    ``c`` on ``h = a_q c + b_q``.
    """
    d = 3
    encoding = optimal_colouring(d)
    states = np.eye(d)[encoding.as_array()]
    affine = {INF: (2, 2), 0: (1, 2), 1: (1, 2), 2: (2, 1)}
    effects = np.zeros((d + 1, d, d))
    for qi, q in enumerate(torpedo_task(d).questions):
        a, b = affine[q]
        for c in range(d):
            effects[qi, c, (a * c + b) % d] = 1
    return HiddenVariableModel(d, states, effects)


@dataclass(frozen=True, slots=True)
class BoundReport:
    """Failure rate ``epsilon`` against ``ncf * nu`` with ``nu = 1 - classical value``."""

    epsilon: float
    nu: float
    ncf: float
    slack: float

    @property
    def holds(self) -> bool:
        return self.slack >= -ASSERTION_TOL


def failure_bound_check(
    e: EmpiricalBehaviour,
    task: RetrievalTask,
    classical_value: Fraction,
    noncontextual: float | None = None,
) -> BoundReport:
    """Check that the average failure rate is at least ``ncf * (1 - classical value)``."""
    fraction = ncf(e).ncf if noncontextual is None else noncontextual
    epsilon = 1 - task_value(task, e)
    nu = float(1 - classical_value)
    report = BoundReport(epsilon=epsilon, nu=nu, ncf=fraction, slack=epsilon - fraction * nu)
    if not report.holds:
        raise ConsistencyError(
            f'failure rate {epsilon:.9f} is below ncf * nu = {fraction * nu:.9f}; the decomposition is wrong',
        )
    return report


__all__ = (
    'BoundReport',
    'DecompositionResult',
    'DeterministicVertex',
    'HiddenVariableModel',
    'VertexScore',
    'VertexSet',
    'best_vertex',
    'count_satisfied_constraints',
    'enumerate_vertices',
    'failure_bound_check',
    'max_satisfied_constraints',
    'ncf',
    'strong_contextuality_check',
    'torpedo_d3_hidden_variable_model',
)
