"""
Versioned interchange documents.

Files read by the CLI are validated with ``strict=True``; everything written is produced from the same
models so that ``schemas`` can publish their JSON schemas.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Self, Literal

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field

from torpedo.classical import SearchConfig
from torpedo.errors import StrategyError
from torpedo.json_utils import save_as_json, fraction_to_str
from torpedo.qudit import Question, BasisMeasurement
from torpedo.tasks import (
    QuantumStrategy,
    HermitianStrategy,
    EmpiricalBehaviour,
    qrac_task,
    torpedo_task,
    modified_torpedo_task,
)
from torpedo.transformational import CircuitStrategy, StochasticMatrix, TransformationStrategy


if TYPE_CHECKING:
    from pathlib import Path

    from torpedo.classical import SearchResult
    from torpedo.contextuality import DecompositionResult
    from torpedo.tasks import RetrievalTask
    from torpedo.wigner import WignerGrid


logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
TaskName = Literal['torpedo', 'modified-torpedo', 'qrac']


class _Document(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)


def _task_fields(task: RetrievalTask) -> dict[str, str | int]:
    return {'name': task.name, 'd': task.d, 'n': task.n if task.name == 'qrac' else 2}


def _interleave(values: npt.ArrayLike) -> list:
    """Complex arrays as real ones whose last axis alternates real and imaginary parts."""
    a = np.asarray(values, dtype=np.complex128)
    return np.stack([a.real, a.imag], axis=-1).reshape(*a.shape[:-1], -1).tolist()


def _deinterleave(values: list) -> npt.NDArray[np.complex128]:
    a = np.asarray(values, dtype=np.float64)
    if a.ndim == 0 or a.shape[-1] % 2:
        raise StrategyError('interleaved complex data needs an even number of entries per row')
    return a[..., 0::2] + 1j * a[..., 1::2]


class TaskModel(_Document):
    """
    A named retrieval task.

    ``winning[i][q]`` is the bitmask of winning answers for input ``i`` and question ``q`` in task
    order; nested task references leave it out.
    """

    name: TaskName
    d: int = Field(ge=2)
    n: int = Field(default=2, ge=2)
    winning: list[list[int]] | None = None

    def build(self) -> RetrievalTask:
        match self.name:
            case 'torpedo':
                return torpedo_task(self.d)
            case 'modified-torpedo':
                return modified_torpedo_task(self.d)
            case 'qrac':
                return qrac_task(self.n, self.d)

    @classmethod
    def describe(cls, task: RetrievalTask) -> Self:
        return cls.model_validate(_task_fields(task))

    @classmethod
    def from_task(cls, task: RetrievalTask) -> Self:
        questions = range(len(task.questions))
        masks = [[task.winning_mask(i, qi) for qi in questions] for i in range(len(task.inputs))]
        return cls.model_validate({**_task_fields(task), 'winning': masks})

    def to_task(self) -> RetrievalTask:
        """Rebuild the task, checking the stored bitmasks against the named game."""
        task = self.build()
        if self.winning is None:
            return task
        masks = np.array(self.winning, dtype=np.int64)
        if masks.shape != task.shape[:2]:
            raise StrategyError(f'winning has shape {masks.shape}, task expects {task.shape[:2]}')
        if masks.min() < 0 or masks.max() >= 1 << task.d:
            raise StrategyError(f'winning bitmasks must lie in [0, {(1 << task.d) - 1}]')
        winning = ((masks[:, :, None] >> np.arange(task.d)) & 1) == 1
        if not np.array_equal(winning, task.winning):
            raise StrategyError(f'winning bitmasks do not describe task {task.name} d={task.d}')
        return task


class TaskDocument(TaskModel):
    """Stand-alone task file; written with its winning bitmasks."""

    schema_version: Literal[1] = SCHEMA_VERSION


class BehaviourModel(_Document):
    """One outcome distribution per context, indexed ``table[input][question][answer]``."""

    schema_version: Literal[1] = SCHEMA_VERSION
    task: TaskModel
    inputs: list[list[int]]
    questions: list[Question]
    table: list[list[list[float]]]
    quasi: bool = False
    source: str | None = None

    @classmethod
    def from_behaviour(cls, e: EmpiricalBehaviour, source: str | None = None) -> BehaviourModel:
        return cls(
            task=TaskModel.describe(e.task),
            inputs=[list(i) for i in e.task.inputs],
            questions=list(e.task.questions),
            table=e.table.tolist(),
            quasi=e.quasi,
            source=source,
        )

    def to_behaviour(self) -> EmpiricalBehaviour:
        task = self.task.to_task()
        if [tuple(i) for i in self.inputs] != list(task.inputs):
            raise StrategyError(f'inputs do not follow the order of task {task.name} d={task.d}')
        if tuple(self.questions) != task.questions:
            raise StrategyError(f'questions must be {list(task.questions)}')
        table = np.array(self.table, dtype=np.float64)
        if table.shape != task.shape:
            raise StrategyError(f'table has shape {table.shape}, task expects {task.shape}')
        return EmpiricalBehaviour(task, table, quasi=self.quasi)


class VertexWeightModel(_Document):
    encoding: str
    decoding: str
    weight: float


class DecompositionChecks(_Document):
    primal_dual_gap: float
    feasibility_residual: float


class DecompositionModel(_Document):
    schema_version: Literal[1] = SCHEMA_VERSION
    ncf: float
    cf: float
    method: str
    iterations: int
    strongly_contextual: bool
    weights: list[VertexWeightModel]
    dual: list[list[list[float]]]
    residual: list[list[list[float]]] | None
    checks: DecompositionChecks

    @classmethod
    def from_result(cls, result: DecompositionResult, *, strongly_contextual: bool) -> DecompositionModel:
        return cls(
            ncf=result.ncf,
            cf=result.cf,
            method=result.method,
            iterations=result.iterations,
            strongly_contextual=strongly_contextual,
            weights=[
                VertexWeightModel(encoding=str(v.encoding), decoding=v.decoding_string(), weight=w)
                for v, w in result.weights
            ],
            dual=result.dual.tolist(),
            residual=None if result.residual is None else result.residual.tolist(),
            checks=DecompositionChecks(primal_dual_gap=result.gap, feasibility_residual=result.feasibility),
        )


class SearchStatisticsModel(_Document):
    restarts: int
    steps: int
    timed_out: bool


class SearchResultModel(_Document):
    """Search outcome with its configuration echoed; wall time is reported on the console only."""

    schema_version: Literal[1] = SCHEMA_VERSION
    task: TaskModel
    encoding: str
    value: str
    perfect: bool
    objective: int
    target: int
    statistics: SearchStatisticsModel
    config: SearchConfig

    @classmethod
    def from_result(cls, task: RetrievalTask, result: SearchResult) -> SearchResultModel:
        return cls(
            task=TaskModel.describe(task),
            encoding=str(result.encoding),
            value=fraction_to_str(result.value),
            perfect=result.perfect,
            objective=result.objective,
            target=task.d * len(task.questions),
            statistics=SearchStatisticsModel(
                restarts=result.statistics.restarts,
                steps=result.statistics.steps,
                timed_out=result.statistics.timed_out,
            ),
            config=result.config,
        )


class WignerGridModel(_Document):
    schema_version: Literal[1] = SCHEMA_VERSION
    d: int
    state: str
    values: list[list[float]]
    negativity: float

    @classmethod
    def from_grid(cls, grid: WignerGrid, state: str, negativity: float) -> WignerGridModel:
        return cls(d=grid.d, state=state, values=grid.to_rows(), negativity=negativity)


Matrix = list[list[float]]


def _stochastic(maps: list[Matrix]) -> tuple[StochasticMatrix, ...]:
    return tuple(StochasticMatrix(np.array(m, dtype=np.float64)) for m in maps)


class TransformationStrategyModel(_Document):
    """Classical staging; stochastic matrices are stored row-major, ``maps[k][row][column]``."""

    schema_version: Literal[1] = SCHEMA_VERSION
    d: int = Field(ge=2)
    initial: int = Field(default=0, ge=0)
    question_maps: list[Matrix]
    x_maps: list[Matrix] = Field(default_factory=list)
    z_maps: list[Matrix] = Field(default_factory=list)
    input_maps: list[Matrix] = Field(default_factory=list)

    @classmethod
    def from_strategy(cls, s: TransformationStrategy) -> TransformationStrategyModel:
        return cls(
            d=s.d,
            initial=s.initial,
            question_maps=[m.matrix.tolist() for m in s.question_maps],
            x_maps=[m.matrix.tolist() for m in s.x_maps],
            z_maps=[m.matrix.tolist() for m in s.z_maps],
            input_maps=[m.matrix.tolist() for m in s.input_maps],
        )

    def to_strategy(self) -> TransformationStrategy:
        if self.initial >= self.d:
            raise StrategyError(f'initial value {self.initial} is not in Z_{self.d}')
        return TransformationStrategy(
            self.d,
            _stochastic(self.question_maps),
            x_maps=_stochastic(self.x_maps),
            z_maps=_stochastic(self.z_maps),
            input_maps=_stochastic(self.input_maps),
            initial=self.initial,
        )


class CircuitStrategyModel(_Document):
    """Quantum staging; kets and gate rows interleave real and imaginary parts, ``[re, im, re, im, ...]``."""

    schema_version: Literal[1] = SCHEMA_VERSION
    initial: list[float]
    question_gates: list[Matrix]
    x_gates: list[Matrix] = Field(default_factory=list)
    z_gates: list[Matrix] = Field(default_factory=list)
    input_gates: list[Matrix] = Field(default_factory=list)

    @classmethod
    def from_strategy(cls, s: CircuitStrategy) -> CircuitStrategyModel:
        return cls(
            initial=_interleave(s.initial),
            question_gates=[_interleave(u) for u in s.question_gates],
            x_gates=[_interleave(u) for u in s.x_gates],
            z_gates=[_interleave(u) for u in s.z_gates],
            input_gates=[_interleave(u) for u in s.input_gates],
        )

    def to_strategy(self) -> CircuitStrategy:
        return CircuitStrategy(
            _deinterleave(self.initial),
            tuple(_deinterleave(u) for u in self.question_gates),
            x_gates=tuple(_deinterleave(u) for u in self.x_gates),
            z_gates=tuple(_deinterleave(u) for u in self.z_gates),
            input_gates=tuple(_deinterleave(u) for u in self.input_gates),
        )


class QuantumStrategyModel(_Document):
    """
    Prepare-and-measure strategy with interleaved complex rows.

    ``bases[q]`` holds the measurement unitary of ``questions[q]`` (outcome ``k`` is column ``k``).
    ``hermitian`` marks operators that need not be positive.
    """

    schema_version: Literal[1] = SCHEMA_VERSION
    questions: list[Question]
    states: list[Matrix]
    bases: list[Matrix]
    fiducial: list[float] | None = None
    hermitian: bool = False

    @classmethod
    def from_strategy(cls, s: HermitianStrategy) -> QuantumStrategyModel:
        return cls(
            questions=list(s.measurement.questions),
            states=[_interleave(rho) for rho in s.states],
            bases=[_interleave(u) for u in s.measurement.unitaries],
            fiducial=None if s.fiducial is None else _interleave(s.fiducial),
            hermitian=not isinstance(s, QuantumStrategy),
        )

    def to_strategy(self) -> HermitianStrategy:
        measurement = BasisMeasurement(tuple(self.questions), tuple(_deinterleave(u) for u in self.bases))
        kind = HermitianStrategy if self.hermitian else QuantumStrategy
        fiducial = None if self.fiducial is None else _deinterleave(self.fiducial)
        return kind(_deinterleave(self.states), measurement, fiducial)


PUBLISHED_MODELS: dict[str, type[BaseModel]] = {
    'behaviour': BehaviourModel,
    'circuit-strategy': CircuitStrategyModel,
    'decomposition': DecompositionModel,
    'quantum-strategy': QuantumStrategyModel,
    'search-result': SearchResultModel,
    'task': TaskDocument,
    'transformation-strategy': TransformationStrategyModel,
    'wigner-grid': WignerGridModel,
}


def load_behaviour(path: Path) -> EmpiricalBehaviour:
    """Read and validate a behaviour file; pydantic's ValidationError propagates on schema problems."""
    data = path.read_text(encoding='utf-8')
    model = BehaviourModel.model_validate_json(data, strict=True)
    logger.debug('Loaded %s behaviour for d=%d from %s', model.task.name, model.task.d, path)
    return model.to_behaviour()


def write_schemas(folder: Path) -> list[Path]:
    written = []
    for name, model in PUBLISHED_MODELS.items():
        path = folder / f'{name}.v{SCHEMA_VERSION}.schema.json'
        save_as_json(path, model.model_json_schema())
        written.append(path)
    return written


__all__ = (
    'PUBLISHED_MODELS',
    'SCHEMA_VERSION',
    'BehaviourModel',
    'CircuitStrategyModel',
    'DecompositionChecks',
    'DecompositionModel',
    'QuantumStrategyModel',
    'SearchResultModel',
    'SearchStatisticsModel',
    'TaskDocument',
    'TaskModel',
    'TransformationStrategyModel',
    'VertexWeightModel',
    'WignerGridModel',
    'load_behaviour',
    'write_schemas',
)
