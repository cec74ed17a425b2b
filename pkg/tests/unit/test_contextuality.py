from __future__ import annotations

from fractions import Fraction
from itertools import pairwise

import numpy as np
import pytest

from torpedo.classical import optimal_colouring, strategy_from_encoding, exhaustive_classical_value
from torpedo.contextuality import (
    HiddenVariableModel,
    ncf,
    best_vertex,
    enumerate_vertices,
    failure_bound_check,
    max_satisfied_constraints,
    strong_contextuality_check,
    count_satisfied_constraints,
    torpedo_d3_hidden_variable_model,
)
from torpedo.errors import StrategyError, ConsistencyError, ScalabilityError
from torpedo.tasks import (
    EmpiricalBehaviour,
    task_value,
    torpedo_task,
    behaviour_from_quantum,
    qubit_torpedo_strategy,
    behaviour_from_classical,
    perfect_torpedo_strategy,
)


def _optimal_classical_d3() -> EmpiricalBehaviour:
    task = torpedo_task(3)
    return behaviour_from_classical(strategy_from_encoding(optimal_colouring(3), task), task)


def _qubit_behaviour() -> EmpiricalBehaviour:
    task = torpedo_task(2)
    return behaviour_from_quantum(qubit_torpedo_strategy(), task)


def test_perfect_quantum_behaviour_is_strongly_contextual() -> None:
    # Arrange
    task = torpedo_task(3)
    e = behaviour_from_quantum(perfect_torpedo_strategy(3), task)

    # Act
    result = ncf(e)
    strongly, witness = strong_contextuality_check(e)

    # Assert
    assert result.ncf == pytest.approx(0.0, abs=1e-9)
    assert result.cf == pytest.approx(1.0, abs=1e-9)
    assert strongly
    assert witness is None


def test_optimal_classical_behaviour_is_noncontextual() -> None:
    # Arrange
    e = _optimal_classical_d3()

    # Act
    result = ncf(e)
    strongly, witness = strong_contextuality_check(e)

    # Assert
    assert result.ncf == pytest.approx(1.0, abs=1e-9)
    assert result.residual is None
    assert not strongly
    assert witness is not None


def test_decomposition_weights_reconstruct_the_noncontextual_part() -> None:
    # Arrange
    e = EmpiricalBehaviour.uniform(torpedo_task(2)).mix(_qubit_behaviour(), 0.6)

    # Act
    result = ncf(e, 'enumerate')

    # Assert
    mixture = sum(w * v.table(e.task) for v, w in result.weights)
    assert sum(w for _, w in result.weights) == pytest.approx(result.ncf, abs=1e-9)
    assert (mixture <= e.table + 1e-9).all()
    assert result.gap <= 1e-7
    assert result.dual.shape == e.task.shape


@pytest.mark.parametrize('t', [0.0, 0.3, 0.7, 1.0])
def test_column_generation_agrees_with_enumeration(t: float) -> None:
    # Arrange
    e = EmpiricalBehaviour.uniform(torpedo_task(2)).mix(_qubit_behaviour(), t)

    # Act
    enumerated = ncf(e, 'enumerate')
    generated = ncf(e, 'column-generation', seed=5)

    # Assert
    assert generated.ncf == pytest.approx(enumerated.ncf, abs=1e-7)
    assert generated.method == 'column-generation'
    assert enumerated.method == 'enumerate'


def test_qubit_strategy_is_contextual_but_not_strongly() -> None:
    e = _qubit_behaviour()

    result = ncf(e)
    strongly, _ = strong_contextuality_check(e)

    assert 0 < result.ncf < 1
    assert not strongly


def test_uniform_behaviour_has_full_noncontextual_fraction() -> None:
    assert ncf(EmpiricalBehaviour.uniform(torpedo_task(2))).ncf == pytest.approx(1.0, abs=1e-9)


def test_quasi_behaviours_are_rejected() -> None:
    task = torpedo_task(2)
    e = EmpiricalBehaviour.from_table(task, np.tile([1.5, -0.5], (4, 3, 1)))

    with pytest.raises(StrategyError):
        ncf(e)


def test_vertex_enumeration_for_the_qubit_game() -> None:
    vertex_set = enumerate_vertices(torpedo_task(2))

    assert len(vertex_set.vertices) == len(vertex_set.tables)
    flat = vertex_set.tables.reshape(len(vertex_set.tables), -1)
    assert len(np.unique(flat, axis=0)) == len(flat)
    assert (vertex_set.tables.sum(axis=3) == 1).all()


def test_vertex_enumeration_refuses_d3() -> None:
    with pytest.raises(ScalabilityError):
        enumerate_vertices(torpedo_task(3))


def test_best_vertex_recovers_classical_value() -> None:
    task = torpedo_task(3)

    score, vertex = best_vertex(task.winning.astype(np.int64), task)

    assert score == 33
    assert task_value(task, behaviour_from_classical(vertex.to_strategy(), task)) == pytest.approx(11 / 12)


@pytest.mark.parametrize(('d', 'expected'), [(2, 9), (3, 33)])
def test_max_satisfied_constraints(d: int, expected: int) -> None:
    assert max_satisfied_constraints(torpedo_task(d)) == expected


def test_explicit_trit_model_meets_33_constraints() -> None:
    task = torpedo_task(3)

    model = torpedo_d3_hidden_variable_model()

    assert count_satisfied_constraints(model, task) == 33
    assert task_value(task, model.behaviour(task)) == pytest.approx(11 / 12)


def test_model_from_vertex_realises_its_table() -> None:
    task = torpedo_task(3)
    _, vertex = best_vertex(task.winning.astype(np.int64), task)

    model = HiddenVariableModel.from_vertex(vertex)

    assert np.array_equal(model.behaviour(task).table, vertex.table(task))


def test_uniform_model_meets_no_constraints() -> None:
    task = torpedo_task(3)

    assert count_satisfied_constraints(HiddenVariableModel.uniform(task), task) == 0


def test_hidden_variable_model_validation() -> None:
    with pytest.raises(StrategyError, match='probability vector'):
        HiddenVariableModel(2, np.array([[0.5, 0.6]]), np.full((1, 2, 2), 0.5))


def test_failure_bound_is_tight_for_the_optimal_classical_behaviour() -> None:
    # Arrange
    task = torpedo_task(3)
    e = _optimal_classical_d3()
    classical, _ = exhaustive_classical_value(task)

    # Act
    report = failure_bound_check(e, task, classical)

    # Assert
    assert report.holds
    assert report.epsilon == pytest.approx(1 / 12)
    assert report.nu == pytest.approx(1 / 12)
    assert report.slack == pytest.approx(0.0, abs=1e-9)


def test_failure_bound_detects_a_wrong_fraction() -> None:
    task = torpedo_task(3)
    e = behaviour_from_quantum(perfect_torpedo_strategy(3), task)

    with pytest.raises(ConsistencyError):
        failure_bound_check(e, task, Fraction(11, 12), noncontextual=1.0)


def test_mixing_in_the_perfect_strategy_never_raises_the_noncontextual_fraction() -> None:
    # Arrange
    task = torpedo_task(3)
    perfect = behaviour_from_quantum(perfect_torpedo_strategy(3), task)
    uniform = EmpiricalBehaviour.uniform(task)

    # Act
    fractions = [ncf(uniform.mix(perfect, t), 'column-generation').ncf for t in (0.0, 0.25, 0.5, 1.0)]

    # Assert
    assert fractions[0] == pytest.approx(1.0, abs=1e-7)
    assert fractions[-1] == pytest.approx(0.0, abs=1e-7)
    assert all(later <= earlier + 1e-7 for earlier, later in pairwise(fractions))


@pytest.mark.parametrize('seed', [0, 1, 2, 3])
def test_best_vertex_matches_the_enumerated_maximum(seed: int) -> None:
    # Arrange
    task = torpedo_task(2)
    weights = np.random.default_rng(seed).normal(size=task.shape)
    vertex_set = enumerate_vertices(task)

    # Act
    score, vertex = best_vertex(weights, task)

    # Assert
    expected = (vertex_set.tables * weights).sum(axis=(1, 2, 3)).max()
    assert score == pytest.approx(expected, abs=1e-9)
    assert (vertex.table(task) * weights).sum() == pytest.approx(score, abs=1e-9)
