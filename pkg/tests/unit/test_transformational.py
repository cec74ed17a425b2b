from __future__ import annotations

import numpy as np
import pytest

from torpedo.classical import optimal_colouring, strategy_from_encoding
from torpedo.errors import StrategyError, DimensionError
from torpedo.tasks import (
    task_value,
    torpedo_task,
    modified_torpedo_task,
    behaviour_from_quantum,
    qubit_torpedo_strategy,
    behaviour_from_classical,
    perfect_torpedo_strategy,
    postquantum_qubit_torpedo_strategy,
)
from torpedo.transformational import (
    StochasticMatrix,
    TransformationStrategy,
    identity_strategy,
    pam_to_transformational,
    circuit_torpedo_strategy,
    minus_projector_identity,
    reversible_gate_strategy_d3,
    verify_phase_point_complement,
    behaviour_from_transformational,
    brute_force_transformational_bound,
    count_transformational_constraints,
)


def test_reversible_gates_reach_the_classical_value() -> None:
    # Arrange
    task = torpedo_task(3)
    s = reversible_gate_strategy_d3()

    # Act
    e = behaviour_from_transformational(s, task)

    # Assert
    assert task_value(task, e) == pytest.approx(11 / 12)
    assert count_transformational_constraints(s, task) == 33
    assert all(m.is_permutation() for m in s.maps())


def test_identity_strategy_always_answers_zero() -> None:
    task = torpedo_task(2)

    e = behaviour_from_transformational(identity_strategy(2, 3), task)

    assert (e.table[:, :, 0] == 1).all()
    assert count_transformational_constraints(identity_strategy(2, 3), task) == 6


@pytest.mark.parametrize('global_preparation', [False, True])
def test_brute_force_bound_for_qubits(global_preparation: bool) -> None:
    assert brute_force_transformational_bound(2, global_preparation=global_preparation) == 9


def test_brute_force_refuses_larger_dimensions() -> None:
    with pytest.raises(DimensionError):
        brute_force_transformational_bound(3)


@pytest.mark.parametrize('d', [2, 3, 5])
def test_circuit_strategy_matches_prepare_and_measure(d: int) -> None:
    # Arrange
    task = torpedo_task(d)
    pam = qubit_torpedo_strategy() if d == 2 else perfect_torpedo_strategy(d)

    # Act
    staged = behaviour_from_transformational(circuit_torpedo_strategy(d), task)

    # Assert
    assert np.allclose(staged.table, behaviour_from_quantum(pam, task).table, atol=1e-9)


def test_classical_strategy_restages_with_the_same_behaviour() -> None:
    # Arrange
    task = torpedo_task(3)
    s = strategy_from_encoding(optimal_colouring(3), task)

    # Act
    staged = pam_to_transformational(s, task)

    # Assert
    assert isinstance(staged, TransformationStrategy)
    assert staged.factorized
    restaged = behaviour_from_transformational(staged, task).table
    assert np.allclose(restaged, behaviour_from_classical(s, task).table)


@pytest.mark.parametrize('d', [3, 5])
def test_quantum_strategy_restages_with_the_same_behaviour(d: int) -> None:
    task = torpedo_task(d)
    s = perfect_torpedo_strategy(d)

    staged = pam_to_transformational(s, task)

    restaged = behaviour_from_transformational(staged, task).table
    assert np.allclose(restaged, behaviour_from_quantum(s, task).table, atol=1e-9)
    assert count_transformational_constraints(staged, task) == d * d * (d + 1)


def test_mixed_message_states_have_no_circuit_form() -> None:
    with pytest.raises(StrategyError, match='pure'):
        pam_to_transformational(postquantum_qubit_torpedo_strategy(), torpedo_task(2))


def test_tasks_with_extra_inputs_are_rejected() -> None:
    task = modified_torpedo_task(5)

    with pytest.raises(StrategyError, match='Z_d x Z_d'):
        behaviour_from_transformational(identity_strategy(5, 6), task)


@pytest.mark.parametrize('d', [3, 5, 7])
def test_complement_of_phase_point_avoids_the_forbidden_answers(d: int) -> None:
    # Act
    report = verify_phase_point_complement(d)

    # Assert
    assert report.holds
    assert report.checked == d * d * (d + 1) * d
    assert minus_projector_identity(d) < 1e-9


def test_stochastic_matrix_validation() -> None:
    with pytest.raises(StrategyError, match='square'):
        StochasticMatrix(np.ones((2, 3)) / 2)
    with pytest.raises(StrategyError, match='probability distribution'):
        StochasticMatrix(np.array([[0.5, 0.5], [0.6, 0.5]]))


def test_stochastic_matrices_compose_right_to_left() -> None:
    # Arrange
    first = StochasticMatrix.constant(3, 2)
    then = StochasticMatrix.shift(3, 1)

    # Act
    composed = then @ first

    # Assert
    assert composed.apply([1.0, 0.0, 0.0]).tolist() == [1.0, 0.0, 0.0]
    assert not first.is_permutation()


def test_strategy_needs_one_kind_of_preparation() -> None:
    ident = StochasticMatrix.identity(2)

    with pytest.raises(StrategyError, match='either'):
        TransformationStrategy(2, (ident,) * 3)
    with pytest.raises(StrategyError, match='one entry per value'):
        TransformationStrategy(2, (ident,) * 3, x_maps=(ident,), z_maps=(ident,))
