from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from torpedo.errors import StrategyError, DimensionError
from torpedo.qudit import INF
from torpedo.tasks import (
    QRAC_41_3_QUANTUM,
    QRAC_41_3_CLASSICAL,
    QUBIT_BASIS_ASSIGNMENT,
    ClassicalStrategy,
    EmpiricalBehaviour,
    qrac_task,
    task_value,
    torpedo_task,
    qrac_state_value,
    qrac21_strategies,
    torpedo_forbidden,
    qubit_quantum_value,
    modified_torpedo_task,
    behaviour_from_quantum,
    qubit_torpedo_strategy,
    eigenvector_qrac_states,
    phase_point_qrac_states,
    search_qubit_assignment,
    behaviour_from_classical,
    perfect_torpedo_strategy,
    maximally_mixed_qrac_states,
    restricted_qrac_equivalence,
    perfect_modified_torpedo_strategy,
    postquantum_qubit_torpedo_strategy,
)


def test_torpedo_task_forbids_one_answer_per_context() -> None:
    # Act
    task = torpedo_task(3)

    # Assert
    assert task.shape == (9, 4, 3)
    assert task.contexts == 36
    assert (task.forbidden_counts == 1).all()
    assert task.winning_set(INF, (2, 1)) == {0, 1}
    assert task.winning_set(1, (2, 1)) == {0, 2}
    assert task.is_pair_task()


def test_forbidden_answer_formula() -> None:
    assert torpedo_forbidden(5, INF, 3, 4) == 3
    assert torpedo_forbidden(5, 2, 3, 4) == 2
    assert torpedo_forbidden(5, 0, 3, 4) == 1


def test_modified_task_uses_ell_for_the_infinite_question() -> None:
    # Act
    task = modified_torpedo_task(5)

    # Assert
    assert len(task.inputs) == 5 * 5 * 2
    assert task.winning_set(INF, (1, 0, 1)) == {3, 4}
    assert task.winning_set(0, (1, 0, 1)) == {1, 2, 3, 4}
    assert not task.is_pair_task()


def test_modified_task_needs_d_at_least_five() -> None:
    with pytest.raises(DimensionError):
        modified_torpedo_task(3)


def test_qrac_task_wins_on_the_requested_dit() -> None:
    task = qrac_task(2, 3)

    assert task.questions == (1, 2)
    assert task.winning_set(1, (2, 0)) == {2}
    assert task.winning_set(2, (2, 0)) == {0}


def test_qubit_torpedo_restricts_to_the_complemented_code() -> None:
    assert restricted_qrac_equivalence()


@pytest.mark.parametrize('d', [3, 5, 7])
def test_perfect_quantum_strategy_never_loses(d: int) -> None:
    # Arrange
    task = torpedo_task(d)

    # Act
    e = behaviour_from_quantum(perfect_torpedo_strategy(d), task)

    # Assert
    assert task_value(task, e) == pytest.approx(1.0, abs=1e-12)
    assert e.forbidden_mass() <= 1e-12


@pytest.mark.parametrize('ell', [0, 1, 2])
def test_every_fiducial_index_is_perfect_for_d7(ell: int) -> None:
    task = torpedo_task(7)

    e = behaviour_from_quantum(perfect_torpedo_strategy(7, ell), task)

    assert task_value(task, e) == pytest.approx(1.0, abs=1e-12)


def test_fiducial_index_out_of_range() -> None:
    with pytest.raises(DimensionError):
        perfect_torpedo_strategy(5, 2)


def test_perfect_quantum_strategy_needs_odd_prime() -> None:
    with pytest.raises(DimensionError):
        perfect_torpedo_strategy(2)


@pytest.mark.parametrize('d', [5, 7])
def test_modified_game_keeps_quantum_value_one(d: int) -> None:
    task = modified_torpedo_task(d)

    e = behaviour_from_quantum(perfect_modified_torpedo_strategy(d), task)

    assert task_value(task, e) == pytest.approx(1.0, abs=1e-12)


def test_qubit_strategy_reaches_the_analytic_value() -> None:
    # Arrange
    task = torpedo_task(2)

    # Act
    value = task_value(task, behaviour_from_quantum(qubit_torpedo_strategy(), task))

    # Assert
    assert value == pytest.approx((1 + 1 / np.sqrt(3)) / 2, abs=1e-9)
    assert qubit_quantum_value() == pytest.approx(0.788675, abs=1e-6)


def test_qubit_assignment_is_the_unique_optimum() -> None:
    assignment, value = search_qubit_assignment()

    assert assignment == dict(QUBIT_BASIS_ASSIGNMENT)
    assert value == pytest.approx(qubit_quantum_value(), abs=1e-9)


def test_postquantum_qubit_strategy_wins_with_an_unphysical_state() -> None:
    # Arrange
    task = torpedo_task(2)
    s = postquantum_qubit_torpedo_strategy()

    # Act
    value = task_value(task, behaviour_from_quantum(s, task))

    # Assert
    assert value == pytest.approx(1.0, abs=1e-12)
    assert min(np.linalg.eigvalsh(rho).min() for rho in s.states) < 0


def test_qrac21_strategies_values() -> None:
    task = qrac_task(2, 2)
    classical, quantum = qrac21_strategies()

    assert task_value(task, behaviour_from_classical(classical, task)) == pytest.approx(0.75)
    quantum_value = task_value(task, behaviour_from_quantum(quantum, task))
    assert quantum_value == pytest.approx(np.cos(np.pi / 8) ** 2, abs=1e-9)


def test_phase_point_qrac_states_win_perfectly() -> None:
    assert qrac_state_value(3, phase_point_qrac_states(3)) == pytest.approx(1.0, abs=1e-12)


def test_qrac_state_families_are_ordered() -> None:
    mixed = qrac_state_value(3, maximally_mixed_qrac_states(3))
    eigen = qrac_state_value(3, eigenvector_qrac_states(3))

    assert mixed == pytest.approx(1 / 3)
    assert mixed < eigen < 1


def test_phase_point_qrac_operators_have_trace_one_and_purity_d() -> None:
    for A in list(phase_point_qrac_states(3).values())[:10]:
        assert np.trace(A).real == pytest.approx(1.0)
        assert np.trace(A @ A).real == pytest.approx(3.0)


def test_qrac_state_value_needs_every_input() -> None:
    states = dict(list(maximally_mixed_qrac_states(3).items())[:5])

    with pytest.raises(StrategyError, match='no state'):
        qrac_state_value(3, states)


def test_behaviour_mixing_is_linear_in_value() -> None:
    # Arrange
    task = torpedo_task(3)
    uniform = EmpiricalBehaviour.uniform(task)
    quantum = behaviour_from_quantum(perfect_torpedo_strategy(3), task)

    # Act
    mixed = uniform.mix(quantum, 0.25)

    # Assert
    expected = 0.75 * task_value(task, uniform) + 0.25 * task_value(task, quantum)
    assert task_value(task, mixed) == pytest.approx(expected)
    assert task_value(task, uniform) == pytest.approx(2 / 3)


def test_behaviour_rejects_bad_tables() -> None:
    task = torpedo_task(2)

    with pytest.raises(StrategyError, match='sum to 1'):
        EmpiricalBehaviour(task, np.full(task.shape, 0.4))
    with pytest.raises(StrategyError, match='negative'):
        EmpiricalBehaviour(task, np.tile([1.5, -0.5], (4, 3, 1)))
    with pytest.raises(StrategyError, match='shape'):
        EmpiricalBehaviour(task, np.full((4, 2, 2), 0.5))


def test_from_table_marks_negative_tables_as_quasi() -> None:
    task = torpedo_task(2)

    e = EmpiricalBehaviour.from_table(task, np.tile([1.5, -0.5], (4, 3, 1)))

    assert e.quasi
    assert e.probability((0, 0), INF, 1) == pytest.approx(-0.5)


def test_deterministic_classical_strategy_table() -> None:
    # Arrange: send x, always answer x + 1 for question inf and 0 otherwise
    task = torpedo_task(3)
    colours = [x for x, _ in task.inputs]
    decisions = [[(j + 1) % 3, 0, 0, 0] for j in range(3)]

    # Act
    e = behaviour_from_classical(ClassicalStrategy.deterministic(colours, decisions, 3), task)

    # Assert
    assert e.probability((2, 1), INF, 0) == 1.0
    assert set(np.unique(e.table)) == {0.0, 1.0}
    rows_inf = e.table[:, task.question_index(INF)]
    assert (rows_inf * task.winning[:, task.question_index(INF)]).sum() == 9


def test_classical_strategy_rejects_non_stochastic_maps() -> None:
    with pytest.raises(StrategyError, match='stochastic'):
        ClassicalStrategy(np.array([[0.5, 0.6]]), np.full((2, 1, 2), 0.5))


def test_quoted_code_constants() -> None:
    assert QRAC_41_3_CLASSICAL == Fraction(16, 27)
    assert float(QRAC_41_3_CLASSICAL) < QRAC_41_3_QUANTUM
