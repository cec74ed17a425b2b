from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from torpedo.classical import (
    SearchConfig,
    DeterministicEncoding,
    verify_perfect,
    encoding_value,
    optimal_colouring,
    colour_class_counts,
    random_search_perfect,
    strategy_from_encoding,
    iter_canonical_colourings,
    canonical_colouring_array,
    exhaustive_classical_value,
)
from torpedo.contextuality import torpedo_d3_hidden_variable_model
from torpedo.errors import StrategyError, DimensionError, ScalabilityError
from torpedo.tasks import qrac_task, task_value, torpedo_task, behaviour_from_classical


@pytest.mark.parametrize(
    ('d', 'expected'),
    [
        (2, Fraction(3, 4)),
        (3, Fraction(11, 12)),
    ],
)
def test_exhaustive_classical_value_of_torpedo(d: int, expected: Fraction) -> None:
    # Arrange
    task = torpedo_task(d)

    # Act
    value, witness = exhaustive_classical_value(task)

    # Assert
    assert value == expected
    assert encoding_value(witness, task).value == expected
    assert witness == witness.canonical()


def test_exhaustive_classical_value_of_the_qubit_code() -> None:
    value, _ = exhaustive_classical_value(qrac_task(2, 2))

    assert value == Fraction(3, 4)


def test_exhaustive_scan_refuses_large_dimensions() -> None:
    with pytest.raises(ScalabilityError):
        exhaustive_classical_value(torpedo_task(5))


@pytest.mark.parametrize('d', [2, 3])
def test_published_colourings_are_optimal(d: int) -> None:
    task = torpedo_task(d)

    score = encoding_value(optimal_colouring(d), task)

    assert score.value == exhaustive_classical_value(task)[0]


def test_published_colouring_missing_for_other_dimensions() -> None:
    with pytest.raises(DimensionError):
        optimal_colouring(5)


def test_optimal_d3_colouring_loses_once_on_three_questions() -> None:
    # Arrange
    task = torpedo_task(3)

    # Act
    counts = colour_class_counts(optimal_colouring(3), task)
    per_question = [Fraction(int(n), 9) for n in counts.max(axis=2).sum(axis=0)]

    # Assert
    assert task.questions == ('inf', 0, 1, 2)
    assert per_question == [Fraction(8, 9), Fraction(8, 9), Fraction(1), Fraction(8, 9)]


def test_optimal_d3_colouring_drives_the_trit_model() -> None:
    model = torpedo_d3_hidden_variable_model()

    colours = tuple(int(h) for h in model.states.argmax(axis=1))

    assert DeterministicEncoding(3, colours) == optimal_colouring(3)
    assert str(optimal_colouring(3)) == '001102221'


@pytest.mark.parametrize('seed', [0, 1, 2, 3, 4])
@pytest.mark.parametrize('d', [3, 5])
def test_encoding_value_ignores_colour_labels(d: int, seed: int) -> None:
    # Arrange
    task = torpedo_task(d)
    rng = np.random.default_rng(seed)
    f = DeterministicEncoding(d, tuple(int(c) for c in rng.integers(0, d, size=d * d)))
    permutation = [int(c) for c in rng.permutation(d)]

    # Act
    relabelled = f.relabel(permutation)

    # Assert
    assert encoding_value(relabelled, task).value == encoding_value(f, task).value
    assert relabelled.canonical() == f.canonical()


def test_constant_colouring_scores_two_thirds() -> None:
    task = torpedo_task(3)

    score = encoding_value(DeterministicEncoding(3, (0,) * 9), task)

    assert score.value == Fraction(2, 3)


def test_strategy_from_encoding_reproduces_its_value() -> None:
    # Arrange
    task = torpedo_task(3)
    f = optimal_colouring(3)

    # Act
    e = behaviour_from_classical(strategy_from_encoding(f, task), task)

    # Assert
    assert task_value(task, e) == pytest.approx(11 / 12)


def test_colour_class_counts_shape_and_totals() -> None:
    task = torpedo_task(3)
    f = optimal_colouring(3)

    counts = colour_class_counts(f, task)

    assert counts.shape == (3, 4, 3)
    assert counts.sum() == 9 * 4 * 2


@pytest.mark.parametrize(
    ('cells', 'colours', 'expected'),
    [
        (4, 2, 8),
        (9, 3, 3281),
        (3, 3, 5),
    ],
)
def test_canonical_colouring_counts(cells: int, colours: int, expected: int) -> None:
    assert sum(1 for _ in iter_canonical_colourings(cells, colours)) == expected
    assert canonical_colouring_array(cells, colours).shape == (expected, cells)


def test_encoding_string_helpers() -> None:
    f = DeterministicEncoding.from_string('0a1', 11)

    assert f.colours == (0, 10, 1)
    assert str(f) == '0a1'
    assert str(f.canonical()) == '012'


def test_encoding_rejects_out_of_range_colours() -> None:
    with pytest.raises(StrategyError):
        DeterministicEncoding.from_string('0003', 3)
    with pytest.raises(StrategyError):
        DeterministicEncoding.from_string('00-1', 3)


def test_encoding_must_fit_task() -> None:
    with pytest.raises(StrategyError, match='does not fit'):
        encoding_value(DeterministicEncoding(3, (0, 1, 2)), torpedo_task(3))


def test_verify_perfect_rejects_imperfect_colouring() -> None:
    assert not verify_perfect(optimal_colouring(3), torpedo_task(3))


def test_search_config_rejects_non_positive_budgets() -> None:
    with pytest.raises(ValidationError):
        SearchConfig(restarts=0)
    with pytest.raises(ValidationError):
        SearchConfig(time_limit=-1.0)
    with pytest.raises(ValidationError):
        SearchConfig.model_validate({'restarts': 10, 'budget': 3})


def test_search_refuses_small_dimensions() -> None:
    with pytest.raises(DimensionError):
        random_search_perfect(torpedo_task(3), SearchConfig(restarts=1, steps=1))


def test_search_is_reproducible_for_a_seed() -> None:
    # Arrange
    task = torpedo_task(5)
    config = SearchConfig(seed=7, restarts=3, steps=200)

    # Act
    first = random_search_perfect(task, config)
    second = random_search_perfect(task, config)

    # Assert
    assert first.encoding == second.encoding
    assert first.objective == second.objective
    assert first.statistics.restarts == second.statistics.restarts


def test_search_result_is_consistent() -> None:
    task = torpedo_task(5)

    result = random_search_perfect(task, SearchConfig(seed=11, restarts=4, steps=300))

    assert result.encoding == result.encoding.canonical()
    assert 0 <= result.objective <= 5 * 6
    assert result.perfect == verify_perfect(result.encoding, task)
    assert result.perfect == (result.value == 1)
    assert result.value == encoding_value(result.encoding, task).value
    assert 1 <= result.statistics.restarts <= 4


def test_search_splits_restarts_over_workers() -> None:
    task = torpedo_task(5)
    config = SearchConfig(seed=3, restarts=4, steps=50, workers=2)

    result = random_search_perfect(task, config)

    assert result.config.workers == 2
    assert 2 <= result.statistics.restarts <= 4


def test_search_finds_a_perfect_encoding_for_d5() -> None:
    # Arrange
    task = torpedo_task(5)
    config = SearchConfig(seed=42, restarts=2_000, steps=5_000)

    # Act
    result = random_search_perfect(task, config)

    # Assert
    assert result.perfect
    assert verify_perfect(result.encoding, task)
    assert result.value == 1
    assert result.objective == 5 * 6
