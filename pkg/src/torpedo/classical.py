"""
Classical strategies as grid colourings.

A deterministic encoding colours every input with one of ``d`` messages. For a fixed colouring the
best decoder answers, per colour and question, the value that wins for most inputs of that colour,
so the classical value is a maximum over colourings alone.
"""

from __future__ import annotations

import time
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from typing import TYPE_CHECKING, Final, NamedTuple

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt

from torpedo.errors import DimensionError, ScalabilityError, StrategyError
from torpedo.tasks import ClassicalStrategy


if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence

    from torpedo.tasks import RetrievalTask


logger = logging.getLogger(__name__)

DIGITS: Final = '0123456789abcdefghijklmnopqrstuvwxyz'
MAX_EXHAUSTIVE_DIMENSION: Final = 3
MAX_EXHAUSTIVE_CELLS: Final = 16
MIN_SEARCH_DIMENSION: Final = 5

# Published optimal colourings, row-major by x
OPTIMAL_COLOURINGS: Final = {2: '0001', 3: '001102221'}


@dataclass(frozen=True, slots=True)
class DeterministicEncoding:
    """
    One colour per input, in the task's input order (row-major ``x`` then ``z`` for the grid).

    >>> f = DeterministicEncoding.from_string('221100', 3)
    >>> str(f.canonical())
    '001122'
    >>> f.relabel([1, 2, 0]).colours
    (0, 0, 2, 2, 1, 1)
    """

    d: int
    colours: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'colours', tuple(int(c) for c in self.colours))
        if any(not 0 <= c < self.d for c in self.colours):
            raise StrategyError(f'colours must lie in [0, {self.d})')

    @classmethod
    def from_string(cls, text: str, d: int) -> DeterministicEncoding:
        try:
            return cls(d, tuple(DIGITS.index(ch) for ch in text.strip().lower()))
        except ValueError:
            raise StrategyError(f'{text!r} is not a dit string') from None

    def __str__(self) -> str:
        return ''.join(DIGITS[c] for c in self.colours)

    @property
    def cells(self) -> int:
        return len(self.colours)

    def as_array(self) -> npt.NDArray[np.int64]:
        return np.asarray(self.colours, dtype=np.int64)

    def canonical(self) -> DeterministicEncoding:
        """Relabel so colours first appear in increasing order."""
        mapping: dict[int, int] = {}
        for c in self.colours:
            mapping.setdefault(c, len(mapping))
        return DeterministicEncoding(self.d, tuple(mapping[c] for c in self.colours))

    def relabel(self, permutation: Sequence[int]) -> DeterministicEncoding:
        return DeterministicEncoding(self.d, tuple(permutation[c] for c in self.colours))


def optimal_colouring(d: int) -> DeterministicEncoding:
    """The published optimal colouring of the d x d grid."""
    try:
        return DeterministicEncoding.from_string(OPTIMAL_COLOURINGS[d], d)
    except KeyError:
        raise DimensionError(f'no published colouring for d={d}') from None


class EncodingScore(NamedTuple):
    value: Fraction
    decoding: npt.NDArray[np.int64]  # [colour, question] -> answer


def _check_encoding(f: DeterministicEncoding, task: RetrievalTask) -> None:
    if f.d != task.d or f.cells != len(task.inputs):
        raise StrategyError(f'encoding with {f.cells} cells over {f.d} colours does not fit task {task.name}')


def colour_class_counts(f: DeterministicEncoding, task: RetrievalTask) -> npt.NDArray[np.int64]:
    """``counts[j, q, c]`` = number of inputs of colour ``j`` for which ``c`` wins question ``q``."""
    _check_encoding(f, task)
    counts = np.zeros((task.d, len(task.questions), task.d), dtype=np.int64)
    np.add.at(counts, f.as_array(), task.winning.astype(np.int64))
    return counts


def encoding_value(f: DeterministicEncoding, task: RetrievalTask) -> EncodingScore:
    counts = colour_class_counts(f, task)
    numerator = int(counts.max(axis=2).sum())
    return EncodingScore(Fraction(numerator, task.contexts), counts.argmax(axis=2))


def strategy_from_encoding(f: DeterministicEncoding, task: RetrievalTask) -> ClassicalStrategy:
    """The deterministic strategy made of ``f`` and its best decoder."""
    return ClassicalStrategy.deterministic(f.colours, encoding_value(f, task).decoding, task.d)


def iter_canonical_colourings(cells: int, colours: int) -> Iterator[tuple[int, ...]]:
    """
    Colourings with at most ``colours`` colours, one per relabelling class, in lexicographic order.

    >>> list(iter_canonical_colourings(3, 2))
    [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)]
    >>> sum(1 for _ in iter_canonical_colourings(4, 2))
    8
    """
    if cells == 0:
        yield ()
        return
    prefix = [0] * cells

    def extend(position: int, used: int) -> Iterator[tuple[int, ...]]:
        if position == cells:
            yield tuple(prefix)
            return
        for c in range(min(used + 1, colours)):
            prefix[position] = c
            yield from extend(position + 1, max(used, c + 1))

    yield from extend(1, 1)


@cache
def canonical_colouring_array(cells: int, colours: int) -> npt.NDArray[np.int64]:
    array = np.array(list(iter_canonical_colourings(cells, colours)), dtype=np.int64)
    array.flags.writeable = False
    return array


def class_sums(encodings: npt.NDArray[np.int64], weights: npt.NDArray, colours: int) -> npt.NDArray:
    """``sums[e, j, q, c]``: sum of ``weights[i, q, c]`` over inputs ``i`` of colour ``j`` in encoding ``e``."""
    onehot = (encodings[:, :, None] == np.arange(colours)).astype(weights.dtype)
    return np.einsum('eij,iqc->ejqc', onehot, weights)


def exhaustive_classical_value(task: RetrievalTask) -> tuple[Fraction, DeterministicEncoding]:
    """Exact classical value by scanning every colouring up to relabelling."""
    cells = len(task.inputs)
    if task.d > MAX_EXHAUSTIVE_DIMENSION or cells > MAX_EXHAUSTIVE_CELLS:
        raise ScalabilityError(
            f'exhaustive search is limited to d <= {MAX_EXHAUSTIVE_DIMENSION}; '
            'use random_search_perfect for larger dimensions',
        )
    encodings = canonical_colouring_array(cells, task.d)
    numerators = class_sums(encodings, task.winning.astype(np.int64), task.d).max(axis=3).sum(axis=(1, 2))
    best = int(np.argmax(numerators))
    logger.debug('Scanned %d canonical colourings for %s d=%d', len(encodings), task.name, task.d)
    return Fraction(int(numerators[best]), task.contexts), DeterministicEncoding(task.d, tuple(encodings[best]))


def verify_perfect(f: DeterministicEncoding, task: RetrievalTask) -> bool:
    """True iff every colour class has a common winning answer for every question."""
    _check_encoding(f, task)
    full = (1 << task.d) - 1
    for colour in range(task.d):
        members = [i for i, c in enumerate(f.colours) if c == colour]
        for qi in range(len(task.questions)):
            common = full
            for i in members:
                common &= task.winning_mask(i, qi)
            if not common:
                return False
    return True


class SearchConfig(BaseModel):
    """Budget for the perfect-strategy search; every field must be positive."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    seed: PositiveInt = Field(default=42, lt=2**64)
    restarts: PositiveInt = 10_000
    steps: PositiveInt = 10_000
    time_limit: PositiveFloat = 600.0
    plateau_limit: PositiveInt = 100
    workers: PositiveInt = 1


@dataclass(frozen=True, slots=True)
class SearchStatistics:
    restarts: int
    steps: int
    wall_time: float
    timed_out: bool


@dataclass(frozen=True, slots=True)
class SearchResult:
    encoding: DeterministicEncoding
    value: Fraction
    perfect: bool
    objective: int
    statistics: SearchStatistics
    config: SearchConfig


class _StreamOutcome(NamedTuple):
    objective: int
    colours: tuple[int, ...]
    restarts: int
    steps: int
    timed_out: bool


def _satisfied_slots(counts: npt.NDArray[np.int64], sizes: npt.NDArray[np.int64]) -> npt.NDArray[np.int64]:
    """Per colour, the number of questions whose answer can win for the whole class."""
    return (counts.max(axis=2) == sizes[:, None]).sum(axis=1)


def _climb(
    task: RetrievalTask,
    seed: np.random.SeedSequence,
    restarts: int,
    config: SearchConfig,
) -> _StreamOutcome:
    rng = np.random.default_rng(seed)
    allowed = task.winning.astype(np.int64)
    cells, questions, d = allowed.shape
    target = d * questions
    deadline = time.monotonic() + config.time_limit

    best = _StreamOutcome(-1, (), 0, 0, timed_out=False)
    total_steps = 0
    timed_out = False
    done = 0
    for _ in range(restarts):
        done += 1
        colours = rng.integers(0, d, size=cells)
        counts = np.zeros((d, questions, d), dtype=np.int64)
        np.add.at(counts, colours, allowed)
        sizes = np.bincount(colours, minlength=d)
        slots = _satisfied_slots(counts, sizes)
        objective = int(slots.sum())
        plateau = 0

        for _ in range(config.steps):
            if objective == target:
                break
            total_steps += 1
            if total_steps % 256 == 0 and time.monotonic() > deadline:
                timed_out = True
                break

            unhappy = np.flatnonzero(slots < questions)
            cell = int(rng.choice(np.flatnonzero(np.isin(colours, unhappy))))
            old = int(colours[cell])
            row = allowed[cell]

            left = int(_satisfied_slots((counts[old] - row)[None], np.array([sizes[old] - 1]))[0])
            joined = _satisfied_slots(counts + row, sizes + 1)
            delta = (left - slots[old]) + (joined - slots)
            delta[old] = np.iinfo(np.int64).min
            best_delta = int(delta.max())

            if best_delta < 0:
                plateau += 1
            else:
                new = int(rng.choice(np.flatnonzero(delta == best_delta)))
                counts[old] -= row
                counts[new] += row
                sizes[old] -= 1
                sizes[new] += 1
                colours[cell] = new
                slots[old] = left
                slots[new] = joined[new]
                objective += best_delta
                plateau = 0 if best_delta > 0 else plateau + 1
            if plateau > config.plateau_limit:
                break

        found = tuple(int(c) for c in colours)
        if objective > best.objective or (
            objective == best.objective and _canonical_key(found, d) < _canonical_key(best.colours, d)
        ):
            best = _StreamOutcome(objective, found, 0, 0, timed_out=False)
        if best.objective == target or timed_out:
            break

    return best._replace(restarts=done, steps=total_steps, timed_out=timed_out)


def _canonical_key(colours: tuple[int, ...], d: int) -> str:
    return str(DeterministicEncoding(d, colours).canonical()) if colours else '~'


def random_search_perfect(task: RetrievalTask, config: SearchConfig | None = None) -> SearchResult:
    """
    Hill climbing with restarts towards a colouring in which every (colour, question) slot is winnable.

    Each step recolours one cell of a colour class that still has an unwinnable question, choosing
    the colour with the best change in satisfied slots; sideways moves are allowed until the plateau
    limit is exceeded, which triggers a restart.
    """
    config = config or SearchConfig()
    if task.d < MIN_SEARCH_DIMENSION:
        raise DimensionError(f'random search targets d >= {MIN_SEARCH_DIMENSION}; use the exhaustive scan')

    started = time.monotonic()
    streams = np.random.SeedSequence(config.seed).spawn(config.workers)
    shares = [len(part) for part in np.array_split(np.arange(config.restarts), config.workers)]
    jobs = [(seed, share) for seed, share in zip(streams, shares, strict=True) if share]
    if len(jobs) == 1:
        outcomes = [_climb(task, jobs[0][0], jobs[0][1], config)]
    else:
        with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
            futures = [pool.submit(_climb, task, seed, share, config) for seed, share in jobs]
            outcomes = [future.result() for future in futures]

    winner = min(outcomes, key=lambda o: (-o.objective, _canonical_key(o.colours, task.d)))
    encoding = DeterministicEncoding(task.d, winner.colours).canonical()
    statistics = SearchStatistics(
        restarts=sum(o.restarts for o in outcomes),
        steps=sum(o.steps for o in outcomes),
        wall_time=time.monotonic() - started,
        timed_out=any(o.timed_out for o in outcomes),
    )
    perfect = verify_perfect(encoding, task)
    logger.info(
        'Search on %s d=%d: objective %d/%d after %d restarts',
        task.name,
        task.d,
        winner.objective,
        task.d * len(task.questions),
        statistics.restarts,
    )
    return SearchResult(
        encoding=encoding,
        value=encoding_value(encoding, task).value,
        perfect=perfect,
        objective=winner.objective,
        statistics=statistics,
        config=config,
    )


__all__ = (
    'MAX_EXHAUSTIVE_CELLS',
    'MAX_EXHAUSTIVE_DIMENSION',
    'OPTIMAL_COLOURINGS',
    'DeterministicEncoding',
    'EncodingScore',
    'SearchConfig',
    'SearchResult',
    'SearchStatistics',
    'canonical_colouring_array',
    'class_sums',
    'colour_class_counts',
    'encoding_value',
    'exhaustive_classical_value',
    'iter_canonical_colourings',
    'optimal_colouring',
    'random_search_perfect',
    'strategy_from_encoding',
    'verify_perfect',
)
