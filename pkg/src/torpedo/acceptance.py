"""
The acceptance suite behind ``torpedo report``.

Each criterion returns ``(passed, detail)``; an error raised inside a check fails that check only.
"""

from __future__ import annotations

import time
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import TYPE_CHECKING, Final

import numpy as np
from natsort import natsorted

from torpedo.classical import (
    SearchConfig,
    optimal_colouring,
    random_search_perfect,
    strategy_from_encoding,
    exhaustive_classical_value,
)
from torpedo.contextuality import (
    ncf,
    failure_bound_check,
    max_satisfied_constraints,
    strong_contextuality_check,
    count_satisfied_constraints,
    torpedo_d3_hidden_variable_model,
)
from torpedo.errors import TorpedoError
from torpedo.qudit import (
    ASSERTION_TOL,
    SymplecticMatrix,
    half,
    is_unitary,
    mub_system,
    displacement,
    root_of_unity,
    symplectic_unitary,
)
from torpedo.tasks import (
    QRAC_41_3_QUANTUM,
    QRAC_41_3_CLASSICAL,
    QUBIT_BASIS_ASSIGNMENT,
    EmpiricalBehaviour,
    qrac_task,
    task_value,
    torpedo_task,
    qrac_state_value,
    qrac21_strategies,
    qubit_quantum_value,
    modified_torpedo_task,
    behaviour_from_quantum,
    qubit_torpedo_strategy,
    phase_point_qrac_states,
    search_qubit_assignment,
    perfect_torpedo_strategy,
    behaviour_from_classical,
    postquantum_qubit_torpedo_strategy,
)
from torpedo.transformational import (
    pam_to_transformational,
    reversible_gate_strategy_d3,
    verify_phase_point_complement,
    behaviour_from_transformational,
    brute_force_transformational_bound,
    count_transformational_constraints,
)
from torpedo.wigner import (
    negativity,
    wigner_function,
    phase_point_operator,
    outcome_probability,
)


if TYPE_CHECKING:
    from collections.abc import Callable

    Check = Callable[[], tuple[bool, str]]


logger = logging.getLogger(__name__)

# Ratios quoted with the published values, compared within the given tolerance
PUBLISHED_RATIOS: Final = {('torpedo', 2): (1.053, 2e-3), ('torpedo', 3): (1.091, 1e-3)}
EXACT_TOL: Final = 1e-12


@dataclass(frozen=True, slots=True)
class CheckResult:
    ident: str
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


@dataclass(frozen=True, slots=True)
class RatioRow:
    game: str
    d: int
    quantum: float
    classical: float

    @property
    def ratio(self) -> float:
        return self.quantum / self.classical


def value_ratio_table() -> list[RatioRow]:
    """Quantum over classical values for the games whose both values are known."""
    _, qrac_quantum = qrac21_strategies()
    qrac = qrac_task(2, 2)
    return [
        RatioRow('torpedo', 2, qubit_quantum_value(), 3 / 4),
        RatioRow('torpedo', 3, 1.0, 11 / 12),
        RatioRow('qrac(2,1)', 2, task_value(qrac, behaviour_from_quantum(qrac_quantum, qrac)), 3 / 4),
        RatioRow('qrac(4,1)', 3, QRAC_41_3_QUANTUM, float(QRAC_41_3_CLASSICAL)),
    ]


def _classical_values() -> tuple[bool, str]:
    v2, _ = exhaustive_classical_value(torpedo_task(2))
    v3, _ = exhaustive_classical_value(torpedo_task(3))
    return (v2, v3) == (Fraction(3, 4), Fraction(11, 12)), f'd=2: {v2}, d=3: {v3}'


def _perfect_quantum() -> tuple[bool, str]:
    parts, ok = [], True
    for d in (3, 5, 7):
        task = torpedo_task(d)
        e = behaviour_from_quantum(perfect_torpedo_strategy(d), task)
        value, forbidden = task_value(task, e), e.forbidden_mass()
        ok &= abs(value - 1) <= EXACT_TOL and forbidden <= EXACT_TOL
        parts.append(f'd={d}: value {value:.15f}, forbidden {forbidden:.1e}')
    return ok, '; '.join(parts)


def _qubit_value() -> tuple[bool, str]:
    task = torpedo_task(2)
    value = task_value(task, behaviour_from_quantum(qubit_torpedo_strategy(), task))
    assignment, best = search_qubit_assignment()
    ok = abs(value - qubit_quantum_value()) <= ASSERTION_TOL and assignment == dict(QUBIT_BASIS_ASSIGNMENT)
    return ok, f'value {value:.12f}, searched optimum {best:.12f}'


def _postquantum() -> tuple[bool, str]:
    task = torpedo_task(2)
    strategy = postquantum_qubit_torpedo_strategy()
    e = behaviour_from_quantum(strategy, task)
    value = task_value(task, e)
    lowest = min(float(np.linalg.eigvalsh(rho)[0]) for rho in strategy.states)
    qrac = qrac_state_value(3, phase_point_qrac_states(3))
    ok = abs(value - 1) <= EXACT_TOL and lowest < 0 and abs(qrac - 1) <= EXACT_TOL
    return ok, f'qubit value {value:.12f}, lowest eigenvalue {lowest:.4f}, (4,1)_3 phase-point code {qrac:.12f}'


def _wigner(seed: int) -> tuple[bool, str]:
    d = 3
    strategy = perfect_torpedo_strategy(d)
    grid = wigner_function(strategy.states[torpedo_task(d).input_index((2, 0))], d).values
    expected = np.full((d, d), 1 / 6)
    expected[2, 0] = -1 / 3
    ok = bool(np.max(np.abs(grid - expected)) <= EXACT_TOL)

    for d in (3, 5, 7):
        for x, z in product(range(d), repeat=2):
            evals = np.round(phase_point_operator(d, x, z).eigenvalues()).astype(int)
            ok &= (int((evals == 1).sum()), int((evals == -1).sum())) == ((d + 1) // 2, (d - 1) // 2)

    rng = np.random.default_rng(seed)
    worst = 0.0
    for d in (3, 5, 7):
        mubs = mub_system(d)
        for _ in range(25):
            ket = rng.normal(size=d) + 1j * rng.normal(size=d)
            ket /= np.linalg.norm(ket)
            rho = np.outer(ket, ket.conj())
            W = wigner_function(rho, d)
            for q, k in product(mubs.questions, range(d)):
                born = float(np.real(ket.conj() @ mubs.projector(q, k) @ ket))
                worst = max(worst, abs(outcome_probability(W, q, k) - born))
    ok &= worst <= ASSERTION_TOL
    return ok, f'psi(2,0) grid matches, worst marginal error {worst:.1e}'


def _qrac_baseline() -> tuple[bool, str]:
    classical, _ = exhaustive_classical_value(qrac_task(2, 2))
    rows = {(r.game, r.d): r for r in value_ratio_table()}
    quantum = rows['qrac(2,1)', 2].quantum
    ok = classical == Fraction(3, 4) and abs(quantum - np.cos(np.pi / 8) ** 2) <= ASSERTION_TOL
    for key, (published, tol) in PUBLISHED_RATIOS.items():
        ok &= abs(rows[key].ratio - published) <= tol
    ratios = ', '.join(f'{game} d={d}: {r.ratio:.4f}' for (game, d), r in rows.items())
    return ok, f'(2,1)_2 classical {classical}, quantum {quantum:.9f}; ratios {ratios}'


def _contextuality() -> tuple[bool, str]:
    task = torpedo_task(3)
    perfect = behaviour_from_quantum(perfect_torpedo_strategy(3), task)
    value, witness = exhaustive_classical_value(task)
    optimal = behaviour_from_classical(strategy_from_encoding(witness, task), task)

    perfect_ncf = ncf(perfect).ncf
    strong, _ = strong_contextuality_check(perfect)
    optimal_ncf = ncf(optimal).ncf
    model_count = count_satisfied_constraints(torpedo_d3_hidden_variable_model(), task)
    maximum = max_satisfied_constraints(task)
    bound = failure_bound_check(optimal, task, value, optimal_ncf)

    qubit_task = torpedo_task(2)
    agreement = 0.0
    for e in (
        EmpiricalBehaviour.uniform(qubit_task),
        behaviour_from_quantum(qubit_torpedo_strategy(), qubit_task),
        behaviour_from_classical(strategy_from_encoding(optimal_colouring(2), qubit_task), qubit_task),
    ):
        agreement = max(agreement, abs(ncf(e, 'enumerate').ncf - ncf(e, 'column-generation').ncf))

    ok = (
        perfect_ncf <= 1e-9
        and strong
        and abs(optimal_ncf - 1) <= 1e-9
        and model_count == maximum == 33
        and abs(bound.slack) <= 1e-9
        and agreement <= 1e-7
    )
    return ok, (
        f'ncf perfect {perfect_ncf:.2e} (strong {strong}), optimal {optimal_ncf:.9f}; '
        f'constraints {model_count}/{maximum}; bound slack {bound.slack:.1e}; solver agreement {agreement:.1e}'
    )


def _max_gap(a: EmpiricalBehaviour, b: EmpiricalBehaviour) -> float:
    return float(np.max(np.abs(a.table - b.table)))


def _transformational() -> tuple[bool, str]:
    task = torpedo_task(3)
    reversible = reversible_gate_strategy_d3()
    value = task_value(task, behaviour_from_transformational(reversible, task))
    constraints = count_transformational_constraints(reversible, task)
    bound = brute_force_transformational_bound(2)

    worst = 0.0
    for d in (2, 3):
        t = torpedo_task(d)
        classical = strategy_from_encoding(optimal_colouring(d), t)
        staged = behaviour_from_transformational(pam_to_transformational(classical, t), t)
        worst = max(worst, _max_gap(staged, behaviour_from_classical(classical, t)))
    for d in (3, 5):
        t = torpedo_task(d)
        quantum = perfect_torpedo_strategy(d)
        circuit = behaviour_from_transformational(pam_to_transformational(quantum, t), t)
        worst = max(worst, _max_gap(circuit, behaviour_from_quantum(quantum, t)))

    complement = all(verify_phase_point_complement(d).holds for d in (3, 5, 7))
    ok = abs(value - 11 / 12) <= EXACT_TOL and constraints == 33 and bound == 9
    ok = ok and worst <= ASSERTION_TOL and complement
    return ok, f'reversible {value:.6f} with {constraints}/36; d=2 bound {bound}/12; round-trip gap {worst:.1e}'


def _search(config: SearchConfig) -> tuple[bool, str]:
    found = {d: random_search_perfect(torpedo_task(d), config) for d in (5, 7)}
    modified = random_search_perfect(modified_torpedo_task(5), config)
    ok = all(r.perfect for r in found.values())
    summary = ', '.join(f'd={d}: {r.encoding if r.perfect else "none"}' for d, r in found.items())
    return ok, f'{summary}; modified d=5 perfect: {modified.perfect}'


def _properties(seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    ok = True
    for d in (3, 5, 7):
        h = half(d)
        for (x, z), (x2, z2) in product(product(range(d), repeat=2), repeat=2):
            D, D2 = displacement(d, x, z), displacement(d, x2, z2)
            ok &= is_unitary(D)
            phase = root_of_unity(d, h * (z * x2 - x * z2))
            ok &= bool(np.allclose(D @ D2, phase * displacement(d, x + x2, z + z2), atol=EXACT_TOL))
        for _ in range(5):
            F = SymplecticMatrix.random(d, rng)
            U = symplectic_unitary(F)
            ok &= is_unitary(U)
            x, z = (int(v) for v in rng.integers(0, d, size=2))
            image = U @ displacement(d, x, z) @ U.conj().T
            overlap = np.trace(displacement(d, *F.apply(x, z)).conj().T @ image)
            ok &= abs(abs(overlap) - d) <= ASSERTION_TOL
        ok &= mub_system(d).max_bias_error() <= ASSERTION_TOL

        ket = rng.normal(size=d) + 1j * rng.normal(size=d)
        ket /= np.linalg.norm(ket)
        rho = np.outer(ket, ket.conj())
        W = wigner_function(rho, d)
        ok &= abs(W.values.sum() - 1) <= ASSERTION_TOL and negativity(W) >= 1 - ASSERTION_TOL
        D = displacement(d, 1, 2)
        shifted = wigner_function(D @ rho @ D.conj().T, d)
        ok &= bool(np.allclose(shifted.values, W.translate(1, 2).values, atol=ASSERTION_TOL))

    task = torpedo_task(2)
    uniform = EmpiricalBehaviour.uniform(task)
    quantum = behaviour_from_quantum(qubit_torpedo_strategy(), task)
    mixed = uniform.mix(quantum, 0.3)
    linear = 0.7 * task_value(task, uniform) + 0.3 * task_value(task, quantum)
    ok &= abs(task_value(task, mixed) - linear) <= EXACT_TOL
    ok &= ncf(quantum).gap <= 1e-7
    return ok, 'Pauli, Clifford, MUB, Wigner and LP identities for d in {3, 5, 7}'


def _criteria(seed: int, config: SearchConfig, *, include_search: bool) -> dict[str, tuple[str, Check]]:
    criteria: dict[str, tuple[str, Check]] = {
        '1': ('Exhaustive classical values', _classical_values),
        '2': ('Perfect quantum strategies', _perfect_quantum),
        '3': ('Qubit quantum value', _qubit_value),
        '4': ('Post-quantum strategies', _postquantum),
        '5': ('Wigner function checks', lambda: _wigner(seed)),
        '6': ('Random access code baseline', _qrac_baseline),
        '7': ('Contextuality', _contextuality),
        '8': ('Transformational staging', _transformational),
        '10': ('Property suite', lambda: _properties(seed)),
    }
    if include_search:
        criteria['9'] = ('Perfect classical search', lambda: _search(config))
    return criteria


def run_acceptance(
    *,
    include_search: bool = False,
    seed: int = 42,
    config: SearchConfig | None = None,
) -> list[CheckResult]:
    """Run every criterion in natural order of its identifier."""
    config = config or SearchConfig(seed=seed)
    criteria = _criteria(seed, config, include_search=include_search)
    results = []
    for ident in natsorted(criteria):
        name, check = criteria[ident]
        started = time.monotonic()
        try:
            passed, detail = check()
        except (TorpedoError, ValueError) as exc:
            passed, detail = False, f'{type(exc).__name__}: {exc}'
        elapsed = time.monotonic() - started
        logger.info('Criterion %s (%s): %s in %.2f s', ident, name, 'pass' if passed else 'FAIL', elapsed)
        results.append(CheckResult(ident, name, bool(passed), detail, elapsed))
    return results


__all__ = (
    'PUBLISHED_RATIOS',
    'CheckResult',
    'RatioRow',
    'run_acceptance',
    'value_ratio_table',
)
