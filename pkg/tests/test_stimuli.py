import math

import pytest

from app.circuit import Circuit, Gate, ProgramBatch, simulate
from app.exceptions import InvalidArgumentError
from app.injection import ErrorSpec, inject, splice_batch, worst_case_error
from app.rng import RngLanes, derive_stream
from app.stimuli import (
    ConfidenceSpec,
    approx_best_case_trials,
    best_case_expected_trials,
    check_equivalence,
    check_equivalence_batch,
    detection_probability_lower_bound,
    failure_probability_bounds,
    geometric_cdf,
    required_inputs,
    worst_case_expected_trials,
)
from tests.helpers import geometric_band, make_circuit


def test_identical_circuits_exhaust():
    circuit = make_circuit(10, 50)
    outcome = check_equivalence(circuit, circuit, derive_stream(1, 2), max_trials=300)
    assert outcome.status == "exhausted"
    assert outcome.trials_used == 300
    assert outcome.witness is None
    assert not outcome.detected


def test_not_error_detected_on_first_trial():
    for seed in range(50):
        circuit = make_circuit(12, 100, seed=seed)
        position = derive_stream(seed, 1).below(101)
        corrupted, _ = inject(circuit, [(position, ErrorSpec(1, seed % 12))], derive_stream(seed, 1))
        outcome = check_equivalence(circuit, corrupted, derive_stream(seed, 2))
        assert outcome.status == "detected"
        assert outcome.trials_used == 1


def test_witness_really_distinguishes():
    circuit = make_circuit(10, 60, seed=3)
    corrupted, _ = inject(circuit, [(30, ErrorSpec(3, 2))], derive_stream(3, 1))
    outcome = check_equivalence(circuit, corrupted, derive_stream(3, 2))
    assert outcome.detected
    assert simulate(circuit, outcome.witness) != simulate(corrupted, outcome.witness)
    assert 1 <= outcome.trials_used <= outcome.max_trials


def test_default_max_trials_is_capped_by_space():
    circuit = Circuit.identity(4)
    assert check_equivalence(circuit, circuit, derive_stream(0, 0)).trials_used == 16


def test_check_equivalence_errors():
    with pytest.raises(InvalidArgumentError):
        check_equivalence(Circuit.identity(3), Circuit.identity(4), derive_stream(0, 0))
    with pytest.raises(InvalidArgumentError):
        check_equivalence(Circuit.identity(3), Circuit.identity(3), derive_stream(0, 0), max_trials=0)


def test_batch_check_matches_one_by_one():
    n, g, width = 10, 60, 40
    circuits = [make_circuit(n, g, seed=s) for s in range(width)]
    positions, errors, expected = [], [], []
    for lane, circuit in enumerate(circuits):
        k = lane % 11
        specs = [(lane % (g + 1), ErrorSpec(k, lane % (n - k + 1)))] if k else []
        corrupted, record = inject(circuit, specs, derive_stream(lane, 1))
        positions.append(record.positions)
        errors.append(record.errors)
        expected.append(check_equivalence(circuit, corrupted, derive_stream(lane, 2), max_trials=700))
    pairs = splice_batch(ProgramBatch.of(circuits), positions, errors)
    stimuli = RngLanes([derive_stream(lane, 2) for lane in range(width)])
    assert check_equivalence_batch(pairs, stimuli, max_trials=700) == expected
    assert {outcome.status for outcome in expected} == {"detected", "exhausted"}


def test_batch_check_default_budget_and_validation():
    pairs = splice_batch(ProgramBatch.empty(4, 2), [(), (0,)], [(), (worst_case_error(4, 4, 0),)])
    outcomes = check_equivalence_batch(pairs, RngLanes.derive(3, [2, 5]))
    assert outcomes[0] == check_equivalence(Circuit.identity(4), Circuit.identity(4), derive_stream(3, 2))
    assert outcomes[0].trials_used == 16
    assert outcomes[1] == check_equivalence(
        Circuit.identity(4), Circuit(4, (Gate.mct([0, 1, 2], 3),)), derive_stream(3, 5)
    )
    with pytest.raises(InvalidArgumentError):
        check_equivalence_batch(pairs, RngLanes.derive(3, [2]))
    with pytest.raises(InvalidArgumentError):
        check_equivalence_batch(pairs, RngLanes.derive(3, [2, 5]), max_trials=0)


def test_outcome_document():
    error = Circuit(3, (Gate(0),))
    outcome = check_equivalence(Circuit.identity(3), error, derive_stream(0, 0))
    doc = outcome.to_document()
    assert doc.status == "detected"
    assert doc.witness == outcome.witness.to_binary()
    assert len(doc.witness) == 3


def test_worst_case_mean_trials_is_geometric():
    k, repetitions = 3, 2000
    error = worst_case_error(8, k, 2)
    golden = Circuit.identity(8)
    trials = [
        check_equivalence(golden, error, derive_stream(21, r)).trials_used
        for r in range(repetitions)
    ]
    mean = sum(trials) / repetitions
    assert abs(mean - 2 ** (k - 1)) <= geometric_band(k, repetitions, 4)


def test_required_inputs_examples():
    assert required_inputs(ConfidenceSpec(3, 0.05)) == 12
    assert required_inputs(ConfidenceSpec(1, 0.5)) == 1
    assert required_inputs(ConfidenceSpec(5, 0.01)) == 74


def test_required_inputs_meets_exp_bound():
    for k in range(1, 8):
        for delta in (0.2, 0.05, 1e-6):
            N = required_inputs(ConfidenceSpec(k, delta))
            assert failure_probability_bounds(k, N).exp_bound <= delta * (1 + 1e-12)


@pytest.mark.parametrize("k, delta", [(0, 0.1), (2, 0.0), (2, 1.0), (2, -0.5)])
def test_confidence_spec_validation(k, delta):
    with pytest.raises(InvalidArgumentError):
        ConfidenceSpec(k, delta)


def test_failure_probability_examples():
    assert failure_probability_bounds(1, 5).exact_worst_case == 0
    assert failure_probability_bounds(2, 1).exact_worst_case == pytest.approx(0.5)
    assert failure_probability_bounds(3, 0) == (1.0, 1.0)
    assert failure_probability_bounds(5, 16).exact_worst_case == pytest.approx(0.35607, abs=1e-5)


def test_failure_probability_monotone():
    for k in range(1, 65):
        previous = 1.0
        for N in [*range(0, 60), 2**20, 2**40, 2**62]:
            exact, bound = failure_probability_bounds(k, N)
            assert exact <= bound
            assert exact <= previous
            assert exact <= failure_probability_bounds(k + 1, N).exact_worst_case
            previous = exact


def test_best_case_expected_trials():
    assert best_case_expected_trials(4, 1) == pytest.approx(8)
    assert best_case_expected_trials(1, 7) == 1
    assert best_case_expected_trials(5, 4) == pytest.approx(65536 / 14911)
    with pytest.raises(InvalidArgumentError):
        best_case_expected_trials(3, 0)


def test_failure_probability_wide_errors_stay_below_bound():
    exact, bound = failure_probability_bounds(60, 2**40)
    assert exact < 1
    assert exact <= bound
    assert exact == pytest.approx(math.exp(-(2**40) / 2**59), rel=1e-12)


def test_best_case_expected_trials_wide_errors():
    assert best_case_expected_trials(60, 1) == 2.0**59
    assert best_case_expected_trials(64, 1) == 2.0**63
    assert best_case_expected_trials(60, 4) == pytest.approx(2.0**57, rel=1e-9)
    for k in range(2, 65):
        assert best_case_expected_trials(k, 3) < best_case_expected_trials(k, 2) < best_case_expected_trials(k, 1)


def test_approx_best_case_close_for_small_l():
    assert approx_best_case_trials(5, 4) == 4
    assert approx_best_case_trials(10, 2) == pytest.approx(best_case_expected_trials(10, 2), rel=0.01)


def test_worst_case_expected_trials():
    assert worst_case_expected_trials(2) == 1
    assert worst_case_expected_trials(6) == 16
    assert worst_case_expected_trials(20) == 262144
    with pytest.raises(InvalidArgumentError):
        worst_case_expected_trials(1)


def test_detection_lower_bound_and_cdf():
    assert detection_probability_lower_bound(1) == 1
    assert detection_probability_lower_bound(4) == 0.125
    assert geometric_cdf(0.5, 0) == 0
    assert geometric_cdf(0.5, 2) == pytest.approx(0.75)
    assert geometric_cdf(2.0**-59, 1) == pytest.approx(2.0**-59)
    assert 0 < geometric_cdf(2.0**-63, 2**20) < 1
    assert geometric_cdf(1.0, 1) == 1
    assert math.isclose(geometric_cdf(0.125, 8), 1 - (7 / 8) ** 8)
