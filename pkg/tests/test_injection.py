import json

import numpy as np
import pytest

from app.bitstring import BitString
from app.circuit import Circuit, Gate, GatePolicy, ProgramBatch, compose, permutation_table, simulate
from app.exceptions import CapacityExceededError, InvalidArgumentError, SamplingFailureError
from app.injection import (
    ErrorSpec,
    RandomErrorPolicy,
    build_errors,
    error_span,
    inject,
    random_error,
    random_injection_plan,
    record_from_document,
    record_to_document,
    replay,
    splice,
    splice_batch,
    strip_errors,
    support,
    worst_case_error,
)
from app.oracle import exact_detection_probability
from app.rng import derive_stream
from app.schemas import InjectionRecordDocument
from tests.helpers import make_circuit


def test_worst_case_k1_is_not():
    assert worst_case_error(4, 1, 2) == Circuit(4, (Gate(2),))


def test_worst_case_k3_is_ccnot():
    assert worst_case_error(5, 3, 1) == Circuit(5, (Gate.mct([1, 2], 3),))


def test_worst_case_moves_two_window_patterns():
    error = worst_case_error(6, 4, 0)
    assert exact_detection_probability(Circuit.identity(6), error).fraction == 2 / 16


def test_worst_case_window_overflow():
    with pytest.raises(InvalidArgumentError):
        worst_case_error(6, 4, 3)
    with pytest.raises(InvalidArgumentError):
        worst_case_error(6, 0, 0)


@pytest.mark.parametrize("n", [1, 5, 9, 12])
def test_worst_case_support_and_moved_inputs(n):
    for k in range(1, n + 1):
        error = worst_case_error(n, k, n - k)
        assert len(support(error, (n - k, k))) == k
        moved = exact_detection_probability(Circuit.identity(n), error).numerator
        assert moved == 2 * 2 ** (n - k)


def test_support_examples():
    assert support(Circuit(6, (Gate(3),)), (3, 1)) == {3}
    assert support(Circuit(4, (Gate.mct([0, 1], 2),)), (0, 3)) == {0, 1, 2}
    cnot = Gate.mct([1], 0)
    assert support(Circuit(4, (cnot, cnot)), (0, 2)) == set()


def test_support_ignores_idle_window_line():
    # hat 2 pencerede ama dokunulmuyor
    assert support(Circuit(3, (Gate.mct([0], 1),)), (0, 3)) == {0, 1}


def test_support_rejects_gate_outside_window():
    with pytest.raises(InvalidArgumentError):
        support(Circuit(4, (Gate(3),)), (0, 2))


def test_support_capacity():
    with pytest.raises(CapacityExceededError):
        support(Circuit.identity(20), (0, 17))


def test_random_error_k1_is_not():
    for seed in range(20):
        error = random_error(5, 1, 2, derive_stream(seed, 0))
        assert permutation_table(error) == permutation_table(Circuit(5, (Gate(2),)))


def test_random_error_full_support():
    stream = derive_stream(5, 0)
    for _ in range(1000):
        error = random_error(8, 5, 2, stream)
        assert support(error, (2, 5)) == {2, 3, 4, 5, 6}
        assert all(2 <= line < 7 for gate in error.gates for line in gate.lines)


def test_random_error_single_gate_k2_is_cnot():
    policy = RandomErrorPolicy(sequence_length=1)
    for seed in range(20):
        error = random_error(4, 2, 1, derive_stream(seed, 0), policy)
        (gate,) = error.gates
        assert len(gate.controls) == 1
        assert set(gate.lines) == {1, 2}


def test_random_error_sampling_failure():
    # tek hatlık pencerede iki kapı hep NOT·NOT, yani birim
    policy = RandomErrorPolicy(sequence_length=2, max_attempts=5)
    with pytest.raises(SamplingFailureError) as info:
        random_error(3, 1, 0, derive_stream(1, 0), policy)
    assert info.value.attempts == 5
    assert info.value.window == (0, 1)


def test_random_error_with_negative_controls():
    policy = RandomErrorPolicy(gate_policy=GatePolicy(0, 3, True))
    error = random_error(6, 4, 1, derive_stream(3, 0), policy)
    assert len(support(error, (1, 4))) == 4


def test_inject_empty_specs():
    circuit = make_circuit(6, 20)
    corrupted, record = inject(circuit, [], derive_stream(0, 1))
    assert corrupted == circuit
    assert record.positions == ()


def test_inject_at_position_zero_runs_error_first():
    circuit = make_circuit(6, 20)
    corrupted, _ = inject(circuit, [(0, ErrorSpec(2, 1))], derive_stream(0, 1))
    error = worst_case_error(6, 2, 1)
    assert corrupted == compose(error, circuit)


def test_inject_invalid_position():
    circuit = make_circuit(6, 10)
    with pytest.raises(InvalidArgumentError):
        inject(circuit, [(11, ErrorSpec(2, 0))], derive_stream(0, 1))


def test_strip_errors_restores_ideal():
    circuit = make_circuit(6, 30, seed=2)
    specs = [(17, ErrorSpec(2, 3)), (4, ErrorSpec(3, 0, "random")), (17, ErrorSpec(1, 5))]
    corrupted, record = inject(circuit, specs, derive_stream(2, 1))
    assert record.positions == (4, 17, 17)
    assert strip_errors(corrupted, record) == circuit
    assert replay(circuit, record) == corrupted


def test_replay_rejects_other_circuit():
    circuit = make_circuit(6, 30, seed=2)
    _, record = inject(circuit, [(3, ErrorSpec(2, 0))], derive_stream(2, 1))
    with pytest.raises(InvalidArgumentError):
        replay(make_circuit(6, 30, seed=3), record)


def test_single_error_decomposition():
    n, g = 10, 40
    for seed in range(5):
        circuit = make_circuit(n, g, seed=seed)
        stream = derive_stream(seed, 1)
        plan = random_injection_plan(g, n, 1, 3, stream, kind="random")
        corrupted, record = inject(circuit, plan, stream)
        position = record.positions[0]
        r1 = Circuit(n, circuit.gates[:position])
        r2 = Circuit(n, circuit.gates[position:])
        error = record.errors[0]
        for x in range(0, 1 << n, 7):
            bits = BitString(n, x)
            expected = simulate(r2, simulate(error, simulate(r1, bits)))
            assert simulate(corrupted, bits) == expected


def test_plan_examples():
    assert [p for p, _ in random_injection_plan(0, 5, 1, 2, derive_stream(0, 0))] == [0]
    plan = random_injection_plan(50, 4, 30, 4, derive_stream(0, 0))
    assert all(spec.window_start == 0 for _, spec in plan)
    first = random_injection_plan(100, 20, 6, 3, derive_stream(8, 1))
    assert first == random_injection_plan(100, 20, 6, 3, derive_stream(8, 1))
    assert all(0 <= p <= 100 and 0 <= s.window_start <= 17 for p, s in first)


def test_plan_validation():
    with pytest.raises(InvalidArgumentError):
        random_injection_plan(10, 4, 0, 2, derive_stream(0, 0))
    with pytest.raises(InvalidArgumentError):
        random_injection_plan(10, 4, 1, 5, derive_stream(0, 0))


def test_plan_positions_cover_all_gaps():
    plan = random_injection_plan(4, 6, 2000, 2, derive_stream(4, 0))
    assert {p for p, _ in plan} == set(range(5))
    assert {s.window_start for _, s in plan} == set(range(5))


def test_record_document_round_trip():
    circuit = make_circuit(8, 25, seed=9)
    specs = random_injection_plan(25, 8, 3, 3, derive_stream(9, 1), kind="random")
    corrupted, record = inject(circuit, specs, derive_stream(9, 2))
    text = record_to_document(record).model_dump_json()
    restored = record_from_document(InjectionRecordDocument.model_validate(json.loads(text)))
    assert restored == record
    assert replay(circuit, restored) == corrupted


def test_error_span_keeps_probability():
    n = 8
    circuit = make_circuit(n, 40, seed=1)
    specs = [(10, ErrorSpec(2, 0)), (30, ErrorSpec(3, 4))]
    corrupted, record = inject(circuit, specs, derive_stream(1, 1))
    golden, inner = error_span(circuit, record)
    assert len(golden) == 20
    assert len(inner) == 20 + 2
    assert exact_detection_probability(golden, inner) == exact_detection_probability(circuit, corrupted)


def test_simulate_many_agrees_with_support_window():
    error = worst_case_error(5, 3, 2)
    table = permutation_table(error).images
    moved = np.flatnonzero(table != np.arange(32, dtype=np.uint64))
    assert sorted(int(x) >> 2 & 0b111 for x in moved) == [0b011] * 4 + [0b111] * 4


def run_lane(pairs, lane: int, side: int, bits: int) -> int:
    for care, value, flip in zip(
        pairs.care[:, lane].tolist(), pairs.value[:, lane].tolist(), pairs.flips[:, side, lane].tolist()
    ):
        if bits & care == value:
            bits ^= flip
    return bits


def test_build_errors_matches_place_errors():
    circuit = make_circuit(8, 25, seed=4)
    specs = [(20, ErrorSpec(3, 2, "random")), (3, ErrorSpec(2, 5)), (20, ErrorSpec(1, 0))]
    placed = inject(circuit, specs, derive_stream(9, 1))[1]
    positions, errors, windows = build_errors(8, 25, specs, derive_stream(9, 1))
    assert (positions, errors, windows) == (placed.positions, placed.errors, placed.windows)
    with pytest.raises(InvalidArgumentError):
        build_errors(8, 25, [(26, ErrorSpec(1, 0))], derive_stream(9, 1))


def test_splice_batch_aligns_ideal_and_corrupted_lanes():
    n, g = 8, 40
    circuits = [make_circuit(n, g, seed=s) for s in range(5)]
    stream = derive_stream(12, 1)
    positions, errors = [], []
    for lane in range(5):
        plan = random_injection_plan(g, n, lane, 3, stream, kind="random") if lane else []
        lane_positions, lane_errors, _ = build_errors(n, g, plan, stream)
        positions.append(lane_positions)
        errors.append(lane_errors)
    pairs = splice_batch(ProgramBatch.of(circuits), positions, errors)
    assert pairs.lanes == 5
    assert len(pairs) == g + max(sum(len(e) for e in lane_errors) for lane_errors in errors)
    for lane, circuit in enumerate(circuits):
        corrupted = splice(circuit, positions[lane], errors[lane])
        for x in range(0, 256, 7):
            assert run_lane(pairs, lane, 0, x) == circuit.run(x)
            assert run_lane(pairs, lane, 1, x) == corrupted.run(x)


def test_splice_batch_on_empty_base_runs_errors_alone():
    errors = [(worst_case_error(4, 2, 0), worst_case_error(4, 3, 1)), ()]
    pairs = splice_batch(ProgramBatch.empty(4, 2), [(0, 0), ()], errors)
    assert len(pairs) == 2
    for x in range(16):
        assert run_lane(pairs, 0, 0, x) == x
        assert run_lane(pairs, 0, 1, x) == compose(*errors[0]).run(x)
        assert run_lane(pairs, 1, 1, x) == x


def test_splice_batch_validation():
    base = ProgramBatch.of([make_circuit(4, 5)])
    with pytest.raises(InvalidArgumentError):
        splice_batch(base, [(3, 1)], [(worst_case_error(4, 1, 0), worst_case_error(4, 1, 0))])
    with pytest.raises(InvalidArgumentError):
        splice_batch(base, [(6,)], [(worst_case_error(4, 1, 0),)])
    with pytest.raises(InvalidArgumentError):
        splice_batch(base, [(0,)], [(worst_case_error(5, 1, 0),)])
    with pytest.raises(InvalidArgumentError):
        splice_batch(base, [], [])
