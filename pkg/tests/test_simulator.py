import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qoracle.circuit import Circuit, make
from qoracle.core import StateVector, StructuralError, WidthViolationError
from qoracle.fuzzer.generator import GeneratorConfig, generate_circuit
from qoracle.fuzzer.mutants import projector_backend
from qoracle.simulator import (
    Backend,
    CorrectBackend,
    DistributionInvalidError,
    ExecutionError,
    ExecutionTrace,
    run_batch,
    run_forward,
    run_roundtrip,
    sample_measurements,
)
from qoracle.core import ProbabilityDistribution
from reference import binomial_bounds

S2 = 1 / math.sqrt(2)
PLUS = StateVector(1, [S2, S2])


def test_forward_hadamard():
    trace = run_forward(make(1, ("h", 0)), StateVector.zero(1), trace_states=True)
    assert len(trace.states) == 2
    np.testing.assert_allclose(trace.final_state.amplitudes, [S2, S2])
    np.testing.assert_allclose(trace.final_distribution.probabilities, [0.5, 0.5])


def test_forward_empty_circuit_is_identity():
    s = StateVector.basis(2, 0b01)
    trace = run_forward(Circuit(2), s)
    assert len(trace.states) == 1
    assert trace.final_state.allclose(s)


def test_forward_bell():
    trace = run_forward(make(2, ("h", 0), ("cx", 0, 1)))
    np.testing.assert_allclose(trace.final_state.amplitudes, [S2, 0, 0, S2], atol=1e-15)


def test_untraced_run_keeps_endpoints_only():
    c = make(2, ("h", 0), ("cx", 0, 1), ("x", 1))
    assert len(run_forward(c).states) == 2
    assert len(run_forward(c, trace_states=True).states) == 4


def test_input_width_must_match():
    with pytest.raises(StructuralError):
        run_forward(make(2, ("h", 0)), StateVector.zero(1))


class _Crashy(CorrectBackend):
    def step(self, state, instruction):
        if instruction.name == "x":
            raise WidthViolationError("boom")
        return super().step(state, instruction)


def test_backend_errors_tagged_with_instruction_index():
    c = make(2, ("h", 0), ("h", 1), ("x", 0))
    with pytest.raises(ExecutionError) as err:
        run_forward(c, backend=_Crashy(), trace_states=True)
    assert err.value.index == 2
    assert isinstance(err.value.cause, WidthViolationError)
    assert len(err.value.partial.states) == 3


def test_roundtrip_hadamard_on_plus():
    out, rec, fid = run_roundtrip(make(1, ("h", 0)), PLUS)
    np.testing.assert_allclose(out.amplitudes, [1, 0], atol=1e-15)
    assert rec.allclose(PLUS)
    assert fid == pytest.approx(1.0, abs=1e-12)


def test_projector_fault_hand_computation():
    # the fault: project onto |0>, renormalize; the inverse of [H] is [H], so it fires twice
    P0 = np.array([[1, 0], [0, 0]])
    plus = np.array([S2, S2])
    out = P0 @ plus
    out = out / np.linalg.norm(out)
    rec = P0 @ out
    rec = rec / np.linalg.norm(rec)
    expected = abs(np.vdot(plus, rec)) ** 2
    assert expected == pytest.approx(0.5)

    out_s, rec_s, fid = run_roundtrip(make(1, ("h", 0)), PLUS, projector_backend("h"))
    np.testing.assert_allclose(out_s.amplitudes, out)
    np.testing.assert_allclose(rec_s.amplitudes, rec)
    assert not rec_s.allclose(PLUS)
    assert fid == pytest.approx(expected, abs=1e-12)


def test_step_only_backend_works_in_batches():
    class StepOnly(Backend):
        backend_id = "step-only"

        def step(self, state, instruction):
            return CorrectBackend().step(state, instruction)

    c = make(2, ("h", 0), ("cx", 0, 1))
    inputs = [StateVector.basis(2, i) for i in range(4)]
    a = run_batch(c, inputs, StepOnly())
    b = run_batch(c, inputs)
    for x, y in zip(a, b):
        assert x.allclose(y, atol=1e-14)


def test_backend_must_override_something():
    with pytest.raises(NotImplementedError):
        run_batch(make(1, ("h", 0)), [PLUS], Backend())


# --- sampling ----------------------------------------------------------------

def _trace_with(probs):
    n = int(math.log2(len(probs)))
    return ExecutionTrace(Circuit(max(n, 1)), (StateVector.zero(max(n, 1)),), ProbabilityDistribution(probs), "test")


def test_sampling_deterministic_outcome():
    assert sample_measurements(_trace_with([1.0, 0.0]), 100, seed=3) == {0: 100}


def test_sampling_fair_coin_within_six_sigma():
    lo, hi = binomial_bounds(10000, 0.5, 6)
    assert (lo, hi) == (4700, 5300)
    counts = sample_measurements(_trace_with([0.5, 0.5]), 10000, seed=11)
    assert sum(counts.values()) == 10000
    assert lo <= counts[0] <= hi


def test_sampling_refuses_invalid_distribution():
    with pytest.raises(DistributionInvalidError):
        sample_measurements(_trace_with([0.64, 0.64]), 10, seed=0)


def test_sampling_reproducible():
    trace = run_forward(make(3, ("h", 0), ("h", 1), ("cx", 1, 2), ("ry", 0.4, 2)))
    assert sample_measurements(trace, 500, 9) == sample_measurements(trace, 500, 9)
    assert sum(sample_measurements(trace, 500, 9).values()) == 500


# --- properties on the correct backend ----------------------------------------

SOUND = GeneratorConfig(max_qubits=10, min_depth=0, max_depth=100, angle_distribution="uniform")


def test_roundtrip_fidelity_over_random_circuits():
    rng = np.random.default_rng(99)
    worst = 1.0
    for _ in range(1000):
        c = generate_circuit(SOUND, rng)
        _, _, fid = run_roundtrip(c, StateVector.random(c.num_qubits, rng))
        worst = min(worst, fid)
    assert worst >= 1 - 1e-9


@given(st.integers(0, 2**32 - 1))
def test_trace_states_normalized_and_full_width(seed):
    rng = np.random.default_rng(seed)
    c = generate_circuit(GeneratorConfig(max_qubits=8, max_depth=40), rng)
    trace = run_forward(c, StateVector.random(c.num_qubits, rng), trace_states=True)
    assert len(trace.states) == len(c) + 1
    for s in trace.states:
        assert s.num_qubits == c.num_qubits
        assert abs(s.norm_squared - 1) < 1e-9


@given(st.integers(0, 2**32 - 1))
def test_fragment_roundtrip(seed):
    rng = np.random.default_rng(seed)
    c = generate_circuit(GeneratorConfig(max_qubits=7, min_depth=2, max_depth=50, angle_distribution="uniform"), rng)
    i, j = sorted(rng.choice(len(c) + 1, size=2, replace=False))
    trace = run_forward(c, StateVector.random(c.num_qubits, rng), trace_states=True)
    fragment_input = trace.states[i]
    _, rec, fid = run_roundtrip(c.slice(i, j), fragment_input)
    assert fid >= 1 - 1e-9


def test_determinism_bit_identical():
    c = generate_circuit(SOUND, np.random.default_rng(5))
    s = StateVector.random(c.num_qubits, np.random.default_rng(6))
    a, b = run_forward(c, s, trace_states=True), run_forward(c, s, trace_states=True)
    for x, y in zip(a.states, b.states):
        assert np.array_equal(x.amplitudes, y.amplitudes)
    assert sample_measurements(a, 1000, 1) == sample_measurements(b, 1000, 1)


def test_batch_matches_single_runs():
    rng = np.random.default_rng(12)
    c = generate_circuit(GeneratorConfig(max_qubits=6, max_depth=30, angle_distribution="uniform"), rng)
    inputs = [StateVector.random(c.num_qubits, rng) for _ in range(5)]
    for s, out in zip(inputs, run_batch(c, inputs)):
        assert out.allclose(run_forward(c, s).final_state, atol=1e-12)


def test_projector_on_orthogonal_input_gives_zero_vector():
    trace = run_forward(make(1, ("h", 0)), StateVector.basis(1, 1), projector_backend("h"))
    assert trace.final_state.norm_squared == 0.0
    assert trace.final_distribution.total == 0.0
