"""Forward and round-trip execution over a pluggable backend."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .circuit import Circuit, GateInstruction, inverse
from .core import (
    EPS_NORM,
    ProbabilityDistribution,
    StateVector,
    StructuralError,
    apply_gate,
    apply_matrix,
    check_targets,
    fidelity,
    gate_matrix,
    measurement_distribution,
)


class Backend:
    """Executes one instruction at a time.

    Subclasses override :meth:`step` or :meth:`step_batch` (or both); each default
    is written in terms of the other. A backend instance serves one execution at a time.
    """

    backend_id = "abstract"

    def initial_state(self, num_qubits: int) -> StateVector:
        return StateVector.zero(num_qubits)

    def begin(self, circuit: Circuit) -> None:
        """Called once before each execution; stateful faults reset here."""

    def step(self, state: StateVector, instruction: GateInstruction) -> StateVector:
        amps, n = self.step_batch(state.amplitudes[None, :], state.num_qubits, instruction)
        return StateVector(n, amps[0])

    def step_batch(self, amps: np.ndarray, num_qubits: int, instruction: GateInstruction) -> tuple[np.ndarray, int]:
        """Advance a stack of states ``amps`` (shape ``(m, 2**num_qubits)``).

        Returns the new stack and its width; a faulty backend may change the width.
        """
        if type(self).step is Backend.step:
            raise NotImplementedError(f"{type(self).__name__} must override step or step_batch")
        outs = [self.step(StateVector(num_qubits, row), instruction) for row in amps]
        widths = {s.num_qubits for s in outs}
        if len(widths) != 1:
            raise StructuralError("backend produced states of differing widths within one batch")
        return np.stack([s.amplitudes for s in outs]), widths.pop()

    def finalize(self, state: StateVector) -> tuple[StateVector, ProbabilityDistribution]:
        return state, measurement_distribution(state)

    def __repr__(self):
        return f"<{type(self).__name__} {self.backend_id}>"


class CorrectBackend(Backend):
    backend_id = "correct"

    def step(self, state: StateVector, instruction: GateInstruction) -> StateVector:
        return apply_gate(state, gate_matrix(instruction.name, instruction.params), instruction.targets)

    def step_batch(self, amps, num_qubits, instruction):
        gate = gate_matrix(instruction.name, instruction.params)
        check_targets(num_qubits, instruction.targets, gate.arity)
        return apply_matrix(amps, num_qubits, gate.matrix, instruction.targets), num_qubits


class ExecutionError(RuntimeError):
    """A backend failure, tagged with the instruction index where it happened."""

    def __init__(self, index: int, cause: Exception, partial: ExecutionTrace | None = None):
        super().__init__(f"instruction {index}: {cause}")
        self.index = index
        self.cause = cause
        self.partial = partial


class DistributionInvalidError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ExecutionTrace:
    circuit: Circuit
    states: tuple[StateVector, ...]
    final_distribution: ProbabilityDistribution | None
    backend_id: str
    traced: bool = True

    @property
    def final_state(self) -> StateVector:
        return self.states[-1]

    def instruction_index(self, state_index: int) -> int | str:
        """Instruction that produced ``states[state_index]``."""
        if state_index == 0:
            return "initial"
        if not self.traced:
            return "final"
        return state_index - 1


def _coerce_backend(backend: Backend | None) -> Backend:
    return CorrectBackend() if backend is None else backend


def run_forward(
    circuit: Circuit,
    input: StateVector | None = None,
    backend: Backend | None = None,
    trace_states: bool = False,
) -> ExecutionTrace:
    backend = _coerce_backend(backend)
    state = backend.initial_state(circuit.num_qubits) if input is None else input
    if state.num_qubits != circuit.num_qubits:
        raise StructuralError(f"input has {state.num_qubits} qubits, circuit has {circuit.num_qubits}")
    backend.begin(circuit)
    states = [state]
    for i, ins in enumerate(circuit.instructions):
        try:
            state = backend.step(state, ins)
        except (StructuralError, ValueError, IndexError, ArithmeticError) as exc:
            partial = ExecutionTrace(circuit, tuple(states), None, backend.backend_id, trace_states)
            raise ExecutionError(i, exc, partial) from exc
        if trace_states:
            states.append(state)
    if not trace_states and circuit.instructions:
        states.append(state)
    final, dist = backend.finalize(state)
    if final is not state:
        states[-1] = final
    return ExecutionTrace(circuit, tuple(states), dist, backend.backend_id, trace_states)


def run_batch(circuit: Circuit, inputs: Sequence[StateVector], backend: Backend | None = None) -> list[StateVector]:
    """Final (finalized) states for many inputs pushed through ``circuit`` together."""
    backend = _coerce_backend(backend)
    if not inputs:
        return []
    for s in inputs:
        if s.num_qubits != circuit.num_qubits:
            raise StructuralError(f"input has {s.num_qubits} qubits, circuit has {circuit.num_qubits}")
    amps = np.stack([s.amplitudes for s in inputs])
    n = circuit.num_qubits
    backend.begin(circuit)
    for i, ins in enumerate(circuit.instructions):
        try:
            amps, n = backend.step_batch(amps, n, ins)
        except (StructuralError, ValueError, IndexError, ArithmeticError) as exc:
            raise ExecutionError(i, exc) from exc
    try:
        return [backend.finalize(StateVector(n, row))[0] for row in amps]
    except StructuralError as exc:
        raise ExecutionError(len(circuit), exc) from exc


class RoundTrip(NamedTuple):
    output: StateVector
    recovered: StateVector
    fidelity: float


def run_roundtrip(circuit: Circuit, input: StateVector, backend: Backend | None = None) -> RoundTrip:
    backend = _coerce_backend(backend)
    out = run_forward(circuit, input, backend).final_state
    back = run_forward(inverse(circuit), out, backend).final_state
    return RoundTrip(out, back, fidelity(input, back))


def roundtrip_batch(circuit: Circuit, inputs: Sequence[StateVector], backend: Backend | None = None) -> list[float]:
    """Fidelities of ``inputs`` against their round-tripped versions."""
    backend = _coerce_backend(backend)
    outs = run_batch(circuit, inputs, backend)
    if outs and outs[0].num_qubits != circuit.num_qubits:
        raise ExecutionError(len(circuit), StructuralError(
            f"forward pass ended with {outs[0].num_qubits} qubits, expected {circuit.num_qubits}"))
    back = run_batch(inverse(circuit), outs, backend)
    if back and back[0].num_qubits != circuit.num_qubits:
        raise ExecutionError(len(circuit), StructuralError(
            f"inverse pass ended with {back[0].num_qubits} qubits, expected {circuit.num_qubits}"))
    return [fidelity(a, b) for a, b in zip(inputs, back)]


def sample_measurements(trace: ExecutionTrace, shots: int, seed: int, eps: float = EPS_NORM) -> dict[int, int]:
    if shots < 1:
        raise ValueError("shots must be positive")
    if trace.final_distribution is None:
        raise DistributionInvalidError("trace has no final distribution")
    p = trace.final_distribution.probabilities
    if not np.all(np.isfinite(p)) or p.min() < -eps or p.max() > 1 + eps or abs(p.sum() - 1) > eps:
        raise DistributionInvalidError(
            f"refusing to sample from an invalid distribution (sum={p.sum():.6g}, min={p.min():.3g}, max={p.max():.3g})"
        )
    p = np.clip(p, 0.0, None)
    rng = np.random.default_rng(seed)
    outcomes = rng.choice(len(p), size=shots, p=p / p.sum())
    return dict(sorted(Counter(int(o) for o in outcomes).items()))
