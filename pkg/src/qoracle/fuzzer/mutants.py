"""Fault-injected backends.

Each catalog entry corrupts one aspect of the correct kernel and names the oracles
expected to notice. The extra backends at the bottom (gate overrides, classical maps)
are building blocks for hand-made faults in tests and demos.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Sequence

import numpy as np

from ..circuit import Circuit, GateInstruction
from ..core import StateVector, apply_matrix, check_targets, gate_matrix
from ..oracles import OracleId
from ..simulator import Backend, CorrectBackend


class MutantId(str, Enum):
    NORM_SKIP = "NORM_SKIP"
    GATE_TYPO = "GATE_TYPO"
    OFF_BY_ONE = "OFF_BY_ONE"
    WIDTH_LEAK = "WIDTH_LEAK"
    MERGE_FAULT = "MERGE_FAULT"
    PHASE_DROP = "PHASE_DROP"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, text: str) -> MutantId:
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise ValueError(f"unknown mutant {text!r}; known: {', '.join(m.value for m in cls)}") from None


@dataclass(frozen=True)
class CatalogEntry:
    expected: tuple[OracleId, ...]
    defaults: Mapping[str, object]
    description: str


CATALOG: dict[MutantId, CatalogEntry] = {
    MutantId.NORM_SKIP: CatalogEntry(
        (OracleId.PROBABILITY,), {"factor": 1.02},
        "rescale the state by `factor` after every step",
    ),
    MutantId.GATE_TYPO: CatalogEntry(
        (OracleId.REVERSIBILITY, OracleId.PROBABILITY), {"gate": "h", "swap": ((0, 1), (1, 1))},
        "swap two entries of one library gate's matrix",
    ),
    MutantId.OFF_BY_ONE: CatalogEntry(
        (OracleId.REVERSIBILITY,), {"gates": ("s", "t")},
        "apply the listed gates to (target + 1) mod n; their daggers stay correct",
    ),
    MutantId.WIDTH_LEAK: CatalogEntry(
        (OracleId.WIDTH,), {"after": 0},
        "after instruction `after`, project the highest qubit onto |0> and drop it",
    ),
    MutantId.MERGE_FAULT: CatalogEntry(
        (OracleId.ENTROPY, OracleId.REVERSIBILITY), {},
        "zero every odd basis amplitude after each step, then renormalize",
    ),
    MutantId.PHASE_DROP: CatalogEntry(
        (OracleId.REVERSIBILITY, OracleId.PROBABILITY), {},
        "discard the imaginary part of every amplitude after each step",
    ),
}


@dataclass(frozen=True)
class MutantSpec:
    mutant_id: MutantId
    parameters: Mapping[str, object] = field(default_factory=dict)
    description: str = ""

    def __post_init__(self):
        mid = self.mutant_id if isinstance(self.mutant_id, MutantId) else MutantId.parse(str(self.mutant_id))
        object.__setattr__(self, "mutant_id", mid)
        entry = CATALOG[mid]
        unknown = set(self.parameters) - set(entry.defaults)
        if unknown:
            raise ValueError(f"{mid}: unknown parameter(s) {sorted(unknown)}")
        params = {**entry.defaults, **self.parameters}
        _validate(mid, params)
        object.__setattr__(self, "parameters", params)
        if not self.description:
            object.__setattr__(self, "description", entry.description)

    @property
    def expected_oracles(self) -> tuple[OracleId, ...]:
        return CATALOG[self.mutant_id].expected

    def to_dict(self) -> dict:
        return {"mutant_id": self.mutant_id.value, "parameters": _plain(self.parameters)}

    @classmethod
    def from_dict(cls, d: Mapping) -> MutantSpec:
        params = dict(d.get("parameters", {}))
        if "swap" in params:
            params["swap"] = tuple(tuple(p) for p in params["swap"])
        if "gates" in params:
            params["gates"] = tuple(params["gates"])
        return cls(MutantId.parse(d["mutant_id"]), params)


def _plain(v):
    if isinstance(v, Mapping):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (tuple, list)):
        return [_plain(x) for x in v]
    return v


def _validate(mid: MutantId, p: dict) -> None:
    if mid is MutantId.NORM_SKIP and not float(p["factor"]) > 0:
        raise ValueError("NORM_SKIP factor must be positive")
    if mid is MutantId.GATE_TYPO:
        gate = gate_matrix(p["gate"], (0.7,) if p["gate"] in ("rx", "ry", "rz") else ())
        dim = gate.matrix.shape[0]
        (a, b), (c, d) = p["swap"]
        if not all(0 <= x < dim for x in (a, b, c, d)) or (a, b) == (c, d):
            raise ValueError(f"GATE_TYPO swap {p['swap']} invalid for a {dim}x{dim} matrix")
    if mid is MutantId.OFF_BY_ONE:
        for g in p["gates"]:
            gate_matrix(g, (0.7,) if g in ("rx", "ry", "rz") else ())
    if mid is MutantId.WIDTH_LEAK and int(p["after"]) < 0:
        raise ValueError("WIDTH_LEAK after must be >= 0")


ALL_MUTANTS: tuple[MutantSpec, ...] = tuple(MutantSpec(m) for m in MutantId)


class MutantBackend(CorrectBackend):
    """Correct kernel plus a fault. Every step goes through :meth:`step_batch`."""

    step = Backend.step

    def __init__(self, spec: MutantSpec):
        self.spec = spec
        self.backend_id = spec.mutant_id.value.lower()


class NormSkip(MutantBackend):
    def step_batch(self, amps, num_qubits, instruction):
        amps, n = super().step_batch(amps, num_qubits, instruction)
        return amps * float(self.spec.parameters["factor"]), n


def corrupted_matrix(gate: str, params: Sequence[float], swap) -> np.ndarray:
    m = np.array(gate_matrix(gate, params).matrix)
    (a, b), (c, d) = swap
    m[a, b], m[c, d] = m[c, d], m[a, b]
    return m


class GateTypo(MutantBackend):
    def step_batch(self, amps, num_qubits, instruction):
        p = self.spec.parameters
        if instruction.name != p["gate"]:
            return super().step_batch(amps, num_qubits, instruction)
        m = corrupted_matrix(instruction.name, instruction.params, p["swap"])
        check_targets(num_qubits, instruction.targets, 1 if m.shape[0] == 2 else 2)
        return apply_matrix(amps, num_qubits, m, instruction.targets), num_qubits


class OffByOne(MutantBackend):
    def step_batch(self, amps, num_qubits, instruction):
        if instruction.name in self.spec.parameters["gates"] and num_qubits > 0:
            shifted = tuple((t + 1) % num_qubits for t in instruction.targets)
            instruction = GateInstruction(instruction.name, shifted, instruction.params)
        return super().step_batch(amps, num_qubits, instruction)


class WidthLeak(MutantBackend):
    def begin(self, circuit: Circuit) -> None:
        self._count = 0

    def step_batch(self, amps, num_qubits, instruction):
        amps, n = super().step_batch(amps, num_qubits, instruction)
        k = getattr(self, "_count", 0)
        self._count = k + 1
        if k != int(self.spec.parameters["after"]) or n == 0:
            return amps, n
        # highest qubit is the least significant bit of the index
        kept = amps[:, 0::2]
        norms = np.linalg.norm(kept, axis=1, keepdims=True)
        kept = np.where(norms > 0, kept / np.where(norms > 0, norms, 1), kept)
        return kept, n - 1


class MergeFault(MutantBackend):
    def step_batch(self, amps, num_qubits, instruction):
        amps, n = super().step_batch(amps, num_qubits, instruction)
        amps = amps.copy()
        amps[:, 1::2] = 0
        norms = np.linalg.norm(amps, axis=1)
        dead = norms == 0
        amps[~dead] /= norms[~dead, None]
        # a fully zeroed state falls back to |0...0>
        amps[dead] = 0
        amps[dead, 0] = 1
        return amps, n


class PhaseDrop(MutantBackend):
    def step_batch(self, amps, num_qubits, instruction):
        amps, n = super().step_batch(amps, num_qubits, instruction)
        return amps.real.astype(np.complex128), n


_CLASSES = {
    MutantId.NORM_SKIP: NormSkip,
    MutantId.GATE_TYPO: GateTypo,
    MutantId.OFF_BY_ONE: OffByOne,
    MutantId.WIDTH_LEAK: WidthLeak,
    MutantId.MERGE_FAULT: MergeFault,
    MutantId.PHASE_DROP: PhaseDrop,
}


def make_mutant(spec: MutantSpec | MutantId | str, rng: np.random.Generator | None = None) -> MutantBackend:
    """Instantiate the faulty backend for ``spec``.

    ``rng`` is accepted for interface symmetry; every catalog fault is deterministic.
    """
    if not isinstance(spec, MutantSpec):
        spec = MutantSpec(spec if isinstance(spec, MutantId) else MutantId.parse(spec))
    return _CLASSES[spec.mutant_id](spec)


def is_degenerate(spec: MutantSpec, circuit: Circuit) -> bool:
    """True when ``circuit`` never reaches the faulty code path."""
    p = spec.parameters
    mid = spec.mutant_id
    if not circuit.instructions:
        return True
    if mid is MutantId.GATE_TYPO:
        return p["gate"] not in circuit.gate_names()
    if mid is MutantId.OFF_BY_ONE:
        return circuit.num_qubits == 1 or not (set(p["gates"]) & circuit.gate_names())
    if mid is MutantId.WIDTH_LEAK:
        return len(circuit) <= int(p["after"])
    return False


# --- hand-made faults -------------------------------------------------------

class GateOverrideBackend(CorrectBackend):
    """Replace the step of selected gates with arbitrary functions.

    ``overrides`` maps a gate name to ``f(amps, num_qubits, instruction) -> amps``.
    """

    step = Backend.step

    def __init__(self, overrides: Mapping[str, Callable], backend_id: str = "override"):
        self.overrides = dict(overrides)
        self.backend_id = backend_id

    def step_batch(self, amps, num_qubits, instruction):
        f = self.overrides.get(instruction.name)
        if f is None:
            return super().step_batch(amps, num_qubits, instruction)
        check_targets(num_qubits, instruction.targets, len(instruction.targets))
        return f(amps, num_qubits, instruction), num_qubits


def _project_zero(amps, num_qubits, instruction):
    """Project the target qubit onto |0> and renormalize."""
    (t,) = instruction.targets
    psi = amps.reshape((amps.shape[0],) + (2,) * num_qubits).copy()
    index = [slice(None)] * (num_qubits + 1)
    index[t + 1] = 1
    psi[tuple(index)] = 0
    out = psi.reshape(amps.shape)
    norms = np.linalg.norm(out, axis=1, keepdims=True)
    # a row with no |0> component stays the zero vector
    return np.divide(out, norms, out=np.zeros_like(out), where=norms > 0)


def projector_backend(gate: str = "h") -> GateOverrideBackend:
    return GateOverrideBackend({gate: _project_zero}, backend_id=f"projector_{gate}")


class ClassicalMapBackend(CorrectBackend):
    """Gates run correctly; ``finalize`` then sends basis index ``i`` to ``mapping(i)``.

    A deliberately many-to-one classical post-processing stage (e.g. integer halving).
    """

    def __init__(self, mapping: Callable[[int], int], backend_id: str = "classical_map"):
        self.mapping = mapping
        self.backend_id = backend_id

    def finalize(self, state):
        out = np.zeros_like(state.amplitudes)
        for i, a in enumerate(state.amplitudes):
            out[self.mapping(i)] += a
        mapped = StateVector(state.num_qubits, out)
        return super().finalize(mapped)


def divide_by_two_backend() -> ClassicalMapBackend:
    return ClassicalMapBackend(lambda i: i // 2, backend_id="divide_by_two")
