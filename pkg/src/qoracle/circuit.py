"""Circuit representation and inverse construction."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import MAX_QUBITS, StructuralError, WidthViolationError

# name -> (number of qubits, number of angles)
SIGNATURES: dict[str, tuple[int, int]] = {
    "id": (1, 0),
    "x": (1, 0),
    "y": (1, 0),
    "z": (1, 0),
    "h": (1, 0),
    "s": (1, 0),
    "sdg": (1, 0),
    "t": (1, 0),
    "tdg": (1, 0),
    "rx": (1, 1),
    "ry": (1, 1),
    "rz": (1, 1),
    "cx": (2, 0),
    "cz": (2, 0),
    "swap": (2, 0),
}

# The generator's default alphabet. sdg/tdg exist so that inverses stay in the IR.
STANDARD_GATES: tuple[str, ...] = (
    "id", "x", "y", "z", "h", "s", "t", "rx", "ry", "rz", "cx", "cz", "swap",
)

_INVERSE_NAME = {"s": "sdg", "sdg": "s", "t": "tdg", "tdg": "t"}
ROTATIONS = frozenset({"rx", "ry", "rz"})


@dataclass(frozen=True)
class GateInstruction:
    name: str
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.name not in SIGNATURES:
            raise StructuralError(f"unknown gate {self.name!r}")
        nq, na = SIGNATURES[self.name]
        if len(self.targets) != nq:
            raise StructuralError(f"{self.name} acts on {nq} qubit(s), got targets {list(self.targets)}")
        if len(self.params) != na:
            raise StructuralError(f"{self.name} takes {na} angle(s), got {len(self.params)}")
        if len(set(self.targets)) != len(self.targets):
            raise StructuralError(f"{self.name} targets must be distinct, got {list(self.targets)}")
        if any(t < 0 for t in self.targets):
            raise WidthViolationError(f"negative qubit index in {list(self.targets)}")

    def inverse(self) -> GateInstruction:
        if self.name in ROTATIONS:
            return GateInstruction(self.name, self.targets, (-self.params[0],))
        return GateInstruction(_INVERSE_NAME.get(self.name, self.name), self.targets)

    def __str__(self):
        args = f"({', '.join(f'{p:.6g}' for p in self.params)})" if self.params else ""
        return f"{self.name}{args} " + ",".join(f"q{t}" for t in self.targets)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    instructions: tuple[GateInstruction, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise StructuralError(f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}")
        for i, ins in enumerate(self.instructions):
            for t in ins.targets:
                if t >= self.num_qubits:
                    raise WidthViolationError(
                        f"instruction {i} ({ins}) targets qubit {t} but the circuit is {self.num_qubits} wide"
                    )

    def __len__(self):
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    def with_instructions(self, instructions: Iterable[GateInstruction]) -> Circuit:
        return Circuit(self.num_qubits, tuple(instructions))

    def slice(self, start: int, stop: int) -> Circuit:
        return Circuit(self.num_qubits, self.instructions[start:stop])

    def gate_names(self) -> set[str]:
        return {ins.name for ins in self.instructions}

    def __str__(self):
        body = "; ".join(str(i) for i in self.instructions)
        return f"Circuit(n={self.num_qubits}, [{body}])"


def inverse(circuit: Circuit) -> Circuit:
    return Circuit(circuit.num_qubits, tuple(ins.inverse() for ins in reversed(circuit.instructions)))


def structurally_equal(a: Circuit, b: Circuit, atol: float = 1e-12) -> bool:
    if a.num_qubits != b.num_qubits or len(a) != len(b):
        return False
    for x, y in zip(a.instructions, b.instructions):
        if x.name != y.name or x.targets != y.targets:
            return False
        if any(abs(p - q) > atol for p, q in zip(x.params, y.params)):
            return False
    return True


def make(num_qubits: int, *ops: Sequence) -> Circuit:
    """Shorthand: ``make(2, ("h", 0), ("cx", 0, 1), ("rz", 0.3, 0))``.

    Rotation tuples put the angle right after the name.
    """
    instructions = []
    for op in ops:
        name, rest = op[0], list(op[1:])
        nq, na = SIGNATURES[name]
        instructions.append(GateInstruction(name, tuple(rest[na:]), tuple(rest[:na])))
    return Circuit(num_qubits, tuple(instructions))
