"""Dense statevector kernel: states, the standard gate library, and gate application.

Qubit 0 is the most significant bit of a basis index, so the ket ``|q0 q1 ... q(n-1)>``
reads left to right as the binary index into the amplitude array.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, pi, sin, sqrt
from typing import Callable, Sequence

import numpy as np

MAX_QUBITS = 16

EPS_NORM = 1e-9
EPS_UNITARY = 1e-10
FINGERPRINT_GRID = 1e-6


class StructuralError(ValueError):
    """Arguments that do not fit together (arity, width mismatch, malformed arrays)."""


class WidthViolationError(StructuralError):
    """A qubit index outside the register, or a state whose width changed."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128, copy=True)
        if self.num_qubits < 0 or self.num_qubits > MAX_QUBITS:
            raise StructuralError(f"num_qubits={self.num_qubits} outside [0, {MAX_QUBITS}]")
        if amps.ndim != 1 or amps.shape[0] != 1 << self.num_qubits:
            raise StructuralError(
                f"expected {1 << self.num_qubits} amplitudes for {self.num_qubits} qubits, got shape {amps.shape}"
            )
        if not np.all(np.isfinite(amps)):
            raise StructuralError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_amplitudes(cls, amplitudes) -> StateVector:
        amps = np.asarray(amplitudes, dtype=np.complex128)
        n = int(amps.shape[0]).bit_length() - 1
        if amps.ndim != 1 or amps.shape[0] != 1 << n:
            raise StructuralError(f"amplitude count {amps.shape} is not a power of two")
        return cls(n, amps)

    @classmethod
    def basis(cls, num_qubits: int, index: int = 0) -> StateVector:
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    @classmethod
    def zero(cls, num_qubits: int) -> StateVector:
        return cls.basis(num_qubits, 0)

    @classmethod
    def random(cls, num_qubits: int, rng: np.random.Generator) -> StateVector:
        """Unitarily invariant random pure state."""
        dim = 1 << num_qubits
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        return cls(num_qubits, v / np.linalg.norm(v))

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> StateVector:
        nrm = np.linalg.norm(self.amplitudes)
        if nrm == 0:
            raise StructuralError("cannot normalize the zero vector")
        return StateVector(self.num_qubits, self.amplitudes / nrm)

    def allclose(self, other: StateVector, atol: float = 1e-10) -> bool:
        return self.num_qubits == other.num_qubits and bool(
            np.allclose(self.amplitudes, other.amplitudes, atol=atol, rtol=0)
        )

    def __repr__(self):
        return f"StateVector(num_qubits={self.num_qubits}, amplitudes={np.array2string(self.amplitudes, precision=4)})"


@dataclass(frozen=True, eq=False)
class ProbabilityDistribution:
    probabilities: np.ndarray

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=np.float64, copy=True)
        if p.ndim != 1:
            raise StructuralError("probabilities must be one-dimensional")
        object.__setattr__(self, "probabilities", _frozen(p))

    def __len__(self):
        return len(self.probabilities)

    @property
    def total(self) -> float:
        return float(np.sum(self.probabilities))


@dataclass(frozen=True, eq=False)
class GateMatrix:
    """A named 1- or 2-qubit matrix.

    Plain construction does not check unitarity so that faulty simulators can carry
    corrupted matrices; use :meth:`unitary` for user-supplied gates.
    """

    name: str
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128, copy=True)
        if m.shape not in ((2, 2), (4, 4)):
            raise StructuralError(f"gate matrix must be 2x2 or 4x4, got {m.shape}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def arity(self) -> int:
        return 1 if self.matrix.shape[0] == 2 else 2

    @classmethod
    def unitary(cls, name: str, matrix, eps: float = EPS_UNITARY) -> GateMatrix:
        gate = cls(name, matrix)
        dev = unitarity_deviation(gate.matrix)
        if dev >= eps:
            raise StructuralError(f"gate {name!r} is not unitary (max |G^H G - I| = {dev:.3g})")
        return gate

    def dagger(self, name: str | None = None) -> GateMatrix:
        return GateMatrix(name or f"{self.name}^dg", self.matrix.conj().T)


def unitarity_deviation(matrix: np.ndarray) -> float:
    m = np.asarray(matrix)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


_S2 = 1 / sqrt(2)

_FIXED: dict[str, np.ndarray] = {
    "id": np.eye(2),
    "x": np.array([[0, 1], [1, 0]]),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.array([[1, 0], [0, -1]]),
    "h": np.array([[_S2, _S2], [_S2, -_S2]]),
    "s": np.diag([1, 1j]),
    "sdg": np.diag([1, -1j]),
    "t": np.diag([1, np.exp(1j * pi / 4)]),
    "tdg": np.diag([1, np.exp(-1j * pi / 4)]),
    # two-qubit matrices in the basis |first target, second target>
    "cx": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
    "cz": np.diag([1, 1, 1, -1]),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]),
}

_ROTATIONS: dict[str, Callable[[float], np.ndarray]] = {
    "rx": lambda t: np.array([[cos(t / 2), -1j * sin(t / 2)], [-1j * sin(t / 2), cos(t / 2)]]),
    "ry": lambda t: np.array([[cos(t / 2), -sin(t / 2)], [sin(t / 2), cos(t / 2)]]),
    "rz": lambda t: np.diag([np.exp(-1j * t / 2), np.exp(1j * t / 2)]),
}

_FIXED_GATES = {name: GateMatrix(name, m) for name, m in _FIXED.items()}


def gate_matrix(name: str, params: Sequence[float] = ()) -> GateMatrix:
    """Look up a library gate, binding rotation angles (radians)."""
    if name in _FIXED_GATES:
        if params:
            raise StructuralError(f"gate {name!r} takes no parameters")
        return _FIXED_GATES[name]
    if name in _ROTATIONS:
        if len(params) != 1:
            raise StructuralError(f"gate {name!r} takes exactly one angle")
        return GateMatrix(name, _ROTATIONS[name](float(params[0])))
    raise StructuralError(f"unknown gate {name!r}")


def library_gate_names() -> list[str]:
    return list(_FIXED) + list(_ROTATIONS)


def apply_matrix(amps: np.ndarray, num_qubits: int, matrix: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Apply ``matrix`` to ``targets`` of every state in ``amps``.

    ``amps`` has shape ``(..., 2**num_qubits)``; leading axes are a batch.
    """
    k = len(targets)
    batch = amps.shape[:-1]
    nb = len(batch)
    psi = amps.reshape(batch + (2,) * num_qubits)
    op = matrix.reshape((2,) * (2 * k))
    axes = [nb + t for t in targets]
    out = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the gate's output axes first, then the untouched axes in order
    out = np.moveaxis(out, list(range(k)), axes)
    return out.reshape(amps.shape)


def check_targets(num_qubits: int, targets: Sequence[int], arity: int) -> None:
    if len(targets) != arity:
        raise StructuralError(f"gate of arity {arity} given {len(targets)} targets")
    if len(set(targets)) != len(targets):
        raise StructuralError(f"targets must be distinct, got {list(targets)}")
    for t in targets:
        if not 0 <= t < num_qubits:
            raise WidthViolationError(f"qubit index {t} out of range for width {num_qubits}")


def apply_gate(state: StateVector, gate: GateMatrix, targets: Sequence[int]) -> StateVector:
    targets = [int(t) for t in targets]
    check_targets(state.num_qubits, targets, gate.arity)
    out = apply_matrix(state.amplitudes, state.num_qubits, gate.matrix, targets)
    return StateVector(state.num_qubits, out)


def measurement_distribution(state: StateVector) -> ProbabilityDistribution:
    a = state.amplitudes
    return ProbabilityDistribution(a.real**2 + a.imag**2)


def fidelity(a: StateVector, b: StateVector) -> float:
    """Squared overlap ``|<a|b>|^2``; no renormalization is applied."""
    if a.num_qubits != b.num_qubits:
        raise StructuralError(f"width mismatch: {a.num_qubits} vs {b.num_qubits}")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def canonical_fingerprint(state: StateVector, grid: float = FINGERPRINT_GRID) -> tuple[int, bytes]:
    """Hashable key identifying ``state`` up to global phase on a rounding grid."""
    amps = state.amplitudes
    big = np.flatnonzero(np.abs(amps) > grid)
    if big.size == 0:
        raise StructuralError("cannot fingerprint a (numerically) zero state")
    lead = amps[big[0]]
    rotated = amps * (abs(lead) / lead)
    cells = np.rint(np.stack([rotated.real, rotated.imag]) / grid).astype(np.int64)
    return state.num_qubits, cells.tobytes()
