"""Blind random circuit generation and single-step circuit mutation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..circuit import ROTATIONS, SIGNATURES, STANDARD_GATES, Circuit, GateInstruction
from ..core import MAX_QUBITS

ANGLE_DISTRIBUTIONS = ("pi4", "uniform")


def _uniform_weights() -> dict[str, float]:
    return {g: 1.0 for g in STANDARD_GATES}


@dataclass(frozen=True)
class GeneratorConfig:
    min_qubits: int = 1
    max_qubits: int = 6
    min_depth: int = 1
    max_depth: int = 30
    gate_weights: Mapping[str, float] = field(default_factory=_uniform_weights)
    angle_distribution: str = "pi4"  # multiples of pi/4, or uniform on [0, 2pi)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gate_weights", dict(self.gate_weights))
        if not 1 <= self.min_qubits <= self.max_qubits <= MAX_QUBITS:
            raise ValueError(f"need 1 <= min_qubits <= max_qubits <= {MAX_QUBITS}")
        if not 0 <= self.min_depth <= self.max_depth:
            raise ValueError("need 0 <= min_depth <= max_depth")
        if self.angle_distribution not in ANGLE_DISTRIBUTIONS:
            raise ValueError(f"angle_distribution must be one of {ANGLE_DISTRIBUTIONS}")
        for g, w in self.gate_weights.items():
            if g not in SIGNATURES:
                raise ValueError(f"unknown gate {g!r} in gate_weights")
            if not (w >= 0 and math.isfinite(w)):
                raise ValueError(f"gate weight for {g!r} must be a finite non-negative number")
        if not any(w > 0 for w in self.gate_weights.values()):
            raise ValueError("at least one gate weight must be positive")
        if self.min_qubits == 1 and not any(w > 0 and SIGNATURES[g][0] == 1 for g, w in self.gate_weights.items()):
            raise ValueError("1-qubit circuits are possible but no 1-qubit gate has positive weight")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def draw_angle(config: GeneratorConfig, rng: np.random.Generator) -> float:
    if config.angle_distribution == "pi4":
        return int(rng.integers(0, 8)) * math.pi / 4
    return float(rng.uniform(0, 2 * math.pi))


def random_instruction(num_qubits: int, config: GeneratorConfig, rng: np.random.Generator) -> GateInstruction | None:
    names = [g for g, w in config.gate_weights.items() if w > 0 and SIGNATURES[g][0] <= num_qubits]
    if not names:
        return None
    w = np.array([config.gate_weights[g] for g in names], dtype=float)
    name = names[int(rng.choice(len(names), p=w / w.sum()))]
    arity, n_params = SIGNATURES[name]
    targets = tuple(int(t) for t in rng.choice(num_qubits, size=arity, replace=False))
    params = tuple(draw_angle(config, rng) for _ in range(n_params))
    return GateInstruction(name, targets, params)


def generate_circuit(config: GeneratorConfig, rng: np.random.Generator | None = None) -> Circuit:
    rng = rng if rng is not None else config.rng()
    n = int(rng.integers(config.min_qubits, config.max_qubits + 1))
    depth = int(rng.integers(config.min_depth, config.max_depth + 1))
    instructions = []
    for _ in range(depth):
        ins = random_instruction(n, config, rng)
        if ins is None:
            break
        instructions.append(ins)
    return Circuit(n, tuple(instructions))


MUTATIONS = ("insert", "delete", "swap", "perturb", "retarget")


def mutate_circuit(
    circuit: Circuit, rng: np.random.Generator, config: GeneratorConfig | None = None
) -> Circuit:
    config = config or GeneratorConfig()
    ins = list(circuit.instructions)
    op = MUTATIONS[int(rng.integers(len(MUTATIONS)))]
    if op == "delete" and not ins:
        op = "insert"
    if op == "swap" and len(ins) < 2:
        op = "insert"
    rotation_sites = [i for i, g in enumerate(ins) if g.name in ROTATIONS]
    if op == "perturb" and not rotation_sites:
        op = "insert"
    if op == "retarget" and not ins:
        op = "insert"

    if op == "insert":
        new = random_instruction(circuit.num_qubits, config, rng)
        if new is not None:
            ins.insert(int(rng.integers(len(ins) + 1)), new)
    elif op == "delete":
        del ins[int(rng.integers(len(ins)))]
    elif op == "swap":
        i, j = (int(x) for x in rng.choice(len(ins), size=2, replace=False))
        ins[i], ins[j] = ins[j], ins[i]
    elif op == "perturb":
        i = rotation_sites[int(rng.integers(len(rotation_sites)))]
        g = ins[i]
        ins[i] = GateInstruction(g.name, g.targets, (g.params[0] + float(rng.uniform(-0.1, 0.1)),))
    else:
        i = int(rng.integers(len(ins)))
        g = ins[i]
        targets = tuple(int(t) for t in rng.choice(circuit.num_qubits, size=len(g.targets), replace=False))
        ins[i] = GateInstruction(g.name, targets, g.params)
    return circuit.with_instructions(ins)
