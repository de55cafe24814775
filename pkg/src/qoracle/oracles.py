"""Implicit oracles: probability validity, width conservation, reversibility, entropy conservation.

Oracles never raise on bad data; a malformed state or a crashing backend is a failing
verdict. Only contract misuse between arguments (e.g. mismatched widths) raises.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence, Union

import numpy as np

from .circuit import Circuit
from .core import (
    FINGERPRINT_GRID,
    ProbabilityDistribution,
    StateVector,
    StructuralError,
    canonical_fingerprint,
    measurement_distribution,
)
from .simulator import Backend, CorrectBackend, ExecutionError, ExecutionTrace, roundtrip_batch, run_batch, run_forward

TOLERANCE_CEILING = 1e-3


class OracleId(str, Enum):
    PROBABILITY = "PROBABILITY"
    WIDTH = "WIDTH"
    REVERSIBILITY = "REVERSIBILITY"
    ENTROPY = "ENTROPY"

    def __str__(self):
        return self.value


ALL_ORACLES = tuple(OracleId)


@dataclass(frozen=True)
class ToleranceConfig:
    epsilon_prob: float = 1e-9
    epsilon_sum: float = 1e-9
    epsilon_fidelity: float = 1e-9
    epsilon_entropy: float = 1e-6
    fingerprint_grid: float = FINGERPRINT_GRID
    allow_loose: bool = False

    def __post_init__(self):
        for name, value in self.values().items():
            if not value > 0:
                raise ValueError(f"{name} must be strictly positive, got {value}")
            if value > TOLERANCE_CEILING and not self.allow_loose:
                raise ValueError(
                    f"{name}={value} exceeds {TOLERANCE_CEILING}; pass allow_loose=True if that is intended"
                )

    def values(self) -> dict[str, float]:
        d = asdict(self)
        d.pop("allow_loose")
        return d


Location = Union[int, str]


@dataclass(frozen=True)
class OracleVerdict:
    oracle_id: OracleId
    passed: bool
    measured: dict = field(default_factory=dict)
    location: Location = "final"
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "oracle_id": self.oracle_id.value,
            "passed": self.passed,
            "measured": {k: _jsonable(v) for k, v in self.measured.items()},
            "location": self.location,
            "message": self.message,
        }


def _jsonable(v):
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    f = float(v)
    return f if math.isfinite(f) else str(f)


def _probabilities(dist) -> np.ndarray:
    if isinstance(dist, ProbabilityDistribution):
        return dist.probabilities
    return np.asarray(dist, dtype=np.float64)


# --- probability ------------------------------------------------------------

def check_probability(dist, tol: ToleranceConfig = ToleranceConfig(), location: Location = "final") -> OracleVerdict:
    p = _probabilities(dist)
    if p.size == 0:
        return OracleVerdict(OracleId.PROBABILITY, False, {"sum": 0.0}, location, "sum=0 (empty distribution)")
    lo, hi, total = float(np.min(p)), float(np.max(p)), float(np.sum(p))
    measured = {"min_prob": lo, "max_prob": hi, "sum": total}
    problems = []
    if not lo >= -tol.epsilon_prob:
        problems.append(f"min_prob={lo:.6g} is below 0 (tolerance {tol.epsilon_prob:g})")
    if not hi <= 1 + tol.epsilon_prob:
        problems.append(f"max_prob={hi:.6g} exceeds 1 (tolerance {tol.epsilon_prob:g})")
    if not abs(total - 1) <= tol.epsilon_sum:
        problems.append(f"sum={total:.6g} differs from 1 by more than {tol.epsilon_sum:g}")
    if problems:
        return OracleVerdict(OracleId.PROBABILITY, False, measured, location, "; ".join(problems))
    return OracleVerdict(OracleId.PROBABILITY, True, measured, location, f"valid distribution, sum={total:.12g}")


def check_trace_probability(trace: ExecutionTrace, tol: ToleranceConfig = ToleranceConfig()) -> OracleVerdict:
    """Probability check on every recorded state; reports the first offender."""
    for i, state in enumerate(trace.states[:-1]):
        v = check_probability(measurement_distribution(state), tol, trace.instruction_index(i))
        if not v.passed:
            return v
    final = trace.final_distribution
    if final is None:
        final = measurement_distribution(trace.final_state)
    loc = trace.instruction_index(len(trace.states) - 1) if trace.circuit.instructions else "final"
    v = check_probability(final, tol, loc)
    return v if not v.passed else replace(v, location="final")


# --- width ------------------------------------------------------------------

def check_width(trace: ExecutionTrace) -> OracleVerdict:
    expected = trace.circuit.num_qubits
    for i, state in enumerate(trace.states):
        width = state.num_qubits
        length = len(state.amplitudes)
        loc = trace.instruction_index(i)
        if width != expected:
            return OracleVerdict(
                OracleId.WIDTH, False, {"expected": expected, "actual": width}, loc,
                f"width changed: expected {expected} qubits, actual {width} at {loc}",
            )
        if length != 1 << width:
            return OracleVerdict(
                OracleId.WIDTH, False, {"expected": 1 << width, "actual": length}, loc,
                f"amplitude count {length} does not match 2^{width} at {loc}",
            )
    return OracleVerdict(
        OracleId.WIDTH, True, {"expected": expected, "actual": expected}, "final",
        f"width {expected} conserved over {len(trace.states)} recorded states",
    )


def width_verdict_from_error(err: ExecutionError, circuit: Circuit) -> OracleVerdict:
    if err.partial is not None:
        v = check_width(err.partial)
        if not v.passed:
            return v
    return OracleVerdict(
        OracleId.WIDTH, False, {"expected": circuit.num_qubits, "actual": float("nan")}, err.index,
        f"execution failed at instruction {err.index} ({err.cause}); actual width unavailable",
    )


# --- reversibility ----------------------------------------------------------

@dataclass(frozen=True)
class Granularity:
    kind: str = "whole"  # whole | per_gate | fragments
    fragments: int = 5

    def __post_init__(self):
        if self.kind not in ("whole", "per_gate", "fragments"):
            raise ValueError(f"unknown granularity {self.kind!r}")
        if self.kind == "fragments" and self.fragments < 1:
            raise ValueError("fragments must be >= 1")

    @classmethod
    def parse(cls, text: str, fragments: int = 5) -> Granularity:
        text = text.strip()
        if text.startswith("fragments(") and text.endswith(")"):
            return cls("fragments", int(text[len("fragments("):-1]))
        return cls(text, fragments)

    def units(self, depth: int, rng: np.random.Generator | None = None) -> list[tuple[int, int]]:
        if self.kind == "whole" or depth == 0:
            return [(0, depth)]
        if self.kind == "per_gate":
            return [(i, i + 1) for i in range(depth)]
        rng = rng if rng is not None else np.random.default_rng(0)
        units = []
        for _ in range(self.fragments):
            i, j = sorted(int(x) for x in rng.choice(depth + 1, size=2, replace=False))
            units.append((i, j))
        return units

    def __str__(self):
        return f"fragments({self.fragments})" if self.kind == "fragments" else self.kind


WHOLE = Granularity("whole")
PER_GATE = Granularity("per_gate")


def check_reversibility(
    circuit: Circuit,
    inputs: Sequence[StateVector],
    backend: Backend | None = None,
    tol: ToleranceConfig = ToleranceConfig(),
    granularity: Granularity | str = WHOLE,
    rng: np.random.Generator | None = None,
) -> OracleVerdict:
    """Round-trip each unit (whole circuit, each gate, or random fragments) on every input.

    A unit passes when ``|fidelity - 1| <= epsilon_fidelity``: fidelity is not
    renormalized, so a recovered state that grew in norm also fails.
    """
    if not inputs:
        raise ValueError("check_reversibility needs at least one input state")
    for s in inputs:
        if s.num_qubits != circuit.num_qubits:
            raise StructuralError(f"input has {s.num_qubits} qubits, circuit has {circuit.num_qubits}")
    backend = backend if backend is not None else CorrectBackend()
    if isinstance(granularity, str):
        granularity = Granularity.parse(granularity)
    units = granularity.units(len(circuit), rng)
    worst = (math.inf, units[0])
    for start, stop in units:
        loc = "final" if granularity.kind == "whole" else start
        try:
            fids = roundtrip_batch(circuit.slice(start, stop), inputs, backend)
        except ExecutionError as err:
            return OracleVerdict(
                OracleId.REVERSIBILITY, False,
                {"min_fidelity": float("nan"), "unit_start": start, "unit_stop": stop}, start,
                f"min_fidelity unavailable: round trip of [{start}, {stop}) crashed: {err}",
            )
        for f in fids:
            if not abs(f - 1) <= tol.epsilon_fidelity:
                return OracleVerdict(
                    OracleId.REVERSIBILITY, False,
                    {"min_fidelity": f, "unit_start": start, "unit_stop": stop}, loc,
                    f"min_fidelity={f:.12g} outside 1 +/- {tol.epsilon_fidelity:g} for unit [{start}, {stop})",
                )
            if f < worst[0]:
                worst = (f, (start, stop))
    f, (start, stop) = worst
    return OracleVerdict(
        OracleId.REVERSIBILITY, True,
        {"min_fidelity": f, "unit_start": start, "unit_stop": stop, "units": len(units)},
        "final" if granularity.kind == "whole" else start,
        f"{len(units)} unit(s) x {len(inputs)} input(s) reversible, min_fidelity={f:.15g} ({granularity})",
    )


# --- entropy ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Ensemble:
    members: tuple[tuple[StateVector, float], ...]
    post_measurement: bool = False

    def __post_init__(self):
        members = tuple((s, float(w)) for s, w in self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ValueError("ensemble must have at least one member")
        if any(not w > 0 for _, w in members):
            raise ValueError("ensemble weights must be positive")
        total = sum(w for _, w in members)
        if abs(total - 1) > 1e-9:
            raise ValueError(f"ensemble weights sum to {total}, not 1")
        if len({s.num_qubits for s, _ in members}) != 1:
            raise ValueError("ensemble members must share num_qubits")

    @property
    def num_qubits(self) -> int:
        return self.members[0][0].num_qubits

    @property
    def states(self) -> list[StateVector]:
        return [s for s, _ in self.members]

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.members])

    @classmethod
    def uniform(cls, states: Iterable[StateVector], post_measurement: bool = False) -> Ensemble:
        states = list(states)
        return cls(tuple((s, 1 / len(states)) for s in states), post_measurement)

    def with_mode(self, post_measurement: bool) -> Ensemble:
        return Ensemble(self.members, post_measurement)


MAX_DEFAULT_MEMBERS = 16


def default_ensemble(num_qubits: int, post_measurement: bool = False) -> Ensemble:
    """The lowest-index computational basis states, uniformly weighted."""
    count = min(1 << num_qubits, MAX_DEFAULT_MEMBERS)
    return Ensemble.uniform((StateVector.basis(num_qubits, i) for i in range(count)), post_measurement)


def shannon_entropy(probabilities) -> float:
    """``-sum p log2 p`` in bits; zero entries contribute nothing."""
    p = np.asarray(probabilities, dtype=np.float64)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def ensemble_entropy_in(ensemble: Ensemble) -> float:
    return shannon_entropy(ensemble.weights)


_NULL_CLASS = ("null",)


def _output_class(state: StateVector, grid: float):
    nrm = np.linalg.norm(state.amplitudes)
    if not nrm > grid:
        return _NULL_CLASS
    return canonical_fingerprint(StateVector(state.num_qubits, state.amplitudes / nrm), grid)


def ensemble_entropy_out(
    ensemble: Ensemble,
    circuit: Circuit,
    backend: Backend | None = None,
    tol: ToleranceConfig = ToleranceConfig(),
) -> float:
    """Entropy of the ensemble after ``circuit``.

    Quantum mode groups outputs that are the same state up to global phase (and scale;
    norm errors are the probability oracle's business). Post-measurement mode mixes the
    members' exact outcome distributions and takes the entropy over basis outcomes.
    """
    if ensemble.num_qubits != circuit.num_qubits:
        raise StructuralError(f"ensemble has {ensemble.num_qubits} qubits, circuit has {circuit.num_qubits}")
    backend = backend if backend is not None else CorrectBackend()
    outputs = run_batch(circuit, ensemble.states, backend)
    if ensemble.post_measurement:
        mixture: dict[int, float] = defaultdict(float)
        for (_, w), out in zip(ensemble.members, outputs):
            p = measurement_distribution(out).probabilities
            total = p.sum()
            if total > 0:
                for k in np.flatnonzero(p > 0):
                    mixture[int(k)] += w * p[k] / total
        return shannon_entropy(list(mixture.values()))
    masses: dict[object, float] = defaultdict(float)
    for (_, w), out in zip(ensemble.members, outputs):
        masses[_output_class(out, tol.fingerprint_grid)] += w
    return shannon_entropy(list(masses.values()))


def check_entropy(
    ensemble: Ensemble,
    circuit: Circuit,
    backend: Backend | None = None,
    tol: ToleranceConfig = ToleranceConfig(),
) -> OracleVerdict:
    h_in = ensemble_entropy_in(ensemble)
    mode = "post_measurement" if ensemble.post_measurement else "quantum"
    try:
        h_out = ensemble_entropy_out(ensemble, circuit, backend, tol)
    except ExecutionError as err:
        return OracleVerdict(
            OracleId.ENTROPY, False, {"entropy_in": h_in, "entropy_out": float("nan")}, "ensemble",
            f"entropy_out unavailable ({mode} mode): execution failed at {err}",
        )
    measured = {"entropy_in": h_in, "entropy_out": h_out, "delta": h_out - h_in}
    if ensemble.post_measurement:
        ok = h_out <= h_in + tol.epsilon_entropy
        rule = "must not increase"
    else:
        ok = abs(h_out - h_in) <= tol.epsilon_entropy
        rule = "must be conserved"
    summary = f"entropy_in={h_in:.9g} bits, entropy_out={h_out:.9g} bits ({mode} mode, {rule})"
    if ok:
        return OracleVerdict(OracleId.ENTROPY, True, measured, "ensemble", summary)
    return OracleVerdict(OracleId.ENTROPY, False, measured, "ensemble", "entropy_out violates rule: " + summary)


# --- one-shot evaluation ----------------------------------------------------

def probe_states(num_qubits: int, count: int, rng: np.random.Generator) -> list[StateVector]:
    return [StateVector.random(num_qubits, rng) for _ in range(count)]


def evaluate_circuit(
    circuit: Circuit,
    backend: Backend | None = None,
    tol: ToleranceConfig = ToleranceConfig(),
    oracles: Iterable[OracleId] = ALL_ORACLES,
    granularity: Granularity | str = WHOLE,
    probes: int = 8,
    seed: int = 0,
    ensemble: Ensemble | None = None,
) -> list[OracleVerdict]:
    """Run the enabled oracles on one circuit against one backend.

    Reversibility probes are ``probes`` random states drawn from ``seed``; the entropy
    oracle uses :func:`default_ensemble` in quantum mode unless ``ensemble`` is given.
    """
    backend = backend if backend is not None else CorrectBackend()
    oracles = [OracleId(o) for o in oracles]
    verdicts = []
    trace, crash = None, None
    if OracleId.PROBABILITY in oracles or OracleId.WIDTH in oracles:
        try:
            trace = run_forward(circuit, None, backend, trace_states=True)
        except ExecutionError as err:
            crash = err
    rng = np.random.default_rng(seed)
    for oracle in ALL_ORACLES:
        if oracle not in oracles:
            continue
        if oracle is OracleId.PROBABILITY:
            if crash is None:
                verdicts.append(check_trace_probability(trace, tol))
            else:
                verdicts.append(OracleVerdict(
                    OracleId.PROBABILITY, False, {"sum": float("nan")}, crash.index,
                    f"sum unavailable: execution failed at instruction {crash.index} ({crash.cause})",
                ))
        elif oracle is OracleId.WIDTH:
            verdicts.append(check_width(trace) if crash is None else width_verdict_from_error(crash, circuit))
        elif oracle is OracleId.REVERSIBILITY:
            inputs = probe_states(circuit.num_qubits, probes, rng)
            verdicts.append(check_reversibility(circuit, inputs, backend, tol, granularity, rng))
        elif oracle is OracleId.ENTROPY:
            ens = ensemble if ensemble is not None else default_ensemble(circuit.num_qubits)
            verdicts.append(check_entropy(ens, circuit, backend, tol))
    return verdicts
