import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qoracle.circuit import Circuit, GateInstruction, inverse, make, structurally_equal
from qoracle.core import StructuralError, WidthViolationError
from qoracle.fuzzer.generator import GeneratorConfig, generate_circuit
from qoracle.qasm import (
    QasmSyntaxError,
    QasmWidthError,
    UnknownGateError,
    UnsupportedFeatureError,
    emit_qasm,
    parse_qasm,
)


# --- IR ------------------------------------------------------------------------

def test_instruction_validation():
    with pytest.raises(StructuralError):
        GateInstruction("cx", (0, 0))
    with pytest.raises(StructuralError):
        GateInstruction("rx", (0,))
    with pytest.raises(StructuralError):
        GateInstruction("h", (0,), (0.1,))
    with pytest.raises(StructuralError):
        GateInstruction("ccx", (0, 1, 2))


def test_circuit_rejects_out_of_range_target():
    with pytest.raises(WidthViolationError):
        make(2, ("h", 2))


def test_inverse_examples():
    assert structurally_equal(inverse(make(1, ("h", 0))), make(1, ("h", 0)))
    c = make(2, ("h", 0), ("cx", 0, 1))
    assert structurally_equal(inverse(c), make(2, ("cx", 0, 1), ("h", 0)))
    c = make(2, ("rz", 0.3, 0), ("t", 1))
    assert structurally_equal(inverse(c), make(2, ("tdg", 1), ("rz", -0.3, 0)))
    assert structurally_equal(inverse(make(1, ("s", 0), ("sdg", 0))), make(1, ("s", 0), ("sdg", 0)))


@given(st.integers(0, 2**32 - 1))
def test_inverse_is_involution_and_preserves_shape(seed):
    c = generate_circuit(GeneratorConfig(max_qubits=5, max_depth=25, angle_distribution="uniform"),
                         np.random.default_rng(seed))
    inv = inverse(c)
    assert inv.num_qubits == c.num_qubits and len(inv) == len(c)
    assert structurally_equal(inverse(inv), c)


def test_structural_equality_tolerance():
    a = make(1, ("rx", 0.5, 0))
    assert structurally_equal(a, make(1, ("rx", 0.5 + 1e-13, 0)))
    assert not structurally_equal(a, make(1, ("rx", 0.5 + 1e-9, 0)))
    assert not structurally_equal(a, make(2, ("rx", 0.5, 0)))


# --- parser ----------------------------------------------------------------------

def test_parse_bell():
    c = parse_qasm("OPENQASM 2.0; qreg q[2]; h q[0]; cx q[0],q[1];")
    assert structurally_equal(c, make(2, ("h", 0), ("cx", 0, 1)))


def test_parse_angle_expressions():
    c = parse_qasm("qreg q[1]; rz(pi/4) q[0]; rx(-pi) q[0]; ry(2*pi/3 - 0.5) q[0]; rz(1e-3) q[0]; rz(-(pi/2)) q[0];")
    angles = [g.params[0] for g in c]
    assert angles == pytest.approx([math.pi / 4, -math.pi, 2 * math.pi / 3 - 0.5, 1e-3, -math.pi / 2])


def test_parse_comments_and_include():
    text = """OPENQASM 2.0;
include "qelib1.inc";   // standard header
// a comment line
qreg q[3];
swap q[0], q[2];  // trailing
"""
    assert structurally_equal(parse_qasm(text), make(3, ("swap", 0, 2)))


def test_static_width_violation_has_position():
    with pytest.raises(QasmWidthError) as err:
        parse_qasm("qreg q[2];\nh q[5];")
    assert (err.value.line, err.value.column) == (2, 5)
    assert "width" in str(err.value) and "line 2" in str(err.value)
    assert isinstance(err.value, WidthViolationError)


@pytest.mark.parametrize(
    "text, exc",
    [
        ("qreg q[1]; foo q[0];", UnknownGateError),
        ("qreg q[1]; qreg r[1];", UnsupportedFeatureError),
        ("qreg q[1]; creg c[1];", UnsupportedFeatureError),
        ("qreg q[1]; measure q[0] -> c[0];", UnsupportedFeatureError),
        ("qreg q[2]; h q;", UnsupportedFeatureError),
        ("OPENQASM 3.0; qreg q[1];", UnsupportedFeatureError),
        ("qreg q[1]; h q[0]", QasmSyntaxError),
        ("qreg q[1]; h r[0];", QasmSyntaxError),
        ("qreg q[1]; rz q[0];", QasmSyntaxError),
        ("qreg q[2]; cx q[0],q[0];", QasmSyntaxError),
        ("qreg q[1]; rz(1/0) q[0];", QasmSyntaxError),
        ("h q[0];", QasmSyntaxError),
        ("qreg q[1]; h q[0]; $", QasmSyntaxError),
        ("", QasmSyntaxError),
    ],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc) as err:
        parse_qasm(text)
    assert err.value.line >= 1 and err.value.column >= 1


# --- emitter ---------------------------------------------------------------------

def test_emit_single_gate():
    text = emit_qasm(make(1, ("h", 0)))
    assert "qreg q[1];" in text and "h q[0];" in text


def test_emit_empty_circuit():
    c = Circuit(3)
    text = emit_qasm(c)
    assert text.splitlines()[-1] == "qreg q[3];"
    assert structurally_equal(parse_qasm(text), c)


def test_emit_uses_17_significant_digits():
    text = emit_qasm(make(1, ("rz", 0.1, 0)))
    assert "rz(0.10000000000000001) q[0];" in text


@given(st.integers(0, 2**32 - 1), st.sampled_from(["pi4", "uniform"]))
def test_roundtrip_generated(seed, angles):
    c = generate_circuit(GeneratorConfig(max_qubits=8, min_depth=0, max_depth=40, angle_distribution=angles),
                         np.random.default_rng(seed))
    assert structurally_equal(parse_qasm(emit_qasm(c)), c)


@given(st.floats(allow_nan=False, allow_infinity=False, width=64))
def test_roundtrip_exact_for_any_angle(theta):
    c = make(1, ("ry", theta, 0))
    assert parse_qasm(emit_qasm(c)).instructions[0].params[0] == theta
