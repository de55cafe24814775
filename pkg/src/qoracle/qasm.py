"""OpenQASM 2.0 subset: one quantum register, library gates, constant angle expressions.

Everything else (classical registers, measure, gate definitions, if, barrier, reset)
is rejected with an :class:`UnsupportedFeatureError`.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .circuit import SIGNATURES, Circuit, GateInstruction
from .core import MAX_QUBITS, WidthViolationError


class QasmError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class QasmSyntaxError(QasmError):
    pass


class UnknownGateError(QasmError):
    pass


class UnsupportedFeatureError(QasmError):
    pass


class QasmWidthError(QasmError, WidthViolationError):
    """Register index outside the declared qreg; caught before any circuit exists."""


_UNSUPPORTED = {"creg", "measure", "gate", "opaque", "if", "barrier", "reset", "U", "CX"}

_TOKEN = re.compile(
    r"""
    (?P<comment>//[^\n]*)
  | (?P<ws>[ \t\r\n]+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<symbol>->|==|[;,()\[\]{}+\-*/])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise QasmSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("comment", "ws"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        newlines = m.group().count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.reg_name: str | None = None
        self.width = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg: str, tok: Token | None = None, cls=QasmSyntaxError):
        tok = tok or self.cur
        raise cls(msg, tok.line, tok.column)

    def advance(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if self.cur.text != text:
            found = self.cur.text or "end of input"
            self.fail(f"expected {text!r}, found {found!r}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.cur.kind != kind:
            self.fail(f"expected {what}, found {self.cur.text or 'end of input'!r}")
        return self.advance()

    def program(self) -> Circuit:
        if self.cur.text == "OPENQASM":
            self.advance()
            ver = self.expect_kind("number", "version number")
            if ver.text not in ("2.0", "2"):
                self.fail(f"only OPENQASM 2.0 is supported, got {ver.text}", ver, UnsupportedFeatureError)
            self.expect(";")
        instructions = []
        while self.cur.kind != "eof":
            tok = self.cur
            if tok.kind != "ident":
                self.fail(f"expected a statement, found {tok.text!r}")
            if tok.text == "OPENQASM":
                self.fail("OPENQASM header must come first")
            elif tok.text == "include":
                self.advance()
                self.expect_kind("string", "quoted file name")
                self.expect(";")
            elif tok.text == "qreg":
                self.qreg()
            elif tok.text in _UNSUPPORTED:
                self.fail(f"{tok.text!r} is not supported by this QASM subset", tok, UnsupportedFeatureError)
            else:
                instructions.append(self.gate_statement())
        if self.reg_name is None:
            tok = self.cur
            self.fail("no qreg declared", tok)
        return Circuit(self.width, tuple(instructions))

    def qreg(self):
        tok = self.advance()
        if self.reg_name is not None:
            self.fail("only one qreg is supported", tok, UnsupportedFeatureError)
        name = self.expect_kind("ident", "register name")
        self.expect("[")
        size_tok = self.expect_kind("number", "register size")
        if not size_tok.text.isdigit():
            self.fail("register size must be an integer", size_tok)
        size = int(size_tok.text)
        if not 1 <= size <= MAX_QUBITS:
            self.fail(f"register size must be in [1, {MAX_QUBITS}], got {size}", size_tok, UnsupportedFeatureError)
        self.expect("]")
        self.expect(";")
        self.reg_name, self.width = name.text, size

    def gate_statement(self) -> GateInstruction:
        name_tok = self.advance()
        name = name_tok.text
        if name not in SIGNATURES:
            self.fail(f"unknown gate {name!r}", name_tok, UnknownGateError)
        if self.reg_name is None:
            self.fail("gate used before qreg declaration", name_tok)
        nq, na = SIGNATURES[name]
        params = []
        if self.cur.text == "(":
            self.advance()
            if self.cur.text != ")":
                params.append(self.expr())
                while self.cur.text == ",":
                    self.advance()
                    params.append(self.expr())
            self.expect(")")
        if len(params) != na:
            self.fail(f"gate {name!r} takes {na} parameter(s), got {len(params)}", name_tok)
        targets = [self.qubit_ref()]
        while self.cur.text == ",":
            self.advance()
            targets.append(self.qubit_ref())
        if len(targets) != nq:
            self.fail(f"gate {name!r} acts on {nq} qubit(s), got {len(targets)}", name_tok)
        if len(set(targets)) != nq:
            self.fail(f"gate {name!r} repeats a qubit argument", name_tok)
        self.expect(";")
        return GateInstruction(name, tuple(targets), tuple(params))

    def qubit_ref(self) -> int:
        reg = self.expect_kind("ident", "qubit reference")
        if reg.text != self.reg_name:
            self.fail(f"unknown register {reg.text!r}", reg)
        if self.cur.text != "[":
            self.fail("whole-register gate arguments are not supported", reg, UnsupportedFeatureError)
        self.advance()
        idx_tok = self.expect_kind("number", "qubit index")
        if not idx_tok.text.isdigit():
            self.fail("qubit index must be an integer", idx_tok)
        idx = int(idx_tok.text)
        if idx >= self.width:
            self.fail(
                f"qubit index {idx} out of range for qreg {self.reg_name}[{self.width}] (static width violation)",
                idx_tok,
                QasmWidthError,
            )
        self.expect("]")
        return idx

    # angle expressions: + - * / unary minus, parentheses, pi, numeric literals
    def expr(self) -> float:
        value = self.term()
        while self.cur.text in ("+", "-"):
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> float:
        value = self.unary()
        while self.cur.text in ("*", "/"):
            op = self.advance()
            rhs = self.unary()
            if op.text == "*":
                value *= rhs
            elif rhs == 0:
                self.fail("division by zero in angle expression", op)
            else:
                value /= rhs
        return value

    def unary(self) -> float:
        if self.cur.text == "-":
            self.advance()
            return -self.unary()
        if self.cur.text == "+":
            self.advance()
            return self.unary()
        return self.primary()

    def primary(self) -> float:
        tok = self.cur
        if tok.kind == "number":
            self.advance()
            return float(tok.text)
        if tok.text == "pi":
            self.advance()
            return math.pi
        if tok.text == "(":
            self.advance()
            value = self.expr()
            self.expect(")")
            return value
        self.fail(f"expected an angle expression, found {tok.text or 'end of input'!r}")


def parse_qasm(text: str) -> Circuit:
    return _Parser(text).program()


def emit_qasm(circuit: Circuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{circuit.num_qubits}];"]
    for ins in circuit.instructions:
        args = ",".join(f"q[{t}]" for t in ins.targets)
        if ins.params:
            angles = ",".join(format(p, ".17g") for p in ins.params)
            lines.append(f"{ins.name}({angles}) {args};")
        else:
            lines.append(f"{ins.name} {args};")
    return "\n".join(lines) + "\n"


def load_qasm(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse_qasm(fh.read())
