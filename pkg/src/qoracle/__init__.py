"""Statevector simulator instrumented with implicit oracles, plus a fuzzing harness."""

__version__ = "0.1.0"
