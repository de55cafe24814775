"""Minimize failing circuits: delta debugging over instructions, then angle simplification."""
from __future__ import annotations

import math
from typing import Callable

from ..circuit import Circuit, GateInstruction

Predicate = Callable[[Circuit], bool]


class ShrinkError(ValueError):
    pass


def _ddmin(circuit: Circuit, fails: Predicate) -> list[GateInstruction]:
    items = list(circuit.instructions)
    if fails(circuit.with_instructions(())):
        return []
    n = 2
    while len(items) >= 2:
        size = math.ceil(len(items) / n)
        chunks = [items[i:i + size] for i in range(0, len(items), size)]
        for chunk in chunks:
            if fails(circuit.with_instructions(chunk)):
                items, n = chunk, 2
                break
        else:
            for i in range(len(chunks)):
                rest = [g for j, c in enumerate(chunks) if j != i for g in c]
                if fails(circuit.with_instructions(rest)):
                    items, n = rest, max(n - 1, 2)
                    break
            else:
                if n >= len(items):
                    break
                n = min(2 * n, len(items))
    return items


def _one_minimal(circuit: Circuit, items: list[GateInstruction], fails: Predicate) -> tuple[list, bool]:
    changed = False
    i = 0
    while i < len(items):
        trial = items[:i] + items[i + 1:]
        if fails(circuit.with_instructions(trial)):
            items, changed = trial, True
        else:
            i += 1
    return items, changed


def _simpler_angles(theta: float) -> list[float]:
    quarter = round(theta / (math.pi / 2)) * (math.pi / 2)
    out = [0.0]
    if abs(quarter - theta) > 1e-12 and quarter != 0.0:
        out.append(quarter)
    return [a for a in out if abs(a - theta) > 1e-12]


def _simplify_angles(circuit: Circuit, items: list[GateInstruction], fails: Predicate) -> tuple[list, bool]:
    changed = False
    for i, g in enumerate(items):
        if not g.params:
            continue
        for a in _simpler_angles(g.params[0]):
            candidate = items[:i] + [GateInstruction(g.name, g.targets, (a,))] + items[i + 1:]
            if fails(circuit.with_instructions(candidate)):
                items, changed = candidate, True
                break
    return items, changed


def shrink(circuit: Circuit, failing_predicate: Predicate) -> Circuit:
    """Smallest circuit found that still satisfies ``failing_predicate``.

    The result is 1-minimal: deleting any single instruction makes the predicate false.
    """
    if not failing_predicate(circuit):
        raise ShrinkError("predicate does not hold on the input circuit")
    items = _ddmin(circuit, failing_predicate)
    while True:
        items, removed = _one_minimal(circuit, items, failing_predicate)
        items, simplified = _simplify_angles(circuit, items, failing_predicate)
        if not (removed or simplified):
            break
    return circuit.with_instructions(items)
