"""Brute-force reference computations, kept independent of the package's kernels."""
from __future__ import annotations

import math
from itertools import product

import numpy as np


def full_operator(gate: np.ndarray, targets, num_qubits: int) -> np.ndarray:
    """Dense 2^n x 2^n operator by explicit bit bookkeeping (qubit 0 = most significant bit)."""
    dim = 1 << num_qubits
    k = len(targets)
    U = np.zeros((dim, dim), dtype=complex)

    def bit(index, q):
        return (index >> (num_qubits - 1 - q)) & 1

    for i in range(dim):
        for j in range(dim):
            if any(bit(i, q) != bit(j, q) for q in range(num_qubits) if q not in targets):
                continue
            row = sum(bit(j, t) << (k - 1 - a) for a, t in enumerate(targets))
            col = sum(bit(i, t) << (k - 1 - a) for a, t in enumerate(targets))
            U[j, i] = gate[row, col]
    return U


def pairwise_entropy(states, weights, threshold: float = 1 - 1e-6) -> float:
    """Entropy of class masses where two outputs share a class iff their normalized fidelity > threshold.

    Classes are the connected components of that relation (union-find over all pairs).
    """
    m = len(states)
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    vecs = []
    for s in states:
        v = np.asarray(s, dtype=complex)
        n = np.linalg.norm(v)
        vecs.append(None if n < 1e-6 else v / n)
    for a in range(m):
        for b in range(a + 1, m):
            va, vb = vecs[a], vecs[b]
            if va is None or vb is None:
                same = va is None and vb is None
            else:
                same = len(va) == len(vb) and abs(np.vdot(va, vb)) ** 2 > threshold
            if same:
                parent[find(a)] = find(b)
    mass = {}
    for i, w in enumerate(weights):
        r = find(i)
        mass[r] = mass.get(r, 0.0) + w
    return -sum(p * math.log2(p) for p in mass.values() if p > 0)


def plain_entropy(probabilities) -> float:
    return -sum(p * math.log2(p) for p in probabilities if p > 0)


def binomial_bounds(shots: int, p: float, sigmas: float) -> tuple[int, int]:
    mean = shots * p
    sd = math.sqrt(shots * p * (1 - p))
    return math.floor(mean - sigmas * sd), math.ceil(mean + sigmas * sd)


def all_bitstrings(n: int):
    return list(product((0, 1), repeat=n))
