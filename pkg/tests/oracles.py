"""Brute-force reference computations, independent of the package algorithms."""

from __future__ import annotations

import itertools


def parity(x: int) -> int:
    return bin(x).count("1") & 1


def affine_hull(points: set[int], nvars: int) -> set[int]:
    """Smallest affine subspace of GF(2)^nvars containing ``points``."""
    if not points:
        return set()
    pts = sorted(points)
    base = pts[0]
    span = {0}
    for p in pts[1:]:
        d = p ^ base
        if d not in span:
            span |= {s ^ d for s in span}
    return {base ^ s for s in span}


def affine_points(rows: list[int], const_col: int, nvars: int) -> set[int]:
    """Solutions of ``row · (v, 1) = 0`` by enumeration; rows carry the constant at ``const_col``."""
    mask = (1 << nvars) - 1
    out = set()
    for v in range(1 << nvars):
        if all(parity(r & mask & v) == (r >> const_col) & 1 for r in rows):
            out.add(v)
    return out


def compose_points(a: set[tuple[int, int]], b: set[tuple[int, int]]) -> set[tuple[int, int]]:
    return {(x, z) for x, y in a for y2, z in b if y == y2}


def star_points(a: set[tuple[int, int]], n: int) -> set[tuple[int, int]]:
    closure = {(x, x) for x in range(1 << n)}
    while True:
        nxt = closure | compose_points(closure, a)
        if nxt == closure:
            return closure
        closure = nxt


def anf_evaluate(monomials: set[int], x: int) -> int:
    return sum(1 for m in monomials if m & x == m) & 1


def random_point_set(rng, nvars: int, density: float = 0.4) -> set[int]:
    return {x for x in range(1 << nvars) if rng.random() < density}


def subsets(items):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


# ---------------------------------------------------------------- textbook matrices

def _np():
    import numpy as np

    return np


def gate_matrix(kind: str, angle=None):
    np = _np()
    w = np.exp(1j * np.pi / 4)
    one = {
        "h": np.array([[1, 1], [1, -1]]) / np.sqrt(2),
        "x": np.array([[0, 1], [1, 0]]),
        "y": np.array([[0, -1j], [1j, 0]]),
        "z": np.diag([1, -1]),
        "s": np.diag([1, 1j]),
        "sdg": np.diag([1, -1j]),
        "t": np.diag([1, w]),
        "tdg": np.diag([1, np.conj(w)]),
    }
    if kind in one:
        return one[kind].astype(complex)
    if kind == "rz":
        return np.diag([1, np.exp(1j * np.pi * float(angle))])
    raise KeyError(kind)


def reference_unitary(gates, n: int):
    """Dense unitary of ``(kind, qubit indices)`` pairs; qubit ``i`` is bit ``i`` of the basis index."""
    np = _np()
    dim = 1 << n
    u = np.eye(dim, dtype=complex)
    for kind, qs, *rest in gates:
        m = np.zeros((dim, dim), dtype=complex)
        for col in range(dim):
            bits = [(col >> q) & 1 for q in qs]
            if kind == "cnot":
                m[col ^ ((bits[0]) << qs[1]), col] = 1
            elif kind == "cz":
                m[col, col] = -1 if all(bits) else 1
            elif kind == "swap":
                out = col & ~((1 << qs[0]) | (1 << qs[1])) | (bits[0] << qs[1]) | (bits[1] << qs[0])
                m[out, col] = 1
            elif kind == "ccz":
                m[col, col] = -1 if all(bits) else 1
            elif kind == "tof":
                m[col ^ ((bits[0] & bits[1]) << qs[2]), col] = 1
            else:
                g = gate_matrix(kind, rest[0] if rest else None)
                q = qs[0]
                b = bits[0]
                for nb in (0, 1):
                    m[(col & ~(1 << q)) | (nb << q), col] = g[nb, b]
        u = m @ u
    return u


def equal_up_to_phase(a, b, tol: float = 1e-9) -> bool:
    np = _np()
    idx = np.argmax(np.abs(b))
    if abs(b.flat[idx]) < tol:
        return bool(np.all(np.abs(a) < tol))
    r = a.flat[idx] / b.flat[idx]
    return abs(abs(r) - 1) < 1e-7 and bool(np.allclose(a, r * b, atol=tol))


# ---------------------------------------------------------------- invariant text

def parse_relation_text(text: str, qubits):
    """Polynomials from ``"x' + x, y + x*y"``; pre-state ``q`` is var ``i``, ``q'`` is ``n + i``."""
    from phasefold.polyring import BoolPoly

    index = {q: i for i, q in enumerate(qubits)}
    n = len(qubits)
    polys = []
    for chunk in text.split(","):
        p = BoolPoly.zero()
        for term in chunk.split("+"):
            m = BoolPoly.one()
            for factor in term.strip().split("*"):
                factor = factor.strip()
                if factor == "1":
                    continue
                primed = factor.endswith("'") or factor.endswith("′")
                name = factor.rstrip("'′")
                m = m * BoolPoly.var(index[name] + (n if primed else 0))
            p = p + m
        polys.append(p)
    return polys
