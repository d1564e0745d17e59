"""Seeded generators of small random programs and circuits for the property suites."""

from __future__ import annotations

import random

from phasefold import ir

ONE_QUBIT = ("h", "x", "z", "s", "sdg", "t", "tdg")
CLIFFORD_ONE = ("h", "x", "z", "s", "sdg")


def qubit_names(n: int) -> tuple[str, ...]:
    return tuple(f"q{i}" for i in range(n))


def random_gate(rng: random.Random, qubits, kinds=None) -> ir.Gate:
    n = len(qubits)
    kinds = kinds or ONE_QUBIT + ("cnot", "cz", "swap", "ccz", "tof")
    while True:
        kind = rng.choice(kinds)
        arity = ir.ARITY[kind]
        if arity <= n:
            return ir.gate(kind, *rng.sample(list(qubits), arity))


def random_circuit(rng: random.Random, n: int, length: int, kinds=None) -> list[ir.GateApp]:
    qs = qubit_names(n)
    return [random_gate(rng, qs, kinds).app for _ in range(length)]


def random_program(rng: random.Random, n: int | None = None, max_gates: int = 20, allow_loop: bool = True) -> ir.Program:
    """Up to ``max_gates`` gates, at most one loop, optional branch, resets and measurements."""
    n = n or rng.randint(1, 4)
    qs = qubit_names(n)
    budget = rng.randint(1, max_gates)
    loop_left = 1 if allow_loop else 0

    def block(depth: int) -> ir.Stmt:
        nonlocal budget, loop_left
        stmts: list[ir.Stmt] = []
        for _ in range(rng.randint(1, 6)):
            if budget <= 0:
                break
            roll = rng.random()
            if roll < 0.08 and depth < 2 and loop_left:
                loop_left -= 1
                stmts.append(ir.WhileStar(block(depth + 1)))
            elif roll < 0.14 and depth < 2:
                stmts.append(ir.IfStar(block(depth + 1), block(depth + 1)))
            elif roll < 0.18:
                stmts.append(ir.Reset(rng.choice(qs)))
            elif roll < 0.21:
                stmts.append(ir.Meas(rng.choice(qs)))
            else:
                budget -= 1
                stmts.append(random_gate(rng, qs))
        return ir.seq(*stmts)

    return ir.assign_locations(ir.Program(qs, block(0)))
