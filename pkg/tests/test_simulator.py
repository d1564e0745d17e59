import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasefold import frontend, ir, simulator
from phasefold.ir import GateApp
from phasefold.polyring import Angle

import randprog
from oracles import reference_unitary

KINDS = ("h", "x", "y", "z", "s", "sdg", "t", "tdg", "cnot", "cz", "swap", "ccz", "tof")


def as_indices(gates):
    return [(g.kind, [int(q[1:]) for q in g.qubits]) for g in gates]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_exact_simulation_matches_reference(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    gates = randprog.random_circuit(rng, n, rng.randint(0, 20), KINDS)
    u = simulator.unitary_of(gates, randprog.qubit_names(n))
    assert u.exact
    assert np.allclose(u.to_complex(), reference_unitary(as_indices(gates), n), atol=1e-9)
    assert simulator.is_unitary(u)


def test_rz_with_dyadic_and_generic_angles():
    for a in (Fraction(1, 4), Fraction(1, 8), Fraction(5, 3)):
        g = GateApp("rz", ("q0",), angle=Angle(a))
        u = simulator.unitary_of([g], 1)
        ref = reference_unitary([("rz", [0], a)], 1)
        assert np.allclose(u.to_complex(), ref)
    assert simulator.unitary_of([GateApp("rz", ("q0",), angle=Angle(Fraction(1, 8)))], 1).exact is False


def test_symbolic_angles_need_values():
    g = GateApp("rz", ("q0",), angle=Angle.atom("theta"))
    u = simulator.unitary_of([g], 1, symbols={"theta": 0.5})  # multiples of pi
    assert np.allclose(u.to_complex(), np.diag([1, 1j]))


def test_equivalence_up_to_global_phase():
    a = simulator.unitary_of([GateApp("z", ("q0",)), GateApp("x", ("q0",))], 1)
    b = simulator.unitary_of([GateApp("x", ("q0",)), GateApp("z", ("q0",))], 1)
    assert simulator.equiv_up_to_phase(a, b)  # XZ = -ZX
    c = simulator.unitary_of([GateApp("x", ("q0",))], 1)
    assert not simulator.equiv_up_to_phase(a, c)


def test_hh_is_identity_exactly():
    u = simulator.unitary_of([GateApp("h", ("q0",)), GateApp("h", ("q0",))], 1)
    assert u.exp == 0
    assert simulator.transitions(u) == {(0, 0), (1, 1)}
    assert simulator.support(u, 1) == {1}


def test_size_limits():
    with pytest.raises(simulator.SimulationError):
        simulator.DenseOp.identity(simulator.MAX_QUBITS + 1)
    p = ir.Program(tuple(f"q{i}" for i in range(9)), ir.seq())
    with pytest.raises(simulator.SimulationError):
        simulator.enumerate_paths(p, max_qubits=8)
    with pytest.raises(simulator.SimulationError):
        simulator.enumerate_paths(ir.Program(("a",), ir.seq()), unroll=4)


def test_path_enumeration_counts():
    src = "OPENQASM 3;\nqubit a;\nqubit b;\nif (c) { h a; } else { x a; }\nwhile (c) { reset b; }\nmeasure a;\n"
    p = frontend.parse_text(src, "qasm")
    paths = simulator.enumerate_paths(p, unroll=2)
    # 2 branches x (1 + 2 + 4 loop paths) x 2 measurement outcomes
    assert len(paths) == 2 * 7 * 2
    labels = {simulator.path_label(steps) for steps, _ in paths}
    assert "P0(a)" in labels


def test_reset_paths_sum_to_reset_channel():
    p = frontend.parse_text("OPENQASM 3;\nqubit a;\nreset a;\n", "qasm")
    ops = [op.to_complex() for _, op in simulator.enumerate_paths(p)]
    assert len(ops) == 2
    assert np.allclose(sum(o.conj().T @ o for o in ops), np.eye(2))


def test_compare_programs_detects_a_dropped_gate():
    a = frontend.parse_text("OPENQASM 3;\nqubit a;\nh a;\nt a;\nh a;\n", "qasm")
    b = frontend.parse_text("OPENQASM 3;\nqubit a;\nh a;\nh a;\n", "qasm")
    assert simulator.compare_programs(a, a) is None
    diff = simulator.compare_programs(a, b)
    assert diff is not None and diff[0] == "(no projections)"


def test_procedures_are_inlined():
    src = "OPENQASM 3;\nqubit a;\nqubit b;\ndef f(qubit r) { x r; }\nf(b);\n"
    p = frontend.parse_text(src, "qasm")
    [(steps, op)] = simulator.enumerate_paths(p)
    assert simulator.transitions(op) == {(x, x ^ 2) for x in range(4)}


def test_uninterpreted_gate_is_a_fixed_unitary():
    g = GateApp("uninterp", ("q0", "q1"), name="mystery")
    u1 = simulator.unitary_of([g], 2)
    u2 = simulator.unitary_of([g], 2)
    assert simulator.is_unitary(u1)
    assert np.allclose(u1.to_complex(), u2.to_complex())
