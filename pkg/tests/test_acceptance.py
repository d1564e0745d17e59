"""End-to-end acceptance checks; each test prints a single PASS/FAIL verdict line."""

import json
import random
import time

import pytest

from phasefold import affine_domain as aff
from phasefold import analysis, frontend, ir, simulator, transform
from phasefold import f2linalg as la
from phasefold import groebner as gb
from phasefold import pathsum as ps
from phasefold import poly_domain as pd
from phasefold.affine_domain import KsElement, Vocabulary
from phasefold.analysis import AnalysisConfig
from phasefold.polyring import BoolPoly

import randprog
from oracles import parse_relation_text, reference_unitary
from test_affine_domain import random_element
from test_groebner import random_gens
from test_poly_domain import random_relation

MODES = ("aff", "quad", "pol")


@pytest.fixture
def verdict(capsys):
    def emit(number: int, title: str, failures: list[str]) -> None:
        status = "PASS" if not failures else "FAIL"
        detail = "" if not failures else " :: " + "; ".join(failures)
        with capsys.disabled():
            print(f"\n{status} criterion {number}: {title}{detail}")
        assert not failures, failures

    return emit


@pytest.fixture(scope="module")
def manifest(bench_dir):
    return json.loads((bench_dir / "manifest.json").read_text())


def fixture_paths(bench_dir):
    return sorted((bench_dir / "programs").iterdir()) + sorted((bench_dir / "circuits").iterdir())


def run_rows(bench_dir, section, entries, time_limit):
    failures = []
    for fname, entry in entries.items():
        if not entry["t_after"]:
            continue
        program = frontend.load(bench_dir / section / fname)
        for mode, want in entry["t_after"].items():
            start = time.perf_counter()
            res = transform.optimize(program, AnalysisConfig(mode=mode))
            elapsed = time.perf_counter() - start
            got = (res.before.t_total, res.after.t_total)
            if got != (entry["t_before"], want):
                failures.append(f"{entry['name']} {mode}: {got[0]}->{got[1]}, want {entry['t_before']}->{want}")
            if elapsed >= time_limit:
                failures.append(f"{entry['name']} {mode}: {elapsed:.1f}s")
            if section == "circuits":
                base = transform.count(transform.expand_toffoli(program)).non_phase_counts()
                if res.after.non_phase_counts() != base:
                    failures.append(f"{entry['name']} {mode}: non-diagonal gate counts changed")
            if "invariant" in entry and mode == "pol":
                inv = res.invariants
                want_rel = None
                if inv:
                    want_rel = gb.buchberger(parse_relation_text(entry["invariant"], inv[0].relation.qubits))
                if not inv or gb.buchberger(inv[0].relation.gens) != want_rel:
                    shown = inv[0].text if inv else "none"
                    failures.append(f"{entry['name']}: invariant {shown}, want ⟨{entry['invariant']}⟩")
    return failures


def test_criterion_1_micro_benchmarks(bench_dir, manifest, verdict):
    failures = run_rows(bench_dir, "programs", manifest["programs"], 5.0)
    verdict(1, "loop/branch micro-benchmarks, exact T-counts and invariants", failures)


def test_criterion_2_circuit_benchmarks(bench_dir, manifest, verdict):
    failures = run_rows(bench_dir, "circuits", manifest["circuits"], 60.0)
    verdict(2, "circuit benchmarks, exact T-counts, non-diagonal counts unchanged", failures)


def test_criterion_3_worked_examples(verdict):
    failures = []
    V = BoolPoly.var

    # constraint matrix of x'=x, y'=y with two intermediates both equal to x+y
    voc = Vocabulary(2, 2)
    rows = [voc.row(post=[0], pre=[0]), voc.row(post=[1], pre=[1]),
            voc.row(pre=[0, 1], inter=[0]), voc.row(pre=[0, 1], inter=[1])]
    el = KsElement.from_rows(voc, rows)
    want_rref = [[1, 0, 0, 1, 0, 1, 0], [0, 1, 0, 1, 0, 0, 0], [0, 0, 1, 1, 0, 1, 0], [0, 0, 0, 0, 1, 1, 0]]
    if el.matrix.to_lists() != want_rref:
        failures.append(f"rref {el.matrix.to_lists()}")
    r1 = aff.reduce(el, la.BitRow.from_list([0, 0, 0, 0, 1, 0, 0]))
    r2 = aff.reduce(el, la.BitRow.from_list([0, 0, 0, 0, 0, 1, 0]))
    if r1 != r2:
        failures.append("intermediates reduce differently")

    # loop closure of x0' = x0, x1' = x0 + x1
    body = pd.TransitionIdeal.from_gens(Vocabulary(2), [V(2) + V(0), V(3) + V(0) + V(1)])
    want_star = gb.buchberger([V(2) + V(0), V(3) + V(1) + V(0) * V(3) + V(0) * V(1)])
    if pd.star(body).basis != want_star:
        failures.append(f"closure {pd.star(body).render(['x0', 'x1'])}")

    # T; H; H; Tdg folds through the Hadamard pair
    p = frontend.parse_text("OPENQASM 3;\nqubit x;\nt x;\nh x;\nh x;\ntdg x;\n", "qasm")
    rep = analysis.run(p, "pol")
    parts = [(q.locations, q.condition, q.emit) for q in rep.partitions]
    if parts != [((0, 3), "x", None)]:
        failures.append(f"fold partitions {parts}")
    if gb.buchberger(rep.summary.gens) != gb.buchberger([V(0) + V(1)]):
        failures.append(f"fold relation {rep.summary.render()}")

    # three CCZ-conjugated constraints: x1..x4 are vars 0..3, y1..y6 are 4..9
    x = lambda i: V(i - 1)  # noqa: E731
    y = lambda j: V(3 + j)  # noqa: E731
    cons = [x(3) + x(1) * x(2) + y(2), y(2) + x(1) * x(2) + y(4), y(4) + x(1) * x(2) + y(6)]
    basis = gb.buchberger(cons)
    want = [x(3) + y(4), y(2) + y(6), x(3) + y(2) + x(1) * x(2),
            x(3) + y(2) + x(1) * x(3) + x(1) * y(2), x(3) + y(2) + x(2) * x(3) + x(2) * y(2)]
    if set(basis.gens) != set(want) or len(basis.gens) != 5:
        failures.append(f"basis {basis.render()}")
    src = ("OPENQASM 3;\nqubit x1; qubit x2; qubit x3; qubit x4;\n"
           "h x3; ccz x1, x2, x3; h x3; cx x3, x4;\nh x3; ccz x1, x2, x3; h x3; cx x3, x4;\n"
           "h x3; ccz x1, x2, x3; h x3;\n")
    p = frontend.parse_text(src, "qasm")
    first, _, last = sorted(loc for loc, g in ir.locations(p).items() if g.kind == "ccz")
    part = analysis.run(p, "pol").by_location()[first]
    if part.locations != (first, last) or part.emit is not None:
        failures.append(f"ccz partition {part.locations}")
    verdict(3, "worked examples reproduce exactly", failures)


def test_criterion_4_soundness(verdict):
    failures = []
    for seed in range(500):
        p = randprog.random_program(random.Random(seed))
        n = len(p.qubits)
        paths = simulator.enumerate_paths(p, unroll=3, max_qubits=4)
        for mode in ("aff", "pol"):
            rel = analysis.run(p, mode).summary
            for _, op in paths:
                bad = [t for t in simulator.transitions(op) if any(g.evaluate(t[0] | t[1] << n) for g in rel.gens)]
                if bad:
                    failures.append(f"seed {seed} {mode}: {bad[0]} outside {rel.render()}")
                    break
    verdict(4, "computed relations contain every path transition (500 programs)", failures)


def test_criterion_5_semantics_preserved(bench_dir, verdict):
    failures = []
    for path in fixture_paths(bench_dir):
        if path.suffix not in (".qasm", ".qc"):
            continue
        p = frontend.load(path)
        if len(p.qubits) > 8:
            continue
        for mode in MODES:
            res = transform.optimize(p, AnalysisConfig(mode=mode))
            diff = simulator.compare_programs(res.original, res.optimized, unroll=2, max_qubits=8)
            if diff is not None:
                failures.append(f"{path.name} {mode}: {diff[0]}")
    verdict(5, "optimized fixtures agree path by path up to global phase", failures)


def test_criterion_6_rewrite_soundness(verdict):
    failures = []
    kinds = ("h", "x", "z", "s", "sdg", "t", "tdg", "cnot", "cz", "swap", "ccz", "tof")
    for seed in range(200):
        rng = random.Random(seed)
        n = rng.randint(1, 5)
        gates = [(g.kind, [int(q[1:]) for q in g.qubits]) for g in randprog.random_circuit(rng, n, rng.randint(1, 14), kinds)]
        cur = ps.of_circuit(gates, n)
        want = ps.evaluate_dense(cur)
        if len(cur.path_vars) > 12:
            continue
        while True:
            step = ps.rewrite_step(cur)
            if step is None:
                break
            cur = step[0]
            if not (abs(ps.evaluate_dense(cur) - want) < 1e-9).all():
                failures.append(f"seed {seed}: rule {step[1]}")
                break
    cliff = ("h", "x", "z", "s", "sdg", "cnot", "cz", "swap")
    rng = random.Random(6)
    for trial in range(300):
        gates = [(g.kind, [int(q[1:]) for q in g.qubits]) for g in randprog.random_circuit(rng, 4, rng.randint(1, 40), cliff)]
        out, _ = ps.reduce(ps.of_circuit(gates, 4))
        if len(out.path_vars) > 4:
            failures.append(f"clifford trial {trial}: {len(out.path_vars)} path variables")
    verdict(6, "rewrites preserve dense semantics; Clifford reduction is complete", failures)


def test_criterion_7_algebra(verdict):
    failures = []
    rng = random.Random(7)
    for _ in range(150):
        voc = Vocabulary(rng.randint(1, 2))
        a, b, c = (random_element(rng, voc) for _ in range(3))
        m, j = aff.meet, aff.join
        laws = [m(a, b) == m(b, a), j(a, b) == j(b, a), m(a, m(b, c)) == m(m(a, b), c),
                j(a, j(b, c)) == j(j(a, b), c), m(a, j(a, b)) == a, j(a, m(a, b)) == a]
        if not all(laws):
            failures.append("affine lattice law")
            break
    for _ in range(40):
        n = rng.randint(1, 2)
        a, b, c = (random_relation(rng, n) for _ in range(3))
        m, j = pd.meet, pd.join
        laws = [m(a, b) == m(b, a), j(a, b) == j(b, a), m(a, m(b, c)) == m(m(a, b), c),
                j(a, j(b, c)) == j(j(a, b), c), m(a, j(a, b)) == a, j(a, m(a, b)) == a]
        if not all(laws):
            failures.append("ideal lattice law")
            break
    nv = 6
    for _ in range(150):
        a = gb.buchberger(random_gens(rng, nv))
        b = gb.buchberger(random_gens(rng, nv))
        va, vb = gb.variety(a.gens, nv), gb.variety(b.gens, nv)
        if gb.variety(gb.ideal_product(a, b).gens, nv) != va | vb:
            failures.append("V(IJ) != V(I) ∪ V(J)")
        if gb.variety(gb.ideal_sum(a, b).gens, nv) != va & vb:
            failures.append("V(I+J) != V(I) ∩ V(J)")
        if gb.vanishing_ideal(va, nv) != a:
            failures.append("I(V(I)) != I")
        shuffled = list(a.gens)[::-1]
        if gb.buchberger(shuffled) != a:
            failures.append("basis depends on generator order")
        f = random_gens(rng, nv, 1)[0]
        if a.normal_form(a.normal_form(f)) != a.normal_form(f):
            failures.append("normal form not idempotent")
        rows = [rng.getrandbits(7) for _ in range(rng.randint(0, 6))]
        mat = la.rref(la.F2Matrix(7, rows))
        rng.shuffle(rows)
        if la.rref(la.F2Matrix(7, mat.rows)) != mat or la.rref(la.F2Matrix(7, rows)) != mat:
            failures.append("rref not canonical")
        if failures:
            break
    verdict(7, "lattice laws, variety correspondences, canonical forms", failures)


def test_criterion_8_mode_dominance(bench_dir, verdict):
    failures = []
    for path in fixture_paths(bench_dir):
        if path.suffix not in (".qasm", ".qc"):
            continue
        p = transform.expand_toffoli(frontend.load(path))
        merged = {mode: analysis.run(p, mode).merged_pairs() for mode in MODES}
        if not merged["aff"] <= merged["quad"] <= merged["pol"]:
            failures.append(path.name)
    verdict(8, "merged locations grow from aff to quad to pol", failures)
