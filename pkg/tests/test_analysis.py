import random

import pytest

from phasefold import analysis, frontend, groebner as gb, simulator
from phasefold.analysis import AnalysisConfig
from phasefold.polyring import BoolPoly

import randprog
from oracles import parse_relation_text

GADGET = """OPENQASM 3;
include "stdgates.inc";
qubit x1; qubit x2; qubit x3; qubit x4;
h x3; ccz x1, x2, x3; h x3; cx x3, x4;
h x3; ccz x1, x2, x3; h x3; cx x3, x4;
h x3; ccz x1, x2, x3; h x3;
"""


def ccz_locations(p):
    return sorted(loc for loc, g in frontend.ir.locations(p).items() if g.kind == "ccz")


def test_phase_cancels_across_hadamard_pair():
    p = frontend.parse_text("OPENQASM 3;\nqubit x;\nt x;\nh x;\nh x;\ntdg x;\n", "qasm")
    for mode in ("aff", "quad", "pol"):
        rep = analysis.run(p, mode)
        [part] = rep.partitions
        assert part.locations == (0, 3)
        assert part.condition == "x"
        assert part.emit is None and part.status == "merged"
        assert rep.summary.gens == [BoolPoly.var(0) + BoolPoly.var(1)]


@pytest.mark.parametrize("mode,merged", [("aff", False), ("quad", True), ("pol", True)])
def test_ccz_gadget_merges_first_and_last(mode, merged):
    p = frontend.parse_text(GADGET, "qasm")
    first, middle, last = ccz_locations(p)
    rep = analysis.run(p, mode)
    by = rep.by_location()
    if merged:
        assert by[first].locations == (first, last)
        assert by[first].emit is None
        assert by[middle].locations == (middle,)
    else:
        assert all(by[loc].locations == (loc,) for loc in (first, middle, last))


def test_loop_invariant_of_repeat_until_success(bench_dir):
    p = frontend.load(bench_dir / "programs" / "rus.qasm")
    rep = analysis.run(p, "pol")
    [inv] = rep.invariants
    want = parse_relation_text("z' + z", inv.relation.qubits)
    assert gb.buchberger(inv.relation.gens) == gb.buchberger(want)


@pytest.mark.parametrize("mode", ["aff", "pol"])
def test_summary_relation_covers_every_path(mode):
    checked = 0
    for seed in range(120):
        p = randprog.random_program(random.Random(seed))
        rel = analysis.run(p, mode).summary
        n = len(p.qubits)
        for _, op in simulator.enumerate_paths(p, unroll=3, max_qubits=4):
            for x, xp in simulator.transitions(op):
                assert all(g.evaluate(x | xp << n) == 0 for g in rel.gens), (seed, rel.render())
                checked += 1
    assert checked > 0


def test_to_json_shape():
    p = frontend.parse_text("OPENQASM 3;\nqubit x;\nt x;\nh x;\nh x;\ntdg x;\ns x;\n", "qasm")
    rep = analysis.run(p, "pol")
    js = rep.to_json()
    assert js["mode"] == "pol"
    # s shares the condition x, so the three gates fold to a single S
    assert js["partitions"][0]["locations"] == [0, 3, 4]
    assert js["partitions"][0]["emit"] == str(rep.partitions[0].total)
    assert {"invariants", "warnings", "degraded"} <= set(js)


def test_merged_pairs_counts_removed_singletons():
    p = frontend.parse_text("OPENQASM 3;\nqubit x;\nt x;\nh x;\nh x;\ntdg x;\n", "qasm")
    assert analysis.run(p, "aff").merged_pairs() == {(0, 3), (0, 0), (3, 3)}


def test_unknown_mode_is_rejected():
    with pytest.raises(ValueError):
        AnalysisConfig(mode="cubic")


def test_starved_groebner_budget_degrades_but_stays_sound():
    p = frontend.parse_text(GADGET, "qasm")
    cfg = AnalysisConfig(mode="pol", groebner_budget=1)
    rep = analysis.run(p, "pol", cfg)
    assert rep.degraded and rep.warnings
    assert all(len(part.locations) == 1 and part.emit is not None for part in rep.partitions)
    n = len(p.qubits)
    for _, op in simulator.enumerate_paths(p, unroll=2):
        for x, xp in simulator.transitions(op):
            assert all(g.evaluate(x | xp << n) == 0 for g in rep.summary.gens)


def test_every_phase_gate_gets_a_partition(bench_dir):
    p = frontend.load(bench_dir / "programs" / "grover.qasm")
    rep = analysis.run(p, "aff")
    phase_locs = {loc for loc, g in frontend.ir.locations(p).items() if g.is_phase or g.kind == "ccz"}
    assert set(rep.by_location()) == phase_locs
