"""Rewriting programs from merge reports, gate statistics and the optimizer driver."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field, replace

from . import analysis, ir
from .analysis import AnalysisConfig, MergeReport
from .ir import Gate, GateApp, Program, Skip

TOFFOLI_MODES = ("primitive", "hczh")
T_PER_TOFFOLI = 7


class StaleReportError(ValueError):
    """A merge report names locations that do not exist in the program."""


# ---------------------------------------------------------------- statistics


@dataclass(frozen=True)
class GateStats:
    total: int
    t: int
    h: int
    cnot: int
    toffoli: int
    ccz: int
    clifford_phase: int
    per_kind: dict[str, int]
    dynamic_t: int | None = None

    @property
    def t_total(self) -> int:
        """T-count with every Toffoli and CCZ costed at its standard 7-T decomposition."""
        return self.t + T_PER_TOFFOLI * (self.toffoli + self.ccz)

    def non_phase_counts(self) -> dict[str, int]:
        return {k: v for k, v in self.per_kind.items() if k not in _PHASE_KINDS}

    def to_json(self) -> dict:
        out = {
            "total": self.total, "t": self.t, "t_total": self.t_total, "h": self.h, "cnot": self.cnot,
            "toffoli": self.toffoli, "ccz": self.ccz, "clifford_phase": self.clifford_phase,
            "per_kind": dict(sorted(self.per_kind.items())),
        }
        if self.dynamic_t is not None:
            out["dynamic_t"] = self.dynamic_t
        return out


_PHASE_KINDS = {"z", "s", "sdg", "t", "tdg", "rz", "rz(t)"}


def _kind_key(g: GateApp) -> str:
    if g.kind == "uninterp":
        return f"uninterp:{g.name}"
    if g.kind == "rz" and g.angle.counts_as_t():
        return "rz(t)"
    return g.kind


def _stmt_counts(s: ir.Stmt, procs: dict[str, ir.Procedure], dynamic: bool, depth: int = 0) -> Counter:
    """Gate counts; with ``dynamic`` loops multiply by their trip count (1 when unknown) and calls inline."""
    c: Counter = Counter()
    if isinstance(s, Gate):
        c[_kind_key(s.app)] += 1
        if s.app.is_phase and s.app.phase_angle().counts_as_t():
            c["#t"] += 1
    elif isinstance(s, ir.Seq):
        for t in s.stmts:
            c.update(_stmt_counts(t, procs, dynamic, depth))
    elif isinstance(s, ir.IfStar):
        a = _stmt_counts(s.then, procs, dynamic, depth)
        b = _stmt_counts(s.orelse, procs, dynamic, depth)
        c.update(a if not dynamic else (a if a["#t"] >= b["#t"] else b))
        if not dynamic:
            c.update(b)
    elif isinstance(s, ir.WhileStar):
        body = _stmt_counts(s.body, procs, dynamic, depth)
        k = (s.trip_count or 1) if dynamic else 1
        for key, v in body.items():
            c[key] += k * v
    elif isinstance(s, ir.Call) and dynamic and depth < 64:
        c.update(_stmt_counts(procs[s.name].body, procs, dynamic, depth + 1))
    return c


def count(p: Program) -> GateStats:
    """Static gate counts: loop bodies and procedure bodies are counted once.

    When any loop carries a trip-count annotation, ``dynamic_t`` estimates
    the executed T-count (Toffolis included) by multiplying loop bodies by
    their trip counts, inlining calls and taking the costlier branch of
    each choice.
    """
    c: Counter = _stmt_counts(p.body, p.procedures, dynamic=False)
    for name in sorted(p.procedures):
        c.update(_stmt_counts(p.procedures[name].body, p.procedures, dynamic=False))
    t = c.pop("#t", 0)
    per_kind = {k: v for k, v in c.items() if v}
    dynamic_t = None
    if any(isinstance(s, ir.WhileStar) and s.trip_count for s in _loops(p)):
        d = _stmt_counts(p.body, p.procedures, dynamic=True)
        dynamic_t = d["#t"] + T_PER_TOFFOLI * (d["tof"] + d["ccz"])
    clifford = sum(v for k, v in per_kind.items() if k in ("z", "s", "sdg"))
    clifford += sum(1 for g in ir.program_gates(p) if g.kind == "rz" and g.angle.is_clifford())
    return GateStats(
        total=sum(per_kind.values()), t=t, h=per_kind.get("h", 0), cnot=per_kind.get("cnot", 0),
        toffoli=per_kind.get("tof", 0), ccz=per_kind.get("ccz", 0), clifford_phase=clifford,
        per_kind=per_kind, dynamic_t=dynamic_t,
    )


def _loops(p: Program):
    def walk(s):
        if isinstance(s, ir.WhileStar):
            yield s
            yield from walk(s.body)
        elif isinstance(s, ir.Seq):
            for t in s.stmts:
                yield from walk(t)
        elif isinstance(s, ir.IfStar):
            yield from walk(s.then)
            yield from walk(s.orelse)

    yield from walk(p.body)
    for proc in p.procedures.values():
        yield from walk(proc.body)


# ---------------------------------------------------------------- rewriting


def _ccz_network(a: str, b: str, c: str) -> list[ir.Stmt]:
    g = ir.gate
    return [
        g("t", a), g("t", b), g("t", c),
        g("cnot", a, b), g("tdg", b),
        g("cnot", a, c), g("tdg", c),
        g("cnot", b, c), g("tdg", c),
        g("cnot", a, c), g("t", c),
        g("cnot", b, c), g("cnot", a, b),
    ]


def expand_toffoli(p: Program) -> Program:
    """Replace every Toffoli and CCZ by its 7-T Clifford+T network; locations are reassigned."""

    def lower(app: GateApp) -> ir.Stmt:
        if app.kind == "ccz":
            return ir.seq(*_ccz_network(*app.qubits))
        if app.kind == "tof":
            a, b, c = app.qubits
            return ir.seq(ir.gate("h", c), *_ccz_network(a, b, c), ir.gate("h", c))
        return Gate(replace(app, loc=None))

    return ir.assign_locations(ir.map_program(p, lower))


def apply_merges(p: Program, report: MergeReport) -> Program:
    """Rewrite each partition to at most one gate at its earliest location."""
    p = ir.assign_locations(p)
    locs = ir.locations(p)
    by_loc = report.by_location()
    stale = sorted(set(by_loc) - set(locs))
    if stale:
        raise StaleReportError(f"report refers to unknown locations {stale}")
    for loc, part in by_loc.items():
        g = locs[loc]
        if not (g.is_phase or g.kind == "ccz"):
            raise StaleReportError(f"location {loc} holds {g.kind}, not a phase gate")

    def rewrite(app: GateApp) -> ir.Stmt:
        part = by_loc.get(app.loc)
        if part is None:
            return Gate(app)
        if app.loc != part.representative or part.emit is None:
            return Skip()
        if part.family == "ccz":
            return Gate(app)
        if part.emit == app.phase_angle() and app.kind != "rz":
            return Gate(app)
        return Gate(ir.phase_gate(part.emit, app.qubits[0], loc=app.loc))

    return ir.map_program(p, rewrite)


# ---------------------------------------------------------------- driver


@dataclass
class OptimizeResult:
    original: Program
    optimized: Program
    before: GateStats
    after: GateStats
    reports: list[MergeReport] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def report(self) -> MergeReport:
        return self.reports[-1]

    @property
    def invariants(self) -> list[analysis.Invariant]:
        return self.reports[0].invariants if self.reports else []

    @property
    def warnings(self) -> list[str]:
        out: list[str] = []
        for r in self.reports:
            out.extend(w for w in r.warnings if w not in out)
        return out

    @property
    def degraded(self) -> bool:
        return any(r.degraded for r in self.reports)


def optimize(p: Program, config: AnalysisConfig | None = None, toffoli: str = "hczh",
             max_rounds: int = 4) -> OptimizeResult:
    """Analyze and rewrite until the T-count stops decreasing.

    With ``toffoli="hczh"`` Toffoli and CCZ gates are first lowered to
    Clifford+T so that their internal phases can fold; with ``"primitive"``
    they stay as written.
    """
    if toffoli not in TOFFOLI_MODES:
        raise ValueError(f"unknown Toffoli handling {toffoli!r}")
    config = config or AnalysisConfig()
    start = time.perf_counter()
    original = ir.assign_locations(p)
    before = count(original)
    cur = expand_toffoli(original) if toffoli == "hczh" else original
    reports = []
    best = count(cur).t_total
    for _ in range(max_rounds):
        report = analysis.run(cur, config.mode, config)
        reports.append(report)
        nxt = ir.assign_locations(_strip(apply_merges(cur, report)))
        t = count(nxt).t_total
        improved = t < best
        cur = nxt
        best = min(best, t)
        if not improved:
            break
    result = OptimizeResult(original, cur, before, count(cur), reports)
    result.elapsed = time.perf_counter() - start
    return result


def _strip(p: Program) -> Program:
    return ir.map_program(p, lambda app: Gate(replace(app, loc=None)))
