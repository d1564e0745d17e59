"""Relational phase folding over nondeterministic while-programs.

The forward pass keeps, for each qubit, a Boolean polynomial giving its
classical value in terms of *pool variables*: the entry state, outputs of
Hadamard gates, havocked values and summary outputs.  A constraint store
(linear rows in ``aff`` mode, an ideal in ``quad``/``pol`` mode) records
relations known to hold on every path with nonzero amplitude.  Each phase
gate contributes a term keyed by its canonical condition; terms with equal
keys merge.

Branches, loops and procedure calls are analyzed from a fresh entry state,
abstracted to a two-vocabulary relation and applied through fresh outputs.
Terms inside a summarized body keep their internal merges but cannot merge
with outside terms, except that a term whose condition vanishes under the
calling context is dropped altogether.

Straight-line segments are additionally strengthened: their path sum is
rewritten and every interference constraint it exhibits joins the store.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import affine_domain as aff
from . import groebner as gb
from . import ir
from . import pathsum as ps
from . import poly_domain as pd
from .affine_domain import KsElement, Vocabulary
from .groebner import IdealBasis
from .polyring import GREVLEX, ONE, Angle, BoolPoly, VarPool

log = logging.getLogger(__name__)

MODES = ("aff", "quad", "pol")
DEGREE_CAPS: dict[str, int | None] = {"aff": 1, "quad": 2, "pol": None}
CCZ_ANGLE = Angle(Fraction(1))


@dataclass
class AnalysisConfig:
    mode: str = "pol"
    groebner_budget: int | None = gb.DEFAULT_PAIR_BUDGET
    rewrite_budget: int = ps.DEFAULT_STEP_BUDGET
    star_cap: int = pd.STAR_ITERATION_CAP
    strengthen: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")

    @property
    def polynomial(self) -> bool:
        return self.mode != "aff"


# ---------------------------------------------------------------- constraint stores


class LinearStore:
    """Affine constraints over pool variables in reduced echelon form.

    Variable ``v`` is bit ``v + 1`` of a row and bit 0 is the constant; each
    row is keyed by its highest variable, so later variables are rewritten in
    terms of earlier ones.
    """

    def __init__(self):
        self.rows: dict[int, int] = {}
        self.pivmask = 0
        self.bottom = False

    def copy(self) -> "LinearStore":
        out = LinearStore()
        out.rows = dict(self.rows)
        out.pivmask = self.pivmask
        out.bottom = self.bottom
        return out

    @staticmethod
    def encode(p: BoolPoly) -> int:
        r = 0
        for t in p.terms:
            r ^= 1 if t == ONE else 1 << t.bit_length()
        return r

    @staticmethod
    def decode(r: int) -> BoolPoly:
        terms = [ONE] if r & 1 else []
        r >>= 1
        v = 0
        while r:
            if r & 1:
                terms.append(1 << v)
            r >>= 1
            v += 1
        return BoolPoly(terms)

    def _reduce_bits(self, r: int) -> int:
        m = r & self.pivmask
        while m:
            r ^= self.rows[m.bit_length() - 1]
            m = r & self.pivmask
        return r

    def add(self, polys: Iterable[BoolPoly]) -> bool:
        changed = False
        for p in polys:
            if self.bottom:
                return changed
            if not p.is_linear():
                continue  # dropping a constraint only loses precision
            r = self._reduce_bits(self.encode(p))
            if r == 0:
                continue
            changed = True
            if r == 1:
                self.bottom = True
                continue
            pivot = r.bit_length() - 1
            bit = 1 << pivot
            for k, row in self.rows.items():
                if row & bit:
                    self.rows[k] = row ^ r
            self.rows[pivot] = r
            self.pivmask |= bit
        return changed

    def reduce(self, p: BoolPoly) -> BoolPoly:
        if self.bottom:
            return BoolPoly.zero()
        if not p.is_linear():
            return p
        return self.decode(self._reduce_bits(self.encode(p)))

    def constraints(self) -> list[BoolPoly]:
        if self.bottom:
            return [BoolPoly.one()]
        return [self.decode(r) for _, r in sorted(self.rows.items())]

    @property
    def degraded(self) -> bool:
        return False


class IdealStore:
    """Polynomial constraints as a Gröbner basis (or a degraded generating set)."""

    def __init__(self, budget: int | None = gb.DEFAULT_PAIR_BUDGET, degree_cap: int | None = None):
        self.basis = IdealBasis.top()
        self.budget = budget
        self.degree_cap = degree_cap

    def copy(self) -> "IdealStore":
        out = IdealStore(self.budget, self.degree_cap)
        out.basis = self.basis
        return out

    def add(self, polys: Iterable[BoolPoly]) -> bool:
        new = []
        for p in polys:
            q = self.basis.normal_form(p)
            if not q.is_zero() and q not in new:
                new.append(q)
        if not new:
            return False
        self.basis = gb.groebner_or_degraded(list(self.basis.gens) + new, GREVLEX, self.budget)
        if self.basis.degraded:
            log.warning("Gröbner budget exhausted; reducing conditions by plain division")
        return True

    def reduce(self, p: BoolPoly) -> BoolPoly:
        return self.basis.normal_form(p)

    def constraints(self) -> list[BoolPoly]:
        return list(self.basis.gens)

    @property
    def bottom(self) -> bool:
        return self.basis.is_unit

    @property
    def degraded(self) -> bool:
        return self.basis.degraded


# ---------------------------------------------------------------- phase terms


@dataclass
class Entry:
    loc: int
    angle: Angle
    sign: int  # +1, or -1 when the gate's own condition is the complement of the group's
    qubits: tuple[str, ...]


@dataclass
class Group:
    family: str  # "rz" for single-qubit rotations, "ccz" for doubly-controlled Z
    cond: BoolPoly | None
    entries: list[Entry]
    status: str = "open"  # open | sealed | candidate | null
    context: list[BoolPoly] = field(default_factory=list)

    def total(self) -> Angle:
        acc = Angle()
        for e in self.entries:
            acc = acc + (e.angle if e.sign > 0 else -e.angle)
        return acc


class TermTable:
    def __init__(self):
        self.open: dict[tuple[str, BoolPoly], Group] = {}
        self.done: list[Group] = []
        self.candidates: list[Group] = []

    def add(self, family: str, cond: BoolPoly, entries: list[Entry]) -> None:
        if cond.const_bit:
            for e in entries:
                e.sign = -e.sign
            cond = cond.without_const()
        key = (family, cond)
        g = self.open.get(key)
        if g is None:
            self.open[key] = Group(family, cond, list(entries))
        else:
            g.entries.extend(entries)

    def rekey(self, reduce: Callable[[BoolPoly], BoolPoly]) -> None:
        old, self.open = self.open, {}
        for g in old.values():
            self.add(g.family, reduce(g.cond), g.entries)

    def seal(self, g: Group) -> None:
        g.status, g.cond, g.context = "sealed", None, []
        self.done.append(g)

    def null(self, g: Group) -> None:
        g.status, g.cond, g.context = "null", BoolPoly.zero(), []
        self.done.append(g)


# ---------------------------------------------------------------- relations


@dataclass
class Relation:
    """A two-vocabulary relation: variable ``i`` is pre-state qubit ``i``, ``n + i`` its post-state."""

    n: int
    gens: list[BoolPoly]
    element: object
    qubits: tuple[str, ...] = ()

    def contains(self, p: BoolPoly) -> bool:
        if isinstance(self.element, KsElement):
            if self.element.is_bottom:
                return True
            return _ks_reduce(self.element, p).is_zero()
        return self.element.basis.contains(p)

    @property
    def is_bottom(self) -> bool:
        return self.element.is_bottom

    def render(self) -> str:
        if self.is_bottom:
            return "⊥"
        voc = Vocabulary(self.n, 0)
        names = list(self.qubits) or None
        return "⟨" + ", ".join(g.render(lambda v: pd.var_name(voc, v, names)) for g in self.gens) + "⟩"


def _ks_row(voc: Vocabulary, p: BoolPoly, col: Callable[[int], int]) -> int:
    r = 0
    for t in p.terms:
        r ^= 1 << (voc.const if t == ONE else col(t.bit_length() - 1))
    return r


def _ks_reduce(el: KsElement, p: BoolPoly) -> BoolPoly:
    voc = el.voc
    n = voc.n
    row = _ks_row(voc, p, lambda v: voc.pre(v) if v < n else voc.post(v - n))
    from . import f2linalg as la

    return _ks_polys(voc, [la.reduce_bits(el.matrix, row)])[0]


def _ks_polys(voc: Vocabulary, rows: Iterable[int]) -> list[BoolPoly]:
    n = voc.n
    out = []
    for r in rows:
        terms = []
        for c in range(voc.ncols):
            if not (r >> c) & 1:
                continue
            if c == voc.const:
                terms.append(ONE)
            elif c < n:
                terms.append(1 << (n + c))
            else:
                terms.append(1 << (c - n))
        out.append(BoolPoly(terms))
    return out


def _relation_of(element, qubits: Sequence[str]) -> Relation:
    if isinstance(element, KsElement):
        gens = [] if element.is_bottom else _ks_polys(element.voc, element.matrix.rows)
        if element.is_bottom:
            gens = [BoolPoly.one()]
        return Relation(element.voc.n, gens, element, tuple(qubits))
    return Relation(element.voc.n, list(element.basis.gens), element, tuple(qubits))


# ---------------------------------------------------------------- report


@dataclass(frozen=True)
class Partition:
    locations: tuple[int, ...]
    family: str
    condition: str | None  # None renders as ⊥
    total: Angle
    emit: Angle | None  # gate left at the earliest location; None removes every gate
    status: str

    @property
    def eliminable(self) -> bool:
        return self.emit is None

    @property
    def representative(self) -> int:
        return self.locations[0]


@dataclass
class Invariant:
    label: str
    relation: Relation

    @property
    def text(self) -> str:
        return self.relation.render()


@dataclass
class MergeReport:
    mode: str
    partitions: list[Partition]
    invariants: list[Invariant] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    degraded: bool = False
    elapsed: float = 0.0
    summary: Relation | None = None  # whole-program transition relation

    def by_location(self) -> dict[int, Partition]:
        return {loc: p for p in self.partitions for loc in p.locations}

    def merged_pairs(self) -> set[tuple[int, int]]:
        """Unordered location pairs placed in a common partition, plus (l, l) for removed gates."""
        out = set()
        for p in self.partitions:
            locs = p.locations
            for i, a in enumerate(locs):
                for b in locs[i + 1:]:
                    out.add((a, b))
            if p.eliminable:
                out.update((a, a) for a in locs)
        return out

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "partitions": [
                {
                    "locations": list(p.locations),
                    "family": p.family,
                    "condition": p.condition if p.condition is not None else "⊥",
                    "total_angle": str(p.total),
                    "emit": None if p.emit is None else str(p.emit),
                    "status": p.status,
                }
                for p in self.partitions
            ],
            "invariants": [{"label": i.label, "relation": i.text} for i in self.invariants],
            "warnings": list(self.warnings),
            "degraded": self.degraded,
        }


# ---------------------------------------------------------------- the engine


@dataclass
class _BodyResult:
    outputs: list[BoolPoly]
    constraints: list[BoolPoly]
    table: TermTable


class _Analyzer:
    def __init__(self, program: ir.Program, config: AnalysisConfig):
        self.program = program
        self.config = config
        self.pool = VarPool()
        self.invariants: list[Invariant] = []
        self.warnings: list[str] = []
        self.degraded = False

    # -- stores

    def new_store(self):
        if self.config.polynomial:
            return IdealStore(self.config.groebner_budget)
        return LinearStore()

    # -- relations

    def body_relation(self, entry: Sequence[int], body: _BodyResult, qubits: Sequence[str]) -> Relation:
        """∃Y. (X' = f ∧ C) restricted to the body's qubits."""
        n = len(entry)
        pre = {v: i for i, v in enumerate(entry)}
        support = 0
        for f in body.outputs:
            support |= f.support()
        for c in body.constraints:
            support |= c.support()
        inter = [v for v in _bits(support) if v not in pre]
        voc = Vocabulary(n, len(inter))
        if self.config.polynomial:
            rename = {v: pd.pre_var(voc, i) for v, i in pre.items()}
            rename.update({v: pd.inter_var(voc, j) for j, v in enumerate(inter)})
            gens = [BoolPoly.var(pd.post_var(voc, i)) + f.rename(rename) for i, f in enumerate(body.outputs)]
            gens += [c.rename(rename) for c in body.constraints]
            el = pd.project_inter(pd.TransitionIdeal.from_gens(voc, gens, self.config.groebner_budget))
            if el.basis.degraded:
                self.degraded = True
        else:
            col = {v: voc.pre(i) for v, i in pre.items()}
            col.update({v: voc.inter(j) for j, v in enumerate(inter)})
            rows = [_ks_row(voc, f, col.__getitem__) ^ (1 << voc.post(i)) for i, f in enumerate(body.outputs)]
            rows += [_ks_row(voc, c, col.__getitem__) for c in body.constraints if c.is_linear()]
            el = aff.project_inter(KsElement.from_rows(voc, rows))
        return _relation_of(el, qubits)

    def join(self, a: Relation, b: Relation) -> Relation:
        if isinstance(a.element, KsElement):
            return _relation_of(aff.join(a.element, b.element), a.qubits)
        return _relation_of(pd.join(a.element, b.element), a.qubits)

    def star(self, a: Relation) -> Relation:
        if isinstance(a.element, KsElement):
            return _relation_of(aff.star(a.element), a.qubits)
        el = pd.star(a.element, self.config.star_cap)
        if el.is_top and not a.element.is_top:
            self.warnings.append("loop closure hit its iteration cap; using ⊤")
        return _relation_of(el, a.qubits)

    # -- helpers

    def fresh(self, name: str) -> int:
        return self.pool.fresh(name)


def _bits(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


class _Block:
    """Forward state for one straight-line context (the main program or a body)."""

    def __init__(self, az: _Analyzer, qubits: Sequence[str], outputs: Sequence[BoolPoly], nested: bool):
        self.az = az
        self.config = az.config
        self.qubits = list(qubits)
        self.index = {q: i for i, q in enumerate(self.qubits)}
        self.outs = list(outputs)
        self.store = az.new_store()
        self.table = TermTable()
        self.segment: ps.PathSum | None = None
        self.nested = nested

    # -- constraint handling

    def meet(self, constraints: Iterable[BoolPoly]) -> None:
        if self.store.add(constraints):
            if self.store.degraded:
                self.az.degraded = True
            self.table.rekey(self.store.reduce)
            self.outs = [self.store.reduce(f) for f in self.outs]

    def close_segment(self) -> None:
        seg, self.segment = self.segment, None
        self.outs = list(self.outs)
        if seg is None or not seg.path_vars or not self.config.strengthen:
            return
        cap = DEGREE_CAPS[self.config.mode]
        _, found = ps.reduce(seg, cap, self.config.rewrite_budget)
        if cap is not None:
            found = [c for c in found if c.degree() <= cap]
        if found:
            self.meet(found)

    def open_segment(self) -> ps.PathSum:
        if self.segment is None:
            self.segment = ps.PathSum.from_outputs(self.outs, len(self.az.pool))
            self.segment.outputs = self.outs  # share: gate updates flow into the state
        return self.segment

    # -- phase terms

    def add_term(self, family: str, cond: BoolPoly, entry: Entry) -> None:
        self.table.add(family, self.store.reduce(cond), [entry])

    # -- statements

    def run(self, s: ir.Stmt) -> None:
        if isinstance(s, ir.Skip):
            return
        if isinstance(s, ir.Seq):
            for t in s.stmts:
                self.run(t)
        elif isinstance(s, ir.Gate):
            self.gate(s.app)
        elif isinstance(s, ir.Reset):
            self.close_segment()
            self.outs[self.index[s.qubit]] = BoolPoly.zero()
        elif isinstance(s, ir.Meas):
            self.close_segment()
        elif isinstance(s, (ir.IfStar, ir.WhileStar, ir.Call)):
            self.close_segment()
            self.summary(s)
        else:
            raise TypeError(f"unknown statement {s!r}")

    def havoc(self, q: str) -> None:
        self.outs[self.index[q]] = BoolPoly.var(self.az.fresh(f"{q}~"))

    def gate(self, app: ir.GateApp) -> None:
        kind = app.kind
        qs = [self.index[q] for q in app.qubits]
        if kind == "uninterp":
            self.close_segment()
            for q in app.qubits:
                self.havoc(q)
            return
        if kind == "tof" and not self.config.polynomial:
            self.close_segment()
            self.havoc(app.qubits[2])
            return
        if kind == "ccz" and not self.config.polynomial:
            self.table.done.append(Group("ccz", None, [Entry(app.loc, CCZ_ANGLE, 1, app.qubits)], "sealed"))
            self.open_segment().apply("ccz", qs)
            return
        seg = self.open_segment()
        if kind == "h":
            v = self.az.fresh(app.qubits[0] + "'")
            seg.apply("h", qs, var=v)
            return
        if app.is_phase:
            a = app.phase_angle()
            self.add_term("rz", self.outs[qs[0]], Entry(app.loc, a, 1, app.qubits))
            seg.apply("rz", qs, a)
            return
        if kind == "ccz":
            f = self.outs
            self.add_term("ccz", f[qs[0]] * f[qs[1]] * f[qs[2]], Entry(app.loc, CCZ_ANGLE, 1, app.qubits))
            seg.apply("ccz", qs)
            return
        seg.apply(kind, qs)

    # -- summaries

    def summary(self, s: ir.Stmt) -> None:
        az = self.az
        if isinstance(s, ir.Call):
            proc = az.program.procedures[s.name]
            params, args = list(proc.params), list(s.args)
            bodies = [proc.body]
        else:
            args = sorted(set(ir.stmt_qubits(s)), key=self.index.__getitem__)
            params = list(args)
            bodies = [s.then, s.orelse] if isinstance(s, ir.IfStar) else [s.body]
        if not args:
            return
        entry = [az.fresh(f"{a}₀") for a in args]
        results = []
        for body in bodies:
            sub = _Block(az, params, [BoolPoly.var(v) for v in entry], nested=True)
            sub.run(body)
            results.append(sub.finish())
        rels = [az.body_relation(entry, r, args) for r in results]
        if isinstance(s, ir.IfStar):
            rel = az.join(rels[0], rels[1])
        elif isinstance(s, ir.WhileStar):
            rel = az.star(rels[0])
            label = f"while@{min((g.loc for g in ir.iter_gates(s.body)), default=-1)}"
            az.invariants.append(Invariant(label, rel))
        else:
            rel = rels[0]
        pre = [self.outs[self.index[a]] for a in args]
        loop = isinstance(s, ir.WhileStar)
        # entry state of a generic iteration / branch, for null detection
        if loop:
            iter_vars = [az.fresh(f"{a}ᵢ") for a in args]
            bind = {v: BoolPoly.var(w) for v, w in zip(entry, iter_vars)}
            base_ctx = self.instantiate(rel, pre, [BoolPoly.var(w) for w in iter_vars])
        else:
            bind = {v: f for v, f in zip(entry, pre)}
            base_ctx = []
        self.apply_relation(args, pre, rel)
        for r in results:
            self.table.done.extend(r.table.done)
            if not r.table.candidates:
                continue
            ctx = base_ctx + [c.substitute_many(bind) for c in r.constraints]
            self.resolve_candidates(r.table.candidates, bind, ctx)

    def instantiate(self, rel: Relation, pre: Sequence[BoolPoly], post: Sequence[BoolPoly]) -> list[BoolPoly]:
        n = rel.n
        mapping = {i: pre[i] for i in range(n)}
        mapping.update({n + i: post[i] for i in range(n)})
        out = []
        for g in rel.gens:
            h = g.substitute_many(mapping)
            if not h.is_zero():
                out.append(h)
        return out

    def apply_relation(self, args: Sequence[str], pre: Sequence[BoolPoly], rel: Relation) -> None:
        n = rel.n
        post = []
        for i, a in enumerate(args):
            if rel.contains(BoolPoly.var(i) + BoolPoly.var(n + i)):
                post.append(pre[i])
            else:
                post.append(BoolPoly.var(self.az.fresh(a + "'")))
        for a, f in zip(args, post):
            self.outs[self.index[a]] = f
        self.meet(self.instantiate(rel, pre, post))

    def resolve_candidates(self, cands: list[Group], bind: dict[int, BoolPoly], ctx: list[BoolPoly]) -> None:
        local = self.store.copy()
        local.add(ctx)
        for g in cands:
            extra = [c.substitute_many(bind) for c in g.context]
            scope = local
            if extra:
                scope = local.copy()
                scope.add(extra)
            cond = scope.reduce(g.cond.substitute_many(bind))
            if cond.is_const():
                self.table.null(g)
            elif self.nested:
                g.cond = cond
                g.context = ctx + extra
                self.table.candidates.append(g)
            else:
                self.table.seal(g)

    def finish(self) -> _BodyResult:
        """Close the block; open terms become candidates (nested) or stay mergeable."""
        self.close_segment()
        table = TermTable()
        table.done = list(self.table.done)
        table.candidates = list(self.table.candidates)
        constraints = self.store.constraints()
        for g in self.table.open.values():
            if g.cond.is_zero():
                table.null(g)
            elif self.nested:
                g.status = "candidate"
                g.context = list(constraints)
                table.candidates.append(g)
            else:
                table.open[(g.family, g.cond)] = g
        self.table = table
        return _BodyResult(list(self.outs), constraints, table)


# ---------------------------------------------------------------- driver


def _emit_angle(g: Group, total: Angle) -> Angle | None:
    if total.is_zero() or (g.cond is not None and g.cond.is_zero()):
        return None
    first = min(g.entries, key=lambda e: e.loc)
    if g.family == "ccz":
        return CCZ_ANGLE if total.dyadic == 1 and not total.symbolic else None
    return total if first.sign > 0 else -total


def _partition(g: Group, render: Callable[[BoolPoly], str]) -> Partition:
    total = g.total()
    entries = sorted(g.entries, key=lambda e: e.loc)
    cond = None if g.cond is None else render(g.cond)
    status = {"candidate": "sealed", "open": "merged"}.get(g.status, g.status)
    if g.cond is not None and g.cond.is_zero():
        status = "null"
    return Partition(tuple(e.loc for e in entries), g.family, cond, total, _emit_angle(g, total), status)


def run(program: ir.Program, mode: str = "pol", config: AnalysisConfig | None = None) -> MergeReport:
    """Analyze ``program`` and partition its phase gates into mergeable groups.

    Toffoli gates are treated as primitive: exact in the polynomial modes and
    as havoc on the target in affine mode.  CCZ gates form their own family.
    """
    start = time.perf_counter()
    if config is None:
        config = AnalysisConfig(mode=mode)
    program = ir.assign_locations(program)
    az = _Analyzer(program, config)
    entry = [az.pool.new(q) for q in program.qubits]
    block = _Block(az, program.qubits, [BoolPoly.var(v) for v in entry], nested=False)
    block.run(program.body)
    result = block.finish()
    groups = list(result.table.open.values()) + result.table.done + result.table.candidates
    render = lambda p: p.render(az.pool.name)  # noqa: E731
    parts = _consolidate([_partition(g, render) for g in groups], program)
    summary = az.body_relation(entry, result, program.qubits)
    degraded = az.degraded or block.store.degraded
    warnings = list(az.warnings)
    if degraded:
        warnings.append("Gröbner budget exhausted; some conditions were reduced non-canonically")
    report = MergeReport(config.mode, parts, az.invariants, warnings, degraded, summary=summary)
    report.elapsed = time.perf_counter() - start
    return report


def _consolidate(parts: list[Partition], program: ir.Program) -> list[Partition]:
    """Reconcile per-call-site partitions of procedure bodies and cover every phase gate.

    Call sites that agree on a partition but not on its removal keep the
    gates; any other disagreement falls back to singleton partitions.
    """
    chosen: dict[tuple[int, ...], Partition] = {}
    owner: dict[int, tuple[int, ...]] = {}
    conflict: set[int] = set()
    for p in parts:
        clash = {owner[loc] for loc in p.locations if loc in owner and owner[loc] != p.locations}
        if clash:
            conflict.update(p.locations)
            for key in clash:
                conflict.update(key)
            continue
        prev = chosen.get(p.locations)
        if prev is None or prev == p:
            chosen[p.locations] = p
        elif prev.status == "null" and p.status != "null":
            chosen[p.locations] = p
        elif p.status == "null" and prev.status != "null":
            pass
        elif prev.emit != p.emit:
            conflict.update(p.locations)
        for loc in p.locations:
            owner[loc] = p.locations
    out = {key: p for key, p in chosen.items() if not conflict.intersection(key)}
    covered = {loc for key in out for loc in key}
    for loc, g in ir.locations(program).items():
        if (g.is_phase or g.kind == "ccz") and loc not in covered:
            fam = "ccz" if g.kind == "ccz" else "rz"
            ang = CCZ_ANGLE if fam == "ccz" else g.phase_angle()
            out[(loc,)] = Partition((loc,), fam, None, ang, ang, "sealed")
    return sorted(out.values(), key=lambda p: p.locations)
