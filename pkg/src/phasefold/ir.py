"""Intermediate representation for nondeterministic quantum while-programs."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterator, Union

from .polyring import Angle

# gate kind -> arity; "rz" carries an angle, "uninterp" a name and any arity
ARITY = {
    "h": 1, "x": 1, "y": 1, "z": 1, "s": 1, "sdg": 1, "t": 1, "tdg": 1, "rz": 1,
    "cnot": 2, "cz": 2, "swap": 2, "ccz": 3, "tof": 3,
}

PHASE_ANGLES = {
    "z": Angle(Fraction(1)),
    "s": Angle(Fraction(1, 2)),
    "sdg": Angle(Fraction(3, 2)),
    "t": Angle(Fraction(1, 4)),
    "tdg": Angle(Fraction(7, 4)),
}

NAMED_PHASES = {a.dyadic: k for k, a in PHASE_ANGLES.items()}


@dataclass(frozen=True)
class GateApp:
    kind: str
    qubits: tuple[str, ...]
    angle: Angle | None = None
    name: str | None = None
    loc: int | None = None

    @property
    def is_phase(self) -> bool:
        """Single-qubit diagonal rotation, i.e. a candidate for merging."""
        return self.kind in PHASE_ANGLES or self.kind == "rz"

    def phase_angle(self) -> Angle:
        if self.kind == "rz":
            return self.angle
        return PHASE_ANGLES[self.kind]

    def __str__(self) -> str:
        base = self.name if self.kind == "uninterp" else self.kind
        if self.kind == "rz":
            base = f"rz({self.angle})"
        return f"{base} {', '.join(self.qubits)}"


def phase_gate(angle: Angle, qubit: str, loc: int | None = None) -> GateApp:
    """Named gate for a dyadic angle when one exists, otherwise ``rz``."""
    if angle.is_dyadic() and angle.dyadic in NAMED_PHASES:
        return GateApp(NAMED_PHASES[angle.dyadic], (qubit,), loc=loc)
    return GateApp("rz", (qubit,), angle=angle, loc=loc)


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Reset:
    qubit: str


@dataclass(frozen=True)
class Meas:
    qubit: str


@dataclass(frozen=True)
class Gate:
    app: GateApp


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Seq:
    stmts: tuple["Stmt", ...]


@dataclass(frozen=True)
class IfStar:
    then: "Stmt"
    orelse: "Stmt"


@dataclass(frozen=True)
class WhileStar:
    body: "Stmt"
    trip_count: int | None = None


Stmt = Union[Skip, Reset, Meas, Gate, Call, Seq, IfStar, WhileStar]


@dataclass(frozen=True)
class Procedure:
    params: tuple[str, ...]
    body: Stmt


@dataclass(frozen=True)
class Program:
    qubits: tuple[str, ...]
    body: Stmt
    procedures: dict[str, Procedure] = field(default_factory=dict)

    def __hash__(self) -> int:
        return hash((self.qubits, self.body, tuple(sorted(self.procedures.items()))))


def seq(*stmts: Stmt) -> Seq:
    flat: list[Stmt] = []
    for s in stmts:
        if isinstance(s, Seq):
            flat.extend(s.stmts)
        elif not isinstance(s, Skip):
            flat.append(s)
    return Seq(tuple(flat))


def gate(kind: str, *qubits: str, angle: Angle | None = None, name: str | None = None) -> Gate:
    return Gate(GateApp(kind, tuple(qubits), angle=angle, name=name))


# ---------------------------------------------------------------- traversal


def iter_gates(s: Stmt) -> Iterator[GateApp]:
    if isinstance(s, Gate):
        yield s.app
    elif isinstance(s, Seq):
        for t in s.stmts:
            yield from iter_gates(t)
    elif isinstance(s, IfStar):
        yield from iter_gates(s.then)
        yield from iter_gates(s.orelse)
    elif isinstance(s, WhileStar):
        yield from iter_gates(s.body)


def program_gates(p: Program) -> Iterator[GateApp]:
    yield from iter_gates(p.body)
    for name in sorted(p.procedures):
        yield from iter_gates(p.procedures[name].body)


def map_gates(s: Stmt, fn) -> Stmt:
    """Rebuild ``s`` with every gate statement replaced by ``fn(app)`` (a Stmt)."""
    if isinstance(s, Gate):
        return fn(s.app)
    if isinstance(s, Seq):
        return seq(*(map_gates(t, fn) for t in s.stmts))
    if isinstance(s, IfStar):
        return IfStar(map_gates(s.then, fn), map_gates(s.orelse, fn))
    if isinstance(s, WhileStar):
        return WhileStar(map_gates(s.body, fn), s.trip_count)
    return s


def map_program(p: Program, fn) -> Program:
    procs = {k: Procedure(v.params, map_gates(v.body, fn)) for k, v in p.procedures.items()}
    return Program(p.qubits, map_gates(p.body, fn), procs)


def assign_locations(p: Program) -> Program:
    """Give every gate a unique location id in program order (idempotent)."""
    gates = list(program_gates(p))
    ids = [g.loc for g in gates]
    if all(i is not None for i in ids) and len(set(ids)) == len(ids):
        return p
    counter = iter(range(len(gates)))
    return map_program(p, lambda app: Gate(replace(app, loc=next(counter))))


def locations(p: Program) -> dict[int, GateApp]:
    return {g.loc: g for g in program_gates(p)}


# ---------------------------------------------------------------- validation


def stmt_qubits(s: Stmt) -> Iterator[str]:
    """Qubits syntactically referenced by ``s`` (call arguments included), with repeats."""
    return _stmt_qubits(s)


def _stmt_qubits(s: Stmt) -> Iterator[str]:
    if isinstance(s, (Reset, Meas)):
        yield s.qubit
    elif isinstance(s, Gate):
        yield from s.app.qubits
    elif isinstance(s, Call):
        yield from s.args
    elif isinstance(s, Seq):
        for t in s.stmts:
            yield from _stmt_qubits(t)
    elif isinstance(s, IfStar):
        yield from _stmt_qubits(s.then)
        yield from _stmt_qubits(s.orelse)
    elif isinstance(s, WhileStar):
        yield from _stmt_qubits(s.body)


def _calls(s: Stmt) -> Iterator[Call]:
    if isinstance(s, Call):
        yield s
    elif isinstance(s, Seq):
        for t in s.stmts:
            yield from _calls(t)
    elif isinstance(s, IfStar):
        yield from _calls(s.then)
        yield from _calls(s.orelse)
    elif isinstance(s, WhileStar):
        yield from _calls(s.body)


def _gate_diagnostics(s: Stmt, scope: set[str], where: str) -> list[str]:
    out = []
    for g in iter_gates(s):
        want = ARITY.get(g.kind)
        if g.kind != "uninterp" and want is None:
            out.append(f"{where}: unknown gate kind {g.kind!r}")
        elif want is not None and len(g.qubits) != want:
            out.append(f"{where}: gate {g.kind} expects {want} qubit(s), got {len(g.qubits)}")
        if len(set(g.qubits)) != len(g.qubits):
            out.append(f"{where}: gate {g.kind} repeats a qubit operand")
        if g.kind == "rz" and g.angle is None:
            out.append(f"{where}: rz without an angle")
    for q in _stmt_qubits(s):
        if q not in scope:
            out.append(f"{where}: undeclared qubit {q!r}")
    return out


def validate(p: Program) -> list[str]:
    diags = _gate_diagnostics(p.body, set(p.qubits), "main")
    for name, proc in p.procedures.items():
        diags += _gate_diagnostics(proc.body, set(proc.params), name)
    for owner, body in [("main", p.body)] + [(k, v.body) for k, v in p.procedures.items()]:
        for c in _calls(body):
            proc = p.procedures.get(c.name)
            if proc is None:
                diags.append(f"{owner}: call to undefined procedure {c.name!r}")
            elif len(proc.params) != len(c.args):
                diags.append(f"{owner}: call to {c.name} passes {len(c.args)} argument(s), expects {len(proc.params)}")
            elif len(set(c.args)) != len(c.args):
                diags.append(f"{owner}: call to {c.name} aliases an argument")
    # recursion: depth-first search over the call graph
    graph = {k: {c.name for c in _calls(v.body)} for k, v in p.procedures.items()}
    state: dict[str, int] = {}

    def visit(u: str) -> bool:
        state[u] = 1
        for w in graph.get(u, ()):
            if w not in graph:
                continue
            if state.get(w) == 1 or (state.get(w) is None and visit(w)):
                return True
        state[u] = 2
        return False

    for name in sorted(graph):
        if state.get(name) is None and visit(name):
            diags.append(f"procedure {name}: recursive call cycle")
    return diags
