"""Readers and writers for ``.qc`` circuits and a small openQASM 3 subset.

Lowering rules for QASM:

* classical declarations, assignments and expressions are dropped;
* ``if``/``while`` conditions become nondeterministic choice;
* ``for`` loops over a literal range are unrolled, other ``for`` loops become
  nondeterministic loops;
* user ``gate`` definitions are inlined, ``def`` subroutines stay as calls.

A ``// @trip N`` comment directly before a loop records an expected trip count.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import ir
from .ir import (Call, Gate, GateApp, IfStar, Meas, Procedure, Program, Reset, Seq, Skip, Stmt, WhileStar,
                 seq)
from .polyring import Angle


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0, path: str | None = None):
        where = f"{path or '<input>'}:{line}:{col}: " if line else ""
        super().__init__(where + message)
        self.line, self.col = line, col


class EmitError(Exception):
    pass


@dataclass(frozen=True)
class SourceFile:
    path: str
    format: str
    text: str

    @classmethod
    def load(cls, path: str | Path, fmt: str | None = None) -> "SourceFile":
        p = Path(path)
        return cls(str(p), fmt or detect_format(p), p.read_text(encoding="utf-8"))


def detect_format(path: str | Path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".qc":
        return "qc"
    if suffix in (".qasm", ".qasm3"):
        return "qasm"
    raise ValueError(f"cannot infer circuit format from extension {suffix!r}")


def parse(src: SourceFile) -> Program:
    text = src.text.replace("\r\n", "\n").replace("\r", "\n")
    if src.format == "qc":
        prog = parse_qc(text, src.path)
    elif src.format in ("qasm", "qasm3", "qasm3-subset"):
        prog = parse_qasm(text, src.path)
    else:
        raise ValueError(f"unknown format {src.format!r}")
    return ir.assign_locations(prog)


def parse_text(text: str, fmt: str, path: str | None = None) -> Program:
    return parse(SourceFile(path or f"<{fmt}>", fmt, text))


def load(path: str | Path, fmt: str | None = None) -> Program:
    return parse(SourceFile.load(path, fmt))


# ================================================================ .qc

_QC_GATES = {
    "h": "h", "x": "x", "y": "y", "z": "z", "s": "s", "p": "s", "s*": "sdg", "p*": "sdg",
    "t": "t", "t*": "tdg", "tof": "tof", "cnot": "cnot", "swap": "swap", "zd": "z",
}


def parse_qc(text: str, path: str | None = None) -> Program:
    qubits: list[str] = []
    body: list[Stmt] = []
    in_body = False
    for lineno, raw in enumerate(text.split("\n"), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        head = words[0]
        low = head.lower()
        if low == ".v":
            qubits = words[1:]
            continue
        if low.startswith("."):
            continue
        if low == "begin":
            in_body = True
            continue
        if low == "end":
            in_body = False
            continue
        if not in_body:
            raise ParseError(f"gate {head!r} outside BEGIN/END", lineno, 1, path)
        args = tuple(words[1:])
        for a in args:
            if a not in qubits:
                raise ParseError(f"undeclared qubit {a!r}", lineno, raw.find(a) + 1, path)
        kind = _QC_GATES.get(low)
        if kind is None:
            raise ParseError(f"unsupported gate {head!r}", lineno, 1, path)
        if kind in ("tof", "x") and len(args) == 2:
            kind = "cnot"
        elif kind == "x" and len(args) == 3:
            kind = "tof"
        elif kind in ("tof",) and len(args) == 1:
            kind = "x"
        elif kind == "z" and len(args) == 3:
            kind = "ccz"
        elif kind == "z" and len(args) == 2:
            kind = "cz"
        if ir.ARITY[kind] != len(args):
            raise ParseError(f"gate {head!r} with {len(args)} operand(s) is not supported", lineno, 1, path)
        body.append(Gate(GateApp(kind, args)))
    return Program(tuple(qubits), seq(*body))


_QC_NAMES = {"h": "H", "x": "X", "y": "Y", "z": "Z", "s": "S", "sdg": "S*", "t": "T", "tdg": "T*",
             "cnot": "cnot", "tof": "tof", "swap": "swap", "ccz": "Z", "cz": "Z"}


def _qc_phase_lines(angle: Angle, q: str) -> list[str]:
    if not angle.is_dyadic() or angle.dyadic.denominator > 4:
        raise EmitError("the .qc format cannot express arbitrary rotations")
    eighths = int(angle.dyadic * 4) % 8
    table = {0: [], 1: ["T"], 2: ["S"], 3: ["S", "T"], 4: ["Z"], 5: ["S*", "T*"], 6: ["S*"], 7: ["T*"]}
    return [f"{g} {q}" for g in table[eighths]]


def emit_qc(p: Program) -> str:
    lines = [".v " + " ".join(p.qubits), ".i " + " ".join(p.qubits), ".o " + " ".join(p.qubits), "", "BEGIN"]

    def walk(s: Stmt) -> None:
        if isinstance(s, Seq):
            for t in s.stmts:
                walk(t)
        elif isinstance(s, Skip):
            return
        elif isinstance(s, Gate):
            g = s.app
            if g.kind == "rz":
                lines.extend(_qc_phase_lines(g.angle, g.qubits[0]))
            elif g.kind in _QC_NAMES:
                lines.append(f"{_QC_NAMES[g.kind]} {' '.join(g.qubits)}")
            else:
                raise EmitError(f"the .qc format cannot express gate {g.kind}")
        else:
            raise EmitError(f"the .qc format cannot express {type(s).__name__} statements")

    if p.procedures:
        raise EmitError("the .qc format cannot express procedures")
    walk(p.body)
    lines.append("END")
    return "\n".join(lines) + "\n"


# ================================================================ QASM tokenizer

_TOKEN = re.compile(r"""
    (?P<ws>[ \t]+)
  | (?P<nl>\n)
  | (?P<trip>//[ \t]*@trip[ \t]+(?P<tripn>\d+)[^\n]*)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<num>\d+\.\d*(?:[eE][-+]?\d+)?|\d*\.\d+(?:[eE][-+]?\d+)?|\d+(?:[eE][-+]?\d+)?)
  | (?P<id>[A-Za-z_][A-Za-z_0-9]*|π)
  | (?P<str>"[^"\n]*")
  | (?P<op>->|==|!=|<=|>=|&&|\|\||\+\+|\+=|-=|\*\*|[-+*/%^(){}\[\],;:=<>!~&|@.])
""", re.VERBOSE | re.DOTALL)


@dataclass
class Tok:
    kind: str
    text: str
    line: int
    col: int
    trip: int | None = None


def tokenize(text: str, path: str | None = None) -> list[Tok]:
    toks: list[Tok] = []
    pos, line, line_start = 0, 1, 0
    pending_trip = None
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, path)
        kind = m.lastgroup
        if kind == "tripn":
            kind = "trip"
        col = pos - line_start + 1
        chunk = m.group(0)
        if kind == "trip":
            pending_trip = int(m.group("tripn"))
        elif kind not in ("ws", "nl", "comment"):
            toks.append(Tok(kind, chunk, line, col, pending_trip))
            pending_trip = None
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - line_start + 1))
    return toks


# ================================================================ QASM angle expressions


@dataclass
class _Lin:
    """Linear form: pi coefficient + numeric constant + symbolic atoms."""

    pi: Fraction = Fraction(0)
    num: Fraction = Fraction(0)
    atoms: dict | None = None

    def __post_init__(self):
        if self.atoms is None:
            self.atoms = {}

    def is_const(self) -> bool:
        return self.pi == 0 and not self.atoms

    def add(self, o: "_Lin", sign: int = 1) -> "_Lin":
        atoms = dict(self.atoms)
        for k, v in o.atoms.items():
            atoms[k] = atoms.get(k, 0) + sign * v
        return _Lin(self.pi + sign * o.pi, self.num + sign * o.num, {k: v for k, v in atoms.items() if v})

    def scale(self, c: Fraction) -> "_Lin":
        return _Lin(self.pi * c, self.num * c, {k: v * c for k, v in self.atoms.items() if v * c})

    def to_angle(self) -> Angle:
        angle = Angle()
        pi = self.pi
        if pi:
            den = pi.denominator
            if den & (den - 1) == 0:
                angle = angle + Angle(pi)
            else:
                angle = angle + Angle.atom(f"(pi*{pi})")
        for name, c in self.atoms.items():
            if c.denominator != 1:
                angle = angle + Angle.atom(f"({c}*{name})")
            else:
                angle = angle + Angle.atom(name, int(c))
        if self.num:
            angle = angle + Angle.atom(_num_text(self.num))
        return angle


def _num_text(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return repr(float(x))


class _Parser:
    def __init__(self, toks: list[Tok], path: str | None):
        self.toks = toks
        self.i = 0
        self.path = path
        self.qubits: list[str] = []
        self.registers: dict[str, int] = {}
        self.gate_defs: dict[str, tuple[list[str], list[str], list[Tok]]] = {}
        self.procedures: dict[str, Procedure] = {}

    # ---- token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Tok | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col, self.path)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("op", "id"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        if self.tok.text != text:
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def ident(self) -> str:
        if self.tok.kind != "id":
            self.error(f"expected identifier, found {self.tok.text!r}")
        return self.advance().text

    def skip_balanced(self, open_: str, close: str) -> None:
        self.expect(open_)
        depth = 1
        while depth:
            t = self.advance()
            if t.kind == "eof":
                self.error(f"unbalanced {open_!r}", t)
            if t.text == open_:
                depth += 1
            elif t.text == close:
                depth -= 1

    def skip_statement(self) -> None:
        while self.tok.text != ";":
            if self.tok.kind == "eof":
                self.error("missing ';'")
            if self.tok.text in "([{":
                pairs = {"(": ")", "[": "]", "{": "}"}
                self.skip_balanced(self.tok.text, pairs[self.tok.text])
            else:
                self.advance()
        self.advance()

    # ---- expressions
    def expr(self, env: dict) -> _Lin:
        left = self.term(env)
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            right = self.term(env)
            left = left.add(right, 1 if op == "+" else -1)
        return left

    def term(self, env: dict) -> _Lin:
        left = self.unary(env)
        while self.tok.text in ("*", "/"):
            op = self.advance().text
            right = self.unary(env)
            if op == "*":
                if right.is_const():
                    left = left.scale(right.num)
                elif left.is_const():
                    left = right.scale(left.num)
                else:
                    self.error("non-linear angle expression")
            else:
                if not right.is_const() or right.num == 0:
                    self.error("division by a non-constant or zero angle expression")
                left = left.scale(1 / right.num)
        return left

    def unary(self, env: dict) -> _Lin:
        if self.accept("-"):
            return self.unary(env).scale(Fraction(-1))
        if self.accept("+"):
            return self.unary(env)
        return self.atom(env)

    def atom(self, env: dict) -> _Lin:
        t = self.tok
        if t.text == "(":
            self.advance()
            v = self.expr(env)
            self.expect(")")
            return v
        if t.kind == "num":
            self.advance()
            return _Lin(num=Fraction(t.text))
        if t.kind == "id":
            self.advance()
            if t.text in ("pi", "π"):
                return _Lin(pi=Fraction(1))
            if t.text in env:
                return env[t.text]
            return _Lin(atoms={t.text: Fraction(1)})
        self.error(f"unexpected {t.text!r} in expression")

    def int_expr(self, env: dict) -> int:
        v = self.expr(env)
        if not v.is_const() or v.num.denominator != 1:
            self.error("expected an integer expression")
        return int(v.num)

    # ---- qubit arguments
    def qarg(self, qenv: dict, ienv: dict) -> list[str]:
        start = self.tok
        name = self.ident()
        if name in qenv:
            return [qenv[name]]
        if self.accept("["):
            idx = self.int_expr(ienv)
            self.expect("]")
            if name not in self.registers:
                self.error(f"undeclared register {name!r}", start)
            if not 0 <= idx < self.registers[name]:
                self.error(f"index {idx} out of range for {name!r}", start)
            return [f"{name}[{idx}]"]
        if name in self.registers:
            return [f"{name}[{i}]" for i in range(self.registers[name])]
        if name in self.qubits:
            return [name]
        self.error(f"undeclared qubit {name!r}", start)

    def qargs(self, qenv: dict, ienv: dict) -> list[list[str]]:
        out = [self.qarg(qenv, ienv)]
        while self.accept(","):
            out.append(self.qarg(qenv, ienv))
        return out

    # ---- statements
    def program(self) -> Program:
        stmts = []
        while self.tok.kind != "eof":
            s = self.statement({}, {}, top=True)
            if s is not None:
                stmts.append(s)
        return Program(tuple(self.qubits), seq(*stmts), dict(self.procedures))

    def block(self, qenv: dict, ienv: dict) -> Stmt:
        if self.accept("{"):
            stmts = []
            while not self.accept("}"):
                if self.tok.kind == "eof":
                    self.error("unterminated block")
                s = self.statement(qenv, ienv)
                if s is not None:
                    stmts.append(s)
            return seq(*stmts)
        s = self.statement(qenv, ienv)
        return s if s is not None else Skip()

    def statement(self, qenv: dict, ienv: dict, top: bool = False) -> Stmt | None:
        t = self.tok
        word = t.text
        if t.kind == "op" and word == ";":
            self.advance()
            return None
        if t.kind != "id":
            self.error(f"unexpected {word!r}")
        if word == "OPENQASM":
            self.skip_statement()
            return None
        if word == "include":
            self.skip_statement()
            return None
        if word in ("qubit", "qreg"):
            return self.declare_qubits(top)
        if word in ("bit", "creg", "int", "uint", "bool", "float", "angle", "const", "input", "output",
                    "barrier", "return"):
            self.skip_statement()
            return None
        if word == "reset":
            self.advance()
            qs = self.qargs(qenv, ienv)
            self.expect(";")
            return seq(*(Reset(q) for group in qs for q in group))
        if word == "measure":
            self.advance()
            qs = self.qargs(qenv, ienv)
            if self.accept("->"):
                self.skip_statement()
            else:
                self.expect(";")
            return seq(*(Meas(q) for group in qs for q in group))
        if word == "gate":
            self.gate_definition()
            return None
        if word == "def":
            self.def_definition()
            return None
        if word == "if":
            self.advance()
            self.skip_balanced("(", ")")
            then = self.block(qenv, ienv)
            orelse: Stmt = Skip()
            if self.accept("else"):
                orelse = self.block(qenv, ienv)
            return IfStar(then, orelse)
        if word == "while":
            trip = t.trip
            self.advance()
            self.skip_balanced("(", ")")
            return WhileStar(self.block(qenv, ienv), trip)
        if word == "for":
            return self.for_loop(qenv, ienv)
        if word in ("ctrl", "inv", "pow", "negctrl"):
            self.error(f"unsupported construct: gate modifier {word!r}")
        # assignment possibly carrying a measurement, e.g. c[0] = measure q[0];
        j = self.i + 1
        if self.peek().text == "[":
            depth = 0
            while True:
                tt = self.toks[j]
                if tt.text == "[":
                    depth += 1
                elif tt.text == "]":
                    depth -= 1
                    if depth == 0:
                        j += 1
                        break
                elif tt.kind == "eof":
                    break
                j += 1
        if self.toks[j].text in ("=", "+=", "-=", "++"):
            if self.toks[j].text == "=" and self.toks[j + 1].text == "measure":
                self.i = j + 2
                qs = self.qargs(qenv, ienv)
                self.expect(";")
                return seq(*(Meas(q) for group in qs for q in group))
            self.skip_statement()
            return None
        return self.gate_call(qenv, ienv)

    def declare_qubits(self, top: bool) -> None:
        kw = self.advance().text
        if not top:
            self.error("qubit declarations are only allowed at top level")
        if kw == "qreg":
            name = self.ident()
            self.expect("[")
            size = self.int_expr({})
            self.expect("]")
        elif self.accept("["):
            size = self.int_expr({})
            self.expect("]")
            name = self.ident()
        else:
            size = None
            name = self.ident()
        self.expect(";")
        if name in self.registers or name in self.qubits:
            self.error(f"qubit {name!r} declared twice")
        if size is None:
            self.qubits.append(name)
        else:
            self.registers[name] = size
            self.qubits.extend(f"{name}[{i}]" for i in range(size))
        return None

    def gate_definition(self) -> None:
        self.expect("gate")
        name = self.ident()
        params: list[str] = []
        if self.accept("("):
            if not self.accept(")"):
                params.append(self.ident())
                while self.accept(","):
                    params.append(self.ident())
                self.expect(")")
        qparams = [self.ident()]
        while self.accept(","):
            qparams.append(self.ident())
        start = self.i
        self.skip_balanced("{", "}")
        self.gate_defs[name] = (params, qparams, self.toks[start:self.i])

    def def_definition(self) -> None:
        self.expect("def")
        name = self.ident()
        self.expect("(")
        params: list[str] = []
        while not self.accept(")"):
            typ = self.ident()
            size = None
            if self.accept("["):
                size = self.int_expr({})
                self.expect("]")
            pname = self.ident()
            if typ == "qubit":
                if size is not None:
                    self.error("qubit array parameters are not supported")
                params.append(pname)
            self.accept(",")
        if self.accept("->"):
            self.ident()
        qenv = {p: p for p in params}
        body = self.block(qenv, {})
        self.procedures[name] = Procedure(tuple(params), body)

    def for_loop(self, qenv: dict, ienv: dict) -> Stmt:
        trip = self.tok.trip
        self.expect("for")
        if self.peek().text != "in":
            self.ident()  # loop variable type
        var = self.ident()
        self.expect("in")
        bounds = None
        if self.tok.text == "[":
            save = self.i
            self.advance()
            try:
                lo = self.int_expr(ienv)
                self.expect(":")
                hi = self.int_expr(ienv)
                step = 1
                if self.accept(":"):
                    step, hi = hi, self.int_expr(ienv)
                self.expect("]")
                bounds = (lo, hi, step)
            except ParseError:
                self.i = save
                self.skip_balanced("[", "]")
        else:
            while self.tok.text != "{":
                if self.tok.kind == "eof":
                    self.error("malformed for loop")
                self.advance()
        if bounds is None:
            return WhileStar(self.block(qenv, ienv), trip)
        lo, hi, step = bounds
        if step == 0:
            self.error("for loop with zero step")
        start = self.i
        bodies = []
        values = range(lo, hi + (1 if step > 0 else -1), step)
        for v in values:
            self.i = start
            env = dict(ienv)
            env[var] = _Lin(num=Fraction(v))
            bodies.append(self.block(qenv, env))
        if not bodies:
            self.block(qenv, ienv)
        return seq(*bodies)

    def gate_call(self, qenv: dict, ienv: dict) -> Stmt:
        start = self.tok
        name = self.ident()
        if name in self.procedures and self.tok.text == "(":
            self.advance()
            args: list[str] = []
            if not self.accept(")"):
                args += self.qarg(qenv, ienv)
                while self.accept(","):
                    args += self.qarg(qenv, ienv)
                self.expect(")")
            self.expect(";")
            return Call(name, tuple(args))
        params: list[_Lin] = []
        if self.accept("("):
            if not self.accept(")"):
                params.append(self.expr(ienv))
                while self.accept(","):
                    params.append(self.expr(ienv))
                self.expect(")")
        groups = self.qargs(qenv, ienv)
        self.expect(";")
        width = max(len(g) for g in groups)
        if any(len(g) not in (1, width) for g in groups):
            self.error("register arguments of different sizes", start)
        out = []
        for k in range(width):
            qs = [g[0] if len(g) == 1 else g[k] for g in groups]
            out.append(self.apply_gate(name, params, qs, start))
        return seq(*out)

    def apply_gate(self, name: str, params: list[_Lin], qs: list[str], where: Tok) -> Stmt:
        kind = _QASM_GATES.get(name)
        if kind is not None:
            if kind == "id":
                return Skip()
            if kind == "rz":
                if len(params) != 1:
                    self.error(f"{name} expects one angle", where)
                return Gate(GateApp("rz", tuple(qs), angle=params[0].to_angle()))
            if ir.ARITY[kind] != len(qs):
                self.error(f"gate {name} expects {ir.ARITY[kind]} qubit(s)", where)
            return Gate(GateApp(kind, tuple(qs)))
        if name in _UNINTERPRETED:
            return Gate(GateApp("uninterp", tuple(qs), name=name))
        if name in self.gate_defs:
            fparams, fqubits, body_toks = self.gate_defs[name]
            if len(fparams) != len(params) or len(fqubits) != len(qs):
                self.error(f"gate {name} called with the wrong number of arguments", where)
            sub = _Parser(body_toks + [Tok("eof", "", where.line, where.col)], self.path)
            sub.qubits, sub.registers = self.qubits, self.registers
            sub.gate_defs, sub.procedures = self.gate_defs, self.procedures
            env = dict(zip(fparams, params))
            block = sub.block(dict(zip(fqubits, qs)), env)
            return block
        self.error(f"unsupported construct: unknown gate {name!r}", where)


_QASM_GATES = {
    "h": "h", "x": "x", "y": "y", "z": "z", "s": "s", "sdg": "sdg", "t": "t", "tdg": "tdg",
    "cx": "cnot", "CX": "cnot", "cnot": "cnot", "cz": "cz", "swap": "swap", "ccx": "tof",
    "toffoli": "tof", "ccz": "ccz", "rz": "rz", "p": "rz", "phase": "rz", "u1": "rz", "id": "id", "i": "id",
}

_UNINTERPRETED = {"rx", "ry", "u", "u2", "u3", "U", "sx", "sxdg", "cy", "ch", "crz", "cp", "cu1"}


def parse_qasm(text: str, path: str | None = None) -> Program:
    prog = _Parser(tokenize(text, path), path).program()
    diags = ir.validate(prog)
    if diags:
        raise ParseError("; ".join(diags))
    return prog


# ================================================================ QASM emitter


def _angle_expr(a: Angle) -> str:
    parts = []
    if a.dyadic:
        d = a.dyadic
        if d.numerator == 1:
            parts.append(f"pi/{d.denominator}" if d.denominator != 1 else "pi")
        elif d.denominator == 1:
            parts.append(f"{d.numerator}*pi")
        else:
            parts.append(f"{d.numerator}*pi/{d.denominator}")
    for name, c in a.symbolic:
        term = name if c == 1 else f"{c}*{name}" if c > 0 else f"-{name}" if c == -1 else f"{c}*{name}"
        parts.append(term)
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += p if p.startswith("-") else "+" + p
    return out


_QASM_NAMES = {"h": "h", "x": "x", "y": "y", "z": "z", "s": "s", "sdg": "sdg", "t": "t", "tdg": "tdg",
               "cnot": "cx", "cz": "cz", "swap": "swap", "tof": "ccx", "ccz": "ccz"}

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")
_INDEXED = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)\[(\d+)\]$")


def _declarations(qubits: tuple[str, ...]) -> list[str]:
    lines = []
    i = 0
    while i < len(qubits):
        m = _INDEXED.match(qubits[i])
        if m and m.group(2) == "0":
            reg = m.group(1)
            j = i
            while j < len(qubits) and qubits[j] == f"{reg}[{j - i}]":
                j += 1
            lines.append(f"qubit[{j - i}] {reg};")
            i = j
            continue
        if not _IDENT.match(qubits[i]):
            raise EmitError(f"qubit name {qubits[i]!r} cannot be declared in QASM")
        lines.append(f"qubit {qubits[i]};")
        i += 1
    return lines


def emit_qasm(p: Program) -> str:
    lines = ["OPENQASM 3;", 'include "stdgates.inc";']
    lines += _declarations(p.qubits)

    def walk(s: Stmt, ind: str) -> None:
        if isinstance(s, Seq):
            for t in s.stmts:
                walk(t, ind)
        elif isinstance(s, Skip):
            return
        elif isinstance(s, Reset):
            lines.append(f"{ind}reset {s.qubit};")
        elif isinstance(s, Meas):
            lines.append(f"{ind}measure {s.qubit};")
        elif isinstance(s, Gate):
            g = s.app
            if g.kind == "rz":
                lines.append(f"{ind}rz({_angle_expr(g.angle)}) {g.qubits[0]};")
            elif g.kind == "uninterp":
                lines.append(f"{ind}{g.name} {', '.join(g.qubits)};")
            else:
                lines.append(f"{ind}{_QASM_NAMES[g.kind]} {', '.join(g.qubits)};")
        elif isinstance(s, Call):
            lines.append(f"{ind}{s.name}({', '.join(s.args)});")
        elif isinstance(s, IfStar):
            lines.append(f"{ind}if (nondet) {{")
            walk(s.then, ind + "  ")
            lines.append(f"{ind}}} else {{")
            walk(s.orelse, ind + "  ")
            lines.append(f"{ind}}}")
        elif isinstance(s, WhileStar):
            if s.trip_count is not None:
                lines.append(f"{ind}// @trip {s.trip_count}")
            lines.append(f"{ind}while (nondet) {{")
            walk(s.body, ind + "  ")
            lines.append(f"{ind}}}")
        else:
            raise EmitError(f"cannot emit {type(s).__name__}")

    for name in sorted(p.procedures):
        proc = p.procedures[name]
        lines.append(f"def {name}({', '.join('qubit ' + q for q in proc.params)}) {{")
        walk(proc.body, "  ")
        lines.append("}")
    walk(p.body, "")
    return "\n".join(lines) + "\n"


def emit(p: Program, fmt: str) -> str:
    if fmt == "qc":
        return emit_qc(p)
    if fmt in ("qasm", "qasm3", "qasm3-subset"):
        return emit_qasm(p)
    raise ValueError(f"unknown format {fmt!r}")


def strip_locations(p: Program) -> Program:
    """Forget location ids (for structural comparisons)."""
    from dataclasses import replace

    return ir.map_program(p, lambda app: Gate(replace(app, loc=None)))
