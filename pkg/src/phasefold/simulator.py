"""Dense simulation oracles.

Exact operators live in Z[omega][1/sqrt2] with omega = exp(i*pi/4): an entry is
``(a0 + a1*w + a2*w^2 + a3*w^3) / sqrt2^k`` with integer ``a_j`` and a shared
exponent ``k``.  Gates whose angle is not a multiple of pi/4 switch the
operator to floating point.

Qubit ``i`` of a program is bit ``i`` of a basis index, in declaration order.
"""

from __future__ import annotations

import itertools
import math
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import ir
from .polyring import Angle

MAX_QUBITS = 10
TOLERANCE = 1e-9


class SimulationError(ValueError):
    pass


def _mul_omega(a: np.ndarray, k: int) -> np.ndarray:
    """Multiply Z[w] coefficient stacks (leading axis of length 4) by w^k."""
    k %= 8
    out = a
    for _ in range(k % 4):
        out = np.stack([-out[3], out[0], out[1], out[2]])
    return -out if k >= 4 else out


def _mul_sqrt2(a: np.ndarray) -> np.ndarray:
    # sqrt2 = w - w^3
    return _mul_omega(a, 1) - _mul_omega(a, 3)


class DenseOp:
    """A 2^n x 2^n operator, exact when ``coeffs`` is set, floating otherwise."""

    __slots__ = ("n", "coeffs", "exp", "values")

    def __init__(self, n: int, coeffs: np.ndarray | None = None, exp: int = 0, values: np.ndarray | None = None):
        if n > MAX_QUBITS:
            raise SimulationError(f"{n} qubits exceed the dense simulation limit of {MAX_QUBITS}")
        self.n = n
        self.coeffs = coeffs
        self.exp = exp
        self.values = values

    @classmethod
    def identity(cls, n: int, exact: bool = True) -> "DenseOp":
        dim = 1 << n
        if n > MAX_QUBITS:
            raise SimulationError(f"{n} qubits exceed the dense simulation limit of {MAX_QUBITS}")
        if exact:
            c = np.zeros((4, dim, dim), dtype=np.int64)
            c[0] = np.eye(dim, dtype=np.int64)
            return cls(n, coeffs=c)
        return cls(n, values=np.eye(dim, dtype=complex))

    @property
    def exact(self) -> bool:
        return self.coeffs is not None

    @property
    def dim(self) -> int:
        return 1 << self.n

    def copy(self) -> "DenseOp":
        return DenseOp(self.n, None if self.coeffs is None else self.coeffs.copy(), self.exp,
                       None if self.values is None else self.values.copy())

    def to_complex(self) -> np.ndarray:
        if self.values is not None:
            return self.values
        w = np.exp(1j * math.pi / 4)
        c = self.coeffs.astype(float)
        m = c[0] + c[1] * w + c[2] * w**2 + c[3] * w**3
        return m / math.sqrt(2) ** self.exp

    def to_float(self) -> None:
        if self.values is None:
            self.values = self.to_complex()
            self.coeffs = None
            self.exp = 0

    def normalize(self) -> None:
        """Divide out factors of sqrt2 while the coefficients stay integral."""
        if self.coeffs is None:
            return
        while self.exp > 0:
            t = _mul_sqrt2(self.coeffs)
            if np.any(t % 2):
                break
            self.coeffs = t // 2
            self.exp -= 1
        if not self.coeffs.any():
            self.exp = 0

    def is_zero(self) -> bool:
        if self.coeffs is not None:
            return not self.coeffs.any()
        return bool(np.all(np.abs(self.values) < TOLERANCE))

    # ----------------------------------------------------------- row actions

    def _rows(self) -> np.ndarray:
        return self.coeffs if self.coeffs is not None else self.values

    def _axis(self) -> int:
        return 1 if self.coeffs is not None else 0

    def permute(self, perm: np.ndarray) -> None:
        """Row ``perm[i]`` of the result is row ``i`` of the current operator."""
        inv = np.empty_like(perm)
        inv[perm] = np.arange(perm.size)
        if self.coeffs is not None:
            self.coeffs = self.coeffs[:, inv, :]
        else:
            self.values = self.values[inv, :]

    def phase_rows(self, mask: np.ndarray, angle: Fraction | float) -> None:
        """Multiply rows selected by ``mask`` by exp(i*pi*angle)."""
        if self.coeffs is not None:
            if isinstance(angle, Fraction) and (angle * 4).denominator == 1:
                k = int(angle * 4) % 8
                self.coeffs[:, mask, :] = _mul_omega(self.coeffs[:, mask, :], k)
                return
            self.to_float()
        self.values[mask, :] *= np.exp(1j * math.pi * float(angle))

    def project(self, qubit: int, bit: int) -> None:
        idx = np.arange(self.dim)
        mask = ((idx >> qubit) & 1) != bit
        if self.coeffs is not None:
            self.coeffs[:, mask, :] = 0
        else:
            self.values[mask, :] = 0

    def hadamard(self, qubit: int) -> None:
        idx = np.arange(self.dim)
        lo = idx[((idx >> qubit) & 1) == 0]
        hi = lo | (1 << qubit)
        if self.coeffs is not None:
            a, b = self.coeffs[:, lo, :].copy(), self.coeffs[:, hi, :].copy()
            self.coeffs[:, lo, :] = a + b
            self.coeffs[:, hi, :] = a - b
            self.exp += 1
            self.normalize()
        else:
            a, b = self.values[lo, :].copy(), self.values[hi, :].copy()
            self.values[lo, :] = (a + b) / math.sqrt(2)
            self.values[hi, :] = (a - b) / math.sqrt(2)

    def apply_matrix(self, qubits: Sequence[int], mat: np.ndarray) -> None:
        """Apply an arbitrary 2^m x 2^m matrix (floating point)."""
        self.to_float()
        m = len(qubits)
        idx = np.arange(self.dim)
        rest = idx[np.all([((idx >> q) & 1) == 0 for q in qubits], axis=0)]
        for base in rest:
            group = [base | sum(((j >> t) & 1) << q for t, q in enumerate(qubits)) for j in range(1 << m)]
            self.values[group, :] = mat @ self.values[group, :]

    def __matmul__(self, other: "DenseOp") -> "DenseOp":
        if self.exact and other.exact:
            a, b = self.coeffs, other.coeffs
            out = np.zeros_like(a)
            for i in range(4):
                for j in range(4):
                    prod = a[i] @ b[j]
                    k = i + j
                    if k >= 4:
                        out[k - 4] -= prod
                    else:
                        out[k] += prod
            r = DenseOp(self.n, out, self.exp + other.exp)
            r.normalize()
            return r
        return DenseOp(self.n, values=self.to_complex() @ other.to_complex())


# ---------------------------------------------------------------- gates


def _uninterpreted_matrix(name: str, arity: int) -> np.ndarray:
    """A fixed pseudo-random unitary standing in for an opaque gate."""
    rng = np.random.default_rng(zlib.crc32(f"{name}/{arity}".encode()))
    d = 1 << arity
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _angle_of(app: ir.GateApp, symbols: dict[str, float] | None) -> Fraction | float:
    a: Angle = app.phase_angle()
    if not a.symbolic:
        return a.dyadic
    if symbols is None:
        symbols = {}
    total = float(a.dyadic)
    for name, c in a.symbolic:
        # unspecified symbols get a fixed irrational-looking value
        total += c * symbols.get(name, (zlib.crc32(name.encode()) % 1000 + 1) / 997.0)
    return total


def apply_gate(op: DenseOp, app: ir.GateApp, index: dict[str, int], symbols: dict[str, float] | None = None) -> None:
    qs = [index[q] for q in app.qubits]
    kind = app.kind
    idx = np.arange(op.dim)
    bit = lambda q: ((idx >> q) & 1).astype(bool)  # noqa: E731
    if kind == "h":
        op.hadamard(qs[0])
    elif kind == "x":
        op.permute(idx ^ (1 << qs[0]))
    elif kind == "y":
        op.phase_rows(bit(qs[0]), Fraction(1))
        op.permute(idx ^ (1 << qs[0]))
        op.phase_rows(np.ones(op.dim, dtype=bool), Fraction(1, 2))
    elif app.is_phase:
        op.phase_rows(bit(qs[0]), _angle_of(app, symbols))
    elif kind == "cnot":
        c, t = qs
        op.permute(np.where(bit(c), idx ^ (1 << t), idx))
    elif kind == "tof":
        a, b, t = qs
        op.permute(np.where(bit(a) & bit(b), idx ^ (1 << t), idx))
    elif kind == "swap":
        a, b = qs
        diff = bit(a) != bit(b)
        op.permute(np.where(diff, idx ^ (1 << a) ^ (1 << b), idx))
    elif kind == "cz":
        op.phase_rows(bit(qs[0]) & bit(qs[1]), Fraction(1))
    elif kind == "ccz":
        op.phase_rows(bit(qs[0]) & bit(qs[1]) & bit(qs[2]), Fraction(1))
    elif kind == "uninterp":
        op.apply_matrix(qs, _uninterpreted_matrix(app.name or "?", len(qs)))
    else:
        raise SimulationError(f"cannot simulate gate {kind!r}")


def unitary_of(gates: Sequence[ir.GateApp], qubits: Sequence[str] | int, symbols: dict[str, float] | None = None) -> DenseOp:
    """Product of the gate matrices, first gate applied first."""
    if isinstance(qubits, int):
        qubits = [f"q{i}" for i in range(qubits)]
    index = {q: i for i, q in enumerate(qubits)}
    op = DenseOp.identity(len(qubits))
    for g in gates:
        apply_gate(op, g, index, symbols)
    return op


def support(u: DenseOp, x: int, tol: float = TOLERANCE) -> set[int]:
    if u.exact:
        col = u.coeffs[:, :, x]
        return {int(i) for i in np.nonzero(np.any(col != 0, axis=0))[0]}
    return {int(i) for i in np.nonzero(np.abs(u.values[:, x]) > tol)[0]}


def transitions(u: DenseOp) -> set[tuple[int, int]]:
    """All (input, output) pairs with a nonzero amplitude."""
    if u.exact:
        nz = np.any(u.coeffs != 0, axis=0)
    else:
        nz = np.abs(u.values) > TOLERANCE
    rows, cols = np.nonzero(nz)
    return {(int(c), int(r)) for r, c in zip(rows, cols)}


# ---------------------------------------------------------------- equivalence


def _align(a: DenseOp, b: DenseOp) -> tuple[np.ndarray, np.ndarray]:
    ca, cb = a.coeffs, b.coeffs
    ea, eb = a.exp, b.exp
    while ea < eb:
        ca, ea = _mul_sqrt2(ca), ea + 1
    while eb < ea:
        cb, eb = _mul_sqrt2(cb), eb + 1
    return ca, cb


def equiv_up_to_phase(a: DenseOp, b: DenseOp, tol: float = TOLERANCE) -> bool:
    if a.dim != b.dim:
        raise SimulationError("dimension mismatch")
    if a.exact and b.exact:
        ca, cb = _align(a, b)
        return any(np.array_equal(ca, _mul_omega(cb, k)) for k in range(8))
    ma, mb = a.to_complex(), b.to_complex()
    flat = np.argmax(np.abs(mb))
    pivot = mb.flat[flat]
    if abs(pivot) < tol:
        return bool(np.all(np.abs(ma) < tol))
    ratio = ma.flat[flat] / pivot
    if abs(abs(ratio) - 1) > 1e-7:
        return False
    return bool(np.allclose(ma, ratio * mb, atol=tol, rtol=0))


def is_unitary(u: DenseOp, tol: float = 1e-10) -> bool:
    m = u.to_complex()
    return bool(np.allclose(m.conj().T @ m, np.eye(u.dim), atol=tol))


# ---------------------------------------------------------------- programs


@dataclass(frozen=True)
class PathStep:
    """One primitive action along a control-flow path."""

    kind: str  # gate | project | flip
    gate: ir.GateApp | None = None
    qubit: str | None = None
    bit: int = 0


def _paths(s: ir.Stmt, procs: dict[str, ir.Procedure], unroll: int, env: dict[str, str]) -> Iterator[tuple[PathStep, ...]]:
    if isinstance(s, ir.Skip):
        yield ()
    elif isinstance(s, ir.Gate):
        app = s.app
        yield (PathStep("gate", gate=ir.GateApp(app.kind, tuple(env.get(q, q) for q in app.qubits), app.angle, app.name, app.loc)),)
    elif isinstance(s, ir.Reset):
        q = env.get(s.qubit, s.qubit)
        yield (PathStep("project", qubit=q, bit=0),)
        yield (PathStep("project", qubit=q, bit=1), PathStep("flip", qubit=q))
    elif isinstance(s, ir.Meas):
        q = env.get(s.qubit, s.qubit)
        yield (PathStep("project", qubit=q, bit=0),)
        yield (PathStep("project", qubit=q, bit=1),)
    elif isinstance(s, ir.Seq):
        yield from _seq_paths(list(s.stmts), procs, unroll, env)
    elif isinstance(s, ir.IfStar):
        yield from _paths(s.then, procs, unroll, env)
        yield from _paths(s.orelse, procs, unroll, env)
    elif isinstance(s, ir.WhileStar):
        for k in range(unroll + 1):
            yield from _seq_paths([s.body] * k, procs, unroll, env)
    elif isinstance(s, ir.Call):
        proc = procs[s.name]
        inner = {p: env.get(a, a) for p, a in zip(proc.params, s.args)}
        yield from _paths(proc.body, procs, unroll, inner)
    else:
        raise SimulationError(f"unknown statement {s!r}")


def _seq_paths(stmts, procs, unroll, env) -> Iterator[tuple[PathStep, ...]]:
    if not stmts:
        yield ()
        return
    for head in _paths(stmts[0], procs, unroll, env):
        for tail in _seq_paths(stmts[1:], procs, unroll, env):
            yield head + tail


def path_operator(steps: Sequence[PathStep], qubits: Sequence[str], symbols: dict[str, float] | None = None) -> DenseOp:
    index = {q: i for i, q in enumerate(qubits)}
    op = DenseOp.identity(len(qubits))
    for st in steps:
        if st.kind == "gate":
            apply_gate(op, st.gate, index, symbols)
        elif st.kind == "project":
            op.project(index[st.qubit], st.bit)
        else:
            op.permute(np.arange(op.dim) ^ (1 << index[st.qubit]))
    op.normalize()
    return op


def enumerate_paths(p: ir.Program, unroll: int = 2, max_qubits: int = 8, max_paths: int = 20000,
                    symbols: dict[str, float] | None = None) -> list[tuple[tuple[PathStep, ...], DenseOp]]:
    """Every control-flow path with loops unrolled 0..unroll times, with its operator."""
    if unroll > 3:
        raise SimulationError("unrolling is limited to 3 iterations")
    if len(p.qubits) > max_qubits:
        raise SimulationError(f"{len(p.qubits)} qubits exceed the path-enumeration limit of {max_qubits}")
    out = []
    for steps in itertools.islice(_paths(p.body, p.procedures, unroll, {}), max_paths + 1):
        if len(out) == max_paths:
            raise SimulationError(f"more than {max_paths} control-flow paths")
        out.append((steps, path_operator(steps, p.qubits, symbols)))
    return out


def path_label(steps: Sequence[PathStep]) -> str:
    parts = []
    for st in steps:
        if st.kind == "project":
            parts.append(f"P{st.bit}({st.qubit})")
        elif st.kind == "flip":
            parts.append(f"X({st.qubit})")
    return " ".join(parts) or "(no projections)"


def compare_programs(original: ir.Program, optimized: ir.Program, unroll: int = 2, max_qubits: int = 8):
    """First path whose operators differ beyond a global phase, or None.

    Both programs must share control-flow structure, so paths are matched by
    enumeration order.
    """
    a = enumerate_paths(original, unroll, max_qubits)
    b = enumerate_paths(optimized, unroll, max_qubits)
    if len(a) != len(b):
        return ("path count", len(a), len(b))
    for (sa, oa), (sb, ob) in zip(a, b):
        if not equiv_up_to_phase(oa, ob):
            return (path_label(sa), oa, ob)
    return None
