"""Balanced sums over paths and their interference rewrites.

A path sum represents the map

    |x> -> 2^(-s/2) * sum_y exp(i*pi*phase(x, y)) |f(x, y)>

where ``phase`` has dyadic coefficients (in units of pi).  Rotations by
symbolic angles cannot be expanded into real multilinear form, so they are
kept aside as ``(condition, angle)`` pairs; rewrites that contract a variable
refuse to touch variables occurring in them.

Three rewrites are implemented:

``E``      drop a path variable that occurs nowhere (factor 2);
``H``      contract ``y`` whose phase is exactly ``pi*y*(z + P)`` with ``z`` a
           path variable not in ``P``: substitute ``z := P`` (factor 2);
``omega``  contract ``y`` whose phase is ``pi*(±y/2 + y*P)`` (factor sqrt 2
           and a global eighth turn).

When none applies because every candidate also feeds an output, a linear
change of path variables (``B``) may move one variable out of the outputs;
it is only taken when the freed variable can be contracted next.

Every variable ``y`` with phase exactly ``pi*y*Q`` also witnesses ``Q = 0``
on all surviving paths; :func:`harvest_constraints` collects these.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import affine_domain as aff
from . import f2linalg as la
from . import groebner as gb
from . import poly_domain as pd
from .polyring import ONE, Angle, BoolPoly, PhasePoly, default_name

HALF = Fraction(1, 2)
THREE_HALVES = Fraction(3, 2)
DEFAULT_STEP_BUDGET = 100000


class NoPathSum(ValueError):
    """Raised for gates without a sum-over-paths semantics (uninterpreted gates)."""


@dataclass
class PathSum:
    inputs: list[int]
    outputs: list[BoolPoly]
    phase: PhasePoly = field(default_factory=PhasePoly)
    path_vars: list[int] = field(default_factory=list)
    norm_exp: int = 0
    opaque: list[tuple[BoolPoly, Angle]] = field(default_factory=list)
    next_var: int = 0

    # ------------------------------------------------------------ construction

    @classmethod
    def identity(cls, n: int) -> "PathSum":
        return cls(list(range(n)), [BoolPoly.var(i) for i in range(n)], next_var=n)

    @classmethod
    def from_outputs(cls, outputs: Sequence[BoolPoly], next_var: int) -> "PathSum":
        """Start from an arbitrary classical state; its free variables act as inputs."""
        support = 0
        for f in outputs:
            support |= f.support()
        return cls(list(la.iter_bits(support)), list(outputs), next_var=next_var)

    @property
    def n_in(self) -> int:
        return len(self.inputs)

    @property
    def n_out(self) -> int:
        return len(self.outputs)

    def copy(self) -> "PathSum":
        return PathSum(list(self.inputs), list(self.outputs), self.phase.copy(), list(self.path_vars),
                       self.norm_exp, list(self.opaque), self.next_var)

    def fresh(self) -> int:
        v = self.next_var
        self.next_var += 1
        return v

    def add_phase(self, condition: BoolPoly, angle: Angle) -> None:
        """Multiply by exp(i*pi*angle*condition)."""
        if angle.is_zero() or condition.is_zero():
            return
        if angle.is_dyadic():
            self.phase.add_lifted(condition, angle)
        else:
            const = condition.const_bit
            if const:
                # angle*(1 + g) = angle - angle*g as real functions
                self.opaque.append((condition.without_const(), -angle))
                self.opaque.append((BoolPoly.one(), angle))
            else:
                self.opaque.append((condition, angle))

    def apply(self, kind: str, qubits: Sequence[int], angle: Angle | None = None, var: int | None = None) -> int | None:
        """Append a gate acting on output positions ``qubits``; returns the new path variable for H."""
        f = self.outputs
        if kind == "h":
            (q,) = qubits
            y = self.fresh() if var is None else var
            if var is not None and var >= self.next_var:
                self.next_var = var + 1
            self.path_vars.append(y)
            self.phase.add_lifted(f[q] * BoolPoly.var(y), Angle(Fraction(1)))
            self.norm_exp += 1
            f[q] = BoolPoly.var(y)
            return y
        if kind == "x":
            f[qubits[0]] = f[qubits[0]].add_const()
        elif kind == "y":
            q = qubits[0]
            self.add_phase(f[q], Angle(Fraction(1)))
            self.add_phase(BoolPoly.one(), Angle(HALF))
            f[q] = f[q].add_const()
        elif kind in ("z", "s", "sdg", "t", "tdg", "rz"):
            from .ir import PHASE_ANGLES

            a = angle if kind == "rz" else PHASE_ANGLES[kind]
            self.add_phase(f[qubits[0]], a)
        elif kind == "cnot":
            c, t = qubits
            f[t] = f[t] + f[c]
        elif kind == "cz":
            a, b = qubits
            self.add_phase(f[a] * f[b], Angle(Fraction(1)))
        elif kind == "swap":
            a, b = qubits
            f[a], f[b] = f[b], f[a]
        elif kind == "ccz":
            a, b, c = qubits
            self.add_phase(f[a] * f[b] * f[c], Angle(Fraction(1)))
        elif kind == "tof":
            a, b, c = qubits
            f[c] = f[c] + f[a] * f[b]
        else:
            raise NoPathSum(f"gate {kind!r} has no path-sum semantics")
        return None

    # ------------------------------------------------------------ queries

    def occurs_outside_phase(self, v: int) -> bool:
        bit = 1 << v
        if any(t & bit for f in self.outputs for t in f.terms):
            return True
        return any(c.has_var(v) for c, _ in self.opaque)

    def var_terms(self, v: int) -> dict[int, Angle]:
        bit = 1 << v
        return {m: a for m, a in self.phase.terms.items() if m & bit}

    def render(self, name: Callable[[int], str] = default_name) -> str:
        ys = ",".join(name(y) for y in self.path_vars)
        outs = ", ".join(f.render(name) for f in self.outputs)
        extra = "".join(f" + {a}*[{c.render(name)}]" for c, a in self.opaque)
        return f"2^(-{self.norm_exp}/2) Σ_{{{ys}}} e^(iπ({self.phase.render(name)}{extra})) |{outs}⟩"

    def __repr__(self) -> str:
        return f"PathSum({self.render()})"


# ---------------------------------------------------------------- gates & composition


def of_gate(kind: str, arity: int | None = None, angle: Angle | None = None) -> PathSum:
    from .ir import ARITY

    n = arity if arity is not None else ARITY.get(kind)
    if n is None:
        raise NoPathSum(f"gate {kind!r} has no path-sum semantics")
    p = PathSum.identity(n)
    p.apply(kind, list(range(n)), angle)
    return p


def of_circuit(gates: Iterable[tuple], n: int) -> PathSum:
    """Path sum of a gate list; each entry is ``(kind, qubit indices[, angle])``."""
    p = PathSum.identity(n)
    for g in gates:
        kind, qs = g[0], g[1]
        p.apply(kind, qs, g[2] if len(g) > 2 else None)
    return p


def compose(a: PathSum, b: PathSum) -> PathSum:
    """``a`` followed by ``b``; ``b``'s inputs are replaced by ``a``'s outputs."""
    if a.n_out != b.n_in:
        raise ValueError("arity mismatch in path-sum composition")
    out = a.copy()
    rename: dict[int, int] = {}
    for y in b.path_vars:
        rename[y] = out.fresh()
    subst = {x: f for x, f in zip(b.inputs, a.outputs)}
    for y, z in rename.items():
        subst[y] = BoolPoly.var(z)
    # phase: substitute via lifts of each monomial's factors
    for m, ang in b.phase.terms.items():
        prod = BoolPoly.one()
        for v in la.iter_bits(m):
            prod = prod * subst.get(v, BoolPoly.var(v))
        out.phase.add_lifted(prod, ang)
    for c, ang in b.opaque:
        out.add_phase(c.substitute_many(subst), ang)
    out.outputs = [f.substitute_many(subst) for f in b.outputs]
    out.path_vars = a.path_vars + [rename[y] for y in b.path_vars]
    out.norm_exp = a.norm_exp + b.norm_exp
    return out


# ---------------------------------------------------------------- rewriting


@dataclass
class Step:
    rule: str
    var: int
    witness: BoolPoly | None = None
    substituted: int | None = None
    shifted: tuple[int, ...] = ()  # B only: variables re-expressed as fresh ones plus ``var``


def _y_pattern(p: PathSum, y: int):
    """Classify the phase of ``y``: returns (linear angle, Q) if every nonlinear
    y-term has coefficient exactly 1, else None."""
    bit = 1 << y
    lin = Fraction(0)
    q_terms = []
    for m, a in p.phase.terms.items():
        if not m & bit:
            continue
        if not a.is_dyadic():
            return None
        if m == bit:
            lin = a.dyadic
            if a.dyadic == 1:
                q_terms.append(ONE)
                lin = Fraction(0)
        elif a.dyadic == 1:
            q_terms.append(m ^ bit)
        else:
            return None
    return lin, BoolPoly(q_terms)


def harvest_constraints(p: PathSum, degree_cap: int | None = None) -> list[BoolPoly]:
    """Constraints ``Q = 0`` witnessed by variables with phase exactly pi*y*Q."""
    out = []
    for y in p.path_vars:
        if p.occurs_outside_phase(y):
            continue
        pat = _y_pattern(p, y)
        if pat is None or pat[0] != 0:
            continue
        q = pat[1]
        if q.is_zero():
            continue
        if degree_cap is not None and q.degree() > degree_cap:
            continue
        out.append(q)
    return out


def _find_step(p: PathSum, degree_cap: int | None) -> Step | None:
    for y in p.path_vars:
        if not p.var_terms(y) and not p.occurs_outside_phase(y):
            return Step("E", y)
    path_set = set(p.path_vars)
    best: Step | None = None
    for y in p.path_vars:
        if p.occurs_outside_phase(y):
            continue
        pat = _y_pattern(p, y)
        if pat is None or pat[0] != 0:
            continue
        q = pat[1]
        if degree_cap is not None and q.degree() > degree_cap:
            continue
        for t in sorted(q.terms):
            if t.bit_count() != 1:
                continue
            z = t.bit_length() - 1
            if z == y or z not in path_set:
                continue
            if any(u & t and u != t for u in q.terms):
                continue
            # ties on z go to the later contracted variable
            if best is None or (z, -y) < (best.substituted, -best.var):
                best = Step("H", y, q, z)
            break
    if best is not None:
        return best
    for y in p.path_vars:
        if p.occurs_outside_phase(y):
            continue
        pat = _y_pattern(p, y)
        if pat is None or pat[0] not in (HALF, THREE_HALVES):
            continue
        if degree_cap is not None and pat[1].degree() > degree_cap:
            continue
        return Step("omega", y, pat[1])
    return _basis_change(p, degree_cap)


def _contractible(p: PathSum, y: int, degree_cap: int | None) -> bool:
    if p.occurs_outside_phase(y):
        return False
    pat = _y_pattern(p, y)
    if pat is None:
        return False
    lin, q = pat
    if degree_cap is not None and q.degree() > degree_cap:
        return False
    if lin in (HALF, THREE_HALVES):
        return True
    if lin != 0:
        return False
    path_set = set(p.path_vars)
    for t in q.terms:
        if t.bit_count() == 1 and t != 1 << y and (t.bit_length() - 1) in path_set:
            if not any(u & t and u != t for u in q.terms):
                return True
    return False


def _basis_change(p: PathSum, degree_cap: int | None, max_tries: int = 32) -> Step | None:
    """Find ``S`` whose output columns sum to zero and a member freed by shifting the rest."""
    blocked = 0
    for c, _ in p.opaque:
        blocked |= c.support()
    columns: dict[int, int] = {}
    for y in p.path_vars:
        bit = 1 << y
        if blocked & bit:
            continue
        col = 0
        for i, f in enumerate(p.outputs):
            for t in f.terms:
                if t & bit:
                    if t != bit:
                        col = -1
                        break
                    col ^= 1 << i
            if col < 0:
                break
        if col > 0:
            columns[y] = col
    # incremental elimination tracking which variables built each reduced column
    pivots: dict[int, tuple[int, int]] = {}
    index = {y: j for j, y in enumerate(columns)}
    tries = 0
    for y, col in columns.items():
        combo = 1 << index[y]
        while col:
            low = col & -col
            if low not in pivots:
                pivots[low] = (col, combo)
                break
            pc, pcombo = pivots[low]
            col ^= pc
            combo ^= pcombo
        if col:
            continue
        members = [v for v in columns if combo >> index[v] & 1]
        for a in sorted(members, reverse=True):
            tries += 1
            step = Step("B", a, shifted=tuple(v for v in members if v != a))
            if _contractible(apply_step(p, step), a, degree_cap):
                return step
            if tries >= max_tries:
                return None
    return None


def apply_step(p: PathSum, step: Step) -> PathSum:
    out = p.copy()
    y = step.var
    bit = 1 << y
    if step.rule == "E":
        out.path_vars.remove(y)
        out.norm_exp -= 2
        return out
    rest = {m: a for m, a in out.phase.terms.items() if not m & bit}
    if step.rule == "H":
        z = step.substituted
        pz = step.witness + BoolPoly.var(z)
        zbit = 1 << z
        phase = PhasePoly()
        for m, a in rest.items():
            if m & zbit:
                phase.add_lifted(BoolPoly.mono(m ^ zbit) * pz, a)
            else:
                phase.add_term(m, a)
        out.phase = phase
        out.outputs = [f.substitute(z, pz) for f in out.outputs]
        out.opaque = [(c.substitute(z, pz), a) for c, a in out.opaque]
        out.path_vars = [v for v in out.path_vars if v not in (y, z)]
        out.norm_exp -= 2
        return out
    if step.rule == "omega":
        lin = p.phase.terms[bit].dyadic
        sign = 1 if lin == HALF else -1
        phase = PhasePoly(dict(rest))
        phase.add_term(ONE, Angle(Fraction(sign, 4)))
        phase.add_lifted(step.witness, Angle(Fraction(-sign, 2)))
        out.phase = phase
        out.path_vars.remove(y)
        out.norm_exp -= 1
        return out
    if step.rule == "B":
        subst = {}
        renamed = {}
        for b in step.shifted:
            u = out.fresh()
            renamed[b] = u
            subst[b] = BoolPoly.var(u) + BoolPoly.var(y)
        phase = PhasePoly()
        touched = 0
        for b in step.shifted:
            touched |= 1 << b
        for m, a in p.phase.terms.items():
            if not m & touched:
                phase.add_term(m, a)
                continue
            prod = BoolPoly.one()
            for v in la.iter_bits(m):
                prod = prod * subst.get(v, BoolPoly.var(v))
            phase.add_lifted(prod, a)
        out.phase = phase
        out.outputs = [f.substitute_many(subst) for f in out.outputs]
        out.path_vars = [renamed.get(v, v) for v in out.path_vars]
        return out
    raise ValueError(f"unknown rule {step.rule!r}")


def rewrite_step(p: PathSum, degree_cap: int | None = None) -> tuple[PathSum, str, BoolPoly | None] | None:
    step = _find_step(p, degree_cap)
    if step is None:
        return None
    return apply_step(p, step), step.rule, step.witness if step.rule == "H" else None


def reduce(p: PathSum, degree_cap: int | None = None, budget: int = DEFAULT_STEP_BUDGET,
           trace: list | None = None) -> tuple[PathSum, list[BoolPoly]]:
    """Rewrite to a fixpoint, harvesting constraints before every step.

    Constraints are reported over the variables of ``p``: variables created
    by a change of basis are translated back.
    """
    seen: set[BoolPoly] = set()
    constraints: list[BoolPoly] = []
    back: dict[int, BoolPoly] = {}
    cur = p
    for _ in range(budget):
        for q in harvest_constraints(cur, degree_cap):
            q = q.substitute_many(back) if back else q
            if q not in seen and not q.is_zero():
                seen.add(q)
                constraints.append(q)
        step = _find_step(cur, degree_cap)
        if step is None:
            break
        if trace is not None:
            trace.append(step)
        nxt = apply_step(cur, step)
        if step.rule == "B":
            a = step.var
            origin_a = back.get(a, BoolPoly.var(a))
            for i, b in enumerate(step.shifted):
                u = cur.next_var + i  # fresh variables are allocated in order
                back[u] = back.get(b, BoolPoly.var(b)) + origin_a
        cur = nxt
    return cur, constraints


# ---------------------------------------------------------------- abstraction


def _vocab_maps(p: PathSum):
    n = p.n_out
    if p.n_in != n:
        raise ValueError("abstraction needs as many inputs as outputs")
    voc = aff.Vocabulary(n, len(p.path_vars))
    return n, voc


def alpha_pol(p: PathSum) -> pd.TransitionIdeal:
    """∃Y. ⟨X' + f(X, Y)⟩ over a two-vocabulary."""
    n, voc = _vocab_maps(p)
    rename = {x: pd.pre_var(voc, i) for i, x in enumerate(p.inputs)}
    for j, y in enumerate(p.path_vars):
        rename[y] = pd.inter_var(voc, j)
    outs = [f.rename(rename) for f in p.outputs]
    return pd.project_inter(pd.from_outputs(voc, outs))


def alpha_affine(p: PathSum) -> aff.KsElement:
    """Affine outputs become rows; non-affine outputs are left unconstrained."""
    n, voc = _vocab_maps(p)
    col = {x: voc.pre(i) for i, x in enumerate(p.inputs)}
    for j, y in enumerate(p.path_vars):
        col[y] = voc.inter(j)
    rows = []
    for i, f in enumerate(p.outputs):
        if not f.is_linear():
            continue
        r = 1 << voc.post(i)
        for t in f.terms:
            r ^= 1 << (voc.const if t == ONE else col[t.bit_length() - 1])
        rows.append(r)
    return aff.project_inter(aff.KsElement.from_rows(voc, rows))


# ---------------------------------------------------------------- dense evaluation


def _angle_value(a: Angle, symbols: dict[str, float] | None) -> float:
    # symbol values are in units of pi, like the dyadic part
    v = float(a.dyadic)
    for name, c in a.symbolic:
        if symbols is None or name not in symbols:
            raise ValueError(f"symbolic angle {name!r} has no value")
        v += c * symbols[name]
    return v * math.pi


def evaluate_dense(p: PathSum, symbols: dict[str, float] | None = None) -> np.ndarray:
    """Dense matrix (rows: outputs, columns: inputs) by summing every path."""
    if p.n_in != p.n_out:
        raise ValueError("dense evaluation needs a square path sum")
    n = p.n_in
    if n > 10:
        raise ValueError("too many qubits for dense evaluation")
    if p.opaque and symbols is None:
        raise ValueError("symbolic angles present; supply values to evaluate")
    k = len(p.path_vars)
    dim = 1 << n
    mat = np.zeros((dim, dim), dtype=complex)
    scale = 2.0 ** (-p.norm_exp / 2)
    terms = [(m, float(a.dyadic) * math.pi) for m, a in p.phase.terms.items()]
    opaque = [(c, _angle_value(a, symbols)) for c, a in p.opaque]
    for xi in range(dim):
        base = 0
        for i, x in enumerate(p.inputs):
            if (xi >> i) & 1:
                base |= 1 << x
        for yi in range(1 << k):
            point = base
            for j, y in enumerate(p.path_vars):
                if (yi >> j) & 1:
                    point |= 1 << y
            theta = sum(v for m, v in terms if m & point == m)
            theta += sum(v for c, v in opaque if c.evaluate(point))
            out = 0
            for i, f in enumerate(p.outputs):
                if f.evaluate(point):
                    out |= 1 << i
            mat[out, xi] += cmath.exp(1j * theta)
    return mat * scale


def transition_support(p: PathSum) -> set[tuple[int, int]]:
    """Pairs (input, output) with nonzero amplitude, from the dense matrix."""
    m = evaluate_dense(p)
    return {(x, y) for y, x in zip(*np.nonzero(np.abs(m) > 1e-9))}
