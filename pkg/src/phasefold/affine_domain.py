"""Affine relations over GF(2) as constraint matrices (the KS representation).

Columns are laid out as ``[X' | X | Y | const]``: post-state bits, pre-state
bits, intermediate bits and the affine constant.  An element is the set of
points ``v`` with ``row · (v, 1) = 0`` for every row.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import f2linalg as la
from .f2linalg import BitRow, F2Matrix


@dataclass(frozen=True)
class Vocabulary:
    n: int
    k: int = 0

    @property
    def ncols(self) -> int:
        return 2 * self.n + self.k + 1

    def post(self, i: int) -> int:
        return i

    def pre(self, i: int) -> int:
        return self.n + i

    def inter(self, j: int) -> int:
        return 2 * self.n + j

    @property
    def const(self) -> int:
        return 2 * self.n + self.k

    def with_k(self, k: int) -> "Vocabulary":
        return Vocabulary(self.n, k)

    def row(self, post=(), pre=(), inter=(), const: int = 0) -> int:
        r = 0
        for i in post:
            r ^= 1 << self.post(i)
        for i in pre:
            r ^= 1 << self.pre(i)
        for j in inter:
            r ^= 1 << self.inter(j)
        if const & 1:
            r ^= 1 << self.const
        return r


def _move_columns(row: int, src: Vocabulary, dst: Vocabulary, post_to, pre_to, inter_to) -> int:
    """Re-index a row of ``src`` into ``dst``; each ``*_to`` maps an index to a dst column."""
    out = 0
    for c in la.iter_bits(row):
        if c == src.const:
            out ^= 1 << dst.const
        elif c < src.n:
            out ^= 1 << post_to(c)
        elif c < 2 * src.n:
            out ^= 1 << pre_to(c - src.n)
        else:
            out ^= 1 << inter_to(c - 2 * src.n)
    return out


class KsElement:
    __slots__ = ("voc", "matrix")

    def __init__(self, voc: Vocabulary, matrix: F2Matrix):
        if matrix.ncols != voc.ncols:
            raise ValueError("matrix width does not match vocabulary")
        self.voc = voc
        self.matrix = la.rref(matrix)

    @classmethod
    def from_rows(cls, voc: Vocabulary, rows) -> "KsElement":
        return cls(voc, F2Matrix.canonical(voc.ncols, rows))

    @property
    def is_bottom(self) -> bool:
        return self.matrix.is_bottom

    @property
    def is_top(self) -> bool:
        return len(self.matrix) == 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KsElement):
            return NotImplemented
        return self.voc == other.voc and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash((self.voc, self.matrix))

    def leq(self, other: "KsElement") -> bool:
        """Inclusion of concretizations."""
        if self.is_bottom:
            return True
        return all(la.reduce_bits(self.matrix, r) == 0 for r in other.matrix.rows)

    def points(self) -> set[int]:
        return set(la.kernel_points(self.matrix))

    def render(self, post_names=None, pre_names=None, inter_names=None) -> str:
        voc = self.voc
        post_names = post_names or [f"x{i}'" for i in range(voc.n)]
        pre_names = pre_names or [f"x{i}" for i in range(voc.n)]
        inter_names = inter_names or [f"y{j}" for j in range(voc.k)]
        if self.is_bottom:
            return "⊥"
        parts = []
        for r in self.matrix.rows:
            lits = []
            for c in la.iter_bits(r):
                if c == voc.const:
                    lits.append("1")
                elif c < voc.n:
                    lits.append(post_names[c])
                elif c < 2 * voc.n:
                    lits.append(pre_names[c - voc.n])
                else:
                    lits.append(inter_names[c - 2 * voc.n])
            parts.append(" ⊕ ".join(lits))
        return "⟨" + ", ".join(parts) + "⟩"

    def __repr__(self) -> str:
        return f"KsElement({self.render()})"


def top(voc: Vocabulary) -> KsElement:
    return KsElement(voc, F2Matrix(voc.ncols, (), canonical_form=True))


def bottom(voc: Vocabulary) -> KsElement:
    return KsElement(voc, F2Matrix.bottom(voc.ncols))


def identity(voc: Vocabulary) -> KsElement:
    return KsElement.from_rows(voc, [voc.row(post=[i], pre=[i]) for i in range(voc.n)])


def meet(a: KsElement, b: KsElement) -> KsElement:
    _check(a, b)
    return KsElement(a.voc, F2Matrix.canonical(a.voc.ncols, a.matrix.rows + b.matrix.rows))


def join(a: KsElement, b: KsElement) -> KsElement:
    """Affine hull of the union.

    Rows ``[A | A]`` and ``[B | 0]`` are stacked and the left block projected
    away; what survives spans the intersection of the two row spaces.
    """
    _check(a, b)
    if a.is_bottom:
        return b
    if b.is_bottom:
        return a
    w = a.voc.ncols
    rows = [r | (r << w) for r in a.matrix.rows] + list(b.matrix.rows)
    return KsElement(a.voc, la.project(F2Matrix(2 * w, rows), range(w)))


def compose(a: KsElement, b: KsElement) -> KsElement:
    """Relational composition: first ``a``, then ``b`` (both over ``X', X`` only)."""
    _check(a, b)
    voc = a.voc
    if voc.k:
        raise ValueError("compose expects two-vocabulary elements")
    if a.is_bottom or b.is_bottom:
        return bottom(voc)
    n = voc.n
    # scratch layout [X'' | X' | X | const]; X'' is the shared middle state
    scratch = Vocabulary(n, n)
    mid_a = lambda i: i  # noqa: E731
    rows = []
    for r in a.matrix.rows:
        rows.append(_move_columns(r, voc, scratch, mid_a, lambda i: 2 * n + i, None))
    for r in b.matrix.rows:
        rows.append(_move_columns(r, voc, scratch, lambda i: n + i, mid_a, None))
    return KsElement(voc, la.project(F2Matrix(scratch.ncols, rows), range(n)))


def star(a: KsElement) -> KsElement:
    """Least relation containing the identity and closed under composition with ``a``."""
    voc = a.voc
    if voc.k:
        raise ValueError("star expects a two-vocabulary element")
    current = identity(voc)
    limit = 2 * voc.n + 1
    for step in range(limit + 1):
        nxt = join(current, compose(current, a))
        if nxt == current:
            return current
        current = nxt
    raise AssertionError("affine Kleene iteration failed to stabilize")


def is_solvable(a: KsElement) -> bool:
    """The X' block is the identity: each post bit is given explicitly."""
    n = a.voc.n
    rows = a.matrix.rows
    if a.is_bottom or len(rows) < n:
        return False
    post_mask = (1 << n) - 1
    for i in range(n):
        if rows[i] & post_mask != 1 << i:
            return False
    return all(r & post_mask == 0 for r in rows[n:])


def compose_ff(a: KsElement, s: KsElement) -> KsElement:
    """Compose solvable ``a`` with two-vocabulary ``s`` through fresh intermediates.

    The result has ``n`` extra intermediate columns ``Y'`` holding the state
    after ``s``; its post-state is simply ``X' = Y'``.
    """
    if not is_solvable(a):
        raise ValueError("compose_ff requires a solvable relation")
    voc, n = a.voc, a.voc.n
    if s.voc.n != n or s.voc.k:
        raise ValueError("summary vocabulary mismatch")
    out_voc = voc.with_k(voc.k + n)
    fresh = [voc.k + i for i in range(n)]

    def keep(r: int) -> int:
        return _move_columns(r, voc, out_voc, lambda i: out_voc.post(i), out_voc.pre, out_voc.inter)

    outputs = []
    rows = []
    for i, r in enumerate(a.matrix.rows):
        body = keep(r)
        if i < n:
            outputs.append(body ^ (1 << out_voc.post(i)))  # x'_i := f_i, expressed without x'_i
        else:
            rows.append(body)
    for i in range(n):
        rows.append(out_voc.row(post=[i], inter=[fresh[i]]))
    for r in s.matrix.rows:
        acc = 0
        for c in la.iter_bits(r):
            if c == s.voc.const:
                acc ^= 1 << out_voc.const
            elif c < n:
                acc ^= 1 << out_voc.inter(fresh[c])
            else:
                acc ^= outputs[c - n]
        rows.append(acc)
    return KsElement.from_rows(out_voc, rows)


def project_inter(a: KsElement) -> KsElement:
    """Existentially quantify every intermediate column."""
    voc = a.voc
    two = Vocabulary(voc.n, 0)
    return KsElement(two, la.project(a.matrix, [voc.inter(j) for j in range(voc.k)]))


def reduce(a: KsElement, f: BitRow) -> BitRow:
    if a.is_bottom:
        return BitRow.zero(f.width)
    return la.reduce_row(a.matrix, f)


def _check(a: KsElement, b: KsElement) -> None:
    if a.voc != b.voc:
        raise ValueError("vocabulary mismatch")
