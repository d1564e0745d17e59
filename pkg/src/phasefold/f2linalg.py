"""Bit-packed linear algebra over GF(2).

Rows are Python integers used as bit vectors: column ``j`` is bit ``j``.
Arbitrary-precision integers give word-wise XOR and bit scans for free, so a
row of any width costs a handful of machine words.

The pivot of a row is its lowest set column.  The last column of every matrix
is reserved for the affine constant, so the distinguished inconsistent row
``0 ... 0 | 1`` always sorts last and marks the bottom element.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


def lowest_bit(x: int) -> int:
    """Index of the lowest set bit of a nonzero integer."""
    return (x & -x).bit_length() - 1


def iter_bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


@dataclass(frozen=True)
class BitRow:
    bits: int
    width: int

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "BitRow":
        bits = 0
        for j, v in enumerate(values):
            if v & 1:
                bits |= 1 << j
        return cls(bits, len(values))

    @classmethod
    def zero(cls, width: int) -> "BitRow":
        return cls(0, width)

    def to_list(self) -> list[int]:
        return [(self.bits >> j) & 1 for j in range(self.width)]

    def __getitem__(self, j: int) -> int:
        return (self.bits >> j) & 1

    def __xor__(self, other: "BitRow") -> "BitRow":
        if self.width != other.width:
            raise ValueError("row width mismatch")
        return BitRow(self.bits ^ other.bits, self.width)

    def is_zero(self) -> bool:
        return self.bits == 0

    def __str__(self) -> str:
        body = "".join(str(b) for b in self.to_list())
        return f"[{body[:-1]}|{body[-1:]}]" if body else "[]"


def _eliminate(rows: Iterable[int]) -> list[int]:
    """Reduced row echelon form of a list of packed rows (lowest pivot first)."""
    basis: dict[int, int] = {}
    for r in rows:
        for p, b in basis.items():
            if (r >> p) & 1:
                r ^= b
        if not r:
            continue
        p = lowest_bit(r)
        for q in list(basis):
            if (basis[q] >> p) & 1:
                basis[q] ^= r
        basis[p] = r
    return [basis[p] for p in sorted(basis)]


class F2Matrix:
    """Immutable matrix over GF(2) whose last column is the affine constant.

    Matrices built through :meth:`canonical` (or :func:`rref`) are in reduced
    row echelon form with no zero rows; an inconsistent system collapses to the
    single row holding only the constant bit.
    """

    __slots__ = ("ncols", "rows", "canonical_form", "_pivots")

    def __init__(self, ncols: int, rows: Iterable[int] = (), canonical_form: bool = False):
        self.ncols = ncols
        mask = (1 << ncols) - 1
        self.rows = tuple(r for r in rows if r)
        if any(r & ~mask for r in self.rows):
            raise ValueError("row wider than matrix")
        self.canonical_form = canonical_form
        self._pivots = None

    @classmethod
    def canonical(cls, ncols: int, rows: Iterable[int] = ()) -> "F2Matrix":
        reduced = _eliminate(rows)
        const = 1 << (ncols - 1) if ncols else 0
        if const and const in reduced:
            reduced = [const]
        return cls(ncols, reduced, canonical_form=True)

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "F2Matrix":
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(ncols, [BitRow.from_list(r).bits for r in rows])

    @classmethod
    def bottom(cls, ncols: int) -> "F2Matrix":
        return cls(ncols, [1 << (ncols - 1)], canonical_form=True)

    @property
    def const_bit(self) -> int:
        return 1 << (self.ncols - 1)

    @property
    def pivots(self) -> dict[int, int]:
        if self._pivots is None:
            self._pivots = {lowest_bit(r): i for i, r in enumerate(self.rows)}
        return self._pivots

    @property
    def is_bottom(self) -> bool:
        return self.ncols > 0 and self.const_bit in self.rows

    def __len__(self) -> int:
        return len(self.rows)

    def bit_rows(self) -> list[BitRow]:
        return [BitRow(r, self.ncols) for r in self.rows]

    def to_lists(self) -> list[list[int]]:
        return [BitRow(r, self.ncols).to_list() for r in self.rows]

    def stack(self, other: "F2Matrix") -> "F2Matrix":
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return F2Matrix(self.ncols, self.rows + other.rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, F2Matrix):
            return NotImplemented
        return self.ncols == other.ncols and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.ncols, self.rows))

    def __repr__(self) -> str:
        return f"F2Matrix({self.ncols}, {[str(r) for r in self.bit_rows()]})"


def rref(m: F2Matrix) -> F2Matrix:
    if m.canonical_form:
        return m
    return F2Matrix.canonical(m.ncols, m.rows)


def reduce_bits(m: F2Matrix, f: int) -> int:
    """Normal form of packed row ``f`` modulo the row space of canonical ``m``."""
    for p, i in m.pivots.items():
        if (f >> p) & 1:
            f ^= m.rows[i]
    return f


def reduce_row(m: F2Matrix, f: BitRow) -> BitRow:
    if f.width != m.ncols:
        raise ValueError(f"row width {f.width} does not match matrix width {m.ncols}")
    if not m.canonical_form:
        m = rref(m)
    return BitRow(reduce_bits(m, f.bits), f.width)


def in_rowspace(m: F2Matrix, f: BitRow) -> bool:
    return reduce_row(m, f).is_zero()


def select_columns(row: int, keep: Sequence[int]) -> int:
    """Compress ``row`` onto the listed columns, in the listed order."""
    out = 0
    for j, c in enumerate(keep):
        if (row >> c) & 1:
            out |= 1 << j
    return out


def project(m: F2Matrix, cols: Iterable[int]) -> F2Matrix:
    """Existentially eliminate ``cols`` and drop them from the column set.

    The projected columns act as the left-most columns of a logical column
    permutation; rows that still touch them after elimination are discarded.
    """
    drop = set(cols)
    if m.ncols and (m.ncols - 1) in drop:
        raise ValueError("the constant column cannot be projected")
    remaining = list(m.rows)
    for c in sorted(drop):
        bit = 1 << c
        hit = next((i for i, r in enumerate(remaining) if r & bit), None)
        if hit is None:
            continue
        piv = remaining.pop(hit)
        remaining = [r ^ piv if r & bit else r for r in remaining]
    keep = [c for c in range(m.ncols) if c not in drop]
    return F2Matrix.canonical(len(keep), (select_columns(r, keep) for r in remaining))


def kernel_points(m: F2Matrix) -> list[int]:
    """All assignments (packed, excluding the constant column) satisfying ``m``.

    Brute force; intended for small test matrices.
    """
    nvars = m.ncols - 1
    out = []
    const = m.const_bit
    for v in range(1 << nvars):
        if all((bin(r & v).count("1") + (1 if r & const else 0)) % 2 == 0 for r in m.rows):
            out.append(v)
    return out
