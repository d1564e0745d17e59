"""Multilinear polynomials over GF(2), dyadic/symbolic angles and phase polynomials.

A monomial is an ``int`` bitmask over variable indices (bit ``i`` set means
variable ``i`` occurs); the empty mask is the constant 1.  Because every
variable occurs at most once, arithmetic is automatically modulo the field
equations ``x*x = x``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .f2linalg import iter_bits

ONE = 0  # the constant monomial


def monomial(*variables: int) -> int:
    m = 0
    for v in variables:
        m |= 1 << v
    return m


def monomial_vars(m: int) -> list[int]:
    return list(iter_bits(m))


# ---------------------------------------------------------------- orders


def grevlex_greater(a: int, b: int) -> bool:
    """Graded reverse lexicographic order; higher index means larger variable."""
    da, db = a.bit_count(), b.bit_count()
    if da != db:
        return da > db
    d = a ^ b
    return bool(d & -d & b)


_REVERSED_BYTES = [int(f"{b:08b}"[::-1], 2) for b in range(256)]


def _reverse_bits(m: int, width: int) -> int:
    out = 0
    nbytes = (width + 7) // 8
    for _ in range(nbytes):
        out = (out << 8) | _REVERSED_BYTES[m & 0xFF]
        m >>= 8
    return out >> (8 * nbytes - width)


class MonomialOrder:
    """Graded reverse lexicographic order, optionally refined into two blocks.

    With ``front`` set, monomials are compared first on their front-variable
    part and then on the rest, which makes every front variable dominate any
    monomial free of front variables (an elimination order).
    """

    __slots__ = ("front",)

    def __init__(self, front: int = 0):
        self.front = front

    @classmethod
    def grevlex(cls) -> "MonomialOrder":
        return cls(0)

    @classmethod
    def elimination(cls, front_vars: Iterable[int]) -> "MonomialOrder":
        return cls(monomial(*front_vars))

    @property
    def kind(self) -> str:
        return "block-elimination" if self.front else "grevlex"

    def greater(self, a: int, b: int) -> bool:
        f = self.front
        if f:
            af, bf = a & f, b & f
            if af != bf:
                return grevlex_greater(af, bf)
            a, b = a & ~f, b & ~f
        if a == b:
            return False
        return grevlex_greater(a, b)

    def key_fn(self, width: int) -> Callable[[int], int]:
        """Integer sort key (larger is greater) valid for monomials below ``1 << width``."""
        width = max(width, 1)
        mask = (1 << width) - 1
        shift = width + 8  # room for the degree field

        def grevlex_key(m: int) -> int:
            # equal degree: the monomial missing the smallest differing variable wins
            return (m.bit_count() << width) | (mask ^ _reverse_bits(m, width))

        front = self.front
        if not front:
            return grevlex_key
        rest = ~front
        return lambda m: (grevlex_key(m & front) << shift) | grevlex_key(m & rest)

    def leading(self, monomials: Iterable[int]) -> int:
        ms = list(monomials)
        width = max(m.bit_length() for m in ms)
        return max(ms, key=self.key_fn(width))

    def sort_key(self):
        def cmp(a: int, b: int) -> int:
            if a == b:
                return 0
            return 1 if self.greater(a, b) else -1

        return functools.cmp_to_key(cmp)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MonomialOrder) and other.front == self.front

    def __hash__(self) -> int:
        return hash(self.front)

    def __repr__(self) -> str:
        return f"MonomialOrder({self.kind}, front={bin(self.front)})"


GREVLEX = MonomialOrder()


# ---------------------------------------------------------------- variable naming


class VarPool:
    """Append-only registry of variable names; indices are allocation order."""

    def __init__(self, names: Iterable[str] = ()):
        self.names: list[str] = list(names)

    def new(self, name: str | None = None) -> int:
        idx = len(self.names)
        self.names.append(name if name is not None else f"v{idx}")
        return idx

    def fresh(self, prefix: str) -> int:
        return self.new(f"{prefix}{len(self.names)}")

    def __len__(self) -> int:
        return len(self.names)

    def name(self, i: int) -> str:
        return self.names[i] if i < len(self.names) else f"v{i}"


def default_name(i: int) -> str:
    return f"v{i}"


# ---------------------------------------------------------------- Boolean polynomials


class BoolPoly:
    """Multilinear polynomial over GF(2), stored as a frozenset of monomial masks."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Iterable[int] = ()):
        if isinstance(terms, frozenset):
            self.terms = terms
        else:
            acc: set[int] = set()
            for t in terms:
                if t in acc:
                    acc.remove(t)
                else:
                    acc.add(t)
            self.terms = frozenset(acc)
        self._hash = None

    # constructors
    @classmethod
    def zero(cls) -> "BoolPoly":
        return _ZERO

    @classmethod
    def one(cls) -> "BoolPoly":
        return _ONE

    @classmethod
    def const(cls, c: int) -> "BoolPoly":
        return _ONE if c & 1 else _ZERO

    @classmethod
    def var(cls, i: int) -> "BoolPoly":
        return cls(frozenset((1 << i,)))

    @classmethod
    def mono(cls, m: int) -> "BoolPoly":
        return cls(frozenset((m,)))

    @classmethod
    def linear(cls, variables: Iterable[int], const: int = 0) -> "BoolPoly":
        terms = [1 << v for v in variables]
        if const & 1:
            terms.append(ONE)
        return cls(terms)

    # arithmetic
    def __add__(self, other: "BoolPoly") -> "BoolPoly":
        if not other.terms:
            return self
        if not self.terms:
            return other
        return BoolPoly(self.terms ^ other.terms)

    __xor__ = __add__
    __sub__ = __add__

    def __mul__(self, other: "BoolPoly") -> "BoolPoly":
        if not self.terms or not other.terms:
            return _ZERO
        acc: set[int] = set()
        for a in self.terms:
            for b in other.terms:
                m = a | b
                if m in acc:
                    acc.remove(m)
                else:
                    acc.add(m)
        return BoolPoly(frozenset(acc))

    __and__ = __mul__

    def mul_monomial(self, m: int) -> "BoolPoly":
        if m == ONE:
            return self
        acc: set[int] = set()
        for a in self.terms:
            t = a | m
            if t in acc:
                acc.remove(t)
            else:
                acc.add(t)
        return BoolPoly(frozenset(acc))

    def add_const(self, c: int = 1) -> "BoolPoly":
        return self + BoolPoly.const(c)

    # structure
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_one(self) -> bool:
        return self.terms == _ONE.terms

    def is_const(self) -> bool:
        return all(t == ONE for t in self.terms)

    @property
    def const_bit(self) -> int:
        return 1 if ONE in self.terms else 0

    def without_const(self) -> "BoolPoly":
        if ONE in self.terms:
            return BoolPoly(self.terms - {ONE})
        return self

    def degree(self) -> int:
        return max((t.bit_count() for t in self.terms), default=-1)

    def support(self) -> int:
        """Bitmask of all variables occurring in the polynomial."""
        s = 0
        for t in self.terms:
            s |= t
        return s

    def variables(self) -> list[int]:
        return list(iter_bits(self.support()))

    def has_var(self, v: int) -> bool:
        bit = 1 << v
        return any(t & bit for t in self.terms)

    def is_linear(self) -> bool:
        return all(t.bit_count() <= 1 for t in self.terms)

    def leading(self, order: MonomialOrder = GREVLEX) -> int:
        return order.leading(self.terms)

    # evaluation & substitution
    def evaluate(self, assignment: int) -> int:
        """Evaluate at the point whose true variables form the mask ``assignment``."""
        v = 0
        for t in self.terms:
            if t & assignment == t:
                v ^= 1
        return v

    def evaluate_map(self, values: Mapping[int, int]) -> int:
        mask = 0
        for k, x in values.items():
            if x & 1:
                mask |= 1 << k
        return self.evaluate(mask)

    def cofactors(self, v: int) -> tuple["BoolPoly", "BoolPoly"]:
        """Split as ``v*high + low`` with ``v`` absent from both parts."""
        bit = 1 << v
        high, low = [], []
        for t in self.terms:
            if t & bit:
                high.append(t ^ bit)
            else:
                low.append(t)
        return BoolPoly(high), BoolPoly(frozenset(low))

    def substitute(self, v: int, r: "BoolPoly") -> "BoolPoly":
        if r.has_var(v):
            raise ValueError("substituted variable occurs in its replacement")
        bit = 1 << v
        if not any(t & bit for t in self.terms):
            return self
        high, low = self.cofactors(v)
        return low + high * r

    def substitute_many(self, mapping: Mapping[int, "BoolPoly"]) -> "BoolPoly":
        """Simultaneous substitution of several variables."""
        if not mapping:
            return self
        keys = 0
        for k in mapping:
            keys |= 1 << k
        acc = _ZERO
        cache: dict[int, BoolPoly] = {}
        for t in self.terms:
            hit = t & keys
            if not hit:
                acc = acc + BoolPoly.mono(t)
                continue
            prod = cache.get(hit)
            if prod is None:
                prod = _ONE
                for v in iter_bits(hit):
                    prod = prod * mapping[v]
                cache[hit] = prod
            acc = acc + prod.mul_monomial(t & ~keys)
        return acc

    def rename(self, mapping: Mapping[int, int]) -> "BoolPoly":
        out = []
        for t in self.terms:
            m = 0
            for v in iter_bits(t):
                m |= 1 << mapping.get(v, v)
            out.append(m)
        return BoolPoly(out)

    # comparison & display
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoolPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def sorted_terms(self, order: MonomialOrder = GREVLEX) -> list[int]:
        return sorted(self.terms, key=order.sort_key(), reverse=True)

    def render(self, name: Callable[[int], str] = default_name, order: MonomialOrder = GREVLEX) -> str:
        if not self.terms:
            return "0"
        parts = []
        for t in reversed(self.sorted_terms(order)):
            parts.append("1" if t == ONE else "".join(name(v) for v in iter_bits(t)))
        return " ⊕ ".join(parts)

    def __repr__(self) -> str:
        return f"BoolPoly({self.render()})"


_ZERO = BoolPoly(frozenset())
_ONE = BoolPoly(frozenset((ONE,)))


def add(p: BoolPoly, q: BoolPoly) -> BoolPoly:
    return p + q


def mul(p: BoolPoly, q: BoolPoly) -> BoolPoly:
    return p * q


def substitute(p: BoolPoly, v: int, r: BoolPoly) -> BoolPoly:
    return p.substitute(v, r)


# ---------------------------------------------------------------- angles

_TWO = Fraction(2)


def _mod2(x: Fraction) -> Fraction:
    return x % _TWO


@dataclass(frozen=True)
class Angle:
    """A rotation angle in units of pi: dyadic rational mod 2 plus symbolic atoms."""

    dyadic: Fraction = Fraction(0)
    symbolic: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        d = self.dyadic if isinstance(self.dyadic, Fraction) else Fraction(self.dyadic)
        object.__setattr__(self, "dyadic", _mod2(d))
        merged: dict[str, int] = {}
        for name, c in self.symbolic:
            merged[name] = merged.get(name, 0) + c
        object.__setattr__(self, "symbolic", tuple(sorted((k, c) for k, c in merged.items() if c)))

    @classmethod
    def of(cls, value) -> "Angle":
        if isinstance(value, Angle):
            return value
        return cls(Fraction(value))

    @classmethod
    def atom(cls, name: str, coeff: int = 1) -> "Angle":
        return cls(Fraction(0), ((name, coeff),))

    def __add__(self, other: "Angle") -> "Angle":
        other = Angle.of(other)
        return Angle(self.dyadic + other.dyadic, self.symbolic + other.symbolic)

    def __neg__(self) -> "Angle":
        return Angle(-self.dyadic, tuple((k, -c) for k, c in self.symbolic))

    def __sub__(self, other: "Angle") -> "Angle":
        return self + (-Angle.of(other))

    def scale(self, k: int) -> "Angle":
        return Angle(self.dyadic * k, tuple((n, c * k) for n, c in self.symbolic))

    def is_zero(self) -> bool:
        return self.dyadic == 0 and not self.symbolic

    def is_dyadic(self) -> bool:
        return not self.symbolic

    def is_odd_quarter(self) -> bool:
        """True when this is an odd multiple of pi/4 (a T-type rotation)."""
        return self.is_dyadic() and self.dyadic.denominator == 4

    def is_clifford(self) -> bool:
        return self.is_dyadic() and self.dyadic.denominator <= 2

    def counts_as_t(self) -> bool:
        """Non-Clifford rotations count towards the T metric when they are odd quarters."""
        return self.is_odd_quarter()

    def __str__(self) -> str:
        parts = []
        if self.dyadic or not self.symbolic:
            parts.append(str(self.dyadic))
        for name, c in self.symbolic:
            parts.append(name if c == 1 else f"{c}*{name}")
        return "+".join(parts).replace("+-", "-")


ZERO_ANGLE = Angle()
T_ANGLE = Angle(Fraction(1, 4))


# ---------------------------------------------------------------- real lifts


def lift(p: BoolPoly) -> dict[int, int]:
    """Integer multilinear polynomial agreeing with ``p`` on 0/1 points.

    Built with the recurrence lift(P + t) = lift(P) + t - 2 lift(P) t.
    """
    acc: dict[int, int] = {}
    for t in sorted(p.terms):
        cross: dict[int, int] = {}
        for m, c in acc.items():
            k = m | t
            cross[k] = cross.get(k, 0) - 2 * c
        nxt = dict(acc)
        nxt[t] = nxt.get(t, 0) + 1
        for m, c in cross.items():
            nxt[m] = nxt.get(m, 0) + c
        acc = {m: c for m, c in nxt.items() if c}
    return acc


def evaluate_int(poly: Mapping[int, int], assignment: int) -> int:
    return sum(c for m, c in poly.items() if m & assignment == m)


def scaled_lift(p: BoolPoly, coeff: Fraction) -> dict[int, Fraction]:
    """``coeff * lift(p)`` with coefficients reduced mod 2, zero entries dropped.

    Reducing early truncates the expansion: a product of ``j`` monomials
    carries a factor 2**(j-1), which vanishes mod 2 once it exceeds the
    denominator of ``coeff``.
    """
    acc: dict[int, Fraction] = {}
    if coeff % _TWO == 0:
        return acc
    for t in sorted(p.terms):
        nxt = dict(acc)
        c = nxt.get(t, Fraction(0)) + coeff
        nxt[t] = c
        for m, a in acc.items():
            k = m | t
            nxt[k] = nxt.get(k, Fraction(0)) - 2 * a
        acc = {}
        for m, a in nxt.items():
            a = a % _TWO
            if a:
                acc[m] = a
    return acc


# ---------------------------------------------------------------- phase polynomials


@dataclass
class PhasePoly:
    """Map from monomials to angles; represents x -> exp(i*pi*sum a_m m(x))."""

    terms: dict[int, Angle] = field(default_factory=dict)

    def copy(self) -> "PhasePoly":
        return PhasePoly(dict(self.terms))

    def add_term(self, m: int, a: Angle) -> None:
        cur = self.terms.get(m)
        new = a if cur is None else cur + a
        if new.is_zero():
            self.terms.pop(m, None)
        else:
            self.terms[m] = new

    def __add__(self, other: "PhasePoly") -> "PhasePoly":
        out = self.copy()
        for m, a in other.terms.items():
            out.add_term(m, a)
        return out

    def add_lifted(self, p: BoolPoly, angle: Angle) -> None:
        """Add ``angle * lift(p)``; requires a dyadic angle."""
        if not angle.is_dyadic():
            raise ValueError("symbolic angles cannot be lifted")
        for m, c in scaled_lift(p, angle.dyadic).items():
            self.add_term(m, Angle(c))

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, assignment: int) -> Angle:
        total = ZERO_ANGLE
        for m, a in self.terms.items():
            if m & assignment == m:
                total = total + a
        return total

    def degree(self) -> int:
        return max((m.bit_count() for m in self.terms), default=-1)

    def render(self, name: Callable[[int], str] = default_name) -> str:
        if not self.terms:
            return "0"
        key = GREVLEX.sort_key()
        parts = []
        for m in sorted(self.terms, key=key):
            mono = "1" if m == ONE else "".join(name(v) for v in iter_bits(m))
            parts.append(f"{self.terms[m]}*{mono}")
        return " + ".join(parts)
