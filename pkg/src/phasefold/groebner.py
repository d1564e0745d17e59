"""Gröbner bases for ideals of multilinear polynomials over GF(2).

All arithmetic happens in GF(2)[X]/(x^2 + x), so the field equations never
appear as generators.  Completion still has to account for them: for every
generator ``g`` and every variable ``v`` of its leading monomial, the
polynomial ``v*g + g`` (the S-polynomial of ``g`` with ``v^2 + v``) is
reduced alongside the ordinary S-pairs.
"""

from __future__ import annotations

import heapq
from typing import Iterable, Sequence

from .f2linalg import iter_bits
from .polyring import GREVLEX, ONE, BoolPoly, MonomialOrder, default_name

DEFAULT_PAIR_BUDGET = 20000


class GroebnerBudgetExceeded(RuntimeError):
    """Completion gave up; ``partial`` holds a (non-canonical) generating set."""

    def __init__(self, partial: list[BoolPoly]):
        super().__init__(f"Gröbner completion budget exhausted with {len(partial)} generators")
        self.partial = partial


def _toggle(s: set, t: int) -> None:
    if t in s:
        s.remove(t)
    else:
        s.add(t)


def _reduce_terms(terms: Iterable[int], basis: Sequence[tuple[int, frozenset]], order: MonomialOrder) -> set[int]:
    """Full multivariate division of a term set by ``(leading, terms)`` pairs."""
    p = set(terms)
    rem: set[int] = set()
    if not p:
        return rem
    width = max(m.bit_length() for m in p)
    for _, gterms in basis:
        width = max(width, max((t.bit_length() for t in gterms), default=0))
    key = order.key_fn(width)
    # max-heap with lazy deletion; division only ever adds terms below the current leader
    heap = [(-key(t), t) for t in p]
    heapq.heapify(heap)
    while heap:
        _, lm = heapq.heappop(heap)
        if lm not in p:
            continue
        for glm, gterms in basis:
            if lm & glm == glm:
                q = lm & ~glm
                for t in gterms:
                    u = t | q
                    if u in p:
                        p.remove(u)
                    else:
                        p.add(u)
                        heapq.heappush(heap, (-key(u), u))
                break
        else:
            p.remove(lm)
            rem.add(lm)
    return rem



class IdealBasis:
    """Generating set of a multilinear ideal, reduced Gröbner basis when ``reduced``."""

    __slots__ = ("gens", "order", "reduced", "degraded", "_pairs")

    def __init__(self, gens: Iterable[BoolPoly], order: MonomialOrder = GREVLEX, reduced: bool = False,
                 degraded: bool = False):
        self.gens = tuple(gens)
        self.order = order
        self.reduced = reduced
        self.degraded = degraded
        self._pairs = None

    @classmethod
    def top(cls, order: MonomialOrder = GREVLEX) -> "IdealBasis":
        return cls((), order, reduced=True)

    @classmethod
    def unit(cls, order: MonomialOrder = GREVLEX) -> "IdealBasis":
        return cls((BoolPoly.one(),), order, reduced=True)

    @property
    def is_unit(self) -> bool:
        return any(g.is_one() for g in self.gens)

    @property
    def is_top(self) -> bool:
        return not self.gens

    def _division_pairs(self) -> list[tuple[int, frozenset]]:
        if self._pairs is None:
            self._pairs = [(g.leading(self.order), g.terms) for g in self.gens]
        return self._pairs

    def normal_form(self, p: BoolPoly) -> BoolPoly:
        if not self.gens or not p.terms:
            return p
        if self.is_unit:
            return BoolPoly.zero()
        return BoolPoly(frozenset(_reduce_terms(p.terms, self._division_pairs(), self.order)))

    def contains(self, p: BoolPoly) -> bool:
        return self.normal_form(p).is_zero()

    def support(self) -> int:
        s = 0
        for g in self.gens:
            s |= g.support()
        return s

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IdealBasis):
            return NotImplemented
        return set(self.gens) == set(other.gens)

    def __hash__(self) -> int:
        return hash(frozenset(self.gens))

    def render(self, name=default_name) -> str:
        return "⟨" + ", ".join(g.render(name, self.order) for g in self.gens) + "⟩"

    def __repr__(self) -> str:
        return f"IdealBasis({self.render()})"


def _interreduce(polys: list[BoolPoly], order: MonomialOrder) -> list[BoolPoly]:
    """Turn a Gröbner basis into the unique reduced one."""
    leads = [(p.leading(order), p) for p in polys if p.terms]
    leads.sort(key=lambda lp: order.sort_key()(lp[0]))
    minimal: list[tuple[int, BoolPoly]] = []
    for lm, p in leads:
        if any(lm & m == m for m, _ in minimal):
            continue
        minimal.append((lm, p))
    divisors = [(m, q.terms) for m, q in minimal]
    final = []
    for lm, p in minimal:
        tail = _reduce_terms(p.terms - {lm}, divisors, order)
        tail.add(lm)
        final.append(BoolPoly(frozenset(tail)))
    final.sort(key=lambda p: order.sort_key()(p.leading(order)))
    return final


def buchberger(gens: Iterable[BoolPoly], order: MonomialOrder = GREVLEX,
               budget: int | None = DEFAULT_PAIR_BUDGET) -> IdealBasis:
    """Reduced Gröbner basis of ``<gens> + field equations``.

    Pairs are processed in order of the degree of their lcm (normal sugar
    strategy for homogeneous-ish input); coprime leading monomials are skipped.
    Raises :class:`GroebnerBudgetExceeded` when more than ``budget`` pairs are
    needed.
    """
    basis: list[tuple[int, frozenset]] = []
    reducers: list[tuple[int, frozenset]] = []  # elements whose leading monomial is minimal
    queue: list[tuple[int, int, int, object]] = []
    pending: set[tuple[int, int]] = set()
    counter = 0
    processed = 0

    def push(sugar: int, kind: int, payload) -> None:
        nonlocal counter
        counter += 1
        heapq.heappush(queue, (sugar, counter, kind, payload))

    def chain_redundant(i: int, j: int, lcm: int) -> bool:
        # Buchberger's second criterion
        for k, (lk, _) in enumerate(basis):
            if k in (i, j) or lk & lcm != lk:
                continue
            if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
                return True
        return False

    for g in gens:
        if g.terms:
            push(g.degree(), 0, g.terms)

    while queue:
        _, _, kind, payload = heapq.heappop(queue)
        if kind == 1:
            pending.discard(payload)
            i, j = payload
            if chain_redundant(i, j, basis[i][0] | basis[j][0]):
                continue
        processed += 1
        if budget is not None and processed > budget:
            raise GroebnerBudgetExceeded([BoolPoly(t) for _, t in basis])
        if kind == 0:
            terms = payload
        elif kind == 1:
            (li, ti), (lj, tj) = basis[i], basis[j]
            lcm = li | lj
            s: set[int] = set()
            qi, qj = lcm & ~li, lcm & ~lj
            for t in ti:
                _toggle(s, t | qi)
            for t in tj:
                _toggle(s, t | qj)
            terms = s
        else:
            i, v = payload
            _, ti = basis[i]
            bit = 1 << v
            s = set()
            for t in ti:
                if not t & bit:
                    _toggle(s, t | bit)
                    _toggle(s, t)
            terms = s
        rem = _reduce_terms(terms, reducers, order)
        if not rem:
            continue
        if rem == {ONE}:
            return IdealBasis.unit(order)
        lm = order.leading(rem)
        k = len(basis)
        entry = (lm, frozenset(rem))
        basis.append(entry)
        reducers = [r for r in reducers if r[0] & lm != lm]
        reducers.append(entry)
        for i in range(k):
            li = basis[i][0]
            if li & lm:
                pending.add((i, k))
                push((li | lm).bit_count(), 1, (i, k))
        for v in iter_bits(lm):
            push(lm.bit_count() + 1, 2, (k, v))

    return IdealBasis(_interreduce([BoolPoly(t) for _, t in basis], order), order, reduced=True)


def groebner_or_degraded(gens: Iterable[BoolPoly], order: MonomialOrder = GREVLEX,
                         budget: int | None = DEFAULT_PAIR_BUDGET) -> IdealBasis:
    """Like :func:`buchberger`, but return a non-canonical basis instead of raising."""
    gens = list(gens)
    try:
        return buchberger(gens, order, budget)
    except GroebnerBudgetExceeded as exc:
        return IdealBasis(exc.partial or gens, order, reduced=False, degraded=True)


def normal_form(g: IdealBasis, p: BoolPoly) -> BoolPoly:
    return g.normal_form(p)


def eliminate(g: IdealBasis, front: Iterable[int], budget: int | None = DEFAULT_PAIR_BUDGET) -> IdealBasis:
    """Elimination ideal ``I ∩ GF(2)[other variables]`` as a reduced grevlex basis."""
    front_mask = 0
    for v in front:
        front_mask |= 1 << v
    if not front_mask & g.support():
        return buchberger(g.gens, GREVLEX, budget) if g.order != GREVLEX or not g.reduced else g
    block = buchberger(g.gens, MonomialOrder(front_mask), budget)
    if block.is_unit:
        return IdealBasis.unit(GREVLEX)
    kept = [p for p in block.gens if not p.support() & front_mask]
    return buchberger(kept, GREVLEX, budget)


def ideal_sum(a: IdealBasis, b: IdealBasis, budget: int | None = DEFAULT_PAIR_BUDGET) -> IdealBasis:
    if not b.gens and a.reduced:
        return a
    if not a.gens and b.reduced:
        return b
    return buchberger(list(a.gens) + list(b.gens), a.order, budget)


def ideal_product(a: IdealBasis, b: IdealBasis, budget: int | None = DEFAULT_PAIR_BUDGET) -> IdealBasis:
    if a.is_unit:
        return b
    if b.is_unit:
        return a
    if not a.gens or not b.gens:
        return IdealBasis.top(a.order)
    return buchberger([p * q for p in a.gens for q in b.gens], a.order, budget)


def ideal_intersection(a: IdealBasis, b: IdealBasis, budget: int | None = DEFAULT_PAIR_BUDGET) -> IdealBasis:
    """``I ∩ J`` through the classic ``t*I + (1-t)*J`` elimination trick."""
    t = max(a.support().bit_length(), b.support().bit_length())
    tv = BoolPoly.var(t)
    gens = [tv * p for p in a.gens] + [(tv + BoolPoly.one()) * q for q in b.gens]
    if not a.gens or not b.gens:
        return IdealBasis.top(a.order)
    return eliminate(IdealBasis(gens), [t], budget)


# ---------------------------------------------------------------- brute-force helpers


def variety(gens: Iterable[BoolPoly], nvars: int) -> set[int]:
    """All points of GF(2)^nvars (as masks) where every generator vanishes."""
    gens = list(gens)
    return {x for x in range(1 << nvars) if all(g.evaluate(x) == 0 for g in gens)}


def vanishing_ideal(points: Iterable[int], nvars: int) -> IdealBasis:
    """Reduced basis of the ideal of all polynomials vanishing on ``points``.

    Uses indicator polynomials: the complement points each contribute the
    product of literals that is 1 exactly at that point.
    """
    pts = set(points)
    gens = []
    for x in range(1 << nvars):
        if x in pts:
            continue
        ind = BoolPoly.one()
        for v in range(nvars):
            lit = BoolPoly.var(v) if (x >> v) & 1 else BoolPoly.var(v) + BoolPoly.one()
            ind = ind * lit
        gens.append(ind)
    return buchberger(gens, GREVLEX, budget=None)
