"""Transition ideals: polynomial relations between pre- and post-states.

An element is a reduced Gröbner basis over the variables of a
:class:`~phasefold.affine_domain.Vocabulary`.  Inside an ideal the variables
are numbered ``X`` (``0..n-1``), then ``Y`` (``n..n+k-1``), then ``X'``, so
post-state variables are the largest in grevlex and reduce towards pre-state
expressions.  Larger ideals are smaller relations: join is the ideal product
and meet is the ideal sum.
"""

from __future__ import annotations

import logging
from typing import Iterable, Sequence

from . import groebner as gb
from .affine_domain import Vocabulary
from .groebner import IdealBasis
from .polyring import GREVLEX, BoolPoly

log = logging.getLogger(__name__)

STAR_ITERATION_CAP = 64
USE_INTERSECTION_JOIN = False


def pre_var(voc: Vocabulary, i: int) -> int:
    return i


def inter_var(voc: Vocabulary, j: int) -> int:
    return voc.n + j


def post_var(voc: Vocabulary, i: int) -> int:
    return voc.n + voc.k + i


def var_name(voc: Vocabulary, v: int, qubit_names: Sequence[str] | None = None) -> str:
    names = qubit_names or [f"x{i}" for i in range(voc.n)]
    if v < voc.n:
        return names[v]
    if v < voc.n + voc.k:
        return f"y{v - voc.n}"
    return names[v - voc.n - voc.k] + "′"


class TransitionIdeal:
    __slots__ = ("voc", "basis")

    def __init__(self, voc: Vocabulary, basis: IdealBasis):
        self.voc = voc
        self.basis = basis

    @classmethod
    def from_gens(cls, voc: Vocabulary, gens: Iterable[BoolPoly], budget: int | None = gb.DEFAULT_PAIR_BUDGET):
        return cls(voc, gb.groebner_or_degraded(list(gens), GREVLEX, budget))

    @property
    def is_bottom(self) -> bool:
        return self.basis.is_unit

    @property
    def is_top(self) -> bool:
        return self.basis.is_top

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TransitionIdeal):
            return NotImplemented
        return self.voc == other.voc and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.voc, self.basis))

    def leq(self, other: "TransitionIdeal") -> bool:
        """``self ⊑ other``: every generator of ``other`` vanishes on ``self``."""
        return all(self.basis.contains(g) for g in other.basis.gens)

    def render(self, qubit_names: Sequence[str] | None = None) -> str:
        if self.is_bottom:
            return "⊥"
        return self.basis.render(lambda v: var_name(self.voc, v, qubit_names))

    def __repr__(self) -> str:
        return f"TransitionIdeal({self.render()})"


def top(voc: Vocabulary) -> TransitionIdeal:
    return TransitionIdeal(voc, IdealBasis.top())


def bottom(voc: Vocabulary) -> TransitionIdeal:
    return TransitionIdeal(voc, IdealBasis.unit())


def identity(voc: Vocabulary) -> TransitionIdeal:
    gens = [BoolPoly.var(post_var(voc, i)) + BoolPoly.var(pre_var(voc, i)) for i in range(voc.n)]
    return TransitionIdeal.from_gens(voc, gens)


def from_outputs(voc: Vocabulary, outputs: Sequence[BoolPoly], constraints: Iterable[BoolPoly] = ()) -> TransitionIdeal:
    """Solvable relation ``x'_i = f_i(X, Y)`` plus side constraints over ``X, Y``."""
    gens = [BoolPoly.var(post_var(voc, i)) + f for i, f in enumerate(outputs)]
    gens.extend(constraints)
    return TransitionIdeal.from_gens(voc, gens)


def meet(a: TransitionIdeal, b: TransitionIdeal) -> TransitionIdeal:
    _check(a, b)
    return TransitionIdeal(a.voc, gb.ideal_sum(a.basis, b.basis))


def join(a: TransitionIdeal, b: TransitionIdeal) -> TransitionIdeal:
    _check(a, b)
    if USE_INTERSECTION_JOIN:
        return TransitionIdeal(a.voc, gb.ideal_intersection(a.basis, b.basis))
    return TransitionIdeal(a.voc, gb.ideal_product(a.basis, b.basis))


def join_by_intersection(a: TransitionIdeal, b: TransitionIdeal) -> TransitionIdeal:
    _check(a, b)
    return TransitionIdeal(a.voc, gb.ideal_intersection(a.basis, b.basis))


def compose(a: TransitionIdeal, b: TransitionIdeal) -> TransitionIdeal:
    """First ``a`` then ``b``: rename the shared state to fresh middle variables and eliminate."""
    _check(a, b)
    voc = a.voc
    if voc.k:
        raise ValueError("compose expects two-vocabulary elements")
    if a.is_bottom or b.is_bottom:
        return bottom(voc)
    n = voc.n
    middle = [2 * n + i for i in range(n)]
    a_map = {post_var(voc, i): middle[i] for i in range(n)}
    b_map = {pre_var(voc, i): middle[i] for i in range(n)}
    gens = [g.rename(a_map) for g in a.basis.gens] + [g.rename(b_map) for g in b.basis.gens]
    return TransitionIdeal(voc, gb.eliminate(IdealBasis(gens), middle))


def star(a: TransitionIdeal, cap: int = STAR_ITERATION_CAP) -> TransitionIdeal:
    """Kleene closure seeded with the identity; falls back to ⊤ after ``cap`` rounds."""
    voc = a.voc
    if voc.k:
        raise ValueError("star expects a two-vocabulary element")
    current = identity(voc)
    for _ in range(cap):
        nxt = join(current, compose(current, a))
        if nxt == current:
            return current
        current = nxt
    log.warning("polynomial Kleene iteration hit its cap of %d rounds; using ⊤", cap)
    return top(voc)


def project_inter(a: TransitionIdeal) -> TransitionIdeal:
    voc = a.voc
    two = Vocabulary(voc.n, 0)
    inter = [inter_var(voc, j) for j in range(voc.k)]
    elim = gb.eliminate(a.basis, inter)
    shift = {post_var(voc, i): post_var(two, i) for i in range(voc.n)}
    return TransitionIdeal(two, gb.buchberger([g.rename(shift) for g in elim.gens]))


def reduce_condition(a: TransitionIdeal, f: BoolPoly) -> BoolPoly:
    return a.basis.normal_form(f)


def variety(a: TransitionIdeal) -> set[int]:
    nvars = 2 * a.voc.n + a.voc.k
    return gb.variety(a.basis.gens, nvars)


def _check(a: TransitionIdeal, b: TransitionIdeal) -> None:
    if a.voc != b.voc:
        raise ValueError("vocabulary mismatch")
