import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasefold import groebner as gb
from phasefold import poly_domain as pd
from phasefold.affine_domain import Vocabulary
from phasefold.polyring import BoolPoly

from oracles import compose_points, star_points


def from_points(voc: Vocabulary, pts: set[int]) -> pd.TransitionIdeal:
    return pd.TransitionIdeal(voc, gb.vanishing_ideal(pts, 2 * voc.n + voc.k))


def random_relation(rng: random.Random, n: int) -> pd.TransitionIdeal:
    voc = Vocabulary(n)
    pts = {x for x in range(1 << (2 * n)) if rng.random() < 0.35}
    return from_points(voc, pts)


def pairs(t: pd.TransitionIdeal) -> set[tuple[int, int]]:
    n = t.voc.n
    return {(v & ((1 << n) - 1), v >> n) for v in pd.variety(t)}


def masks(n: int, prs) -> set[int]:
    return {pre | (post << n) for pre, post in prs}


relations = st.builds(lambda seed, n: random_relation(random.Random(seed), n), st.integers(0, 10**6),
                      st.integers(1, 2))


def test_variable_layout():
    voc = Vocabulary(2, 1)
    assert [pd.pre_var(voc, 1), pd.inter_var(voc, 0), pd.post_var(voc, 0)] == [1, 2, 3]
    assert pd.var_name(voc, 3, ["a", "b"]) == "a′"
    assert pd.var_name(voc, 2) == "y0"


def test_identity_top_bottom():
    voc = Vocabulary(2)
    assert pairs(pd.identity(voc)) == {(x, x) for x in range(4)}
    assert pd.top(voc).is_top and pd.bottom(voc).is_bottom
    assert pd.bottom(voc).render() == "⊥"
    assert pd.bottom(voc).leq(pd.identity(voc)) and pd.identity(voc).leq(pd.top(voc))


def test_vocabulary_mismatch():
    with pytest.raises(ValueError):
        pd.meet(pd.top(Vocabulary(1)), pd.top(Vocabulary(2)))
    with pytest.raises(ValueError):
        pd.compose(pd.top(Vocabulary(1, 1)), pd.top(Vocabulary(1, 1)))


def test_from_outputs_of_toffoli():
    voc = Vocabulary(3)
    x = [BoolPoly.var(i) for i in range(3)]
    tof = pd.from_outputs(voc, [x[0], x[1], x[2] + x[0] * x[1]])
    expected = {(v, v ^ (4 if v & 3 == 3 else 0)) for v in range(8)}
    assert pairs(tof) == expected


@settings(max_examples=60, deadline=None)
@given(relations, relations, relations)
def test_lattice_laws(a, b, c):
    if not (a.voc == b.voc == c.voc):
        return
    meet, join = pd.meet, pd.join
    assert meet(a, b) == meet(b, a) and join(a, b) == join(b, a)
    assert meet(a, meet(b, c)) == meet(meet(a, b), c)
    assert join(a, join(b, c)) == join(join(a, b), c)
    assert meet(a, join(a, b)) == a and join(a, meet(a, b)) == a
    assert meet(a, a) == a and join(a, a) == a


@settings(max_examples=80, deadline=None)
@given(relations, relations)
def test_join_meet_are_union_intersection(a, b):
    if a.voc != b.voc:
        return
    assert pd.variety(pd.join(a, b)) == pd.variety(a) | pd.variety(b)
    assert pd.variety(pd.meet(a, b)) == pd.variety(a) & pd.variety(b)
    assert pd.join_by_intersection(a, b) == pd.join(a, b)
    assert a.leq(b) == (pd.variety(a) <= pd.variety(b))


@settings(max_examples=60, deadline=None)
@given(relations, relations)
def test_compose_is_exact_relational_composition(a, b):
    if a.voc != b.voc:
        return
    n = a.voc.n
    assert pd.variety(pd.compose(a, b)) == masks(n, compose_points(pairs(a), pairs(b)))


@settings(max_examples=40, deadline=None)
@given(relations)
def test_star_is_reflexive_transitive_closure(a):
    n = a.voc.n
    assert pd.variety(pd.star(a)) == masks(n, star_points(pairs(a), n))


def test_star_cap_falls_back_to_top():
    voc = Vocabulary(2)
    x = [BoolPoly.var(i) for i in range(2)]
    flip = pd.from_outputs(voc, [x[0] + BoolPoly.one(), x[1]])
    assert pd.star(flip, cap=1).is_top
    closed = pd.star(flip)
    assert closed == pd.TransitionIdeal.from_gens(voc, [BoolPoly.var(pd.post_var(voc, 1)) + x[1]])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_project_inter_is_existential(seed):
    rng = random.Random(seed)
    voc = Vocabulary(1, 2)
    pts = {x for x in range(1 << 4) if rng.random() < 0.4}
    t = from_points(voc, pts)
    proj = pd.project_inter(t)
    expected = {(x & 1) | ((x >> 3) << 1) for x in pts}
    assert pd.variety(proj) == expected


def test_reduce_condition_uses_relation():
    voc = Vocabulary(1)
    t = pd.identity(voc)
    assert pd.reduce_condition(t, BoolPoly.var(pd.post_var(voc, 0))) == BoolPoly.var(0)
