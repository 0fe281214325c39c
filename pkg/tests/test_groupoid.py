import numpy as np
import pytest
from hypothesis import given, strategies as st

from fermigroupoid import permutations as perm
from fermigroupoid.errors import CompositionError
from fermigroupoid.galgebra import translated_sample
from fermigroupoid.groupoid import (
    GroupoidElement,
    act_with_bisections,
    anchored_pair,
    bisection_product,
    blowup_compatible,
    blowup_compose,
    blowup_inverse,
    blowup_iso,
    compose,
    embed_morphism,
    inverse,
    pair_inverse,
    range_,
    same_arrow,
    source,
    tau,
    two_action,
    unit,
)
from fermigroupoid.pattern import generate

Z = generate("periodic", {"d": 1}, window=10)
P = generate("perturbed_periodic", {"d": 2, "epsilon": 0.2}, seed=4, window=4)
P_SITES = [i for i in range(len(P)) if P.depth(P.points[i]) >= P.R]


def z(*xs):
    return tuple(Z.index_of([x]) for x in xs)


def orders(n):
    return st.lists(st.sampled_from(P_SITES), min_size=n, max_size=n, unique=True)


def arrows(n=3):
    return st.tuples(orders(n), orders(n)).map(lambda lr: GroupoidElement(P, lr[0], lr[1]))


def sym(n=3):
    return st.permutations(list(range(n))).map(tuple)


def test_unit_is_its_own_inverse():
    u = unit(Z, z(0, 1))
    assert inverse(u) == u and range_(u) == u and source(u) == u


def test_explicit_inverse_and_source():
    g = GroupoidElement(Z, z(0, 1), z(2, 3))
    inv = inverse(g)
    assert inv.left_points()[:, 0].tolist() == [0, 1]
    assert inv.right_points()[:, 0].tolist() == [-2, -1]
    s = source(g)
    assert s.left_points()[:, 0].tolist() == [0, 1]
    assert s.right_points()[:, 0].tolist() == [0, 1]
    assert s.shift.tolist() == [2]


def test_explicit_composition_of_pairs():
    g = GroupoidElement(Z, z(0, 1), z(2, 3))
    h = GroupoidElement(Z, z(2, 3), z(-1, 5))
    assert compose(g, h) == GroupoidElement(Z, z(0, 1), z(-1, 5))
    with pytest.raises(CompositionError):
        compose(g, GroupoidElement(Z, z(4, 3), z(1, 2)))


@given(arrows())
def test_double_inverse(g):
    assert inverse(inverse(g)) == g


@given(arrows(), orders(3), orders(3))
def test_associativity_and_units(g, b, c):
    h = GroupoidElement(P, g.right, b)
    k = GroupoidElement(P, b, c)
    assert compose(compose(g, h), k) == compose(g, compose(h, k))
    assert compose(g, inverse(g)) == range_(g)
    assert compose(inverse(g), g) == source(g)
    assert compose(range_(g), g) == g == compose(g, source(g))
    assert range_(inverse(g)) == source(g)


@given(arrows())
def test_literal_inverse_of_translated_pair(g):
    lit = pair_inverse(anchored_pair(g))
    mine = anchored_pair(inverse(g))
    assert lit.left.same_as(mine.left) and lit.right.same_as(mine.right)


def test_composition_across_samples():
    p = generate("perturbed_periodic", {"d": 1, "epsilon": 0.2}, seed=2, window=12)
    a = int(np.argmin(np.abs(p.points[:, 0] - 1.0)))
    moved, mapping = translated_sample(p, a)
    near = [i for i in range(len(p)) if abs(p.points[i, 0]) < 4]
    g = GroupoidElement(p, near[:2], near[2:4])
    h = GroupoidElement(p, near[2:4], near[5:7])
    h_moved = GroupoidElement(moved, [mapping[i] for i in h.left], [mapping[i] for i in h.right])
    assert compose(g, h_moved) == compose(g, h)
    assert same_arrow(h, h_moved)


def test_tau_examples():
    u = unit(Z, z(0, 1))
    assert tau((0, 1), u) == u
    t = tau((1, 0), u)
    assert t.left_points()[:, 0].tolist() == [0, -1]
    assert t.right_points()[:, 0].tolist() == [-1, 0]


@given(arrows(), sym(), sym())
def test_two_action_laws(g, s1, s2):
    e = perm.identity(3)
    assert two_action(e, g, e) == g
    assert two_action(e, two_action(s1, g, e), s2) == two_action(s1, two_action(e, g, s2), e)
    assert inverse(two_action(s1, g, s2)) == two_action(perm.inverse(s2), inverse(g), perm.inverse(s1))
    h = two_action(s1, g, s2)
    assert range_(h) == two_action(s1, range_(g), perm.inverse(s1))
    assert source(h) == two_action(perm.inverse(s2), source(g), s2)


@given(arrows(), sym(), sym())
def test_tau_homomorphism_and_bisection_form(g, s1, s2):
    u = range_(g)
    product = bisection_product(lambda x: tau(s1, x), lambda x: tau(s2, x))
    assert product(u) == tau(perm.compose(s1, s2), u)
    via_bisections = act_with_bisections(lambda x: tau(s1, x), g, lambda x: tau(perm.inverse(s2), x))
    assert via_bisections == two_action(s1, g, s2)


def test_embedding_of_unit_and_fibers():
    u = unit(Z, z(0, 1))
    a, b = embed_morphism(u, 1, 1)
    assert a.is_unit() and b.is_unit()
    seen = set()
    left = z(0, 1, 2)
    for right in [z(3, 4, 5), z(3, 5, 4), z(-1, 4, 5), z(3, -2, 6)]:
        img = embed_morphism(GroupoidElement(Z, left, right), 1, 2)
        seen.add((img[0].key(), img[1].key()))
    assert len(seen) == 4
    with pytest.raises(ValueError):
        embed_morphism(u, 2, 0)


@given(arrows(), orders(3))
def test_embedding_is_a_morphism(g, c):
    h = GroupoidElement(P, g.right, c)
    for n in (1, 2):
        eg, eh, egh = embed_morphism(g, n, 3 - n), embed_morphism(h, n, 3 - n), embed_morphism(compose(g, h), n, 3 - n)
        assert egh == (compose(eg[0], eh[0]), compose(eg[1], eh[1]))


def test_blowup_examples():
    u = unit(Z, z(0, 1))
    b = blowup_iso(u)
    assert b.left_unit == u == b.right_unit
    assert b.core == unit(Z, z(0))
    g = GroupoidElement(Z, z(0, 1), z(3, 2))
    bg = blowup_iso(g)
    assert bg.core.right_points()[:, 0].tolist() == [3]
    assert blowup_compatible(bg) and blowup_inverse(bg) == g


@given(arrows(), orders(3))
def test_blowup_preserves_composition(g, c):
    h = GroupoidElement(P, g.right, c)
    assert blowup_compose(blowup_iso(g), blowup_iso(h)) == blowup_iso(compose(g, h))


def test_arrow_validation():
    with pytest.raises(ValueError):
        GroupoidElement(Z, z(0, 1), z(2))
    with pytest.raises(ValueError):
        GroupoidElement(Z, z(0, 0), z(1, 2))
