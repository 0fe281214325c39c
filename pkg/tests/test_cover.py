import numpy as np
import pytest
from hypothesis import given, strategies as st

from fermigroupoid import permutations as perm
from fermigroupoid.cover import (
    VANISHING,
    OrderedConfig,
    anchor,
    canonical_bijection,
    deck_transform,
    leq_and_diff,
    translate_config,
    wedge,
)
from fermigroupoid.errors import CoverNeighborhoodError
from fermigroupoid.pattern import generate

Z = generate("periodic", {"d": 1}, window=10)


def site(x):
    return Z.index_of([x])


def config(*xs):
    return OrderedConfig(Z, [site(x) for x in xs])


def test_canonical_bijection_examples():
    assert canonical_bijection([0, 1], [0.1, 0.9], 0.2, 0.5) == {0: 0, 1: 1}
    assert canonical_bijection([0, 1], [0.9, 0.1], 0.2, 0.5) == {0: 1, 1: 0}
    assert canonical_bijection([[0, 0], [1, 1]], [[0, 0], [1, 1]], 0.2, 0.5) == {0: 0, 1: 1}
    with pytest.raises(CoverNeighborhoodError):
        canonical_bijection([0, 1], [0.3, 0.7], 0.2, 0.5)
    with pytest.raises(ValueError):
        canonical_bijection([0], [0], 0.3, 0.5)


def test_deck_transform_examples():
    xi = config(3, 5)
    assert deck_transform(xi, (0, 1)).order == xi.order
    assert deck_transform(xi, (1, 0)).order == config(5, 3).order


@given(st.permutations(range(4)), st.permutations(range(4)))
def test_deck_group_action(s1, s2):
    xi = config(-2, 0, 4, 7)
    lhs = deck_transform(deck_transform(xi, s2), s1)
    assert lhs.order == deck_transform(xi, perm.compose(s1, s2)).order


def test_translation_action():
    xi = config(2, 4)
    assert translate_config(xi, [0.0]).points().tolist() == xi.points().tolist()
    a = translate_config(translate_config(xi, [1.0]), [2.0])
    b = translate_config(xi, [3.0])
    assert a == b
    assert anchor(xi).points()[0].tolist() == [0.0]


def test_wedge_examples():
    ab = wedge(config(0), config(1))
    assert ab.order == config(0, 1).order
    assert wedge(config(0, 1), config(1, 2)) is VANISHING
    x, y, z = config(0), config(1, 2), config(3)
    assert wedge(wedge(x, y), z).order == wedge(x, wedge(y, z)).order


def test_leq_and_diff_examples():
    xi = config(0, 1, 2)
    assert leq_and_diff(xi, xi).order == ()
    assert leq_and_diff(config(0), xi).order == config(1, 2).order
    assert leq_and_diff(config(1), xi) is None


def test_config_validation():
    with pytest.raises(ValueError):
        OrderedConfig(Z, [site(0), site(0)])
    with pytest.raises(ValueError):
        OrderedConfig(Z, [len(Z)])
