import random
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fermigroupoid.canonical_order import (
    canonical_arrow,
    canonical_order,
    inflate,
    is_canonical,
    label_bijection,
    reduce_function,
    reduced_convolve,
)
from fermigroupoid.errors import NotPerturbedPeriodicError
from fermigroupoid.galgebra import GFunction, conditional_expectation, convolve
from fermigroupoid.groupoid import GroupoidElement
from fermigroupoid.pattern import Pattern, generate
from fermigroupoid.suites import interior_sites, random_local_delta

import oracles


@pytest.fixture(scope="module")
def perturbed2():
    return generate("perturbed_periodic", {"d": 2, "epsilon": 0.2}, seed=3, window=5.0)


def _site(p, x):
    return p.index_of(np.asarray(x, dtype=float))


def test_lattice_labels_are_the_points():
    p = generate("periodic", {"d": 2}, window=3.0)
    lab = label_bijection(p)
    assert np.array_equal(lab.labels, p.points.astype(int))
    assert all(lab.site_of[lab.label(i)] == i for i in range(len(p)))


def test_labels_match_nearest_node_scan(perturbed2):
    lab = label_bijection(perturbed2)
    assert [lab.label(i) for i in range(len(perturbed2))] == oracles.nearest_node_labels(perturbed2.points)


def test_three_point_example():
    p = generate("periodic", {"d": 2}, window=3.0)
    v = [_site(p, (0, 0)), _site(p, (1, 0)), _site(p, (0, 1))]
    lab = label_bijection(p)
    order = canonical_order(lab, v)
    assert [tuple(p.points[i]) for i in order] == [(0, 0), (0, 1), (1, 0)]
    swapped = canonical_order(lab, v, index_order=(1, 0))
    assert [tuple(p.points[i]) for i in swapped] == [(0, 0), (1, 0), (0, 1)]
    assert is_canonical(lab, order) and not is_canonical(lab, swapped)


def test_singleton_and_empty(perturbed2):
    lab = label_bijection(perturbed2)
    assert canonical_order(lab, [5]) == (5,)
    assert canonical_order(lab, []) == ()


@settings(max_examples=40)
@given(st.integers(0, 10_000))
def test_order_is_lexicographic_in_labels(perturbed2, seed):
    rng = random.Random(seed)
    lab = label_bijection(perturbed2)
    ref = oracles.nearest_node_labels(perturbed2.points)
    v = rng.sample(range(len(perturbed2)), rng.randint(1, 6))
    assert canonical_order(lab, v) == oracles.sorted_by_label(ref, v)


@pytest.mark.parametrize("d, window", [(1, 10.0), (2, 5.0)])
def test_translation_compatibility(d, window):
    rng = random.Random(d)
    p = generate("perturbed_periodic", {"d": d, "epsilon": 0.2}, seed=11, window=window)
    lab = label_bijection(p)
    sites = interior_sites(p, 2.0)
    for _ in range(50):
        v = rng.sample(sites, rng.randint(1, 4))
        a = rng.choice(sites)
        moved = label_bijection(p.translate(p.points[a]))
        assert canonical_order(moved, v) == canonical_order(lab, v)
        for i in v:
            assert moved.label(i) == tuple(np.subtract(lab.label(i), lab.label(a)))


def test_rejects_bad_input(perturbed2):
    lab = label_bijection(perturbed2)
    with pytest.raises(ValueError):
        label_bijection(perturbed2, eps=0.7)
    with pytest.raises(ValueError):
        canonical_order(lab, [1, 1])
    with pytest.raises(ValueError):
        canonical_order(lab, [1, 2], index_order=(0, 0))


def _custom(points):
    pts = np.asarray(points, dtype=float)
    return Pattern(pts, 0.2, 1.0, 1.0, np.zeros(pts.shape[1]))


def test_not_perturbed_periodic():
    with pytest.raises(NotPerturbedPeriodicError):
        label_bijection(_custom([[0.0], [0.5], [1.0]]))
    with pytest.raises(NotPerturbedPeriodicError):
        label_bijection(_custom([[0.1], [-0.1], [1.0]]))
    with pytest.raises(NotPerturbedPeriodicError):
        label_bijection(_custom([[-1.0], [1.0]]))


@pytest.fixture(scope="module")
def line():
    p = generate("perturbed_periodic", {"d": 1, "epsilon": 0.2}, seed=5, window=8.0)
    return p, label_bijection(p)


def _near(p, deep, rng):
    c = rng.choice(deep)
    return [s for s in deep if abs(p.points[s][0] - p.points[c][0]) <= 1.5]


def test_reduction_of_zero(line):
    p, lab = line
    zero = GFunction(2, 1.0, lambda g: 0.0)
    g = GroupoidElement(p, canonical_order(lab, [3, 4]), canonical_order(lab, [4, 5]))
    assert reduce_function(zero, lab)(g) == 0


def test_reduction_round_trip(line):
    p, lab = line
    rng = random.Random(1)
    deep = interior_sites(p, 4.5)
    for _ in range(5):
        near = _near(p, deep, rng)
        f = conditional_expectation(random_local_delta(p, rng, near))
        back = inflate(reduce_function(f, lab), lab)
        for _ in range(6):
            g = GroupoidElement(p, tuple(rng.sample(near, 2)), tuple(rng.sample(near, 2)))
            assert back(g) == pytest.approx(f(g), abs=1e-14)
            canon, sign = canonical_arrow(lab, g)
            assert reduce_function(f, lab)(canon) == pytest.approx(2 * sign * f(g), abs=1e-14)


def _brute_reduced_convolution(f_bar, g_bar, alpha, labels):
    total = 0j
    p = alpha.base
    for subset in combinations(range(len(p)), 2):
        eta = oracles.sorted_by_label(labels, subset)
        total += f_bar(GroupoidElement(p, alpha.left, eta)) * g_bar(GroupoidElement(p, eta, alpha.right))
    return total


def test_reduction_is_an_algebra_morphism(line):
    p, lab = line
    labels = oracles.nearest_node_labels(p.points)
    rng = random.Random(2)
    deep = interior_sites(p, 4.5)
    for _ in range(4):
        near = _near(p, deep, rng)
        f = conditional_expectation(random_local_delta(p, rng, near))
        g = conditional_expectation(random_local_delta(p, rng, near))
        fb, gb = reduce_function(f, lab), reduce_function(g, lab)
        lhs = reduce_function(convolve(f, g), lab)
        rhs = reduced_convolve(fb, gb, lab)
        for _ in range(4):
            alpha = GroupoidElement(p, canonical_order(lab, rng.sample(near, 2)), canonical_order(lab, rng.sample(near, 2)))
            brute = _brute_reduced_convolution(fb, gb, alpha, labels)
            assert rhs(alpha) == pytest.approx(brute, abs=1e-13)
            assert lhs(alpha) == pytest.approx(brute, abs=1e-13)


def test_arrows_from_another_sample_rejected(line):
    p, lab = line
    other = generate("perturbed_periodic", {"d": 1, "epsilon": 0.2}, seed=6, window=8.0)
    f = reduce_function(GFunction.units(2, 1.0), lab)
    with pytest.raises(ValueError):
        f(GroupoidElement(other, (0, 1), (0, 1)))
    with pytest.raises(ValueError):
        reduced_convolve(GFunction.units(1, 1.0), GFunction.units(2, 1.0), lab)
