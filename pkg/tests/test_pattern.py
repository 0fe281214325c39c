import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fermigroupoid.errors import EmptySetError, WindowError
from fermigroupoid.pattern import (
    Pattern,
    generate,
    hausdorff,
    pattern_metric,
    pattern_metric_report,
    regenerate,
    truncate,
    validate_delone,
)

import oracles

point_sets = st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=8)


def test_hausdorff_small_cases():
    assert hausdorff([0.0], [0.0]) == 0
    assert hausdorff([0.0], [1.0]) == 1
    assert hausdorff([0.0, 2.0], [1.0]) == 1
    with pytest.raises(EmptySetError):
        hausdorff(np.zeros((0, 1)), np.zeros((0, 1)))


@given(point_sets, point_sets)
def test_hausdorff_matches_brute_force(a, b):
    assert hausdorff(a, b) == pytest.approx(oracles.hausdorff(a, b), abs=1e-12)


@given(point_sets, point_sets, st.floats(0.5, 6))
def test_hausdorff_with_sphere_matches_brute_force(a, b, rho):
    a = [x for x in a if abs(x) <= rho]
    b = [x for x in b if abs(x) <= rho]
    got = hausdorff(np.array(a).reshape(-1, 1), np.array(b).reshape(-1, 1), boundary_radius=rho)
    assert got == pytest.approx(oracles.hausdorff(a, b, rho), abs=1e-12)


def test_truncate_integer_lattice():
    z = generate("periodic", {"d": 1}, window=10)
    t = truncate(z, 1.5)
    assert sorted(t.points[:, 0]) == [-1, 0, 1]
    assert t.boundary_points_1d()[:, 0].tolist() == [-1.5, 1.5]
    assert truncate(z, 0.5).points[:, 0].tolist() == [0]
    with pytest.raises(WindowError):
        truncate(z, 11)


def test_truncate_empty_ball_keeps_boundary_only():
    p = Pattern(np.array([[3.0]]), 0.4, 5.0, 10.0)
    t = truncate(p, 0.5)
    assert len(t.points) == 0 and t.radius == 0.5


def test_periodic_window():
    z = generate("periodic", {"d": 1}, window=5)
    assert z.points[:, 0].tolist() == list(range(-5, 6))
    assert validate_delone(z).valid


def test_triplet_rotation_has_three_points_per_step():
    p = generate("triplet_rotation", {"theta": 0.7, "D": 3.0, "r": 1.0, "count": 3})
    assert len(p) == 9
    for k in range(3):
        a, b, c = p.points[3 * k : 3 * k + 3]
        assert np.linalg.norm(b - a) == pytest.approx(1.0)
        assert np.linalg.norm(c - b) == pytest.approx(1.0)
        u, v = b - a, c - a
        assert u[0] * v[1] - u[1] * v[0] == pytest.approx(0.0, abs=1e-12)
    centers = p.points[::3]
    assert np.diff(centers[:, 0]).tolist() == pytest.approx([3.0, 3.0])
    with pytest.raises(ValueError):
        generate("triplet_rotation", {"D": 1.5, "r": 1.0})


def test_perturbed_points_have_unique_nodes():
    p = generate("perturbed_periodic", {"d": 2, "epsilon": 0.2}, seed=1, window=5)
    labels = oracles.nearest_node_labels(p.points, eps=0.2 + 1e-12)
    assert len(set(labels)) == len(labels)


def test_generation_is_reproducible():
    a = generate("random_displaced", {"d": 2, "lambda": 0.3}, seed=11, window=4)
    b = generate("random_displaced", {"d": 2, "lambda": 0.3}, seed=11, window=4)
    c = generate("random_displaced", {"d": 2, "lambda": 0.3}, seed=12, window=4)
    assert a.points.tobytes() == b.points.tobytes()
    assert a.points.tobytes() != c.points.tobytes()


def test_displacements_differ_at_negative_nodes():
    # Regression: negative node coordinates once collapsed to one generator counter.
    p = generate("random_displaced", {"d": 1, "lambda": 0.9}, seed=5, window=6)
    disp = p.points[:, 0] - np.rint(p.points[:, 0])
    neg = disp[p.points[:, 0] < -0.5]
    assert len(set(np.round(neg, 12))) == len(neg)


def test_regenerate_agrees_on_overlap():
    p = generate("perturbed_periodic", {"d": 2, "epsilon": 0.2}, seed=3, window=5)
    q = regenerate(p, center=[2.0, 1.0], window=5)
    shared = [x for x in p.points if np.linalg.norm(x - [2.0, 1.0]) < 4.0]
    assert all(q.index_of(x) is not None for x in shared)


def test_validate_reports_discreteness():
    rep = validate_delone(Pattern(np.array([[0.0], [0.1]]), 0.4, 0.6, 0.2))
    assert not rep.valid
    bad = [v for v in rep.violations if v["type"] == "discreteness"]
    assert bad and bad[0]["pair"] == [0, 1]


def test_random_displaced_valid_with_looser_radii():
    p = generate("random_displaced", {"d": 1, "lambda": 0.3}, seed=2, window=20)
    looser = Pattern(p.points, 0.2, 0.7, p.window_radius, p.center)
    assert validate_delone(looser).valid


def test_documented_radii_hold():
    for kind, params in [("random_displaced", {"d": 2, "lambda": 0.5}), ("perturbed_periodic", {"d": 2, "epsilon": 0.3})]:
        for seed in range(3):
            assert validate_delone(generate(kind, params, seed=seed, window=6)).valid


def test_translate_records_offset():
    p = generate("periodic", {"d": 1}, window=5)
    q = p.translate([2.0]).translate([0.5])
    assert q.offset.tolist() == [2.5]
    assert q.center.tolist() == [-2.5]
    assert q.index_of([-2.5]) is not None


def test_metric_self_distance_floor():
    p = generate("random_displaced", {"d": 1, "lambda": 0.3}, seed=1, window=8)
    assert 0 <= pattern_metric(p, p, 64) <= 1 / (1 + p.window_radius) + 1e-12


def test_metric_shifted_lattice_matches_dense_scan():
    z = generate("periodic", {"d": 1}, window=10)
    shifted = z.translate([0.5])
    rep = pattern_metric_report(z, shifted, 256)
    want, step = oracles.dense_metric_scan(z.points, shifted.points, rep.comparison_radius, steps=2000)
    # both values come from 1/(1+r); a radius error of one step bounds the gap
    assert abs(rep.value - want) <= step
    assert rep.value == pytest.approx(1 / 3, abs=1e-6)


def test_metric_is_symmetric_and_bounded():
    for seed in range(4):
        a = generate("random_displaced", {"d": 1, "lambda": 0.3}, seed=seed, window=5)
        b = generate("random_displaced", {"d": 1, "lambda": 0.3}, seed=seed + 100, window=5)
        v = pattern_metric(a, b, 64)
        assert v == pattern_metric(b, a, 64)
        assert 0 <= v <= 1


def test_unknown_kind():
    with pytest.raises(ValueError):
        generate("penrose")
