"""Canonical orders on perturbations of the periodic lattice.

Every point of a perturbed Z^d sits in a unique ball ``B(n, eps)`` around a
lattice node, which labels it by ``n``.  Subsets are then ordered by repeated
extraction of the point whose label is minimal coordinate by coordinate.
Arrows whose two configurations carry that order form the reduced groupoid;
:func:`reduce_function` and :func:`inflate` pass between bi-equivariant
functions on all arrows and functions on the reduced ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Sequence

import numpy as np

from . import permutations as perm
from .errors import NotPerturbedPeriodicError, WindowError
from .galgebra import GFunction
from .groupoid import GroupoidElement
from .hamiltonian import GEOM_TOL
from .pattern import Pattern, _nodes_near


@dataclass(frozen=True, eq=False)
class Labeling:
    """The bijection ``l_L : L -> Z^d`` restricted to the sampled window."""

    pattern: Pattern
    labels: np.ndarray
    eps: float

    @cached_property
    def site_of(self) -> dict[tuple[int, ...], int]:
        return {tuple(int(c) for c in lab): i for i, lab in enumerate(self.labels)}

    def label(self, site: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.labels[site])


def label_bijection(p: Pattern, eps: float = 0.5) -> Labeling:
    """Label each point by the node ``n`` with ``{x} = L ∩ B(n, eps)``.

    Balls are open.  Nodes whose ball lies inside the window must hold exactly
    one point; nodes near the edge may be unoccupied because their point was
    not sampled.
    """
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    pts = p.points
    nodes = np.rint(pts).astype(np.int64)
    far = np.linalg.norm(pts - nodes, axis=1) >= eps
    if np.any(far):
        i = int(np.nonzero(far)[0][0])
        raise NotPerturbedPeriodicError(f"point {pts[i].tolist()} lies in no ball of radius {eps}")
    seen: dict[tuple[int, ...], int] = {}
    for i, n in enumerate(map(tuple, nodes)):
        if n in seen:
            raise NotPerturbedPeriodicError(f"node {list(n)} holds two points ({seen[n]}, {i})")
        seen[n] = i
    for n in _nodes_near(p.center, p.window_radius):
        if p.depth(n) >= eps and tuple(int(c) for c in n) not in seen:
            raise NotPerturbedPeriodicError(f"ball around node {n.tolist()} is empty")
    nodes.setflags(write=False)
    return Labeling(p, nodes, eps)


def canonical_order(
    labeling: Labeling, subset: Sequence[int], index_order: Sequence[int] | None = None
) -> tuple[int, ...]:
    """Order ``subset`` by iterated extraction of the label-minimal point.

    One extraction keeps, for each coordinate ``j`` in ``index_order``
    (default ``0, 1, ..., d-1``), only the points whose ``j``-th label is
    minimal; exactly one point survives because labels are distinct.
    """
    d = labeling.labels.shape[1]
    axes = tuple(range(d)) if index_order is None else tuple(index_order)
    if sorted(axes) != list(range(d)):
        raise ValueError("index_order must be a permutation of the coordinates")
    rest = list(dict.fromkeys(int(i) for i in subset))
    if len(rest) != len(subset):
        raise ValueError("subset lists a point twice")
    out = []
    while rest:
        w = rest
        for j in axes:
            m = min(labeling.labels[i][j] for i in w)
            w = [i for i in w if labeling.labels[i][j] == m]
        out.append(w[0])
        rest.remove(w[0])
    return tuple(out)


def is_canonical(labeling: Labeling, order: Sequence[int]) -> bool:
    return tuple(order) == canonical_order(labeling, order)


def canonical_arrow(labeling: Labeling, g: GroupoidElement) -> tuple[GroupoidElement, int]:
    """The reduced arrow over ``g`` and the sign relating ``g`` to it."""
    left = canonical_order(labeling, g.left)
    right = canonical_order(labeling, g.right)
    sign = perm.relative_sign(g.left, left) * perm.relative_sign(g.right, right)
    return GroupoidElement(g.base, left, right), sign


def _check_base(labeling: Labeling, g: GroupoidElement) -> None:
    if g.base is not labeling.pattern:
        raise ValueError("arrow lives on a different pattern sample")


def reduce_function(f: GFunction, labeling: Labeling) -> GFunction:
    """``Phi(f) = N! f`` on reduced arrows, zero elsewhere."""
    scale = math.factorial(f.arity)

    def ev(g: GroupoidElement) -> complex:
        _check_base(labeling, g)
        if not (is_canonical(labeling, g.left) and is_canonical(labeling, g.right)):
            return 0j
        return scale * f(g)

    return GFunction(f.arity, f.range, ev)


def inflate(g_bar: GFunction, labeling: Labeling) -> GFunction:
    """``Phi^{-1}``: spread a function on reduced arrows bi-equivariantly, divided by ``N!``."""
    scale = 1.0 / math.factorial(g_bar.arity)

    def ev(g: GroupoidElement) -> complex:
        _check_base(labeling, g)
        canon, sign = canonical_arrow(labeling, g)
        return scale * sign * g_bar(canon)

    return GFunction(g_bar.arity, g_bar.range, ev)


def reduced_convolve(f_bar: GFunction, g_bar: GFunction, labeling: Labeling, strict: bool = True) -> GFunction:
    """Convolution on the reduced groupoid: the fiber sum runs over reduced arrows only."""
    if f_bar.arity != g_bar.arity:
        raise ValueError("arity mismatch")
    n = f_bar.arity
    base = labeling.pattern

    def ev(alpha: GroupoidElement) -> complex:
        _check_base(labeling, alpha)
        x = base.points[alpha.left[0]]
        if strict and base.depth(x) < f_bar.range:
            raise WindowError(f"fiber of radius {f_bar.range} leaves the window")
        near = sorted(int(b) for b in base.tree.query_ball_point(x, f_bar.range + GEOM_TOL))
        total = 0j
        for subset in combinations(near, n):
            eta = canonical_order(labeling, subset)
            fb = f_bar(GroupoidElement(base, alpha.left, eta))
            if fb != 0:
                total += fb * g_bar(GroupoidElement(base, eta, alpha.right))
        return total

    return GFunction(n, f_bar.range + g_bar.range, ev)
