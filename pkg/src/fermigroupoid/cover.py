"""Ordered finite configurations: points of the many-body order covers.

An :class:`OrderedConfig` ``xi = (L, V, chi)`` stores its ordering as a tuple
of point indices into ``L``: ``chi(k) = L.points[order[k]]``.  The subset
``V`` is the set of those indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import permutations as perm
from .errors import CoverNeighborhoodError, WindowError
from .pattern import Pattern


@dataclass(frozen=True, eq=False)
class OrderedConfig:
    pattern: Pattern
    order: tuple[int, ...]

    def __post_init__(self) -> None:
        order = tuple(int(i) for i in self.order)
        if len(set(order)) != len(order):
            raise ValueError("order must list distinct points")
        if any(i < 0 or i >= len(self.pattern) for i in order):
            raise ValueError("point index out of range")
        object.__setattr__(self, "order", order)

    @property
    def arity(self) -> int:
        return len(self.order)

    @property
    def subset(self) -> tuple[int, ...]:
        return tuple(sorted(self.order))

    def points(self) -> np.ndarray:
        return self.pattern.points[list(self.order)].reshape(self.arity, self.pattern.dim)

    def first_point(self) -> np.ndarray:
        if not self.order:
            raise ValueError("the empty configuration has no first point")
        return self.pattern.points[self.order[0]]

    def same_as(self, other: "OrderedConfig", tol: float | None = None) -> bool:
        """Geometric equality: same ordered points and same lattice."""
        if self.arity != other.arity:
            return False
        tol = self.pattern.match_tol if tol is None else tol
        if self.pattern is other.pattern:
            return self.order == other.order
        if not np.allclose(self.points(), other.points(), atol=tol, rtol=0):
            return False
        radius = min(
            self.pattern.window_radius - float(np.linalg.norm(self.pattern.center)),
            other.pattern.window_radius - float(np.linalg.norm(other.pattern.center)),
        )
        return self.pattern.same_points(other.pattern, radius=max(radius, 0.0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OrderedConfig):
            return NotImplemented
        return self.same_as(other)

    def __hash__(self) -> int:
        return hash((id(self.pattern), self.order))

    def __repr__(self) -> str:
        return f"OrderedConfig(order={self.order})"


class _Vanishing:
    """The wedge of overlapping configurations (read as zero in coefficient sums)."""

    _instance: "_Vanishing | None" = None

    def __new__(cls) -> "_Vanishing":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ø"

    def __bool__(self) -> bool:
        return False


VANISHING = _Vanishing()


def empty_config(pattern: Pattern) -> OrderedConfig:
    """Arity-0 configuration, standing for ``a(∅) = 1``."""
    return OrderedConfig(pattern, ())


def canonical_bijection(
    V: Sequence[Sequence[float]] | np.ndarray,
    Vp: Sequence[Sequence[float]] | np.ndarray,
    eps: float,
    r: float,
) -> dict[int, int]:
    """Map ``i -> j`` with ``Vp[j]`` the unique point in the open ball ``B(V[i], eps)``."""
    if not eps < r / 2:
        raise ValueError("eps must be smaller than r/2")
    a = np.asarray(V, dtype=float)
    b = np.asarray(Vp, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if b.ndim == 1:
        b = b.reshape(-1, 1)
    if len(a) != len(b):
        raise CoverNeighborhoodError("sizes differ")
    mapping: dict[int, int] = {}
    for i, v in enumerate(a):
        hits = np.nonzero(np.linalg.norm(b - v, axis=1) < eps)[0]
        if len(hits) != 1:
            raise CoverNeighborhoodError(f"point {i} has {len(hits)} candidates")
        mapping[i] = int(hits[0])
    if len(set(mapping.values())) != len(mapping):
        raise CoverNeighborhoodError("map is not injective")
    return mapping


def deck_transform(xi: OrderedConfig, s: Sequence[int]) -> OrderedConfig:
    """``Λ_s(xi) = (L, V, chi o s^{-1})``."""
    if len(s) != xi.arity:
        raise ValueError("arity mismatch")
    if not perm.is_permutation(s):
        raise ValueError("not a permutation")
    return OrderedConfig(xi.pattern, perm.relabel(xi.order, s))


def translate_config(xi: OrderedConfig, x: Sequence[float]) -> OrderedConfig:
    """``(L - x, V - x, t_x o chi)``; the window travels with the pattern."""
    moved = xi.pattern.translate(np.asarray(x, dtype=float))
    out = OrderedConfig(moved, xi.order)
    for k in xi.order:
        if moved.depth(moved.points[k]) < 0:
            raise WindowError("configuration leaves the window")
    return out


def anchor(xi: OrderedConfig) -> OrderedConfig:
    """Translate so that the first point sits at the origin."""
    return translate_config(xi, xi.first_point())


def _same_pattern(a: OrderedConfig, b: OrderedConfig) -> None:
    if a.pattern is b.pattern:
        return
    if len(a.pattern) != len(b.pattern) or not np.array_equal(a.pattern.points, b.pattern.points):
        raise ValueError("configurations live on different patterns")


def wedge(xi: OrderedConfig, zeta: OrderedConfig) -> OrderedConfig | _Vanishing:
    """Concatenate the orders of disjoint configurations; ø when they overlap."""
    _same_pattern(xi, zeta)
    if set(xi.order) & set(zeta.order):
        return VANISHING
    return OrderedConfig(xi.pattern, xi.order + zeta.order)


def leq_and_diff(zeta: OrderedConfig, xi: OrderedConfig) -> OrderedConfig | None:
    """``xi \\ zeta`` when ``chi_xi = chi_zeta ∨ chi_rest``, otherwise ``None``."""
    _same_pattern(xi, zeta)
    n = zeta.arity
    if n > xi.arity or xi.order[:n] != zeta.order:
        return None
    return OrderedConfig(xi.pattern, xi.order[n:])


@dataclass(frozen=True, eq=False)
class OrderedPair:
    left: OrderedConfig
    right: OrderedConfig

    def __post_init__(self) -> None:
        _same_pattern(self.left, self.right)

    @property
    def pattern(self) -> Pattern:
        return self.left.pattern
