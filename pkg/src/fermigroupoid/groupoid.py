"""The N-fermion groupoid on a windowed pattern sample.

An arrow ``(xi, zeta)`` has ``L_xi = L_zeta`` and ``chi_xi(1) = 0``.  Arrows
are stored against a fixed base sample ``L0``: the pair of index tuples
``(left, right)`` stands for ``t̂_x(xi, zeta)`` with ``x = L0[left[0]]``, i.e.
the lattice is ``L0 - L0[left[0]]``.  Coordinates are always recomputed from
the base sample, so the anchor is exact and no drift accumulates under
repeated composition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import permutations as perm
from .cover import OrderedConfig, OrderedPair, translate_config
from .errors import CompositionError
from .pattern import Pattern


@dataclass(frozen=True, eq=False)
class GroupoidElement:
    base: Pattern
    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self) -> None:
        left = tuple(int(i) for i in self.left)
        right = tuple(int(i) for i in self.right)
        if not left or len(left) != len(right):
            raise ValueError("arrow needs two configurations of equal positive arity")
        if len(set(left)) != len(left) or len(set(right)) != len(right):
            raise ValueError("configurations must list distinct points")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @property
    def arity(self) -> int:
        return len(self.left)

    @property
    def shift(self) -> np.ndarray:
        """The translation taking the base sample to this arrow's lattice."""
        return self.base.points[self.left[0]]

    def left_points(self) -> np.ndarray:
        return self.base.points[list(self.left)] - self.shift

    def right_points(self) -> np.ndarray:
        return self.base.points[list(self.right)] - self.shift

    def lattice(self) -> Pattern:
        return self.base.translate(self.shift)

    def is_unit(self) -> bool:
        return self.left == self.right

    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (self.left, self.right)

    def as_pair(self) -> OrderedPair:
        lat = self.lattice()
        return OrderedPair(OrderedConfig(lat, self.left), OrderedConfig(lat, self.right))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupoidElement):
            return NotImplemented
        return self.base is other.base and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((id(self.base), self.left, self.right))

    def __repr__(self) -> str:
        return f"GroupoidElement(left={self.left}, right={self.right})"


def unit(base: Pattern, order: Sequence[int]) -> GroupoidElement:
    return GroupoidElement(base, tuple(order), tuple(order))


def from_pair(base: Pattern, pair: OrderedPair) -> GroupoidElement:
    """Arrow for an anchored pair living on a translate ``base - x`` of ``base``."""
    xi, zeta = pair.left, pair.right
    if np.linalg.norm(xi.first_point()) > base.match_tol:
        raise ValueError("pair is not anchored at the origin")
    # A translate L0 - x carries the window center c0 - x.
    shift = base.center - xi.pattern.center
    left = base.indices_of(xi.points() + shift)
    right = base.indices_of(zeta.points() + shift)
    return GroupoidElement(base, tuple(left), tuple(right))


def same_arrow(g: GroupoidElement, h: GroupoidElement, margin: float = 0.0) -> bool:
    """Geometric equality of arrows within ``match_tol``.

    Two arrows on the same base agree when their anchored configurations
    coincide and their lattices coincide on the part of the window both
    samples cover (shrunk by ``margin``).
    """
    if g.arity != h.arity:
        return False
    tol = g.base.match_tol
    if not np.allclose(g.left_points(), h.left_points(), atol=tol, rtol=0):
        return False
    if not np.allclose(g.right_points(), h.right_points(), atol=tol, rtol=0):
        return False
    if g.base is h.base and g.left[0] == h.left[0]:
        return True
    return _lattices_agree(g.base, g.shift, h.base, h.shift, margin)


def _lattices_agree(b1: Pattern, s1: np.ndarray, b2: Pattern, s2: np.ndarray, margin: float) -> bool:
    c1 = b1.center - s1
    c2 = b2.center - s2
    p1 = b1.points - s1
    p2 = b2.points - s2
    keep1 = (b1.window_radius - np.linalg.norm(p1 - c1, axis=1) >= margin) & (
        b2.window_radius - np.linalg.norm(p1 - c2, axis=1) >= margin
    )
    keep2 = (b2.window_radius - np.linalg.norm(p2 - c2, axis=1) >= margin) & (
        b1.window_radius - np.linalg.norm(p2 - c1, axis=1) >= margin
    )
    a, b = p1[keep1], p2[keep2]
    if len(a) != len(b):
        return False
    if len(a) == 0:
        return True
    from scipy.spatial import cKDTree

    da, _ = cKDTree(b).query(a)
    return bool(np.all(da <= b1.match_tol))


def inverse(g: GroupoidElement) -> GroupoidElement:
    """``(xi, zeta)^{-1} = t̂_{chi_zeta(1)}(zeta, xi)``."""
    return GroupoidElement(g.base, g.right, g.left)


def range_(g: GroupoidElement) -> GroupoidElement:
    """``r(xi, zeta) = (xi, xi)``."""
    return GroupoidElement(g.base, g.left, g.left)


def source(g: GroupoidElement) -> GroupoidElement:
    """``s(xi, zeta) = t̂_{chi_zeta(1)}(zeta, zeta)``."""
    return GroupoidElement(g.base, g.right, g.right)


def composable(g1: GroupoidElement, g2: GroupoidElement) -> bool:
    if g1.base is g2.base and g1.right == g2.left:
        return True
    return same_arrow(source(g1), range_(g2), margin=_margin(g1))


def _margin(g: GroupoidElement) -> float:
    return g.base.R


def compose(g1: GroupoidElement, g2: GroupoidElement) -> GroupoidElement:
    """``(xi, zeta) · t̂_{chi_zeta(1)}(zeta, zeta') = (xi, zeta')``."""
    if g1.base is g2.base and g1.right == g2.left:
        return GroupoidElement(g1.base, g1.left, g2.right)
    if g1.arity != g2.arity or not same_arrow(source(g1), range_(g2), margin=_margin(g1)):
        raise CompositionError()
    # Express the right configuration of g2 in the frame of g1.
    moved = g2.right_points() + g1.base.points[g1.right[0]]
    right = g1.base.indices_of(moved)
    return GroupoidElement(g1.base, g1.left, tuple(right))


def two_action(s1: Sequence[int], g: GroupoidElement, s2: Sequence[int]) -> GroupoidElement:
    """``s1 · (xi, zeta) · s2 = t̂_{chi_xi o s1^{-1}(1)}(Λ_{s1} xi, Λ_{s2^{-1}} zeta)``."""
    if len(s1) != g.arity or len(s2) != g.arity:
        raise ValueError("arity mismatch")
    left = perm.relabel(g.left, s1)
    right = perm.relabel(g.right, perm.inverse(s2))
    return GroupoidElement(g.base, left, right)


def tau(s: Sequence[int], u: GroupoidElement) -> GroupoidElement:
    """Bisection ``tau_s(xi) = t̂_{chi_xi o s^{-1}(1)}(Λ_s xi, xi)`` at a unit."""
    if not u.is_unit():
        raise ValueError("tau is evaluated at units")
    if len(s) != u.arity:
        raise ValueError("arity mismatch")
    return GroupoidElement(u.base, perm.relabel(u.left, s), u.left)


Bisection = Callable[[GroupoidElement], GroupoidElement]


def bisection_product(b1: Bisection, b2: Bisection) -> Bisection:
    """``(b1 · b2)(x) = b1(r(b2(x))) · b2(x)``."""

    def product(x: GroupoidElement) -> GroupoidElement:
        inner = b2(x)
        return compose(b1(range_(inner)), inner)

    return product


def act_with_bisections(b1: Bisection, g: GroupoidElement, b2_inv: Bisection) -> GroupoidElement:
    """``b1 · g · b2 = b1(r(g)) · g · b2^{-1}(s(g))^{-1}``; the caller passes ``b2^{-1}``."""
    return compose(compose(b1(range_(g)), g), inverse(b2_inv(source(g))))


def embed_morphism(g: GroupoidElement, n: int, m: int) -> tuple[GroupoidElement, GroupoidElement]:
    """``e(xi1 ∨ xi2, zeta1 ∨ zeta2) = ((xi1, zeta1), t̂_{chi_xi2(1)}(xi2, zeta2))``."""
    if n < 1 or m < 1 or n + m != g.arity:
        raise ValueError("arity must split as n + m with n, m >= 1")
    first = GroupoidElement(g.base, g.left[:n], g.right[:n])
    second = GroupoidElement(g.base, g.left[n:], g.right[n:])
    return first, second


@dataclass(frozen=True, eq=False)
class BlowupArrow:
    """``(xi, (L, x), zeta~)`` in the blow-up of the one-particle groupoid."""

    left_unit: GroupoidElement
    core: GroupoidElement
    right_unit: GroupoidElement

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BlowupArrow):
            return NotImplemented
        return (
            self.left_unit == other.left_unit
            and self.core == other.core
            and self.right_unit == other.right_unit
        )

    def __hash__(self) -> int:
        return hash((self.left_unit, self.core, self.right_unit))


def blowup_iso(g: GroupoidElement) -> BlowupArrow:
    """``(xi, zeta) -> (xi, (L_xi, chi_zeta(1)), t_{chi_zeta(1)}(zeta))``."""
    return BlowupArrow(
        unit(g.base, g.left),
        GroupoidElement(g.base, (g.left[0],), (g.right[0],)),
        unit(g.base, g.right),
    )


def blowup_inverse(b: BlowupArrow) -> GroupoidElement:
    return GroupoidElement(b.left_unit.base, b.left_unit.left, b.right_unit.left)


def blowup_compose(a: BlowupArrow, b: BlowupArrow) -> BlowupArrow:
    """``(z, gamma, w)(w, eta, x) = (z, gamma eta, x)``."""
    if a.right_unit != b.left_unit:
        raise CompositionError()
    return BlowupArrow(a.left_unit, compose(a.core, b.core), b.right_unit)


def blowup_compatible(b: BlowupArrow) -> bool:
    """``f(xi) = r(gamma)`` and ``s(gamma) = f(zeta~)`` with ``f(L, V, chi) = (L, chi(1))``."""
    f_left = unit(b.left_unit.base, b.left_unit.left[:1])
    f_right = unit(b.right_unit.base, b.right_unit.left[:1])
    return range_(b.core) == f_left and source(b.core) == f_right


def anchored_pair(g: GroupoidElement) -> OrderedPair:
    """The arrow as an explicit pair on the translated lattice (for cross-checks)."""
    return g.as_pair()


def pair_inverse(pair: OrderedPair) -> OrderedPair:
    """Inverse computed literally from translated configurations."""
    x = pair.right.first_point()
    return OrderedPair(translate_config(pair.right, x), translate_config(pair.left, x))
