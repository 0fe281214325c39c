"""Convolution algebra of the N-fermion groupoid on finite samples.

A :class:`GFunction` is either a finite table of arrow values or a
translation-invariant kernel.  Table entries are keyed geometrically: by the
anchored coordinates of the two configurations plus the total translation
separating the arrow's lattice from the generating frame of the pattern.
Translates of Z^d by lattice vectors coincide, so for periodic patterns that
translation is reduced modulo 1.

Fiber sums run over the sampled window.  Operations that need points beyond
the window raise :class:`WindowError` instead of truncating silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import permutations as perm
from .errors import WindowError
from .fock import SectorBasis, SectorOperator
from .groupoid import GroupoidElement, inverse, two_action
from .hamiltonian import GEOM_TOL, BiEquivariantCoefficient, diameter
from .pattern import Pattern, regenerate

ArrowKey = tuple


def _round(pts: np.ndarray, digits: int = 8) -> tuple:
    return tuple(tuple(round(float(c), digits) + 0.0 for c in p) for p in np.atleast_2d(pts))


def arrow_key(g: GroupoidElement) -> ArrowKey:
    total = np.round(g.base.offset + g.shift, 8)
    if g.base.kind == "periodic":
        total = np.round(total % 1.0, 8) % 1.0
    lattice = _round(total)
    return (lattice, _round(g.left_points()), _round(g.right_points()))


def arrow_diameter(g: GroupoidElement) -> float:
    return diameter(np.vstack([g.left_points(), g.right_points()]))


@dataclass(frozen=True, eq=False)
class GFunction:
    """Function on arrows of arity ``arity`` vanishing beyond arrow diameter ``range``."""

    arity: int
    range: float
    evaluate: Callable[[GroupoidElement], complex]
    table: Mapping[ArrowKey, complex] | None = None

    def __call__(self, g: GroupoidElement) -> complex:
        if g.arity != self.arity:
            raise ValueError("arity mismatch")
        if arrow_diameter(g) > self.range + GEOM_TOL:
            return 0j
        return complex(self.evaluate(g))

    @classmethod
    def from_values(cls, arity: int, values: Mapping[GroupoidElement, complex] | Iterable[tuple[GroupoidElement, complex]]) -> "GFunction":
        items = values.items() if isinstance(values, Mapping) else values
        table: dict[ArrowKey, complex] = {}
        rng = 0.0
        for g, v in items:
            if g.arity != arity:
                raise ValueError("arity mismatch")
            k = arrow_key(g)
            table[k] = table.get(k, 0j) + complex(v)
            rng = max(rng, arrow_diameter(g))
        return cls(arity, rng, lambda g: table.get(arrow_key(g), 0j), table)

    @classmethod
    def delta(cls, g: GroupoidElement, value: complex = 1.0) -> "GFunction":
        return cls.from_values(g.arity, [(g, value)])

    @classmethod
    def from_kernel(cls, q: BiEquivariantCoefficient, scale: complex = 1.0) -> "GFunction":
        return cls(q.arity, q.range, lambda g: scale * q(g.left_points(), g.right_points()))

    @classmethod
    def units(cls, arity: int, radius: float) -> "GFunction":
        """Indicator of the units whose configuration has diameter at most ``radius``.

        The full unit indicator is not finitely supported; this local unit
        acts as the identity on functions whose arrows fit in ``radius``.
        """
        return cls(arity, radius, lambda g: 1.0 if g.left == g.right else 0.0)

    def __add__(self, other: "GFunction") -> "GFunction":
        return GFunction(self.arity, max(self.range, other.range), lambda g: self(g) + other(g))

    def scale(self, c: complex) -> "GFunction":
        return GFunction(self.arity, self.range, lambda g: c * self(g))


def _fiber(base: Pattern, anchor: int, radius: float, arity: int, strict: bool) -> list[tuple[int, ...]]:
    """Ordered ``arity``-tuples of base points within ``radius`` of ``anchor``."""
    x = base.points[anchor]
    if strict and base.depth(x) < radius:
        raise WindowError(f"fiber of radius {radius} leaves the window")
    near = sorted(int(b) for b in base.tree.query_ball_point(x, radius + GEOM_TOL))
    return list(permutations(near, arity))


def convolve(f: GFunction, g: GFunction, strict: bool = True) -> GFunction:
    """``(f*g)(alpha) = sum_{beta in r^{-1}(r(alpha))} f(beta) g(beta^{-1} alpha)``."""
    if f.arity != g.arity:
        raise ValueError("arity mismatch")

    def ev(alpha: GroupoidElement) -> complex:
        total = 0j
        for eta in _fiber(alpha.base, alpha.left[0], f.range, f.arity, strict):
            beta = GroupoidElement(alpha.base, alpha.left, eta)
            fb = f(beta)
            if fb == 0:
                continue
            total += fb * g(GroupoidElement(alpha.base, eta, alpha.right))
        return total

    return GFunction(f.arity, f.range + g.range, ev)


def convolve_source_fiber(f: GFunction, g: GFunction, strict: bool = True) -> GFunction:
    """``(f*g)(alpha) = sum_{beta in s^{-1}(s(alpha))} f(alpha beta^{-1}) g(beta)``."""
    if f.arity != g.arity:
        raise ValueError("arity mismatch")

    def ev(alpha: GroupoidElement) -> complex:
        total = 0j
        for eta in _fiber(alpha.base, alpha.right[0], g.range, g.arity, strict):
            beta = GroupoidElement(alpha.base, eta, alpha.right)
            gb = g(beta)
            if gb == 0:
                continue
            total += f(GroupoidElement(alpha.base, alpha.left, eta)) * gb
        return total

    return GFunction(f.arity, f.range + g.range, ev)


def involution(f: GFunction) -> GFunction:
    """``f*(alpha) = conj(f(alpha^{-1}))``."""
    return GFunction(f.arity, f.range, lambda g: f(inverse(g)).conjugate())


def conditional_expectation(f: GFunction) -> GFunction:
    """``E(f)(alpha) = (1/N!^2) sum_{s1,s2} (-1)^{s1} (-1)^{s2} f(s1 · alpha · s2)``."""
    n = f.arity
    perms = [(p, perm.sign(p)) for p in perm.all_permutations(n)]
    norm = float(math.factorial(n) ** 2)

    def ev(alpha: GroupoidElement) -> complex:
        total = 0j
        for s1, e1 in perms:
            for s2, e2 in perms:
                total += e1 * e2 * f(two_action(s1, alpha, s2))
        return total / norm

    return GFunction(n, f.range, ev)


def is_bi_equivariant(f: GFunction, arrows: Iterable[GroupoidElement], tol: float = 1e-12) -> bool:
    for a in arrows:
        v = f(a)
        for s1 in perm.all_permutations(f.arity):
            for s2 in perm.all_permutations(f.arity):
                w = f(two_action(s1, a, s2))
                if abs(w - perm.sign(s1) * perm.sign(s2) * v) > tol:
                    return False
    return True


def _candidate_pairs(base: Pattern, n: int, radius: float, sites: Iterable[int] | None = None):
    """Unordered pairs ``(U, V)`` of n-subsets with ``diam(U ∪ V) <= radius``."""
    pts = base.points
    anchors = range(len(base)) if sites is None else sites
    seen = set()
    for a in anchors:
        near = sorted(int(b) for b in base.tree.query_ball_point(pts[a], radius + GEOM_TOL))
        for u in combinations(near, n):
            for v in combinations(near, n):
                if (u, v) in seen:
                    continue
                if diameter(pts[list(set(u) | set(v))]) > radius + GEOM_TOL:
                    continue
                seen.add((u, v))
                yield u, v


def left_regular(f: GFunction, base: Pattern, N: int | None = None) -> SectorOperator:
    """Compression of the regular representation to the antisymmetric sector.

    ``<U|pi(f)|V> = (1/N!) sum_{chi_U, chi_V} (-1)^{chi_U} (-1)^{chi_V} f(t̂(chi_U, chi_V))``,
    which is ``N! f`` at canonical orderings when ``f`` is bi-equivariant.
    """
    n = f.arity if N is None else N
    if n != f.arity:
        raise ValueError("arity mismatch")
    basis = SectorBasis.of(base, n)
    norm = float(math.factorial(n))
    rows, cols, vals = [], [], []
    for u, v in _candidate_pairs(base, n, f.range):
        total = 0j
        for cu in permutations(u):
            su = perm.sign(cu)
            for cv in permutations(v):
                val = f(GroupoidElement(base, cu, cv))
                if val != 0:
                    total += su * perm.sign(cv) * val
        if total != 0:
            rows.append(basis.index(u))
            cols.append(basis.index(v))
            vals.append(total / norm)
    return SectorOperator(basis, np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64), np.array(vals, dtype=complex))


def ordered_configurations(base: Pattern, n: int) -> list[tuple[int, ...]]:
    return list(permutations(range(len(base)), n))


def left_regular_ordered(f: GFunction, base: Pattern) -> np.ndarray:
    """Dense matrix of ``pi(f) delta_zeta = sum_xi f(t̂(xi, zeta)) delta_xi`` on ordered configurations."""
    configs = ordered_configurations(base, f.arity)
    index = {c: i for i, c in enumerate(configs)}
    mat = np.zeros((len(configs), len(configs)), dtype=complex)
    for u, v in _candidate_pairs(base, f.arity, f.range):
        for cu in permutations(u):
            for cv in permutations(v):
                val = f(GroupoidElement(base, cu, cv))
                if val != 0:
                    mat[index[cu], index[cv]] = val
    return mat


def seed_to_function(q: BiEquivariantCoefficient) -> GFunction:
    """``q / N!``: its compressed regular representation is the assembled sector matrix."""
    return GFunction.from_kernel(q, 1.0 / math.factorial(q.arity))


# covariance --------------------------------------------------------------------


@dataclass(frozen=True)
class CovarianceReport:
    max_deviation: float
    compared_entries: int
    interior_sites: int

    @property
    def passed(self) -> bool:
        return self.max_deviation <= 1e-12


def translated_sample(pattern: Pattern, a: int) -> tuple[Pattern, dict[int, int]]:
    """An independent sample of ``L - x`` (x the a-th point) and the site map ``L -> L - x``.

    Resamplable kinds are regenerated in a window centred at ``x`` before the
    shift; other patterns are shifted directly.
    """
    x = pattern.points[a]
    try:
        moved = regenerate(pattern, center=x).translate(x)
    except ValueError:
        moved = pattern.translate(x)
    mapping: dict[int, int] = {}
    for i, p in enumerate(pattern.points):
        j = moved.index_of(p - x)
        if j is not None:
            mapping[i] = j
    return moved, mapping


def _interior(pattern: Pattern, moved: Pattern, mapping: Mapping[int, int], margin: float) -> list[int]:
    return [
        i
        for i, j in mapping.items()
        if pattern.depth(pattern.points[i]) >= margin and moved.depth(moved.points[j]) >= margin
    ]


def compare_relabeled(op1: SectorOperator, op2: SectorOperator, mapping: Mapping[int, int], sites: Sequence[int]) -> CovarianceReport:
    """Max entry deviation of ``op1`` and ``op2`` on states built from ``sites`` (relabelled by ``mapping``)."""
    b1, b2 = op1.basis, op2.basis
    n = b1.N
    states = [u for u in combinations(sorted(sites), n)]
    idx1 = [b1.index(u) for u in states]
    relabeled = []
    signs = []
    for u in states:
        img = [mapping[s] for s in u]
        relabeled.append(b2.index(img))
        signs.append(perm.sign(img))
    m1 = op1.tocsr()[idx1][:, idx1].toarray()
    m2 = op2.tocsr()[relabeled][:, relabeled].toarray()
    s = np.array(signs, dtype=float)
    m2 = m2 * s[:, None] * s[None, :]
    dev = float(np.max(np.abs(m1 - m2))) if len(states) else 0.0
    return CovarianceReport(dev, len(states) ** 2, len(sites))


def covariance_check(f: GFunction, pattern: Pattern, a: int, N: int | None = None) -> CovarianceReport:
    """``T_a* pi_L(f) T_a = pi_{L-a}(f)`` on the interior of both windows."""
    moved, mapping = translated_sample(pattern, a)
    sites = _interior(pattern, moved, mapping, f.range)
    op1 = left_regular(f, pattern, N)
    op2 = left_regular(f, moved, N)
    return compare_relabeled(op1, op2, mapping, sites)


def galilean_check(coeffs: Sequence[BiEquivariantCoefficient], pattern: Pattern, a: int, N: int) -> CovarianceReport:
    """Assembled sector matrices on ``L`` and on ``L - x`` agree after relabelling.

    An entry between states ``U`` and ``V`` only involves the geometry of
    ``U ∪ V``; states are drawn from sites at depth at least the largest range
    in both windows.
    """
    from .hamiltonian import assemble_sector

    moved, mapping = translated_sample(pattern, a)
    reach = max((c.range for c in coeffs), default=0.0)
    sites = _interior(pattern, moved, mapping, reach)
    op1 = assemble_sector(coeffs, pattern, N)
    op2 = assemble_sector(coeffs, moved, N)
    return compare_relabeled(op1, op2, mapping, sites)
