"""Galilean-invariant finite-range Hamiltonians on a pattern.

Normalization: a coefficient ``q`` of arity ``n`` contributes the element

    Q = sum_{J, J' n-subsets} q(J ascending, J' ascending) a*_J a_J'

so the sector matrix entry between canonical states is the kernel value at
canonical representatives.  Against the factorial-weighted presentation
``(1/n!) sum_{ordered (xi, zeta)} q'(xi, zeta) a*(xi) a(zeta)`` this reads
``q = n! q'``.

Kernels are translation invariant: they are called with the ordered
coordinates of ``xi`` and ``zeta`` translated so that ``chi_xi(1)`` sits at
the origin.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from . import permutations as perm
from .car_symbolic import CARElement, Key
from .errors import WindowError
from .fock import SectorBasis, SectorOperator, frame_vector, represent
from .pattern import Pattern

Kernel = Callable[[np.ndarray, np.ndarray], complex]
GEOM_TOL = 1e-9


def diameter(points: np.ndarray) -> float:
    """Exact maximal pairwise distance (0 for fewer than two points)."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return 0.0
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt(np.max(np.sum(diff * diff, axis=-1))))


@dataclass(frozen=True, eq=False)
class BiEquivariantCoefficient:
    """Kernel on anchored ordered pairs, odd under both deck actions, zero beyond ``range``."""

    arity: int
    range: float
    kernel: Kernel
    name: str = "coefficient"

    def __call__(self, xs: np.ndarray, ys: np.ndarray) -> complex:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.shape[0] != self.arity or ys.shape[0] != self.arity:
            raise ValueError("arity mismatch")
        if diameter(np.vstack([xs, ys])) > self.range + GEOM_TOL:
            return 0j
        return complex(self.kernel(xs, ys))

    def on_points(self, points: np.ndarray, left: Sequence[int], right: Sequence[int]) -> complex:
        """Evaluate at ``(xi, zeta)`` given by index orders into ``points``, anchoring first."""
        origin = points[left[0]]
        return self(points[list(left)] - origin, points[list(right)] - origin)

    def swapped(self) -> "BiEquivariantCoefficient":
        """``conj(q o u)``: the coefficient of the adjoint element."""

        def kern(xs: np.ndarray, ys: np.ndarray) -> complex:
            return complex(self.kernel(ys - ys[0], xs - ys[0])).conjugate()

        return BiEquivariantCoefficient(self.arity, self.range, kern, self.name + "*")

    def scaled(self, factor: complex) -> "BiEquivariantCoefficient":
        return BiEquivariantCoefficient(
            self.arity, self.range, lambda xs, ys: factor * self.kernel(xs, ys), self.name
        )


@dataclass(frozen=True, eq=False)
class ManyBodyPotential:
    """``w_k(x_1..x_k; x'_1..x'_k)``: translation invariant, odd in each block, hermitian."""

    arity: int
    support: float
    kernel: Kernel
    name: str = "potential"


def coeff_from_potential(w: ManyBodyPotential) -> BiEquivariantCoefficient:
    """``q(xi, zeta) = w(chi_xi(1..n); chi_zeta(1..n))``."""
    return BiEquivariantCoefficient(w.arity, w.support, w.kernel, w.name)


def _act(xs: np.ndarray, ys: np.ndarray, s1: Sequence[int], s2: Sequence[int]):
    """Coordinates of ``s1 · (xi, zeta) · s2``, re-anchored at its new first point."""
    s1_inv = perm.inverse(s1)
    left = xs[list(s1_inv)]
    right = ys[list(s2)]
    return left - left[0], right - left[0]


def antisymmetrize(raw: Kernel, n: int, range_: float, name: str = "antisymmetrized") -> BiEquivariantCoefficient:
    """``E(f) = (1/n!^2) sum_{s1,s2} (-1)^{s1} (-1)^{s2} f(s1 · (xi, zeta) · s2)``."""
    perms = [(p, perm.sign(p)) for p in perm.all_permutations(n)]
    norm = float(math.factorial(n) ** 2)

    def kern(xs: np.ndarray, ys: np.ndarray) -> complex:
        total = 0j
        for s1, e1 in perms:
            for s2, e2 in perms:
                a, b = _act(xs, ys, s1, s2)
                total += e1 * e2 * complex(raw(a, b))
        return total / norm

    return BiEquivariantCoefficient(n, range_, kern, name)


def _match_sign(xs: np.ndarray, ys: np.ndarray, tol: float = GEOM_TOL) -> int:
    """``(-1)^{chi_xi^{-1} o chi_zeta}`` when both list the same points, else 0."""
    img = []
    for y in ys:
        hits = np.nonzero(np.linalg.norm(xs - y, axis=1) <= tol)[0]
        if len(hits) != 1:
            return 0
        img.append(int(hits[0]))
    if len(set(img)) != len(img):
        return 0
    return perm.sign(img)


# coefficient factories ----------------------------------------------------


def hopping(t: float, cutoff: float = 1.0, onsite: float = 0.0) -> BiEquivariantCoefficient:
    """One-body kernel: ``-t`` for ``0 < |x - y| <= cutoff`` and ``onsite`` on the diagonal."""

    def kern(xs: np.ndarray, ys: np.ndarray) -> complex:
        d = float(np.linalg.norm(ys[0] - xs[0]))
        if d <= GEOM_TOL:
            return onsite
        return -t

    return BiEquivariantCoefficient(1, cutoff, kern, "hopping")


def diagonal_potential(w: Callable[[float], float], n: int, range_: float, name: str = "diagonal") -> BiEquivariantCoefficient:
    """``(-1)^{chi_xi^{-1} o chi_zeta} delta_{V_xi, V_zeta} w(d_xi)``; gives ``sum_V w(d_V) n_V``."""

    def kern(xs: np.ndarray, ys: np.ndarray) -> complex:
        s = _match_sign(xs, ys)
        return s * w(diameter(xs)) if s else 0.0

    return BiEquivariantCoefficient(n, range_, kern, name)


def pair_diagonal(u: float | Callable[[float], float], distance: float | None = 1.0, range_: float | None = None) -> BiEquivariantCoefficient:
    """Density-density pair term ``sum_{x<y} u(|x-y|) n_x n_y``.

    With a number ``u`` the interaction acts only at separation ``distance``.
    """
    if callable(u):
        fn = u
        rng = range_ if range_ is not None else (distance or 1.0)
    else:
        amp = float(u)
        target = float(distance if distance is not None else 1.0)

        def fn(d: float) -> float:
            return amp if abs(d - target) <= GEOM_TOL else 0.0

        rng = range_ if range_ is not None else target
    return diagonal_potential(fn, 2, rng, "pair_diagonal")


def two_body_potential(
    v1: Callable[[np.ndarray], float],
    v2: Callable[[np.ndarray], float],
    support: float,
    cutoff_r: float,
) -> ManyBodyPotential:
    """``w_2 = v1(x2 - x1) v2(x2' - x1') phi(d_H)`` with odd ``v1, v2``.

    ``phi`` is the tent ``max(0, 1 - t / cutoff_r)``: equal to 1 at 0 and
    supported in ``[0, cutoff_r]``.
    """
    from .pattern import hausdorff

    def kern(xs: np.ndarray, ys: np.ndarray) -> complex:
        dh = hausdorff(xs, ys)
        phi = max(0.0, 1.0 - dh / cutoff_r)
        if phi == 0.0:
            return 0.0
        return v1(xs[1] - xs[0]) * v2(ys[1] - ys[0]) * phi

    return ManyBodyPotential(2, support, kern, "two_body")


def _coord_key(pts: np.ndarray, digits: int = 6) -> tuple:
    return tuple(tuple(round(float(c), digits) + 0.0 for c in p) for p in pts)


def potential_table(n: int, entries: Iterable[Mapping[str, Any]], range_: float | None = None) -> BiEquivariantCoefficient:
    """Kernel tabulated on anchored pairs, made hermitian and then antisymmetrized.

    Each entry gives ``left`` and ``right`` as lists of ``n`` points (left[0]
    is translated to the origin) and a ``value`` (a number or ``[re, im]``).
    """
    table: dict[tuple, complex] = {}
    span = 0.0
    for e in entries:
        left = np.atleast_2d(np.asarray(e["left"], dtype=float))
        right = np.atleast_2d(np.asarray(e["right"], dtype=float))
        if len(left) != n or len(right) != n:
            raise ValueError("table entry arity mismatch")
        val = e["value"]
        val = complex(val[0], val[1]) if isinstance(val, (list, tuple)) else complex(val)
        origin = left[0]
        key = (_coord_key(left - origin), _coord_key(right - origin))
        table[key] = table.get(key, 0j) + val
        span = max(span, diameter(np.vstack([left, right])))

    def raw(xs: np.ndarray, ys: np.ndarray) -> complex:
        return table.get((_coord_key(xs), _coord_key(ys)), 0j)

    def hermitian_raw(xs: np.ndarray, ys: np.ndarray) -> complex:
        return 0.5 * (raw(xs, ys) + raw(ys - ys[0], xs - ys[0]).conjugate())

    return antisymmetrize(hermitian_raw, n, range_ if range_ is not None else span, "potential_table")


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_CMPOPS = {
    ast.Lt: operator.lt,
    ast.LtE: operator.le,
    ast.Gt: operator.gt,
    ast.GtE: operator.ge,
    ast.Eq: operator.eq,
    ast.NotEq: operator.ne,
}
_FUNCS = {
    "exp": math.exp,
    "sqrt": math.sqrt,
    "abs": abs,
    "cos": math.cos,
    "sin": math.sin,
    "min": min,
    "max": max,
}


def compile_expression(source: str, variable: str = "d") -> Callable[[float], float]:
    """Arithmetic in one variable: numbers, + - * / **, comparisons, a few math functions
    and ``a if cond else b``.  Anything else is rejected."""
    tree = ast.parse(source, mode="eval")

    def ev(node: ast.AST, env: dict[str, float]) -> float:
        if isinstance(node, ast.Expression):
            return ev(node.body, env)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id == variable:
                return env[variable]
            if node.id in ("pi", "e"):
                return getattr(math, node.id)
            raise ValueError(f"unknown name {node.id!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand, env)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left, env), ev(node.right, env))
        if isinstance(node, ast.Compare) and len(node.ops) == 1 and type(node.ops[0]) in _CMPOPS:
            return float(_CMPOPS[type(node.ops[0])](ev(node.left, env), ev(node.comparators[0], env)))
        if isinstance(node, ast.IfExp):
            return ev(node.body, env) if ev(node.test, env) else ev(node.orelse, env)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
            return float(_FUNCS[node.func.id](*(ev(a, env) for a in node.args)))
        raise ValueError(f"unsupported expression element {ast.dump(node)}")

    ev(tree, {variable: 1.0})  # reject bad syntax early

    return lambda d: ev(tree, {variable: float(d)})


def expression(source: str, n: int, range_: float) -> BiEquivariantCoefficient:
    """Diagonal ``n``-body term ``sum_V w(d_V) n_V`` with ``w`` given as an expression in ``d``."""
    return diagonal_potential(compile_expression(source), n, range_, "expression")


def coefficient_from_block(block: Mapping[str, Any]) -> BiEquivariantCoefficient:
    """Build a coefficient from a spec block ``{kind, arity, range, params}``."""
    kind = block["kind"]
    params = dict(block.get("params", {}))
    arity = int(block.get("arity", 1 if kind == "hopping" else 2))
    rng = block.get("range")
    if kind == "hopping":
        if arity != 1:
            raise ValueError("hopping blocks have arity 1")
        return hopping(float(params.get("t", 1.0)), float(rng if rng is not None else params.get("cutoff", 1.0)), float(params.get("onsite", 0.0)))
    if kind == "pair_diagonal":
        if arity != 2:
            raise ValueError("pair_diagonal blocks have arity 2")
        dist = float(params.get("distance", 1.0))
        return pair_diagonal(float(params.get("u", 0.0)), dist, float(rng) if rng is not None else dist)
    if kind == "potential_table":
        return potential_table(arity, params["entries"], float(rng) if rng is not None else None)
    if kind == "expression":
        if rng is None:
            raise ValueError("expression blocks need a range")
        return expression(str(params["w"]), arity, float(rng))
    raise ValueError(f"unknown coefficient kind {kind!r}")


# assembly -------------------------------------------------------------------


def canonical_terms(coeff: BiEquivariantCoefficient, pattern: Pattern, sites: Iterable[int] | None = None) -> dict[Key, complex]:
    """``{(J, J'): q(J asc, J' asc)}`` over pairs with ``diam(J ∪ J') <= range``.

    With ``sites`` given, only pairs meeting that set are kept.
    """
    pts = pattern.points
    n = coeff.arity
    wanted = None if sites is None else set(sites)
    out: dict[Key, complex] = {}
    cache: dict[bytes, complex] = {}
    for a in range(len(pattern)):
        near = [int(b) for b in pattern.tree.query_ball_point(pts[a], coeff.range + GEOM_TOL) if b >= a]
        near.sort()
        for j in combinations(near, n):
            for jp in combinations(near, n):
                union = set(j) | set(jp)
                if a not in union:
                    continue
                if wanted is not None and not (union & wanted):
                    continue
                origin = pts[j[0]]
                xs = pts[list(j)] - origin
                ys = pts[list(jp)] - origin
                key = xs.tobytes() + b"|" + ys.tobytes()
                if key not in cache:
                    cache[key] = coeff(xs, ys)
                val = cache[key]
                if val != 0:
                    out[(j, jp)] = val
    return out


def check_window(coeff: BiEquivariantCoefficient, pattern: Pattern) -> None:
    if coeff.range > 2 * pattern.window_radius:
        raise WindowError(f"range {coeff.range} exceeds the sampled window")


@dataclass(frozen=True, eq=False)
class LatticeHamiltonian:
    """A list of coefficients evaluated on one pattern."""

    pattern: Pattern
    coefficients: tuple[BiEquivariantCoefficient, ...]
    _terms: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        for c in self.coefficients:
            check_window(c, self.pattern)

    @property
    def n_sites(self) -> int:
        return len(self.pattern)

    @property
    def range(self) -> float:
        return max((c.range for c in self.coefficients), default=0.0)

    def terms(self, coeff: BiEquivariantCoefficient) -> dict[Key, complex]:
        key = id(coeff)
        if key not in self._terms:
            self._terms[key] = canonical_terms(coeff, self.pattern)
        return self._terms[key]

    def car_element(self, sites: Iterable[int] | None = None) -> CARElement:
        out: dict[Key, complex] = {}
        wanted = None if sites is None else set(sites)
        for c in self.coefficients:
            for k, v in self.terms(c).items():
                if wanted is not None and not ((set(k[0]) | set(k[1])) & wanted):
                    continue
                out[k] = out.get(k, 0) + v
        return CARElement(self.n_sites, out)

    def assemble(self, N: int) -> SectorOperator:
        return assemble_sector(self.coefficients, self.pattern, N)

    def ad(self, a: CARElement, margin_check: bool = True) -> CARElement:
        """``i [A, H_trunc]`` where ``H_trunc`` keeps every term meeting the support of ``A``."""
        from .car_symbolic import ad as _ad

        supp = a.support()
        if margin_check:
            for s in supp:
                if self.pattern.depth(self.pattern.points[s]) < self.range:
                    raise WindowError(f"site {s} lies within the interaction range of the window edge")
        return _ad(self.car_element(supp), a)


def assemble_sector(coeffs: Sequence[BiEquivariantCoefficient], pattern: Pattern, N: int) -> SectorOperator:
    """Sector matrix of ``sum_i Q_i``; arity ``n > N`` terms drop out, ``n < N`` are dressed."""
    basis = SectorBasis.of(pattern, N)
    terms: dict[Key, complex] = {}
    for c in coeffs:
        check_window(c, pattern)
        if c.arity > N:
            continue
        for k, v in canonical_terms(c, pattern).items():
            terms[k] = terms.get(k, 0) + v
    return represent(CARElement(len(pattern), terms), basis, hermitian=True)


# approximate unit -----------------------------------------------------------


def bump(t: float) -> float:
    """C^1 profile: 1 on [0, 1], 0 on [2, inf), ``1 - (3 s^2 - 2 s^3)`` with ``s = t - 1`` between."""
    if t <= 1.0:
        return 1.0
    if t >= 2.0:
        return 0.0
    s = t - 1.0
    return 1.0 - (3.0 * s * s - 2.0 * s * s * s)


def approximate_unit(pattern: Pattern, N: int, epsilon: float, profile: Callable[[float], float] = bump) -> SectorOperator:
    """Diagonal ``w(epsilon d_U)`` on the N-sector, ``d_U`` the diameter of ``U``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    basis = SectorBasis.of(pattern, N)
    pts = pattern.points
    vals = np.array([profile(epsilon * diameter(pts[list(u)])) for u in basis.states], dtype=complex)
    idx = np.arange(basis.dim)
    return SectorOperator(basis, idx, idx, vals, hermitian=True)


# descended derivation -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DescendedDerivation:
    """``K -> i [K, pi_N(Q)]`` on the N-sector, with a direct evaluation on rank-one classes."""

    coefficient: BiEquivariantCoefficient
    pattern: Pattern
    N: int

    def __post_init__(self) -> None:
        check_window(self.coefficient, self.pattern)

    @property
    def basis(self) -> SectorBasis:
        return SectorBasis.of(self.pattern, self.N)

    def generator(self) -> SectorOperator:
        return assemble_sector([self.coefficient], self.pattern, self.N)

    def commutator(self, k: SectorOperator) -> SectorOperator:
        return k.commutator(self.generator()).scale(1j)

    def _ordered_partners(self, config: Sequence[int]) -> list[tuple[int, ...]]:
        """Ordered n-tuples of sites within ``range`` of some site of ``config``."""
        pts = self.pattern.points
        near: set[int] = set()
        for s in config:
            near.update(int(b) for b in self.pattern.tree.query_ball_point(pts[s], self.coefficient.range + GEOM_TOL))
        return list(permutations(sorted(near), self.coefficient.arity))

    def direct(self, xi: Sequence[int], zeta: Sequence[int]) -> SectorOperator:
        """Two-sum formula for the image of ``|xi><zeta|``.

        The first sum collects ``q(xi', zeta') (-1)^{chi_xi^{-1} o chi_xibar}
        |xi' ∨ (xibar ∖ zeta')><zeta|`` over ``zeta' <= xibar`` with
        ``V_xibar = V_xi``; the second collects the mirror terms
        ``|xi><zeta' ∨ (zetabar ∖ xi')|``.  Both carry the weight
        ``1 / (n!^2 (N-n)!)`` in this normalization; the result is multiplied
        by ``-i`` to match ``i [K, pi_N(Q)]``.
        """
        q = self.coefficient
        n, N = q.arity, self.N
        basis = self.basis
        if len(xi) != N or len(zeta) != N:
            raise ValueError("rank-one class needs two N-configurations")
        if n > N:
            return SectorOperator.zero(basis)
        pts = self.pattern.points
        weight = 1.0 / (math.factorial(n) ** 2 * math.factorial(N - n))
        rows: list[int] = []
        cols: list[int] = []
        vals: list[complex] = []

        # first sum: pi(Q) |xi><zeta|
        col, col_sign = frame_vector(basis, zeta)
        for zeta_p in permutations(xi, n):
            rest = [s for s in xi if s not in zeta_p]
            for xi_p in self._ordered_partners(zeta_p):
                val = q.on_points(pts, xi_p, zeta_p)
                if val == 0:
                    continue
                for gamma in permutations(rest):
                    if set(xi_p) & set(gamma):
                        continue
                    xibar = tuple(zeta_p) + gamma
                    s = perm.relative_sign(xi, xibar)
                    row, row_sign = frame_vector(basis, tuple(xi_p) + gamma)
                    rows.append(row)
                    cols.append(col)
                    vals.append(weight * val * s * row_sign * col_sign)

        # second sum: |xi><zeta| pi(Q), subtracted
        row, row_sign = frame_vector(basis, xi)
        for xi_p in permutations(zeta, n):
            rest = [s for s in zeta if s not in xi_p]
            for zeta_p in self._ordered_partners(xi_p):
                val = q.on_points(pts, xi_p, zeta_p)
                if val == 0:
                    continue
                for gamma in permutations(rest):
                    if set(zeta_p) & set(gamma):
                        continue
                    zetabar = tuple(xi_p) + gamma
                    s = perm.relative_sign(zeta, zetabar)
                    c, c_sign = frame_vector(basis, tuple(zeta_p) + gamma)
                    rows.append(row)
                    cols.append(c)
                    vals.append(-weight * val * s * row_sign * c_sign)

        bracket = SectorOperator(basis, np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64), np.array(vals, dtype=complex))
        return bracket.scale(-1j)


def descended_derivation(coeff: BiEquivariantCoefficient, pattern: Pattern, N: int) -> DescendedDerivation:
    return DescendedDerivation(coeff, pattern, N)
