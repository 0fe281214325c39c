"""Delone point patterns sampled in a finite window.

A :class:`Pattern` is a finite sample of an infinite Delone set: every point
of the set inside the ball ``B(center, window_radius)``.  Translating a
pattern moves its window along with the points.

Generators draw their randomness from a counter-based generator: the
displacement attached to lattice node ``n`` comes from
``numpy.random.Philox`` (Philox4x64-10) keyed by the seed, with the node
coordinates written into the 256-bit counter.  A node's displacement is
therefore independent of the window, so overlapping windows of the same
pattern agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Any, Mapping, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptySetError, WindowError

DEFAULT_MATCH_TOL = 1e-9
_WORD = (1 << 64) - 1

KINDS = ("periodic", "random_displaced", "triplet_rotation", "perturbed_periodic")


@dataclass(frozen=True, eq=False)
class Pattern:
    """Finite windowed sample of a Delone set in R^d."""

    points: np.ndarray
    r: float
    R: float
    window_radius: float
    center: np.ndarray | None = None
    match_tol: float = DEFAULT_MATCH_TOL
    kind: str = "custom"
    params: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0
    offset: np.ndarray | None = None

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if pts.size else pts.reshape(0, 1)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        c = np.zeros(pts.shape[1]) if self.center is None else np.array(self.center, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "params", dict(self.params))
        off = np.zeros(pts.shape[1]) if self.offset is None else np.array(self.offset, dtype=float)
        off.setflags(write=False)
        object.__setattr__(self, "offset", off)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    @cached_property
    def tree(self) -> cKDTree:
        return cKDTree(self.points)

    def index_of(self, x: Sequence[float]) -> int | None:
        """Index of the point within ``match_tol`` of ``x``, if any."""
        if len(self) == 0:
            return None
        dist, idx = self.tree.query(np.asarray(x, dtype=float))
        return int(idx) if dist <= self.match_tol else None

    def indices_of(self, xs: np.ndarray) -> list[int]:
        """Indices for a batch of points; raises :class:`WindowError` on a miss."""
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        if len(self) == 0:
            raise WindowError("no points in window")
        dist, idx = self.tree.query(xs)
        if np.any(dist > self.match_tol):
            raise WindowError("translated point not in sampled window")
        return [int(i) for i in idx]

    def depth(self, x: Sequence[float]) -> float:
        """Distance from ``x`` to the window boundary (negative outside)."""
        return self.window_radius - float(np.linalg.norm(np.asarray(x, dtype=float) - self.center))

    def translate(self, x: Sequence[float]) -> "Pattern":
        """The pattern ``L - x``; its window moves with it and ``offset`` records the shift."""
        x = np.asarray(x, dtype=float)
        return Pattern(
            self.points - x,
            self.r,
            self.R,
            self.window_radius,
            self.center - x,
            self.match_tol,
            self.kind,
            self.params,
            self.seed,
            self.offset + x,
        )

    def same_points(self, other: "Pattern", radius: float | None = None) -> bool:
        """Set equality (up to ``match_tol``) of the points within ``radius`` of the origin.

        Points within ``match_tol`` of the sphere may be missing on either
        side, since rounding decides which side of the boundary they fall.
        """
        tol = self.match_tol
        a, b = self.points, other.points
        if radius is None:
            if len(a) != len(b):
                return False
            core_a, core_b = a, b
        else:
            core_a = a[np.linalg.norm(a, axis=1) <= radius - tol]
            core_b = b[np.linalg.norm(b, axis=1) <= radius - tol]
        if len(core_a) and not len(b) or len(core_b) and not len(a):
            return False
        if len(core_a):
            da, _ = cKDTree(b).query(core_a)
            if np.any(da > tol):
                return False
        if len(core_b):
            db, _ = cKDTree(a).query(core_b)
            if np.any(db > tol):
                return False
        return True


@dataclass(frozen=True, eq=False)
class TruncatedPattern:
    """``(L ∩ B(0, radius)) ∪ ∂B(0, radius)``; the sphere is kept implicit."""

    points: np.ndarray
    radius: float

    def boundary_points_1d(self) -> np.ndarray:
        """Explicit boundary for d = 1 (the two endpoints)."""
        return np.array([[-self.radius], [self.radius]])


def _as_points(a: Any) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    return arr


def _directed(a: np.ndarray, b: np.ndarray, boundary_radius: float | None) -> float:
    """sup over a of the distance to ``b`` (plus the sphere when given)."""
    if len(a) == 0:
        return 0.0
    if len(b):
        d, _ = cKDTree(b).query(a)
    else:
        d = np.full(len(a), np.inf)
    if boundary_radius is not None:
        d = np.minimum(d, np.abs(boundary_radius - np.linalg.norm(a, axis=1)))
    return float(np.max(d))


def hausdorff(a: Any, b: Any, boundary_radius: float | None = None) -> float:
    """Hausdorff distance between finite point sets.

    With ``boundary_radius`` both sets are augmented by the sphere
    ``∂B(0, boundary_radius)``.  Sphere points belong to both sets, so only
    the finite points contribute, each through ``min(nearest point,
    |rho - |x||)``.
    """
    a = _as_points(a)
    b = _as_points(b)
    if boundary_radius is None and (len(a) == 0 or len(b) == 0):
        if len(a) == 0 and len(b) == 0:
            raise EmptySetError()
        return math.inf
    return max(_directed(a, b, boundary_radius), _directed(b, a, boundary_radius))


def max_truncation_radius(p: Pattern) -> float:
    """Largest rho with ``B(0, rho)`` inside the sampled window."""
    return p.window_radius - float(np.linalg.norm(p.center))


def truncate(p: Pattern, rho: float) -> TruncatedPattern:
    if rho <= 0:
        raise ValueError("truncation radius must be positive")
    if rho > max_truncation_radius(p) + p.match_tol:
        raise WindowError(f"radius {rho} exceeds window")
    norms = np.linalg.norm(p.points, axis=1)
    return TruncatedPattern(p.points[norms <= rho], float(rho))


def _truncated_hausdorff(p1: Pattern, p2: Pattern, rho: float) -> float:
    t1 = truncate(p1, rho)
    t2 = truncate(p2, rho)
    return hausdorff(t1.points, t2.points, boundary_radius=rho)


@dataclass(frozen=True)
class MetricReport:
    value: float
    comparison_radius: float
    supremum_radius: float


def pattern_metric_report(p1: Pattern, p2: Pattern, grid: int = 256) -> MetricReport:
    """Approximate ``inf{1/(1+r) : d_H(L1[r], L2[r]) < 1/r}``.

    Radii are scanned on a geometric grid in ``(0, rho_max]`` where
    ``rho_max`` is the largest radius both windows support; the last grid
    radius satisfying the condition is refined by bisection against the next
    grid radius.
    """
    if p1.dim != p2.dim:
        raise ValueError("dimension mismatch")
    if grid < 2:
        raise ValueError("grid must be at least 2")
    rho_max = min(max_truncation_radius(p1), max_truncation_radius(p2))
    if rho_max <= 0:
        raise WindowError("window does not contain the origin")

    def holds(r: float) -> bool:
        return _truncated_hausdorff(p1, p2, r) < 1.0 / r

    # The condition always holds below r = 1 (d_H <= r there).
    r_min = min(rho_max, 1.0) * 1e-3
    radii = np.geomspace(r_min, rho_max, grid)
    ok = [holds(float(r)) for r in radii]
    last = max(i for i, v in enumerate(ok) if v) if any(ok) else -1
    if last == grid - 1:
        r_star = float(radii[-1])
    elif last < 0:
        r_star = 0.0
    else:
        lo, hi = float(radii[last]), float(radii[last + 1])
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if holds(mid):
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-12 * hi:
                break
        r_star = lo
    return MetricReport(1.0 / (1.0 + r_star), rho_max, r_star)


def pattern_metric(p1: Pattern, p2: Pattern, grid: int = 256) -> float:
    """Symmetric: the value only depends on the unordered pair."""
    return pattern_metric_report(p1, p2, grid).value


@dataclass
class DeloneReport:
    valid: bool
    violations: list[dict[str, Any]]


def validate_delone(p: Pattern, grid_step: float | None = None) -> DeloneReport:
    """Check r-uniform discreteness and R-relative density inside the window.

    Density is probed on a cubic grid of points at depth >= R from the
    window boundary.
    """
    violations: list[dict[str, Any]] = []
    pts = p.points
    if len(pts) > 1:
        for i, j in sorted(p.tree.query_pairs(2 * p.r)):
            d = float(np.linalg.norm(pts[i] - pts[j]))
            if d <= p.match_tol:
                violations.append({"type": "duplicate", "pair": [i, j], "distance": d})
            elif d < 2 * p.r - p.match_tol:
                violations.append({"type": "discreteness", "pair": [i, j], "distance": d})
    inner = p.window_radius - p.R
    if inner >= 0:
        step = grid_step or max(min(p.r, p.R) / 2, inner / 200, 1e-3)
        axis = np.arange(-inner, inner + step / 2, step)
        grid_pts = np.array(list(product(axis, repeat=p.dim))) + p.center
        keep = np.linalg.norm(grid_pts - p.center, axis=1) <= inner
        grid_pts = grid_pts[keep]
        if len(grid_pts):
            if len(pts):
                dist, _ = p.tree.query(grid_pts)
            else:
                dist = np.full(len(grid_pts), np.inf)
            bad = np.nonzero(dist > p.R + p.match_tol)[0]
            for k in bad:
                violations.append(
                    {"type": "density", "probe": grid_pts[k].tolist(), "distance": float(dist[k])}
                )
    return DeloneReport(not violations, violations)


def _node_uniforms(seed: int, node: Sequence[int], count: int, stream: int = 0) -> np.ndarray:
    counter = [0, 0, 0, stream & _WORD]
    for k, c in enumerate(node[:3]):
        counter[k] = int(c) & _WORD
    bitgen = np.random.Philox(key=int(seed) & _WORD, counter=np.array(counter, dtype=np.uint64))
    return np.random.Generator(bitgen).random(count)


def _nodes_near(center: np.ndarray, radius: float) -> np.ndarray:
    lo = np.floor(center - radius).astype(int)
    hi = np.ceil(center + radius).astype(int)
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    return np.array(list(product(*axes)), dtype=int)


def _window_filter(pts: np.ndarray, center: np.ndarray, window: float) -> np.ndarray:
    keep = np.linalg.norm(pts - center, axis=1) <= window + 1e-12
    pts = pts[keep]
    order = np.lexsort(pts.T[::-1]) if len(pts) else np.arange(0)
    return pts[order]


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def generate(
    kind: str,
    params: Mapping[str, Any] | None = None,
    seed: int = 0,
    window: float = 10.0,
    center: Sequence[float] | None = None,
    match_tol: float = DEFAULT_MATCH_TOL,
) -> Pattern:
    """Sample a pattern of the given kind inside ``B(center, window)``.

    Kinds and their documented Delone radii:

    * ``periodic`` (``d``): Z^d, r = 0.4, R = 0.6 sqrt(d).
    * ``random_displaced`` (``d``, ``lambda`` < 1): ``n + lambda (u_n - 1/2)`` with
      ``u_n`` uniform in [0,1]^d; r = 0.49 (1 - lambda), R = (1 + lambda) sqrt(d) / 2.
    * ``perturbed_periodic`` (``d``, ``epsilon`` < 1/2): ``n + delta_n`` with
      ``delta_n`` uniform in the cube of half-width ``epsilon / sqrt(d)``;
      r = 0.49 (1 - 2 epsilon), R = sqrt(d) / 2 + epsilon.
    * ``triplet_rotation`` (``theta``, ``D`` > 2r, ``r``, ``count``): colinear
      triplets ``c_k + j r u_k`` (j = 0, 1, 2) with ``c_k = (k D, 0)`` and
      ``u_k`` at angle ``k theta``; the chain is one-dimensional inside the
      plane, so R is only meaningful relative to the window.
      ``window`` is ignored and set to enclose the chain.
    """
    params = dict(params or {})
    if kind == "periodic":
        d = int(params.get("d", 1))
        _require(d >= 1, "d must be positive")
        c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
        nodes = _nodes_near(c, window).astype(float)
        pts = _window_filter(nodes, c, window)
        return Pattern(pts, 0.4, 0.6 * math.sqrt(d), window, c, match_tol, kind, {"d": d}, seed)
    if kind in ("random_displaced", "perturbed_periodic"):
        d = int(params.get("d", 1))
        _require(d >= 1, "d must be positive")
        if kind == "random_displaced":
            lam = float(params.get("lambda", params.get("lam", 0.3)))
            _require(0 <= lam < 1, "lambda must lie in [0, 1)")
            half = lam / 2
            r, R = 0.49 * (1 - lam), (1 + lam) * math.sqrt(d) / 2
            stored = {"d": d, "lambda": lam}
        else:
            eps = float(params.get("epsilon", 0.2))
            _require(0 <= eps < 0.5, "epsilon must lie in [0, 1/2)")
            half = eps / math.sqrt(d)
            r, R = 0.49 * (1 - 2 * eps), math.sqrt(d) / 2 + eps
            stored = {"d": d, "epsilon": eps}
        c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
        nodes = _nodes_near(c, window + 1)
        disp = np.array([_node_uniforms(seed, n, d) for n in nodes]) if len(nodes) else nodes
        pts = nodes + (2 * disp - 1) * half
        pts = _window_filter(pts, c, window)
        return Pattern(pts, r, R, window, c, match_tol, kind, stored, seed)
    if kind == "triplet_rotation":
        theta = float(params.get("theta", math.sqrt(2)))
        spacing = float(params.get("r", 1.0))
        D = float(params.get("D", 3.0 * spacing))
        count = int(params.get("count", 3))
        _require(spacing > 0, "r must be positive")
        _require(D > 2 * spacing, "D must exceed 2r")
        _require(count >= 1, "count must be positive")
        first = -((count - 1) // 2)
        pts = []
        for k in range(first, first + count):
            u = np.array([math.cos(k * theta), math.sin(k * theta)])
            base = np.array([k * D, 0.0])
            for j in range(3):
                pts.append(base + j * spacing * u)
        arr = np.array(pts)
        c = np.zeros(2)
        w = float(np.max(np.linalg.norm(arr, axis=1))) + spacing
        w = max(w, float(window)) if params.get("keep_window") else w
        r_disc = min(spacing, D - 2 * spacing) / 2
        R = w / 2 + D
        stored = {"theta": theta, "r": spacing, "D": D, "count": count}
        return Pattern(arr, r_disc, R, w, c, match_tol, kind, stored, seed)
    raise ValueError(f"unknown pattern kind {kind!r}; expected one of {KINDS}")


def regenerate(p: Pattern, center: Sequence[float], window: float | None = None) -> Pattern:
    """Sample the same infinite pattern in another window."""
    if p.kind not in ("periodic", "random_displaced", "perturbed_periodic"):
        raise ValueError(f"kind {p.kind!r} cannot be resampled")
    return generate(p.kind, p.params, p.seed, window or p.window_radius, center, p.match_tol)
