"""Self-binding versus scattering: sector spectra of hopping plus pair attraction.

``H = hopping(t) + u · sum_{|x-y| = distance} n_x n_y`` is assembled on the
N-particle sector and diagonalized densely.  Sorted eigenvalues are cut into
islands wherever a gap exceeds ``gap_factor`` times the median spacing; every
eigenvector gets its mean pair distance ``<psi| mean_{x<y in U} |x - y| |psi>``.
Bound clusters show up as islands with a small pair distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Mapping, Sequence

import numpy as np
import scipy.linalg

from .fock import SectorBasis, SectorOperator
from .hamiltonian import assemble_sector, hopping, pair_diagonal
from .pattern import Pattern, generate

DEFAULT_CAP = 6000
DEFAULT_GAP_FACTOR = 5.0
RESIDUAL_TOL = 1e-8


class SectorTooLargeError(ValueError):
    def __init__(self, dim: int, cap: int):
        super().__init__(f"sector dimension {dim} exceeds the cap {cap}")
        self.dim = dim
        self.cap = cap


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray
    vectors: np.ndarray | None
    max_residual: float


def eigensolve(op: SectorOperator | np.ndarray, vectors: bool = False, cap: int = DEFAULT_CAP, hermitian_tol: float = 1e-12) -> Spectrum:
    """Dense Hermitian eigendecomposition with a residual check.

    Eigenvectors are always computed internally so that
    ``|H v - lambda v| <= 1e-8 |H|`` can be verified for every pair.
    """
    mat = op.toarray() if isinstance(op, SectorOperator) else np.asarray(op)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("expected a square matrix")
    if mat.shape[0] > cap:
        raise SectorTooLargeError(mat.shape[0], cap)
    scale = float(np.max(np.abs(mat))) if mat.size else 0.0
    if mat.size and float(np.max(np.abs(mat - mat.conj().T))) > hermitian_tol * max(scale, 1.0):
        raise ValueError("matrix is not Hermitian")
    if np.all(np.isreal(mat)):
        mat = mat.real
    vals, vecs = scipy.linalg.eigh(mat)
    norm = float(np.linalg.norm(mat, 2)) if mat.size else 0.0
    res = np.linalg.norm(mat @ vecs - vecs * vals, axis=0) if mat.size else np.zeros(0)
    worst = float(res.max()) if res.size else 0.0
    if worst > RESIDUAL_TOL * max(norm, 1e-300):
        raise ArithmeticError(f"eigen residual {worst:.3e} exceeds {RESIDUAL_TOL:g}·|H|")
    return Spectrum(vals, vecs if vectors else None, worst)


def detect_islands(values: Sequence[float], gap_factor: float = DEFAULT_GAP_FACTOR) -> list[int]:
    """Island id for each sorted eigenvalue; a new island starts after every large gap."""
    vals = np.asarray(values, dtype=float)
    if len(vals) < 2:
        return [0] * len(vals)
    gaps = np.diff(vals)
    typical = float(np.median(gaps))
    if typical <= 0:
        positive = gaps[gaps > 0]
        typical = float(np.median(positive)) if len(positive) else 0.0
    ids = [0]
    for g in gaps:
        ids.append(ids[-1] + (1 if typical > 0 and g > gap_factor * typical else 0))
    return ids


def state_pair_distances(pattern: Pattern, basis: SectorBasis) -> np.ndarray:
    """Mean pairwise distance of the points in each basis state."""
    pts = pattern.points
    out = np.zeros(basis.dim)
    for row, u in enumerate(basis.states):
        pairs = list(combinations(u, 2))
        if pairs:
            out[row] = sum(float(np.linalg.norm(pts[a] - pts[b])) for a, b in pairs) / len(pairs)
    return out


@dataclass(frozen=True)
class Island:
    id: int
    count: int
    lowest: float
    highest: float
    mean_pair_distance: float


@dataclass
class SelfBindingReport:
    n_sites: int
    N: int
    t: float
    u: float
    eigenvalues: np.ndarray
    island_ids: list[int]
    pair_distances: np.ndarray
    islands: list[Island]
    max_residual: float
    trace_deviation: float
    config: dict[str, Any] = field(default_factory=dict)

    def rows(self) -> list[tuple[int, float, int, float]]:
        return [
            (i, float(e), k, float(d))
            for i, (e, k, d) in enumerate(zip(self.eigenvalues, self.island_ids, self.pair_distances))
        ]

    def gap_below(self, island: Island) -> float:
        """Distance to the nearest eigenvalue outside the island."""
        lo = self.eigenvalues[self.eigenvalues < island.lowest]
        hi = self.eigenvalues[self.eigenvalues > island.highest]
        below = island.lowest - float(lo.max()) if len(lo) else math.inf
        above = float(hi.min()) - island.highest if len(hi) else math.inf
        return min(below, above)

    def summary(self) -> dict[str, Any]:
        return {
            "n_sites": self.n_sites,
            "N": self.N,
            "t": self.t,
            "u": self.u,
            "dimension": len(self.eigenvalues),
            "max_residual": self.max_residual,
            "trace_deviation": self.trace_deviation,
            "islands": [
                {**island.__dict__, "separation": self.gap_below(island)} for island in self.islands
            ],
        }


def chain(n_sites: int) -> Pattern:
    """The chain ``{0, 1, ..., n_sites - 1}`` as a periodic sample."""
    half = (n_sites - 1) / 2
    return generate("periodic", {"d": 1}, window=half, center=[half])


def pattern_from_config(cfg: Mapping[str, Any]) -> Pattern:
    if "sites" in cfg:
        return chain(int(cfg["sites"]))
    spec = dict(cfg)
    return generate(
        spec.get("kind", "periodic"),
        spec.get("params", {"d": 1}),
        int(spec.get("seed", 0)),
        float(spec.get("window", 10.0)),
        spec.get("center"),
    )


def run_selfbinding_experiment(config: Mapping[str, Any]) -> SelfBindingReport:
    """Config keys: ``pattern`` (``{"sites": n}`` or generator arguments), ``N``,
    ``t``, ``u``, optional ``distance`` (1), ``cutoff`` (1), ``gap_factor`` (5)
    and ``cap`` (6000)."""
    pattern = pattern_from_config(config.get("pattern", {"sites": 12}))
    N = int(config.get("N", 2))
    t = float(config.get("t", 1.0))
    u = float(config.get("u", 0.0))
    distance = float(config.get("distance", 1.0))
    cutoff = float(config.get("cutoff", 1.0))
    gap_factor = float(config.get("gap_factor", DEFAULT_GAP_FACTOR))
    cap = int(config.get("cap", DEFAULT_CAP))

    basis = SectorBasis.of(pattern, N)
    if basis.dim > cap:
        raise SectorTooLargeError(basis.dim, cap)
    coeffs = [hopping(t, cutoff)]
    if u != 0.0 and N >= 2:
        coeffs.append(pair_diagonal(u, distance))
    op = assemble_sector(coeffs, pattern, N)
    spec = eigensolve(op, vectors=True, cap=cap)
    vals, vecs = spec.values, spec.vectors
    weights = np.abs(vecs) ** 2
    dist = weights.T @ state_pair_distances(pattern, basis)
    ids = detect_islands(vals, gap_factor)
    islands = []
    for k in sorted(set(ids)):
        sel = [i for i, j in enumerate(ids) if j == k]
        islands.append(Island(k, len(sel), float(vals[sel[0]]), float(vals[sel[-1]]), float(np.mean(dist[sel]))))
    trace = float(np.real(op.toarray().trace()))
    scale = max(abs(trace), float(np.sum(np.abs(vals))), 1.0)
    return SelfBindingReport(
        len(pattern), N, t, u, vals, ids, dist, islands, spec.max_residual,
        abs(trace - float(vals.sum())) / scale, dict(config),
    )
