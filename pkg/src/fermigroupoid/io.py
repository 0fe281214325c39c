"""File formats: patterns, ordered configurations, sector operators and Hamiltonian specs."""

from __future__ import annotations

import csv
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np
import scipy.io
import scipy.sparse as sp

from .cover import OrderedConfig
from .fock import SectorBasis, SectorOperator
from .hamiltonian import BiEquivariantCoefficient, coefficient_from_block
from .pattern import DEFAULT_MATCH_TOL, Pattern

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


# patterns -------------------------------------------------------------------


def pattern_to_dict(p: Pattern) -> dict[str, Any]:
    return {
        "dim": p.dim,
        "r": p.r,
        "R": p.R,
        "window_radius": p.window_radius,
        "center": p.center.tolist(),
        "match_tol": p.match_tol,
        "kind": p.kind,
        "params": dict(p.params),
        "seed": p.seed,
        "points": p.points.tolist(),
    }


def pattern_from_dict(d: Mapping[str, Any]) -> Pattern:
    dim = int(d["dim"])
    pts = np.asarray(d["points"], dtype=float).reshape(-1, dim)
    return Pattern(
        pts,
        float(d["r"]),
        float(d["R"]),
        float(d["window_radius"]),
        d.get("center"),
        float(d.get("match_tol", DEFAULT_MATCH_TOL)),
        d.get("kind", "custom"),
        d.get("params", {}),
        int(d.get("seed", 0)),
    )


def save_pattern(p: Pattern, path: str | os.PathLike) -> None:
    if str(path).endswith(".csv"):
        buf = "\n".join(",".join(repr(float(c)) for c in row) for row in p.points)
        atomic_write(path, buf + "\n")
        return
    atomic_write(path, json.dumps(pattern_to_dict(p), indent=1) + "\n")


def load_pattern(path: str | os.PathLike, r: float | None = None, R: float | None = None, window: float | None = None) -> Pattern:
    """Read a pattern from JSON, or from CSV (one point per row).

    CSV carries no metadata: ``r`` and ``R`` default to half the minimal
    pairwise distance and the largest nearest-neighbour distance, and the
    window to the smallest ball about the centroid holding every point.
    """
    path = Path(path)
    if path.suffix != ".csv":
        return pattern_from_dict(json.loads(path.read_text()))
    with path.open(newline="") as fh:
        rows = [[float(c) for c in row] for row in csv.reader(fh) if row and not row[0].startswith("#")]
    pts = np.asarray(rows, dtype=float)
    from scipy.spatial import cKDTree

    if len(pts) > 1:
        dist, _ = cKDTree(pts).query(pts, k=2)
        nn = dist[:, 1]
        r = float(nn.min()) / 2 if r is None else r
        R = float(nn.max()) if R is None else R
    else:
        r = 0.5 if r is None else r
        R = 1.0 if R is None else R
    center = pts.mean(axis=0) if len(pts) else np.zeros(1)
    if window is None:
        window = float(np.max(np.linalg.norm(pts - center, axis=1))) if len(pts) else 0.0
    return Pattern(pts, r, R, window, center)


# configurations ---------------------------------------------------------------


def config_to_dict(xi: OrderedConfig, pattern_file: str) -> dict[str, Any]:
    return {"pattern_file": pattern_file, "subset": sorted(xi.order), "order": list(xi.order)}


def config_from_dict(d: Mapping[str, Any], base_dir: str | os.PathLike = ".") -> OrderedConfig:
    pattern = load_pattern(Path(base_dir) / d["pattern_file"])
    order = tuple(int(i) for i in d["order"])
    if sorted(order) != sorted(int(i) for i in d["subset"]):
        raise ValueError("order is not a bijection onto subset")
    return OrderedConfig(pattern, order)


# sector operators ---------------------------------------------------------------


def save_operator(op: SectorOperator, path: str | os.PathLike) -> None:
    mat = sp.coo_matrix((op.vals, (op.rows, op.cols)), shape=op.shape)
    field = "real" if np.all(op.vals.imag == 0) else "complex"
    if field == "real":
        mat = mat.real
    scipy.io.mmwrite(str(path), mat, comment=f"fermigroupoid sector N={op.basis.N} sites={op.basis.n_sites}", field=field, precision=17)


def load_matrix(path: str | os.PathLike) -> sp.csr_matrix:
    return sp.csr_matrix(scipy.io.mmread(str(path)))


def save_basis(basis: SectorBasis, path: str | os.PathLike) -> None:
    lines = ["row,sites"] + [f"{i},{' '.join(map(str, s))}" for i, s in enumerate(basis.states)]
    atomic_write(path, "\n".join(lines) + "\n")


def save_rows(path: str | os.PathLike, header: Iterable[str], rows: Iterable[Iterable[Any]]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    atomic_write(path, "\n".join(lines) + "\n")


# Hamiltonian specs ---------------------------------------------------------------


def load_config(path: str | os.PathLike) -> dict[str, Any]:
    """TOML when the suffix is ``.toml``, JSON otherwise."""
    path = Path(path)
    if path.suffix == ".toml":
        with path.open("rb") as fh:
            return tomllib.load(fh)
    return json.loads(path.read_text())


def load_hamiltonian_spec(path: str | os.PathLike) -> list[BiEquivariantCoefficient]:
    """Coefficient list from ``{"coefficients": [{arity, range, kind, params}, ...]}``."""
    spec = load_config(path)
    blocks = spec.get("coefficients", spec.get("coefficient"))
    if not blocks:
        raise ValueError("spec holds no coefficient blocks")
    return [coefficient_from_block(b) for b in blocks]
