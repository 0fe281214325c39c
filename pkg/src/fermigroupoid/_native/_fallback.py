"""Pure-Python versions of the compiled kernels (same signatures and results)."""

from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np


def lex_rank(sites: tuple[int, ...], n: int) -> int:
    """Position of an ascending k-subset of ``range(n)`` in ``itertools.combinations`` order."""
    k = len(sites)
    rank = comb(n, k) - 1
    for i, c in enumerate(sites, start=1):
        rank -= comb(n - 1 - c, k - i + 1)
    return rank


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _merge_sign(fixed: int, extra: int) -> int:
    """Sign of ``fixed ∨ extra`` (each ascending) relative to the ascending union.

    It counts pairs ``(j, g)`` with ``j`` in ``fixed``, ``g`` in ``extra`` and ``g < j``.
    """
    count = 0
    for j in _bits(fixed):
        count += bin(extra & ((1 << j) - 1)).count("1")
    return -1 if count & 1 else 1


def dress_terms(cre_masks, ann_masks, values, n_sites: int, n_particles: int):
    """Sector matrix of ``sum_t v_t a*_{J_t} a_{J'_t}`` (canonical orderings) as COO arrays.

    Every term must have ``|J_t| = |J'_t| = n <= N``; the spectator set
    ``Gamma`` runs over ``(N - n)``-subsets of the sites outside ``J ∪ J'``.
    """
    rows: list[int] = []
    cols: list[int] = []
    vals: list[complex] = []
    full = (1 << n_sites) - 1
    for cm, am, v in zip(cre_masks, ann_masks, values):
        cm, am = int(cm), int(am)
        n = bin(cm).count("1")
        extra = n_particles - n
        if extra < 0 or bin(am).count("1") != n:
            continue
        free = _bits(full & ~(cm | am))
        for gamma in combinations(free, extra):
            gm = 0
            for g in gamma:
                gm |= 1 << g
            s = _merge_sign(cm, gm) * _merge_sign(am, gm)
            rows.append(lex_rank(tuple(_bits(cm | gm)), n_sites))
            cols.append(lex_rank(tuple(_bits(am | gm)), n_sites))
            vals.append(s * complex(v))
    return (
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(vals, dtype=np.complex128),
    )
