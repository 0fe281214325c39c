import os
import random
import subprocess
import sys
from itertools import combinations

import numpy as np
import pytest

from fermigroupoid import _native
from fermigroupoid._native import _fallback
from fermigroupoid.fock import _terms_to_masks
from fermigroupoid.hamiltonian import LatticeHamiltonian, hopping, pair_diagonal
from fermigroupoid.suites import chain, pair_hop

try:
    from fermigroupoid._native import _core
except ImportError:
    _core = None

needs_core = pytest.mark.skipif(_core is None, reason="compiled extension not built")


def _triplets(out):
    rows, cols, vals = out
    acc = {}
    for r, c, v in zip(rows.tolist(), cols.tolist(), vals.tolist()):
        acc[(r, c)] = acc.get((r, c), 0) + v
    return {k: v for k, v in acc.items() if v != 0}


def _terms(m):
    lat = chain(m)
    ham = LatticeHamiltonian(lat, [hopping(1.0, onsite=0.3), pair_diagonal(-2.0), pair_hop(2.0, 0.7)])
    return _terms_to_masks(ham.car_element().terms, m)


@pytest.mark.parametrize("n, k", [(6, 2), (9, 3), (12, 0), (5, 5)])
def test_lex_rank_matches_combinations(n, k):
    for rank, sub in enumerate(combinations(range(n), k)):
        assert _fallback.lex_rank(sub, n) == rank


@needs_core
@pytest.mark.parametrize("m, N", [(6, 1), (8, 2), (9, 3), (10, 4)])
def test_compiled_matches_fallback(m, N):
    (cre, ann, vals), n = _terms(m), m
    fast = _core.dress_terms(cre, ann, vals, n, N)
    slow = _fallback.dress_terms(cre, ann, vals, n, N)
    assert _triplets(fast) == _triplets(slow)


@needs_core
def test_compiled_matches_fallback_on_random_masks():
    rng = random.Random(0)
    n, N = 11, 3
    cre, ann, vals = [], [], []
    for _ in range(40):
        k = rng.randint(1, N)
        cre.append(sum(1 << s for s in rng.sample(range(n), k)))
        ann.append(sum(1 << s for s in rng.sample(range(n), k)))
        vals.append(complex(rng.random(), rng.random()))
    args = (np.array(cre, dtype=np.int64), np.array(ann, dtype=np.int64), np.array(vals), n, N)
    assert _triplets(_core.dress_terms(*args)) == _triplets(_fallback.dress_terms(*args))


def test_backend_name():
    assert _native.BACKEND in ("compiled", "python")
    assert _native.BACKEND == ("compiled" if _core is not None else "python")


def test_pure_backend_can_be_forced():
    code = "import fermigroupoid; print(fermigroupoid.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env={**os.environ, "FERMIGROUPOID_PURE": "1"}, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
