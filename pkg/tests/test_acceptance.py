"""The twelve acceptance criteria, each at its stated size and tolerance.

Every test records a PASS/FAIL line in ``conftest.ACCEPTANCE``; the lines are
printed at the end of the pytest run.
"""

import functools
import math
import random
import time
from itertools import combinations

import numpy as np
import pytest

from conftest import ACCEPTANCE
from fermigroupoid import permutations as perm
from fermigroupoid.canonical_order import canonical_order, label_bijection, reduce_function, reduced_convolve
from fermigroupoid.car_symbolic import CARElement, ad, derivation_star, multiply, star, symbolic_trace, trace_state, vacuum_state
from fermigroupoid.experiment import run_selfbinding_experiment
from fermigroupoid.fock import SectorBasis, inner_product, rank_one, represent_monomial, sector_dimension
from fermigroupoid.galgebra import (
    GFunction,
    conditional_expectation,
    convolve,
    covariance_check,
    galilean_check,
    is_bi_equivariant,
    seed_to_function,
)
from fermigroupoid.groupoid import GroupoidElement, two_action
from fermigroupoid.hamiltonian import (
    approximate_unit,
    assemble_sector,
    descended_derivation,
    diagonal_potential,
    hopping,
    pair_diagonal,
)
from fermigroupoid.pattern import generate, max_truncation_radius, pattern_metric, pattern_metric_report
from fermigroupoid.suites import (
    SuiteOptions,
    chain,
    derivation_checks,
    groupoid_suite,
    interior_sites,
    pair_hop,
    random_complex,
    random_local_delta,
    random_gi_monomial,
    two_action_suite,
)

import oracles

pytestmark = pytest.mark.acceptance


def criterion(number: int, name: str):
    """Record the outcome of a test returning ``(passed, detail)`` and assert it."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                passed, detail = fn(*args, **kwargs)
            except Exception as exc:
                ACCEPTANCE[number] = (name, False, f"{type(exc).__name__}: {exc}")
                raise
            ACCEPTANCE[number] = (name, bool(passed), detail)
            assert passed, detail

        return run

    return wrap


def _dict(op):
    out = {}
    for r, c, v in zip(op.rows.tolist(), op.cols.tolist(), op.vals.tolist()):
        out[(r, c)] = out.get((r, c), 0) + v
    return {k: v for k, v in out.items() if v != 0}


def _max_sparse(m):
    return float(abs(m).max()) if m.nnz else 0.0


@criterion(1, "CAR oracle equivalence")
def test_car_oracle_equivalence():
    rng = random.Random(1)
    start = time.perf_counter()
    worst = 0.0
    sign_errors = 0
    pairs = 500
    for _ in range(pairs):
        m = rng.randint(6, 10)
        cre_a, ann_a = rng.sample(range(m), rng.randint(0, 3)), rng.sample(range(m), rng.randint(0, 3))
        cre_b, ann_b = rng.sample(range(m), rng.randint(0, 3)), rng.sample(range(m), rng.randint(0, 3))
        za, zb = random_complex(rng), random_complex(rng)
        unit_a, unit_b = CARElement.monomial(m, cre_a, ann_a), CARElement.monomial(m, cre_b, ann_b)
        a, b = CARElement.monomial(m, cre_a, ann_a, za), CARElement.monomial(m, cre_b, ann_b, zb)

        def fock(x):
            return oracles.fock_sparse(oracles.words(x), m)

        # signs: unit-coefficient words must agree entry for entry
        ua, ub = fock(unit_a), fock(unit_b)
        if (fock(multiply(unit_a, unit_b)) != ua @ ub).nnz or (fock(star(unit_a)) != ua.conj().T).nnz:
            sign_errors += 1
        pa, pb = fock(a), fock(b)
        worst = max(
            worst,
            _max_sparse(fock(multiply(a, b)) - pa @ pb),
            _max_sparse(fock(star(a)) - pa.conj().T),
            abs(vacuum_state(multiply(a, b)) - (pa @ pb)[0, 0]),
            abs(trace_state(multiply(a, b)) - (pa @ pb).diagonal().sum() / 2**m),
        )
    seconds = time.perf_counter() - start
    passed = sign_errors == 0 and worst <= 1e-12 and seconds < 60
    return passed, f"{pairs} pairs, sign mismatches {sign_errors}, max deviation {worst:.1e}, {seconds:.1f}s"


@criterion(2, "Fock sector consistency")
def test_fock_sector_consistency():
    checked = 0
    for m in range(1, 9):
        for N in range(m + 1):
            if SectorBasis(m, N).dim != math.comb(m, N) or sector_dimension(m, N) != math.comb(m, N):
                return False, f"dimension of sector ({m}, {N})"
        bases = {N: SectorBasis(m, N) for N in range(m + 1)}
        ranks = {N: {sum(1 << x for x in u): i for i, u in enumerate(bases[N].states)} for N in bases}
        for n in range(m + 1):
            for cre in combinations(range(m), n):
                for ann in combinations(range(m), n):
                    # oracle entries of a*_J a_J' on every basis state, split by particle number
                    want = {N: {} for N in range(n, m + 1)}
                    for s in range(1 << m):
                        sign, out = oracles.apply_word(s, cre, tuple(reversed(ann)))
                        if sign:
                            N = bin(s).count("1")
                            want[N][(ranks[N][out], ranks[N][s])] = sign
                    for N in range(n, m + 1):
                        if _dict(represent_monomial(bases[N], cre, ann)) != want[N]:
                            return False, f"|L|={m} N={N} J={cre} J'={ann}"
                        checked += 1
    return True, f"{checked} (monomial, sector) pairs exact"


@criterion(3, "frame sign law")
def test_frame_sign_law():
    rng = random.Random(3)
    pairs = 10_000
    for _ in range(pairs):
        m = rng.randint(1, 10)
        N = rng.randint(1, m)
        basis = SectorBasis(m, N)
        chi = tuple(rng.sample(range(m), N))
        chi_p = tuple(rng.sample(chi, N)) if rng.random() < 0.5 else tuple(rng.sample(range(m), N))
        got = inner_product(basis, chi, chi_p)
        law = perm.relative_sign(chi, chi_p) if set(chi) == set(chi_p) else 0
        if not (type(got) is int and got == law == oracles.ordered_frame_inner(chi, chi_p)):
            return False, f"chi={chi} chi'={chi_p}: {got} vs {law}"
    return True, f"{pairs} ordered pairs exact"


@criterion(4, "groupoid axiom suite")
def test_groupoid_axioms():
    results = groupoid_suite(SuiteOptions(seed=4, samples=2000))
    failed = [f"{r.name}: {r.detail}" for r in results if not r.passed]
    per_kind = {}
    for r in results:
        kind = r.name.split(":")[0]
        per_kind[kind] = min(per_kind.get(kind, 10**9), r.cases if "resampled" not in r.name else 10**9)
    enough = all(v >= 2000 for v in per_kind.values()) and len(per_kind) == 3
    return not failed and enough, "; ".join(failed) or f"arrows per kind {per_kind}"


@criterion(5, "2-action suite")
def test_two_action():
    results = two_action_suite(SuiteOptions(seed=5, samples=1000))
    failed = [f"{r.name}: {r.detail}" for r in results if not r.passed]
    least = min(r.cases for r in results if r.name != "embedding is a morphism")
    return not failed and least >= 1000, "; ".join(failed) or f"{least} samples per law"


@criterion(6, "conditional expectation")
def test_conditional_expectation():
    rng = random.Random(6)
    p = generate("periodic", {"d": 1}, window=8.0)
    deep = interior_sites(p, 5.0)
    worst = 0.0
    trials = 40

    def arrows(near, k):
        return [GroupoidElement(p, tuple(rng.sample(near, 2)), tuple(rng.sample(near, 2))) for _ in range(k)]

    for _ in range(trials):
        c = rng.choice(deep)
        near = [s for s in deep if abs(p.points[s][0] - p.points[c][0]) <= 1.0]
        f = random_local_delta(p, rng, near, 4)
        e = conditional_expectation(f)
        sample = arrows(near, 6)
        if not is_bi_equivariant(e, sample, 1e-12):
            return False, "E(f) is not bi-equivariant"
        ee = conditional_expectation(e)
        # an even kernel: the S_2 x S_2 orbit sum of f
        even = GFunction(2, f.range, lambda g, f=f: sum(f(two_action(s1, g, s2)) for s1 in perm.all_permutations(2) for s2 in perm.all_permutations(2)))
        e_even = conditional_expectation(even)
        e2 = conditional_expectation(random_local_delta(p, rng, near, 4))
        prod = convolve(e, e2)
        for g in sample:
            worst = max(worst, abs(ee(g) - e(g)), abs(e_even(g)))
        if not is_bi_equivariant(prod, sample[:3], 1e-12):
            return False, "bi-equivariant functions not closed under convolution"
    q = seed_to_function(pair_hop(2.0, 0.8))
    fixed = max(abs(conditional_expectation(q)(g) - q(g)) for g in arrows(near, 20))
    worst = max(worst, fixed)
    return worst <= 1e-12, f"{trials} random functions, max deviation {worst:.1e}"


@criterion(7, "quasi-central approximate unit")
def test_approximate_unit():
    cases = [
        ("pair potential", pair_diagonal(lambda d: -1.0 / d, range_=2.0), 2),
        ("pair hop", pair_hop(2.0), 2),
        ("three-body diagonal", diagonal_potential(lambda d: 0.5 * d, 3, 2.0), 3),
    ]
    for lat in (chain(10), generate("random_displaced", {"d": 1, "lambda": 0.3}, seed=7, window=5.0)):
        for name, q, N in cases:
            pi_q = assemble_sector([q], lat, N)
            for inv_eps in (q.range, q.range + 0.5):
                u = approximate_unit(lat, N, 1.0 / inv_eps)
                if u.commutator(pi_q).max_abs() != 0.0 or not (u @ pi_q).equals(pi_q):
                    return False, f"{name} at 1/eps = {inv_eps}"
    witness = approximate_unit(chain(10), 2, 1 / 1.5).commutator(assemble_sector([pair_hop(2.0)], chain(10), 2)).max_abs()
    return witness > 0, f"exact for arity-N terms; witness at 1/eps = 1.5 < R_i = 2: {witness:.2e}"


@criterion(8, "derivation identities")
def test_derivation_identities():
    results = derivation_checks(SuiteOptions(seed=8, samples=200), 10)
    failed = [f"{r.name}: {r.detail}" for r in results if not r.passed]
    if failed:
        return False, "; ".join(failed)

    # the trace pairing once more, with traces taken on bitstring matrices
    rng = random.Random(8)
    worst = 0.0
    m = 6
    nonzero = 0
    for _ in range(60):
        q = random_gi_monomial(rng, m, 1, random_complex(rng)) + random_gi_monomial(rng, m, 2, random_complex(rng))
        a = random_gi_monomial(rng, m, rng.randint(1, 2), random_complex(rng))
        # b contains ad_q(a), so the pairing is not trivially zero
        b = ad(q, a) + random_gi_monomial(rng, m, rng.randint(1, 2), random_complex(rng))
        fq, fa, fb = (oracles.fock_sparse(oracles.words(x), m) for x in (q, a, b))
        ad_qa = 1j * (fa @ fq - fq @ fa)
        fqs = fq.conj().T
        ad_qs_b = 1j * (fb @ fqs - fqs @ fb)
        lhs = (fb.conj().T @ ad_qa).diagonal().sum() / 2**m
        rhs = -np.conj((fa.conj().T @ ad_qs_b).diagonal().sum() / 2**m)
        sym = symbolic_trace(multiply(star(b), ad(q, a)))
        sym_rhs = -symbolic_trace(multiply(star(a), ad(derivation_star(q), b))).conjugate()
        nonzero += abs(lhs) > 1e-9
        worst = max(worst, abs(lhs - rhs), abs(sym - lhs), abs(sym_rhs - rhs))

    classes = 0
    lat = chain(8)
    for N, coeff in ((2, pair_hop(2.0)), (2, hopping(1.0, onsite=0.25)), (3, pair_diagonal(-2.0)), (3, pair_hop(2.0))):
        dd = descended_derivation(coeff, lat, N)
        for _ in range(50):
            xi, zeta = tuple(rng.sample(range(8), N)), tuple(rng.sample(range(8), N))
            if not dd.direct(xi, zeta).equals(dd.commutator(rank_one(dd.basis, xi, zeta))):
                return False, f"direct formula at N={N} xi={xi} zeta={zeta}"
            classes += 1
    passed = worst <= 1e-12 and classes >= 200
    return passed, f"Leibniz and vacuum exact on 200; trace pairing {worst:.1e} ({nonzero} of 60 nonzero); direct formula exact on {classes} classes"


@criterion(9, "Galilean covariance")
def test_galilean_covariance():
    coeffs = [hopping(1.0, 1.5), pair_diagonal(lambda d: -2.0 / d, range_=1.5)]

    def deviations(p, sites):
        out = []
        for a in sites:
            for N in (1, 2):
                for rep in (galilean_check(coeffs, p, a, N), covariance_check(seed_to_function(coeffs[N - 1]), p, a, N)):
                    if rep.compared_entries == 0:
                        raise AssertionError("empty interior block")
                    out.append(rep.max_deviation)
        return out

    exact = []
    for m in (12, 16, 20):
        p = chain(m)
        exact += deviations(p, interior_sites(p, 2.5))
    # displaced samples are translated in floating point, so only rounding-level agreement is possible
    rng = random.Random(9)
    rounded = []
    for seed in (1, 2):
        p = generate("random_displaced", {"d": 1, "lambda": 0.3}, seed=seed, window=8.0)
        rounded += deviations(p, rng.sample(interior_sites(p, 2.5), 3))
    passed = max(exact) == 0.0 and max(rounded) <= 1e-12
    return passed, f"{len(exact)} chain blocks exact (max {max(exact):.1e}); displaced samples max {max(rounded):.1e}"


@criterion(10, "canonical order")
def test_canonical_order():
    rng = random.Random(10)
    pairs = 0
    for d, window in ((1, 12.0), (2, 6.0)):
        p = generate("perturbed_periodic", {"d": d, "epsilon": 0.2}, seed=10, window=window)
        lab = label_bijection(p)
        ref = oracles.nearest_node_labels(p.points)
        sites = interior_sites(p, 2.0)
        moved_labels = {}
        for _ in range(500):
            v = rng.sample(sites, rng.randint(1, 5))
            a = rng.choice(sites)
            if a not in moved_labels:
                moved_labels[a] = label_bijection(p.translate(p.points[a]))
            moved = moved_labels[a]
            want = oracles.sorted_by_label(ref, v)
            if canonical_order(moved, v) != canonical_order(lab, v) or canonical_order(lab, v) != want:
                return False, f"d={d} V={v} x={a}"
            if any(moved.label(i) != tuple(np.subtract(ref[i], ref[a])) for i in v):
                return False, f"labels not translated at d={d}"
            pairs += 1

    p = generate("perturbed_periodic", {"d": 1, "epsilon": 0.2}, seed=10, window=8.0)
    lab = label_bijection(p)
    ref = oracles.nearest_node_labels(p.points)
    deep = interior_sites(p, 4.5)
    worst = 0.0
    for _ in range(6):
        c = rng.choice(deep)
        near = [s for s in deep if abs(p.points[s][0] - p.points[c][0]) <= 1.5]
        f = conditional_expectation(random_local_delta(p, rng, near))
        g = conditional_expectation(random_local_delta(p, rng, near))
        fb, gb = reduce_function(f, lab), reduce_function(g, lab)
        lhs, rhs = reduce_function(convolve(f, g), lab), reduced_convolve(fb, gb, lab)
        for _ in range(4):
            alpha = GroupoidElement(p, canonical_order(lab, rng.sample(near, 2)), canonical_order(lab, rng.sample(near, 2)))
            brute = sum(
                fb(GroupoidElement(p, alpha.left, eta)) * gb(GroupoidElement(p, eta, alpha.right))
                for eta in (oracles.sorted_by_label(ref, s) for s in combinations(range(len(p)), 2))
            )
            worst = max(worst, abs(lhs(alpha) - rhs(alpha)), abs(rhs(alpha) - brute))
    return worst <= 1e-12, f"{pairs} (V, x) pairs exact; reduction morphism deviation {worst:.1e}"


@criterion(11, "self-binding experiment")
def test_self_binding():
    start = time.perf_counter()
    rep = run_selfbinding_experiment({"pattern": {"sites": 20}, "N": 2, "t": 1.0, "u": -8.0})
    ids = np.array(rep.island_ids)
    bound = min(rep.islands, key=lambda i: i.lowest)
    members = ids == bound.id
    lo, hi = oracles.bound_pair_band(-8.0, 1.0)
    gap = rep.gap_below(bound)
    near_u = lo - 1e-9 <= bound.lowest and bound.highest <= hi + 1e-9
    compact = float(rep.pair_distances[members].max())
    spread = float(rep.pair_distances[~members].min())
    free = run_selfbinding_experiment({"pattern": {"sites": 20}, "N": 2, "t": 1.0, "u": 0.0})
    free_dev = float(np.max(np.abs(free.eigenvalues - np.array(oracles.free_pair_energies(20)))))
    seconds = time.perf_counter() - start
    passed = gap >= 2 and near_u and compact < 2 and spread > 4 and free_dev <= 1e-8 and seconds < 120
    detail = (
        f"island of {bound.count} in [{bound.lowest:.4f}, {bound.highest:.4f}], gap {gap:.3f}, "
        f"pair distance <= {compact:.3f} vs continuum >= {spread:.3f}; u=0 deviation {free_dev:.1e}; {seconds:.1f}s"
    )
    return passed, detail


@criterion(12, "pattern metric")
def test_pattern_metric():
    rng = random.Random(12)
    kinds = [
        ("random_displaced", {"d": 1, "lambda": 0.3}),
        ("perturbed_periodic", {"d": 1, "epsilon": 0.2}),
        ("perturbed_periodic", {"d": 2, "epsilon": 0.2}),
    ]
    worst_oracle = 0.0
    for k in range(50):
        kind, params = kinds[k % len(kinds)]
        window = 4.0 if params["d"] == 2 else 6.0
        a = generate(kind, params, seed=rng.randrange(10**6), window=window)
        b = generate(kind, params, seed=rng.randrange(10**6), window=window)
        floor = 1 / (1 + min(max_truncation_radius(a), max_truncation_radius(b)))
        v = pattern_metric(a, b, 64)
        if v != pattern_metric(b, a, 64) or not floor <= v <= 1:
            return False, f"pair {k}: symmetry or range"
        if pattern_metric(a, a, 64) != 1 / (1 + max_truncation_radius(a)):
            return False, f"pair {k}: self-distance is not the window floor"
        if k % 5 == 0:
            rep = pattern_metric_report(a, b, 64)
            want, step = oracles.dense_metric_scan(a.points, b.points, rep.comparison_radius, steps=300)
            worst_oracle = max(worst_oracle, abs(rep.value - want) / step)
            if abs(rep.value - want) > step:
                return False, f"pair {k}: dense scan {want} vs {rep.value}"
    return True, f"50 pairs symmetric and floored; dense scan within {worst_oracle:.2f} grid steps"
