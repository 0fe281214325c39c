"""Randomized property suites behind the ``check`` family of CLI commands.

Each suite takes a :class:`SuiteOptions` and returns a list of
:class:`CheckResult`.  Everything is driven by one seeded
``random.Random`` so a run is reproducible from its options.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import asdict, dataclass, field
from itertools import combinations, permutations
from typing import Callable, Iterable

import numpy as np

from . import permutations as perm
from .canonical_order import canonical_order, inflate, label_bijection, reduce_function, reduced_convolve
from .car_symbolic import (
    CARElement,
    ad,
    anticommutator,
    derivation_star,
    gi_degree,
    multiply,
    star,
    symbolic_trace,
    trace_state,
    vacuum_state,
)
from .cover import OrderedConfig, canonical_bijection, deck_transform, leq_and_diff, translate_config, wedge
from .fock import (
    SectorBasis,
    full_fock_oracle,
    inner_product,
    oracle_isometry,
    oracle_sector_block,
    rank_one,
    represent,
    sector_dimension,
    symmetric_coefficients,
)
from .galgebra import (
    GFunction,
    conditional_expectation,
    convolve,
    convolve_source_fiber,
    covariance_check,
    galilean_check,
    involution,
    is_bi_equivariant,
    left_regular,
    seed_to_function,
    translated_sample,
)
from .groupoid import (
    GroupoidElement,
    act_with_bisections,
    anchored_pair,
    bisection_product,
    blowup_compose,
    blowup_compatible,
    blowup_inverse,
    blowup_iso,
    compose,
    embed_morphism,
    inverse,
    pair_inverse,
    range_,
    source,
    tau,
    two_action,
    unit,
)
from .hamiltonian import (
    LatticeHamiltonian,
    approximate_unit,
    assemble_sector,
    descended_derivation,
    diagonal_potential,
    hopping,
    pair_diagonal,
)
from .pattern import Pattern, generate, hausdorff, pattern_metric, truncate, validate_delone


@dataclass
class SuiteOptions:
    seed: int = 0
    sites: int = 8
    samples: int = 200
    arity: int = 2
    window: float | None = None
    tol: float = 1e-12
    pattern: Pattern | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k != "pattern"} | {
            "pattern": None if self.pattern is None else self.pattern.kind
        }


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    cases: int
    detail: str = ""


@dataclass
class SuiteReport:
    selector: str
    options: SuiteOptions
    results: list[CheckResult] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {
            "selector": self.selector,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            "options": self.options.to_dict(),
            "results": [asdict(r) for r in self.results],
        }


class _Recorder:
    def __init__(self, suite: str):
        self.suite = suite
        self.results: list[CheckResult] = []

    def check(self, name: str, fn: Callable[[], tuple[bool, int, str] | tuple[bool, int]]) -> None:
        try:
            out = fn()
        except Exception as exc:  # a crash is a failed check, reported with its message
            self.results.append(CheckResult(self.suite, name, False, 0, f"{type(exc).__name__}: {exc}"))
            return
        passed, cases = bool(out[0]), int(out[1])
        detail = out[2] if len(out) > 2 else ""
        self.results.append(CheckResult(self.suite, name, passed, cases, detail))


# samplers ---------------------------------------------------------------------


def chain(n_sites: int) -> Pattern:
    half = (n_sites - 1) / 2
    return generate("periodic", {"d": 1}, window=half, center=[half])


def random_word(rng: random.Random, n_sites: int, max_len: int = 3) -> tuple[list[int], list[int]]:
    k = rng.randint(0, min(max_len, n_sites))
    l = rng.randint(0, min(max_len, n_sites))
    return rng.sample(range(n_sites), k), rng.sample(range(n_sites), l)


def random_monomial(rng: random.Random, n_sites: int, coeff: complex = 1.0, max_len: int = 3) -> CARElement:
    cre, ann = random_word(rng, n_sites, max_len)
    return CARElement.monomial(n_sites, cre, ann, coeff)


def random_complex(rng: random.Random) -> complex:
    return complex(rng.gauss(0, 1), rng.gauss(0, 1))


def random_gi_monomial(rng: random.Random, n_sites: int, n: int, coeff: complex = 1.0) -> CARElement:
    return CARElement.monomial(n_sites, rng.sample(range(n_sites), n), rng.sample(range(n_sites), n), coeff)


def random_permutation(rng: random.Random, n: int) -> tuple[int, ...]:
    s = list(range(n))
    rng.shuffle(s)
    return tuple(s)


def interior_sites(p: Pattern, margin: float) -> list[int]:
    return [i for i in range(len(p)) if p.depth(p.points[i]) >= margin]


def random_order(rng: random.Random, sites: list[int], n: int) -> tuple[int, ...]:
    return tuple(rng.sample(sites, n))


def suite_patterns(seed: int) -> dict[str, Pattern]:
    """One sample of each pattern kind used by the groupoid suites."""
    return {
        "periodic": generate("periodic", {"d": 2}, seed=seed, window=4.0),
        "perturbed": generate("perturbed_periodic", {"d": 2, "epsilon": 0.2}, seed=seed, window=4.0),
        "triplet_rotation": generate("triplet_rotation", {"theta": math.sqrt(2), "D": 3.0, "r": 1.0, "count": 5}),
    }


# pattern ----------------------------------------------------------------------


def pattern_suite(opt: SuiteOptions) -> list[CheckResult]:
    rng = random.Random(opt.seed)
    rec = _Recorder("pattern")
    nprng = np.random.default_rng(opt.seed)

    def metric_axioms():
        n = max(opt.samples // 4, 10)
        for _ in range(n):
            a, b, c = (nprng.uniform(-3, 3, size=(nprng.integers(1, 6), 2)) for _ in range(3))
            dab, dba = hausdorff(a, b), hausdorff(b, a)
            if dab != dba or hausdorff(a, a) != 0:
                return False, n, "symmetry or identity failed"
            if dab > hausdorff(a, c) + hausdorff(c, b) + 1e-12:
                return False, n, "triangle inequality failed"
        return True, n

    def metric_symmetry():
        n = 5
        for k in range(n):
            p1 = generate("random_displaced", {"d": 1, "lambda": 0.3}, seed=rng.randrange(1 << 30), window=6.0)
            p2 = generate("random_displaced", {"d": 1, "lambda": 0.3}, seed=rng.randrange(1 << 30), window=6.0)
            v12, v21 = pattern_metric(p1, p2, 64), pattern_metric(p2, p1, 64)
            if abs(v12 - v21) > 1e-12 or not 0 <= v12 <= 1:
                return False, n, f"{v12} vs {v21}"
            if pattern_metric(p1, p1, 64) > 1 / (1 + p1.window_radius) + 1e-12:
                return False, n, "self distance above the window floor"
        return True, n

    def translate_truncate():
        p = generate("perturbed_periodic", {"d": 2, "epsilon": 0.2}, seed=opt.seed, window=6.0)
        inner = interior_sites(p, 3.0)
        n = min(20, len(inner))
        for _ in range(n):
            x = p.points[rng.choice(inner)]
            rho = 2.0
            moved = truncate(p.translate(x), rho).points
            direct = p.points[np.linalg.norm(p.points - x, axis=1) <= rho] - x
            if hausdorff(moved, direct) > p.match_tol or len(moved) != len(direct):
                return False, n
        return True, n

    def generated_valid():
        kinds = [
            ("periodic", {"d": 1}),
            ("periodic", {"d": 2}),
            ("random_displaced", {"d": 2, "lambda": 0.3}),
            ("perturbed_periodic", {"d": 2, "epsilon": 0.2}),
        ]
        for kind, params in kinds:
            rep = validate_delone(generate(kind, params, seed=opt.seed, window=5.0))
            if not rep.valid:
                return False, len(kinds), f"{kind}: {rep.violations[:2]}"
        return True, len(kinds)

    rec.check("hausdorff metric axioms", metric_axioms)
    rec.check("pattern metric symmetry and floor", metric_symmetry)
    rec.check("translate then truncate", translate_truncate)
    rec.check("generated patterns are Delone", generated_valid)
    return rec.results


# cover ------------------------------------------------------------------------


def cover_suite(opt: SuiteOptions) -> list[CheckResult]:
    rng = random.Random(opt.seed)
    rec = _Recorder("cover")
    p = generate("random_displaced", {"d": 2, "lambda": 0.3}, seed=opt.seed, window=5.0)
    sites = interior_sites(p, 2.0)
    n = max(1, opt.arity)

    def deck_hom():
        for _ in range(opt.samples):
            xi = OrderedConfig(p, random_order(rng, sites, n))
            s1, s2 = random_permutation(rng, n), random_permutation(rng, n)
            lhs = deck_transform(deck_transform(xi, s2), s1)
            if lhs.order != deck_transform(xi, perm.compose(s1, s2)).order:
                return False, opt.samples
        return True, opt.samples

    def deck_translate():
        for _ in range(opt.samples):
            xi = OrderedConfig(p, random_order(rng, sites, n))
            s = random_permutation(rng, n)
            x = p.points[rng.choice(sites)]
            a = deck_transform(translate_config(xi, x), s)
            b = translate_config(deck_transform(xi, s), x)
            if a.order != b.order or not np.allclose(a.points(), b.points(), atol=p.match_tol, rtol=0):
                return False, opt.samples
        return True, opt.samples

    def wedge_roundtrip():
        for _ in range(opt.samples):
            picked = rng.sample(sites, 2 * n)
            xi, zeta = OrderedConfig(p, picked[:n]), OrderedConfig(p, picked[n:])
            rest = leq_and_diff(xi, wedge(xi, zeta))
            if rest is None or rest.order != zeta.order:
                return False, opt.samples
        return True, opt.samples

    def bijection_compose():
        count = max(opt.samples // 4, 5)
        eps = p.r / 8
        for _ in range(count):
            v = p.points[rng.sample(sites, n)]
            v1 = (v + nprng_shift(rng, v.shape, eps / 3))[list(random_permutation(rng, n))]
            v2 = (v1 + nprng_shift(rng, v.shape, eps / 3))[list(random_permutation(rng, n))]
            g1 = canonical_bijection(v, v1, eps, p.r)
            g2 = canonical_bijection(v1, v2, eps, p.r)
            g12 = canonical_bijection(v, v2, eps, p.r)
            if any(g2[g1[i]] != g12[i] for i in g1):
                return False, count
        return True, count

    rec.check("deck transformations form a group action", deck_hom)
    rec.check("deck transformations commute with translations", deck_translate)
    rec.check("wedge then difference round-trips", wedge_roundtrip)
    rec.check("canonical bijections compose", bijection_compose)
    return rec.results


def nprng_shift(rng: random.Random, shape: tuple[int, ...], size: float) -> np.ndarray:
    """Random displacement of norm below ``size`` per point."""
    out = np.array([[rng.uniform(-1, 1) for _ in range(shape[1])] for _ in range(shape[0])])
    norms = np.linalg.norm(out, axis=1, keepdims=True)
    return out / np.maximum(norms, 1e-300) * size * np.array([[rng.random()] for _ in range(shape[0])])


# groupoid ---------------------------------------------------------------------


def _arrows(rng: random.Random, p: Pattern, n: int, count: int, sites: list[int]) -> list[GroupoidElement]:
    return [GroupoidElement(p, random_order(rng, sites, n), random_order(rng, sites, n)) for _ in range(count)]


def groupoid_suite(opt: SuiteOptions) -> list[CheckResult]:
    rng = random.Random(opt.seed)
    rec = _Recorder("groupoid")
    n = max(1, opt.arity)
    patterns = {"custom": opt.pattern} if opt.pattern is not None else suite_patterns(opt.seed)
    for kind, p in patterns.items():
        sites = interior_sites(p, p.R) if p.kind != "triplet_rotation" else []
        if len(sites) < 2 * n:
            sites = list(range(len(p)))
        arrows = _arrows(rng, p, n, opt.samples, sites)

        def axioms(arrows=arrows, p=p, sites=sites):
            for g in arrows:
                h = GroupoidElement(p, g.right, random_order(rng, sites, n))
                k = GroupoidElement(p, h.right, random_order(rng, sites, n))
                if inverse(inverse(g)) != g:
                    return False, len(arrows), "double inverse"
                if compose(compose(g, h), k) != compose(g, compose(h, k)):
                    return False, len(arrows), "associativity"
                if compose(g, inverse(g)) != range_(g) or compose(inverse(g), g) != source(g):
                    return False, len(arrows), "inverse law"
                if compose(range_(g), g) != g or compose(g, source(g)) != g:
                    return False, len(arrows), "units"
            return True, len(arrows)

        def range_source(arrows=arrows):
            for g in arrows:
                r, s = range_(g), source(g)
                if range_(inverse(g)) != s or source(inverse(g)) != r:
                    return False, len(arrows)
                if range_(r) != r or source(s) != s or compose(r, r) != r or compose(s, s) != s:
                    return False, len(arrows)
                if not np.allclose(s.left_points()[0], 0.0, atol=p.match_tol):
                    return False, len(arrows), "source is not anchored"
            return True, len(arrows)

        def literal_inverse(arrows=arrows, p=p):
            for g in arrows:
                lit = pair_inverse(anchored_pair(g))
                mine = anchored_pair(inverse(g))
                if not (lit.left.same_as(mine.left) and lit.right.same_as(mine.right)):
                    return False, len(arrows)
            return True, len(arrows)

        def v1_law(arrows=arrows, p=p, sites=sites):
            for g in arrows:
                eta = random_order(rng, sites, n)
                lhs = compose(g, GroupoidElement(p, g.right, eta))
                if lhs != GroupoidElement(p, g.left, eta):
                    return False, len(arrows)
            return True, len(arrows)

        rec.check(f"{kind}: groupoid axioms", axioms)
        rec.check(f"{kind}: range and source", range_source)
        rec.check(f"{kind}: inverse matches translated pair", literal_inverse)
        rec.check(f"{kind}: composition of translated pairs", v1_law)
        if p.kind in ("periodic", "random_displaced", "perturbed_periodic"):
            rec.check(f"{kind}: composition across resampled windows", lambda p=p: _cross_sample(rng, p, n, max(opt.samples // 10, 5)))
    return rec.results


def _cross_sample(rng: random.Random, p: Pattern, n: int, count: int):
    """Composition with an arrow stored on an independent sample of a translate."""
    deep = interior_sites(p, p.R + 1.5)
    a = rng.choice(deep)
    moved, mapping = translated_sample(p, a)
    ok_sites = [i for i in deep if i in mapping and moved.depth(moved.points[mapping[i]]) >= p.R + 1.0]
    for _ in range(count):
        g = GroupoidElement(p, random_order(rng, ok_sites, n), random_order(rng, ok_sites, n))
        h_right = random_order(rng, ok_sites, n)
        h = GroupoidElement(p, g.right, h_right)
        h_moved = GroupoidElement(moved, [mapping[i] for i in g.right], [mapping[i] for i in h_right])
        if compose(g, h_moved) != compose(g, h):
            return False, count
    return True, count


def two_action_suite(opt: SuiteOptions) -> list[CheckResult]:
    rng = random.Random(opt.seed + 1)
    rec = _Recorder("2-action")
    n = max(2, opt.arity)
    p = suite_patterns(opt.seed)["perturbed"]
    sites = interior_sites(p, p.R)
    arrows = _arrows(rng, p, n, opt.samples, sites)

    def rand_s():
        return random_permutation(rng, n)

    def tau_hom():
        for g in arrows:
            u = range_(g)
            s1, s2 = rand_s(), rand_s()
            b = bisection_product(lambda x: tau(s1, x), lambda x: tau(s2, x))
            if b(u) != tau(perm.compose(s1, s2), u) or source(tau(s1, u)) != u:
                return False, len(arrows)
        return True, len(arrows)

    def commute():
        e = perm.identity(n)
        for g in arrows:
            s1, s2 = rand_s(), rand_s()
            if two_action(e, two_action(s1, g, e), s2) != two_action(s1, two_action(e, g, s2), e):
                return False, len(arrows)
            if two_action(s1, g, s2) != act_with_bisections(lambda x: tau(s1, x), g, lambda x: tau(perm.inverse(s2), x)):
                return False, len(arrows), "bisection route disagrees"
        return True, len(arrows)

    def inversion():
        for g in arrows:
            s1, s2 = rand_s(), rand_s()
            lhs = inverse(two_action(s1, g, s2))
            if lhs != two_action(perm.inverse(s2), inverse(g), perm.inverse(s1)):
                return False, len(arrows)
        return True, len(arrows)

    def conjugation():
        for g in arrows:
            s1, s2 = rand_s(), rand_s()
            h = two_action(s1, g, s2)
            if range_(h) != two_action(s1, range_(g), perm.inverse(s1)):
                return False, len(arrows)
            if source(h) != two_action(perm.inverse(s2), source(g), s2):
                return False, len(arrows)
        return True, len(arrows)

    def composability():
        for g in arrows:
            s1, s2, s3 = rand_s(), rand_s(), rand_s()
            h = GroupoidElement(p, g.right, random_order(rng, sites, n))
            lhs = compose(two_action(s1, g, perm.inverse(s2)), two_action(s2, h, s3))
            if lhs != two_action(s1, compose(g, h), s3):
                return False, len(arrows)
        return True, len(arrows)

    def embedding():
        m = n + 1
        count = max(opt.samples // 4, 10)
        for _ in range(count):
            g = GroupoidElement(p, random_order(rng, sites, m), random_order(rng, sites, m))
            h = GroupoidElement(p, g.right, random_order(rng, sites, m))
            for k in range(1, m):
                eg, eh, egh = embed_morphism(g, k, m - k), embed_morphism(h, k, m - k), embed_morphism(compose(g, h), k, m - k)
                if egh != (compose(eg[0], eh[0]), compose(eg[1], eh[1])):
                    return False, count
                inv = embed_morphism(inverse(g), k, m - k)
                if inv != (inverse(eg[0]), inverse(eg[1])):
                    return False, count, "inversion"
        return True, count

    def blowup():
        for g in arrows:
            h = GroupoidElement(p, g.right, random_order(rng, sites, n))
            bg, bh = blowup_iso(g), blowup_iso(h)
            if not blowup_compatible(bg) or blowup_inverse(bg) != g:
                return False, len(arrows)
            if blowup_compose(bg, bh) != blowup_iso(compose(g, h)):
                return False, len(arrows), "composition"
        return True, len(arrows)

    rec.check("tau is a homomorphism into bisections", tau_hom)
    rec.check("left and right actions commute", commute)
    rec.check("inverse of s1·g·s2", inversion)
    rec.check("range/source conjugation", conjugation)
    rec.check("actions preserve composability", composability)
    rec.check("embedding is a morphism", embedding)
    rec.check("blow-up isomorphism", blowup)
    return rec.results


# CAR ------------------------------------------------------------------------------


def car_suite(opt: SuiteOptions) -> list[CheckResult]:
    rng = random.Random(opt.seed + 2)
    rec = _Recorder("car")
    m = min(opt.sites, 10)

    def oracle_products():
        for _ in range(opt.samples):
            a = random_monomial(rng, m)
            b = random_monomial(rng, m)
            ab, pa, pb = multiply(a, b), full_fock_oracle(a), full_fock_oracle(b)
            if (full_fock_oracle(ab) - pa @ pb).count_nonzero():
                return False, opt.samples, f"product of {a} and {b}"
            if (full_fock_oracle(star(a)) - pa.conj().T).count_nonzero():
                return False, opt.samples, "star"
            if vacuum_state(ab) != (pa @ pb)[0, 0]:
                return False, opt.samples, "vacuum"
            if abs(trace_state(ab) - symbolic_trace(ab)) > opt.tol:
                return False, opt.samples, "trace"
        return True, opt.samples

    def car_relations():
        one = CARElement.scalar(m)
        cases = 0
        for x in range(m):
            for y in range(m):
                ax, ay = CARElement.annihilator(m, x), CARElement.annihilator(m, y)
                cy = CARElement.creator(m, y)
                want = one if x == y else CARElement.zero(m)
                if not anticommutator(ax, cy).close_to(want, 0.0):
                    return False, cases
                if not anticommutator(ax, ay).is_zero():
                    return False, cases
                cases += 1
        return True, cases

    def u10():
        for _ in range(opt.samples):
            k = rng.randint(1, min(3, m))
            j, jp = rng.sample(range(m), k), rng.sample(range(m), k)
            u = rng.sample(range(m), rng.randint(1, min(4, m)))
            lhs = multiply(CARElement.number(m, u), CARElement.monomial(m, j, jp))
            rest = [s for s in u if s not in j]
            rhs = multiply(multiply(CARElement.monomial(m, j, ()), CARElement.number(m, rest)), CARElement.monomial(m, (), jp))
            if not lhs.close_to(rhs, 0.0):
                return False, opt.samples, f"U={u} J={j} J'={jp}"
            lhs2 = multiply(CARElement.monomial(m, j, jp), CARElement.number(m, u))
            rest2 = [s for s in u if s not in jp]
            rhs2 = multiply(multiply(CARElement.monomial(m, j, ()), CARElement.number(m, rest2)), CARElement.monomial(m, (), jp))
            if not lhs2.close_to(rhs2, 0.0):
                return False, opt.samples, "mirror"
        return True, opt.samples

    def gicar_degrees():
        for _ in range(opt.samples):
            p_, q_ = rng.randint(0, 3), rng.randint(0, 3)
            a = random_gi_monomial(rng, m, p_)
            b = random_gi_monomial(rng, m, q_)
            d = gi_degree(multiply(a, b))
            if d is not None and d < max(p_, q_):
                return False, opt.samples
        return True, opt.samples

    rec.check("multiply/star/vacuum/trace match the Fock oracle", oracle_products)
    rec.check("canonical anticommutation relations", car_relations)
    rec.check("number operators absorb into monomials", u10)
    rec.check("GICAR degree filtration", gicar_degrees)
    rec.results.extend(derivation_checks(opt, m))
    return rec.results


def derivation_checks(opt: SuiteOptions, m: int) -> list[CheckResult]:
    rng = random.Random(opt.seed + 3)
    rec = _Recorder("car")
    lat = chain(m)
    ham = LatticeHamiltonian(lat, [hopping(1.0), pair_diagonal(-2.0)])
    inner = interior_sites(lat, ham.range)

    def local_monomial(coeff: complex = 1.0) -> CARElement:
        k, l = rng.randint(0, 2), rng.randint(0, 2)
        return CARElement.monomial(m, rng.sample(inner, min(k, len(inner))), rng.sample(inner, min(l, len(inner))), coeff)

    def leibniz():
        for _ in range(opt.samples):
            a, b = local_monomial(), local_monomial()
            lhs = ham.ad(multiply(a, b))
            rhs = multiply(ham.ad(a), b) + multiply(a, ham.ad(b))
            if not lhs.close_to(rhs, 0.0):
                return False, opt.samples
        return True, opt.samples

    def eta_ad():
        for _ in range(opt.samples):
            if vacuum_state(ham.ad(local_monomial(random_complex(rng)))) != 0:
                return False, opt.samples
        return True, opt.samples

    def trace_pairing():
        worst = 0.0
        for _ in range(opt.samples):
            q = random_monomial(rng, m, random_complex(rng)) + random_monomial(rng, m, random_complex(rng))
            a = random_monomial(rng, m, random_complex(rng))
            # b overlaps ad_q(a) so that the pairing is not trivially zero
            b = ad(q, a) + random_monomial(rng, m, random_complex(rng))
            lhs = symbolic_trace(multiply(star(b), ad(q, a)))
            rhs = -symbolic_trace(multiply(star(a), ad(derivation_star(q), b))).conjugate()
            worst = max(worst, abs(lhs - rhs))
        return worst <= opt.tol, opt.samples, f"max deviation {worst:.2e}"

    rec.check("Leibniz rule", leibniz)
    rec.check("vacuum state kills derivations", eta_ad)
    rec.check("trace pairing of a derivation and its adjoint", trace_pairing)
    return rec.results


# Fock -----------------------------------------------------------------------------


def fock_suite(opt: SuiteOptions) -> list[CheckResult]:
    rng = random.Random(opt.seed + 4)
    rec = _Recorder("fock")
    m = min(opt.sites, 8)

    def sector_vs_oracle():
        cases = 0
        for N in range(m + 1):
            basis = SectorBasis(m, N)
            iso = oracle_isometry(basis)
            for _ in range(max(opt.samples // (m + 1), 4)):
                mono = random_gi_monomial(rng, m, rng.randint(0, N))
                block = (iso.conj().T @ full_fock_oracle(mono) @ iso).toarray()
                if not np.array_equal(represent(mono, basis).toarray(), block):
                    return False, cases, f"N={N} {mono}"
                cases += 1
        return True, cases

    def dimensions():
        for N in range(m + 1):
            if SectorBasis(m, N).dim != sector_dimension(m, N) or sector_dimension(m, N) != math.comb(m, N):
                return False, m + 1
        return True, m + 1

    def frame_law():
        for _ in range(opt.samples):
            N = rng.randint(1, m)
            basis = SectorBasis(m, N)
            u = rng.sample(range(m), N)
            v = list(u)
            rng.shuffle(v)
            if rng.random() < 0.3:
                v = rng.sample(range(m), N)
            want = perm.relative_sign(u, v) if sorted(u) == sorted(v) else 0
            if inner_product(basis, u, v) != want:
                return False, opt.samples
        return True, opt.samples

    def rank_one_products():
        N = min(2, m)
        basis = SectorBasis(m, N)
        for _ in range(opt.samples):
            chi, chi_p = rng.sample(range(m), N), rng.sample(range(m), N)
            t, t_p = rng.sample(range(m), N), rng.sample(range(m), N)
            if rng.random() < 0.5:
                t = list(chi_p)
                rng.shuffle(t)
            lhs = rank_one(basis, chi, chi_p) @ rank_one(basis, t, t_p)
            ip = inner_product(basis, chi_p, t)
            rhs = rank_one(basis, chi, t_p, ip)
            if not lhs.close_to(rhs, 0.0):
                return False, opt.samples
        return True, opt.samples

    def symmetric_presentation():
        lat = chain(m)
        ham = [hopping(1.0), pair_diagonal(-1.5)]
        for N in (1, 2):
            op = assemble_sector(ham, lat, N)
            table = symmetric_coefficients(op)
            if not table.reconstruct().close_to(op, 1e-12):
                return False, 2, "round trip"
            prod = table.convolve(table).reconstruct()
            if not prod.close_to(op @ op, 1e-12):
                return False, 2, "product"
        return True, 2

    rec.check("sector blocks match the Fock oracle", sector_vs_oracle)
    rec.check("sector dimensions are binomials", dimensions)
    rec.check("frame vectors obey the sign law", frame_law)
    rec.check("rank-one operators multiply by contraction", rank_one_products)
    rec.check("symmetric presentation round-trips and convolves", symmetric_presentation)
    return rec.results


# Hamiltonians ---------------------------------------------------------------------------


def hamiltonian_suite(opt: SuiteOptions) -> list[CheckResult]:
    rng = random.Random(opt.seed + 5)
    rec = _Recorder("hamiltonian")
    m = min(opt.sites, 10)
    lat = chain(m)
    coeffs = [hopping(1.0, onsite=0.5), pair_diagonal(-3.0), diagonal_potential(lambda d: 1.0 / (1 + d), 3, 2.0)]

    def hermitian_and_dressed():
        ham = LatticeHamiltonian(lat, coeffs)
        element = ham.car_element()
        for N in range(1, min(m, 4) + 1):
            op = assemble_sector(coeffs, lat, N)
            if not op.is_hermitian(1e-12):
                return False, N, "not hermitian"
            if not np.allclose(op.toarray(), oracle_sector_block(element, SectorBasis.of(lat, N)), atol=1e-12, rtol=0):
                return False, N, f"dressing mismatch at N={N}"
        return True, min(m, 4)

    def galilean():
        p = generate("random_displaced", {"d": 1, "lambda": 0.3}, seed=opt.seed, window=7.0)
        sites = interior_sites(p, 2.5)
        cases = 0
        for N in (1, 2):
            for a in rng.sample(sites, min(3, len(sites))):
                rep = galilean_check([hopping(1.0, 1.5), pair_diagonal(lambda d: -2.0 / d, range_=1.5)], p, a, N)
                cases += 1
                if not rep.passed:
                    return False, cases, f"deviation {rep.max_deviation}"
        return True, cases

    def approximate_unit_checks():
        # Exactness needs the coefficient's arity to equal N: lower-degree
        # terms connect states of different diameter.
        cases = [
            (pair_diagonal(lambda d: -1.0 / d, range_=2.0), 2),
            (pair_hop(2.0), 2),
            (diagonal_potential(lambda d: 0.5 * d, 3, 2.0), 3),
        ]
        for q, N in cases:
            pi_q = assemble_sector([q], lat, N)
            u = approximate_unit(lat, N, 1.0 / q.range)
            if u.commutator(pi_q).max_abs() != 0.0:
                return False, len(cases), f"{q.name}: commutator not zero"
            if not (u @ pi_q).equals(pi_q):
                return False, len(cases), f"{q.name}: unit does not fix pi(Q)"
        q = pair_hop(2.0)
        witness = approximate_unit(lat, 2, 1 / 1.5).commutator(assemble_sector([q], lat, 2)).max_abs()
        return witness > 0, len(cases) + 1, f"witness at 1/eps = 1.5: {witness:.3e}"

    def der1():
        terms = 0
        for N in (2, 3):
            for coeff in (pair_diagonal(-2.0), pair_hop(2.0), hopping(1.0, onsite=0.25)):
                dd = descended_derivation(coeff, lat, N)
                for _ in range(max(opt.samples // 40, 3)):
                    xi = tuple(rng.sample(range(m), N))
                    zeta = tuple(rng.sample(range(m), N))
                    k = rank_one(dd.basis, xi, zeta)
                    if not dd.direct(xi, zeta).equals(dd.commutator(k)):
                        return False, terms, f"N={N} xi={xi} zeta={zeta}"
                    terms += 1
        return True, terms

    rec.check("assembly is hermitian and matches the dressed oracle", hermitian_and_dressed)
    rec.check("Galilean relabeling", galilean)
    rec.check("approximate unit is quasi-central", approximate_unit_checks)
    rec.check("direct derivation formula matches the commutator", der1)
    return rec.results


# groupoid algebra --------------------------------------------------------------


def galgebra_suite(opt: SuiteOptions) -> list[CheckResult]:
    rng = random.Random(opt.seed + 6)
    rec = _Recorder("galgebra")
    n = 2
    p = generate("periodic", {"d": 1}, window=10.0)
    deep = interior_sites(p, 6.0)
    count = max(opt.samples // 20, 5)

    def cluster() -> list[int]:
        c = rng.choice(deep)
        return [s for s in deep if abs(s - c) <= 1]

    def local_arrows(sites: list[int], k: int) -> list[GroupoidElement]:
        return [GroupoidElement(p, random_order(rng, sites, n), random_order(rng, sites, n)) for _ in range(k)]

    def local_function(sites: list[int], k: int = 4) -> GFunction:
        return GFunction.from_values(n, [(g, random_complex(rng)) for g in local_arrows(sites, k)])

    def unit_and_assoc():
        worst = 0.0
        one = GFunction.units(n, 2.0)
        for _ in range(count):
            near = cluster()
            f, g, h = local_function(near), local_function(near), local_function(near)
            fg_h = convolve(convolve(f, g), h)
            f_gh = convolve(f, convolve(g, h))
            for a in local_arrows(near, 4):
                worst = max(worst, abs(convolve(one, g)(a) - g(a)), abs(convolve(g, one)(a) - g(a)))
                worst = max(worst, abs(fg_h(a) - f_gh(a)))
                worst = max(worst, abs(convolve(f, g)(a) - convolve_source_fiber(f, g)(a)))
        return worst <= opt.tol, count, f"max deviation {worst:.2e}"

    def positivity_and_involution():
        worst = 0.0
        for _ in range(count):
            near = cluster()
            f, g = local_function(near), local_function(near)
            ff = convolve(f, involution(f))
            for a in local_arrows(near, 3):
                v = ff(range_(a))
                if v.real < -opt.tol or abs(v.imag) > opt.tol:
                    return False, count, "f*f^* is not positive at a unit"
                lhs = involution(convolve(f, g))(a)
                rhs = convolve(involution(g), involution(f))(a)
                worst = max(worst, abs(lhs - rhs), abs(involution(involution(f))(a) - f(a)))
        return worst <= opt.tol, count, f"max deviation {worst:.2e}"

    def expectation():
        worst = 0.0
        for _ in range(count):
            near = cluster()
            e = conditional_expectation(local_function(near))
            ee = conditional_expectation(e)
            arrows = local_arrows(near, 4)
            if not is_bi_equivariant(e, arrows, opt.tol):
                return False, count, "E(f) is not bi-equivariant"
            for a in arrows:
                worst = max(worst, abs(ee(a) - e(a)))
            eg = convolve(e, conditional_expectation(local_function(near)))
            if not is_bi_equivariant(eg, arrows[:2], opt.tol):
                return False, count, "bi-equivariant functions not closed under convolution"
        even = GFunction(n, 3.0, lambda a: 1.0)
        killed = max(abs(conditional_expectation(even)(a)) for a in local_arrows(cluster(), 10))
        return worst <= opt.tol and killed == 0.0, count, f"idempotence {worst:.2e}, even kernel {killed:.2e}"

    def representations():
        lat = chain(6)
        for q, N in ((hopping(1.0, onsite=0.5), 1), (pair_diagonal(-2.0), 2), (pair_hop(2.0), 2)):
            if not left_regular(seed_to_function(q), lat, N).close_to(assemble_sector([q], lat, N), 1e-12):
                return False, 3, f"seed path for {q.name}"
        small = generate("periodic", {"d": 1}, window=2.0)
        f = random_delta_on(small, rng, n)
        pf = left_regular(f, small, n)
        if not left_regular(involution(f), small, n).close_to(pf.adjoint(), 1e-12):
            return False, 5, "pi(f*) differs from pi(f)^*"
        if not left_regular(conditional_expectation(f), small, n).close_to(pf, 1e-12):
            return False, 5, "compression does not factor through E"
        return True, 5

    def covariance():
        pat = opt.pattern or generate("random_displaced", {"d": 1, "lambda": 0.3}, seed=opt.seed, window=7.0)
        sites = interior_sites(pat, 2.5)
        for a in rng.sample(sites, min(3, len(sites))):
            rep = covariance_check(GFunction.from_kernel(hopping(1.0, 1.5)), pat, a, 1)
            if not rep.passed:
                return False, 3, f"deviation {rep.max_deviation}"
        return True, 3

    rec.check("convolution unit, associativity and fiber forms", unit_and_assoc)
    rec.check("involution and positivity", positivity_and_involution)
    rec.check("conditional expectation", expectation)
    rec.check("left regular representation", representations)
    rec.check("covariance under translation", covariance)
    return rec.results


def pair_hop(range_: float = 2.0, amplitude: float = 1.0):
    """Two-body hop ``{0, 1} <-> {0, 2}`` (and mirror images) as a tabulated kernel."""
    from .hamiltonian import potential_table

    entries = [
        {"left": [[0.0], [1.0]], "right": [[0.0], [2.0]], "value": amplitude},
        {"left": [[0.0], [-1.0]], "right": [[0.0], [-2.0]], "value": amplitude},
    ]
    q = potential_table(2, entries, range_)
    return q


def random_delta_on(p: Pattern, rng: random.Random, n: int, k: int = 4) -> GFunction:
    sites = list(range(len(p)))
    vals = [
        (GroupoidElement(p, random_order(rng, sites, n), random_order(rng, sites, n)), random_complex(rng))
        for _ in range(k)
    ]
    return GFunction.from_values(n, vals)


# canonical order -------------------------------------------------------------------


def canonical_suite(opt: SuiteOptions) -> list[CheckResult]:
    rng = random.Random(opt.seed + 7)
    rec = _Recorder("canonical_order")

    def translation_compat():
        cases = 0
        for d in (1, 2):
            p = generate("perturbed_periodic", {"d": d, "epsilon": 0.2}, seed=opt.seed, window=6.0 if d == 2 else 10.0)
            lab = label_bijection(p)
            sites = interior_sites(p, 2.5)
            for _ in range(max(opt.samples // 2, 10)):
                v = rng.sample(sites, rng.randint(1, 4))
                a = rng.choice(sites)
                moved = p.translate(p.points[a])
                mlab = label_bijection(moved)
                if canonical_order(mlab, v) != canonical_order(lab, v):
                    return False, cases, f"d={d} V={v} x={a}"
                if any(mlab.label(i) != tuple(np.subtract(lab.label(i), lab.label(a))) for i in v):
                    return False, cases, "label compatibility"
                cases += 1
        return True, cases

    def phi_morphism():
        p = generate("perturbed_periodic", {"d": 1, "epsilon": 0.2}, seed=opt.seed, window=9.0)
        lab = label_bijection(p)
        deep = interior_sites(p, 5.5)
        worst = 0.0
        count = max(opt.samples // 40, 3)
        for _ in range(count):
            c = rng.choice(deep)
            near = [s for s in deep if abs(p.points[s][0] - p.points[c][0]) <= 1.5]
            f = conditional_expectation(random_local_delta(p, rng, near))
            g = conditional_expectation(random_local_delta(p, rng, near))
            lhs = reduce_function(convolve(f, g), lab)
            rhs = reduced_convolve(reduce_function(f, lab), reduce_function(g, lab), lab)
            back = inflate(reduce_function(f, lab), lab)
            for _ in range(4):
                u = canonical_order(lab, rng.sample(near, 2))
                v = canonical_order(lab, rng.sample(near, 2))
                alpha = GroupoidElement(p, u, v)
                worst = max(worst, abs(lhs(alpha) - rhs(alpha)))
                beta = GroupoidElement(p, random_order(rng, near, 2), random_order(rng, near, 2))
                worst = max(worst, abs(back(beta) - f(beta)))
        return worst <= opt.tol, count, f"max deviation {worst:.2e}"

    rec.check("canonical order is translation compatible", translation_compat)
    rec.check("reduction map is an algebra morphism", phi_morphism)
    return rec.results


def random_local_delta(p: Pattern, rng: random.Random, sites: list[int], k: int = 3) -> GFunction:
    vals = [
        (GroupoidElement(p, random_order(rng, sites, 2), random_order(rng, sites, 2)), random_complex(rng))
        for _ in range(k)
    ]
    return GFunction.from_values(2, vals)


# experiment ----------------------------------------------------------------------


def experiment_suite(opt: SuiteOptions) -> list[CheckResult]:
    from .experiment import run_selfbinding_experiment

    rec = _Recorder("experiment")
    m = max(opt.sites, 8)

    def free():
        rep = run_selfbinding_experiment({"pattern": {"sites": m}, "N": 2, "t": 1.0, "u": 0.0})
        e1 = [-2.0 * math.cos(k * math.pi / (m + 1)) for k in range(1, m + 1)]
        sums = sorted(a + b for a, b in combinations(e1, 2))
        dev = float(np.max(np.abs(np.array(sums) - rep.eigenvalues)))
        return dev <= 1e-8, 1, f"max deviation {dev:.2e}"

    def bound():
        rep = run_selfbinding_experiment({"pattern": {"sites": m}, "N": 2, "t": 1.0, "u": -8.0})
        low = rep.islands[0]
        return (
            len(rep.islands) >= 2 and rep.gap_below(low) >= 2.0 and low.mean_pair_distance < 2.0,
            1,
            f"island of {low.count} states, gap {rep.gap_below(low):.3f}",
        )

    rec.check("free fermions: pairwise sums", free)
    rec.check("attraction binds pairs", bound)
    return rec.results


SUITES: dict[str, Callable[[SuiteOptions], list[CheckResult]]] = {
    "pattern": pattern_suite,
    "cover": cover_suite,
    "groupoid": groupoid_suite,
    "2action": two_action_suite,
    "car": car_suite,
    "fock": fock_suite,
    "ham": hamiltonian_suite,
    "galg": galgebra_suite,
    "canon": canonical_suite,
    "experiment": experiment_suite,
}


def run_suite(selector: str, options: SuiteOptions | None = None) -> SuiteReport:
    opt = options or SuiteOptions()
    if selector == "all":
        names: Iterable[str] = SUITES
    elif selector in SUITES:
        names = [selector]
    else:
        raise KeyError(f"unknown selector {selector!r}; expected 'all' or one of {sorted(SUITES)}")
    report = SuiteReport(selector, opt)
    t0 = time.perf_counter()
    for name in names:
        report.results.extend(SUITES[name](opt))
    report.seconds = time.perf_counter() - t0
    return report
