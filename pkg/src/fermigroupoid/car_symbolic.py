"""Exact symbolic CAR algebra on a finite lattice.

Sites are point indices ``0 .. n_sites - 1`` of a pattern.  A monomial
``a*_J(chi_J) a_J'(chi_J')`` stands for the operator word

    a*_{chi_J(1)} ... a*_{chi_J(n)}  a_{chi_J'(n')} ... a_{chi_J'(1)}

and every element is stored against the canonical (ascending) orderings, so
the key of a term is the pair of sorted site tuples ``(J, J')``.  The
canonical word therefore lists creations ascending and annihilations
descending.  Any other ordering is folded in through its permutation sign
when the term is inserted.

Products are brought to this form by explicit adjacent anticommutations
(``a_x a*_y = delta_xy - a*_y a_x``), never through a closed-form sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

from . import permutations as perm
from .cover import OrderedConfig

Key = tuple[tuple[int, ...], tuple[int, ...]]
# One letter of an operator word: (is_creation, site).
Letter = tuple[bool, int]


def _out_of_order(p: Letter, q: Letter) -> bool:
    """Whether the adjacent pair ``p q`` must be swapped to reach canonical order."""
    if p[0] != q[0]:
        return not p[0]
    if p[0]:
        return p[1] > q[1]
    return p[1] < q[1]


@lru_cache(maxsize=1 << 16)
def normal_order(word: tuple[Letter, ...]) -> tuple[tuple[Key, int], ...]:
    """Canonical expansion of an operator word with integer coefficients."""
    out: dict[Key, int] = {}
    w = list(word)
    sign = 1
    n = len(w)
    while True:
        i = next((k for k in range(n - 1) if _out_of_order(w[k], w[k + 1])), -1)
        if i < 0:
            break
        p, q = w[i], w[i + 1]
        if not p[0] and q[0] and p[1] == q[1]:
            # a_x a*_x = 1 - a*_x a_x: keep the contracted branch.
            for key, c in normal_order(tuple(w[:i] + w[i + 2 :])):
                out[key] = out.get(key, 0) + sign * c
        w[i], w[i + 1] = q, p
        sign = -sign
    cre = [s for is_c, s in w if is_c]
    ann = [s for is_c, s in w if not is_c]
    if len(set(cre)) == len(cre) and len(set(ann)) == len(ann):
        key = (tuple(cre), tuple(reversed(ann)))
        out[key] = out.get(key, 0) + sign
    return tuple((k, c) for k, c in out.items() if c != 0)


def word_of(key: Key) -> tuple[Letter, ...]:
    cre, ann = key
    return tuple((True, s) for s in cre) + tuple((False, s) for s in reversed(ann))


@dataclass(frozen=True, eq=False)
class CARElement:
    """Finite linear combination of canonical monomials."""

    n_sites: int
    terms: Mapping[Key, complex]

    def __post_init__(self) -> None:
        clean: dict[Key, complex] = {}
        for (cre, ann), c in self.terms.items():
            c = complex(c)
            if c == 0:
                continue
            cre, ann = tuple(cre), tuple(ann)
            if any(s < 0 or s >= self.n_sites for s in cre + ann):
                raise ValueError("site index out of range")
            clean[(cre, ann)] = c
        object.__setattr__(self, "terms", clean)

    # construction -----------------------------------------------------

    @classmethod
    def zero(cls, n_sites: int) -> "CARElement":
        return cls(n_sites, {})

    @classmethod
    def scalar(cls, n_sites: int, value: complex = 1.0) -> "CARElement":
        return cls(n_sites, {((), ()): value})

    @classmethod
    def monomial(
        cls, n_sites: int, cre: Sequence[int], ann: Sequence[int], coeff: complex = 1.0
    ) -> "CARElement":
        """``coeff · a*_J(cre) a_J'(ann)`` for arbitrary orderings."""
        if len(set(cre)) != len(cre) or len(set(ann)) != len(ann):
            return cls.zero(n_sites)
        s = perm.sign(cre) * perm.sign(ann)
        return cls(n_sites, {(tuple(sorted(cre)), tuple(sorted(ann))): s * coeff})

    @classmethod
    def from_configs(
        cls, creation: OrderedConfig, annihilation: OrderedConfig, coeff: complex = 1.0
    ) -> "CARElement":
        if creation.pattern is not annihilation.pattern:
            raise ValueError("configurations live on different patterns")
        return cls.monomial(len(creation.pattern), creation.order, annihilation.order, coeff)

    @classmethod
    def creator(cls, n_sites: int, x: int) -> "CARElement":
        return cls.monomial(n_sites, (x,), ())

    @classmethod
    def annihilator(cls, n_sites: int, x: int) -> "CARElement":
        return cls.monomial(n_sites, (), (x,))

    @classmethod
    def number(cls, n_sites: int, sites: Iterable[int]) -> "CARElement":
        """``n_U = prod_{x in U} a*_x a_x`` (equal to ``a*_U a_U`` canonically)."""
        u = tuple(sorted(set(sites)))
        return cls(n_sites, {(u, u): 1.0})

    @classmethod
    def from_word(cls, n_sites: int, word: Sequence[Letter], coeff: complex = 1.0) -> "CARElement":
        return cls(n_sites, {k: coeff * c for k, c in normal_order(tuple(word))})

    # algebra ----------------------------------------------------------

    def _check(self, other: "CARElement") -> None:
        if self.n_sites != other.n_sites:
            raise ValueError("elements live on different lattices")

    def __add__(self, other: "CARElement") -> "CARElement":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return CARElement(self.n_sites, out)

    def __neg__(self) -> "CARElement":
        return CARElement(self.n_sites, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "CARElement") -> "CARElement":
        return self + (-other)

    def scale(self, factor: complex) -> "CARElement":
        return CARElement(self.n_sites, {k: factor * c for k, c in self.terms.items()})

    def __rmul__(self, factor: complex) -> "CARElement":
        return self.scale(factor)

    def __mul__(self, other: "CARElement | complex") -> "CARElement":
        if not isinstance(other, CARElement):
            return self.scale(other)
        return multiply(self, other)

    def __matmul__(self, other: "CARElement") -> "CARElement":
        return multiply(self, other)

    def __iter__(self) -> Iterator[tuple[Key, complex]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def coefficient(self, cre: Sequence[int], ann: Sequence[int]) -> complex:
        """Coefficient of ``a*_J(cre) a_J'(ann)``, sign included."""
        if len(set(cre)) != len(cre) or len(set(ann)) != len(ann):
            return 0j
        c = self.terms.get((tuple(sorted(cre)), tuple(sorted(ann))), 0j)
        return perm.sign(cre) * perm.sign(ann) * c

    def close_to(self, other: "CARElement", tol: float = 1e-12) -> bool:
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0) - other.terms.get(k, 0)) <= tol for k in keys)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    def support(self) -> set[int]:
        out: set[int] = set()
        for cre, ann in self.terms:
            out.update(cre)
            out.update(ann)
        return out

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (cre, ann), c in sorted(self.terms.items()):
            word = "".join(f"a*{s}" for s in cre) + "".join(f"a{s}" for s in reversed(ann))
            parts.append(f"({c:g}){word or '1'}")
        return " + ".join(parts)


def multiply(a: CARElement, b: CARElement) -> CARElement:
    a._check(b)
    out: dict[Key, complex] = {}
    for ka, ca in a.terms.items():
        wa = word_of(ka)
        for kb, cb in b.terms.items():
            for k, c in normal_order(wa + word_of(kb)):
                out[k] = out.get(k, 0) + ca * cb * c
    return CARElement(a.n_sites, out)


def commutator(a: CARElement, b: CARElement) -> CARElement:
    return multiply(a, b) - multiply(b, a)


def star(a: CARElement) -> CARElement:
    """``(c a*_J a_J')* = conj(c) a*_J' a_J`` on canonical keys."""
    return CARElement(a.n_sites, {(ann, cre): c.conjugate() for (cre, ann), c in a.terms.items()})


def vacuum_state(a: CARElement) -> complex:
    return a.terms.get(((), ()), 0j)


def trace_state(a: CARElement) -> complex:
    """Normalized trace through the full-Fock matrix (see :mod:`fock`)."""
    from .fock import full_fock_oracle

    mat = full_fock_oracle(a)
    return complex(mat.diagonal().sum()) / mat.shape[0]


def symbolic_trace(a: CARElement) -> complex:
    """Trace read off the presentation: ``T(a*_J a_J') = delta_{JJ'} 2^{-|J|}``."""
    return sum((c * 0.5 ** len(cre) for (cre, ann), c in a.terms.items() if cre == ann), 0j)


def ad(q: CARElement, a: CARElement) -> CARElement:
    """``ad_Q(A) = i [A, Q]``."""
    return commutator(a, q).scale(1j)


def derivation_star(q: CARElement) -> CARElement:
    """Generator of the adjoint derivation: ``ad_{Q*}(A) = ad_Q(A*)*`` holds for ``Q* = Q†``."""
    return star(q)


def is_gauge_invariant(a: CARElement) -> bool:
    return all(len(cre) == len(ann) for cre, ann in a.terms)


def gi_degree(a: CARElement) -> int | None:
    """Smallest ``n`` carrying an ``(n, n)`` term; ``None`` off GICAR and for zero."""
    if not is_gauge_invariant(a) or not a.terms:
        return None
    return min(len(cre) for cre, _ in a.terms)


def anticommutator(a: CARElement, b: CARElement) -> CARElement:
    return multiply(a, b) + multiply(b, a)


def mixed_reduction(
    n_sites: int, j: Sequence[int], jp: Sequence[int]
) -> tuple[int, CARElement]:
    """Right-hand side of the mixed-order reduction of ``a_J(chi) a*_J'(chi')``.

    Returns ``(sign, X)`` with ``X = sum_{K ⊆ J∩J'} (-1)^{|K|} a*_{J'∖J} n_K a_{J∖J'}``
    in canonical orderings, and ``sign`` the global factor fixing
    ``a_J a*_J' = sign · X``.  The factor is found by comparing one
    coefficient with the constructive product.
    """
    jset, jpset = set(j), set(jp)
    common = sorted(jset & jpset)
    cre = tuple(sorted(jpset - jset))
    ann = tuple(sorted(jset - jpset))
    x = CARElement.zero(n_sites)
    for size in range(len(common) + 1):
        for k in combinations(common, size):
            term = multiply(
                multiply(CARElement.monomial(n_sites, cre, ()), CARElement.number(n_sites, k)),
                CARElement.monomial(n_sites, (), ann),
            )
            x = x + term.scale((-1) ** size)
    lhs = multiply(CARElement.monomial(n_sites, (), j), CARElement.monomial(n_sites, jp, ()))
    ref_key = next(iter(x.terms))
    ratio = lhs.terms.get(ref_key, 0) / x.terms[ref_key]
    sign = 1 if ratio.real > 0 else -1
    return sign, x
