"""Fermion sectors, frame vectors and Fock representations.

The N-fermion sector of a lattice with ``m`` sites has the basis of
ascending N-subsets in ``itertools.combinations`` order; the state ``U``
stands for the frame vector ``|U, ascending>``.  A frame vector with another
ordering is the same basis vector times the sign of that ordering.

:func:`full_fock_oracle` is a second, independent construction: the
occupation-number (Jordan-Wigner) matrices of the generators on the full
``2^m``-dimensional space.  Tests compare the two.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb, factorial
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from . import permutations as perm
from ._native import dress_terms, lex_rank
from .car_symbolic import CARElement, Key
from .errors import OracleLimitError
from .pattern import Pattern

ORACLE_LIMIT = 14


@dataclass(frozen=True, eq=False)
class SectorBasis:
    n_sites: int
    N: int
    pattern: Pattern | None = None
    states: tuple[tuple[int, ...], ...] = field(init=False)

    def __post_init__(self) -> None:
        if self.N < 0 or self.N > self.n_sites:
            raise ValueError(f"particle number {self.N} outside 0..{self.n_sites}")
        object.__setattr__(self, "states", tuple(combinations(range(self.n_sites), self.N)))

    @classmethod
    def of(cls, pattern: Pattern, N: int) -> "SectorBasis":
        return cls(len(pattern), N, pattern)

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, subset: Iterable[int]) -> int:
        u = tuple(sorted(subset))
        if len(u) != self.N or len(set(u)) != self.N:
            raise ValueError("subset size differs from the particle number")
        return lex_rank(u, self.n_sites)

    def __len__(self) -> int:
        return self.dim


def frame_vector(basis: SectorBasis, order: Sequence[int]) -> tuple[int, int]:
    """``|U, chi> = sign · e_row`` for the ordering ``chi`` of ``U``."""
    if len(order) != basis.N:
        raise ValueError("arity mismatch")
    if len(set(order)) != len(order):
        raise ValueError("ordering repeats a site")
    return basis.index(order), perm.sign(order)


def inner_product(basis: SectorBasis, chi_u: Sequence[int], chi_v: Sequence[int]) -> int:
    """``<U, chi_U | V, chi_V>`` evaluated through the frame vectors."""
    ru, su = frame_vector(basis, chi_u)
    rv, sv = frame_vector(basis, chi_v)
    return su * sv if ru == rv else 0


@dataclass(frozen=True, eq=False)
class SectorOperator:
    """Sparse operator on one sector, coordinates deduplicated and sorted."""

    basis: SectorBasis
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    hermitian: bool = False

    def __post_init__(self) -> None:
        m = sp.coo_matrix(
            (np.asarray(self.vals, dtype=complex), (np.asarray(self.rows), np.asarray(self.cols))),
            shape=(self.basis.dim, self.basis.dim),
        )
        m.sum_duplicates()
        m.eliminate_zeros()
        order = np.lexsort((m.col, m.row))
        object.__setattr__(self, "rows", m.row[order].astype(np.int64))
        object.__setattr__(self, "cols", m.col[order].astype(np.int64))
        object.__setattr__(self, "vals", m.data[order].astype(complex))

    @classmethod
    def from_matrix(cls, basis: SectorBasis, mat, hermitian: bool = False) -> "SectorOperator":
        m = sp.coo_matrix(mat)
        return cls(basis, m.row, m.col, m.data, hermitian)

    @classmethod
    def zero(cls, basis: SectorBasis) -> "SectorOperator":
        empty = np.zeros(0, dtype=np.int64)
        return cls(basis, empty, empty, np.zeros(0, dtype=complex), True)

    @classmethod
    def identity(cls, basis: SectorBasis) -> "SectorOperator":
        idx = np.arange(basis.dim)
        return cls(basis, idx, idx, np.ones(basis.dim, dtype=complex), True)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.basis.dim, self.basis.dim)

    @property
    def nnz(self) -> int:
        return len(self.vals)

    def tocsr(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.vals, (self.rows, self.cols)), shape=self.shape)

    def toarray(self) -> np.ndarray:
        return self.tocsr().toarray()

    def _same_basis(self, other: "SectorOperator") -> None:
        if self.basis.n_sites != other.basis.n_sites or self.basis.N != other.basis.N:
            raise ValueError("operators act on different sectors")

    def __add__(self, other: "SectorOperator") -> "SectorOperator":
        self._same_basis(other)
        return SectorOperator(
            self.basis,
            np.concatenate([self.rows, other.rows]),
            np.concatenate([self.cols, other.cols]),
            np.concatenate([self.vals, other.vals]),
            self.hermitian and other.hermitian,
        )

    def __sub__(self, other: "SectorOperator") -> "SectorOperator":
        return self + other.scale(-1)

    def scale(self, factor: complex) -> "SectorOperator":
        herm = self.hermitian and complex(factor).imag == 0
        return SectorOperator(self.basis, self.rows, self.cols, factor * self.vals, herm)

    def __matmul__(self, other: "SectorOperator") -> "SectorOperator":
        self._same_basis(other)
        return SectorOperator.from_matrix(self.basis, self.tocsr() @ other.tocsr())

    def adjoint(self) -> "SectorOperator":
        return SectorOperator(self.basis, self.cols, self.rows, self.vals.conj(), self.hermitian)

    def commutator(self, other: "SectorOperator") -> "SectorOperator":
        return (self @ other) - (other @ self)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.vals))) if self.nnz else 0.0

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return (self - self.adjoint()).max_abs() <= tol

    def close_to(self, other: "SectorOperator", tol: float = 0.0) -> bool:
        return (self - other).max_abs() <= tol

    def equals(self, other: "SectorOperator") -> bool:
        """Exact entrywise equality."""
        self._same_basis(other)
        return (
            np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.vals, other.vals)
        )

    def norm(self) -> float:
        """Operator (spectral) norm from a dense SVD; intended for small sectors."""
        if self.nnz == 0:
            return 0.0
        return float(np.linalg.norm(self.toarray(), 2))

    def entry(self, row: int, col: int) -> complex:
        hit = np.nonzero((self.rows == row) & (self.cols == col))[0]
        return complex(self.vals[hit[0]]) if len(hit) else 0j


def _terms_to_masks(terms: Mapping[Key, complex], n_sites: int):
    cre = [sum(1 << s for s in c) for c, _ in terms]
    ann = [sum(1 << s for s in a) for _, a in terms]
    vals = np.fromiter(terms.values(), dtype=complex, count=len(terms))
    if n_sites < 64:
        return np.array(cre, dtype=np.uint64), np.array(ann, dtype=np.uint64), vals
    return cre, ann, vals


def represent(element: CARElement, basis: SectorBasis, hermitian: bool = False) -> SectorOperator:
    """Sector block of a gauge-invariant element.

    A term ``a*_J a_J'`` with ``|J| = |J'| = n`` contributes nothing when
    ``n > N``, the rank-one ``|J><J'|`` when ``n = N``, and
    ``sum_Gamma |J ∨ Gamma><J' ∨ Gamma|`` over spectator sets disjoint from
    ``J ∪ J'`` when ``n < N``.
    """
    if element.n_sites != basis.n_sites:
        raise ValueError("element and basis live on different lattices")
    for cre, ann in element.terms:
        if len(cre) != len(ann):
            raise ValueError("non gauge-invariant term; use full_fock_oracle")
    cm, am, vals = _terms_to_masks(element.terms, basis.n_sites)
    rows, cols, out = dress_terms(cm, am, vals, basis.n_sites, basis.N)
    return SectorOperator(basis, rows, cols, out, hermitian)


def represent_monomial(
    basis: SectorBasis, cre: Sequence[int], ann: Sequence[int], coeff: complex = 1.0
) -> SectorOperator:
    if len(cre) != len(ann):
        raise ValueError("sector representation needs |J| = |J'|")
    return represent(CARElement.monomial(basis.n_sites, cre, ann, coeff), basis)


def rank_one(basis: SectorBasis, chi: Sequence[int], chi_p: Sequence[int], coeff: complex = 1.0) -> SectorOperator:
    """``coeff · |U, chi><U', chi'|``."""
    r, s = frame_vector(basis, chi)
    c, t = frame_vector(basis, chi_p)
    return SectorOperator(basis, np.array([r]), np.array([c]), np.array([s * t * coeff]))


# full Fock oracle ------------------------------------------------------


@lru_cache(maxsize=16)
def _generators(n_sites: int) -> tuple[sp.csr_matrix, ...]:
    """Annihilators ``a_k = Z^{⊗k} ⊗ sigma^- ⊗ I`` in the occupation basis."""
    z = sp.csr_matrix(np.diag([1.0, -1.0]))
    lower = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    eye = sp.identity(2, format="csr")
    out = []
    for k in range(n_sites):
        m = sp.identity(1, format="csr")
        for j in range(n_sites):
            f = z if j < k else (lower if j == k else eye)
            m = sp.kron(m, f, format="csr")
        out.append(m.astype(complex))
    return tuple(out)


def oracle_annihilator(n_sites: int, x: int) -> sp.csr_matrix:
    return _generators(n_sites)[x]


def oracle_creator(n_sites: int, x: int) -> sp.csr_matrix:
    return _generators(n_sites)[x].conj().T.tocsr()


def full_fock_oracle(element: CARElement, dense: bool = False):
    """Matrix of the element on the ``2^m``-dimensional Fock space (basis state 0 is the vacuum)."""
    m = element.n_sites
    if m > ORACLE_LIMIT:
        raise OracleLimitError(m, ORACLE_LIMIT)
    dim = 1 << m
    total = sp.csr_matrix((dim, dim), dtype=complex)
    for (cre, ann), c in element.terms.items():
        op = sp.identity(dim, dtype=complex, format="csr")
        for s in cre:
            op = op @ oracle_creator(m, s)
        for s in reversed(ann):
            op = op @ oracle_annihilator(m, s)
        total = total + c * op
    return total.toarray() if dense else total.tocsr()


def oracle_isometry(basis: SectorBasis) -> sp.csr_matrix:
    """Columns ``a*_{u_1} ... a*_{u_N} |vacuum>`` for the ascending basis states."""
    m = basis.n_sites
    if m > ORACLE_LIMIT:
        raise OracleLimitError(m, ORACLE_LIMIT)
    dim = 1 << m
    vac = np.zeros(dim, dtype=complex)
    vac[0] = 1.0
    cols = []
    for state in basis.states:
        v = vac
        for s in reversed(state):
            v = oracle_creator(m, s) @ v
        cols.append(sp.csr_matrix(v.reshape(-1, 1)))
    if not cols:
        return sp.csr_matrix((dim, 0), dtype=complex)
    return sp.hstack(cols, format="csr")


def oracle_sector_block(element: CARElement, basis: SectorBasis) -> np.ndarray:
    v = oracle_isometry(basis)
    return (v.conj().T @ full_fock_oracle(element) @ v).toarray()


# symmetric presentation of sector operators -----------------------------


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """Bi-equivariant coefficients ``F_{U,U'}(chi, chi')`` of a sector operator.

    Values are stored at ascending orderings; :meth:`value` applies the signs.
    """

    basis: SectorBasis
    entries: Mapping[tuple[tuple[int, ...], tuple[int, ...]], complex]

    def value(self, chi: Sequence[int], chi_p: Sequence[int]) -> complex:
        key = (tuple(sorted(chi)), tuple(sorted(chi_p)))
        return perm.sign(chi) * perm.sign(chi_p) * self.entries.get(key, 0j)

    def reconstruct(self) -> SectorOperator:
        """``F = (1/N!) sum_{U,U'} sum_{chi,chi'} F_{U,U'}(chi,chi') |U,chi><U',chi'|``, summed literally."""
        n = self.basis.N
        rows, cols, vals = [], [], []
        for u, up in self.entries:
            for chi in perm.all_permutations(n):
                o = tuple(u[i] for i in chi)
                r, s = frame_vector(self.basis, o)
                for chi_p in perm.all_permutations(n):
                    op = tuple(up[i] for i in chi_p)
                    c, t = frame_vector(self.basis, op)
                    rows.append(r)
                    cols.append(c)
                    vals.append(self.value(o, op) * s * t / factorial(n))
        return SectorOperator(self.basis, np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64), np.array(vals))

    def convolve(self, other: "CoefficientTable") -> "CoefficientTable":
        """``(FF')_{U,U'}(chi,chi') = sum_{V, chi_V} F_{U,V}(chi, chi_V) F'_{V,U'}(chi_V, chi')``."""
        n = self.basis.N
        targets: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
        for v, up in other.entries:
            targets.setdefault(v, []).append(up)
        out: dict[tuple[tuple[int, ...], tuple[int, ...]], complex] = {}
        for u, v in self.entries:
            for up in targets.get(v, []):
                acc = 0j
                for chi_v in perm.all_permutations(n):
                    ov = tuple(v[i] for i in chi_v)
                    acc += self.value(u, ov) * other.value(ov, up)
                out[(u, up)] = out.get((u, up), 0j) + acc
        return CoefficientTable(self.basis, out)


def symmetric_coefficients(op: SectorOperator) -> CoefficientTable:
    """``F_{U,U'}(chi,chi') = (1/N!) <U,chi|F|U',chi'>`` within one sector."""
    states = op.basis.states
    f = float(factorial(op.basis.N))
    entries = {
        (states[r], states[c]): complex(v) / f for r, c, v in zip(op.rows, op.cols, op.vals)
    }
    return CoefficientTable(op.basis, entries)


def sector_dimension(n_sites: int, N: int) -> int:
    return comb(n_sites, N)
