"""Sums of Kronecker products of sparse one-variable factors.

Every operator built from trigonometric symbols on H^2(D^n) factors along
the axes: a monomial symbol acts as a tensor product of one-variable
shifts.  Storing ``sum_t c_t F_t1 (x) ... (x) F_tn`` keeps each factor at
the size of one axis, so boxes with tens of thousands of indices per axis
stay cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .limits import check_flat_size
from .tucker import TuckerVector

Factor = sp.csr_matrix


@lru_cache(maxsize=4096)
def shift_factor(m: int, n_in: int, n_out: int, out_offset: int = 0, positive_only: bool = False) -> Factor:
    """Map e_j (j = 0..n_in-1) to e_{j+m}, stored at row j + m - out_offset.

    Targets outside the output range are dropped; with ``positive_only`` the
    targets with negative index are dropped as well.
    """
    F = sp.eye(n_out, n_in, k=out_offset - m, dtype=complex, format="csr")
    if positive_only and out_offset < 0:
        keep = (np.arange(n_out) + out_offset >= 0).astype(complex)
        F = sp.csr_matrix(sp.diags(keep) @ F)
    F.sort_indices()
    return F


def _content_key(F: Factor):
    F = F.tocsr()
    F.sum_duplicates()
    F.eliminate_zeros()
    F.sort_indices()
    return (F.shape, F.indptr.tobytes(), F.indices.tobytes(), F.data.tobytes()), F


def _factor_norm_bound(F: Factor) -> float:
    # ||F||_2 <= sqrt(||F||_1 ||F||_inf)
    if F.nnz == 0:
        return 0.0
    A = abs(F)
    return float(np.sqrt(A.sum(axis=0).max() * A.sum(axis=1).max()))


def _canonical_terms(terms):
    interned: dict = {}
    merged: dict = {}
    order = []
    for c, factors in terms:
        if c == 0:
            continue
        ids = []
        canon = []
        for F in factors:
            key, Fc = _content_key(F)
            if key not in interned:
                interned[key] = Fc
            canon.append(interned[key])
            ids.append(id(interned[key]))
        ids = tuple(ids)
        if ids in merged:
            merged[ids][0] += c
        else:
            merged[ids] = [complex(c), tuple(canon)]
            order.append(ids)
    return tuple((merged[i][0], merged[i][1]) for i in order if abs(merged[i][0]) > 0)


@dataclass(frozen=True, eq=False)
class KronSum:
    in_lengths: tuple[int, ...]
    out_lengths: tuple[int, ...]
    terms: tuple
    in_offsets: tuple[int, ...] = field(default=None)
    out_offsets: tuple[int, ...] = field(default=None)

    def __post_init__(self):
        n = len(self.in_lengths)
        object.__setattr__(self, "in_offsets", self.in_offsets or (0,) * n)
        object.__setattr__(self, "out_offsets", self.out_offsets or (0,) * n)
        for c, factors in self.terms:
            if len(factors) != n:
                raise ValueError("term has wrong number of factors")
            for j, F in enumerate(factors):
                if F.shape != (self.out_lengths[j], self.in_lengths[j]):
                    raise ValueError(f"factor {j} has shape {F.shape}")
        object.__setattr__(self, "terms", _canonical_terms(self.terms))

    @property
    def n(self) -> int:
        return len(self.in_lengths)

    @cached_property
    def norm_bound(self) -> float:
        return float(sum(abs(c) * np.prod([_factor_norm_bound(F) for F in fs]) for c, fs in self.terms))

    def scaled(self, a: complex) -> KronSum:
        return KronSum(self.in_lengths, self.out_lengths,
                       tuple((a * c, fs) for c, fs in self.terms),
                       self.in_offsets, self.out_offsets)

    def plus(self, other: KronSum, a: complex = 1.0, b: complex = 1.0) -> KronSum:
        if (self.in_lengths, self.out_lengths) != (other.in_lengths, other.out_lengths):
            raise ValueError("shape mismatch in Kronecker sum")
        terms = tuple((a * c, fs) for c, fs in self.terms) + tuple((b * c, fs) for c, fs in other.terms)
        return KronSum(self.in_lengths, self.out_lengths, terms, self.in_offsets, self.out_offsets)

    def compose(self, other: KronSum) -> KronSum:
        """self @ other."""
        if self.in_lengths != other.out_lengths:
            raise ValueError("inner dimensions differ in composition")
        memo: dict = {}
        terms = []
        for ca, fa in self.terms:
            for cb, fb in other.terms:
                prod = []
                for j, (A, B) in enumerate(zip(fa, fb)):
                    key = (j, id(A), id(B))
                    if key not in memo:
                        memo[key] = sp.csr_matrix(A @ B)
                    prod.append(memo[key])
                terms.append((ca * cb, tuple(prod)))
        return KronSum(other.in_lengths, self.out_lengths, tuple(terms), other.in_offsets, self.out_offsets)

    def adjoint(self) -> KronSum:
        memo: dict = {}
        terms = []
        for c, fs in self.terms:
            adj = []
            for F in fs:
                if id(F) not in memo:
                    memo[id(F)] = sp.csr_matrix(F.conj().T)
                adj.append(memo[id(F)])
            terms.append((np.conj(c), tuple(adj)))
        return KronSum(self.out_lengths, self.in_lengths, tuple(terms), self.out_offsets, self.in_offsets)

    def to_sparse(self) -> sp.csr_matrix:
        n_out = int(np.prod(self.out_lengths))
        n_in = int(np.prod(self.in_lengths))
        check_flat_size(max(n_out, n_in), "materialized Kronecker operator")
        total = sp.csr_matrix((n_out, n_in), dtype=complex)
        for c, fs in self.terms:
            K = fs[0]
            for F in fs[1:]:
                K = sp.kron(K, F, format="csr")
            total = total + c * K
        return sp.csr_matrix(total)

    def apply(self, v: TuckerVector) -> TuckerVector:
        if v.lengths != self.in_lengths:
            raise ValueError(f"vector lengths {v.lengths} != operator input {self.in_lengths}")
        if not self.terms:
            return TuckerVector.zeros(self.out_lengths, self.out_offsets)
        uniq: list[dict] = [dict() for _ in range(self.n)]
        for _, fs in self.terms:
            for j, F in enumerate(fs):
                uniq[j].setdefault(id(F), (len(uniq[j]), F))
        ranks = v.ranks
        bases = []
        for j in range(self.n):
            cols = [np.asarray(F @ v.bases[j]) for _, F in uniq[j].values()]
            bases.append(np.hstack(cols))
        core = np.zeros(tuple(len(u) * r for u, r in zip(uniq, ranks)), dtype=complex)
        for c, fs in self.terms:
            sl = tuple(slice(uniq[j][id(F)][0] * ranks[j], (uniq[j][id(F)][0] + 1) * ranks[j])
                       for j, F in enumerate(fs))
            core[sl] += c * v.core
        out = TuckerVector(core, bases, self.out_offsets, v.discarded * self.norm_bound)
        return out.maybe_compress()
