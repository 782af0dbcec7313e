"""Truncated operators on H^2(D^n).

A :class:`HardyOperator` lives on a :class:`TruncationBox` and is stored as a
Kronecker sum of sparse per-axis factors, optionally plus a flat sparse
part for operators that do not factor.  Each operator carries per-axis
margins: columns ``e_j`` with ``j_axis <= M_axis - margin_axis`` are mapped
exactly as by the untruncated operator.  Operators built from symbols or
gallery formulas also keep a ``builder`` so they can be re-instantiated on
a larger box.
"""

from __future__ import annotations

import itertools
import json
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .boxes import TruncationBox
from .fourier_symbols import DimensionMismatch, FourierSymbol, symbol_conj, symbol_mul
from .kron import KronSum, shift_factor
from .limits import check_flat_size
from .polydisc_kernels import KernelCoeffs, as_point, choose_truncation, tail_mass
from .tucker import TuckerVector

DENSE_SVD_MAX = 1500
_REBUILD_CACHE = 4


class NotRebuildableError(ValueError):
    """The operator has no provenance that can produce it on another box."""


class BoxMismatch(ValueError):
    pass


def _symbol_label(phi: FourierSymbol) -> str:
    if len(phi.terms) <= 3:
        parts = []
        for k, c in phi.terms:
            parts.append(f"{c:.3g}*z^{list(k)}")
        return " + ".join(parts) or "0"
    return f"<{len(phi.terms)} terms, deg {phi.degree()}>"


@dataclass(frozen=True, eq=False)
class HardyOperator:
    box: TruncationBox
    kron: KronSum | None = None
    flat: sp.csr_matrix | None = None
    margins: tuple[int, ...] = None
    label: str = ""
    norm_bound: float = math.nan
    builder: Callable[[TruncationBox], "HardyOperator"] | None = field(default=None, repr=False)
    adjoint_margins: tuple[int, ...] | None = None

    def __post_init__(self):
        shape = self.box.shape
        if self.kron is None and self.flat is None:
            object.__setattr__(self, "kron", KronSum(shape, shape, ()))
        if self.kron is not None and (self.kron.in_lengths != shape or self.kron.out_lengths != shape):
            raise BoxMismatch("Kronecker part does not live on the box")
        if self.flat is not None:
            if self.flat.shape != (self.box.size, self.box.size):
                raise BoxMismatch("flat part does not live on the box")
            object.__setattr__(self, "flat", sp.csr_matrix(self.flat, dtype=complex))
        margins = self.margins if self.margins is not None else (0,) * self.box.n
        if len(margins) != self.box.n or any(d < 0 for d in margins):
            raise ValueError(f"bad margins {margins}")
        object.__setattr__(self, "margins", tuple(int(d) for d in margins))
        adj = self.adjoint_margins if self.adjoint_margins is not None else self.margins
        object.__setattr__(self, "adjoint_margins", tuple(int(d) for d in adj))
        if math.isnan(self.norm_bound):
            object.__setattr__(self, "norm_bound", self._structural_norm_bound())
        object.__setattr__(self, "_rebuilt", OrderedDict())
        object.__setattr__(self, "_lock", threading.Lock())

    def _structural_norm_bound(self) -> float:
        nb = self.kron.norm_bound if self.kron is not None else 0.0
        if self.flat is not None:
            nb += self.flat_opnorm()
        return nb

    def flat_opnorm(self) -> float:
        if self.flat is None or self.flat.nnz == 0:
            return 0.0
        return _largest_singular(self.flat)

    # ----------------------------------------------------------- geometry
    @property
    def n(self) -> int:
        return self.box.n

    @property
    def exact_window(self) -> tuple[int, ...]:
        """Per-axis margins, clamped to the box."""
        return tuple(min(d, m) for d, m in zip(self.margins, self.box.dims))

    def window_dims(self) -> tuple[int, ...]:
        """Last exact index per axis; -1 marks an empty window."""
        return tuple(max(m - d, -1) for m, d in zip(self.box.dims, self.margins))

    def window_tail(self, xi) -> float:
        w = self.window_dims()
        if any(m < 0 for m in w):
            return 1.0
        return tail_mass(xi, TruncationBox(w))

    # ----------------------------------------------------------- rebuilding
    @property
    def rebuildable(self) -> bool:
        return self.builder is not None

    def at(self, box: TruncationBox) -> HardyOperator:
        if box == self.box:
            return self
        if box.n != self.n:
            raise DimensionMismatch("box dimension differs from operator dimension")
        if self.builder is None:
            raise NotRebuildableError(f"operator {self.label!r} cannot be rebuilt on box {box.dims}")
        with self._lock:
            hit = self._rebuilt.get(box)
        if hit is not None:
            return hit
        op = self.builder(box)
        with self._lock:
            self._rebuilt[box] = op
            while len(self._rebuilt) > _REBUILD_CACHE:
                self._rebuilt.popitem(last=False)
        return op

    def fitted(self, xi, eps: float) -> HardyOperator:
        """This operator, or a rebuild, whose exact window leaves kernel tail <= eps at xi."""
        xi = as_point(xi)
        if self.window_tail(xi) <= eps:
            return self
        base = choose_truncation(xi, eps)
        box = base.union(self.box).enlarged(self.margins) if self.builder else base
        for _ in range(64):
            op = self.at(box)
            w = op.window_dims()
            deficit = [max(b - x, 0) for b, x in zip(base.dims, w)]
            if not any(deficit):
                return op
            box = box.enlarged([2 * d for d in deficit])
        raise RuntimeError(f"could not fit {self.label!r} to tail {eps} at {xi.coords}")

    # ----------------------------------------------------------- arithmetic
    def sparse(self) -> sp.csr_matrix:
        if "_sparse" not in self.__dict__:
            object.__setattr__(self, "_sparse", self._build_sparse())
        return self.__dict__["_sparse"]

    def _build_sparse(self) -> sp.csr_matrix:
        out = None
        if self.kron is not None:
            out = self.kron.to_sparse()
        if self.flat is not None:
            out = self.flat if out is None else out + self.flat
        return sp.csr_matrix(out)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense matrix, entry [k, j] = <A e_j, e_k> in flat box order."""
        check_flat_size(self.box.size ** 2, "dense operator matrix")
        return self.sparse().toarray()

    @cached_property
    def opnorm(self) -> float:
        """Largest singular value of the truncation (a lower bound on the true norm)."""
        if self.box.size <= DENSE_SVD_MAX:
            return float(np.linalg.norm(self.matrix, 2)) if self.box.size else 0.0
        return _largest_singular(self.sparse())

    def apply(self, v):
        """Apply to a TuckerVector (structured) or a flat/shaped ndarray."""
        if isinstance(v, TuckerVector):
            return self._apply_tucker(v)
        arr = np.asarray(v, dtype=complex)
        flat_in = arr.reshape(-1)
        if flat_in.size != self.box.size:
            raise BoxMismatch("vector length does not match box")
        return (self.sparse() @ flat_in).reshape(arr.shape)

    def _apply_tucker(self, v: TuckerVector) -> TuckerVector:
        out = None
        if self.kron is not None and self.kron.terms:
            out = self.kron.apply(v)
        if self.flat is not None:
            check_flat_size(self.box.size, "flat operator application")
            dense = self.flat @ v.to_dense().reshape(-1)
            w = TuckerVector.from_dense(dense.reshape(self.box.shape))
            w.discarded = v.discarded * self.norm_bound
            out = w if out is None else out + w
        if out is None:
            out = TuckerVector.zeros(self.box.shape)
        return out

    @property
    def H(self) -> HardyOperator:
        return adjoint(self)

    def __matmul__(self, other: HardyOperator) -> HardyOperator:
        return compose(self, other)

    def __add__(self, other: HardyOperator) -> HardyOperator:
        return add(self, other)

    def __sub__(self, other: HardyOperator) -> HardyOperator:
        return add(self, other, 1.0, -1.0)

    def __mul__(self, c: complex) -> HardyOperator:
        return scale(self, c)

    __rmul__ = __mul__

    def __neg__(self) -> HardyOperator:
        return scale(self, -1.0)

    # ----------------------------------------------------------- io
    def to_json(self) -> dict:
        m = self.matrix
        return {
            "box": list(self.box.dims),
            "label": self.label,
            "exact_window": list(self.exact_window),
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
        }

    @classmethod
    def from_json(cls, obj: dict) -> HardyOperator:
        box = TruncationBox(tuple(obj["box"]))
        mat = np.array([[complex(re, im) for re, im in row] for row in obj["matrix"]], dtype=complex)
        return from_matrix(mat, box, margins=obj.get("exact_window"), label=obj.get("label", ""))


def dump_operator(a: HardyOperator, path) -> None:
    with open(path, "w") as fh:
        json.dump(a.to_json(), fh)


def load_operator(path) -> HardyOperator:
    with open(path) as fh:
        return HardyOperator.from_json(json.load(fh))


def _largest_singular(M) -> float:
    if min(M.shape) <= DENSE_SVD_MAX:
        return float(np.linalg.norm(M.toarray() if sp.issparse(M) else M, 2))
    s = spla.svds(sp.csr_matrix(M), k=1, return_singular_vectors=False, tol=1e-10)
    return float(s[0])


def _check_dims(phi: FourierSymbol, box: TruncationBox):
    if phi.dim != box.n:
        raise DimensionMismatch(f"symbol dim {phi.dim} != box dim {box.n}")


# ------------------------------------------------------------------ builders
def identity(box: TruncationBox) -> HardyOperator:
    factors = tuple(sp.identity(s, dtype=complex, format="csr") for s in box.shape)
    return HardyOperator(box, KronSum(box.shape, box.shape, ((1.0, factors),)),
                         label="I", norm_bound=1.0, builder=identity)


def symbol_kron(phi: FourierSymbol, box: TruncationBox) -> KronSum:
    """Compression of multiplication by phi to the box (entries phi(k - j))."""
    shape = box.shape
    terms = []
    for k, c in phi.terms:
        terms.append((c, tuple(shift_factor(m, s, s) for m, s in zip(k, shape))))
    return KronSum(shape, shape, tuple(terms))


def toeplitz(phi: FourierSymbol, box: TruncationBox) -> HardyOperator:
    _check_dims(phi, box)
    return HardyOperator(box, symbol_kron(phi, box), margins=phi.degree(),
                         label=f"T[{_symbol_label(phi)}]", norm_bound=phi.l1_norm(),
                         builder=lambda b: toeplitz(phi, b))


def multiplication(phi: FourierSymbol, box: TruncationBox, positive_only: bool = False) -> KronSum:
    """Multiplication by phi from the box into the rectangle prod [-D_j, M_j + U_j].

    D_j and U_j are the negative and positive degrees of phi; the output
    offsets record -D_j.  With ``positive_only`` targets with some negative
    index component are dropped on the corresponding axis factor.
    """
    _check_dims(phi, box)
    lo = tuple(-d for d in phi.negative_degree())
    hi = tuple(m + u for m, u in zip(box.dims, phi.positive_degree()))
    out_len = tuple(h - l + 1 for l, h in zip(lo, hi))
    terms = []
    for k, c in phi.terms:
        terms.append((c, tuple(shift_factor(m, s, o, l, positive_only)
                               for m, s, o, l in zip(k, box.shape, out_len, lo))))
    return KronSum(box.shape, out_len, tuple(terms), None, lo)


@dataclass(frozen=True, eq=False)
class HankelBlock:
    """P_perp(phi .) on the in-box columns, exact for every in-box column.

    ``kron`` maps the box into the rectangle prod [-D_j, M_j + U_j]; rows
    of that rectangle inside Z_+^n are identically zero.  ``out_indices``
    lists the rows outside Z_+^n that can be reached, lexicographically.
    """

    symbol: FourierSymbol
    in_box: TruncationBox
    kron: KronSum
    exact: bool = True

    @property
    def lo(self) -> tuple[int, ...]:
        return self.kron.out_offsets

    @property
    def rect_shape(self) -> tuple[int, ...]:
        return self.kron.out_lengths

    @cached_property
    def out_indices(self) -> list[tuple[int, ...]]:
        reach = set()
        supp = [k for k, _ in self.symbol.terms if any(kj < 0 for kj in k)]
        check_flat_size(len(supp) * self.in_box.size, "Hankel out-index enumeration")
        idx = self.in_box.indices()
        for k in supp:
            shifted = idx + np.asarray(k)
            neg = np.any(shifted < 0, axis=1)
            reach.update(map(tuple, shifted[neg].tolist()))
        return sorted(reach)

    @cached_property
    def matrix(self) -> np.ndarray:
        rows = self.out_indices
        check_flat_size(len(rows) * self.in_box.size, "dense Hankel block")
        coeffs = self.symbol.coeffs
        out = np.zeros((len(rows), self.in_box.size), dtype=complex)
        row_of = {l: i for i, l in enumerate(rows)}
        idx = self.in_box.indices()
        for k, c in coeffs.items():
            shifted = idx + np.asarray(k)
            for col, l in enumerate(map(tuple, shifted.tolist())):
                i = row_of.get(l)
                if i is not None:
                    out[i, col] += c
        return out

    def apply(self, v) -> TuckerVector:
        if not isinstance(v, TuckerVector):
            v = TuckerVector.from_dense(np.asarray(v, dtype=complex).reshape(self.in_box.shape))
        return self.kron.apply(v)

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.matrix, axis=0)


def hankel(phi: FourierSymbol, in_box: TruncationBox) -> HankelBlock:
    full = multiplication(phi, in_box)
    pos = multiplication(phi, in_box, positive_only=True)
    # the negative-index part of phi * v is (prod of full factors) - (prod of positive parts)
    return HankelBlock(phi, in_box, full.plus(pos, 1.0, -1.0))


# ------------------------------------------------------------------ algebra
def _same_box(a: HardyOperator, b: HardyOperator):
    if a.box != b.box:
        raise BoxMismatch(f"boxes differ: {a.box.dims} vs {b.box.dims}")


def compose(a: HardyOperator, b: HardyOperator) -> HardyOperator:
    """a @ b with margins added."""
    _same_box(a, b)
    kron, flat = None, None
    if a.flat is None and b.flat is None:
        kron = a.kron.compose(b.kron)
    else:
        check_flat_size(a.box.size, "flat composition")
        flat = a.sparse() @ b.sparse()
    builder = None
    if a.builder and b.builder:
        builder = lambda box: compose(a.at(box), b.at(box))
    return HardyOperator(a.box, kron, flat, tuple(x + y for x, y in zip(a.margins, b.margins)),
                         label=f"({a.label})({b.label})", norm_bound=a.norm_bound * b.norm_bound,
                         builder=builder,
                         adjoint_margins=tuple(x + y for x, y in zip(a.adjoint_margins, b.adjoint_margins)))


def adjoint(a: HardyOperator) -> HardyOperator:
    kron = a.kron.adjoint() if a.kron is not None else None
    flat = sp.csr_matrix(a.flat.conj().T) if a.flat is not None else None
    builder = (lambda box: adjoint(a.at(box))) if a.builder else None
    return HardyOperator(a.box, kron, flat, a.adjoint_margins, label=f"({a.label})*",
                         norm_bound=a.norm_bound, builder=builder, adjoint_margins=a.margins)


def add(a: HardyOperator, b: HardyOperator, alpha: complex = 1.0, beta: complex = 1.0) -> HardyOperator:
    """alpha*a + beta*b; margins take the per-axis maximum."""
    _same_box(a, b)
    kron = None
    if a.kron is not None and b.kron is not None:
        kron = a.kron.plus(b.kron, alpha, beta)
    elif a.kron is not None:
        kron = a.kron.scaled(alpha)
    elif b.kron is not None:
        kron = b.kron.scaled(beta)
    flats = [alpha * a.flat if a.flat is not None else None, beta * b.flat if b.flat is not None else None]
    flats = [f for f in flats if f is not None]
    flat = sum(flats[1:], flats[0]) if flats else None
    builder = None
    if a.builder and b.builder:
        builder = lambda box: add(a.at(box), b.at(box), alpha, beta)
    sign = "+" if beta == 1 else f"+({beta})"
    return HardyOperator(a.box, kron, flat, tuple(max(x, y) for x, y in zip(a.margins, b.margins)),
                         label=f"{a.label} {sign} {b.label}",
                         norm_bound=abs(alpha) * a.norm_bound + abs(beta) * b.norm_bound,
                         builder=builder,
                         adjoint_margins=tuple(max(x, y) for x, y in zip(a.adjoint_margins, b.adjoint_margins)))


def scale(a: HardyOperator, c: complex) -> HardyOperator:
    kron = a.kron.scaled(c) if a.kron is not None else None
    flat = c * a.flat if a.flat is not None else None
    builder = (lambda box: scale(a.at(box), c)) if a.builder else None
    return HardyOperator(a.box, kron, flat, a.margins, label=f"{c}*{a.label}",
                         norm_bound=abs(c) * a.norm_bound, builder=builder,
                         adjoint_margins=a.adjoint_margins)


def semicommutator(phi: FourierSymbol, psi: FourierSymbol, box: TruncationBox) -> HardyOperator:
    """T_{phi psi} - T_phi T_psi."""
    _check_dims(phi, box)
    _check_dims(psi, box)
    out = add(toeplitz(symbol_mul(phi, psi), box), compose(toeplitz(phi, box), toeplitz(psi, box)), 1.0, -1.0)
    margins = tuple(x + y for x, y in zip(phi.degree(), psi.degree()))
    return HardyOperator(box, out.kron, None, margins,
                         label=f"[T({_symbol_label(phi)}), T({_symbol_label(psi)}))",
                         norm_bound=out.norm_bound, builder=lambda b: semicommutator(phi, psi, b))


def semicommutator_via_hankel(phi: FourierSymbol, psi: FourierSymbol, box: TruncationBox) -> np.ndarray:
    """Dense H_{conj phi}^* H_psi over the box, from exact Hankel blocks."""
    h1 = hankel(symbol_conj(phi), box)
    h2 = hankel(psi, box)
    rows = sorted(set(h1.out_indices) | set(h2.out_indices))
    return _hankel_rows(h1, rows).conj().T @ _hankel_rows(h2, rows)


def _hankel_rows(h: HankelBlock, rows) -> np.ndarray:
    out = np.zeros((len(rows), h.in_box.size), dtype=complex)
    pos = {l: i for i, l in enumerate(h.out_indices)}
    m = h.matrix
    for i, l in enumerate(rows):
        if l in pos:
            out[i] = m[pos[l]]
    return out


def diagonal_projection(mask_axes: Sequence[np.ndarray], box: TruncationBox, label: str = "P") -> HardyOperator:
    """Tensor product of per-axis 0/1 diagonals (separable subspace)."""
    factors = tuple(sp.diags(np.asarray(m, dtype=complex), format="csr") for m in mask_axes)
    for f, s in zip(factors, box.shape):
        if f.shape != (s, s):
            raise BoxMismatch("mask length does not match box")
    return HardyOperator(box, KronSum(box.shape, box.shape, ((1.0, factors),)), label=label,
                         norm_bound=1.0 if any(f.nnz for f in factors) else 0.0)


def project_subspace(predicate: Callable, box: TruncationBox, label: str = "P",
                     vectorized: bool = False) -> HardyOperator:
    """Diagonal projection onto span{e_k : predicate(k)}; truncates exactly.

    With ``vectorized`` the predicate receives the (size, n) index array and
    returns a boolean mask.
    """
    if vectorized:
        check_flat_size(box.size, "projection diagonal")
        mask = np.asarray(predicate(box.indices()), dtype=bool).reshape(box.size)
    elif box.n == 1:
        mask = np.array([bool(predicate((k,))) for k in range(box.shape[0])], dtype=bool)
    else:
        check_flat_size(box.size, "projection diagonal")
        mask = np.fromiter((bool(predicate(k)) for k in box), dtype=bool, count=box.size)
    diag = sp.diags(mask.astype(complex), format="csr")
    if box.n == 1:
        kron, flat = KronSum(box.shape, box.shape, ((1.0, (diag,)),)), None
    else:
        kron, flat = None, diag
    return HardyOperator(box, kron, flat, label=label, norm_bound=1.0 if mask.any() else 0.0,
                         builder=lambda b: project_subspace(predicate, b, label, vectorized))


def tensor_product(ops: Sequence[HardyOperator]) -> HardyOperator:
    """Kronecker product of one-variable operators, one per axis."""
    if any(op.n != 1 or op.flat is not None for op in ops):
        raise ValueError("tensor_product expects one-variable Kronecker operators")
    box = TruncationBox(tuple(op.box.dims[0] for op in ops))
    terms = []
    for combo in itertools.product(*(op.kron.terms for op in ops)):
        c = np.prod([t[0] for t in combo])
        terms.append((c, tuple(t[1][0] for t in combo)))
    builder = None
    if all(op.builder for op in ops):
        builder = lambda b: tensor_product([op.at(TruncationBox((m,))) for op, m in zip(ops, b.dims)])
    return HardyOperator(box, KronSum(box.shape, box.shape, tuple(terms)),
                         margins=tuple(op.margins[0] for op in ops),
                         label=" (x) ".join(op.label for op in ops),
                         norm_bound=float(np.prod([op.norm_bound for op in ops])), builder=builder,
                         adjoint_margins=tuple(op.adjoint_margins[0] for op in ops))


def from_matrix(mat, box: TruncationBox, margins=None, label: str = "raw",
                norm_bound: float | None = None) -> HardyOperator:
    """Wrap an explicit matrix over the box; it has no rebuild provenance.

    The matrix is taken as a finite-rank operator on span{e_k : k in box}, so
    its own largest singular value is its norm.
    """
    M = sp.csr_matrix(mat, dtype=complex)
    if M.shape != (box.size, box.size):
        raise BoxMismatch(f"matrix shape {M.shape} does not match box size {box.size}")
    if box.n == 1:
        kron, flat = KronSum(box.shape, box.shape, ((1.0, (M,)),)), None
    else:
        kron, flat = None, M
    nb = _largest_singular(M) if norm_bound is None else norm_bound
    return HardyOperator(box, kron, flat, tuple(margins) if margins is not None else None,
                         label=label, norm_bound=nb)


# ------------------------------------------------------------------ kernels
def window_kernel(k: KernelCoeffs, a: HardyOperator) -> TuckerVector:
    """k_xi truncated to the exact window of ``a`` (zero elsewhere in the box)."""
    w = a.window_dims()
    factors = []
    for f, m in zip(k.factors, w):
        g = np.array(f, dtype=complex)
        g[m + 1:] = 0.0
        factors.append(g)
    return TuckerVector.rank_one(factors)


def apply_to_kernel(a: HardyOperator, k: KernelCoeffs) -> tuple[TuckerVector, float]:
    """A k_xi^trunc with a bound on its distance to the untruncated A k_xi."""
    if k.box != a.box:
        raise BoxMismatch(f"kernel box {k.box.dims} != operator box {a.box.dims}")
    v = a.apply(k.vector)
    tw = a.window_tail(k.point)
    bound = a.norm_bound * (math.sqrt(tw) + math.sqrt(max(tw - k.tail_mass, 0.0))) + v.discarded
    return v, bound
