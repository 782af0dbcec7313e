"""Named operators with closed-form Berezin data.

These are the cross-validation corpus: each entry can be evaluated by the
matrix route and, where a formula is known, in closed form.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .boxes import TruncationBox
from .hardy_operators import (HardyOperator, adjoint, compose, identity, project_subspace,
                              tensor_product)
from .kron import KronSum
from .polydisc_kernels import as_point, tail_mass


class GalleryError(ValueError):
    pass


def _require_1d(box: TruncationBox, what: str):
    if box.n != 1:
        raise GalleryError(f"{what} is defined on one variable, got n={box.n}")


# ------------------------------------------------------------------ lacunary isometry z^k -> z^{2k+1}
def lacunary_isometry(box: TruncationBox, min_column: int = 0) -> HardyOperator:
    """Truncation of T z^k = z^{2k+1}; columns k <= (M-1)/2 are exact."""
    _require_1d(box, "lacunary isometry")
    M = box.dims[0]
    if M < 2 * min_column + 1:
        raise GalleryError(f"box M={M} too small: need M >= {2 * min_column + 1} for column {min_column}")
    cols = np.arange((M - 1) // 2 + 1)
    F = sp.csr_matrix((np.ones(len(cols), dtype=complex), (2 * cols + 1, cols)), shape=(M + 1, M + 1))
    margin = M - (M - 1) // 2
    return HardyOperator(box, KronSum(box.shape, box.shape, ((1.0, (F,)),)), margins=(margin,),
                         label="T_lac", norm_bound=1.0, builder=lacunary_isometry, adjoint_margins=(0,))


def self_commutator(t: HardyOperator) -> HardyOperator:
    """[T*, T] = T*T - TT*."""
    return compose(adjoint(t), t) - compose(t, adjoint(t))


def lacunary_commutator(box: TruncationBox) -> HardyOperator:
    return self_commutator(lacunary_isometry(box))


def lacunary_commutator_berezin(xi) -> float:
    """Closed form 1 / (1 + |xi|^2) of the Berezin transform of [T*, T]."""
    xi = as_point(xi)
    r = abs(xi.coords[0])
    return 1.0 / (1.0 + r * r)


# ------------------------------------------------------------------ tensor power S = T (x) ... (x) T
def tensor_isometry(box: TruncationBox) -> HardyOperator:
    return tensor_product([lacunary_isometry(TruncationBox((m,))) for m in box.dims])


def tensor_commutator(box: TruncationBox) -> HardyOperator:
    return self_commutator(tensor_isometry(box))


def tensor_commutator_berezin(xi) -> float:
    """1 - prod_j |xi_j|^2 / (1 + |xi_j|^2): k_xi mass on the span of z^k with some k_j even."""
    xi = as_point(xi)
    prod = 1.0
    for r in xi.moduli:
        prod *= r * r / (1 + r * r)
    return 1.0 - prod


def tensor_commutator_lower_bound(n: int) -> float:
    return 2.0 ** -n


def some_even_projection(box: TruncationBox) -> HardyOperator:
    return project_subspace(lambda idx: np.any(idx % 2 == 0, axis=1), box, label="P[some k_j even]",
                            vectorized=True)


# ------------------------------------------------------------------ dyadic projection
def _is_dyadic(k: int) -> bool:
    return k >= 1 and (k & (k - 1)) == 0


def dyadic_projection(box: TruncationBox) -> HardyOperator:
    """Projection onto the closed span of z^{2^m}, m >= 0."""
    _require_1d(box, "dyadic projection")
    return project_subspace(lambda k: _is_dyadic(k[0]), box, label="P_dyadic")


def dyadic_kernel_norm_sq(xi, M: int) -> tuple[float, float]:
    """Partial sum (1 - r^2) sum_{2^m <= M} r^{2 2^m} and a bound on the missing terms."""
    r = abs(as_point(xi).coords[0])
    s = 0.0
    p = 1
    while p <= M:
        s += r ** (2 * p)
        p *= 2
    return (1 - r * r) * s, tail_mass(xi, TruncationBox((M,)))


def dyadic_kernel_norm_sq_series(xi, terms: int = 4096) -> float:
    """The full series (1 - r^2) sum_m r^{2 2^m}, summed until terms underflow."""
    r = abs(as_point(xi).coords[0])
    s, m = 0.0, 0
    while m < terms:
        term = r ** (2 * 2 ** m) if 2 * 2 ** m < 1e308 else 0.0
        if term < 1e-300:
            break
        s += term
        m += 1
    return (1 - r * r) * s


def tensor_with_identity(a: HardyOperator, n: int, slot: int, box: TruncationBox | None = None) -> HardyOperator:
    """A acting on axis ``slot`` (1-based) and the identity on the other n - 1 axes."""
    if a.n != 1 or a.flat is not None:
        raise GalleryError("tensor_with_identity expects a one-variable Kronecker operator")
    if not 1 <= slot <= n:
        raise GalleryError(f"slot {slot} outside 1..{n}")
    if box is None:
        box = TruncationBox(tuple(a.box.dims[0] if j == slot - 1 else 0 for j in range(n)))
    if box.n != n:
        raise GalleryError("box dimension differs from n")
    if box.dims[slot - 1] != a.box.dims[0]:
        raise GalleryError(f"box axis {slot} has M={box.dims[slot - 1]}, operator has M={a.box.dims[0]}")
    parts = []
    for j, m in enumerate(box.dims):
        parts.append(a if j == slot - 1 else identity(TruncationBox((m,))))
    out = tensor_product(parts)
    builder = None
    if a.builder:
        builder = lambda b: tensor_with_identity(a.at(TruncationBox((b.dims[slot - 1],))), n, slot, b)
    return HardyOperator(out.box, out.kron, None, out.margins, label=f"{a.label}@{slot}/{n}",
                         norm_bound=a.norm_bound, builder=builder, adjoint_margins=out.adjoint_margins)


# ------------------------------------------------------------------ registry
@dataclass(frozen=True)
class GalleryOperator:
    id: str
    n: int
    builder: Callable[[TruncationBox], HardyOperator]
    closed_berezin: Callable | None
    label: str
    statement: str

    def build(self, box: TruncationBox | None = None) -> HardyOperator:
        return self.builder(box or TruncationBox.cube(7, self.n))


def _entries(n: int) -> dict[str, GalleryOperator]:
    return {
        "lacunary-isometry": GalleryOperator(
            "lacunary-isometry", 1, lacunary_isometry, None, "T z^k = z^(2k+1)",
            "isometry on H^2(D) with non-vanishing self-commutator transform"),
        "lacunary-commutator": GalleryOperator(
            "lacunary-commutator", 1, lacunary_commutator, lacunary_commutator_berezin, "[T*, T]",
            "projection onto even powers; Berezin 1/(1+|xi|^2) tends to 1/2"),
        "tensor-isometry": GalleryOperator(
            "tensor-isometry", n, tensor_isometry, None, f"T^(x{n})", "n-fold tensor power of T"),
        "tensor-commutator": GalleryOperator(
            "tensor-commutator", n, tensor_commutator, tensor_commutator_berezin, f"[S*, S], n={n}",
            "Berezin bounded below by 2^-n"),
        "dyadic-projection": GalleryOperator(
            "dyadic-projection", 1, dyadic_projection, None, "P onto span z^(2^m)",
            "||P k_xi|| tends to 0 radially although P is not Toeplitz"),
        "dyadic-tensor": GalleryOperator(
            "dyadic-tensor", n,
            lambda box: tensor_with_identity(dyadic_projection(TruncationBox((box.dims[0],))), box.n, 1, box),
            None, f"P (x) I^(n-1), n={n}", "||A k_xi|| = ||P k_xi1||"),
        "identity": GalleryOperator(
            "identity", n, identity, lambda xi: 1.0, "I", "identity"),
    }


GALLERY_IDS = tuple(_entries(1))
_ID_RE = re.compile(r"^([a-z-]+)(?::n=(\d+))?$")


def get_gallery(spec: str) -> GalleryOperator:
    """Look up an entry such as "dyadic-projection" or "tensor-commutator:n=2"."""
    m = _ID_RE.match(spec.strip())
    if not m:
        raise GalleryError(f"malformed gallery id {spec!r}")
    name, n = m.group(1), int(m.group(2) or 1)
    if n < 1:
        raise GalleryError("n must be positive")
    entries = _entries(n)
    if name not in entries:
        raise GalleryError(f"unknown gallery id {name!r}; known: {', '.join(GALLERY_IDS)}")
    entry = entries[name]
    if entry.n == 1 and n != 1:
        raise GalleryError(f"{name} is one-variable")
    return entry
