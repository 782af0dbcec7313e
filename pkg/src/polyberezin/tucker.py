"""Tucker-format vectors on tensor-product index rectangles.

Elements of H^2(D^n) (and of L^2(T^n) restricted to a finite rectangle) are
stored as ``core x_1 U_1 x_2 ... x_n U_n``.  Kernel vectors are rank one,
and Toeplitz-type operators act factor by factor, so the ranks stay small
even when each axis carries 10^4 - 10^5 coefficients.

``discarded`` accumulates the Frobenius norm of everything dropped during
rank truncation; it is a rigorous bound on the compression error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

COMPRESS_RTOL = 1e-15
AUTO_COMPRESS_COLS = 48


def mode_mul(core: np.ndarray, mat, axis: int) -> np.ndarray:
    """Multiply ``core`` along ``axis`` by ``mat`` (new index first in ``mat``)."""
    out = mat @ np.moveaxis(core, axis, 0).reshape(core.shape[axis], -1)
    rest = core.shape[:axis] + core.shape[axis + 1:]
    out = np.asarray(out).reshape((mat.shape[0],) + rest)
    return np.moveaxis(out, 0, axis)


@dataclass
class TuckerVector:
    core: np.ndarray
    bases: list[np.ndarray]
    offsets: tuple[int, ...] = field(default=None)
    discarded: float = 0.0

    def __post_init__(self):
        self.core = np.asarray(self.core, dtype=complex)
        if self.core.ndim != len(self.bases):
            raise ValueError("core order must equal number of bases")
        for j, U in enumerate(self.bases):
            if U.ndim != 2 or U.shape[1] != self.core.shape[j]:
                raise ValueError(f"basis {j} shape {U.shape} incompatible with core {self.core.shape}")
        if self.offsets is None:
            self.offsets = (0,) * len(self.bases)

    @classmethod
    def rank_one(cls, factors: Sequence[np.ndarray], coef: complex = 1.0, offsets=None) -> TuckerVector:
        bases = [np.asarray(f, dtype=complex).reshape(-1, 1) for f in factors]
        core = np.full((1,) * len(bases), coef, dtype=complex)
        return cls(core, bases, offsets)

    @classmethod
    def from_dense(cls, arr: np.ndarray, offsets=None) -> TuckerVector:
        arr = np.asarray(arr, dtype=complex)
        bases = [np.eye(s, dtype=complex) for s in arr.shape]
        return cls(arr.copy(), bases, offsets)

    @classmethod
    def zeros(cls, lengths: Sequence[int], offsets=None) -> TuckerVector:
        return cls(np.zeros((1,) * len(lengths), dtype=complex),
                   [np.zeros((int(n), 1), dtype=complex) for n in lengths], offsets)

    @property
    def n(self) -> int:
        return len(self.bases)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(U.shape[0] for U in self.bases)

    @property
    def ranks(self) -> tuple[int, ...]:
        return self.core.shape

    def to_dense(self) -> np.ndarray:
        t = self.core
        for j, U in enumerate(self.bases):
            t = mode_mul(t, U, j)
        return t

    def scaled(self, c: complex) -> TuckerVector:
        return TuckerVector(self.core * c, list(self.bases), self.offsets, abs(c) * self.discarded)

    def _check_compatible(self, other: TuckerVector):
        if self.lengths != other.lengths or tuple(self.offsets) != tuple(other.offsets):
            raise ValueError(f"incompatible index ranges {self.lengths}@{self.offsets} "
                             f"vs {other.lengths}@{other.offsets}")

    def inner(self, other: TuckerVector) -> complex:
        """<self, other>, linear in the first slot."""
        self._check_compatible(other)
        t = self.core
        for j, (U, V) in enumerate(zip(self.bases, other.bases)):
            G = U.T @ V.conj()
            t = mode_mul(t, G.T, j)
        return complex(np.sum(t * other.core.conj()))

    def orthonormalized(self) -> TuckerVector:
        core = self.core
        bases = []
        for j, U in enumerate(self.bases):
            Q, R = np.linalg.qr(U)
            core = mode_mul(core, R, j)
            bases.append(Q)
        return TuckerVector(core, bases, self.offsets, self.discarded)

    def norm(self) -> float:
        return float(np.linalg.norm(self.orthonormalized().core))

    def compress(self, rtol: float = COMPRESS_RTOL) -> TuckerVector:
        """Orthonormalize the bases and drop negligible multilinear singular directions."""
        v = self.orthonormalized()
        core, bases = v.core, v.bases
        scale = np.linalg.norm(core)
        dropped_sq = 0.0
        if scale > 0:
            for j in range(self.n):
                unfold = np.moveaxis(core, j, 0).reshape(core.shape[j], -1)
                W, s, _ = np.linalg.svd(unfold, full_matrices=False)
                keep = max(1, int(np.sum(s > rtol * scale)))
                dropped_sq += float(np.sum(s[keep:] ** 2))
                W = W[:, :keep]
                core = mode_mul(core, W.conj().T, j)
                bases[j] = bases[j] @ W
        return TuckerVector(core, bases, v.offsets, v.discarded + float(np.sqrt(dropped_sq)))

    def maybe_compress(self) -> TuckerVector:
        if max(self.ranks) > AUTO_COMPRESS_COLS:
            return self.compress()
        return self

    def combine(self, other: TuckerVector, a: complex = 1.0, b: complex = 1.0) -> TuckerVector:
        """a*self + b*other, with block-diagonal core."""
        self._check_compatible(other)
        ra, rb = self.ranks, other.ranks
        core = np.zeros(tuple(x + y for x, y in zip(ra, rb)), dtype=complex)
        core[tuple(slice(0, x) for x in ra)] = a * self.core
        core[tuple(slice(x, x + y) for x, y in zip(ra, rb))] = b * other.core
        bases = [np.hstack([U, V]) for U, V in zip(self.bases, other.bases)]
        out = TuckerVector(core, bases, self.offsets,
                           abs(a) * self.discarded + abs(b) * other.discarded)
        return out.maybe_compress()

    def __add__(self, other: TuckerVector) -> TuckerVector:
        return self.combine(other)

    def __sub__(self, other: TuckerVector) -> TuckerVector:
        return self.combine(other, 1.0, -1.0)
