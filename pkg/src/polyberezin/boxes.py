"""Finite multi-index windows [0, M_1] x ... x [0, M_n] on the Hardy basis."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np


@dataclass(frozen=True)
class TruncationBox:
    """Window of analytic multi-indices, enumerated lexicographically.

    Flat index of ``k`` is its C-order position in an array of shape
    ``(M_1 + 1, ..., M_n + 1)``, which matches ``scipy.sparse.kron`` ordering.
    """

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(m) for m in self.dims)
        if not dims or any(m < 0 for m in dims):
            raise ValueError(f"box dims must be non-negative, got {self.dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def cube(cls, m: int, n: int) -> TruncationBox:
        return cls((m,) * n)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(m + 1 for m in self.dims)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64))

    def flat_index(self, k: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(k), self.shape))

    def multi_index(self, i: int) -> tuple[int, ...]:
        return tuple(int(x) for x in np.unravel_index(i, self.shape))

    def __contains__(self, k) -> bool:
        return len(k) == self.n and all(0 <= kj <= m for kj, m in zip(k, self.dims))

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(np.ndindex(*self.shape))

    def indices(self) -> np.ndarray:
        """All multi-indices as an (size, n) integer array in flat order."""
        grids = np.indices(self.shape).reshape(self.n, -1)
        return grids.T.copy()

    def covers(self, other: TruncationBox) -> bool:
        return self.n == other.n and all(a >= b for a, b in zip(self.dims, other.dims))

    def enlarged(self, extra: Sequence[int]) -> TruncationBox:
        return TruncationBox(tuple(m + int(e) for m, e in zip(self.dims, extra)))

    def union(self, other: TruncationBox) -> TruncationBox:
        return TruncationBox(tuple(max(a, b) for a, b in zip(self.dims, other.dims)))
