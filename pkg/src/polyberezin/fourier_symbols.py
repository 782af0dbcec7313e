"""Trigonometric-polynomial symbols on the n-torus.

A symbol is a finite map from multi-indices in Z^n to complex Fourier
coefficients.  All arithmetic is exact up to floating-point roundoff;
coefficients whose magnitude falls below ``DROP_TOL`` are removed so that
the support stays finite and equality is testable.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

MultiIndex = tuple[int, ...]

DROP_TOL = 1e-15
EQ_TOL = 1e-12


class DimensionMismatch(ValueError):
    pass


def _canonical(items: Iterable[tuple[Sequence[int], complex]], dim: int) -> tuple:
    acc: dict[MultiIndex, complex] = {}
    for k, c in items:
        k = tuple(int(x) for x in k)
        if len(k) != dim:
            raise DimensionMismatch(f"multi-index {k} has length {len(k)}, expected {dim}")
        acc[k] = acc.get(k, 0j) + complex(c)
    return tuple(sorted((k, c) for k, c in acc.items() if abs(c) >= DROP_TOL))


@dataclass(frozen=True)
class FourierSymbol:
    """Sparse trigonometric polynomial ``sum_k c_k zeta^k`` on T^n.

    ``terms`` is kept sorted lexicographically by multi-index and never holds
    a coefficient of magnitude below ``DROP_TOL``.
    """

    dim: int
    terms: tuple[tuple[MultiIndex, complex], ...] = field(default=())

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("symbol dimension must be >= 1")
        object.__setattr__(self, "terms", _canonical(self.terms, self.dim))

    @classmethod
    def from_dict(cls, coeffs: Mapping[Sequence[int], complex], dim: int | None = None) -> FourierSymbol:
        if dim is None:
            if not coeffs:
                raise ValueError("dimension required for an empty symbol")
            dim = len(next(iter(coeffs)))
        return cls(dim, tuple(coeffs.items()))

    @classmethod
    def constant(cls, c: complex, dim: int) -> FourierSymbol:
        return cls(dim, (((0,) * dim, c),))

    @classmethod
    def monomial(cls, k: Sequence[int], c: complex = 1.0) -> FourierSymbol:
        return cls(len(k), ((tuple(k), c),))

    @cached_property
    def coeffs(self) -> dict[MultiIndex, complex]:
        return dict(self.terms)

    @property
    def support(self) -> list[MultiIndex]:
        return [k for k, _ in self.terms]

    def __getitem__(self, k: Sequence[int]) -> complex:
        return self.coeffs.get(tuple(k), 0j)

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> tuple[int, ...]:
        """Componentwise max of |k_j| over the support."""
        if not self.terms:
            return (0,) * self.dim
        return tuple(int(max(abs(k[j]) for k, _ in self.terms)) for j in range(self.dim))

    def positive_degree(self) -> tuple[int, ...]:
        return tuple(max([0] + [k[j] for k, _ in self.terms]) for j in range(self.dim))

    def negative_degree(self) -> tuple[int, ...]:
        return tuple(max([0] + [-k[j] for k, _ in self.terms]) for j in range(self.dim))

    def l1_norm(self) -> float:
        """Sum of coefficient magnitudes; an upper bound for the sup norm."""
        return float(sum(abs(c) for _, c in self.terms))

    def is_analytic(self) -> bool:
        return all(min(k) >= 0 for k, _ in self.terms)

    def allclose(self, other: FourierSymbol, atol: float = EQ_TOL) -> bool:
        _check_dims(self, other)
        diff = symbol_add(self, other, -1.0)
        return all(abs(c) <= atol for _, c in diff.terms)

    def __add__(self, other):
        if not isinstance(other, FourierSymbol):
            other = FourierSymbol.constant(other, self.dim)
        return symbol_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, FourierSymbol):
            other = FourierSymbol.constant(other, self.dim)
        return symbol_add(self, other, -1.0)

    def __neg__(self):
        return self.scale(-1.0)

    def __mul__(self, other):
        if isinstance(other, FourierSymbol):
            return symbol_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c: complex) -> FourierSymbol:
        return FourierSymbol(self.dim, tuple((k, c * v) for k, v in self.terms))

    def conj(self) -> FourierSymbol:
        return symbol_conj(self)

    def __call__(self, zeta) -> complex:
        return symbol_eval(self, zeta)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [{"k": list(k), "re": c.real, "im": c.imag} for k, c in self.terms],
        }

    @classmethod
    def from_json(cls, obj: Mapping | str) -> FourierSymbol:
        if isinstance(obj, str):
            obj = json.loads(obj)
        dim = int(obj["dim"])
        items = [(t["k"], complex(t.get("re", 0.0), t.get("im", 0.0))) for t in obj["terms"]]
        return cls(dim, tuple(items))

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {c:.6g}" for k, c in self.terms)
        return f"FourierSymbol(dim={self.dim}, {{{body}}})"


@dataclass(frozen=True)
class SignPattern:
    """Orthant selector: entry +1 keeps k_j >= 0, entry -1 keeps k_j < 0."""

    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        if not entries or any(e not in (-1, 1) for e in entries):
            raise ValueError(f"sign pattern entries must be +-1, got {self.entries}")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    def contains(self, k: Sequence[int]) -> bool:
        return all((kj >= 0) == (a == 1) for kj, a in zip(k, self.entries))

    @staticmethod
    def all_patterns(n: int) -> list[SignPattern]:
        return [SignPattern(p) for p in itertools.product((1, -1), repeat=n)]


def _check_dims(a: FourierSymbol, b: FourierSymbol):
    if a.dim != b.dim:
        raise DimensionMismatch(f"symbol dimensions differ: {a.dim} vs {b.dim}")


def symbol_add(a: FourierSymbol, b: FourierSymbol, scale: complex = 1.0) -> FourierSymbol:
    """Coefficients a(k) + scale * b(k)."""
    _check_dims(a, b)
    items = list(a.terms) + [(k, scale * c) for k, c in b.terms]
    return FourierSymbol(a.dim, tuple(items))


def symbol_mul(a: FourierSymbol, b: FourierSymbol) -> FourierSymbol:
    """Pointwise product on the torus, i.e. Fourier convolution."""
    _check_dims(a, b)
    acc: dict[MultiIndex, complex] = {}
    for ka, ca in a.terms:
        for kb, cb in b.terms:
            k = tuple(x + y for x, y in zip(ka, kb))
            acc[k] = acc.get(k, 0j) + ca * cb
    return FourierSymbol(a.dim, tuple(acc.items()))


def symbol_conj(a: FourierSymbol) -> FourierSymbol:
    """Complex conjugate on the torus: coefficient at k is conj(a(-k))."""
    return FourierSymbol(a.dim, tuple((tuple(-x for x in k), c.conjugate()) for k, c in a.terms))


def project_block(a: FourierSymbol, alpha: SignPattern | Sequence[int]) -> FourierSymbol:
    """Keep the coefficients whose index lies in the alpha-orthant."""
    if not isinstance(alpha, SignPattern):
        alpha = SignPattern(tuple(alpha))
    if len(alpha) != a.dim:
        raise DimensionMismatch(f"sign pattern length {len(alpha)} != symbol dim {a.dim}")
    return FourierSymbol(a.dim, tuple((k, c) for k, c in a.terms if alpha.contains(k)))


def analytic_part(a: FourierSymbol) -> FourierSymbol:
    return FourierSymbol(a.dim, tuple((k, c) for k, c in a.terms if min(k) >= 0))


def coanalytic_complement(a: FourierSymbol) -> FourierSymbol:
    """Projection onto the orthocomplement of H^2: indices with some k_j < 0."""
    return FourierSymbol(a.dim, tuple((k, c) for k, c in a.terms if min(k) < 0))


def _torus_angles(zeta, dim: int) -> np.ndarray:
    # local import keeps this module free of the kernel module at import time
    from .polydisc_kernels import TorusPoint

    if isinstance(zeta, TorusPoint):
        theta = np.asarray(zeta.angles, dtype=float)
    else:
        z = np.asarray(zeta, dtype=complex).ravel()
        if np.any(np.abs(np.abs(z) - 1.0) > 1e-12):
            raise ValueError(f"point {z} is not on the torus within 1e-12")
        theta = np.angle(z)
    if theta.size != dim:
        raise DimensionMismatch(f"torus point has {theta.size} coordinates, symbol dim is {dim}")
    return theta


def symbol_eval(a: FourierSymbol, zeta) -> complex:
    """Evaluate ``sum_k a(k) zeta^k`` at a torus point (TorusPoint or unimodular coords)."""
    theta = _torus_angles(zeta, a.dim)
    if not a.terms:
        return 0j
    ks = np.array([k for k, _ in a.terms], dtype=float)
    cs = np.array([c for _, c in a.terms], dtype=complex)
    return complex(np.sum(cs * np.exp(1j * (ks @ theta))))


def symbol_eval_grid(a: FourierSymbol, npts: int) -> np.ndarray:
    """Values on the uniform npts^n grid of the torus, via an inverse FFT.

    Used as an independent evaluation route; grid angles are 2*pi*m/npts.
    """
    deg = a.degree()
    if any(2 * d + 1 > npts for d in deg):
        raise ValueError("grid too coarse for symbol degree")
    grid = np.zeros((npts,) * a.dim, dtype=complex)
    for k, c in a.terms:
        grid[tuple(kj % npts for kj in k)] += c
    return np.fft.ifftn(grid) * npts ** a.dim


def random_symbol(
    rng: np.random.Generator,
    dim: int,
    degree: int,
    nterms: int = 4,
    analytic: bool = False,
) -> FourierSymbol:
    """Random trig polynomial with ``nterms`` support points in [-degree, degree]^dim.

    Coefficients are complex normal scaled so the L^2 norm is about one.
    """
    lo = 0 if analytic else -degree
    box = (degree - lo + 1) ** dim
    nterms = min(nterms, box)
    flat = rng.choice(box, size=nterms, replace=False)
    shape = (degree - lo + 1,) * dim
    items = []
    for f in flat:
        k = tuple(int(x) + lo for x in np.unravel_index(int(f), shape))
        c = (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2 * nterms)
        items.append((k, c))
    return FourierSymbol(dim, tuple(items))
