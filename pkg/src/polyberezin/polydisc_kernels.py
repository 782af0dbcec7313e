"""Szegő and Poisson kernels of the polydisc.

The normalized kernel k_xi has Taylor coefficients
``prod_j sqrt(1 - |xi_j|^2) * conj(xi_j)^{k_j}``, so its truncation to a box
is a rank-one tensor and the discarded mass has the closed form
``1 - prod_j (1 - |xi_j|^{2(M_j + 1)})``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .boxes import TruncationBox
from .fourier_symbols import DimensionMismatch, FourierSymbol
from .tucker import TuckerVector

BOUNDARY_GUARD = 1e-15


class BoundaryPointError(ValueError):
    """Raised for points on or outside the distinguished boundary."""


@dataclass(frozen=True)
class PolydiscPoint:
    coords: tuple[complex, ...]

    def __post_init__(self):
        coords = tuple(complex(c) for c in np.ravel(np.asarray(self.coords, dtype=complex)))
        if not coords:
            raise ValueError("empty point")
        for c in coords:
            if not abs(c) < 1.0 - BOUNDARY_GUARD:
                raise BoundaryPointError(f"|xi_j| = {abs(c)!r} is not inside the unit disc")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def radial(cls, r: float, zeta: TorusPoint) -> PolydiscPoint:
        return cls(tuple(r * z for z in zeta.coords))

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(np.asarray(self.coords))


@dataclass(frozen=True)
class TorusPoint:
    """Point of T^n stored by its angles, so |zeta_j| = 1 holds exactly."""

    angles: tuple[float, ...]

    def __post_init__(self):
        angles = tuple(float(a) % (2 * math.pi) for a in np.ravel(self.angles))
        if not angles:
            raise ValueError("empty torus point")
        object.__setattr__(self, "angles", angles)

    @classmethod
    def from_complex(cls, zs: Sequence[complex], tol: float = 1e-12) -> TorusPoint:
        zs = np.asarray(zs, dtype=complex).ravel()
        if np.any(np.abs(np.abs(zs) - 1) > tol):
            raise ValueError(f"{zs} not on the torus within {tol}")
        return cls(tuple(np.angle(zs)))

    @property
    def n(self) -> int:
        return len(self.angles)

    @property
    def coords(self) -> tuple[complex, ...]:
        return tuple(complex(math.cos(a), math.sin(a)) for a in self.angles)


def as_point(xi) -> PolydiscPoint:
    return xi if isinstance(xi, PolydiscPoint) else PolydiscPoint(tuple(np.ravel(xi)))


def tail_mass(xi, box: TruncationBox) -> float:
    """Exact squared norm of k_xi outside ``box``."""
    xi = as_point(xi)
    if xi.n != box.n:
        raise DimensionMismatch("point and box dimensions differ")
    log_keep = 0.0
    for r, m in zip(xi.moduli, box.dims):
        q = r ** (2 * (m + 1)) if r > 0 else 0.0
        log_keep += math.log1p(-q)
    return -math.expm1(log_keep)


@dataclass(frozen=True)
class KernelCoeffs:
    """Truncated normalized Szegő kernel.

    ``factors[j]`` holds the one-variable coefficients on axis j; the full
    coefficient tensor is their outer product.
    """

    point: PolydiscPoint
    box: TruncationBox
    factors: tuple[np.ndarray, ...]
    tail_mass: float

    @cached_property
    def coeffs(self) -> np.ndarray:
        """Dense flat coefficient vector in box order."""
        out = np.ones(1, dtype=complex)
        for f in self.factors:
            out = np.multiply.outer(out, f).ravel()
        return out

    @property
    def vector(self) -> TuckerVector:
        return TuckerVector.rank_one(self.factors)

    def norm_sq(self) -> float:
        return float(np.prod([np.vdot(f, f).real for f in self.factors]))


def _axis_coeffs(xi: complex, m: int) -> np.ndarray:
    r = abs(xi)
    k = np.arange(m + 1)
    if r == 0:
        out = np.zeros(m + 1, dtype=complex)
        out[0] = 1.0
        return out
    theta = math.atan2(xi.imag, xi.real)
    return math.sqrt(1 - r * r) * np.power(r, k) * np.exp(-1j * theta * k)


def szego_coeffs(xi, box: TruncationBox) -> KernelCoeffs:
    xi = as_point(xi)
    if xi.n != box.n:
        raise DimensionMismatch("point and box dimensions differ")
    factors = tuple(_axis_coeffs(c, m) for c, m in zip(xi.coords, box.dims))
    return KernelCoeffs(xi, box, factors, tail_mass(xi, box))


def choose_truncation(xi, eps: float) -> TruncationBox:
    """Smallest per-axis box with |xi_j|^{2(M_j+1)} <= eps/n, hence tail_mass <= eps."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    xi = as_point(xi)
    budget = eps / xi.n
    dims = []
    for r in xi.moduli:
        if r == 0:
            dims.append(0)
            continue
        m = max(0, math.ceil(math.log(budget) / (2 * math.log(r))) - 1)
        while r ** (2 * (m + 1)) > budget:
            m += 1
        while m > 0 and r ** (2 * m) <= budget:
            m -= 1
        dims.append(m)
    box = TruncationBox(tuple(dims))
    assert tail_mass(xi, box) <= eps
    return box


def poisson_kernel(xi, zeta: TorusPoint) -> float:
    xi = as_point(xi)
    if xi.n != zeta.n:
        raise DimensionMismatch("point dimensions differ")
    val = 1.0
    for x, z in zip(xi.coords, zeta.coords):
        val *= (1 - abs(x) ** 2) / abs(1 - x * z.conjugate()) ** 2
    return val


def _monomial_extension(k: Sequence[int], xi: Sequence[complex]) -> complex:
    val = 1.0 + 0j
    for kj, x in zip(k, xi):
        if kj >= 0:
            val *= x ** kj
        else:
            val *= x.conjugate() ** (-kj)
    return val


def poisson_extend(phi: FourierSymbol, xi) -> complex:
    """Harmonic extension: sum_k phi(k) prod_j r_j^|k_j| e^{i k_j theta_j}."""
    xi = as_point(xi)
    if xi.n != phi.dim:
        raise DimensionMismatch("point and symbol dimensions differ")
    return complex(sum(c * _monomial_extension(k, xi.coords) for k, c in phi.terms))
