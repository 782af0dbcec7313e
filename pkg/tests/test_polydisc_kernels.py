import math

import mpmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyberezin.boxes import TruncationBox
from polyberezin.fourier_symbols import FourierSymbol, random_symbol, symbol_conj, symbol_eval
from polyberezin.polydisc_kernels import (BoundaryPointError, PolydiscPoint, TorusPoint, choose_truncation,
                                          poisson_extend, poisson_kernel, szego_coeffs, tail_mass)

from conftest import points, symbols

S = FourierSymbol.from_dict


def test_kernel_at_origin():
    k = szego_coeffs(PolydiscPoint((0j, 0j)), TruncationBox((3, 2)))
    expect = np.zeros(12)
    expect[0] = 1
    assert np.allclose(k.coeffs, expect)
    assert k.tail_mass == 0.0


def test_kernel_by_hand():
    k = szego_coeffs(PolydiscPoint((0.5,)), TruncationBox((1,)))
    assert np.allclose(k.coeffs, [math.sqrt(0.75), math.sqrt(0.75) * 0.5])
    assert k.tail_mass == pytest.approx(0.0625, abs=1e-16)


def test_kernel_conjugates_the_point():
    xi = 0.3 + 0.4j
    k = szego_coeffs(PolydiscPoint((xi,)), TruncationBox((3,)))
    assert np.allclose(k.coeffs, math.sqrt(1 - abs(xi) ** 2) * np.conj(xi) ** np.arange(4))


@given(points(2, 0.98), st.integers(0, 30), st.integers(0, 30))
def test_kernel_normalization_and_tail_formula(xi, m1, m2):
    box = TruncationBox((m1, m2))
    k = szego_coeffs(xi, box)
    assert np.vdot(k.coeffs, k.coeffs).real + k.tail_mass == pytest.approx(1.0, abs=1e-13)
    # high-precision oracle for the closed form (direct float evaluation cancels)
    with mpmath.workdps(40):
        log_keep = mpmath.fsum(mpmath.log1p(-mpmath.mpf(abs(x)) ** (2 * (m + 1)))
                               for x, m in zip(xi.coords, box.dims))
        exact = float(-mpmath.expm1(log_keep))
    assert k.tail_mass == pytest.approx(exact, rel=1e-13, abs=1e-300)


def test_boundary_points_rejected():
    with pytest.raises(BoundaryPointError):
        PolydiscPoint((1.0,))
    with pytest.raises(BoundaryPointError):
        PolydiscPoint((0.3, 1 - 1e-16))


def test_choose_truncation_examples():
    assert choose_truncation(PolydiscPoint((0j, 0j)), 1e-3).dims == (0, 0)
    box = choose_truncation(PolydiscPoint((0.9,)), 1e-6)
    assert box.dims == (65,)
    assert 0.9 ** (2 * 66) <= 1e-6 < 0.9 ** (2 * 65)
    with pytest.raises(ValueError):
        choose_truncation(PolydiscPoint((0.5,)), 0.0)


@given(points(3, 0.999), st.floats(1e-14, 0.5))
def test_choose_truncation_postcondition_and_minimality(xi, eps):
    box = choose_truncation(xi, eps)
    assert tail_mass(xi, box) <= eps
    budget = eps / 3
    for j, (r, m) in enumerate(zip(xi.moduli, box.dims)):
        if m > 0:
            # one fewer on this axis breaks the per-axis budget
            assert r ** (2 * m) > budget


def test_poisson_kernel_examples():
    z = TorusPoint((0.4, 2.0))
    assert poisson_kernel(PolydiscPoint((0j, 0j)), z) == pytest.approx(1.0)
    r = 0.6
    assert poisson_kernel(PolydiscPoint((r,)), TorusPoint((0.0,))) == pytest.approx((1 + r) / (1 - r))


@given(points(2, 0.8), st.lists(st.floats(0, 6.28), min_size=2, max_size=2))
def test_poisson_kernel_is_kernel_modulus_squared(xi, angles):
    z = TorusPoint(tuple(angles))
    k = szego_coeffs(xi, choose_truncation(xi, 1e-15))
    grid = np.multiply.outer(z.coords[0] ** np.arange(k.box.shape[0]), z.coords[1] ** np.arange(k.box.shape[1]))
    val = abs(np.sum(k.coeffs.reshape(k.box.shape) * grid)) ** 2
    assert poisson_kernel(xi, z) > 0
    assert val == pytest.approx(poisson_kernel(xi, z), rel=1e-6)


def test_poisson_extend_examples():
    xi = PolydiscPoint((0.3 + 0.2j, -0.5j))
    assert poisson_extend(FourierSymbol.constant(2.5, 2), xi) == pytest.approx(2.5)
    assert poisson_extend(S({(1, 0): 1}), xi) == pytest.approx(xi.coords[0])
    assert poisson_extend(S({(-1, 1): 1}), xi) == pytest.approx(np.conj(xi.coords[0]) * xi.coords[1])


def _quadrature(phi, xi, npts=256):
    th = 2 * math.pi * np.arange(npts) / npts
    grids = np.meshgrid(*[th] * phi.dim, indexing="ij")
    vals = np.zeros(grids[0].shape, dtype=complex)
    for k, c in phi.terms:
        vals += c * np.exp(1j * sum(kj * g for kj, g in zip(k, grids)))
    P = np.ones(grids[0].shape)
    for x, g in zip(xi.coords, grids):
        P *= (1 - abs(x) ** 2) / np.abs(1 - x * np.exp(-1j * g)) ** 2
    return np.mean(P * vals)


def test_poisson_extend_matches_quadrature(rng):
    for n in (1, 2):
        for _ in range(5):
            phi = random_symbol(rng, n, 3)
            r = 0.9 * np.sqrt(rng.uniform(size=n))
            xi = PolydiscPoint(tuple(r * np.exp(2j * np.pi * rng.uniform(size=n))))
            assert abs(poisson_extend(phi, xi) - _quadrature(phi, xi)) <= 1e-8


@given(symbols(dim=2), symbols(dim=2), points(2), st.complex_numbers(max_magnitude=2))
def test_poisson_extend_linear_and_real(a, b, xi, c):
    lhs = poisson_extend(a + b.scale(c), xi)
    assert lhs == pytest.approx(poisson_extend(a, xi) + c * poisson_extend(b, xi), abs=1e-10)
    assert poisson_extend(symbol_conj(a), xi) == pytest.approx(np.conj(poisson_extend(a, xi)), abs=1e-12)


@given(symbols(dim=2, analytic=True), points(2))
def test_poisson_extend_holomorphic_for_analytic(phi, xi):
    direct = sum(c * xi.coords[0] ** k[0] * xi.coords[1] ** k[1] for k, c in phi.terms)
    assert poisson_extend(phi, xi) == pytest.approx(direct, abs=1e-12)


def test_radial_limit_rate(rng):
    # |phi~(r zeta) - phi(zeta)| <= sum |c| |k|_1 (1 - r)
    for _ in range(10):
        n = int(rng.integers(1, 4))
        phi = random_symbol(rng, n, 3)
        z = TorusPoint(tuple(rng.uniform(0, 2 * np.pi, n)))
        rate = sum(abs(c) * sum(map(abs, k)) for k, c in phi.terms)
        for r in (0.9, 0.99, 1 - 1e-4):
            gap = abs(poisson_extend(phi, PolydiscPoint.radial(r, z)) - symbol_eval(phi, z))
            assert gap <= rate * (1 - r) + 1e-13
