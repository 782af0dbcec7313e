import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyberezin.fourier_symbols import (DimensionMismatch, FourierSymbol, SignPattern, coanalytic_complement,
                                         project_block, random_symbol, symbol_add, symbol_conj, symbol_eval,
                                         symbol_eval_grid, symbol_mul)
from polyberezin.polydisc_kernels import TorusPoint

from conftest import symbols, torus_points

S = FourierSymbol.from_dict


def test_add_identity_and_cancellation():
    phi = S({(1, 0): 2, (0, -1): 1j}, 2)
    assert symbol_add(S({}, 2), phi).allclose(phi)
    assert symbol_add(phi, phi, -1).is_zero()


def test_add_by_hand():
    out = symbol_add(S({(1, 0): 2}, 2), S({(1, 0): 1, (0, -1): 3}, 2), 2)
    assert out.allclose(S({(1, 0): 4, (0, -1): 6}, 2))


def test_mul_examples():
    phi = S({(2, -1): 1 + 1j}, 2)
    assert symbol_mul(phi, FourierSymbol.constant(1, 2)).allclose(phi)
    assert symbol_mul(S({(1,): 1}), S({(-1,): 1})).allclose(S({(0,): 1}))
    s = S({(1, 0): 1, (0, 1): 1})
    assert symbol_mul(s, s).allclose(S({(2, 0): 1, (1, 1): 2, (0, 2): 1}))


def test_conj_examples():
    sym = S({(1,): 2.0, (-1,): 2.0, (0,): 1.0})
    assert symbol_conj(sym).allclose(sym)
    assert symbol_conj(S({(1, 0): 1j})).allclose(S({(-1, 0): -1j}))


def test_project_block_examples():
    analytic = S({(1, 2): 1, (0, 0): 3})
    assert project_block(analytic, SignPattern((1, 1))).allclose(analytic)
    assert project_block(S({(1, -1): 1}), SignPattern((1, 1))).is_zero()


def test_eval_examples():
    assert symbol_eval(FourierSymbol.constant(2 - 1j, 2), TorusPoint((0.3, 1.1))) == pytest.approx(2 - 1j)
    assert symbol_eval(S({(1, 0): 1}), TorusPoint((math.pi / 2, 0.0))) == pytest.approx(1j)


def test_eval_accepts_unit_complex_and_rejects_interior():
    phi = S({(1, 0): 1, (0, 1): 2})
    z = (np.exp(0.4j), np.exp(2.0j))
    assert symbol_eval(phi, z) == pytest.approx(z[0] + 2 * z[1])
    with pytest.raises(ValueError):
        symbol_eval(phi, (0.5, 1.0))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        symbol_add(S({(1,): 1}), S({(1, 0): 1}))
    with pytest.raises(DimensionMismatch):
        symbol_mul(S({(1,): 1}), S({(1, 0): 1}))
    with pytest.raises(DimensionMismatch):
        symbol_eval(S({(1,): 1}), TorusPoint((0.0, 0.0)))


def test_canonical_form_drops_tiny_and_sorts():
    phi = S({(1,): 1e-17, (-1,): 1.0, (0,): 2.0})
    assert phi.support == [(-1,), (0,)]
    assert len(phi) == 2


def test_degree():
    phi = S({(3, -1): 1, (-2, 2): 1})
    assert phi.degree() == (3, 2)


def test_json_roundtrip_layout():
    phi = S({(1, -2): 1 - 2j, (0, 0): 3})
    obj = phi.to_json()
    assert obj["dim"] == 2
    assert [t["k"] for t in obj["terms"]] == [[0, 0], [1, -2]]
    back = FourierSymbol.from_json(json.dumps(obj))
    assert back.allclose(phi)


def test_coanalytic_complement_is_strictly_negative_part():
    phi = S({(1, 0): 1, (0, -1): 2, (-1, 1): 3, (0, 0): 4})
    y = coanalytic_complement(phi)
    assert set(y.support) == {(0, -1), (-1, 1)}


def test_random_symbol_respects_degree(rng):
    for _ in range(20):
        phi = random_symbol(rng, 2, 3)
        assert all(d <= 3 for d in phi.degree())
        assert random_symbol(rng, 2, 3, analytic=True).is_analytic()


@given(symbols(), symbols(), symbols())
def test_mul_commutative_associative(a, b, c):
    if not (a.dim == b.dim == c.dim):
        return
    assert symbol_mul(a, b).allclose(symbol_mul(b, a), atol=1e-12)
    assert symbol_mul(symbol_mul(a, b), c).allclose(symbol_mul(a, symbol_mul(b, c)), atol=1e-10)


@given(symbols(dim=2), symbols(dim=2))
def test_conj_is_multiplicative_involution(a, b):
    assert symbol_conj(symbol_conj(a)).allclose(a)
    assert symbol_conj(symbol_mul(a, b)).allclose(symbol_mul(symbol_conj(a), symbol_conj(b)), atol=1e-12)


@given(symbols())
def test_blocks_partition_support(phi):
    pats = SignPattern.all_patterns(phi.dim)
    assert len(pats) == 2 ** phi.dim
    total = S({}, phi.dim)
    seen = set()
    for p in pats:
        blk = project_block(phi, p)
        assert not (set(blk.support) & seen)
        seen |= set(blk.support)
        total = total + blk
    assert total.allclose(phi)


@given(symbols(dim=2), symbols(dim=2), torus_points(2))
def test_eval_is_ring_homomorphism(a, b, z):
    lhs = symbol_eval(symbol_mul(a, b), z)
    rhs = symbol_eval(a, z) * symbol_eval(b, z)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs)) * 10


@given(symbols(dim=2, degree=3))
def test_eval_matches_dft_grid(phi):
    npts = 8
    grid = symbol_eval_grid(phi, npts)
    # independent route: explicit sum of monomials at a few grid nodes
    for i, j in [(0, 0), (1, 3), (7, 5)]:
        th = (2 * math.pi * i / npts, 2 * math.pi * j / npts)
        direct = sum(c * np.exp(1j * (k[0] * th[0] + k[1] * th[1])) for k, c in phi.terms)
        assert abs(grid[i, j] - direct) <= 1e-12 * max(1, phi.l1_norm())
        assert abs(symbol_eval(phi, TorusPoint(th)) - direct) <= 1e-12 * max(1, phi.l1_norm())
