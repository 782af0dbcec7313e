import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from polyberezin.boxes import TruncationBox
from polyberezin.kron import KronSum, shift_factor
from polyberezin.limits import ResourceLimitExceeded, check_flat_size, flat_size_limit, max_flat_size
from polyberezin.tucker import TuckerVector


def test_box_enumeration_is_lexicographic():
    box = TruncationBox((1, 2))
    assert box.size == 6
    assert list(box) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]
    assert [box.flat_index(k) for k in box] == list(range(6))
    assert box.multi_index(4) == (1, 1)
    assert np.array_equal(box.indices()[3], [1, 0])


def test_box_rejects_negative_dims():
    with pytest.raises(ValueError):
        TruncationBox((2, -1))


def test_box_union_enlarged_cube():
    assert TruncationBox.cube(3, 2).dims == (3, 3)
    assert TruncationBox((1, 4)).union(TruncationBox((3, 2))).dims == (3, 4)
    assert TruncationBox((1, 4)).enlarged((2, 0)).dims == (3, 4)


def _rand_tucker(rng, lengths, ranks):
    core = rng.normal(size=ranks) + 1j * rng.normal(size=ranks)
    bases = [rng.normal(size=(l, r)) + 1j * rng.normal(size=(l, r)) for l, r in zip(lengths, ranks)]
    return TuckerVector(core, bases)


def test_tucker_dense_roundtrip_inner_norm(rng):
    a = _rand_tucker(rng, (5, 4, 3), (2, 3, 2))
    b = _rand_tucker(rng, (5, 4, 3), (3, 1, 2))
    da, db = a.to_dense(), b.to_dense()
    assert np.allclose(TuckerVector.from_dense(da).to_dense(), da)
    assert a.inner(b) == pytest.approx(np.sum(da * db.conj()))
    assert a.norm() == pytest.approx(np.linalg.norm(da))
    c = a.combine(b, 2.0, -1j)
    assert np.allclose(c.to_dense(), 2 * da - 1j * db)


def test_tucker_compress_keeps_value(rng):
    a = _rand_tucker(rng, (6, 6), (2, 2))
    big = a.combine(a, 1.0, 1.0).combine(a, 1.0, -1.0)
    small = big.compress()
    assert max(small.ranks) <= 2
    assert np.allclose(small.to_dense(), a.to_dense())
    assert small.discarded <= 1e-10


def test_shift_factor():
    f = shift_factor(1, 3, 4)
    assert np.array_equal(f.toarray(), np.eye(4, 3, k=-1))
    # offset output rectangle starting at index -1
    g = shift_factor(-1, 3, 4, out_offset=-1)
    assert np.array_equal(g.toarray(), np.eye(4, 3))
    assert np.array_equal(shift_factor(-1, 3, 3, positive_only=True).toarray(), np.eye(3, 3, k=1))


def test_kronsum_matches_dense_kronecker(rng):
    f1, f2 = shift_factor(1, 3, 3), shift_factor(-1, 4, 4)
    g1, g2 = shift_factor(0, 3, 3), shift_factor(2, 4, 4)
    K = KronSum((3, 4), (3, 4), ((2.0, (f1, f2)), (1j, (g1, g2))))
    dense = 2 * np.kron(f1.toarray(), f2.toarray()) + 1j * np.kron(g1.toarray(), g2.toarray())
    assert np.allclose(K.to_sparse().toarray(), dense)
    assert np.allclose(K.adjoint().to_sparse().toarray(), dense.conj().T)
    assert np.allclose(K.compose(K).to_sparse().toarray(), dense @ dense)
    assert np.allclose(K.plus(K, 1, -0.5).to_sparse().toarray(), 0.5 * dense)
    v = _rand_tucker(rng, (3, 4), (2, 2))
    assert np.allclose(K.apply(v).to_dense().ravel(), dense @ v.to_dense().ravel())
    assert K.norm_bound >= np.linalg.norm(dense, 2) - 1e-12


def test_flat_size_limit_is_scoped():
    base = max_flat_size()
    with flat_size_limit(10):
        assert max_flat_size() == 10
        with pytest.raises(ResourceLimitExceeded):
            check_flat_size(11, "thing")
        check_flat_size(10)
    assert max_flat_size() == base
