''' Tests for prime-field linear algebra. '''
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linalg import (FieldMatrix, Subspace, EnumerationCapError, batch_rank, corank_histogram_alternating,
                    corank_histogram_uniform, enumerate_subspaces, gaussian_binomial, kernel_basis,
                    sample_alternating, sample_alternating_batch, sample_uniform, sample_uniform_batch)
from utils import make_rng


def matrices(max_dim=5, primes=(2, 3, 5, 7)):
    return st.sampled_from(primes).flatmap(
        lambda ell: st.tuples(st.integers(0, max_dim), st.integers(0, max_dim)).flatmap(
            lambda shape: st.lists(st.integers(0, ell - 1), min_size=shape[0] * shape[1],
                                   max_size=shape[0] * shape[1]).map(
                lambda entries: FieldMatrix(np.array(entries, dtype=np.int64), ell, shape=shape))))


def test_rank_examples():
    assert FieldMatrix.identity(3, 2).rank() == 3
    assert FieldMatrix.zeros(2, 2, 3).rank() == 0
    assert FieldMatrix([[1, 1], [1, 1]], 2).rank() == 1
    assert FieldMatrix([[1, 2], [2, 4]], 3).rank() == 2
    assert FieldMatrix([[1, 2], [2, 4]], 5).rank() == 1


def test_modulus_checked():
    with pytest.raises(ValueError):
        FieldMatrix([[1]], 4)
    with pytest.raises(ValueError):
        FieldMatrix([[1]], 1)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_transpose_and_kernel(m):
    assert m.rank() == m.T.rank()
    assert m.kernel_dim() + m.rank() == m.cols
    kernel = m.kernel_basis()
    assert kernel.shape[0] == m.kernel_dim()
    for v in kernel:
        assert not m.apply(v).any()


def test_inverse():
    m = FieldMatrix([[1, 1, 0], [0, 1, 1], [1, 0, 0]], 3)
    assert m @ m.inverse() == FieldMatrix.identity(3, 3)
    with pytest.raises(ValueError):
        FieldMatrix([[1, 1], [1, 1]], 2).inverse()


def test_empty_uniform_sample():
    m = sample_uniform(0, 4, 3, make_rng(0))
    assert m.shape == (0, 4)
    assert m.kernel_dim() == 4


def test_sampling_is_deterministic():
    a = sample_uniform(3, 4, 5, make_rng(7))
    b = sample_uniform(3, 4, 5, make_rng(7))
    assert a == b
    assert sample_alternating(5, 3, make_rng(1)) == sample_alternating(5, 3, make_rng(1))


def test_alternating_shape():
    rng = make_rng(3)
    assert sample_alternating(1, 2, rng) == FieldMatrix.zeros(1, 1, 2)
    for ell in (2, 3, 5):
        m = sample_alternating(6, ell, rng)
        assert m.is_alternating()


def test_batch_rank_matches_single():
    rng = make_rng(11)
    for ell in (2, 3, 7):
        batch = sample_uniform_batch(4, 6, ell, 200, rng)
        expected = [FieldMatrix(a, ell).rank() for a in batch]
        assert batch_rank(batch, ell).tolist() == expected
    batch = sample_alternating_batch(7, 2, 200, rng)
    assert batch_rank(batch, 2).tolist() == [FieldMatrix(a, 2).rank() for a in batch]


def test_uniform_2x2_oracle():
    hist = corank_histogram_uniform(2, 2, 2)
    assert hist[0] == 6 and sum(hist.values()) == 16


def test_alternating_oracles():
    assert corank_histogram_alternating(2) == {0: 1, 2: 1}
    assert corank_histogram_alternating(3) == {1: 7, 3: 1}


@pytest.mark.slow
def test_uniform_2x2_frequency():
    rng = make_rng(2024)
    trials = 10 ** 6
    ranks = batch_rank(sample_uniform_batch(2, 2, 2, trials, rng), 2)
    freq = float(np.mean(ranks == 2))
    sigma = (3 / 8 * 5 / 8 / trials) ** 0.5
    assert abs(freq - 3 / 8) < 3 * sigma


@pytest.mark.slow
def test_alternating_3x3_frequency():
    rng = make_rng(99)
    trials = 10 ** 6
    ranks = batch_rank(sample_alternating_batch(3, 2, trials, rng), 2)
    freq = float(np.mean(3 - ranks == 1))
    sigma = (7 / 8 * 1 / 8 / trials) ** 0.5
    assert abs(freq - 7 / 8) < 3 * sigma


def test_gaussian_binomial_values():
    assert gaussian_binomial(0, 5, 7) == 1
    assert gaussian_binomial(1, 2, 2) == 3
    assert gaussian_binomial(2, 4, 2) == 35
    with pytest.raises(ValueError):
        gaussian_binomial(3, 2, 2)


@pytest.mark.parametrize("n,ell,count", [(1, 2, 2), (2, 2, 5), (2, 3, 6)])
def test_enumerate_small(n, ell, count):
    spaces = enumerate_subspaces(n, ell)
    assert len(spaces) == count
    assert len(set(spaces)) == count


@pytest.mark.parametrize("ell", [2, 3])
def test_enumerate_matches_gaussian_binomials(ell):
    for n in range(5):
        spaces = enumerate_subspaces(n, ell)
        for j in range(n + 1):
            assert sum(1 for s in spaces if s.dim == j) == gaussian_binomial(j, n, ell)
        assert [s.sort_key() for s in spaces] == sorted(s.sort_key() for s in spaces)


def test_enumerate_cap():
    with pytest.raises(EnumerationCapError):
        enumerate_subspaces(21, 2)


def test_subspace_operations():
    ell = 3
    u = Subspace.span([[1, 0, 0, 1], [0, 1, 0, 0]], 4, ell)
    w = Subspace.span([[0, 1, 0, 0], [0, 0, 1, 0]], 4, ell)
    assert (u + w).dim == 3
    meet = u.intersection(w)
    assert meet == Subspace.span([[0, 1, 0, 0]], 4, ell)
    assert u.contains([2, 1, 0, 2])
    assert not u.contains([1, 0, 0, 0])
    q = u.quotient_coords([1, 0, 0, 1])
    assert not q.any()
    assert len(list(u.vectors())) == 9


def test_preimage_and_kernel():
    ell = 2
    m = FieldMatrix([[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]], ell)
    ker = kernel_basis(m)
    assert ker == Subspace.span([[1, 0, 0, 0], [0, 1, 0, 0]], 4, ell)
    line = Subspace.span([[1, 0, 0, 0]], 4, ell)
    pre = line.preimage(m)
    assert pre.dim == 3
    assert not pre.contains([0, 0, 0, 1])
    assert pre.contains([1, 1, 1, 0])


def test_exact_fractions_from_oracle():
    hist = corank_histogram_uniform(2, 2, 2)
    assert Fraction(hist[1], 16) == Fraction(9, 16)


if __name__ == '__main__':
    test_rank_examples()
    test_alternating_oracles()
    test_enumerate_matches_gaussian_binomials(2)
