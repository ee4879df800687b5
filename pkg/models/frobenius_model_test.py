''' Tests for the multinomial class model and its Gaussian limit. '''
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from models.frobenius_model import (CONVOLUTION_TOL, ClassModel, ConstraintSet, convolved_P_single, covariance,
                                    estimate_P, estimate_P0, exact_congruence_prob, exact_orthant, exact_P_single,
                                    favored_probability, sample_counts, verify_G1_model)
from models.module_algebra import GaloisModuleSpec, direct_sum, load_fixture
from utils import make_rng

OMEGA4 = [[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]]
UNIPOTENT = [[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
SWAP = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]


def test_covariance_examples():
    assert np.allclose(covariance(1), [[0.0]])
    assert np.allclose(covariance(2), [[0.25, -0.25], [-0.25, 0.25]])
    sigma = covariance(5)
    assert np.allclose(sigma.sum(axis=1), 0)
    assert np.allclose(sigma, sigma.T)
    assert np.linalg.matrix_rank(sigma) == 4
    assert np.linalg.eigvalsh(sigma).min() > -1e-12


def test_constraint_validation():
    with pytest.raises(ValueError):
        ConstraintSet([(0, 0)])
    with pytest.raises(ValueError):
        ConstraintSet([(1, -1)], thresholds=[2])
    with pytest.raises(ValueError):
        ConstraintSet([(1, -1)], delta=0.5)
    assert ConstraintSet([(1, -1, 0), (2, 1, 0)]).zero_sum().functions == [(1, -1, 0)]
    with pytest.raises(ValueError):
        ClassModel(("a", "a"))


def test_counts_shape_and_total():
    counts = sample_counts(ClassModel.of_size(4), 50, 100, make_rng(0))
    assert counts.shape == (100, 4)
    assert (counts.sum(axis=1) == 50).all()


def test_covariance_convergence():
    model = ClassModel.of_size(3)
    n, trials = 1000, 20000
    counts = sample_counts(model, n, trials, make_rng(1))
    centered = (counts - n / 3) / math.sqrt(n)
    emp = centered.T @ centered / trials
    assert np.abs(emp - covariance(3)).max() < 5 / math.sqrt(trials)


@pytest.mark.slow
def test_covariance_convergence_large():
    model = ClassModel.of_size(4)
    n, trials = 10 ** 4, 10 ** 5
    counts = sample_counts(model, n, trials, make_rng(2))
    centered = (counts - n / 4) / math.sqrt(n)
    emp = centered.T @ centered / trials
    assert np.abs(emp - covariance(4)).max() < 5 / math.sqrt(trials)


def test_estimate_P_empty():
    est = estimate_P(ClassModel.of_size(3), ConstraintSet(), 100, 1000, make_rng(0))
    assert est.mean == 1.0 and est.stderr == 0.0


def test_estimate_P_symmetric():
    est = estimate_P(ClassModel.of_size(2), ConstraintSet([(1, -1)]), 10 ** 4, 20000, make_rng(3))
    assert abs(est.mean - 0.5) < 5 * est.stderr + 0.005


def test_estimate_P_congruence():
    est = estimate_P(ClassModel.of_size(2, modulus=2), ConstraintSet(), 101, 20000, make_rng(4))
    assert abs(est.mean - 0.5) < 5 * est.stderr


def test_estimate_P_worker_independent():
    model = ClassModel.of_size(3, modulus=2)
    cons = ConstraintSet([(1, -1, 0)], thresholds=[0.5], delta=0.2)
    a = estimate_P(model, cons, 200, 120000, make_rng(5), workers=1)
    b = estimate_P(model, cons, 200, 120000, make_rng(5), workers=2)
    assert a == b


def test_exact_single_matches_enumeration():
    f = (1, -1, 0)
    n = 6
    hits = sum(1 for seq in itertools.product(range(3), repeat=n) if sum(f[s] for s in seq) >= 0.5 * n ** 0.3)
    assert exact_P_single(f, 0.5, 0.3, n) == Fraction(hits, 3 ** n)


@pytest.mark.parametrize("n", [1, 7, 60, 301])
def test_convolved_single_within_tolerance(n):
    f = (2, -1, -1)
    exact = exact_P_single(f, 0.5, 0.2, n)
    assert convolved_P_single(f, 0.5, 0.2, n) == pytest.approx(float(exact), abs=CONVOLUTION_TOL)


def test_negative_drift_decays():
    ladder = [10, 20, 40, 80, 160]
    values = [exact_P_single((1, -2), 0.0, 0.25, n) for n in ladder]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_estimate_P0_examples():
    model = ClassModel.of_size(2)
    assert estimate_P0(model, ConstraintSet(), 100, make_rng(0)).mean == 1.0
    est = estimate_P0(model, ConstraintSet([(1, -1)]), 40000, make_rng(6))
    assert abs(est.mean - 0.5) < 5 * est.stderr
    with pytest.raises(ValueError):
        estimate_P0(model, ConstraintSet([(1, 0)]), 100, make_rng(0))


def test_orthant_three_classes():
    functions = [(1, -1, 0), (0, 1, -1)]
    assert exact_orthant(functions, 3) == pytest.approx(1 / 6)
    est = estimate_P0(ClassModel.of_size(3), ConstraintSet(functions), 60000, make_rng(7))
    assert abs(est.mean - 1 / 6) < 5 * est.stderr
    with pytest.raises(NotImplementedError):
        exact_orthant([(1, -1, 0, 0)] * 4, 4)


def test_orthant_three_constraints():
    # the three cyclic differences cannot all be positive
    assert exact_orthant([(1, -1, 0), (0, 1, -1), (-1, 0, 1)], 3) == pytest.approx(0.0, abs=1e-12)


def test_P0_positive_multiple_invariant():
    model = ClassModel.of_size(3)
    a = estimate_P0(model, ConstraintSet([(1, -1, 0), (0, 1, -1)]), 5000, make_rng(8))
    b = estimate_P0(model, ConstraintSet([(1, -1, 0), (0, 1, -1), (2, -2, 0)]), 5000, make_rng(8))
    assert a.mean == b.mean


def test_exact_congruence_binomial_parity():
    for n in range(0, 21):
        even = sum(math.comb(n, k) for k in range(0, n + 1, 2))
        assert exact_congruence_prob(2, 2, [0], n) == Fraction(even, 2 ** n)


def test_exact_congruence_enumeration():
    n = 7
    hits = sum(1 for seq in itertools.product(range(3), repeat=n) if seq.count(1) % 2 == 1 and seq.count(2) % 2 == 0)
    assert exact_congruence_prob(3, 2, [1, 0], n) == Fraction(hits, 3 ** n)


def test_G1_model_trivial():
    report = verify_G1_model(ClassModel.of_size(3), ConstraintSet(), [10, 100, 1000], 100, make_rng(0))
    assert report.delta_values == [0.0, 0.0, 0.0]
    assert report.passes


def test_G1_model_parity():
    report = verify_G1_model(ClassModel.of_size(2, modulus=2), ConstraintSet(), list(range(1, 13)), 100,
                             make_rng(0))
    assert report.P0 == 1.0
    assert max(report.delta_values) < 1e-12


def test_G1_model_decay_exponent():
    cons = ConstraintSet([(1, -1, 0)], thresholds=[0.0], delta=0.1)
    report = verify_G1_model(ClassModel.of_size(3), cons, [10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5], 100, make_rng(0))
    assert report.exponent <= -0.3
    assert report.passes


def test_favored_probability_dim_one():
    res = favored_probability(load_fixture("sign"), 1000, make_rng(0), n=100)
    assert res.P0.mean == 1.0 and res.consistent
    assert res.classification.favored


def test_favored_probability_single_constraint():
    res = favored_probability(load_fixture("unipotent_swap"), 40000, make_rng(9))
    assert abs(res.P0.mean - 0.5) < 5 * res.P0.stderr
    assert res.consistent


def test_favored_probability_cancellation():
    first = GaloisModuleSpec(2, OMEGA4, {"x": UNIPOTENT, "y": SWAP}, name="a")
    second = GaloisModuleSpec(2, OMEGA4, {"x": SWAP, "y": UNIPOTENT}, name="b")
    res = favored_probability(direct_sum(first, second), 20000, make_rng(10), n=500)
    assert res.P0.mean == 0.0
    assert res.consistent and not res.classification.favored


if __name__ == '__main__':
    test_covariance_examples()
    test_orthant_three_classes()
    test_G1_model_decay_exponent()
