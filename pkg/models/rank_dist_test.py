from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from linalg import corank_histogram_alternating, corank_histogram_uniform
from models.rank_dist import (ALTERNATING, NON_SELF_DUAL, CaseParams, RankDistribution, distribution,
                              markov_sequence_prob, moment_empirical, moment_theoretical, p_alternating, p_inf,
                              p_nonselfdual, parity_split, sample_rank_sequence, transition_matrix)
from utils import make_rng

ALT = CaseParams(ALTERNATING, parity=0)


def nsd(u=0, ell=2):
    return CaseParams(NON_SELF_DUAL, ell=ell, u=u)


def p_alternating_literal(j, n):
    """The display with factor 1 - 2^{-n-j+k}; disagrees with enumeration at j = n."""
    value = Fraction(1, 2 ** (j * (j - 1) // 2))
    for k in range(1, j + 1):
        value *= (1 - Fraction(2) ** (-n - j + k)) / (1 - Fraction(1, 2 ** k))
    for k in range(1, (n - j) // 2 + 1):
        value *= 1 - Fraction(2, 2 ** (2 * k))
    return value


def test_nonselfdual_examples():
    assert p_nonselfdual(0, 0, nsd()) == 1
    assert p_nonselfdual(1, 2, nsd()) == Fraction(9, 16)
    assert p_nonselfdual(1, 1, nsd(u=1)) == 1
    assert p_nonselfdual(0, 3, nsd(u=1)) == 0
    assert p_nonselfdual(3, 2, nsd()) == 0


def test_alternating_examples():
    assert p_alternating(1, 2) == 0
    assert p_alternating(0, 2) == Fraction(1, 2)
    assert p_alternating(2, 2) == Fraction(1, 2)
    assert p_alternating(1, 3) == Fraction(7, 8)
    assert p_alternating(3, 3) == Fraction(1, 8)


def test_literal_alternating_reading_disagrees():
    assert p_alternating_literal(2, 2) == Fraction(7, 8)
    assert p_alternating_literal(2, 2) != Fraction(corank_histogram_alternating(2)[2], 2)


@pytest.mark.parametrize("ell", [2, 3])
@pytest.mark.parametrize("u", [-1, 0, 1])
def test_uniform_matches_enumeration(ell, u):
    for n in range(max(u, 0), 4):
        hist = corank_histogram_uniform(n - u, n, ell)
        total = sum(hist.values())
        for j in range(n + 1):
            assert p_nonselfdual(j, n, nsd(u, ell)) == Fraction(hist.get(j, 0), total)


def test_alternating_matches_enumeration():
    for n in range(6):
        hist = corank_histogram_alternating(n)
        total = sum(hist.values())
        for j in range(n + 1):
            assert p_alternating(j, n) == Fraction(hist.get(j, 0), total)


@pytest.mark.parametrize("params", [ALT, nsd(-1), nsd(0), nsd(1), nsd(0, 3), nsd(2, 5)])
def test_exact_normalization(params):
    for n in range(max(params.u, 0), 13):
        assert distribution(n, params).total() == 1


def test_transition_rows_are_stochastic():
    for params in (ALT, nsd(0), nsd(1, 3)):
        rows = transition_matrix(8, params)
        for n, row in enumerate(rows):
            if n >= params.u:
                assert sum(row) == 1


@given(st.integers(0, 30), st.integers(0, 30), st.integers(-2, 2))
def test_support_law(j, n, u):
    if j < u:
        assert p_nonselfdual(j, n, nsd(u)) == 0
    if (n - j) % 2:
        assert p_alternating(j, n) == 0


def test_p_inf_values():
    assert p_inf(0, CaseParams(ALTERNATING, parity=1)).value == 0
    v = p_inf(0, ALT)
    assert abs(float(v.value) - 0.419422) < 1e-6
    assert v.err < Decimal("1e-30")
    w = p_inf(0, nsd())
    assert abs(float(w.value) - 0.288788) < 1e-6


def test_p_inf_is_limit_of_finite():
    limit = p_inf(0, ALT).value
    gaps = [abs(Decimal(float(p_alternating(0, n))) - limit) for n in (20, 22, 24)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < Decimal("1e-6")
    limit = p_inf(0, nsd()).value
    assert abs(Decimal(float(p_nonselfdual(0, 40, nsd()))) - limit) < Decimal("1e-10")


def test_non_invariant_halves():
    mixed = CaseParams(ALTERNATING)
    for j in range(5):
        inv = p_inf(j, CaseParams(ALTERNATING, parity=j % 2)).value
        assert abs(p_inf(j, mixed).value * 2 - inv) < Decimal("1e-40")


@pytest.mark.parametrize("params", [ALT, CaseParams(ALTERNATING, parity=1), CaseParams(ALTERNATING),
                                    nsd(-1), nsd(0), nsd(1), nsd(0, 3)])
def test_limit_sums_to_one_and_moments(params):
    dist = distribution(None, params)
    assert abs(dist.total() - 1) <= dist.err + Decimal("1e-30")
    for m in range(5):
        expected = moment_theoretical(m, params)
        assert abs(float(dist.moment(m)) - float(expected)) < 1e-9


def test_moment_theoretical_values():
    assert moment_theoretical(0, ALT) == 1
    assert moment_theoretical(0, nsd(1)) == 1
    assert moment_theoretical(1, ALT) == 3
    assert moment_theoretical(2, ALT) == 15
    assert moment_theoretical(3, ALT) == 135
    assert moment_theoretical(1, nsd(0)) == 2
    assert moment_theoretical(1, nsd(1)) == 3
    assert moment_theoretical(1, nsd(-1)) == Fraction(3, 2)


def test_markov_sequence():
    head = p_inf(0, ALT)
    assert markov_sequence_prob([0], ALT) == head
    two = markov_sequence_prob([2, 0], ALT)
    assert abs(two.value - p_inf(2, ALT).value * Decimal(1) / 2) < Decimal("1e-40")
    with pytest.raises(ValueError):
        markov_sequence_prob([1, 2], ALT)


@pytest.mark.parametrize("params", [ALT, CaseParams(ALTERNATING, parity=1), nsd(0), nsd(1)])
def test_markov_rows_are_stochastic(params):
    for r1 in range(5):
        head = p_inf(r1, params).value
        if not head:
            continue
        total = sum(markov_sequence_prob([r1, r2], params).value for r2 in range(r1 + 1))
        assert abs(total / head - 1) < Decimal("1e-35")


def test_sample_rank_sequence_is_nonincreasing():
    seq = sample_rank_sequence(CaseParams(ALTERNATING), 6, make_rng(5))
    assert all(a >= b for a, b in zip(seq, seq[1:]))


def test_json_round_trip():
    finite = distribution(4, ALT)
    assert RankDistribution.from_json(finite.dumps()).entries == finite.entries
    limit = distribution(None, nsd(1))
    back = RankDistribution.from_json(limit.to_json())
    assert back.n is None and back.entries == limit.entries
    assert finite.to_json()["entries"][0] == {"j": 0, "p_num": 7, "p_den": 16}


def test_parity_split():
    split = parity_split(distribution(None, CaseParams(ALTERNATING)))
    assert set(split) == {0, 1}
    assert abs(split[0].total() - 1) < Decimal("1e-20")
    assert split[0].total_variation(distribution(None, ALT)) < 1e-20


def test_moment_empirical_order_zero():
    est = moment_empirical(0, ALT, 10, 5, make_rng(0))
    assert est.mean == 1.0


def test_moment_empirical_independent_of_workers():
    a = moment_empirical(1, nsd(0), 8, 1000, make_rng(3), workers=1)
    b = moment_empirical(1, nsd(0), 8, 1000, make_rng(3), workers=2)
    assert a == b


@pytest.mark.slow
def test_moment_empirical_alternating():
    est = moment_empirical(1, ALT, 20, 10 ** 6, make_rng(1))
    assert abs(est.mean - 3) < 5 * est.stderr


@pytest.mark.slow
def test_moment_empirical_nonselfdual():
    est = moment_empirical(1, nsd(0), 20, 10 ** 6, make_rng(2))
    assert abs(est.mean - moment_theoretical(1, nsd(0))) < 5 * est.stderr


if __name__ == '__main__':
    test_alternating_matches_enumeration()
    test_limit_sums_to_one_and_moments(ALT)
