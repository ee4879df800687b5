''' Tests for module fixtures, connecting maps and the favored / cofavored classification. '''
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from linalg import FieldMatrix, Subspace, enumerate_subspaces
from models.module_algebra import (GaloisModuleSpec, N_OMEGA, N_OMEGA_MOD_T, QUOTIENT_OMEGA, canonical_hash,
                                   direct_sum, load_fixture, separate_from_origin, spec_to_json,
                                   verify_cofavored_powers, verify_graph_structure)
from models.simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, linprog_exact

OMEGA4 = [[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]]
ID4 = np.eye(4, dtype=np.int64)
UNIPOTENT = [[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
SWAP = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]


def twisted_pair():
    """
    Two copies of the unipotent + swap module with the roles of the classes exchanged;
    its difference vectors include (1, -1) and (-1, 1).
    """
    first = GaloisModuleSpec(2, OMEGA4, {"x": UNIPOTENT, "y": SWAP}, name="a")
    second = GaloisModuleSpec(2, OMEGA4, {"x": SWAP, "y": UNIPOTENT}, name="b")
    return direct_sum(first, second)


# simplex

def test_simplex_small_lp():
    # max x + y  s.t. x + 2y <= 4, 3x + y <= 6
    res = linprog_exact([-1, -1], [[1, 2], [3, 1]], [4, 6])
    assert res.status == OPTIMAL
    assert res.x == [Fraction(8, 5), Fraction(6, 5)]
    assert res.objective == Fraction(-14, 5)


def test_simplex_infeasible_and_unbounded():
    assert linprog_exact([0], A_eq=[[1]], b_eq=[-1]).status == INFEASIBLE
    assert linprog_exact([-1], [[-1]], [0]).status == UNBOUNDED


def test_simplex_redundant_equalities():
    res = linprog_exact([1, 1], A_eq=[[1, 1], [2, 2]], b_eq=[1, 2])
    assert res.status == OPTIMAL
    assert sum(res.x) == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.integers(-5, 5), min_size=n, max_size=n),
    st.lists(st.lists(st.integers(0, 5), min_size=n, max_size=n), min_size=1, max_size=4),
    st.lists(st.integers(1, 10), min_size=4, max_size=4))))
def test_simplex_matches_scipy(problem):
    c, A, b = problem
    b = b[:len(A)]
    # a box keeps every instance bounded
    n = len(c)
    A = A + [[int(i == j) for j in range(n)] for i in range(n)]
    b = b + [3] * n
    ours = linprog_exact(c, A, b)
    ref = linprog(c, A_ub=A, b_ub=b, bounds=[(0, None)] * n, method="highs")
    assert ours.status == OPTIMAL and ref.status == 0
    assert abs(float(ours.objective) - ref.fun) < 1e-7
    for row, rhs in zip(A, b):
        assert sum(Fraction(a) * x for a, x in zip(row, ours.x)) <= rhs


# spec validation and fixtures

def test_spec_validation():
    with pytest.raises(ValueError):
        GaloisModuleSpec(2, [[1, 0], [0, 0]], {"id": np.eye(2, dtype=np.int64)})
    with pytest.raises(ValueError):
        GaloisModuleSpec(2, np.zeros((4, 4), dtype=np.int64), {"id": ID4})
    with pytest.raises(ValueError):
        # swapping e1 <-> f1 does not commute with omega
        GaloisModuleSpec(2, OMEGA4, {"bad": [[0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1]]})
    with pytest.raises(ValueError):
        GaloisModuleSpec(2, OMEGA4, {"id": ID4, "s": SWAP}, mult_table=[["s", "s", "s"]])


def test_fixture_round_trip_hash():
    spec = load_fixture("f4")
    again = load_fixture(spec_to_json(spec))
    assert canonical_hash(spec) == canonical_hash(again)
    assert canonical_hash(spec) != canonical_hash(load_fixture("unipotent"))
    assert len(canonical_hash(spec)) == 16


def test_unknown_label():
    spec = load_fixture("swap")
    with pytest.raises(KeyError):
        spec.fixed_dim("frob_7")
    with pytest.raises(KeyError):
        spec.tamagawa_ratio(Subspace.zero(4, 2), ["nope"])


# fixed dimensions

def test_fixed_dim_examples():
    spec = load_fixture("swap")
    assert spec.fixed_dim("id") == 2
    assert spec.fixed_dim("swap") == 1
    diagonal = spec.local_span([[1, 1]])
    assert spec.fixed_dim("swap", QUOTIENT_OMEGA, diagonal) == 2
    assert spec.fixed_dim("swap", N_OMEGA_MOD_T, diagonal) == 1
    assert spec.fixed_dim("swap", QUOTIENT_OMEGA, spec.n_omega) == spec.fixed_dim("swap")


def test_fixed_dim_rejects_non_submodule():
    spec = load_fixture("swap")
    with pytest.raises(ValueError):
        spec.fixed_dim("swap", QUOTIENT_OMEGA, spec.local_span([[1, 0]]))
    with pytest.raises(NotImplementedError):
        spec.fixed_dim("swap", "N[omega^2]")


def test_fixed_dim_conjugation_invariant():
    g = FieldMatrix(UNIPOTENT, 2) @ FieldMatrix(SWAP, 2)
    conj = g @ FieldMatrix(SWAP, 2) @ g.inverse()
    spec = GaloisModuleSpec(2, OMEGA4, {"id": ID4, "sigma": UNIPOTENT, "swap": SWAP, "swap_conj": conj})
    assert spec.fixed_dim("swap") == spec.fixed_dim("swap_conj")
    for T in spec.enumerate_submodules():
        assert spec.fixed_dim("swap", QUOTIENT_OMEGA, T) == spec.fixed_dim("swap_conj", QUOTIENT_OMEGA, T)


def test_unipotent_quotients():
    spec = load_fixture("unipotent")
    assert spec.fixed_dim("sigma") == 2
    assert spec.fixed_dim("sigma", QUOTIENT_OMEGA, spec.local_span([[1, 0]])) == 1
    assert spec.fixed_dim("sigma", QUOTIENT_OMEGA, spec.local_span([[0, 1]])) == 2
    assert spec.fixed_dim("sigma", QUOTIENT_OMEGA, spec.local_span([[1, 1]])) == 1


# connecting maps

def test_connecting_map_identity_is_zero():
    spec = load_fixture("unipotent")
    delta = spec.connecting_map("id")
    assert delta.domain.dim == 2 and delta.augmentation.dim == 0
    assert not delta.matrix.array.any()


def test_connecting_map_trivial_action():
    spec = GaloisModuleSpec(3, OMEGA4, {"id": ID4})
    assert not spec.connecting_map("id").matrix.array.any()


def test_connecting_map_regression():
    spec = load_fixture("unipotent")
    delta = spec.connecting_map("sigma")
    assert delta.matrix == FieldMatrix([[0, 0], [1, 0]], 2)


def test_connecting_map_swap_vanishes():
    spec = load_fixture("swap")
    delta = spec.connecting_map("swap")
    assert delta.domain == Subspace.span([[1, 1]], 2, 2)
    assert delta.augmentation == Subspace.span([[1, 1]], 2, 2)
    assert delta.matrix.shape == (1, 1) and not delta.matrix.array.any()


def test_commutes_scalars_and_identity():
    spec = load_fixture("unipotent")
    assert spec.commutes_with_connecting(FieldMatrix.identity(2, 2))
    assert spec.commutes_with_connecting(FieldMatrix([[0, 0], [1, 0]], 2))
    assert not spec.commutes_with_connecting(FieldMatrix([[1, 0], [0, 0]], 2))
    f3 = GaloisModuleSpec(3, [[0, 1], [0, 0]], {"sigma": [[1, 1], [0, 1]]})
    for c in (1, 2):
        assert f3.commutes_with_connecting(FieldMatrix([[c]], 3))


def test_commutes_requires_equivariance():
    spec = load_fixture("swap")
    with pytest.raises(ValueError):
        spec.commutes_with_connecting(FieldMatrix([[1, 0], [0, 0]], 2))


def test_order_three_automorphism_fails_with_nonsquare_witness():
    # full two-torsion of y^2 = x^3 - x at p = 5: chi_{-1}(5) = 0, chi_2(5) = 1, so f2 -> f2 + e1
    frob5 = [[1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    spec = GaloisModuleSpec(2, OMEGA4, {"id": ID4, "frob5": frob5})
    rotation = FieldMatrix([[0, 1], [1, 1]], 2)
    assert not spec.commutes_with_connecting(rotation)
    # at p = 3 both characters are nontrivial and the rotation commutes
    frob3 = [[1, 0, 1, 1], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    assert GaloisModuleSpec(2, OMEGA4, {"frob3": frob3}).commutes_with_connecting(rotation)


def test_self_duality_candidate():
    dual = load_fixture("unipotent")
    doc = spec_to_json(dual)
    doc["dual"] = spec_to_json(dual)
    doc["self_duality"] = [[1, 0], [0, 1]]
    assert load_fixture(doc).check_self_duality()
    doc["self_duality"] = [[1, 1], [0, 1]]
    assert not load_fixture(doc).check_self_duality()


# submodules and Tamagawa ratios

def test_enumerate_submodules_counts():
    assert len(load_fixture("sign").enumerate_submodules()) == 2
    assert len(load_fixture("unipotent").enumerate_submodules()) == 5
    assert len(load_fixture("swap").enumerate_submodules()) == 3
    assert len(load_fixture("f4").enumerate_submodules()) == 2
    trivial = GaloisModuleSpec(3, OMEGA4, {"id": ID4})
    assert len(trivial.enumerate_submodules()) == len(enumerate_subspaces(2, 3))


def test_tamagawa_trivial_cases():
    spec = load_fixture("swap")
    zero = Subspace.zero(4, 2)
    assert spec.tamagawa_ratio(zero, ["swap", "swap", "id"]) == 1
    for T in spec.enumerate_submodules():
        assert spec.tamagawa_ratio(T, []) == 1


def test_tamagawa_swap_diagonal():
    spec = load_fixture("swap")
    diagonal = spec.local_span([[1, 1]])
    d_nt = spec.fixed_dim("swap", QUOTIENT_OMEGA, diagonal)
    d_n = spec.fixed_dim("swap", N_OMEGA)
    assert spec.tamagawa_ratio(diagonal, ["swap", "swap"]) == Fraction(2) ** (2 * (d_nt - d_n)) == 4


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(["id", "sigma", "swap"]), max_size=6),
       st.lists(st.sampled_from(["id", "sigma", "swap"]), max_size=6))
def test_tamagawa_multiplicative(first, second):
    spec = load_fixture("unipotent_swap")
    for T in spec.enumerate_submodules():
        assert spec.tamagawa_ratio(T, first + second) == spec.tamagawa_ratio(T, first) * \
            spec.tamagawa_ratio(T, second)


def test_is_favored():
    assert load_fixture("sign").is_favored(["sigma", "sigma"]).favored
    swap = load_fixture("swap")
    assert swap.is_favored([]).favored
    res = swap.is_favored(["swap"])
    assert not res.favored
    assert res.ratio == 2
    assert res.worst == swap.local_span([[1, 1]])
    assert load_fixture("unipotent").is_favored(["sigma", "id"]).favored


# cofavored

def test_cofavored_trivial_and_free():
    for name in ("sign", "unipotent", "swap", "f4"):
        spec = load_fixture(name)
        assert spec.is_cofavored(Subspace.zero(4 if spec.d == 2 else 2, 2))
        assert spec.is_cofavored(spec.n_omega)


def test_cofavored_unipotent():
    spec = load_fixture("unipotent")
    assert spec.is_cofavored(spec.local_span([[0, 1]]))
    assert not spec.is_cofavored(spec.local_span([[1, 0]]))
    assert not spec.is_uncofavored()
    assert load_fixture("f4").is_uncofavored()
    assert load_fixture("sign").is_uncofavored()


def test_graph_submodules():
    spec = load_fixture("unipotent")
    both = direct_sum(spec, spec)
    eye = np.eye(2, dtype=np.int64)

    def graph(beta):
        beta = FieldMatrix(beta, 2)
        return Subspace.span([np.concatenate([spec.from_local(eye[i]), spec.from_local(beta.apply(eye[i]))])
                              for i in range(2)], 8, 2)

    assert both.is_cofavored(graph([[1, 0], [0, 1]]))
    assert not both.is_cofavored(graph([[1, 0], [0, 0]]))


def test_cofavored_powers():
    report = verify_cofavored_powers(load_fixture("f4"), 1)
    assert len(report.cofavored) == 2 and report.ok
    report = verify_cofavored_powers(load_fixture("sign"), 2)
    assert len(report.cofavored) == 2 + 3 == len(enumerate_subspaces(2, 2))
    assert report.ok and not report.missing
    report = verify_cofavored_powers(load_fixture("f4"), 2)
    assert len(report.cofavored) == 5
    assert report.ok and not report.missing


def test_trivial_action_powers():
    spec = GaloisModuleSpec(3, [[0, 1], [0, 0]], {"id": np.eye(2, dtype=np.int64)})
    report = verify_cofavored_powers(spec, 2)
    assert len(report.cofavored) == 3 + 3


def test_graph_structure():
    f4 = load_fixture("f4")
    report = verify_graph_structure(f4, f4)
    assert report.hypotheses and report.match
    assert report.commuting == [FieldMatrix.zeros(2, 2, 2), FieldMatrix.identity(2, 2)]
    sign = load_fixture("sign")
    report = verify_graph_structure(sign, sign)
    assert report.match and len(report.found) == 5


# potentially favored

def test_separation_examples():
    sep = separate_from_origin([(1, -1)], 2)
    assert sep.certificate is None
    assert sum(a * b for a, b in zip(sep.superlative, (1, -1))) > 0
    sep = separate_from_origin([(1, -1), (-1, 1)], 2)
    assert sep.superlative is None
    assert sep.certificate == [Fraction(1, 2), Fraction(1, 2)]
    sep = separate_from_origin([], 3)
    assert sep.superlative == [0, 0, 0]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3).flatmap(lambda k: st.lists(
    st.lists(st.integers(-2, 2), min_size=k, max_size=k).filter(any), min_size=1, max_size=5)))
def test_separation_verifies(vectors):
    k = len(vectors[0])
    sep = separate_from_origin(vectors, k)
    assert (sep.superlative is None) != (sep.certificate is None)
    if sep.superlative is not None:
        assert all(sum(w * x for w, x in zip(sep.superlative, f)) > 0 for f in vectors)
        assert all(abs(w) <= 1 for w in sep.superlative)
    else:
        lam = sep.certificate
        assert all(x >= 0 for x in lam) and sum(lam) == 1
        assert all(sum(l * f[i] for l, f in zip(lam, vectors)) == 0 for i in range(k))


def test_potentially_favored_dim_one():
    res = load_fixture("sign").is_potentially_favored()
    assert res.favored and res.vectors == []


def test_potentially_favored_single_constraint():
    spec = load_fixture("unipotent_swap")
    res = spec.is_potentially_favored()
    assert res.labels == ("id", "sigma", "swap")
    assert res.vectors == [(0, 1, -1)]
    assert res.condition_holds and res.favored
    w = res.superlative
    assert w[1] - w[2] > 0


def test_swap_fails_condition():
    spec = load_fixture("swap")
    res = spec.is_potentially_favored()
    assert res.vectors == [(0, -1)]
    assert not res.condition_holds and not res.favored
    assert res.violating == spec.local_span([[1, 1]])


def test_symmetric_cancellation():
    spec = twisted_pair()
    res = spec.is_potentially_favored()
    assert (1, -1) in res.vectors and (-1, 1) in res.vectors
    assert not res.favored
    assert res.superlative is None
    lam = res.certificate
    assert sum(lam) == 1
    assert all(sum(l * f[i] for l, f in zip(lam, res.vectors)) == 0 for i in range(2))


if __name__ == '__main__':
    test_connecting_map_regression()
    test_cofavored_powers()
    test_symmetric_cancellation()
