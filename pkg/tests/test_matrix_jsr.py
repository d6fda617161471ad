import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subfekete import ConfigError, Limits, Subshift, bounds_report, check_submultiplicative, phi_n_exact
from subfekete.matrix_jsr import (
    Found,
    MatrixSet,
    NormKind,
    NotUpTo,
    certified_lower_bound,
    check_all_products_contract,
    jsr_bounds,
    matrix_functional,
    power_radius,
    reproduce_remark_example,
    spectral_radius,
)

from conftest import random_matrix_set
from oracles import power_norm_oracle

GOLDEN = (1 + math.sqrt(5)) / 2


class TestMatrixFunctional:
    def test_values(self, diag_f):
        assert diag_f.eval((0, 1)) == 30.0
        assert diag_f.eval((0,)) == 0.3 and diag_f.eval((1,)) == 100.0

    def test_scalar_power(self):
        assert matrix_functional(MatrixSet.from_lists([[[2.0]]])).eval((0, 0, 0)) == 8.0

    def test_frobenius_identity_is_sqrt_d(self):
        f = matrix_functional(MatrixSet.from_lists([np.eye(3)], NormKind.FROBENIUS))
        assert f.eval(()) == pytest.approx(math.sqrt(3))

    def test_rejects_bad_shapes(self):
        with pytest.raises(ConfigError):
            MatrixSet.from_lists([np.eye(2), np.eye(3)])
        with pytest.raises(ConfigError):
            MatrixSet.from_lists([np.ones((2, 3))])
        with pytest.raises(ConfigError):
            MatrixSet.from_lists([])
        with pytest.raises(ConfigError):
            MatrixSet.from_lists([[[float("nan")]]])


@pytest.mark.parametrize("norm", [k.value for k in NormKind])
def test_norms_are_submultiplicative_on_random_sets(norm):
    rng = np.random.default_rng(2024)
    for _ in range(50):
        f = matrix_functional(random_matrix_set(rng, norm=norm))
        assert check_submultiplicative(f, 6) == []


class TestSpectralRadius:
    def test_triangular_defective_agrees_with_power_route(self):
        b = np.array([[0.9, 10.0], [0.0, 0.9]])
        assert power_radius(b) == pytest.approx(spectral_radius(b), rel=1e-8)
        s = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]])
        j = np.array([[0.5, 1.0, 0.0], [0.0, 0.5, 1.0], [0.0, 0.0, 0.5]])
        a = s @ j @ np.linalg.inv(s)
        assert power_radius(a) == pytest.approx(spectral_radius(a), rel=1e-8)
        assert spectral_radius(a) == pytest.approx(0.5, rel=1e-12)

    def test_dense_defective_cluster_is_averaged(self):
        # integer similarity with det 1: the float matrix is exactly defective
        s = np.array([[1.0, 2.0], [3.0, 7.0]])
        s_inv = np.array([[7.0, -2.0], [-3.0, 1.0]])
        a = s @ np.array([[0.5, 1.0], [0.0, 0.5]]) @ s_inv
        vals = np.linalg.eigvals(a)
        assert abs(vals[0] - vals[1]) > 1e-9
        assert spectral_radius(a) == pytest.approx(0.5, rel=1e-12)

    def test_real_split_cluster_is_not_overestimated(self):
        s = np.array([[1.0, 2.0], [3.0, 7.0]])
        j = np.array([[0.7, 1.0], [0.0, 0.7]])
        a = s @ j @ np.linalg.inv(s)
        vals = np.linalg.eigvals(a)
        assert np.max(np.abs(vals)) - 0.7 > 1e-9
        assert spectral_radius(a) == pytest.approx(0.7, rel=1e-12)

    def test_distinct_eigenvalues_untouched(self):
        a = np.array([[2.0, 1.0], [0.0, -3.0]])
        assert spectral_radius(a) == pytest.approx(3.0, rel=1e-14)

    def test_nilpotent(self):
        assert power_radius(np.array([[0.0, 1.0], [0.0, 0.0]])) == 0.0

    def test_rotation(self):
        r = np.array([[0.0, -2.0], [2.0, 0.0]])
        assert power_radius(r) == pytest.approx(2.0, rel=1e-12)


class TestJsrBounds:
    def test_diagonal_pair(self, diag_set):
        rep = jsr_bounds(diag_set, 1, 2)
        assert rep.certified_lower == 100.0 and rep.lower_word == (1,)
        assert rep.running_upper == 100.0 and rep.gap == 0.0

    def test_golden_pair(self, golden_set):
        lower, word = certified_lower_bound(golden_set, 2)
        assert word == (0, 1)
        assert lower == pytest.approx(math.sqrt((3 + math.sqrt(5)) / 2), rel=1e-12)
        assert lower == pytest.approx(GOLDEN, rel=1e-12)

    def test_single_matrix_gelfand(self):
        ms = MatrixSet.from_lists([[[0.9, 0.0], [0.0, 0.5]]])
        rep = jsr_bounds(ms, 6, 1)
        assert rep.certified_lower == pytest.approx(0.9, rel=1e-12)
        assert rep.running_upper == pytest.approx(0.9, rel=1e-12)

    def test_subshift_lower_bound_uses_periodic_words(self, diag_set, no11):
        rep = jsr_bounds(diag_set, 4, 4, no11)
        assert rep.lower_word == (0, 1)
        assert rep.certified_lower == pytest.approx(math.sqrt(30), rel=1e-12)

    def test_certified_sandwich_on_random_sets(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            rep = jsr_bounds(random_matrix_set(rng), 6, 4)
            assert rep.certified_lower <= rep.running_upper + 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10.0))
def test_scaling_covariance(seed, c):
    ms = random_matrix_set(np.random.default_rng(seed), max_alpha=2)
    f, g = matrix_functional(ms), matrix_functional(ms.scaled(c))
    for n in range(1, 5):
        assert phi_n_exact(g, n)[0] == pytest.approx(c**n * phi_n_exact(f, n)[0], rel=1e-9)
    a, b = jsr_bounds(ms, 4, 3), jsr_bounds(ms.scaled(c), 4, 3)
    assert b.running_upper == pytest.approx(c * a.running_upper, rel=1e-9)
    assert b.certified_lower == pytest.approx(c * a.certified_lower, rel=1e-9)


def test_scaling_covariance_exact_for_diagonal(diag_set):
    f, g = matrix_functional(diag_set), matrix_functional(diag_set.scaled(2.0))
    for n in range(1, 5):
        assert phi_n_exact(g, n)[0] == 2.0**n * phi_n_exact(f, n)[0]


class TestAllProductsContract:
    def test_contracting_pair(self):
        out = check_all_products_contract(MatrixSet.from_lists([np.diag([0.9, 0.9]), np.diag([0.5, 0.5])]), 5)
        assert isinstance(out, Found) and out.n == 1

    def test_expanding_pair(self, diag_set):
        out = check_all_products_contract(diag_set, 12)
        assert isinstance(out, NotUpTo) and out.n_max == 12
        assert out.worst_word == (1,) * 12 and out.worst_norm == pytest.approx(1e24, rel=1e-12)

    def test_single_jordan_like_matrix_matches_power_oracle(self):
        a = np.array([[0.9, 10.0], [0.0, 0.9]])
        expected = power_norm_oracle(a)
        out = check_all_products_contract(MatrixSet.from_lists([a]), 100, limits=Limits(max_word_length=100))
        assert isinstance(out, Found) and out.n == expected

    def test_boundary_cases_are_reported(self):
        out = check_all_products_contract(MatrixSet.from_lists([np.eye(2), 0.5 * np.eye(2)]), 3)
        assert isinstance(out, NotUpTo)
        assert [(b.n, b.word) for b in out.boundary] == [(1, (0,)), (2, (0, 0)), (3, (0, 0, 0))]

    def test_subshift_can_certify(self):
        ms = MatrixSet.from_lists([[[1.2]], [[0.5]]])
        sub = Subshift.from_strings(ms.alphabet, ["00"])
        out = check_all_products_contract(ms, 4, sub)
        assert isinstance(out, Found) and out.n == 2

    def test_found_implies_decay(self):
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 5:
            ms = random_matrix_set(rng, max_alpha=2).scaled(0.45)
            out = check_all_products_contract(ms, 6)
            if not isinstance(out, Found):
                continue
            checked += 1
            assert bounds_report(matrix_functional(ms), out.n).records[-1].running_upper < 1
            # length-(k N) products have norm <= worst ** k
            k = math.ceil(math.log(1e-9) / math.log(out.worst_norm))
            for _ in range(200):
                w = rng.integers(ms.alphabet.size, size=k * out.n)
                assert np.linalg.norm(ms.product(w), 2) < 1e-8


class TestDiagonalPairDiagnostic:
    def test_diagnostic_lines(self):
        rep = reproduce_remark_example()
        by_item = {ln.item: ln for ln in rep.lines}
        assert by_item["norm (A0 A1)^1"].computed == 30.0
        assert by_item["norm (A0 A1)^3"].computed == 27000.0
        assert by_item["Phi_2 unconstrained"].computed == 10000.0
        assert by_item["Phi* unconstrained, certified lower"].status == "DISCREPANCY"
        assert by_item["forbid 11: running upper n=2, per letter"].computed == pytest.approx(5.47722557, rel=1e-9)
        assert by_item["forbid 11: certified lower, per period of length 2"].status == "MATCH"
        assert len(rep.discrepancies) >= 2
