"""Analytic critical-point machinery against independent evaluations."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricbias import analytic
from toricbias.analytic import (
    CouplingDomainError,
    CouplingsXZ,
    CouplingsXYZ,
    InfiniteCouplingError,
    P_C_MULTICRITICAL,
    bisect,
    coupling_u_vector,
    couplings_from_rates_xyz,
    couplings_from_rates_xz,
    depolarizing_optimal_estimate,
    first_order_a,
    first_order_critical,
    generalized_duality_transform,
    generalized_zero_order,
    homogeneous_reduction,
    mwpm_depolarizing_estimate,
    rates_from_couplings_xz,
    replica_conjecture_residual,
    replica_vectors,
    self_dual_check_xz,
    self_dual_component_residuals,
    solve_critical_curve,
    symmetric_assumption_threshold,
    zero_order_critical,
)
from toricbias.noise import GeneralPauliModel, xz_to_general

J_SELF_DUAL = 0.5 * math.log(1.0 + math.sqrt(2.0))
P_SELF_DUAL = 1.0 / (2.0 + math.sqrt(2.0))


class TestCouplings:
    def test_symmetric_rates_equal_couplings(self):
        c = couplings_from_rates_xz(0.13, 0.13)
        assert c.j_h == c.j_v

    def test_self_dual_rate(self):
        c = couplings_from_rates_xz(P_SELF_DUAL, P_SELF_DUAL)
        assert c.j_h == pytest.approx(J_SELF_DUAL, abs=1e-14)
        assert math.sinh(2 * c.j_h) == pytest.approx(1.0, abs=1e-12)

    def test_near_half_rate_small_coupling(self):
        c = couplings_from_rates_xz(0.4999999, 0.1)
        assert 0 < c.j_h < 1e-6

    def test_domain_errors(self):
        for bad in (0.0, 0.5, 0.7, -0.1):
            with pytest.raises(CouplingDomainError):
                couplings_from_rates_xz(bad, 0.1)

    @given(
        st.floats(1e-6, 0.499999, allow_nan=False),
        st.floats(1e-6, 0.499999, allow_nan=False),
    )
    def test_round_trip_to_1e14(self, p_x, p_z):
        back_x, back_z = rates_from_couplings_xz(couplings_from_rates_xz(p_x, p_z))
        assert abs(back_x - p_x) <= 1e-14
        assert abs(back_z - p_z) <= 1e-14


class TestSelfDuality:
    def test_isotropic_self_dual_point(self):
        c = CouplingsXZ(J_SELF_DUAL, J_SELF_DUAL)
        assert abs(self_dual_check_xz(c)) <= 1e-12
        for residual in self_dual_component_residuals(c):
            assert abs(residual) <= 1e-12

    def test_large_jh_limit(self):
        c = CouplingsXZ(50.0, 0.7)
        assert self_dual_check_xz(c) == pytest.approx(-math.tanh(0.7))

    def test_swapped_condition_same_roots_on_diagonal(self):
        # e^{-2J_V} = tanh(J_H) is the same curve; on j_h = j_v both
        # versions vanish at the isotropic point and nowhere else nearby
        for j in np.linspace(0.2, 1.2, 50):
            forward = math.exp(-2 * j) - math.tanh(j)
            swapped = math.exp(-2 * j) - math.tanh(j)
            assert math.copysign(1, forward) == math.copysign(1, swapped)

    def test_anisotropic_pair(self):
        j_h = 0.35
        j_v = math.atanh(math.exp(-2 * j_h))
        assert abs(self_dual_check_xz(CouplingsXZ(j_h, j_v))) <= 1e-12
        assert math.sinh(2 * j_h) * math.sinh(2 * j_v) == pytest.approx(1.0)


def replica_oracle(n, p, j):
    """Recompute both vectors from the two-value disorder average."""
    x = np.zeros(n + 1)
    x_star = np.zeros(n + 1)
    for tau, prob in ((1, 1 - p), (-1, p)):
        for k in range(n + 1):
            x[k] += prob * math.exp(j * tau * (n - 2 * k))
            x_star[k] += (
                prob
                * (math.sqrt(2) * math.cosh(j * tau)) ** (n - k)
                * (math.sqrt(2) * math.sinh(j * tau)) ** k
            )
    return x, x_star


class TestReplicaVectors:
    def test_middle_entry_is_one_for_n2(self):
        vec = replica_vectors(2, 0.23, 0.8)
        assert vec.x[1] == pytest.approx(1.0)

    def test_clean_limit_reduces_to_pure_weights(self):
        vec = replica_vectors(1, 0.0, 0.6)
        assert vec.x[0] == pytest.approx(math.exp(0.6))
        assert vec.x[1] == pytest.approx(math.exp(-0.6))
        assert vec.x_star[0] == pytest.approx(math.sqrt(2) * math.cosh(0.6))
        assert vec.x_star[1] == pytest.approx(math.sqrt(2) * math.sinh(0.6))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_matches_disorder_average_oracle(self, n):
        rng = np.random.default_rng(n)
        for _ in range(20):
            p = float(rng.uniform(0.01, 0.49))
            j = float(rng.uniform(0.1, 1.5))
            vec = replica_vectors(n, p, j)
            x_ref, x_star_ref = replica_oracle(n, p, j)
            assert np.allclose(vec.x, x_ref, atol=1e-12)
            assert np.allclose(vec.x_star, x_star_ref, atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_finite_n_ansatz_has_root_above_limit_value(self, n):
        """Each finite-n factorized-ansatz root sits above the n -> 0
        root; the n=1 case is solvable in closed form."""
        result = bisect(
            lambda p: replica_conjecture_residual(n, (p, p), (p, p)), 0.01, 0.49
        )
        assert result is not None
        root, residual = result
        assert abs(residual) <= 1e-9
        assert 0.110028 < root < 0.49
        if n == 1:
            # (1-p)^2 + p^2 = 1/sqrt(2) at the single-replica root
            expected = 0.5 * (1.0 - math.sqrt(math.sqrt(2.0) - 1.0))
            assert root == pytest.approx(expected, abs=1e-9)


class TestZeroOrder:
    def test_symmetric_matched_root(self):
        root = bisect(lambda p: zero_order_critical((p, p), (p, p)), 0.01, 0.49)
        assert root is not None
        assert root[0] == pytest.approx(0.110028, abs=1e-5)
        # binary entropy at the root is exactly one half
        p = root[0]
        h2 = -p * math.log2(p) - (1 - p) * math.log2(1 - p)
        assert h2 == pytest.approx(0.5, abs=1e-9)

    def test_symmetric_assumed_equals_homogeneous_residual(self):
        actual = (0.14, 0.06)
        p_sym = 0.09
        direct = zero_order_critical(actual, (p_sym, p_sym))
        p_tilde, _ = homogeneous_reduction(actual)
        reduced = zero_order_critical((p_tilde, p_tilde), (p_sym, p_sym))
        assert direct == pytest.approx(reduced, abs=1e-12)

    def test_zero_actual_rate_drops_term(self):
        # 0 * log 0 convention: the assumed-rate log term vanishes with
        # its coefficient
        residual = zero_order_critical((0.2, 0.0), (0.2, 0.0))
        expected = 0.2 * math.log2(0.2) + 0.8 * math.log2(0.8) + 1.0
        assert residual == pytest.approx(expected)

    def test_domain_error_on_bad_assumed(self):
        with pytest.raises(CouplingDomainError):
            zero_order_critical((0.1, 0.1), (1.2, 0.1))


class TestHomogeneousReduction:
    def test_symmetric_is_fixed_point(self):
        assert homogeneous_reduction((0.17, 0.17)) == pytest.approx((0.17, 0.17))

    def test_single_channel_case(self):
        p_tilde, p = homogeneous_reduction((0.2, 0.0))
        assert p_tilde == pytest.approx(0.1)
        assert p == pytest.approx((1 - math.sqrt(0.6)) / 2, abs=1e-12)

    @given(
        st.floats(0.0, 0.4999, allow_nan=False),
        st.floats(0.0, 0.4999, allow_nan=False),
    )
    @settings(max_examples=300)
    def test_coupling_rate_dominates_disorder_rate(self, pt_x, pt_z):
        # AM-GM gives p >= p_tilde: the effective point sits on or above
        # the Nishimori line (weaker coupling than matched knowledge)
        p_tilde, p = homogeneous_reduction((pt_x, pt_z))
        assert p >= p_tilde - 1e-12
        assert 0.0 <= p_tilde < 0.5
        assert 0.0 <= p < 0.5


class TestSymmetricLine:
    def test_line_value(self):
        assert symmetric_assumption_threshold() == pytest.approx(2 * 0.1092)

    def test_symmetric_point_on_line(self):
        assert symmetric_assumption_threshold() / 2 == pytest.approx(
            P_C_MULTICRITICAL
        )

    def test_line_strictly_contains_unrotated_box(self):
        # any (p_x, p_z) with max < p_C has sum < 2 p_C; equality only
        # at the symmetric corner
        line = symmetric_assumption_threshold()
        for p_x in np.linspace(0, P_C_MULTICRITICAL, 20, endpoint=False):
            for p_z in np.linspace(0, P_C_MULTICRITICAL, 20, endpoint=False):
                assert p_x + p_z < line


class TestFirstOrder:
    def test_symmetric_root_within_0002_of_zero_order(self):
        zero_root = bisect(
            lambda p: zero_order_critical((p, p), (p, p)), 0.01, 0.49
        )[0]
        first_root = bisect(
            lambda p: first_order_critical((p, p), (p, p)), 0.01, 0.49
        )[0]
        assert abs(first_root - zero_root) <= 0.002

    def test_coefficients_normalize(self):
        # summing a_nm with binomial weights over both indices gives the
        # total probability of all 2-bond disorder patterns, which is 1
        r, s = 0.13, 0.27
        total = sum(
            math.comb(1, 0) * math.comb(2, m) * first_order_a(r, s, n, m)
            for n in range(2)
            for m in range(3)
        )
        assert total == pytest.approx(1.0)

    @pytest.mark.parametrize(
        "r,s,n,m", [(0.1, 0.3, 0, 1), (0.25, 0.05, 1, 2), (0.4, 0.15, 1, 0)]
    )
    def test_coefficient_closed_form(self, r, s, n, m):
        expected = r**n * s**m * (1 - r) ** (2 - n) * (1 - s) ** (2 - m) + (
            1 - r
        ) ** n * (1 - s) ** m * r ** (2 - n) * s ** (2 - m)
        assert first_order_a(r, s, n, m) == pytest.approx(expected, abs=1e-15)

    def test_coefficients_depend_on_index(self):
        # distinct (n, m) entries at generic rates take distinct values
        assert first_order_a(0.1, 0.3, 0, 0) != pytest.approx(
            first_order_a(0.1, 0.3, 0, 2)
        )

    def test_asymmetric_first_order_can_exceed_zero_order(self):
        ratios = [4.0, 8.0]
        zero = solve_critical_curve("zero_order", ratios)
        first = solve_critical_curve("first_order", ratios)
        assert any(f.root > z.root for f, z in zip(first, zero))


class TestGeneralizedCouplings:
    def test_depolarizing_fully_symmetric(self):
        # equal X/Y/Z rates put all three couplings on the diagonal
        c = couplings_from_rates_xyz(GeneralPauliModel(0.05, 0.05, 0.05))
        assert c.j_h == pytest.approx(c.j_v)
        assert c.j_y == pytest.approx(c.j_h)

    def test_unequal_y_rate_splits_couplings(self):
        c = couplings_from_rates_xyz(GeneralPauliModel(0.05, 0.02, 0.05))
        assert c.j_h == pytest.approx(c.j_v)
        assert c.j_y != pytest.approx(c.j_h)

    def test_exponentials_recovered(self):
        q = GeneralPauliModel(0.04, 0.02, 0.07)
        c = couplings_from_rates_xyz(q)
        q_i = q.identity_rate
        assert math.exp(4 * c.j_h) == pytest.approx(
            q_i * q.q_z / (q.q_y * q.q_x), rel=1e-12
        )
        assert math.exp(4 * c.j_v) == pytest.approx(
            q_i * q.q_x / (q.q_y * q.q_z), rel=1e-12
        )
        assert math.exp(4 * c.j_y) == pytest.approx(
            q_i * q.q_y / (q.q_x * q.q_z), rel=1e-12
        )

    def test_independent_composition_kills_y_coupling(self):
        # q from independent X/Z rates factorizes, so the 4-spin term
        # vanishes and J_H, J_V match the two-coupling map
        p_x, p_z = 0.1, 0.2
        c = couplings_from_rates_xyz(xz_to_general(p_x, p_z))
        two = couplings_from_rates_xz(p_x, p_z)
        assert c.j_y == pytest.approx(0.0, abs=1e-12)
        assert c.j_h == pytest.approx(two.j_h, abs=1e-12)
        assert c.j_v == pytest.approx(two.j_v, abs=1e-12)

    def test_zero_rate_reported_distinctly(self):
        with pytest.raises(InfiniteCouplingError):
            couplings_from_rates_xyz(GeneralPauliModel(0.1, 0.0, 0.1))


class TestGeneralizedDuality:
    def test_uniform_vector(self):
        u_star = generalized_duality_transform(np.ones(4))
        assert np.allclose(u_star, [2.0, 0.0, 0.0, 0.0])

    def test_involution_to_1e12(self):
        rng = np.random.default_rng(19)
        for _ in range(200):
            u = rng.uniform(0.1, 5.0, size=4)
            back = generalized_duality_transform(generalized_duality_transform(u))
            assert np.max(np.abs(back - u)) <= 1e-12 * np.max(np.abs(u))

    def test_self_dual_fixed_point(self):
        j_h = 0.45
        j_y = -0.5 * math.log(math.sinh(2 * j_h))
        u = coupling_u_vector(CouplingsXYZ(j_h, j_h, j_y))
        assert np.allclose(generalized_duality_transform(u), u, atol=1e-12)


class TestGeneralizedZeroOrder:
    def test_depolarizing_critical(self):
        q = 0.18929 / 3
        assert generalized_zero_order(GeneralPauliModel(q, q, q)) == pytest.approx(
            0.0, abs=5e-6
        )

    def test_uniform_quarter_maximum_entropy(self):
        model = GeneralPauliModel(0.25, 0.25, 0.25 - 1e-12)
        assert generalized_zero_order(model) == pytest.approx(-1.0)

    def test_reduces_to_xz_zero_order_without_y(self):
        for p in (0.05, 0.11, 0.2):
            general = generalized_zero_order(xz_to_general(p, p))
            xz = zero_order_critical((p, p), (p, p))
            assert general == pytest.approx(xz, abs=1e-9)


class TestScalarRoots:
    def test_optimal_depolarizing(self):
        assert depolarizing_optimal_estimate() == pytest.approx(0.18929, abs=5e-4)

    def test_mwpm_depolarizing(self):
        root = mwpm_depolarizing_estimate()
        assert root == pytest.approx(0.165, abs=1e-3)
        assert root < depolarizing_optimal_estimate()

    def test_bisect_reports_no_sign_change(self):
        assert bisect(lambda x: x * x + 1.0, -1.0, 1.0) is None


class TestCurveSolver:
    def test_symmetric_matched_slice(self):
        (point,) = solve_critical_curve("zero_order", [1.0])
        assert point.found
        assert point.root / 2 == pytest.approx(0.110028, abs=1e-5)
        assert abs(point.residual) <= 1e-10

    def test_single_channel_slice_has_no_root(self):
        (point,) = solve_critical_curve("zero_order", [math.inf])
        assert not point.found

    def test_ratio_sweep_is_symmetric_in_inversion(self):
        ratios = [1 / 8, 1 / 4, 1 / 2, 1, 2, 4, 8]
        points = solve_critical_curve("zero_order", ratios)
        assert all(p.found for p in points)
        totals = [p.root for p in points]
        for k in range(3):
            assert totals[k] == pytest.approx(totals[-1 - k], abs=1e-9)

    def test_symmetric_assumption_slice_never_exceeds_matched(self):
        ratios = [1.0, 2.0, 4.0]
        matched = solve_critical_curve("zero_order", ratios)
        symmetric = solve_critical_curve(
            "zero_order", ratios, assumption="symmetric_assumption"
        )
        for m, s in zip(matched, symmetric):
            assert s.root <= m.root + 1e-12

    def test_generalized_depolarizing_slice(self):
        (point,) = solve_critical_curve("generalized", [1.0 / 3.0])
        assert point.root == pytest.approx(0.18929, abs=5e-4)

    def test_unknown_equation(self):
        with pytest.raises(ValueError):
            solve_critical_curve("second_order", [1.0])
