"""Tests for the theta evaluators and the Heisenberg action."""

import cmath
import math

import numpy as np
import pytest

from ellpoisson.theta import (
    T_ONE_OVER_N,
    T_TAU_OVER_N,
    CurveParams,
    ThetaBasis,
    ThetaSection,
    heisenberg_act,
    section_eval,
    theta_alpha_deriv,
    theta_alpha_eval,
    theta_eval,
    verify_automorphy,
    zeta_multiplier,
)

TAU_SQUARE = 1j
TAU_GENERIC = 0.3 + 0.8j


def theta_brute(z, tau, terms=50):
    """Direct high-truncation summation oracle, no reduction tricks."""
    total = 0j
    for m in range(-terms, terms + 1):
        total += (-1) ** m * cmath.exp(
            2j * math.pi * (m * z + m * (m - 1) * tau / 2.0))
    return total


def basis(n, tau):
    return ThetaBasis(CurveParams(tau, n))


def sample_points(tau, count, seed=0):
    rng = np.random.default_rng(seed)
    return rng.random(count) + rng.random(count) * tau


class TestThetaEval:
    def test_vanishes_at_origin(self):
        for tau in (TAU_SQUARE, TAU_GENERIC):
            assert abs(theta_eval(tau, 0.0)) < 1e-12

    def test_periodicity_in_one(self):
        z = 0.31 + 0.22j
        for tau in (TAU_SQUARE, TAU_GENERIC):
            assert abs(theta_eval(tau, z + 1) - theta_eval(tau, z)) < 1e-12

    def test_matches_brute_force_oracle(self):
        val = theta_eval(TAU_SQUARE, 0.5)
        assert abs(val - theta_brute(0.5, TAU_SQUARE)) < 1e-12

    def test_matches_oracle_on_random_points(self):
        for tau in (TAU_SQUARE, TAU_GENERIC):
            for z in sample_points(tau, 12, seed=3):
                assert abs(theta_eval(tau, z) - theta_brute(z, tau)) < 1e-11

    def test_rejects_bad_tau(self):
        with pytest.raises(ValueError):
            theta_eval(-1j, 0.3)

    def test_truncation_soundness(self):
        z = sample_points(TAU_GENERIC, 25, seed=5)
        base = theta_eval(TAU_GENERIC, z)
        from ellpoisson.theta import series_bound_for
        m = series_bound_for(TAU_GENERIC, 1e-12)
        doubled = theta_eval(TAU_GENERIC, z, series_bound=2 * m)
        assert np.max(np.abs(base - doubled)) < 1e-12

    def test_quasi_periodicity_large_shift(self):
        # reduction handles arguments far outside the cell
        z = 0.2 + 0.1j
        tau = TAU_GENERIC
        direct = theta_brute(z + 3 * tau - 2, tau, terms=80)
        assert abs(theta_eval(tau, z + 3 * tau - 2) - direct) < 1e-9 * abs(direct)


class TestThetaAlpha:
    def test_theta0_vanishes_on_divisor(self):
        b = basis(3, TAU_SQUARE)
        for k in range(-3, 4):
            assert abs(theta_alpha_eval(b, 0, k / 3)) < 1e-10

    @pytest.mark.parametrize("n", [3, 5, 7])
    @pytest.mark.parametrize("tau", [TAU_SQUARE, TAU_GENERIC])
    def test_property_one(self, n, tau):
        b = basis(n, tau)
        z = sample_points(tau, 20, seed=1)
        for alpha in range(n):
            lhs = theta_alpha_eval(b, alpha, z + 1.0 / n)
            rhs = b.omega ** alpha * theta_alpha_eval(b, alpha, z)
            scale = np.max(np.abs(rhs))
            assert np.max(np.abs(lhs - rhs)) < 1e-8 * scale

    @pytest.mark.parametrize("n", [3, 5, 7])
    @pytest.mark.parametrize("tau", [TAU_SQUARE, TAU_GENERIC])
    def test_property_two(self, n, tau):
        b = basis(n, tau)
        z = sample_points(tau, 20, seed=2)
        for alpha in range(n):
            lhs = theta_alpha_eval(b, alpha, z + tau / n)
            mult = np.exp(-2j * math.pi * (z + 1 / (2 * n) - (n - 1) * tau / (2 * n)))
            rhs = mult * theta_alpha_eval(b, alpha + 1, z)
            scale = np.max(np.abs(rhs))
            assert np.max(np.abs(lhs - rhs)) < 1e-8 * scale

    @pytest.mark.parametrize("n", [3, 5, 7])
    @pytest.mark.parametrize("tau", [TAU_SQUARE, TAU_GENERIC])
    def test_property_three(self, n, tau):
        b = basis(n, tau)
        z = sample_points(tau, 20, seed=4)
        for alpha in range(n):
            lhs = theta_alpha_eval(b, -alpha, -z)
            rhs = (-np.exp(-2j * math.pi * alpha / n)
                   * np.exp(-2j * math.pi * n * z)
                   * theta_alpha_eval(b, alpha, z))
            scale = np.max(np.abs(rhs))
            assert np.max(np.abs(lhs - rhs)) < 1e-8 * scale

    def test_index_periodicity(self):
        # theta_{alpha+n} from the defining product agrees with theta_alpha
        from ellpoisson.theta import theta_alpha_raw
        for tau in (TAU_SQUARE, TAU_GENERIC):
            b = basis(5, tau)
            z = sample_points(tau, 10, seed=6)
            for alpha in range(5):
                lhs = theta_alpha_raw(b, alpha + 5, z)
                rhs = theta_alpha_raw(b, alpha, z)
                assert np.max(np.abs(lhs - rhs)) < 1e-8 * np.max(np.abs(rhs))


class TestThetaAlphaDeriv:
    def test_second_log_derivative_identity(self):
        # theta_0''(0)/theta_0'(0) = 2*pi*i*n
        for n in (3, 5, 7):
            for tau in (TAU_SQUARE, TAU_GENERIC):
                b = basis(n, tau)
                ratio = theta_alpha_deriv(b, 0, 0.0, 2) / b.dtheta_at_zero[0]
                assert abs(ratio - 2j * math.pi * n) < 1e-8

    def test_negated_index_log_derivative(self):
        # theta_{-a}'(0)/theta_{-a}(0) = 2*pi*i*n - theta_a'(0)/theta_a(0)
        b = basis(5, TAU_SQUARE)
        for alpha in range(1, 5):
            lhs = b.ratio_dtheta(-alpha % 5)
            rhs = 2j * math.pi * 5 - b.ratio_dtheta(alpha)
            assert abs(lhs - rhs) < 1e-9

    def test_against_finite_differences(self):
        b = basis(3, TAU_SQUARE)
        h = 1e-5
        for alpha in range(3):
            for z in (0.21 + 0.17j, 0.43 + 0.61j):
                fd1 = (theta_alpha_eval(b, alpha, z + h)
                       - theta_alpha_eval(b, alpha, z - h)) / (2 * h)
                an1 = theta_alpha_deriv(b, alpha, z, 1)
                assert abs(an1 - fd1) < 1e-7
                fd2 = (theta_alpha_eval(b, alpha, z + h)
                       - 2 * theta_alpha_eval(b, alpha, z)
                       + theta_alpha_eval(b, alpha, z - h)) / h ** 2
                an2 = theta_alpha_deriv(b, alpha, z, 2)
                assert abs(an2 - fd2) < 1e-5 * max(1.0, abs(an2))

    def test_dtheta0_constant_on_divisor(self):
        for tau in (TAU_SQUARE, TAU_GENERIC):
            b = basis(5, tau)
            ref = b.dtheta_at_zero[0]
            for k in range(5):
                val = theta_alpha_deriv(b, 0, k / 5, 1)
                assert abs(val - ref) < 1e-8 * abs(ref)


class TestHeisenberg:
    def test_scaling_generator_fixes_e0(self):
        b = basis(4, TAU_SQUARE)
        e0 = ThetaSection(np.array([1, 0, 0, 0]))
        out = heisenberg_act(b, T_ONE_OVER_N, e0)
        assert np.array_equal(out.coeffs, e0.coeffs)

    def test_shift_has_order_n(self):
        b = basis(5, TAU_GENERIC)
        rng = np.random.default_rng(7)
        sec = ThetaSection(rng.random(5) + 1j * rng.random(5))
        out = sec
        for _ in range(5):
            out = heisenberg_act(b, T_TAU_OVER_N, out)
        assert np.allclose(out.coeffs, sec.coeffs, atol=0)

    def test_commutation_exact(self):
        b = basis(4, TAU_SQUARE)
        rng = np.random.default_rng(8)
        sec = ThetaSection(rng.random(4) + 1j * rng.random(4))
        ab = heisenberg_act(b, T_ONE_OVER_N, heisenberg_act(b, T_TAU_OVER_N, sec))
        ba = heisenberg_act(b, T_TAU_OVER_N, heisenberg_act(b, T_ONE_OVER_N, sec))
        assert np.max(np.abs(ab.coeffs - b.omega * ba.coeffs)) < 1e-15

    def test_shift_operator_pointwise(self):
        # zeta(z)^-1 theta_alpha(z + tau/n) equals theta_{alpha+1}(z)
        n = 3
        b = basis(n, TAU_SQUARE)
        z = sample_points(TAU_SQUARE, 10, seed=9)
        for alpha in range(n):
            lhs = theta_alpha_eval(b, alpha, z + b.params.tau / n) / zeta_multiplier(b, z)
            rhs = theta_alpha_eval(b, alpha + 1, z)
            assert np.max(np.abs(lhs - rhs)) < 1e-8 * np.max(np.abs(rhs))

    def test_section_eval_matches_operator(self):
        n = 3
        b = basis(n, TAU_GENERIC)
        rng = np.random.default_rng(10)
        sec = ThetaSection(rng.random(n) + 1j * rng.random(n))
        z = sample_points(TAU_GENERIC, 8, seed=11)
        shifted = heisenberg_act(b, T_TAU_OVER_N, sec)
        lhs = section_eval(b, sec, z + b.params.tau / n) / zeta_multiplier(b, z)
        rhs = section_eval(b, shifted, z)
        assert np.max(np.abs(lhs - rhs)) < 1e-8 * np.max(np.abs(rhs))


class TestAutomorphy:
    def test_basic_theta_is_weight_one(self):
        b = basis(3, TAU_SQUARE)
        res = verify_automorphy(
            b, 0, lambda z: theta_eval(TAU_SQUARE, z), weight=1)
        assert res < 1e-9

    def test_zero_section(self):
        b = basis(3, TAU_SQUARE)
        res = verify_automorphy(b, 0, lambda z: np.zeros_like(np.asarray(z)))
        assert res == 0.0

    @pytest.mark.parametrize("n", [3, 5])
    def test_character_scan_identifies_constant(self, n):
        # scanning c over m/(2n) certifies the basis character c = (n-1)/2
        b = basis(n, TAU_SQUARE)
        f = lambda z: theta_alpha_eval(b, 1, z)
        cs = [m / (2 * n) for m in range(2 * n)]
        residuals = [verify_automorphy(b, c, f) for c in cs]
        best = min(range(len(cs)), key=lambda i: residuals[i])
        assert abs((cs[best] - (n - 1) / 2) % 1.0) < 1e-12
        assert residuals[best] < 1e-8
