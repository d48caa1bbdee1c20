"""Tests for the relation tensor, F table and semiclassical limit."""

import math

import numpy as np
import pytest

from ellpoisson.errors import DegenerateEtaError
from ellpoisson.fo import (
    f_constants,
    fo_relations,
    semiclassical_from_relations,
    sklyanin_bracket,
)
from ellpoisson.theta import CurveParams, ThetaBasis, theta_alpha_eval


def basis(n, tau=1j):
    return ThetaBasis(CurveParams(tau, n))


class TestFConstants:
    def test_f00_is_zero(self):
        f = f_constants(basis(3))
        assert f.c(0, 0) == 0

    def test_antidiagonal_vanishes(self):
        # alpha + beta = 0 makes the numerator theta_0(0) = 0
        f = f_constants(basis(3))
        assert f.c(1, 2) == 0

    @pytest.mark.parametrize("n", [3, 5, 7])
    def test_symmetries(self, n):
        f = f_constants(basis(n))
        t = f.table
        assert np.max(np.abs(t - t.T)) < 1e-10
        idx = np.arange(n)
        neg = t[np.ix_((-idx) % n, (-idx) % n)]
        scale = np.max(np.abs(t))
        assert np.max(np.abs(t + neg)) < 1e-10 * scale


class TestRelations:
    def test_entry_matches_direct_substitution(self):
        n, k, eta = 3, 1, 0.11 + 0.07j
        b = basis(n)
        rel = fo_relations(b, k, eta)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                # r = 0 entry recomputed from scratch
                expected = (b.theta_at_zero[(j - i) % n]
                            / (theta_alpha_eval(b, 0, eta)
                               * theta_alpha_eval(b, j - i, -eta)))
                assert abs(rel.relation(i, j)[0] - expected) < 1e-12 * abs(expected)
        assert np.all(np.isfinite(rel.coeffs))

    def test_torsion_eta_rejected(self):
        with pytest.raises(DegenerateEtaError):
            fo_relations(basis(3), 1, 1.0 / 3.0)

    def test_relation_count_structural(self):
        n = 3
        rel = fo_relations(basis(n), 1, 0.11 + 0.07j)
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
        assert len(pairs) == n * (n - 1)
        # i < j representatives: n(n-1)/2 independent pairs
        assert len([p for p in pairs if p[0] < p[1]]) == n * (n - 1) // 2

    def test_non_coprime_rejected(self):
        with pytest.raises(ValueError):
            fo_relations(basis(4), 2, 0.1 + 0.05j)


class TestSklyaninBracket:
    def test_formula_skew_consistency(self):
        # the closed form written for (j, i) equals minus the (i, j) one
        b = basis(5)
        k = 2
        n = 5
        th = b.theta_at_zero
        dth = b.dtheta_at_zero
        br = sklyanin_bracket(b, k)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                d = (j - i) % n
                expect = {}
                key = tuple(sorted((i, j)))
                diag = (dth[d] / th[d] + dth[(k * d) % n] / th[(k * d) % n]
                        - 2j * math.pi * n)
                expect[key] = expect.get(key, 0j) + diag
                for r in range(n):
                    if r in (0, d):
                        continue
                    coeff = (th[(d + r * (k - 1)) % n] * dth[0]
                             / (th[(k * r) % n] * th[(d - r) % n]))
                    kk = tuple(sorted(((j - r) % n, (i + r) % n)))
                    expect[kk] = expect.get(kk, 0j) + coeff
                got = br.pair_coeffs(i, j)
                for mono in set(expect) | set(got):
                    assert abs(expect.get(mono, 0j) - got.get(mono, 0j)) < 1e-9

    def test_gcd_validated(self):
        with pytest.raises(ValueError):
            sklyanin_bracket(basis(4), 2)


class TestSemiclassical:
    def test_matches_closed_form_two_points(self):
        # two-point extrapolation leaves the quadratic term: measured
        # deviation 2.35e-5 for this sequence, frozen with headroom
        b = basis(3)
        est = semiclassical_from_relations(b, 1, [1e-3, 5e-4])
        ref = sklyanin_bracket(b, 1)
        assert est.max_difference(ref) < 5e-5

    def test_matches_closed_form_three_points(self):
        b = basis(3)
        est = semiclassical_from_relations(b, 1, [1e-2, 1e-3, 1e-4])
        ref = sklyanin_bracket(b, 1)
        assert est.max_difference(ref) < 1e-4

    def test_convergence_order_at_least_one(self):
        from ellpoisson.fo import single_eta_bracket
        from ellpoisson.poisson import QuadraticBracket
        b = basis(3)
        ref = sklyanin_bracket(b, 1)
        etas = [1e-2, 1e-3, 1e-4]
        devs = [QuadraticBracket(3, single_eta_bracket(b, 1, eta)).max_difference(ref)
                for eta in etas]
        slope = np.polyfit(np.log(etas), np.log(devs), 1)[0]
        # first-order error gives slope 1.0 up to fit noise
        assert slope >= 0.99

    def test_torsion_point_in_sequence_rejected(self):
        with pytest.raises(DegenerateEtaError):
            semiclassical_from_relations(basis(3), 1, [1e-3, 1.0 / 3.0])

    def test_needs_two_values(self):
        with pytest.raises(ValueError):
            semiclassical_from_relations(basis(3), 1, [1e-3])

    def test_k_dependence(self):
        # k enters through theta_{kr}; k = 1 and k = n-1 differ at n = 5
        b = basis(5)
        b1 = sklyanin_bracket(b, 1)
        b4 = sklyanin_bracket(b, 4)
        assert b1.max_difference(b4) > 1e-3
