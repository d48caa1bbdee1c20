"""Elliptic quadratic-algebra relations and their semiclassical bracket.

For coprime 0 < k < n and a translation parameter eta, the algebra on
generators x_i, i in Z/n, is cut out by the relations

    sum_r  theta_{j-i+r(k-1)}(0) / (theta_{kr}(eta) theta_{j-i-r}(-eta))
           * x_{j-r} x_{i+r}         (i != j).

Dividing by the first-order commutator scale and letting eta -> 0 produces
a quadratic Poisson bracket; its closed form (implemented in
:func:`sklyanin_bracket`) has, for i != j,

    {x_i, x_j} = (th'_{j-i}/th_{j-i} + th'_{k(j-i)}/th_{k(j-i)} - 2 pi i n)
                 * x_i x_j
               + sum_{r != 0, j-i} th_{j-i+r(k-1)}(0) th'_0(0) /
                 (th_{kr}(0) th_{j-i-r}(0)) * x_{j-r} x_{i+r},

with all values taken at z = 0.  :func:`semiclassical_from_relations`
recovers the same tensor directly from the finite-eta relations by
Richardson extrapolation and serves as the independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEtaError, DegenerateTauError, ExtrapolationError
from .poisson import QuadraticBracket
from .theta import ThetaBasis, theta_alpha_eval


@dataclass(frozen=True)
class FConstants:
    """The symmetric table F(alpha, beta) built from theta values at 0.

    F(a, b) = theta'_0(0) theta_{a+b}(0) / (theta_a(0) theta_b(0)) off the
    axes, F(0, a) = F(a, 0) = theta'_a(0)/theta_a(0) - pi*i*n, F(0,0) = 0.
    """

    n: int
    table: np.ndarray

    def c(self, alpha, beta):
        return self.table[alpha % self.n, beta % self.n]


def f_constants(basis: ThetaBasis) -> FConstants:
    n = basis.n
    th = basis.theta_at_zero
    dth = basis.dtheta_at_zero
    scale = float(np.max(np.abs(dth)))
    if n > 1 and float(np.min(np.abs(th[1:]))) < 1e-12 * scale:
        raise DegenerateTauError("theta_alpha(0) vanished; F table undefined")
    table = np.zeros((n, n), dtype=complex)
    for a in range(1, n):
        table[0, a] = table[a, 0] = dth[a] / th[a] - 1j * math.pi * n
        for b in range(1, n):
            table[a, b] = dth[0] * th[(a + b) % n] / (th[a] * th[b])
    return FConstants(n, table)


@dataclass(frozen=True)
class FORelationTensor:
    """Relation coefficients R[i, j, r] at a fixed translation parameter.

    Rows with i == j are not part of the presentation and are left zero.
    """

    n: int
    k: int
    eta: complex
    coeffs: np.ndarray

    def relation(self, i, j):
        if i % self.n == j % self.n:
            raise IndexError("relations are indexed by pairs i != j")
        return self.coeffs[i % self.n, j % self.n]


def _check_coprime(n: int, k: int):
    if not 0 < k < n:
        raise ValueError("k must satisfy 0 < k < n")
    if math.gcd(n, k) != 1:
        raise ValueError("gcd(n,k) must be 1")


def fo_relations(basis: ThetaBasis, k: int, eta: complex) -> FORelationTensor:
    """The quadratic relation tensor at translation parameter eta."""
    n = basis.n
    _check_coprime(n, k)
    eta = complex(eta)
    floor = 1e-10 * abs(basis.dtheta_at_zero[0] * eta)
    th_pos = np.array([theta_alpha_eval(basis, a, eta) for a in range(n)])
    th_neg = np.array([theta_alpha_eval(basis, a, -eta) for a in range(n)])
    for a in range(n):
        if abs(th_pos[a]) < floor:
            raise DegenerateEtaError(
                f"theta_{a}(eta) ~ 0 at eta={eta}: torsion-degenerate")
        if abs(th_neg[a]) < floor:
            raise DegenerateEtaError(
                f"theta_{a}(-eta) ~ 0 at eta={eta}: torsion-degenerate")
    th0 = basis.theta_at_zero
    coeffs = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for r in range(n):
                num = th0[(j - i + r * (k - 1)) % n]
                coeffs[i, j, r] = num / (th_pos[(k * r) % n] * th_neg[(j - i - r) % n])
    return FORelationTensor(n, k, eta, coeffs)


def sklyanin_bracket(basis: ThetaBasis, k: int) -> QuadraticBracket:
    """The semiclassical quadratic bracket in closed form."""
    n = basis.n
    _check_coprime(n, k)
    th = basis.theta_at_zero
    dth = basis.dtheta_at_zero
    table = {}
    for i in range(n):
        for j in range(i + 1, n):
            d = (j - i) % n
            entry = {}

            def add(kk, ll, coeff):
                key = tuple(sorted((kk % n, ll % n)))
                entry[key] = entry.get(key, 0j) + coeff

            diag = (dth[d] / th[d] + dth[(k * d) % n] / th[(k * d) % n]
                    - 2j * math.pi * n)
            add(i, j, diag)
            for r in range(n):
                if r == 0 or r == d:
                    continue
                num = th[(d + r * (k - 1)) % n]
                if num == 0:
                    continue
                coeff = num * dth[0] / (th[(k * r) % n] * th[(d - r) % n])
                add(j - r, i + r, coeff)
            table[(i, j)] = entry
    return QuadraticBracket(n, table)


def single_eta_bracket(basis: ThetaBasis, k: int, eta: complex) -> dict:
    """First-order bracket estimate from the relations at one eta.

    Returns {(i,j) i<j: {normalized monomial: coefficient}}, treating the
    generators as commuting when collecting the commutator at leading order
    (reordering corrections are higher order in eta and are removed by the
    extrapolation in :func:`semiclassical_from_relations`).
    """
    n = basis.n
    rel = fo_relations(basis, k, eta)
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            c = rel.relation(i, j)
            d = (j - i) % n
            # words x_{j-r} x_{i+r}: r = d carries x_i x_j, r = 0 carries
            # x_j x_i; solving for [x_i, x_j]/eta at commutative leading order
            c_d = c[d]
            entry = {}

            def add(kk, ll, coeff):
                key = tuple(sorted((kk % n, ll % n)))
                entry[key] = entry.get(key, 0j) + coeff

            add(i, j, (-c[0] / c_d - 1.0) / eta)
            for r in range(n):
                if r == 0 or r == d:
                    continue
                add(j - r, i + r, (-c[r] / c_d) / eta)
            out[(i, j)] = entry
    return out


def _neville_at_zero(etas, values):
    """Polynomial extrapolation of values(eta) to eta = 0."""
    t = list(values)
    m = len(etas)
    last_correction = None
    for level in range(1, m):
        new = []
        for s in range(m - level):
            num = etas[s] * t[s + 1] - etas[s + level] * t[s]
            new.append(num / (etas[s] - etas[s + level]))
        last_correction = abs(new[-1] - t[-1])
        t = new
    return t[0], last_correction


def semiclassical_from_relations(basis: ThetaBasis, k: int,
                                 eta_sequence) -> QuadraticBracket:
    """Bracket tensor extrapolated to eta = 0 from finite-eta relations.

    This path shares no formulas with :func:`sklyanin_bracket` beyond the
    relation tensor itself and is the numerical oracle for the closed form.
    Raises :class:`ExtrapolationError` when the correction terms fail to
    shrink, which signals an unusable eta sequence.
    """
    etas = [complex(e) for e in eta_sequence]
    if len(etas) < 2:
        raise ValueError("need at least two eta values to extrapolate")
    singles = [single_eta_bracket(basis, k, e) for e in etas]
    n = basis.n
    table = {}
    worst_first = 0.0
    worst_last = 0.0
    for pair in singles[0]:
        monos = set()
        for s in singles:
            monos |= set(s[pair])
        entry = {}
        for m in monos:
            vals = [s[pair].get(m, 0j) for s in singles]
            extrap, corr = _neville_at_zero(etas, vals)
            entry[m] = extrap
            worst_first = max(worst_first, abs(vals[-1] - vals[0]))
            worst_last = max(worst_last, corr)
        table[pair] = entry
    if len(etas) > 2 and worst_last > max(worst_first, 1e-12):
        raise ExtrapolationError(
            f"extrapolation corrections grew: first {worst_first:.3e}, "
            f"last {worst_last:.3e}")
    return QuadraticBracket(n, table)
