"""Quadratic Poisson brackets on n variables and their canonical form.

A bracket is stored through the degree-2 polynomials {x_i, x_j} for i < j
(the other entries follow by skew-symmetry).  For brackets invariant under
the order-n Heisenberg group the whole tensor collapses to a single
symmetric table C(alpha, beta) with

    {x_i, x_j} = sum_r C(r, j-i-r) x_{i+r} x_{j-r},
    C(beta, alpha) = C(alpha, beta) = -C(-alpha, -beta),

and the induced bracket on the chart t_i = x_i / x_0 of projective space
has the closed three-group form implemented in :func:`projective_bracket`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvarianceError

COEFF_CUTOFF = 1e-14


class Polynomial:
    """Sparse polynomial in n commuting variables with complex coefficients.

    Terms map exponent tuples to coefficients; zero coefficients are never
    stored.  Instances are treated as immutable.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        clean = {}
        for expo, coeff in (terms or {}).items():
            if coeff != 0:
                if len(expo) != n or any(e < 0 for e in expo):
                    raise ValueError(f"bad exponent tuple {expo!r}")
                clean[tuple(expo)] = complex(coeff)
        self.terms = clean

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def constant(cls, n, value):
        return cls(n, {(0,) * n: value})

    @classmethod
    def variable(cls, n, i):
        expo = [0] * n
        expo[i % n] = 1
        return cls(n, {tuple(expo): 1.0})

    @classmethod
    def monomial(cls, n, indices, coeff=1.0):
        expo = [0] * n
        for i in indices:
            expo[i % n] += 1
        return cls(n, {tuple(expo): coeff})

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for expo, c in other.terms.items():
            out[expo] = out.get(expo, 0j) + c
        return Polynomial(self.n, out)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return Polynomial(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return Polynomial(self.n, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                expo = tuple(a + b for a, b in zip(e1, e2))
                out[expo] = out.get(expo, 0j) + c1 * c2
        return Polynomial(self.n, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.n != self.n:
                raise ValueError("variable counts differ")
            return other
        if isinstance(other, (int, float, complex)):
            return Polynomial.constant(self.n, other)
        raise TypeError(f"cannot combine Polynomial with {type(other)!r}")

    def diff(self, i):
        out = {}
        for expo, c in self.terms.items():
            if expo[i]:
                new = list(expo)
                new[i] -= 1
                out[tuple(new)] = out.get(tuple(new), 0j) + c * expo[i]
        return Polynomial(self.n, out)

    def eval(self, point):
        point = np.asarray(point, dtype=complex)
        total = 0j
        for expo, c in self.terms.items():
            val = c
            for i, e in enumerate(expo):
                if e:
                    val *= point[i] ** e
            total += val
        return total

    def max_abs(self):
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def coefficient(self, indices):
        expo = [0] * self.n
        for i in indices:
            expo[i % self.n] += 1
        return self.terms.get(tuple(expo), 0j)

    def is_zero(self, tol=0.0):
        return all(abs(c) <= tol for c in self.terms.values())

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "Polynomial(0)"
        bits = []
        for expo, c in sorted(self.terms.items()):
            mono = "*".join(f"x{i}^{e}" if e > 1 else f"x{i}"
                            for i, e in enumerate(expo) if e)
            bits.append(f"({c:.6g})*{mono}" if mono else f"({c:.6g})")
        return " + ".join(bits)


class QuadraticBracket:
    """Skew tensor of a quadratic bracket, stored as {x_i, x_j} for i < j.

    Monomial keys are normalized to k <= l; coefficients below 1e-14 are
    dropped on write.
    """

    def __init__(self, n, table=None):
        self.n = n
        self._table = {}
        for (i, j), monos in (table or {}).items():
            if not (0 <= i < j < n):
                raise ValueError("table keys must satisfy 0 <= i < j < n")
            entry = {}
            for (k, l), coeff in monos.items():
                k, l = sorted((k % n, l % n))
                if abs(coeff) >= COEFF_CUTOFF:
                    entry[(k, l)] = entry.get((k, l), 0j) + complex(coeff)
            entry = {m: c for m, c in entry.items() if abs(c) >= COEFF_CUTOFF}
            if entry:
                self._table[(i, j)] = entry

    def pair_coeffs(self, i, j):
        """Monomial table of {x_i, x_j} (sign-resolved, normalized keys)."""
        i %= self.n
        j %= self.n
        if i == j:
            return {}
        if i < j:
            return dict(self._table.get((i, j), {}))
        return {m: -c for m, c in self._table.get((j, i), {}).items()}

    def pair_poly(self, i, j) -> Polynomial:
        return Polynomial(self.n, {
            self._expo(k, l): c for (k, l), c in self.pair_coeffs(i, j).items()})

    def _expo(self, k, l):
        expo = [0] * self.n
        expo[k] += 1
        expo[l] += 1
        return tuple(expo)

    def max_abs(self):
        return max((abs(c) for e in self._table.values() for c in e.values()),
                   default=0.0)

    def pairs(self):
        return sorted(self._table)

    def __eq__(self, other):
        if not isinstance(other, QuadraticBracket):
            return NotImplemented
        return self.n == other.n and self._table == other._table

    def max_difference(self, other):
        keys = set(self._table) | set(other._table)
        worst = 0.0
        for key in keys:
            a = self._table.get(key, {})
            b = other._table.get(key, {})
            for mono in set(a) | set(b):
                worst = max(worst, abs(a.get(mono, 0j) - b.get(mono, 0j)))
        return worst


@dataclass(frozen=True)
class HnBracket:
    """Canonical table C(alpha, beta) of a Heisenberg-invariant bracket."""

    n: int
    table: np.ndarray
    check_tol: float = 1e-8

    def __post_init__(self):
        tab = np.asarray(self.table, dtype=complex)
        if tab.shape != (self.n, self.n):
            raise ValueError("table must be n x n")
        object.__setattr__(self, "table", tab)
        scale = max(float(np.max(np.abs(tab))), 1e-30)
        sym = np.max(np.abs(tab - tab.T))
        idx = np.arange(self.n)
        neg = tab[np.ix_((-idx) % self.n, (-idx) % self.n)]
        skew = np.max(np.abs(tab + neg))
        if max(sym, skew) > self.check_tol * scale or abs(tab[0, 0]) > self.check_tol * scale:
            raise ValueError("table violates the symmetries "
                             "C(b,a)=C(a,b)=-C(-a,-b), C(0,0)=0")

    def c(self, alpha, beta):
        return self.table[alpha % self.n, beta % self.n]

    def to_quadratic(self) -> QuadraticBracket:
        n = self.n
        table = {}
        for i in range(n):
            for j in range(i + 1, n):
                entry = {}
                for r in range(n):
                    coeff = self.c(r, j - i - r)
                    if coeff == 0:
                        continue
                    k, l = sorted(((i + r) % n, (j - r) % n))
                    entry[(k, l)] = entry.get((k, l), 0j) + coeff
                if entry:
                    table[(i, j)] = entry
        return QuadraticBracket(n, table)


def bracket_generators(b: QuadraticBracket, i: int, j: int) -> Polynomial:
    """The degree-2 polynomial {x_i, x_j}; antisymmetric under i <-> j."""
    if not (0 <= i < b.n and 0 <= j < b.n):
        raise IndexError("generator index out of range")
    return b.pair_poly(i, j)


def _bracket_mono(b: QuadraticBracket, e1, e2):
    """{m1, m2} for monomials given as exponent tuples, by Leibniz recursion."""
    d1 = sum(e1)
    d2 = sum(e2)
    if d1 == 0 or d2 == 0:
        return Polynomial.zero(b.n)
    if d1 == 1 and d2 == 1:
        i = next(k for k, e in enumerate(e1) if e)
        j = next(k for k, e in enumerate(e2) if e)
        return b.pair_poly(i, j)
    if d2 > 1:
        # split m2 = x_k * m2'; {f, x_k m2'} = {f, x_k} m2' + x_k {f, m2'}
        k = next(idx for idx, e in enumerate(e2) if e)
        rest = list(e2)
        rest[k] -= 1
        rest = tuple(rest)
        xk = tuple(1 if idx == k else 0 for idx in range(b.n))
        return (_bracket_mono(b, e1, xk) * Polynomial(b.n, {rest: 1.0})
                + Polynomial(b.n, {xk: 1.0}) * _bracket_mono(b, e1, rest))
    # d1 > 1, d2 == 1: split on the left
    k = next(idx for idx, e in enumerate(e1) if e)
    rest = list(e1)
    rest[k] -= 1
    rest = tuple(rest)
    xk = tuple(1 if idx == k else 0 for idx in range(b.n))
    return (Polynomial(b.n, {xk: 1.0}) * _bracket_mono(b, rest, e2)
            + _bracket_mono(b, xk, e2) * Polynomial(b.n, {rest: 1.0}))


def bracket_poly(b: QuadraticBracket, f: Polynomial, g: Polynomial) -> Polynomial:
    """Leibniz extension of the generator brackets to polynomials."""
    if f.n != b.n or g.n != b.n:
        raise ValueError("variable counts differ")
    out = Polynomial.zero(b.n)
    for e1, c1 in f.terms.items():
        for e2, c2 in g.terms.items():
            out = out + (c1 * c2) * _bracket_mono(b, e1, e2)
    return out


def bracket_contraction_oracle(b: QuadraticBracket, f: Polynomial,
                               g: Polynomial) -> Polynomial:
    """Independent bivector-contraction form sum {x_i,x_j} df/dx_i dg/dx_j."""
    out = Polynomial.zero(b.n)
    for i in range(b.n):
        dfi = f.diff(i)
        if not dfi.terms:
            continue
        for j in range(b.n):
            if i == j:
                continue
            dgj = g.diff(j)
            if not dgj.terms:
                continue
            out = out + b.pair_poly(i, j) * dfi * dgj
    return out


def jacobi_defect(b: QuadraticBracket) -> float:
    """Largest coefficient of the cyclic Jacobi sum over generator triples.

    Normalized by the largest coefficient magnitude of the tensor so the
    tolerance is insensitive to an overall rescaling of the bracket.
    """
    scale = b.max_abs()
    if scale == 0.0:
        return 0.0
    worst = 0.0
    n = b.n
    xs = [Polynomial.variable(n, i) for i in range(n)]
    inner = {}
    for j in range(n):
        for k in range(j + 1, n):
            inner[(j, k)] = b.pair_poly(j, k)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                total = (bracket_poly(b, xs[i], inner[(j, k)])
                         + bracket_poly(b, xs[j], -inner[(i, k)])
                         + bracket_poly(b, xs[k], inner[(i, j)]))
                worst = max(worst, total.max_abs())
    return worst / scale


def hn_canonical_extract(b: QuadraticBracket, tol: float = 1e-8) -> HnBracket:
    """Recover the unique C(alpha, beta) of a Heisenberg-invariant bracket.

    The coefficient of the unordered monomial x_{i+alpha} x_{i+beta} in
    {x_i, x_{i+alpha+beta}} is 2 C(alpha, beta) for alpha != beta and
    C(alpha, alpha) on the square terms; candidates must agree for every
    base point i, and every monomial must have total weight i + j mod n.
    Raises :class:`InvarianceError` when the pattern fails beyond ``tol``
    relative to the largest coefficient.
    """
    n = b.n
    scale = max(b.max_abs(), 1e-30)
    violation = 0.0
    table = np.zeros((n, n), dtype=complex)
    # weight support check: {x_i, x_j} may only involve x_k x_l, k+l = i+j
    for (i, j) in b.pairs():
        for (k, l), coeff in b.pair_coeffs(i, j).items():
            if (k + l - i - j) % n != 0:
                violation = max(violation, abs(coeff))
    for alpha in range(n):
        for beta in range(n):
            if (alpha + beta) % n == 0:
                # forced to zero by the symmetries; such monomials could
                # only appear in {x_i, x_i} = 0, so nothing to read off
                continue
            candidates = []
            for i in range(n):
                j = (i + alpha + beta) % n
                coeffs = b.pair_coeffs(i, j)
                k, l = sorted(((i + alpha) % n, (i + beta) % n))
                val = coeffs.get((k, l), 0j)
                if alpha % n == beta % n:
                    candidates.append(val)
                else:
                    candidates.append(val / 2.0)
            first = candidates[0]
            spread = max(abs(c - first) for c in candidates)
            violation = max(violation, spread)
            table[alpha, beta] = first
    sym = np.max(np.abs(table - table.T))
    idx = np.arange(n)
    skew = np.max(np.abs(table + table[np.ix_((-idx) % n, (-idx) % n)]))
    violation = max(violation, float(sym), float(skew))
    if violation > tol * scale:
        raise InvarianceError(
            f"bracket is not Heisenberg-invariant: violation {violation:.3e} "
            f"(scale {scale:.3e})")
    return HnBracket(n, table)


def projective_bracket(h: HnBracket, t, i: int, j: int) -> complex:
    """{t_i, t_j} on the chart x_0 != 0 for an invariant bracket.

    ``t`` is the full coordinate vector with t[0] = 1 and indices read
    modulo n; i and j must be nonzero chart indices.
    """
    n = h.n
    t = np.asarray(t, dtype=complex)
    if len(t) != n or t[0] != 1:
        raise ValueError("t must have length n with t[0] = 1")
    i %= n
    j %= n
    if i == 0 or j == 0:
        raise IndexError("chart indices must be nonzero")
    if i == j:
        return 0j
    total = 0j
    for r in range(n):
        if r != 0 and r != (j - i) % n:
            total += h.c(r, j - i - r) * t[(i + r) % n] * t[(j - r) % n]
    s1 = sum(h.c(r, j - r) * t[r % n] * t[(j - r) % n]
             for r in range(n) if r != 0 and r != j % n)
    s2 = sum(h.c(r, -i - r) * t[(i + r) % n] * t[(-r) % n]
             for r in range(n) if r != 0 and r != (-i) % n)
    total -= t[i] * s1
    total -= t[j] * s2
    total += 2.0 * (h.c(0, j - i) - h.c(0, j) - h.c(0, -i)) * t[i] * t[j]
    return total


def projective_matrix(h: HnBracket, t) -> np.ndarray:
    """All {t_i, t_j} as an antisymmetric n x n array (row/col 0 zero)."""
    n = h.n
    out = np.zeros((n, n), dtype=complex)
    for i in range(1, n):
        for j in range(i + 1, n):
            val = projective_bracket(h, t, i, j)
            out[i, j] = val
            out[j, i] = -val
    return out
