"""Exact rational matrices sized for chain-complex checks.

A matrix is stored as an integer numpy object array plus a single positive
denominator.  Products route through int64 BLAS when a proven bound rules
out overflow and fall back to arbitrary-precision objects otherwise, so
every identity checked against these matrices is exact.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

_INT64_SAFE = 2 ** 62


def _to_object_int(arr):
    # tolist() yields native Python ints, keeping later arithmetic unbounded
    out = np.empty(arr.shape, dtype=object)
    if arr.size:
        out[...] = np.asarray(arr.tolist(), dtype=object)
    return out


class Mat:
    """Immutable exact rational matrix: object-int numerators / denominator."""

    __slots__ = ("num", "den", "shape")

    def __init__(self, num, den=1, shape=None):
        num = np.asarray(num, dtype=object)
        if shape is not None:
            num = num.reshape(shape)
        if num.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        if den <= 0:
            raise ValueError("denominator must be positive")
        self.num = num
        self.den = int(den)
        self.shape = num.shape

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rows(cls, rows, shape=None):
        rows = [list(r) for r in rows]
        if shape is None:
            shape = (len(rows), len(rows[0]) if rows else 0)
        r, c = shape
        den = 1
        for row in rows:
            for v in row:
                if isinstance(v, Fraction):
                    den = den * v.denominator // math.gcd(den, v.denominator)
                elif not isinstance(v, int):
                    raise TypeError("entries must be int or Fraction")
        num = np.empty((r, c), dtype=object)
        for i in range(r):
            for j in range(c):
                v = rows[i][j] if rows else 0
                if isinstance(v, Fraction):
                    num[i, j] = int(v * den)
                else:
                    num[i, j] = v * den
        return cls(num, den)

    @classmethod
    def zeros(cls, r, c):
        num = np.empty((r, c), dtype=object)
        num.fill(0)
        return cls(num, 1)

    @classmethod
    def identity(cls, n):
        num = np.empty((n, n), dtype=object)
        num.fill(0)
        for i in range(n):
            num[i, i] = 1
        return cls(num, 1)

    # -- helpers -----------------------------------------------------------

    def _max_abs(self):
        if self.num.size == 0:
            return 0
        return max(abs(int(v)) for v in self.num.flat)

    def _reduced(self):
        if self.den == 1:
            return self
        g = self.den
        for v in self.num.flat:
            g = math.gcd(g, abs(int(v)))
            if g == 1:
                return self
        return Mat(self.num // g, self.den // g)

    def entry(self, i, j) -> Fraction:
        return Fraction(int(self.num[i, j]), self.den)

    def fractions(self):
        return [[self.entry(i, j) for j in range(self.shape[1])]
                for i in range(self.shape[0])]

    # -- algebra -----------------------------------------------------------

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        r, k = self.shape
        c = other.shape[1]
        if r == 0 or c == 0 or k == 0:
            return Mat.zeros(r, c)
        bound = k * self._max_abs() * other._max_abs()
        if bound < _INT64_SAFE:
            prod = (self.num.astype(np.int64) @ other.num.astype(np.int64))
            num = _to_object_int(prod)
        else:
            num = self.num @ other.num
        return Mat(num, self.den * other.den)._reduced()

    def __add__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in addition")
        num = self.num * other.den + other.num * self.den
        return Mat(num, self.den * other.den)._reduced()

    def __sub__(self, other: "Mat") -> "Mat":
        return self + (-other)

    def __neg__(self) -> "Mat":
        return Mat(-self.num, self.den)

    def scale(self, v) -> "Mat":
        v = Fraction(v)
        return Mat(self.num * v.numerator, self.den * v.denominator)._reduced()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        if self.shape != other.shape:
            return False
        return bool(np.all(self.num * other.den == other.num * self.den))

    def is_zero(self) -> bool:
        return bool(np.all(self.num == 0))

    @property
    def T(self) -> "Mat":
        return Mat(self.num.T.copy(), self.den)

    def kron(self, other: "Mat") -> "Mat":
        ra, ca = self.shape
        rb, cb = other.shape
        num = np.empty((ra * rb, ca * cb), dtype=object)
        for i in range(ra):
            for j in range(ca):
                num[i * rb:(i + 1) * rb, j * cb:(j + 1) * cb] = \
                    self.num[i, j] * other.num
        return Mat(num, self.den * other.den)._reduced()

    def rank(self) -> int:
        """Fraction-free Bareiss elimination; denominators are irrelevant."""
        a = [[int(v) for v in row] for row in self.num]
        rows, cols = self.shape
        rank = 0
        prev = 1
        row = 0
        for col in range(cols):
            pivot = next((i for i in range(row, rows) if a[i][col] != 0), None)
            if pivot is None:
                continue
            a[row], a[pivot] = a[pivot], a[row]
            for i in range(row + 1, rows):
                for j in range(col + 1, cols):
                    a[i][j] = (a[row][col] * a[i][j]
                               - a[i][col] * a[row][j]) // prev
                a[i][col] = 0
            prev = a[row][col]
            rank += 1
            row += 1
            if row == rows:
                break
        return rank

    def __repr__(self):
        return f"Mat({self.shape[0]}x{self.shape[1]}, den={self.den})"


def hstack(mats) -> Mat:
    mats = list(mats)
    rows = mats[0].shape[0]
    if any(m.shape[0] != rows for m in mats):
        raise ValueError("row counts differ")
    den = 1
    for m in mats:
        den = den * m.den // math.gcd(den, m.den)
    nums = [m.num * (den // m.den) for m in mats]
    return Mat(np.concatenate(nums, axis=1) if nums else np.empty((rows, 0), dtype=object), den)._reduced()


def vstack(mats) -> Mat:
    mats = list(mats)
    cols = mats[0].shape[1]
    if any(m.shape[1] != cols for m in mats):
        raise ValueError("column counts differ")
    den = 1
    for m in mats:
        den = den * m.den // math.gcd(den, m.den)
    nums = [m.num * (den // m.den) for m in mats]
    return Mat(np.concatenate(nums, axis=0) if nums else np.empty((0, cols), dtype=object), den)._reduced()


def block(grid) -> Mat:
    return vstack([hstack(row) for row in grid])
