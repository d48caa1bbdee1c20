"""Symplectic-leaf combinatorics for Hilbert schemes of elliptic deformations.

A point of the target stratification is a torsion sheaf type: a multiset of
local types, each local type recording how many length-j indecomposables
sit at one point.  The endomorphism dimension of a local type with
multiplicities r_j is sum_{i,j} min(i,j) r_i r_j, and the expected leaf
dimension over a type of total length l is

    d_F = 2n + 1 - (1 + l + end_dim(T)) = 2n - l - end_dim(T),

bounded by 2n - 2l since end_dim(T) >= l.  The divisor-class constraint
ties the cycle of the torsion part to the twisting line bundle through
lattice arithmetic on the curve.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .theta import CurveParams


@dataclass(frozen=True)
class TorsionType:
    """Multiset of local types; each local type maps j -> multiplicity r_j."""

    points: tuple

    def __init__(self, points):
        canon = []
        for local in points:
            local = {int(j): int(r) for j, r in dict(local).items() if r}
            if not local:
                raise ValueError("each listed point needs a positive part")
            if any(j < 1 or r < 1 for j, r in local.items()):
                raise ValueError("parts and multiplicities must be positive")
            canon.append(tuple(sorted(local.items(), reverse=True)))
        object.__setattr__(self, "points", tuple(sorted(canon, reverse=True)))

    @property
    def local_lengths(self):
        return tuple(sum(j * r for j, r in local) for local in self.points)

    @property
    def length(self) -> int:
        return sum(self.local_lengths)

    def describe(self) -> str:
        if not self.points:
            return "0"
        bits = []
        for local in self.points:
            parts = ", ".join(f"{j}^{r}" if r > 1 else f"{j}" for j, r in local)
            bits.append(f"({parts})")
        return " + ".join(bits)


@dataclass(frozen=True)
class LeafRecord:
    torsion: TorsionType
    l: int
    end_dim_torsion: int
    expected_dim: int
    feasible: bool


@dataclass(frozen=True)
class DivisorDatum:
    """Points with multiplicities on the curve, plus the total degree."""

    points: tuple

    def __init__(self, points):
        pts = tuple((complex(z), int(m)) for z, m in points)
        if any(m <= 0 for _, m in pts):
            raise ValueError("multiplicities must be positive")
        object.__setattr__(self, "points", pts)

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.points)

    def weighted_sum(self) -> complex:
        return sum(z * m for z, m in self.points) if self.points else 0j


def end_dim_local(r) -> int:
    """sum_{i,j} min(i,j) r_i r_j over the support of one local type."""
    items = [(int(j), int(m)) for j, m in dict(r).items() if m]
    if any(j < 1 or m < 0 for j, m in items):
        raise ValueError("parts must be >= 1 with non-negative multiplicities")
    return sum(min(j1, j2) * m1 * m2 for j1, m1 in items for j2, m2 in items)


def end_dim_sheaf(t: TorsionType) -> int:
    """End dimension of (line bundle) + (torsion): 1 + l + end_dim(T)."""
    return 1 + t.length + sum(end_dim_local(dict(local)) for local in t.points)


def leaf_dimension(n: int, t: TorsionType) -> LeafRecord:
    """Expected leaf dimension 2n + 1 - end_dim_sheaf over the type t."""
    l = t.length
    if l > n:
        raise ValueError("torsion length exceeds n")
    end_t = end_dim_sheaf(t) - 1 - l
    expected = 2 * n - l - end_t
    return LeafRecord(t, l, end_t, expected, expected >= 0)


@lru_cache(maxsize=None)
def _partitions(m, max_part=None):
    """Partitions of m as descending tuples of parts."""
    if m == 0:
        return ((),)
    max_part = m if max_part is None else min(max_part, m)
    out = []
    for first in range(max_part, 0, -1):
        for rest in _partitions(m - first, first):
            out.append((first,) + rest)
    return tuple(out)


def _partition_to_local(parts):
    local = {}
    for j in parts:
        local[j] = local.get(j, 0) + 1
    return local


@lru_cache(maxsize=None)
def _local_type_multisets(total, bound=None):
    """Multisets of nonempty partitions with sizes summing to ``total``.

    ``bound`` caps the canonical key of the largest partition so recursion
    emits each multiset exactly once (non-increasing order).
    """
    if total == 0:
        return ((),)
    out = []
    for size in range(total, 0, -1):
        for parts in _partitions(size):
            key = (size, parts)
            if bound is not None and key > bound:
                continue
            for rest in _local_type_multisets(total - size, key):
                out.append((key,) + rest)
    return tuple(out)


def enumerate_strata(n: int):
    """All leaf records for torsion types of length at most n."""
    if n < 1:
        raise ValueError("n must be positive")
    records = []
    for l in range(n + 1):
        for multiset in _local_type_multisets(l):
            t = TorsionType(tuple(_partition_to_local(parts)
                                  for _, parts in multiset))
            records.append(leaf_dimension(n, t))
    records.sort(key=lambda rec: (rec.l, -rec.expected_dim,
                                  rec.torsion.points))
    return records


def classical_cubic_rows(records):
    """Tag the records matching the known stratification of three points.

    The five classical rows are: no torsion; one reduced point; two reduced
    points; a doubled reduced point (two copies at one place); three
    reduced points.
    """
    known = {
        TorsionType(()),
        TorsionType(({1: 1},)),
        TorsionType(({1: 1}, {1: 1})),
        TorsionType(({1: 2},)),
        TorsionType(({1: 1}, {1: 1}, {1: 1})),
    }
    return [rec for rec in records if rec.torsion in known]


def reduce_mod_lattice(z: complex, params: CurveParams) -> complex:
    """Representative of z nearest zero under rounding against (1, tau)."""
    tau = params.tau
    zb = z - round(z.imag / tau.imag) * tau
    return zb - round(zb.real)


def _lattice_defect(z: complex, params: CurveParams) -> float:
    return abs(reduce_mod_lattice(z, params))


def divisor_constraint(n: int, eta: complex, d: DivisorDatum, z: DivisorDatum,
                       params: CurveParams, tol: float = 1e-9):
    """Check the class relation sum(Z) - sum(D) + 3n*eta = 0 mod the lattice.

    Returns (ok, defect); unequal degrees are a hard error since the two
    sides must have the same degree for the relation to make sense.
    """
    if d.degree != z.degree:
        raise ValueError("divisor degrees differ")
    w = z.weighted_sum() - d.weighted_sum() + 3 * n * complex(eta)
    defect = _lattice_defect(w, params)
    return defect <= tol, defect


def kronecker_dims(r: int, n: int, d: int = 0):
    """Dimension vector (n, 2n + r, n) of the three-term resolution, d = 0.

    Only the degree-zero normalization has an explicit vector; other values
    of d are rejected.
    """
    if d != 0:
        raise ValueError("dimension vector is only specified for d = 0")
    if r < 1 or n < 0:
        raise ValueError("need r >= 1 and n >= 0")
    return (n, 2 * n + r, n)
