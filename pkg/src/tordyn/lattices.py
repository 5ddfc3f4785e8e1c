"""Sublattices of Z^n in a canonical Hermite normal form.

The canonical form used throughout: row-style HNF with positive pivots and
every entry above a pivot reduced into [0, pivot).  Two sublattices are equal
as sets exactly when their canonical bases are identical tuples, which makes
lattice values usable as dictionary keys and orbit states.
"""

from __future__ import annotations

from dataclasses import dataclass

from .intmat import Mat, Vec, as_matrix, transpose
from .polynomials import Poly, normalize as poly_normalize


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    return g, x, y


def _echelon_insert(basis: list[list[int]], pivots: list[int], vec: list[int]) -> None:
    """Insert vec into an integer row-echelon basis, combining rows by xgcd."""
    n = len(vec)
    j = 0
    while True:
        while j < n and vec[j] == 0:
            j += 1
        if j == n:
            return
        if j in pivots:
            k = pivots.index(j)
            row = basis[k]
            a, b = row[j], vec[j]
            if b % a == 0:
                q = b // a
                for t in range(j, n):
                    vec[t] -= q * row[t]
            else:
                g, x, y = _xgcd(a, b)
                ag, bg = a // g, b // g
                for t in range(j, n):
                    rt, vt = row[t], vec[t]
                    row[t] = x * rt + y * vt
                    vec[t] = -bg * rt + ag * vt
        else:
            # vec starts a new pivot column
            where = 0
            while where < len(pivots) and pivots[where] < j:
                where += 1
            basis.insert(where, vec)
            pivots.insert(where, j)
            return


def _canonicalize(basis: list[list[int]], pivots: list[int]) -> Mat:
    for k, (row, p) in enumerate(zip(basis, pivots)):
        if row[p] < 0:
            basis[k] = [-x for x in row]
    for k in range(len(basis)):
        p = pivots[k]
        piv = basis[k][p]
        for i in range(k):
            q = basis[i][p] // piv  # floor division puts the entry in [0, piv)
            if q:
                basis[i] = [x - q * y for x, y in zip(basis[i], basis[k])]
    return tuple(tuple(r) for r in basis)


def hnf_basis(rows, n: int | None = None) -> Mat:
    """Canonical HNF basis of the integer row span. Zero rows are dropped."""
    m = as_matrix(rows)
    if m and n is not None and len(m[0]) != n:
        raise ValueError("row length does not match ambient dimension")
    basis: list[list[int]] = []
    pivots: list[int] = []
    for r in m:
        _echelon_insert(basis, pivots, list(r))
    return _canonicalize(basis, pivots)


def hnf_pivots(basis: Mat) -> list[int]:
    out = []
    for row in basis:
        j = next(i for i, x in enumerate(row) if x != 0)
        out.append(j)
    return out


def is_canonical_hnf(rows: Mat) -> bool:
    try:
        m = as_matrix(rows)
    except ValueError:
        return False
    if not m:
        return True
    return hnf_basis(m, len(m[0])) == m


def hnf_with_transform(rows) -> tuple[Mat, Mat]:
    """Return (H, U) with U unimodular, U @ rows = H padded with zero rows.

    H is the canonical HNF basis; U has len(rows) rows and records the row
    operations, including those that zeroed out dependent rows.
    """
    m = as_matrix(rows)
    k = len(m)
    aug = [list(r) + [int(i == j) for j in range(k)] for i, r in enumerate(m)]
    n = len(m[0]) if m else 0
    basis: list[list[int]] = []
    pivots: list[int] = []
    zero_rows: list[list[int]] = []
    for row in aug:
        _insert_augmented(basis, pivots, row, n)
    # rows that reduced to zero in the first n columns live in the basis list
    # with pivot >= n; split them off
    lattice_rows = [(p, r) for p, r in zip(pivots, basis) if p < n]
    kernel_rows = [r for p, r in zip(pivots, basis) if p >= n]
    lat_pivots = [p for p, _ in lattice_rows]
    lat = [r for _, r in lattice_rows]
    # canonicalize only the lattice part (the transform columns ride along)
    for idx, (row, p) in enumerate(zip(lat, lat_pivots)):
        if row[p] < 0:
            lat[idx] = [-x for x in row]
    for a in range(len(lat)):
        p = lat_pivots[a]
        piv = lat[a][p]
        for b in range(a):
            q = lat[b][p] // piv
            if q:
                lat[b] = [x - q * y for x, y in zip(lat[b], lat[a])]
    h = tuple(tuple(r[:n]) for r in lat)
    u = tuple(tuple(r[n:]) for r in lat) + tuple(tuple(r[n:]) for r in kernel_rows)
    return h, u


def _insert_augmented(basis, pivots, vec, n):
    """Echelon insertion over the full augmented width; pivots past column n
    mark rows whose lattice part reduced to zero."""
    total = len(vec)
    j = 0
    while True:
        while j < total and vec[j] == 0:
            j += 1
        if j >= total:
            return
        if j in pivots:
            k = pivots.index(j)
            row = basis[k]
            a, b = row[j], vec[j]
            if b % a == 0:
                q = b // a
                for t in range(j, total):
                    vec[t] -= q * row[t]
            else:
                g, x, y = _xgcd(a, b)
                ag, bg = a // g, b // g
                for t in range(j, total):
                    rt, vt = row[t], vec[t]
                    row[t] = x * rt + y * vt
                    vec[t] = -bg * rt + ag * vt
        else:
            where = 0
            while where < len(pivots) and pivots[where] < j:
                where += 1
            basis.insert(where, vec)
            pivots.insert(where, j)
            return


def left_kernel(m_rows, nrows: int) -> Mat:
    """Canonical basis of {x in Z^nrows : x @ m_rows = 0}."""
    m = as_matrix(m_rows)
    if len(m) != nrows:
        raise ValueError("nrows mismatch")
    if nrows == 0:
        return ()
    h, u = hnf_with_transform(m)
    kern = u[len(h):]
    return hnf_basis(kern, nrows)


def annihilator_rows(basis: Mat, n: int) -> Mat:
    """Basis of {g in Z^n : g . v = 0 for every row v}."""
    if not basis:
        return hnf_basis(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)
    return left_kernel(transpose(basis), n)


def saturate_rows(rows, n: int) -> Mat:
    """Basis of (Q-span of rows) intersected with Z^n, canonical HNF."""
    b = hnf_basis(rows, n)
    ann = annihilator_rows(b, n)
    return annihilator_rows(ann, n)


def contains_vector(basis: Mat, v: Vec) -> bool:
    """Membership of v in the integer row span of a canonical HNF basis."""
    w = list(v)
    pivots = hnf_pivots(basis)
    for row, p in zip(basis, pivots):
        if w[p] % row[p]:
            return False
        q = w[p] // row[p]
        if q:
            for t in range(p, len(w)):
                w[t] -= q * row[t]
    return all(x == 0 for x in w)


@dataclass(frozen=True)
class Lattice:
    """A sublattice of Z^n held by its canonical HNF basis."""

    ambient_dim: int
    basis: Mat

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise ValueError("ambient dimension must be >= 1")
        b = as_matrix(self.basis)
        object.__setattr__(self, "basis", b)
        if b and len(b[0]) != self.ambient_dim:
            raise ValueError("basis rows must have ambient length")
        if hnf_basis(b, self.ambient_dim) != b:
            raise ValueError("basis is not in canonical HNF")

    @classmethod
    def from_rows(cls, ambient_dim: int, rows) -> "Lattice":
        return cls(ambient_dim, hnf_basis(rows, ambient_dim))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Lattice":
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Lattice":
        from .intmat import identity

        return cls(ambient_dim, identity(ambient_dim))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, v: Vec) -> bool:
        if len(v) != self.ambient_dim:
            raise ValueError("vector length mismatch")
        return contains_vector(self.basis, v)

    def contains_lattice(self, other: "Lattice") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        return all(self.contains(r) for r in other.basis)

    def saturation(self) -> "Lattice":
        return Lattice(self.ambient_dim, saturate_rows(self.basis, self.ambient_dim))

    def is_saturated(self) -> bool:
        return self.saturation() == self


def complete_to_unimodular(basis: Mat, n: int) -> Mat:
    """Extend a saturated rank-k basis to a unimodular n x n matrix whose
    first k rows are exactly the input rows.

    With U @ basis^T = [H; 0] and H unimodular (that is saturation), the rows
    of basis are H^T-combinations of the first k rows of inv(U)^T, so stacking
    basis on the remaining rows of inv(U)^T stays unimodular.
    """
    from .intmat import det, identity, inverse_unimodular

    if not basis:
        return identity(n)
    k = len(basis)
    h, u = hnf_with_transform(transpose(basis))
    if len(h) != k:
        raise ValueError("basis rows are not linearly independent")
    if det(h) not in (1, -1):
        raise ValueError("basis is not saturated")
    tail = transpose(inverse_unimodular(u))[k:]
    result = basis + tail
    if det(result) not in (1, -1):
        raise AssertionError("completion failed to be unimodular")
    return result


def matrix_minimal_polynomial(a: Mat) -> Poly:
    """Minimal polynomial of an integer matrix, monic with integer coefficients."""
    n = len(a)
    from .intmat import identity, mat_mul

    powers = [identity(n)]
    for _ in range(n):
        powers.append(mat_mul(a, powers[-1]))
    for d in range(1, n + 1):
        stacked = tuple(
            tuple(x for row in powers[i] for x in row) for i in range(d + 1)
        )
        kern = left_kernel(stacked, d + 1)
        if kern:
            rel = kern[0]
            if rel[-1] < 0:
                rel = tuple(-x for x in rel)
            if rel[-1] != 1:
                raise AssertionError("minimal polynomial must be monic")
            return poly_normalize(rel)
    raise AssertionError("unreachable: char poly annihilates")
