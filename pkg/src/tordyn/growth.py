"""Certified lower bounds for the norm growth of injective covector orbits.

For a covector v and an integer matrix M, the iterates M^m v live in the
cyclic lattice spanned by v, Mv, ..., M^(d-1)v, and their coordinates there
form a single integer sequence t (the impulse response of the minimal
annihilator of v).  A growth certificate is a statement

    every orbit element with |exponent| > window has sup norm > floor

backed by one of two exact mechanisms, checkable by pure integer/rational
re-computation:

* cone: a two-sided ratio cone mu <= s(j+1)/s(j) <= nu that the q-step
  recurrence provably preserves, entered at explicitly verified indices.
  Level 1 runs on t itself (unique dominant real eigenvalue); level 2 runs on
  the 2x2 Hankel determinants of t, whose recurrence is the second exterior
  power and turns a dominant complex-conjugate pair into a dominant positive
  real value.
* polynomial: when every eigenvalue is a root of unity (with multiplicity),
  each residue class of t along step q = lcm of the orders is an exact
  polynomial, bounded below by elementary tail estimates.

Floating point appears only as a hint source for picking q, mu, nu; the
emitted certificate is verified exactly before being returned and can be
re-verified independently via check_growth_certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt, lcm

from .intmat import Mat, Vec, char_poly, mat_pow, mat_vec, transpose
from .lattices import left_kernel
from .polynomials import (
    Poly,
    is_squarefree_product_of_cyclotomics,
    neg,
    normalize,
    strip_cyclotomic_factors,
)

CONE_POWER_STEPS = (1, 2, 3, 4, 6, 8, 12, 16, 24)


def minimal_annihilator(m: Mat, v: Vec) -> Poly:
    """Monic integer polynomial g of least degree with g(M) v = 0."""
    if all(x == 0 for x in v):
        raise ValueError("zero vector has no cyclic structure")
    rows = [v]
    cur = v
    for _ in range(len(v)):
        cur = mat_vec(m, cur)
        rows.append(cur)
        kern = left_kernel(tuple(rows), len(rows))
        if kern:
            rel = kern[0]
            if rel[-1] < 0:
                rel = tuple(-x for x in rel)
            if rel[-1] != 1:
                raise AssertionError("minimal annihilator must be monic")
            return normalize(rel)
    raise AssertionError("no annihilator found below the ambient dimension")


def cyclic_basis(m: Mat, v: Vec, d: int) -> Mat:
    rows = [v]
    cur = v
    for _ in range(d - 1):
        cur = mat_vec(m, cur)
        rows.append(cur)
    return tuple(rows)


def impulse_values(g: Poly, lo: int, hi: int) -> dict[int, int]:
    """Impulse response of the monic recurrence g on the index range [lo, hi].

    t[j] = (j == 0) for 0 <= j < deg g; the recurrence extends both ways
    because the constant term of g is a unit.
    """
    d = len(g) - 1
    if d < 1 or g[-1] != 1 or g[0] not in (1, -1):
        raise ValueError("need a monic annihilator with unit constant term")
    vals = {j: 1 if j == 0 else 0 for j in range(d)}
    j = d
    while j <= hi:
        vals[j] = -sum(g[i] * vals[j - d + i] for i in range(d))
        j += 1
    j = -1
    while j >= lo:
        # g0 t[j] = -(t[j+d] + sum_{i=1..d-1} g_i t[j+i]);  g0 is +-1
        s = vals[j + d] + sum(g[i] * vals[j + i] for i in range(1, d))
        vals[j] = -s * g[0]
        j -= 1
    return {k: t for k, t in vals.items() if lo <= k <= hi}


def companion(g: Poly) -> Mat:
    d = len(g) - 1
    rows = [tuple(1 if j == i + 1 else 0 for j in range(d)) for i in range(d - 1)]
    rows.append(tuple(-g[i] for i in range(d)))
    return tuple(rows)


def recurrence_from_poly(p: Poly) -> tuple[int, ...]:
    """Coefficients b with s(j+D) = sum b_i s(j+i) for a monic p."""
    if p[-1] != 1:
        raise ValueError("recurrence polynomial must be monic")
    return tuple(-c for c in p[:-1])


def reciprocal_monic(g: Poly) -> Poly:
    """Monic polynomial whose roots are the inverses of the roots of g."""
    rev = tuple(reversed(g))
    if rev[-1] == -1:
        rev = neg(rev)
    if rev[-1] != 1:
        raise ValueError("reciprocal is not monic; constant term must be a unit")
    return normalize(rev)


def hankel_sequence(vals: dict[int, int], lo: int, hi: int) -> dict[int, int]:
    return {j: vals[j] * vals[j + 2] - vals[j + 1] ** 2 for j in range(lo, hi + 1)}


def _fraction_inverse(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(rows)
    work = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next(r for r in range(col, n) if work[r][col] != 0)
        work[col], work[piv] = work[piv], work[col]
        pv = work[col][col]
        work[col] = [x / pv for x in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return [row[n:] for row in work]


def transfer_constant(basis: Mat) -> Fraction:
    """Exact K with  |coords|_inf <= K * |coords @ basis|_inf  for all coords.

    Pseudo-inverse bound: coords = (coords @ basis) @ basis^T (basis basis^T)^-1.
    """
    d = len(basis)
    bt = transpose(basis)
    gram = [[Fraction(sum(x * y for x, y in zip(r1, r2))) for r2 in basis] for r1 in basis]
    ginv = _fraction_inverse(gram)
    # pseudo-inverse P = basis^T @ ginv, shape n x d
    p = [[sum(Fraction(bt[i][a]) * ginv[a][j] for a in range(d)) for j in range(d)]
         for i in range(len(bt))]
    return max(sum(abs(p[i][j]) for i in range(len(p))) for j in range(d))


def ceil_fraction(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def ceil_sqrt_fraction(x: Fraction) -> int:
    """Smallest integer s with s*s >= x, for x >= 0."""
    if x <= 0:
        return 0
    s = isqrt(ceil_fraction(x))
    while Fraction(s * s) < x:
        s += 1
    return s


@dataclass(frozen=True)
class ConeEntry:
    residue: int
    start_index: int
    sign: int


@dataclass(frozen=True)
class DirectionCertificate:
    """Growth evidence for one orbit direction (exponents m > 0 or m < 0)."""

    direction: str  # "forward" or "backward"
    kind: str  # "cone", "polynomial" or "window_only"
    level: int = 0  # 1 = scalar sequence, 2 = Hankel determinants
    power_step: int = 0
    mu: Fraction = Fraction(0)
    nu: Fraction = Fraction(0)
    entries: tuple[ConeEntry, ...] = ()
    floor_seq: int = 0  # certified bound for the underlying sequence
    floor_norm: int = 0  # implied bound on the ambient covector sup norm


@dataclass(frozen=True)
class GrowthCertificate:
    window_radius: int
    annihilator: Poly
    transfer: Fraction
    forward: DirectionCertificate
    backward: DirectionCertificate
    rigorous: bool
    min_exterior_norm: int | None


class _ConeFailure(Exception):
    pass


def _cone_bounds(b: tuple[int, ...], mu: Fraction, nu: Fraction) -> tuple[Fraction, Fraction]:
    """Worst-case next/current ratios of the cone given recurrence coefficients."""
    dd = len(b)
    lb = Fraction(0)
    ub = Fraction(0)
    for i, c in enumerate(b):
        drop = dd - 1 - i
        if c > 0:
            lb += c / nu**drop
            ub += c / mu**drop
        elif c < 0:
            lb += c / mu**drop
            ub += c / nu**drop
    return lb, ub


def _root_hints(p: Poly) -> tuple[float, float] | None:
    """(dominant modulus if it is a single positive real root, second modulus)."""
    import numpy as np

    try:
        coeffs = [float(c) for c in reversed(p)]
    except OverflowError:
        return None
    roots = np.roots(coeffs)
    mods = sorted((abs(z) for z in roots), reverse=True)
    top = mods[0]
    candidates = [z for z in roots if abs(abs(z) - top) < 1e-9 * max(1.0, top)]
    if len(candidates) != 1:
        return None
    z = candidates[0]
    if abs(z.imag) > 1e-9 * max(1.0, top) or z.real <= 0:
        return None
    second = mods[1] if len(mods) > 1 else 0.0
    return top, second


def _try_cone_direction(
    seq: dict[int, int],
    rec_poly: Poly,
    cover_from: int,
    max_index: int,
) -> tuple[int, Fraction, Fraction, tuple[ConeEntry, ...], int] | None:
    """Search for (q, mu, nu, entries, floor) certifying seq(j) growth for j > cover_from."""
    comp = companion(rec_poly)
    dd = len(rec_poly) - 1
    for q in CONE_POWER_STEPS:
        if cover_from + 1 + q * dd > max_index:
            continue
        qpoly = char_poly(mat_pow(comp, q)) if q > 1 else rec_poly
        hints = _root_hints(qpoly)
        if hints is None:
            continue
        rho, second = hints
        if rho <= 1.0001 or second >= rho * 0.999:
            continue
        b = recurrence_from_poly(qpoly)
        pair = _pick_cone_ratios(b, rho, second)
        if pair is None:
            continue
        mu, nu = pair
        try:
            entries = _find_entries(seq, q, dd, mu, nu, cover_from)
        except _ConeFailure:
            continue
        floor = _cone_floor(seq, q, mu, entries, cover_from)
        if floor >= 1:
            return q, mu, nu, entries, floor
    return None


def _pick_cone_ratios(b, rho: float, second: float) -> tuple[Fraction, Fraction] | None:
    gap = rho - max(second, 1.0)
    if gap <= 0:
        return None
    for shrink in (0.5, 0.25, 0.125):
        lo = max(second, 1.0) + shrink * gap
        hi = rho + shrink * gap * 4
        mu = Fraction(max(1, round(lo * 256)), 256)
        nu = Fraction(round(hi * 256) + 1, 256)
        if mu <= 1 or nu <= mu:
            continue
        lb, ub = _cone_bounds(b, mu, nu)
        if lb >= mu and ub <= nu:
            return mu, nu
    return None


def _find_entries(seq, q, dd, mu, nu, cover_from) -> tuple[ConeEntry, ...]:
    entries = []
    for r in range(q):
        found = None
        e = r
        while e <= cover_from + 1:
            idx = [e + q * i for i in range(dd)]
            vals = [seq[i] for i in idx]
            sign = 1 if vals[0] > 0 else -1
            sv = [sign * x for x in vals]
            if all(x > 0 for x in sv) and all(
                mu * sv[i] <= sv[i + 1] <= nu * sv[i] for i in range(dd - 1)
            ):
                found = ConeEntry(residue=r, start_index=e, sign=sign)
                break
            e += q
        if found is None:
            raise _ConeFailure(f"no cone entry for residue {r}")
        entries.append(found)
    return tuple(entries)


def _cone_floor(seq, q, mu, entries, cover_from) -> int:
    """Certified integer lower bound for |seq(j)| over indices j > cover_from."""
    best: Fraction | None = None
    for ent in entries:
        base = abs(seq[ent.start_index])
        m = cover_from + 1
        while (m - ent.start_index) % q:
            m += 1
        steps = (m - ent.start_index) // q
        assert steps >= 0
        bound = Fraction(base) * mu**steps
        if best is None or bound < best:
            best = bound
    assert best is not None
    return ceil_fraction(best)


def _residue_polynomial(vals: list[int]) -> list[Fraction]:
    """Monomial coefficients of the degree < len(vals) polynomial through
    (0, vals[0]), (1, vals[1]), ... via Newton forward differences."""
    diffs = [Fraction(v) for v in vals]
    newton = [diffs[0]]
    while len(diffs) > 1:
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
        newton.append(diffs[0])
    coeffs = [Fraction(0)] * len(newton)
    basis = [Fraction(1)]  # binomial C(j, i) expanded in powers of j
    for i, c in enumerate(newton):
        if i > 0:
            new = [Fraction(0)] * (len(basis) + 1)
            for p, a in enumerate(basis):
                new[p + 1] += a
                new[p] -= a * (i - 1)
            basis = [x / i for x in new]
        for p, a in enumerate(basis):
            coeffs[p] += c * a
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _poly_eval_fraction(coeffs: list[Fraction], j: int) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * j + c
    return acc


def _poly_tail_floor(coeffs: list[Fraction], j_min: int) -> Fraction:
    """Exact lower bound for |P(j)| over integers j >= j_min >= 0."""
    deg = len(coeffs) - 1
    if deg <= 0:
        return abs(coeffs[0])
    lead = abs(coeffs[-1])
    rest = sum(abs(c) for c in coeffs[:-1])
    # beyond T the crude bound lead*j^deg - rest*j^(deg-1) >= (lead/2) j^deg grows
    t = ceil_fraction(2 * rest / lead) + 1
    t = max(t, j_min, 1)
    best = (lead / 2) * Fraction(t) ** deg
    for j in range(j_min, t):
        val = abs(_poly_eval_fraction(coeffs, j))
        if val < best:
            best = val
    return best


def _try_polynomial_direction(
    seq: dict[int, int], g_dir: Poly, cover_from: int, max_index: int
) -> tuple[int, int] | None:
    """Certify polynomial growth when every root of g_dir is a root of unity.

    Returns (q, floor) where floor bounds |seq(j)| for every j > cover_from.
    """
    orders, rest = strip_cyclotomic_factors(g_dir)
    if rest != (1,):
        return None
    q = lcm(*orders) if orders else 1
    d = len(g_dir) - 1
    if q * (d + 1) + cover_from + 1 > max_index:
        return None
    best: Fraction | None = None
    for r in range(q):
        # values of the residue-class subsequence starting at the first index
        # >= cover_from + 1 in this class
        start = cover_from + 1
        while start % q != r:
            start += 1
        vals = [seq[start + q * i] for i in range(d + 1)]
        coeffs = _residue_polynomial(vals)
        floor_r = _poly_tail_floor(coeffs, 0)
        if best is None or floor_r < best:
            best = floor_r
    assert best is not None
    if best <= 0:
        return None
    return q, ceil_fraction(best)


def derive_direction(
    vals: dict[int, int],
    g: Poly,
    direction: str,
    window: int,
    transfer: Fraction,
) -> DirectionCertificate:
    d = len(g) - 1
    if direction == "forward":
        g_dir = g
        seq = {j: vals[j] for j in vals if j >= -2}
        max_index = max(seq)
    else:
        g_dir = reciprocal_monic(g)
        seq = {-j: vals[j] for j in vals if j <= 2}
        max_index = max(seq)

    # level 1 cone on the raw sequence
    res = _try_cone_direction(seq, g_dir, window, max_index)
    if res is not None:
        q, mu, nu, entries, floor = res
        fnorm = ceil_fraction(Fraction(floor) / transfer)
        return DirectionCertificate(direction, "cone", 1, q, mu, nu, entries, floor, fnorm)

    # polynomial path for root-of-unity spectra
    respoly = _try_polynomial_direction(seq, g_dir, window, max_index)
    if respoly is not None:
        q, floor = respoly
        fnorm = ceil_fraction(Fraction(floor) / transfer)
        return DirectionCertificate(direction, "polynomial", 0, q, Fraction(0), Fraction(0), (), floor, fnorm)

    # level 2 cone on Hankel determinants (dominant complex pair)
    if d >= 3:
        hpoly = char_poly(compound_second(companion(g_dir)))
        hseq = {j: seq[j] * seq[j + 2] - seq[j + 1] ** 2
                for j in seq if j + 2 in seq}
        res = _try_cone_direction(hseq, hpoly, window - 2, max(hseq, default=0))
        if res is not None:
            q, mu, nu, entries, floor = res
            m_floor = ceil_sqrt_fraction(Fraction(floor, 2))
            fnorm = ceil_fraction(Fraction(m_floor) / transfer)
            return DirectionCertificate(direction, "cone", 2, q, mu, nu, entries, floor, fnorm)

    return DirectionCertificate(direction, "window_only")


def compound_second(a: Mat) -> Mat:
    from .intmat import compound_matrix

    return compound_matrix(a, 2)


def derive_growth_certificate(m: Mat, v: Vec, window: int) -> GrowthCertificate:
    """Produce a growth certificate for the orbit of v under M.

    The orbit must be non-periodic (minimal annihilator not a squarefree
    product of cyclotomics).
    """
    g = minimal_annihilator(m, v)
    if is_squarefree_product_of_cyclotomics(g):
        raise ValueError("orbit is periodic; growth certificates do not apply")
    d = len(g) - 1
    span = window + 2 + 24 * (d * d + d + 2)
    vals = impulse_values(g, -span, span)
    basis = cyclic_basis(m, v, d)
    k = transfer_constant(basis)
    fwd = derive_direction(vals, g, "forward", window, k)
    bwd = derive_direction(vals, g, "backward", window, k)
    rigorous = fwd.kind != "window_only" and bwd.kind != "window_only"
    floor = min(fwd.floor_norm, bwd.floor_norm) if rigorous else None
    return GrowthCertificate(window, g, k, fwd, bwd, rigorous, floor)


def check_growth_certificate(m: Mat, v: Vec, cert: GrowthCertificate) -> list[str]:
    """Re-verify a growth certificate from scratch; returns a list of failures."""
    problems: list[str] = []
    try:
        g = minimal_annihilator(m, v)
    except (ValueError, AssertionError) as exc:
        return [f"annihilator recomputation failed: {exc}"]
    if g != cert.annihilator:
        return ["stored annihilator does not match the recomputed one"]
    if is_squarefree_product_of_cyclotomics(g):
        return ["orbit is periodic; growth certificate is vacuous"]
    d = len(g) - 1
    basis = cyclic_basis(m, v, d)
    k = transfer_constant(basis)
    if k != cert.transfer:
        problems.append("transfer constant mismatch")
    span = cert.window_radius + 2 + max(
        (dc.power_step * (d * d + d + 2) for dc in (cert.forward, cert.backward)),
        default=0,
    ) + 26 * (d * d + d + 2)
    vals = impulse_values(g, -span, span)
    floors = {}
    for dc in (cert.forward, cert.backward):
        errs, floor_norm = _check_direction(vals, g, dc, cert.window_radius, k)
        problems.extend(errs)
        floors[dc.direction] = floor_norm
    if cert.rigorous:
        if cert.forward.kind == "window_only" or cert.backward.kind == "window_only":
            problems.append("certificate marked rigorous with window-only evidence")
        elif cert.min_exterior_norm is None:
            problems.append("rigorous certificate missing its exterior norm bound")
        elif min(floors.values()) < cert.min_exterior_norm:
            problems.append("claimed exterior norm bound exceeds the certified floor")
    return problems


def _check_direction(vals, g, dc: DirectionCertificate, window, transfer):
    if dc.direction == "forward":
        g_dir = g
        seq = {j: vals[j] for j in vals if j >= -2}
    elif dc.direction == "backward":
        g_dir = reciprocal_monic(g)
        seq = {-j: vals[j] for j in vals if j <= 2}
    else:
        return [f"unknown direction {dc.direction!r}"], 0
    if dc.kind == "window_only":
        return [], 0
    if dc.kind == "polynomial":
        res = _try_polynomial_direction(seq, g_dir, window, max(seq))
        if res is None:
            return [f"{dc.direction}: polynomial evidence cannot be reproduced"], 0
        _, floor = res
        if floor < dc.floor_seq:
            return [f"{dc.direction}: stored polynomial floor too large"], 0
        fnorm = ceil_fraction(Fraction(floor) / transfer)
        if fnorm < dc.floor_norm:
            return [f"{dc.direction}: stored norm floor too large"], 0
        return [], fnorm
    if dc.kind != "cone":
        return [f"unknown growth kind {dc.kind!r}"], 0
    problems = []
    d = len(g) - 1
    if dc.level == 1:
        use_seq = seq
        rec = g_dir
        cover_from = window
    elif dc.level == 2 and d >= 3:
        use_seq = {j: seq[j] * seq[j + 2] - seq[j + 1] ** 2 for j in seq if j + 2 in seq}
        rec = char_poly(compound_second(companion(g_dir)))
        cover_from = window - 2
    else:
        return [f"{dc.direction}: invalid cone level"], 0
    q = dc.power_step
    comp = companion(rec)
    qpoly = char_poly(mat_pow(comp, q)) if q > 1 else rec
    b = recurrence_from_poly(qpoly)
    dd = len(rec) - 1
    lb, ub = _cone_bounds(b, dc.mu, dc.nu)
    if not (dc.mu > 1 and dc.nu >= dc.mu):
        problems.append(f"{dc.direction}: cone ratios out of range")
    if lb < dc.mu or ub > dc.nu:
        problems.append(f"{dc.direction}: cone invariance inequality fails")
    seen = set()
    for ent in dc.entries:
        seen.add(ent.residue)
        if ent.start_index % q != ent.residue or ent.start_index > cover_from + 1:
            problems.append(f"{dc.direction}: entry for residue {ent.residue} out of place")
            continue
        try:
            sv = [ent.sign * use_seq[ent.start_index + q * i] for i in range(dd)]
        except KeyError:
            problems.append(f"{dc.direction}: entry indices outside recomputed range")
            continue
        if not all(x > 0 for x in sv):
            problems.append(f"{dc.direction}: entry values not positive for residue {ent.residue}")
            continue
        if not all(dc.mu * sv[i] <= sv[i + 1] <= dc.nu * sv[i] for i in range(dd - 1)):
            problems.append(f"{dc.direction}: entry chain violates the cone for residue {ent.residue}")
    if seen != set(range(q)):
        problems.append(f"{dc.direction}: cone entries do not cover all residues mod {q}")
    if problems:
        return problems, 0
    floor = _cone_floor(use_seq, q, dc.mu, dc.entries, cover_from)
    if floor < dc.floor_seq:
        problems.append(f"{dc.direction}: stored sequence floor too large")
        return problems, 0
    if dc.level == 2:
        m_floor = ceil_sqrt_fraction(Fraction(floor, 2))
        fnorm = ceil_fraction(Fraction(m_floor) / transfer)
    else:
        fnorm = ceil_fraction(Fraction(floor) / transfer)
    if fnorm < dc.floor_norm:
        problems.append(f"{dc.direction}: stored norm floor too large")
        return problems, 0
    return [], fnorm
