"""Independent re-verification of emitted certificates.

The checker never trusts the producer: it recomputes orbit windows, periods,
invariants, growth floors and quotient data from the matrix and the members,
and compares them with what the certificate claims.  Any discrepancy is
reported with the offending member or pair named.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dynamics import (
    _annihilator_orbit_data,
    _periodic_orbit_period,
    act,
    converges_to_full,
    orbit_is_periodic,
)
from .families import (
    DisjointFamilyCertificate,
    NonExpansivityCertificate,
    _invariant_set_for,
    _lift_member,
)
from .growth import check_growth_certificate
from .intmat import (
    UnimodularMatrix,
    det,
    inverse_unimodular,
    is_unipotent,
    mat_mul,
    mat_vec,
    matrix_order,
    transpose,
)
from .metric import isolation_radius_lower_bound
from .subtori import (
    PrimitiveCovector,
    canonicalize_covector,
    covector_norm_inf,
    covector_to_hyperplane,
    hyperplane_to_covector,
)


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    failures: tuple[str, ...]


def _fail(failures: list[str], msg: str) -> None:
    failures.append(msg)


def _check_member_report(t, gamma, report, failures, idx) -> None:
    try:
        h = covector_to_hyperplane(PrimitiveCovector(gamma))
    except ValueError as exc:
        _fail(failures, f"member {idx}: invalid covector ({exc})")
        return
    w = report.window_radius
    if len(report.window) != 2 * w + 1:
        _fail(failures, f"member {idx}: window has {len(report.window)} entries, expected {2 * w + 1}")
        return
    expected = {0: h}
    cur = h
    tinv = t.inv()
    for m in range(1, w + 1):
        cur = act(t, cur)
        expected[m] = cur
    cur = h
    for m in range(1, w + 1):
        cur = act(tinv, cur)
        expected[-m] = cur
    for m, sub in report.window:
        if m not in expected or expected[m] != sub:
            _fail(failures, f"member {idx}: window entry at exponent {m} does not match recomputation")
            return
    periodic = orbit_is_periodic(t, h)
    if periodic != (report.status == "periodic"):
        _fail(failures, f"member {idx}: orbit status is wrong")
        return
    if periodic:
        true_period = _periodic_orbit_period(t, h)
        if report.period != true_period:
            _fail(failures, f"member {idx}: period {report.period} but recomputed {true_period}")
        return
    if report.growth is not None:
        m_rows, pv = _annihilator_orbit_data(t, h)
        problems = check_growth_certificate(m_rows, pv, report.growth)
        for p in problems:
            _fail(failures, f"member {idx}: growth certificate: {p}")
        if report.growth.window_radius != w:
            _fail(failures, f"member {idx}: growth window disagrees with the orbit window")
        if (
            report.min_exterior_norm is not None
            and report.growth.min_exterior_norm is not None
            and report.min_exterior_norm > report.growth.min_exterior_norm
        ):
            _fail(failures, f"member {idx}: claimed exterior norm exceeds the growth floor")
    elif report.min_exterior_norm is not None:
        _fail(failures, f"member {idx}: exterior norm claim without growth evidence")


def verify_family(cert: DisjointFamilyCertificate) -> VerificationResult:
    failures: list[str] = []
    try:
        t = UnimodularMatrix(cert.matrix)
    except ValueError as exc:
        return VerificationResult(False, (f"matrix: {exc}",))
    n = t.n
    if cert.count != len(cert.members):
        _fail(failures, "count does not equal the number of members")
    if len(set(cert.members)) != len(cert.members):
        dup = [m for m in cert.members if cert.members.count(m) > 1][0]
        _fail(failures, f"duplicate member {dup}")
    for i, g in enumerate(cert.members):
        if len(g) != n:
            _fail(failures, f"member {i}: wrong length")
        elif canonicalize_covector(g) != g:
            _fail(failures, f"member {i}: covector not canonical")
    if len(cert.orbit_reports) != len(cert.members):
        _fail(failures, "one orbit report per member is required")
        return VerificationResult(False, tuple(failures))
    if failures:
        return VerificationResult(False, tuple(failures))
    for i, (g, rep) in enumerate(zip(cert.members, cert.orbit_reports)):
        _check_member_report(t, g, rep, failures, i)
    checker = {
        "finite_order": _verify_periodic_branch,
        "unipotent_power": _verify_unipotent_branch,
        "quotient": _verify_quotient_branch,
        "irreducible_greedy": _verify_greedy_branch,
    }.get(cert.branch)
    if checker is None:
        _fail(failures, f"unknown branch {cert.branch!r}")
    else:
        checker(t, cert, failures)
    return VerificationResult(not failures, tuple(failures))


def _verify_periodic_branch(t, cert, failures):
    order = matrix_order(t)
    if order is None:
        _fail(failures, "branch claims finite order but the matrix has infinite order")
        return
    if cert.periodic_orbits is None or len(cert.periodic_orbits) != len(cert.members):
        _fail(failures, "periodic branch needs one enumerated orbit per member")
        return
    from .dynamics import dual_matrix

    s = dual_matrix(t).rows
    for i, (g, orb) in enumerate(zip(cert.members, cert.periodic_orbits)):
        cur = g
        recomputed = set()
        for _ in range(order):
            recomputed.add(canonicalize_covector(cur))
            cur = mat_vec(s, cur)
        if set(orb) != recomputed:
            _fail(failures, f"member {i}: stored orbit does not match recomputation")
    for i in range(len(cert.members)):
        for j in range(i + 1, len(cert.members)):
            if set(cert.periodic_orbits[i]).intersection(cert.periodic_orbits[j]):
                _fail(failures, f"members {i} and {j}: periodic orbits intersect")


def _verify_unipotent_branch(t, cert, failures):
    power = cert.unipotent_power
    if power is None or power < 1:
        _fail(failures, "unipotent branch needs the power exponent")
        return
    tp = t.power(power)
    if not is_unipotent(tp):
        _fail(failures, f"T^{power} is not unipotent")
        return
    if tp.is_identity():
        _fail(failures, f"T^{power} is the identity; the finite-order branch applies")
        return
    if cert.invariant_sets is None or len(cert.invariant_sets) != len(cert.members):
        _fail(failures, "unipotent branch needs one invariant set per member")
        return
    for i, (g, stored) in enumerate(zip(cert.members, cert.invariant_sets)):
        recomputed = _invariant_set_for(t, g, power)
        if tuple(stored) != recomputed:
            _fail(failures, f"member {i}: invariant set does not match recomputation")
    for i in range(len(cert.members)):
        for j in range(i + 1, len(cert.members)):
            if set(cert.invariant_sets[i]).intersection(cert.invariant_sets[j]):
                _fail(failures, f"members {i} and {j}: invariant sets intersect")


def _verify_quotient_branch(t, cert, failures):
    q = cert.quotient
    if q is None:
        _fail(failures, "quotient branch needs quotient evidence")
        return
    n = t.n
    h_star = q.invariant_subtorus
    kdim = h_star.dim
    if not 0 < kdim <= n - 2:
        _fail(failures, "invariant subtorus must have codimension at least 2")
        return
    if act(t, h_star) != h_star:
        _fail(failures, "the quotient subtorus is not invariant")
        return
    w = q.completion
    if len(w) != n or det(w) not in (1, -1):
        _fail(failures, "completion matrix is not unimodular")
        return
    if tuple(w[:kdim]) != h_star.basis:
        _fail(failures, "completion does not start with the invariant basis")
        return
    m_prime = mat_mul(mat_mul(w, transpose(t.rows)), inverse_unimodular(w))
    for i in range(kdim):
        if any(m_prime[i][j] != 0 for j in range(kdim, n)):
            _fail(failures, "conjugated action does not preserve the flag")
            return
    d_block = tuple(tuple(m_prime[i][j] for j in range(kdim, n)) for i in range(kdim, n))
    if d_block != q.quotient_matrix:
        _fail(failures, "stored quotient matrix does not match the conjugation")
        return
    if q.inner.matrix != transpose(d_block):
        _fail(failures, "inner certificate is for a different quotient automorphism")
        return
    inner_result = verify_family(q.inner)
    for f in inner_result.failures:
        _fail(failures, f"quotient interior: {f}")
    if len(q.inner.members) != len(cert.members):
        _fail(failures, "member count differs from the quotient family")
        return
    for i, inner_gamma in enumerate(q.inner.members):
        lifted = _lift_member(w, kdim, inner_gamma, n)
        if lifted != cert.members[i]:
            _fail(failures, f"member {i}: does not lift the quotient member")


def _verify_greedy_branch(t, cert, failures):
    window_sets = []
    for rep in cert.orbit_reports:
        window_sets.append(
            frozenset(hyperplane_to_covector(h).entries for _, h in rep.window)
        )
    for i in range(len(cert.members)):
        for j in range(len(cert.members)):
            if i == j:
                continue
            gi, gj = cert.members[i], cert.members[j]
            rep_i = cert.orbit_reports[i]
            if gj in window_sets[i]:
                _fail(failures, f"members {i} and {j}: the second lies on the first orbit window")
                continue
            # the growth-floor obligation binds only when rigor is claimed;
            # otherwise the evidence is labeled window-only and stays advisory
            if i < j and cert.rigorous:
                if rep_i.min_exterior_norm is None:
                    _fail(
                        failures,
                        f"members {i} and {j}: no growth floor although the certificate claims rigor",
                    )
                elif covector_norm_inf(gj) >= rep_i.min_exterior_norm:
                    _fail(
                        failures,
                        f"members {i} and {j}: norm of the second reaches the growth floor of the first",
                    )
    if cert.rigorous and any(not rep.rigorous for rep in cert.orbit_reports):
        _fail(failures, "certificate claims rigor but some member evidence is window-only")


def verify_non_expansivity(cert: NonExpansivityCertificate) -> VerificationResult:
    failures: list[str] = []
    try:
        t = UnimodularMatrix(cert.matrix)
    except ValueError as exc:
        return VerificationResult(False, (f"matrix: {exc}",))
    order = matrix_order(t)
    if cert.branch == "finite_order":
        if order is None:
            _fail(failures, "matrix has infinite order")
        elif cert.order != order:
            _fail(failures, f"stored order {cert.order}, recomputed {order}")
        if cert.fixed is None or len(cert.fixed) < 2:
            _fail(failures, "need at least two fixed subtori")
        else:
            if len(set(cert.fixed)) != len(cert.fixed):
                _fail(failures, "fixed subtori are not distinct")
            if order is not None:
                tp = t.power(order)
                for i, h in enumerate(cert.fixed):
                    if act(tp, h) != h:
                        _fail(failures, f"fixed subtorus {i} is not fixed by the power")
    elif cert.branch == "infinitely_many_orbits":
        if order is not None:
            _fail(failures, "matrix has finite order; wrong branch")
        if cert.family is None:
            _fail(failures, "missing the disjoint family")
            return VerificationResult(False, tuple(failures))
        if cert.family.matrix != cert.matrix:
            _fail(failures, "family certificate is for a different matrix")
            return VerificationResult(False, tuple(failures))
        sub = verify_family(cert.family)
        for f in sub.failures:
            _fail(failures, f"family: {f}")
        if cert.converges is None or len(cert.converges) != len(cert.family.members):
            _fail(failures, "need convergence evidence per member")
        else:
            for i, (g, claimed) in enumerate(zip(cert.family.members, cert.converges)):
                h = covector_to_hyperplane(PrimitiveCovector(g))
                if orbit_is_periodic(t, h):
                    _fail(failures, f"member {i}: orbit is periodic, not injective")
                actual = converges_to_full(t, h)
                if actual != claimed:
                    _fail(failures, f"member {i}: convergence claim is wrong")
                elif not actual:
                    _fail(failures, f"member {i}: orbit does not converge to the full torus")
        if cert.isolation is not None:
            iso = cert.isolation
            recomputed = isolation_radius_lower_bound(
                iso.subtorus, iso.dual_norm_bound, iso.resolution
            )
            if recomputed.bound != iso.bound:
                _fail(failures, "isolation bound does not match recomputation")
            if iso.bound <= 0:
                _fail(failures, "isolation bound is not positive")
    else:
        _fail(failures, f"unknown branch {cert.branch!r}")
    return VerificationResult(not failures, tuple(failures))


def verify_certificate(cert) -> VerificationResult:
    """Verify a parsed certificate object (family or non-expansivity).

    Tampered data may violate invariants deep inside the recomputation; any
    internal error counts as a rejection, never as acceptance.
    """
    if isinstance(cert, DisjointFamilyCertificate):
        checker = verify_family
    elif isinstance(cert, NonExpansivityCertificate):
        checker = verify_non_expansivity
    else:
        raise TypeError(f"cannot verify objects of type {type(cert).__name__}")
    try:
        return checker(cert)
    except Exception as exc:
        return VerificationResult(False, (f"evidence recomputation failed: {exc}",))
