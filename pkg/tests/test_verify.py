import copy
import random

import pytest

from oracles import random_word
from tordyn.dynamics import dual_matrix
from tordyn.families import disjoint_hyperplane_orbits, non_expansivity_certificate
from tordyn.intmat import UnimodularMatrix, mat_vec
from tordyn.serialization import (
    encode_family,
    encode_non_expansivity,
    parse_family,
    parse_non_expansivity,
)
from tordyn.subtori import canonicalize_covector
from tordyn.verify import verify_certificate

CAT = UnimodularMatrix(((2, 1), (1, 1)))
ROT = UnimodularMatrix(((0, -1), (1, 0)))
SHEAR = UnimodularMatrix(((1, 1), (0, 1)))
COMPANION = UnimodularMatrix(((0, 1, 0), (0, 0, 1), (1, 1, 0)))


@pytest.fixture(scope="module")
def cat_family():
    return encode_family(disjoint_hyperplane_orbits(CAT, 8))


@pytest.fixture(scope="module")
def shear_family():
    return encode_family(disjoint_hyperplane_orbits(SHEAR, 8))


def reject(payload):
    cert = parse_family(payload) if payload.get("kind") == "disjoint_family" else parse_non_expansivity(payload)
    result = verify_certificate(cert)
    assert not result.ok
    return result


def accept(payload):
    cert = parse_family(payload) if payload.get("kind") == "disjoint_family" else parse_non_expansivity(payload)
    result = verify_certificate(cert)
    assert result.ok, result.failures
    return result


def test_producer_output_verifies(cat_family, shear_family):
    accept(cat_family)
    accept(shear_family)


def test_member_substitution_rejected(cat_family):
    bad = copy.deepcopy(cat_family)
    bad["members"][2] = [9, 4]
    res = reject(bad)
    assert any("member 2" in f for f in res.failures)


def test_window_truncation_rejected(cat_family):
    bad = copy.deepcopy(cat_family)
    bad["orbit_reports"][1]["window"] = bad["orbit_reports"][1]["window"][:-4]
    res = reject(bad)
    assert any("window" in f for f in res.failures)


def test_window_entry_swap_rejected(cat_family):
    bad = copy.deepcopy(cat_family)
    w = bad["orbit_reports"][0]["window"]
    w[0], w[1] = [w[0][0], w[1][1]], [w[1][0], w[0][1]]
    reject(bad)


def test_invariant_forgery_rejected(shear_family):
    bad = copy.deepcopy(shear_family)
    bad["invariant_sets"][0][0]["reduced"] = [123, 456]
    res = reject(bad)
    assert any("invariant" in f for f in res.failures)


def test_duplicated_member_rejected(cat_family):
    bad = copy.deepcopy(cat_family)
    bad["members"][3] = bad["members"][0]
    bad["orbit_reports"][3] = copy.deepcopy(bad["orbit_reports"][0])
    res = reject(bad)
    assert any("duplicate" in f for f in res.failures)


def test_same_orbit_member_rejected(cat_family):
    bad = copy.deepcopy(cat_family)
    g0 = tuple(bad["members"][0])
    moved = canonicalize_covector(mat_vec(dual_matrix(CAT).rows, g0))
    bad["members"][4] = list(moved)
    reject(bad)


def test_growth_floor_forgery_rejected(cat_family):
    bad = copy.deepcopy(cat_family)
    bad["orbit_reports"][0]["min_exterior_norm"] = 10**9
    res = reject(bad)
    assert any("floor" in f or "exterior" in f for f in res.failures)


def test_cone_parameter_forgery_rejected(cat_family):
    bad = copy.deepcopy(cat_family)
    g = bad["orbit_reports"][0]["growth"]
    g["forward"]["floor_seq"] = 10**15
    reject(bad)


def test_count_forgery_rejected(cat_family):
    bad = copy.deepcopy(cat_family)
    bad["count"] = bad["count"] + 3
    res = reject(bad)
    assert any("count" in f for f in res.failures)


def test_rigor_flag_forgery_detected(cat_family):
    bad = copy.deepcopy(cat_family)
    for rep in bad["orbit_reports"]:
        rep["min_exterior_norm"] = None
        rep["growth"] = None
        rep["rigorous"] = False
    assert bad["rigorous"] is True
    res = reject(bad)
    assert any("rigor" in f for f in res.failures)


def test_nonexpansivity_convergence_forgery(cat_family):
    cert = non_expansivity_certificate(COMPANION, 5)
    data = encode_non_expansivity(cert)
    accept(data)
    bad = copy.deepcopy(data)
    bad["converges_to_full"][1] = False
    res = reject(bad)
    assert any("convergence" in f for f in res.failures)


def test_nonexpansivity_order_forgery():
    data = encode_non_expansivity(non_expansivity_certificate(ROT, 5))
    accept(data)
    bad = copy.deepcopy(data)
    bad["order"] = 2
    res = reject(bad)
    assert any("order" in f for f in res.failures)


def test_nonexpansivity_fixed_subtorus_duplication():
    data = encode_non_expansivity(non_expansivity_certificate(ROT, 5))
    bad = copy.deepcopy(data)
    bad["fixed_subtori"][1] = bad["fixed_subtori"][0]
    res = reject(bad)
    assert any("distinct" in f for f in res.failures)


def test_isolation_bound_forgery():
    data = encode_non_expansivity(non_expansivity_certificate(CAT, 4))
    bad = copy.deepcopy(data)
    bad["isolation"]["bound_exact"] = "999/1000"
    res = reject(bad)
    assert any("isolation" in f for f in res.failures)


def test_quotient_matrix_forgery():
    t = UnimodularMatrix(((1, 1, 0), (0, 2, 1), (0, 1, 1)))
    fam = disjoint_hyperplane_orbits(t, 3)
    if fam.branch != "quotient":
        pytest.skip("dispatch did not take the quotient branch")
    data = encode_family(fam)
    accept(data)
    bad = copy.deepcopy(data)
    bad["quotient"]["quotient_matrix"][0][0] += 1
    reject(bad)
    bad = copy.deepcopy(data)
    bad["quotient"]["inner"]["members"][0] = [5, 3]
    reject(bad)


def test_random_families_verify_and_random_tampering_rejected():
    rng = random.Random(101)
    for _ in range(6):
        t = random_word(rng, rng.choice((2, 3)), entry_cap=30)
        fam = disjoint_hyperplane_orbits(t, 3)
        data = encode_family(fam)
        accept(data)
        bad = copy.deepcopy(data)
        gamma = list(bad["members"][rng.randrange(len(bad["members"]))])
        gamma[0] += 1 if gamma[0] >= 0 else -1
        bad["members"][0] = gamma
        cert = parse_family(bad)
        assert not verify_certificate(cert).ok
