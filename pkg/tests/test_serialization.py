import json
import random
from pathlib import Path

import pytest

from oracles import random_word
from tordyn.families import disjoint_hyperplane_orbits, non_expansivity_certificate
from tordyn.intmat import UnimodularMatrix
from tordyn.metric import hausdorff_distance
from tordyn.serialization import (
    FORMAT_VERSION,
    ParseError,
    canonical_json,
    encode_family,
    encode_metric_estimate,
    encode_non_expansivity,
    encode_orbit_report,
    encode_subtorus,
    parse_certificate,
    parse_covector,
    parse_family,
    parse_non_expansivity,
    parse_orbit_report,
    parse_subtorus,
    parse_unimodular,
)
from tordyn.subtori import Subtorus

DATA = Path(__file__).parent / "data"

ROT = UnimodularMatrix(((0, -1), (1, 0)))
CAT = UnimodularMatrix(((2, 1), (1, 1)))


def test_subtorus_roundtrip_random():
    rng = random.Random(91)
    for _ in range(100):
        n = rng.randint(2, 4)
        h = Subtorus.from_generators(
            n, [tuple(rng.randint(-4, 4) for _ in range(n)) for _ in range(rng.randint(0, n))]
        )
        assert parse_subtorus(json.loads(json.dumps(encode_subtorus(h)))) == h


def test_parse_rejects_non_canonical_basis():
    with pytest.raises(ParseError, match="non-canonical basis"):
        parse_subtorus({"ambient_dim": 2, "basis": [[0, 1], [1, 0]]})
    with pytest.raises(ParseError, match="non-canonical basis"):
        parse_subtorus({"ambient_dim": 2, "basis": [[-1, 2]]})
    # canonical but unsaturated bases are rejected for the saturation invariant
    with pytest.raises(ParseError, match="saturated"):
        parse_subtorus({"ambient_dim": 2, "basis": [[2, 4]]})


def test_parse_rejects_non_integer_entries():
    with pytest.raises(ParseError):
        parse_unimodular([[1.5, 0], [0, 1]])
    with pytest.raises(ParseError):
        parse_unimodular([[True, False], [False, True]])
    with pytest.raises(ParseError):
        parse_covector([1, 2.5])


def test_parse_rejects_non_unimodular():
    with pytest.raises(ParseError, match="determinant"):
        parse_unimodular([[2, 0], [0, 1]])


def test_family_roundtrip():
    fam = disjoint_hyperplane_orbits(CAT, 6)
    text = canonical_json(encode_family(fam))
    assert parse_family(json.loads(text)) == fam
    # canonical output is stable under a reserialize cycle
    again = canonical_json(encode_family(parse_family(json.loads(text))))
    assert again == text


def test_non_expansivity_roundtrip():
    for t in (ROT, CAT):
        cert = non_expansivity_certificate(t, 5)
        text = canonical_json(encode_non_expansivity(cert))
        assert parse_non_expansivity(json.loads(text)) == cert


def test_orbit_report_roundtrip():
    from tordyn.dynamics import orbit

    h = Subtorus.from_generators(2, [(1, 0)])
    rep = orbit(CAT, h, 6)
    data = json.loads(json.dumps(encode_orbit_report(rep)))
    assert parse_orbit_report(data, 2) == rep


def test_unknown_version_rejected():
    fam = disjoint_hyperplane_orbits(CAT, 3)
    data = encode_family(fam)
    data["format_version"] = FORMAT_VERSION + 1
    with pytest.raises(ParseError, match="format version"):
        parse_family(data)
    ne = encode_non_expansivity(non_expansivity_certificate(ROT, 3))
    ne["format_version"] = 99
    with pytest.raises(ParseError, match="format version"):
        parse_non_expansivity(ne)


def test_parse_certificate_dispatch():
    fam = disjoint_hyperplane_orbits(CAT, 3)
    assert parse_certificate(encode_family(fam)) == fam
    with pytest.raises(ParseError, match="kind"):
        parse_certificate({"kind": "mystery", "format_version": 1})


def test_metric_estimate_exact_fields():
    est = hausdorff_distance(
        Subtorus.from_generators(2, [(1, 0)]), Subtorus.from_generators(2, [(0, 1)]), "1/50"
    )
    data = encode_metric_estimate(est)
    num, den = map(int, data["value_exact"].split("/"))
    assert abs(data["value"] - num / den) < 1e-12


def test_golden_finite_order_certificate():
    cert = non_expansivity_certificate(ROT, 10)
    text = canonical_json(encode_non_expansivity(cert))
    golden = (DATA / "golden_finite_order_rotation.json").read_text()
    assert text == golden


def test_roundtrip_many_random_families():
    rng = random.Random(92)
    for _ in range(6):
        t = random_word(rng, rng.choice((2, 3)), entry_cap=30)
        fam = disjoint_hyperplane_orbits(t, 3)
        text = canonical_json(encode_family(fam))
        assert parse_family(json.loads(text)) == fam
