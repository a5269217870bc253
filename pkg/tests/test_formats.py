import json
import math
import re
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coneeig import certificate
from coneeig.cone import VerifyConfig, verify_all
from coneeig.errors import DimensionMismatch, ParseError, VerificationFailure
from coneeig.formats import (
    box_from_json,
    box_text,
    box_to_json,
    dec_down,
    dec_up,
    dump_matrix,
    interval_from_json,
    interval_to_json,
    load_matrix,
    load_poly,
    mid_rem,
    parse_matrix,
    parse_poly,
)
from coneeig.interval import CInterval, Interval
from coneeig.linalg import IMatrix

doubles = st.floats(allow_nan=False, allow_infinity=False)


@st.composite
def intervals(draw, elements=st.floats(-1e12, 1e12, allow_nan=False)):
    a, b = draw(elements), draw(elements)
    return Interval(min(a, b), max(a, b))


_MID_REM = re.compile(r"^(?P<base>-?[0-9.]+(?:E[+-]?\d+)?)?\+?\[(?P<lo>-?\d+),(?P<hi>-?\d+)\]e(?P<p>-?\d+)$")


def read_mid_rem(s: str) -> tuple[Fraction, Fraction]:
    """Exact set denoted by a ``mid_rem`` string."""
    m = _MID_REM.match(s)
    if m:
        base = Fraction(m["base"]) if m["base"] else Fraction(0)
        unit = Fraction(10) ** int(m["p"])
        return base + int(m["lo"]) * unit, base + int(m["hi"]) * unit
    if s.startswith("["):
        lo, hi = s[1:-1].split(",")
        return Fraction(lo), Fraction(hi)
    return Fraction(s), Fraction(s)


# -- matrix documents ---------------------------------------------------------


def test_parse_entry_forms():
    doc = {
        "n": 2,
        "entries": [
            [1, "0.4"],
            [{"re": -2, "im": "0.5"}, {"re": {"lo": 1, "hi": 2}, "im": {"lo": "-0.1", "hi": "0.1"}}],
        ],
    }
    m = parse_matrix(json.dumps(doc))
    assert m[0, 0] == CInterval(Interval(1, 1), Interval(0, 0))
    assert Fraction(2, 5) in m[0, 1].re and m[0, 1].re.lo < m[0, 1].re.hi
    assert m[1, 0].im == Interval(0.5, 0.5)
    assert m[1, 1].re == Interval(1, 2)
    assert Fraction(-1, 10) in m[1, 1].im and Fraction(1, 10) in m[1, 1].im
    assert parse_matrix(doc) == m


def test_n_is_optional():
    assert parse_matrix({"entries": [[1]]}).shape == (1, 1)


@pytest.mark.parametrize(
    "doc",
    [
        "not json",
        "[]",
        {"n": 2},
        {"n": 1, "entries": []},
        {"n": 3, "entries": [[1, 2], [3, 4]]},
        {"n": True, "entries": [[1]]},
        {"entries": [[True]]},
        {"entries": [[None]]},
        {"entries": [[{"re": 1, "x": 2}]]},
        {"entries": [[{"re": {"lo": 2, "hi": 1}}]]},
        {"entries": [[{"re": {"lo": 1}}]]},
        {"entries": [["abc"]]},
    ],
)
def test_parse_errors(doc):
    with pytest.raises(ParseError):
        parse_matrix(doc if isinstance(doc, str) else json.dumps(doc))


def test_non_square_rows():
    with pytest.raises(DimensionMismatch):
        parse_matrix({"n": 2, "entries": [[1, 2], [3]]})


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.data())
def test_dump_round_trips_bit_exactly(n, data):
    vals = data.draw(st.lists(st.tuples(doubles, doubles), min_size=n * n, max_size=n * n))
    a = np.array([complex(r, i) for r, i in vals]).reshape(n, n)
    back = parse_matrix(dump_matrix(a))
    assert back.is_point()
    assert np.array_equal(back.mid().real, a.real) and np.array_equal(back.mid().imag, a.imag)


def test_dump_rejects_boxes():
    with pytest.raises(ValueError):
        dump_matrix(IMatrix.hull([["0.1"]]))


def test_load_from_file(tmp_path):
    f = tmp_path / "m.json"
    f.write_text(dump_matrix(np.eye(2)))
    assert load_matrix(f) == IMatrix.identity(2)
    g = tmp_path / "p.json"
    g.write_text('[1, {"re": "0.5", "im": -1}, 2]')
    assert load_poly(g) == [(1, 0), (Fraction(1, 2), -1), (2, 0)]


@pytest.mark.parametrize("doc", ["[1]", "{}", "[1, true]", '[1, {"lo": 1, "hi": 2}]', "[1, null]", '[1, {"re": [1]}]'])
def test_poly_parse_errors(doc):
    with pytest.raises(ParseError):
        parse_poly(doc)


# -- outward decimals -----------------------------------------------------------


@settings(max_examples=1000, deadline=None)
@given(doubles)
def test_decimal_strings_are_outward_and_tight(x):
    lo, hi = dec_down(x), dec_up(x)
    assert Fraction(lo) <= Fraction(x) <= Fraction(hi)
    below, above = math.nextafter(x, -math.inf), math.nextafter(x, math.inf)
    if math.isfinite(below):
        assert Fraction(lo) > Fraction(below)
    if math.isfinite(above):
        assert Fraction(hi) < Fraction(above)


def test_decimal_strings_short_when_exact():
    assert dec_down(0.5) == dec_up(0.5) == "0.5"
    # the double nearest 0.1 is slightly above it
    assert dec_down(0.1) == "0.10000000000000000"
    assert dec_up(0.1) == "0.10000000000000001"
    assert dec_down(0.0) == "0"
    assert dec_up(math.inf) == "inf" and dec_down(-math.inf) == "-inf"


@settings(max_examples=500, deadline=None)
@given(intervals(doubles))
def test_interval_json_reads_back_as_superset(iv):
    back = interval_from_json(interval_to_json(iv))
    assert back.lo <= iv.lo and iv.hi <= back.hi
    assert back.lo >= math.nextafter(iv.lo, -math.inf) and back.hi <= math.nextafter(iv.hi, math.inf)


@settings(max_examples=200, deadline=None)
@given(intervals(), intervals())
def test_box_json_reads_back_as_superset(re_, im):
    z = CInterval(re_, im)
    back = box_from_json(json.loads(json.dumps(box_to_json(z))))
    assert z in back


# -- mid_rem text -----------------------------------------------------------------


def test_mid_rem_examples():
    assert mid_rem(Interval(1.25, 1.5)) == "1+[25,50]e-2"
    assert mid_rem(Interval(5.5662563551, 5.5662563558)) == "5.566256355+[10,81]e-11"
    assert mid_rem(Interval(3, 3)) == "3.0"
    assert mid_rem(Interval(-2.5, 3.5)) == "[-25,35]e-1"
    assert mid_rem(Interval(1, math.inf)) == "[1.0,inf]"


@settings(max_examples=500, deadline=None)
@given(intervals(), st.integers(1, 4))
def test_mid_rem_contains_interval(iv, digits):
    lo, hi = read_mid_rem(mid_rem(iv, digits))
    assert lo <= Fraction(iv.lo) and Fraction(iv.hi) <= hi


@settings(max_examples=300, deadline=None)
@given(intervals(st.floats(-1e6, 1e6, allow_nan=False)))
def test_mid_rem_is_not_much_wider(iv):
    if iv.lo == iv.hi:
        return
    lo, hi = read_mid_rem(mid_rem(iv))
    width = Fraction(iv.hi) - Fraction(iv.lo)
    # two remainder digits: outward rounding adds at most two units of 10**p <= width/10
    assert hi - lo <= width + width / 5 + Fraction(1, 10**300)


def test_box_text():
    z = CInterval(Interval(1.25, 1.5), Interval(-1, -1))
    assert box_text(z) == "1+[25,50]e-2 + (-1.0)i"


# -- certificates -----------------------------------------------------------------


def test_certificate_round_trip():
    a = np.random.default_rng(3).uniform(-1, 1, (4, 4))
    cfg = VerifyConfig()
    res = verify_all(a, cfg)
    doc = json.loads(json.dumps(certificate.build("eig", certificate.digest(b"x"), 4, cfg, res)))
    assert doc["summary"] == {"requested": 4, "verified": 4, "failed": 0}
    assert doc["input"].startswith("sha256:")
    for entry, r in zip(doc["results"], res):
        assert entry["k"] == r.k + 1
        value, vector = certificate.boxes_from_entry(entry)
        assert r.value in value
        for got, want in zip(vector, r.vector.entries):
            assert want in got


def test_certificate_records_failures():
    doc = certificate.build("eig", "sha256:0", 2, VerifyConfig(), [VerificationFailure(0, "nope")])
    assert doc["results"] == [{"k": 1, "status": "failed", "reason": "nope"}]
    text = certificate.render_text(doc)
    assert "[1] FAILED: nope" in text and "verified 0/1, failed 1" in text


def test_certificate_rejects_other_objects():
    with pytest.raises(TypeError):
        certificate.result_entry(42)
