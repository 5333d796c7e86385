"""Fixture format: schema, round trips, parameter domains and bundle sections."""

from __future__ import annotations

import json

import pytest

from qjet import fixtures as F
from qjet.bundle import bundle_from_spec

from conftest import FIXTURES


@pytest.mark.parametrize("key", list(FIXTURES))
def test_json_round_trip_rebuilds_the_same_geometry(key):
    name, opts = FIXTURES[key]
    spec = F.fixture_spec(name, **opts)
    again = F.load_spec(json.loads(json.dumps(spec)))
    fx = F.load_fixture(name, **opts)
    assert again.params == fx.params
    assert [str(again.conn.gamma[k]) for k in again.calc.letters] == [str(fx.conn.gamma[k]) for k in fx.calc.letters]
    assert {w: {u: str(c) for u, c in row.items()} for w, row in again.conn.table.items()} == \
        {w: {u: str(c) for u, c in row.items()} for w, row in fx.conn.table.items()}


def test_symbolic_parameters_by_default():
    assert "deltap" in F.bicrossproduct("prop_i").params
    assert "nu" in F.cqsl2("+i").params
    assert "nu" not in F.cqsl2("+i", nu=2).params


@pytest.mark.parametrize("mutate,message", [
    (lambda s: s.update(format=99), "format"),
    (lambda s: s["algebra"].update(kind="lie"), "kind"),
    (lambda s: s.pop("calculus"), "calculus"),
    (lambda s: s["connection"].update(extra=1), "extra"),
])
def test_schema_violations(mutate, message):
    spec = F.fixture_spec("m2")
    mutate(spec)
    with pytest.raises(F.FixtureError, match=message):
        F.load_spec(spec)


def test_parameter_domains():
    with pytest.raises(F.ParameterDomain):
        F.fixture_spec("bicrossproduct", family="i", params={"delta": "0"})
    with pytest.raises(F.ParameterDomain):
        F.fixture_spec("bicrossproduct", family="prop_ii", params={"alpha": "1"})
    with pytest.raises(F.ParameterDomain):
        F.fixture_spec("s3", branch="sideways")
    with pytest.raises(F.FixtureError):
        F.fixture_spec("nope")


def test_incomplete_rewrite_system_is_rejected():
    spec = F.fixture_spec("grassmann_central", n=3)
    # drop one commutation rule: x3*x1 stays irreducible, and overlaps no longer resolve
    spec["algebra"]["rules"].pop("x3*x1")
    spec["algebra"]["rules"]["x3*x2"] = "2*x2*x3"
    with pytest.raises(F.FixtureError):
        F.load_spec(spec)


def test_bundle_section():
    spec = F.fixture_spec("grassmann_central", n=2)
    spec["bundle"] = {"name": "E", "basis": ["f"], "gamma": {"f": "3*e(dx1,f)"},
                      "sigma": {"f,dx1": "e(dx1,f)", "f,dx2": "e(dx2,f)"}}
    fx = F.load_spec(spec)
    b = bundle_from_spec(fx.conn, fx.bundle_spec, fx.names())
    for r in b.check():
        assert r.ok, (r.name, r.witness)


def test_element_parsing_with_forms():
    fx = F.cqsl2("+i")
    t = fx.form("a*e(+) - q*b*e(0,-)")
    assert t.degrees() == [1, 2]
    assert fx.element("a*d") == fx.element("1 + q^-1*b*c")
