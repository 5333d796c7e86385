"""Quantum symmetric forms, braided shuffle products, prolongations and bullets."""

from __future__ import annotations

import itertools
import random
from math import comb

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from qjet.connection import BraidingMismatch
from qjet.jets import JetGeometry, MembershipFailure, NotInImage, jet2_isomorphism
from qjet.tensors import TensorForm

from conftest import load

seeds = st.integers(0, 10 ** 6)
_GEO = {}


def geo(key):
    g = _GEO.get(key)
    if g is None:
        g = _GEO[key] = JetGeometry(load(key).conn)
    return g


@pytest.mark.parametrize("key,d", [("grassmann_2", 2), ("grassmann_3", 3)])
def test_symmetric_forms_of_exterior_calculus_are_symmetric_tensors(key, d):
    for k in range(1, 4):
        assert geo(key).omega_s(k).rank == comb(d + k - 1, k)


@pytest.mark.parametrize("key", ["m2", "cqsl2_plus", "grassmann_3", "bicross_prop_i"])
def test_symmetric_basis_lies_in_kernel_of_wedges(key):
    g = geo(key)
    for k in range(2, 4):
        sp = g.omega_s(k)
        for v in sp.basis:
            assert sp.contains(sp.vector_form(v))


def _basis_forms(g, k):
    sp = g.omega_s(k)
    return [sp.vector_form(v) for v in sp.basis] if k else [g.scalar(g.alg.one)]


@pytest.mark.parametrize("key", ["m2", "cqsl2_plus", "grassmann_2", "bicross_prop_ii"])
def test_odot_is_associative_and_unital(key):
    g = geo(key)
    one = g.scalar(g.alg.one)
    for (i, j, k) in [(1, 1, 1), (1, 2, 1), (2, 1, 1)]:
        for x in _basis_forms(g, i)[:3]:
            assert g.odot_graded(one, 0, x, i) == x == g.odot_graded(x, i, one, 0)
            for y in _basis_forms(g, j)[:3]:
                for z in _basis_forms(g, k)[:2]:
                    lhs = g.odot_graded(g.odot_graded(x, i, y, j), i + j, z, k)
                    rhs = g.odot_graded(x, i, g.odot_graded(y, j, z, k), j + k)
                    assert lhs == rhs


@pytest.mark.parametrize("key", ["m2", "cqsl2_plus", "grassmann_3"])
def test_odot_lands_in_symmetric_forms(key):
    g = geo(key)
    for i, j in [(1, 1), (1, 2), (2, 1)]:
        for x in _basis_forms(g, i):
            for y in _basis_forms(g, j):
                assert g.omega_s(i + j).contains(g.odot_graded(x, i, y, j))


def test_odot_rejects_non_symmetric_inputs():
    fx = load("m2")
    g = geo("m2")
    with pytest.raises(MembershipFailure):
        g.odot_graded(fx.form("e(s,t)"), 2, fx.form("e(s)"), 1)


def test_grassmann_prolongation_is_taylor_expansion():
    fx = load("grassmann_3")
    g = geo("grassmann_3")
    xs = sympy.symbols("x1 x2 x3")
    poly = xs[0] ** 3 * xs[1] - 2 * xs[1] ** 2 * xs[2] + xs[2] + 5
    text = str(poly).replace("**", "^")
    a = fx.element(text)
    for n in range(4):
        expected = TensorForm.zero(fx.calc.frame)
        for w in itertools.product(range(3), repeat=n):
            der = sympy.diff(poly, *[xs[i] for i in w]) if n else poly
            if der != 0:
                expected = expected + TensorForm.basis(fx.calc.frame, w, fx.element(str(sympy.expand(der)).replace("**", "^")))
        assert g.nabla_power(a, n) == expected


@pytest.mark.parametrize("key", ["m2", "cqsl2_plus", "bicross_prop_i"])
@settings(max_examples=4, deadline=None)
@given(seed=seeds)
def test_bullet_axioms_and_bimodule_prolongation(key, seed):
    g = geo(key)
    alg = g.alg
    rng = random.Random(seed)
    a, b, c = alg.sample(rng), alg.sample(rng), alg.sample(rng)
    k = 2
    xi = g.jet_prolong(c, k)
    assert g.bullet(a * b, xi) == g.bullet(a, g.bullet(b, xi))
    assert g.bullet(a * b, xi, "right") == g.bullet(b, g.bullet(a, xi, "right"), "right")
    assert g.bullet(a, g.bullet(b, xi, "right")) == g.bullet(b, g.bullet(a, xi), "right")
    assert g.bullet(alg.one, xi) == xi
    assert g.jet_prolong(a * b, k) == g.bullet(a, g.jet_prolong(b, k))
    assert g.jet_prolong(a * b, k) == g.bullet(b, g.jet_prolong(a, k), "right")
    assert g.project(g.jet_prolong(a, k)) == g.jet_prolong(a, k - 1)


def test_reduced_component_outside_image():
    fx = load("m2")
    with pytest.raises(NotInImage):
        geo("m2").reduced_component(fx.form("e(s,s)"), 2)


def test_make_jet_checks_membership():
    fx = load("m2")
    g = geo("m2")
    with pytest.raises(MembershipFailure):
        g.make_jet([g.scalar(fx.alg.one), fx.form("e(s)"), fx.form("e(s,t)")])


def test_jet2_isomorphism_needs_matching_braidings():
    a, b = geo("bicross_prop_i"), geo("bicross_prop_ii")
    with pytest.raises(BraidingMismatch):
        jet2_isomorphism(a, b)
