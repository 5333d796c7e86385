"""Bundle connections on free modules and their jet bimodules."""

from __future__ import annotations

import random

import pytest

from qjet.bundle import (Bundle, BundleJets, PreconditionViolated, bundle_jet_isomorphism, bundle_omega1,
                         bundle_trivial)
from qjet.jets import JetGeometry
from qjet.tensors import TensorForm

from conftest import load


@pytest.mark.parametrize("key", ["m2", "cqsl2_plus", "bicross_prop_i", "grassmann_2", "s3_plus"])
def test_trivial_bundle_battery(key):
    b = bundle_trivial(load(key).conn, m=2)
    for r in b.check():
        assert r.ok, (r.name, r.witness)


@pytest.mark.parametrize("key", ["m2", "grassmann_2", "cqsl2_plus"])
def test_omega1_bundle_coloured_binomials(key):
    b = bundle_omega1(load(key).conn)
    for n in range(1, 4):
        r = b.check_coloured_binomial(n)
        assert r.ok, r.witness


@pytest.mark.parametrize("key", ["m2", "cqsl2_plus", "bicross_prop_ii"])
def test_trivial_bundle_jets_are_function_jets(key):
    fx = load(key)
    b = bundle_trivial(fx.conn)
    bj = BundleJets(b)
    f = b.e((b.letter_of["f"],))
    rng = random.Random(7)
    for _ in range(3):
        a = fx.alg.sample(rng)
        s = f.lmul(a)
        for n in range(4):
            want = bj.lift(bj.jets.nabla_power(a, n)).tensor(f)
            assert bj.nabla_power(s, n) == want


@pytest.mark.parametrize("key", ["m2", "grassmann_2"])
def test_bundle_leibniz_and_splitting(key):
    fx = load(key)
    bj = BundleJets(bundle_omega1(fx.conn))
    rng = random.Random(11)
    samples = []
    for _ in range(3):
        a, s = fx.alg.sample(rng), bj.bundle.sample_section(rng)
        samples.append((a, s))
        for n in range(1, 4):
            for r in bj.leibniz_check(a, s, n):
                assert r.ok, (r.name, r.witness)
        assert bj.nabla_power(s, 2) == bj.nabla_power_split(s, 2)
    for r in bj.atiyah_split(samples):
        assert r.ok, (r.name, r.witness)


def test_perturbed_trivial_bundle_isomorphism():
    # m2 has no nonzero closed central 1-form, so the flat perturbation lives on grassmann
    fx = load("grassmann_2")
    c = fx.scalar("3")
    s_letter = fx.calc.frame.letter("dx1")
    bj = BundleJets(bundle_trivial(fx.conn))
    other = BundleJets(bundle_trivial(fx.conn, alpha={0: {s_letter: c}}), bj.jets)
    for r in other.bundle.check():
        assert r.ok, (r.name, r.witness)
    rng = random.Random(3)
    for k in (1, 2, 3):
        phi = bundle_jet_isomorphism(bj, other, k)
        for _ in range(2):
            a, s = fx.alg.sample(rng), bj.bundle.sample_section(rng)
            xi = bj.jet_prolong(s, k)
            assert phi(xi) == other.jet_prolong(other.lift(s), k)
            assert phi(bj.bullet(a, xi)) == other.bullet(a, phi(xi))
            assert phi(bj.bullet(a, xi, "right")) == other.bullet(a, phi(xi), "right")


def test_higher_isomorphism_needs_same_braiding():
    conn = load("grassmann_2").conn
    flip = bundle_trivial(conn)
    twisted = Bundle(conn, ["f"], {}, {}, {("f", x): {(x, -1): -conn.field.one} for x in conn.letters})
    a, b = BundleJets(flip), BundleJets(twisted)
    bundle_jet_isomorphism(a, b, 1)
    with pytest.raises(PreconditionViolated):
        bundle_jet_isomorphism(a, b, 2)
    assert not twisted.check(["consistency"])[0].ok


def test_first_order_isomorphism_needs_no_conditions():
    fx = load("m2")
    s_letter = fx.calc.frame.letter("s")
    bj = BundleJets(bundle_trivial(fx.conn))
    other = BundleJets(bundle_trivial(fx.conn, alpha={0: {s_letter: fx.scalar("3")}}), bj.jets)
    assert not other.bundle.check(["flat"])[0].ok
    phi = bundle_jet_isomorphism(bj, other, 1)
    rng = random.Random(5)
    for _ in range(3):
        a, s = fx.alg.sample(rng), bj.bundle.sample_section(rng)
        xi = bj.jet_prolong(s, 1)
        assert phi(bj.bullet(a, xi)) == other.bullet(a, phi(xi))
        assert phi(bj.bullet(a, xi, "right")) == other.bullet(a, phi(xi), "right")
