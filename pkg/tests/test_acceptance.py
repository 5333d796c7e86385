"""Acceptance suite: one summary line per criterion, all arithmetic exact."""

from __future__ import annotations

import contextlib
import random

import pytest
import sympy
from click.testing import CliRunner

from qjet import fixtures as F
from qjet.bundle import BundleJets, bundle_jet_isomorphism, bundle_omega1, bundle_trivial
from qjet.cli import main
from qjet.connection import ALL_CONDITIONS, Connection
from qjet.jets import JetGeometry, jet2_isomorphism
from qjet.linalg import rank
from qjet.scan import eliminate_to, evaluate, numerators, residuals, sample_points

from conftest import FIXTURES, load, record_acceptance

C1 = "1. condition batteries"
C2 = "2. negative controls"
C3 = "3. dimensions and eigenvalues"
C4 = "4. closed forms"
C5 = "5. property suites"
C6 = "6. determinism"

ALL = list(FIXTURES)
_GEO = {}


@contextlib.contextmanager
def part(criterion: str, label: str, note: str = ""):
    try:
        yield
    except Exception as exc:
        record_acceptance(criterion, False, "%s: %s" % (label, str(exc).splitlines()[0] if str(exc) else type(exc).__name__))
        raise
    record_acceptance(criterion, True, note)


def geo(key):
    g = _GEO.get(key)
    if g is None:
        g = _GEO[key] = JetGeometry(load(key).conn)
    return g


def scalar_vector(fx, text):
    """Coefficient vector of a form whose coefficients are scalar multiples of 1."""
    out = {}
    for w, a in fx.form(text).terms.items():
        c = F.scalar_multiple_of_one(fx.alg, a)
        assert c is not None
        out[w] = c
    return out


def same_span(a, b):
    r = rank(a)
    return r == rank(b) == rank(list(a) + list(b))


# 1 ---------------------------------------------------------------------------------------

@pytest.mark.parametrize("key", ALL)
def test_condition_battery(key):
    fx = load(key)
    with part(C1, key):
        if key == "bicross_prop_i":
            assert "deltap" in fx.params
        if key.startswith("cqsl2"):
            assert fx.params == ("nu",)
        results = fx.conn.check(ALL_CONDITIONS)
        assert [r.name for r in results] == list(ALL_CONDITIONS)
        bad = [(r.name, r.witness) for r in results if not r.ok]
        assert not bad, bad


# 2 ---------------------------------------------------------------------------------------

def test_bicross_ansatz_fails_ybe_off_family():
    fx = F.bicrossproduct("ansatz")
    res = residuals(fx.conn, "ybe")
    with part(C2, "bicross ansatz"):
        assert res
        pts = sample_points(fx.params, 20, seed=2024)
        assert len(pts) >= 20
        for pt in pts:
            assert evaluate(res, pt), "ybe holds at %s" % pt


def test_cqsl2_ansatz_q_constraint():
    fx = F.cqsl2_ansatz()
    with part(C2, "cqsl2 ansatz"):
        polys = []
        for target in ("torsion", "flat", "ybe"):
            polys.extend(numerators(residuals(fx.conn, target)))
        others = [p for p in fx.params if p != "q"]
        P = eliminate_to(polys, "q", others)
        assert P.degree() > 0
        q = sympy.Symbol("q")
        assert sympy.expand(P.as_expr() - P.LC() * (q ** 2 + 1)) == 0
        # roots of unity: evaluate inside the order-4 cyclotomic field
        for sign in ("+i", "-i"):
            fq = F.cqsl2(sign)
            z = fq.scalar("q")
            val = fq.field.zero
            for c in P.all_coeffs():
                val = val * z + fq.field.const(int(c))
            assert val.is_zero()
        for pt in sample_points(["q"], 20, seed=7):
            assert P.eval(sympy.Rational(pt["q"].numerator, pt["q"].denominator)) != 0


# 3 ---------------------------------------------------------------------------------------

@pytest.mark.parametrize("key,expected", [("m2", 3), ("s3_plus", 5), ("s3_minus", 5),
                                          ("cqsl2_plus", 6), ("cqsl2_minus", 6)])
def test_omega_s2_rank(key, expected):
    with part(C3, "rank Omega^2_S %s" % key):
        assert geo(key).omega_s(2).rank == expected


@pytest.mark.parametrize("key", ["cqsl2_plus", "cqsl2_minus"])
def test_cqsl2_image_of_id_plus_sigma(key):
    b = load(key).conn.braid
    with part(C3, "im(id+sigma) %s" % key):
        assert b.image_rank(b.integer(2), 2) == 4


@pytest.mark.parametrize("key", ["s3_plus", "s3_minus"])
def test_s3_kernel_and_eigenvalues(key):
    fx = load(key)
    b = fx.conn.braid
    with part(C3, "ker(id+sigma), eigenvalues %s" % key):
        ker = b.kernel_of(b.integer(2), 2)
        assert len(ker) == 4
        assert same_span(ker, [scalar_vector(fx, t) for t in fx.dataset["ker_id_plus_sigma"]])
        got = b.eigen_structure()
        want = [(fx.scalar(v), m) for v, m in fx.dataset["eigenvalues"]]
        assert len(got) == len(want)
        for v, m in want:
            assert [n for u, n in got if u == v] == [m], (v, got)


def test_prop_i_kernel():
    fx = load("bicross_prop_i")
    b = fx.conn.braid
    with part(C3, "ker(id+sigma) prop_i"):
        ker = b.kernel_of(b.integer(2), 2)
        assert len(ker) == 1
        assert same_span(ker, [scalar_vector(fx, "lam*e(dr,dr) - e(dr,v) + e(v,dr)")])


@pytest.mark.parametrize("key", ["bicross_prop_i", "bicross_prop_ii"])
def test_prop_eigenvalues(key):
    fx = load(key)
    with part(C3, "eigenvalues %s" % key):
        eig = fx.conn.braid.eigen_structure()
        assert {str(v) for v, _ in eig} == {str(fx.scalar("1")), str(fx.scalar("-1"))}
        assert sum(m for _, m in eig) == 4


# 4 ---------------------------------------------------------------------------------------

@pytest.mark.parametrize("unit", ["E11", "E12", "E21", "E22"])
def test_m2_jet_closed_form(unit):
    fx = load("m2")
    g = geo("m2")
    with part(C4, "m2 j^inf(%s)" % unit):
        a = fx.element(unit)
        E12, E21 = fx.element("E12"), fx.element("E21")
        ds, dt = E12 * a - a * E12, E21 * a - a * E21
        gform = fx.form(fx.dataset["g"])
        assert g.nabla_power(a, 0) == g.scalar(a)
        assert g.nabla_power(a, 1) == fx.form("e(s)").lmul(ds) + fx.form("e(t)").lmul(dt)
        assert g.nabla_power(a, 2) == gform.lmul(-(E21 * ds + ds * E21))
        assert g.nabla_power(a, 3).is_zero()


@pytest.mark.parametrize("key", ["cqsl2_plus", "cqsl2_minus"])
def test_cqsl2_jet_closed_forms(key):
    fx = load(key)
    g = geo(key)
    with part(C4, "cqsl2 j^n %s" % key, "cqsl2 j^n(b), j^n(d) use mu on the pair term"):
        for gen in ("a", "b", "c", "d"):
            coeff = "mu" if gen in ("b", "d") else "nu"
            for n in range(5):
                want = fx.form(F.cq_nabla_power_text(gen, n, coeff))
                assert g.nabla_power(fx.element(gen), n) == want, (gen, n)


def test_bicross_nabla_d_formula():
    fx = load("bicross_prop_i")
    coords = F.BicrossCoordinates(fx)
    rng = random.Random(61)
    mons = set()
    while len(mons) < 10:
        mons.add((rng.randint(-2, 3), rng.randint(0, 3)))
    with part(C4, "bicross nabla d"):
        deltap = fx.scalar("deltap")
        for k, j in sorted(mons):
            a = coords.monomial(k, j)
            assert fx.conn.nabla(fx.conn.d(a)) == coords.nabla_d_formula(a, deltap), (k, j)


def test_m2_odot_table():
    fx = load("m2")
    g = geo("m2")
    with part(C4, "m2 odot table"):
        table = fx.dataset["odot"]
        assert len(table) == 25
        for left, right, prod in table:
            x, y = fx.form(left), fx.form(right)
            i, j = max(len(w) for w in x.terms), max(len(w) for w in y.terms)
            assert g.odot_graded(x, i, y, j) == fx.form(prod), (left, right)


# 5 ---------------------------------------------------------------------------------------

@pytest.mark.parametrize("key", ALL)
def test_braided_binomials(key):
    b = load(key).conn.braid
    with part(C5, "binomials %s" % key):
        for n in range(1, 6):
            r = b.check_binomial_expansions(n)
            assert r.ok, r.witness
            for k in range(n + 1):
                for m in range(k + 1):
                    r = b.check_composition(n, k, m)
                    assert r.ok, (r.name, r.witness)


@pytest.mark.parametrize("key", ALL)
def test_leibniz_rules(key):
    fx = load(key)
    g = geo(key)
    rng = random.Random(sum(map(ord, key)))
    with part(C5, "leibniz %s" % key):
        for _ in range(25):
            a, b = fx.alg.sample(rng), fx.alg.sample(rng)
            for n in range(1, 4):
                for r in g.leibniz_check(a, b, n):
                    assert r.ok, (r.name, r.witness)


@pytest.mark.parametrize("key", ALL)
def test_bullets_and_prolongation(key):
    fx = load(key)
    g = geo(key)
    alg = fx.alg
    rng = random.Random(sum(map(ord, key)) + 1)
    with part(C5, "bullets %s" % key):
        for _ in range(25):
            a, b, c = alg.sample(rng), alg.sample(rng), alg.sample(rng)
            for k in range(1, 4):
                xi = g.jet_prolong(c, k)
                assert g.bullet(a * b, xi) == g.bullet(a, g.bullet(b, xi))
                assert g.bullet(a * b, xi, "right") == g.bullet(b, g.bullet(a, xi, "right"), "right")
                assert g.bullet(a, g.bullet(b, xi, "right")) == g.bullet(b, g.bullet(a, xi), "right")
                assert g.jet_prolong(a * c, k) == g.bullet(a, xi)
                assert g.jet_prolong(c * a, k) == g.bullet(a, xi, "right")
                assert g.project(xi) == g.jet_prolong(c, k - 1)


def rebase(fx, conn):
    """The same connection written over the calculus of ``fx`` (parameters bound in the text)."""
    gamma = {x: fx.form(str(t)) for x, t in conn.gamma.items()}
    table = {w: {u: fx.scalar(str(c)) for u, c in row.items()} for w, row in conn.table.items()}
    return Connection(fx.calc, gamma, table, False, "nabla~")


def _perturbed(key):
    """A second connection with the same braiding, or None when the fixture has none."""
    fx = load(key)
    conn = fx.conn
    if key == "m2":
        extra = {fx.calc.frame.letter("s"): fx.form("3*e(s,s)"), fx.calc.frame.letter("t"): fx.form("3*e(t,t)")}
    elif key.startswith("grassmann"):
        extra = {fx.calc.frame.letter("dx1"): fx.form("3*e(dx1,dx1)")}
    elif key.startswith("cqsl2"):
        return rebase(fx, F.cqsl2("+i" if key.endswith("plus") else "-i", nu="3").conn)
    else:
        return None
    gamma = dict(conn.gamma)
    for x, t in extra.items():
        gamma[x] = gamma.get(x, conn.zero()) + t
    return conn.with_gamma(gamma)


def _check_jet2_iso(g, other, rng, n=5, full=True):
    phi = jet2_isomorphism(g, other, allow_mixed=not full)
    alg = g.alg
    for _ in range(n):
        a, c = alg.sample(rng), alg.sample(rng)
        xi = g.jet_prolong(c, 2)
        assert phi(xi) == other.jet_prolong(c, 2)
        assert phi(g.bullet(a, xi)) == other.bullet(a, phi(xi))
        if full:
            assert phi(g.bullet(a, xi, "right")) == other.bullet(a, phi(xi), "right")


@pytest.mark.parametrize("key", ALL)
def test_jet2_isomorphism(key):
    g = geo(key)
    rng = random.Random(5)
    with part(C5, "J^2 isomorphism %s" % key):
        _check_jet2_iso(g, g, rng)
        conn = _perturbed(key)
        if conn is not None:
            assert conn.check(["torsionfree"])[0].ok
            _check_jet2_iso(g, JetGeometry(conn), rng)


def test_jet2_isomorphism_mixed_braidings():
    fx = F.bicrossproduct("prop_i", {"deltap": "1"})
    a = JetGeometry(fx.conn)
    b = JetGeometry(rebase(fx, F.bicrossproduct("prop_i", {"deltap": "3"}).conn))
    with part(C5, "J^2 mixed braidings", "mixed braidings: left-module property only"):
        assert a.conn.table != b.conn.table
        _check_jet2_iso(a, b, random.Random(9), full=False)


def _check_bundle_iso(bj, other, k, rng, n=3):
    phi = bundle_jet_isomorphism(bj, other, k)
    for _ in range(n):
        a, s = bj.jets.alg.sample(rng), bj.bundle.sample_section(rng)
        xi = bj.jet_prolong(s, k)
        assert phi(xi) == other.jet_prolong(other.lift(s), k)
        assert phi(bj.bullet(a, xi)) == other.bullet(a, phi(xi))
        assert phi(bj.bullet(a, xi, "right")) == other.bullet(a, phi(xi), "right")


@pytest.mark.parametrize("key", ["m2", "cqsl2_plus", "grassmann_2", "bicross_prop_ii", "s3_plus"])
def test_bundle_jet_isomorphisms(key):
    fx = load(key)
    rng = random.Random(13)
    with part(C5, "J_E isomorphisms %s" % key):
        bj = BundleJets(bundle_trivial(fx.conn), geo(key))
        for k in (1, 2, 3):
            _check_bundle_iso(bj, bj, k, rng, n=2)
        if key == "grassmann_2":
            alpha = {0: {fx.calc.frame.letter("dx1"): fx.scalar("3")}}
            ks = (1, 2, 3)
        elif key == "m2":
            alpha = {0: {fx.calc.frame.letter("s"): fx.scalar("3")}}
            ks = (1,)
        else:
            return
        other = BundleJets(bundle_trivial(fx.conn, alpha=alpha), bj.jets)
        for k in ks:
            _check_bundle_iso(bj, other, k, rng)


@pytest.mark.parametrize("key", ALL)
def test_trivial_bundle_jets_equal_function_jets(key):
    fx = load(key)
    b = bundle_trivial(fx.conn)
    bj = BundleJets(b, geo(key))
    f = b.e((b.letter_of["f"],))
    rng = random.Random(21)
    with part(C5, "E=A jets %s" % key):
        for _ in range(3):
            a, c = fx.alg.sample(rng), fx.alg.sample(rng)
            for k in range(4):
                want = [bj.lift(t).tensor(f) for t in geo(key).jet_prolong(a, k).components]
                got = bj.jet_prolong(f.lmul(a), k)
                assert got.components == want
                # bullets transported along xi -> xi (x) f
                lhs = bj.bullet(c, got).components
                assert lhs == [bj.lift(t).tensor(f) for t in geo(key).bullet(c, geo(key).jet_prolong(a, k)).components]


@pytest.mark.parametrize("key", ["m2", "grassmann_2", "grassmann_3"])
def test_omega1_bundle_battery(key):
    fx = load(key)
    b = bundle_omega1(fx.conn)
    with part(C5, "E=Omega^1 battery %s" % key):
        bad = [(r.name, r.witness) for r in b.check() if not r.ok]
        assert not bad, bad
        for n in range(1, 4):
            assert b.check_coloured_binomial(n).ok


@pytest.mark.parametrize("key", ["m2", "cqsl2_plus", "cqsl2_minus"])
def test_reduced_jets(key):
    fx = load(key)
    g = geo(key)
    rng = random.Random(31)
    with part(C5, "reduced jets %s" % key):
        for _ in range(5):
            a = fx.alg.sample(rng)
            comps = g.reduced_jet(a, 3)
            for i in range(2, 4):
                assert comps[i].apply(g.braid.factorial(i)) == g.nabla_power(a, i)


@pytest.mark.parametrize("unit", ["E11", "E12", "E21", "E22"])
def test_m2_reduced_second_component(unit):
    fx = load("m2")
    g = geo("m2")
    with part(C5, "m2 d^2(%s)" % unit):
        a = fx.element(unit)
        E12, E21 = fx.element("E12"), fx.element("E21")
        ds = E12 * a - a * E12
        want = fx.form("e(s,t)").lmul(-(E21 * ds + ds * E21))
        fact = g.braid.factorial(2)
        assert want.apply(fact) == g.nabla_power(a, 2)
        got = g.reduced_component(g.nabla_power(a, 2), 2)
        assert (got - want).apply(fact).is_zero()


# 6 ---------------------------------------------------------------------------------------

@pytest.mark.parametrize("args", [("verify", "m2", "--leibniz", "2"), ("verify", "cqsl2", "--bundle", "omega1"),
                                  ("verify", "bicrossproduct", "--family", "ansatz")])
def test_reports_are_deterministic(args):
    with part(C6, " ".join(args)):
        runs = [CliRunner().invoke(main, list(args) + ["--seed", "11", "--json", "-"]) for _ in range(2)]
        assert runs[0].exit_code in (0, 1)
        assert runs[0].output.encode() == runs[1].output.encode()
