"""Jets of free bimodules E with a flat bimodule connection.

E letters are negative integers in an extended frame; an E-valued form
``omega (x) f`` is a word with the E letter last.  The condition battery is
the generic one from :mod:`qjet.connection` run with E letters first.
"""

from __future__ import annotations

import random
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .algebra import AlgebraElement, Endomorphism
from .braid import CheckResult
from .connection import Connection, WordGeometry
from .jets import JetElement, JetError, JetGeometry, SymmetryViolation, wedge_residual
from .scalars import Scalar
from .tensors import Frame, ScalarMap, TensorForm, Word, parse_tensor

BUNDLE_CONDITIONS = ("bimodule_map", "consistency", "flat", "leibnizcompat", "extendable", "coloured_braid",
                     "curvbimod")


class BundleError(ValueError):
    pass


class PreconditionViolated(BundleError):
    pass


class Bundle(WordGeometry):
    """A free left module E = span{f^1..f^m} with Gamma_E and sigma_E over a base connection."""

    def __init__(self, base: Connection, names: Sequence[str], autos: Mapping[str, Endomorphism],
                 gamma: Mapping[str, Callable[[Frame], TensorForm]],
                 sigma: Mapping[Tuple[str, str], Mapping[Word, Scalar]], name: str = "E"):
        self.base = base
        self.name = name
        self.e_names = list(names)
        self.e_letters = [-(k + 1) for k in range(len(names))]
        letter_of = dict(zip(self.e_names, self.e_letters))
        frame = base.frame.extend({letter_of[b]: autos.get(b) or Endomorphism.identity_map(base.alg)
                                   for b in self.e_names},
                                  {letter_of[b]: b for b in self.e_names})
        merged_gamma: Dict[int, TensorForm] = {x: TensorForm(frame, t.terms) for x, t in base.gamma.items()}
        for b in self.e_names:
            g = gamma.get(b)
            merged_gamma[letter_of[b]] = g(frame) if g is not None else TensorForm.zero(frame)
        table = dict(base.table)
        for (b, x), row in sigma.items():
            table[(letter_of[b], x)] = dict(row)
        super().__init__(base.calc, frame, merged_gamma, table)
        self.letter_of = letter_of

    # elements --------------------------------------------------------------------------
    def section(self, coeffs: Mapping[str, AlgebraElement]) -> TensorForm:
        out = self.zero()
        for b, a in coeffs.items():
            out = out + self.e((self.letter_of[b],), a)
        return out

    def sample_section(self, rng: random.Random, max_degree: int = 2) -> TensorForm:
        return self.section({b: self.alg.sample(rng, max_degree) for b in self.e_names})

    # Fig. 2 battery ---------------------------------------------------------------------
    def check(self, kinds: Sequence[str] = BUNDLE_CONDITIONS) -> List[CheckResult]:
        L = self.e_letters
        out = []
        for kind in kinds:
            if kind == "bimodule_map":
                out.append(self.check_bimodule_map(L))
            elif kind == "consistency":
                out.append(self.check_connection_consistency(L))
            elif kind == "flat":
                out.append(self.check_flat(L))
            elif kind == "leibnizcompat":
                out.append(self.check_leibniz(L))
            elif kind == "extendable":
                out.append(self.check_extendable(L))
            elif kind == "coloured_braid":
                r = self.check_ybe(L)
                out.append(CheckResult("coloured_braid", r.ok, r.witness))
            elif kind == "curvbimod":
                out.append(self.check_curvbimod(L))
            else:
                raise BundleError("unknown bundle condition %r" % kind)
        return out

    def inner_flat_criterion(self) -> CheckResult:
        """sigma_{E,Omega^2}(f (x) theta^2) = theta^2 (x) f on the E basis."""
        th = self.on(self.calc.require_theta())
        th2 = self.wedge(th.tensor(th))
        for x in self.e_letters:
            f = self.e((x,))
            r = self.sigma_omega2(f.tensor(th2)) - self.wedge(th2.tensor(f))
            if not r.is_zero():
                return CheckResult("inner_flat_criterion", False, "on %s: %s" % (self.frame.names[x], r))
        return CheckResult("inner_flat_criterion", True)

    # braid identities ---------------------------------------------------------------------
    def sigma_e_power(self, t: TensorForm, start: int, n: int) -> TensorForm:
        """Move the E letter at 0-based ``start`` right across n form letters."""
        for i in range(n):
            t = t.apply(self.braid.sigma, start + i)
        return t

    def check_coloured_binomial(self, n: int) -> CheckResult:
        """([n|k] (x) id_E) sigma^n_E = sigma^n_E (id_E (x) [n|k]) for all k."""
        for x in self.e_letters:
            for w in self.braid.words(n):
                t = self.e((x,) + w)
                for k in range(n + 1):
                    b = self.braid.binomial(n, k)
                    lhs = self.sigma_e_power(t, 0, n).apply(b, 0)
                    rhs = self.sigma_e_power(t.apply(b, 1), 0, n)
                    if lhs != rhs:
                        return CheckResult("coloured_binomial_%d" % n, False, "on e(%s), k=%d: residual %s" % (
                            self.frame.word_name((x,) + w), k, lhs - rhs))
        return CheckResult("coloured_binomial_%d" % n, True)


def bundle_trivial(base: Connection, m: int = 1, alpha: Optional[Mapping[int, Mapping[int, Scalar]]] = None) -> Bundle:
    """E = A^m with componentwise d and flip braiding; ``alpha[j][x]`` adds c e^x (x) f^j to Gamma_E."""
    names = ["f%d" % (k + 1) for k in range(m)] if m > 1 else ["f"]
    letters = [-(k + 1) for k in range(m)]
    gamma: Dict[str, Callable[[Frame], TensorForm]] = {}
    if alpha:
        for j, row in alpha.items():
            def g(frame, row=row, j=j):
                out = TensorForm.zero(frame)
                for x, c in row.items():
                    out = out + TensorForm.basis(frame, (x, letters[j])).scale(c)
                return out
            gamma[names[j]] = g
    sigma = {}
    for b, f in zip(names, letters):
        for x in base.calc.letters:
            sigma[(b, x)] = {(x, f): base.field.one}
    return Bundle(base, names, {}, gamma, sigma, "A^%d" % m if m > 1 else "A")


def bundle_omega1(base: Connection, other: Optional[Connection] = None) -> Bundle:
    """E = Omega^1 with nabla_E = nabla (or another connection with the same calculus)."""
    conn = other or base
    calc = base.calc
    names = ["f_" + b for b in calc.basis]
    relabel = {k: -(k + 1) for k in calc.letters}

    def shift(w: Word) -> Word:
        return w[:-1] + (relabel[w[-1]],)

    gamma = {}
    for k, b in zip(calc.letters, names):
        def g(frame, k=k):
            t = conn.gamma.get(k)
            if t is None:
                return TensorForm.zero(frame)
            return TensorForm(frame, {shift(w): a for w, a in t.terms.items()})
        gamma[b] = g
    sigma = {}
    for (x, y), row in conn.table.items():
        sigma[(names[x], y)] = {shift(w): c for w, c in row.items()}
    autos = {names[k]: calc.frame.autos[k] for k in calc.letters}
    return Bundle(base, names, autos, gamma, sigma, "Omega^1")


def bundle_inner(base: Connection, names: Sequence[str], autos: Mapping[str, Endomorphism],
                 sigma: Mapping[Tuple[str, str], Mapping[Word, Scalar]]) -> Bundle:
    """nabla_E = theta (x) ( ) - sigma_E(( ) (x) theta) for an inner calculus."""
    probe = Bundle(base, names, autos, {}, sigma)
    th = probe.on(base.calc.require_theta())
    gamma = {}
    for b in names:
        f = probe.e((probe.letter_of[b],))
        t = th.tensor(f) - probe.sig(f.tensor(th), 1)
        gamma[b] = lambda frame, t=t: TensorForm(frame, t.terms)
    return Bundle(base, names, autos, gamma, sigma, "inner")


def bundle_from_spec(base: Connection, spec: Mapping[str, object], names_env: Mapping[str, object]) -> Bundle:
    """Build a bundle from the fixture ``bundle`` section."""
    from .fixtures import _parse_alg, _scalar_table, scalar_multiple_of_one
    basis = list(spec["basis"])
    autos = {}
    consts = {k: v for k, v in names_env.items() if isinstance(v, Scalar)}
    for b, images in dict(spec.get("automorphisms", {})).items():
        autos[b] = Endomorphism(base.alg, {g: _parse_alg(base.alg, consts, t) for g, t in dict(images).items()},
                                "psi_" + b)
    probe = Bundle(base, basis, autos, {}, {})
    env = dict(names_env)
    if "theta" in env:
        env["theta"] = probe.on(env["theta"])
    sigma = {}
    for key, text in dict(spec.get("sigma", {})).items():
        b, x = [p.strip() for p in key.split(",")]
        t = parse_tensor(str(text), probe.frame, env)
        row = {}
        for w, a in t.terms.items():
            c = scalar_multiple_of_one(base.alg, a)
            if c is None:
                raise BundleError("sigma_E entry %s has non-scalar coefficients" % key)
            row[w] = c
        sigma[(b, base.frame.letter(x))] = row
    gamma = {}
    for b, text in dict(spec.get("gamma", {})).items():
        t = parse_tensor(str(text), probe.frame, env)
        gamma[b] = lambda frame, t=t: TensorForm(frame, t.terms)
    return Bundle(base, basis, autos, gamma, sigma, str(spec.get("name", "E")))


class BundleJets:
    """J^k_E = E + Omega^1 (x) E + ... + Omega^k_S (x) E with the odot_E actions."""

    def __init__(self, bundle: Bundle, jets: Optional[JetGeometry] = None):
        self.bundle = bundle
        self.jets = jets or JetGeometry(bundle.base)
        self.frame = bundle.frame
        self.braid = bundle.braid
        self._npow: Dict[Tuple[TensorForm, int], TensorForm] = {}

    def lift(self, t: TensorForm) -> TensorForm:
        return TensorForm(self.frame, t.terms)

    def require_symmetric(self, t: TensorForm, n: int) -> None:
        bad = wedge_residual(self.bundle, t, n)
        if bad is not None:
            raise SymmetryViolation("degree-%d E-valued tensor leaves Omega_S at slot %d: %s" % (n, bad[0], bad[1]))

    def nabla_power(self, s: TensorForm, n: int, check: bool = True) -> TensorForm:
        key = (s, n)
        r = self._npow.get(key)
        if r is None:
            r = s if n == 0 else self.bundle.nabla(self.nabla_power(s, n - 1, check))
            if check and n > 1:
                self.require_symmetric(r, n)
            self._npow[key] = r
        return r

    def nabla_power_split(self, s: TensorForm, n: int) -> TensorForm:
        """nabla^n_E via the head recursion, as an independent evaluation."""
        t = s
        for _ in range(n):
            t = self.bundle.nabla_head(t)
        return t

    def jet_prolong(self, s: TensorForm, k: int) -> JetElement:
        return JetElement(self.jets, k, [self.nabla_power(s, j) for j in range(k + 1)])

    def odot_left(self, eta: TensorForm, i: int, xi: TensorForm, j: int) -> TensorForm:
        """eta (.)_E (omega (x) s) = [i+j|j] on the form slots of eta (x) omega (x) s."""
        out = self.lift(eta).tensor(xi)
        if i and j:
            out = out.apply(self.braid.binomial(i + j, j), 0)
        return out

    def odot_right(self, xi: TensorForm, j: int, eta: TensorForm, i: int) -> TensorForm:
        """(omega (x) s) (.)_E eta = omega (.) sigma_{E,Omega_S}(s (x) eta)."""
        out = xi.tensor(self.lift(eta))
        out = self.bundle.sigma_e_power(out, j, i)
        if i and j:
            out = out.apply(self.braid.binomial(i + j, i), 0)
        return out

    def bullet(self, a: AlgebraElement, xi: JetElement, side: str = "left") -> JetElement:
        k = xi.order
        comps = [self.bundle.zero() for _ in range(k + 1)]
        for j, w in enumerate(xi.components):
            if w.is_zero():
                continue
            for i in range(k - j + 1):
                na = self.jets.nabla_power(a, i)
                if side == "left":
                    comps[i + j] = comps[i + j] + self.odot_left(na, i, w, j)
                elif side == "right":
                    comps[i + j] = comps[i + j] + self.odot_right(w, j, na, i)
                else:
                    raise JetError("side must be left or right")
        return JetElement(self.jets, k, comps)

    def project(self, xi: JetElement) -> JetElement:
        if xi.order < 1:
            raise JetError("projection needs order >= 1")
        return JetElement(self.jets, xi.order - 1, xi.components[:-1])

    def leibniz_check(self, a: AlgebraElement, s: TensorForm, n: int) -> List[CheckResult]:
        """nabla^n_E(a s) = sum_k nabla^{n-k} a (.)_E nabla^k_E s, and the right-handed version."""
        out = []
        lhs = self.nabla_power(s.lmul(a), n)
        rhs = self.bundle.zero()
        for k in range(n + 1):
            rhs = rhs + self.odot_left(self.jets.nabla_power(a, n - k), n - k, self.nabla_power(s, k), k)
        diff = lhs - rhs
        out.append(CheckResult("e_leibniz_left_%d" % n, diff.is_zero(), None if diff.is_zero() else str(diff)))
        lhs = self.nabla_power(s.rmul(a), n)
        rhs = self.bundle.zero()
        for k in range(n + 1):
            rhs = rhs + self.odot_right(self.nabla_power(s, n - k), n - k, self.jets.nabla_power(a, k), k)
        diff = lhs - rhs
        out.append(CheckResult("e_leibniz_right_%d" % n, diff.is_zero(), None if diff.is_zero() else str(diff)))
        return out

    def atiyah_split(self, samples: Sequence[Tuple[AlgebraElement, TensorForm]]) -> List[CheckResult]:
        """j^1_E(s) = s + nabla_E s is a bimodule splitting of J^1_E -> E."""
        results = []
        for name, ok_fn in (
                ("splitting_left", lambda a, s: self.jet_prolong(s.lmul(a), 1) == self.bullet(a, self.jet_prolong(s, 1), "left")),
                ("splitting_right", lambda a, s: self.jet_prolong(s.rmul(a), 1) == self.bullet(a, self.jet_prolong(s, 1), "right")),
                ("projection", lambda a, s: self.project(self.jet_prolong(s, 1)).components[0] == s)):
            bad = None
            for a, s in samples:
                if not ok_fn(a, s):
                    bad = "a=%s, s=%s" % (a, s)
                    break
            results.append(CheckResult(name, bad is None, bad))
        return results


def bundle_jet_isomorphism(bj: BundleJets, other: BundleJets, k: int):
    """phi(xi) = xi + (j~^k_E - j^k_E)(xi_0); for k >= 2 both sides must share sigma_E and the base."""
    b, bt = bj.bundle, other.bundle
    if k >= 2:
        if b.table != bt.table or b.base.table != bt.base.table or b.base.gamma != bt.base.gamma:
            raise PreconditionViolated("higher bundle jet isomorphism needs the same sigma_E and base connection")

    def phi(xi: JetElement) -> JetElement:
        s = xi.components[0]
        comps = list(xi.components)
        for j in range(1, xi.order + 1):
            comps[j] = comps[j] + other.lift(other.nabla_power(other.lift(s), j)) - bj.nabla_power(s, j)
        return JetElement(other.jets, xi.order, comps)
    return phi


def curvature_tensor_law(conn: WordGeometry, n: int) -> CheckResult:
    """R on words of length n: direct curvature equals the recursive tensor formula."""
    for w in conn.braid.words(n):
        a, b = conn.curvature_word(w), conn.curvature_recursive(w)
        if a != b:
            return CheckResult("tensor_curvature_%d" % n, False, "on e(%s): residual %s" % (
                conn.frame.word_name(w), a - b))
    return CheckResult("tensor_curvature_%d" % n, True)
