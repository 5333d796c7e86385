"""Bimodule connections on free bimodules and the condition battery.

A :class:`WordGeometry` bundles a frame of letters, a connection form Gamma
per letter and a Scalar braiding on letter pairs.  Letters may be 1-forms or
bundle basis elements; everything is evaluated on basis words and extended as
left-module maps, so one implementation serves Omega^1, its tensor powers and
E-valued tensors.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .algebra import AlgebraElement
from .braid import BraidOperator, CheckResult, format_row
from .calculus import Calculus, NotInner
from .linalg import solve
from .scalars import Scalar
from .tensors import Frame, ScalarMap, TensorForm, Word

ALL_CONDITIONS = ("torsionfree", "flat", "ybe", "wedgecompat", "extendable", "leibnizcompat", "curvbimod")


class ConnectionError_(ValueError):
    pass


class BraidingMismatch(ConnectionError_):
    pass


class WordGeometry:
    """Connections and braidings evaluated letter by letter."""

    def __init__(self, calc: Calculus, frame: Frame, gamma: Mapping[int, TensorForm],
                 table: Mapping[Word, Mapping[Word, Scalar]]):
        self.calc = calc
        self.alg = calc.alg
        self.field = calc.field
        self.frame = frame
        self.gamma = {x: self.on(t) for x, t in gamma.items()}
        self.table = {tuple(k): {tuple(u): c for u, c in v.items() if not c.is_zero()} for k, v in table.items()}
        self.braid = BraidOperator.from_table(self.field, calc.letters, self.table, frame.names)
        self._nabla_cache: Dict[Word, TensorForm] = {}

    def on(self, t: TensorForm) -> TensorForm:
        if t.frame is self.frame:
            return t
        return TensorForm(self.frame, t.terms)

    def e(self, word: Sequence[int], coeff: Optional[AlgebraElement] = None) -> TensorForm:
        return TensorForm.basis(self.frame, tuple(word), coeff)

    def zero(self) -> TensorForm:
        return TensorForm.zero(self.frame)

    def d(self, a: AlgebraElement) -> TensorForm:
        return self.on(self.calc.d(a))

    def wedge(self, t: TensorForm, slot: int = 1) -> TensorForm:
        return t.apply(self.calc.wedge_map, slot - 1)

    def sig(self, t: TensorForm, i: int = 1) -> TensorForm:
        return t.apply(self.braid.sigma, i - 1)

    # connections on words -----------------------------------------------------------
    def nabla_word(self, w: Word) -> TensorForm:
        """Tensor product connection on e^w: sum_k sigma_1..sigma_k (e^{w<k} (x) Gamma(w_k) (x) e^{w>k})."""
        r = self._nabla_cache.get(w)
        if r is None:
            r = self.zero()
            for k in range(len(w)):
                g = self.gamma.get(w[k])
                if g is None or g.is_zero():
                    continue
                t = self.e(w[:k]).tensor(g).tensor(self.e(w[k + 1:]))
                if k:
                    t = t.apply(self.braid.chain(1, k))
                r = r + t
            self._nabla_cache[w] = r
        return r

    def nabla(self, t: TensorForm) -> TensorForm:
        total = self.zero()
        for w, a in t.terms.items():
            total = total + self.d(a).tensor(self.e(w)) + self.nabla_word(w).lmul(a)
        return total

    def nabla_head(self, t: TensorForm) -> TensorForm:
        """Head recursion nabla (x) id + sigma_1 (id (x) nabla_{n-1}), computed independently."""
        total = self.zero()
        for w, a in t.terms.items():
            if not w:
                total = total + self.d(a)
                continue
            head = self.e(w[:1])
            rest = self.e(w[1:])
            term = self.nabla(head).tensor(rest)
            if len(w) > 1:
                term = term + self.sig(head.tensor(self.nabla_head(rest)), 1)
            total = total + term.lmul(a) + self.d(a).tensor(self.e(w))
        return total

    def nabla_split(self, t: TensorForm, l: int) -> TensorForm:
        """nabla_l (x) id + sigma_1..sigma_l (id^l (x) nabla_{n-l})."""
        total = self.zero()
        for w, a in t.terms.items():
            left, right = self.e(w[:l]), self.e(w[l:])
            term = self.nabla(left).tensor(right)
            term = term + left.tensor(self.nabla(right)).apply(self.braid.chain(1, l))
            total = total + term.lmul(a) + self.d(a).tensor(self.e(w))
        return total

    # curvature --------------------------------------------------------------------
    def curvature_operator(self, T: TensorForm) -> TensorForm:
        """(d (x) id - id ^ nabla) applied to T, projected on slots 1,2."""
        total = self.zero()
        db = self.calc.dbasis
        for w, a in T.terms.items():
            k, u = w[0], w[1:]
            eu = self.e(u)
            part = self.d(a).tensor(self.e(w)) + self.on(db[k]).tensor(eu).lmul(a)
            part = part - self.e((k,)).tensor(self.nabla_word(u)).lmul(a)
            total = total + part
        return self.wedge(total, 1)

    def curvature_word(self, w: Word) -> TensorForm:
        return self.curvature_operator(self.nabla_word(w))

    def sigma_omega2(self, t: TensorForm, offset: int = 0) -> TensorForm:
        """sigma_{X,Omega^2} = wedge_1 sigma_2 sigma_1 on slots offset+1..offset+3, wedge on the first two."""
        t = t.apply(self.braid.sigma, offset)
        t = t.apply(self.braid.sigma, offset + 1)
        return self.wedge(t, offset + 1)

    def curvature_recursive(self, w: Word) -> TensorForm:
        """R(e^{w1}) (x) e^{w'} + (sigma_{Omega^1,Omega^2} (x) id)(e^{w1} (x) R(e^{w'}))."""
        if len(w) == 1:
            return self.curvature_word(w)
        head = self.e(w[:1])
        out = self.curvature_word(w[:1]).tensor(self.e(w[1:]))
        inner = head.tensor(self.curvature_recursive(w[1:]))
        return out + self.sigma_omega2(inner)

    # bimodule consistency -------------------------------------------------------------
    def check_bimodule_map(self, letters: Sequence[int]) -> CheckResult:
        gens = self.alg.generators()
        for (x, y), row in sorted(self.table.items()):
            if x not in letters:
                continue
            for (u, v) in row:
                for g in gens:
                    a = self.alg.gen(g)
                    if self.frame.move((x, y), a) != self.frame.move((u, v), a):
                        return CheckResult("braiding_bimodule", False, "sigma(e(%s)) -> e(%s) mixes automorphisms on %s" % (
                            self.frame.word_name((x, y)), self.frame.word_name((u, v)), g))
        return CheckResult("braiding_bimodule", True)

    def check_connection_consistency(self, letters: Sequence[int]) -> CheckResult:
        """nabla(e^x a) via right Leibniz equals nabla(phi_x(a) e^x) via left Leibniz."""
        for x in letters:
            ex = self.e((x,))
            g = self.gamma.get(x, self.zero())
            for name in self.alg.generators():
                a = self.alg.gen(name)
                lhs = g.rmul(a) + self.sig(ex.tensor(self.d(a)))
                pa = self.frame.autos[x](a)
                rhs = self.d(pa).tensor(ex) + g.lmul(pa)
                if lhs != rhs:
                    return CheckResult("connection_consistency", False, "on e(%s) * %s: residual %s" % (
                        self.frame.names[x], name, lhs - rhs))
        return CheckResult("connection_consistency", True)

    # condition battery (generic in the first letter) -----------------------------------
    def _first_fail(self, name: str, items, fn) -> CheckResult:
        for label, value in items:
            r = fn(value)
            if not r.is_zero():
                return CheckResult(name, False, "%s: residual %s" % (label, r))
        return CheckResult(name, True)

    def check_flat(self, letters: Sequence[int]) -> CheckResult:
        return self._first_fail("flat", [("R(e(%s))" % self.frame.names[x], (x,)) for x in letters],
                                self.curvature_word)

    def check_extendable(self, letters: Sequence[int]) -> CheckResult:
        items = []
        for x in letters:
            for r in self.calc.relations:
                items.append(("e(%s) (x) relation %s" % (self.frame.names[x], format_row(r, self.frame.names)),
                              self.e((x,)).tensor(self.on(self.calc.relation_form(r)))))
        return self._first_fail("extendable", items, lambda t: self.sigma_omega2(t))

    def check_leibniz(self, letters: Sequence[int]) -> CheckResult:
        def resid(w):
            t = self.e(w)
            return self.nabla(self.sig(t, 1)) - self.sig(self.nabla(t), 2)
        items = [("e(%s)" % self.frame.word_name((x, y)), (x, y)) for x in letters for y in self.calc.letters]
        return self._first_fail("leibnizcompat", items, resid)

    def curvbimod_residual(self, w: Word) -> TensorForm:
        x, y = w
        lhs = self.curvature_operator(self.sig(self.e(w), 1))
        first = self.wedge(self.sig(self.gamma.get(x, self.zero()).tensor(self.e((y,))), 2))
        second = self.sigma_omega2(self.e((x,)).tensor(self.on(self.calc.dbasis[y])))
        return lhs - first - second

    def check_curvbimod(self, letters: Sequence[int]) -> CheckResult:
        items = [("e(%s)" % self.frame.word_name((x, y)), (x, y)) for x in letters for y in self.calc.letters]
        return self._first_fail("curvbimod", items, self.curvbimod_residual)

    def check_ybe(self, letters: Sequence[int]) -> CheckResult:
        return self.braid.check_ybe(letters)


class Connection(WordGeometry):
    """Bimodule connection on Omega^1."""

    def __init__(self, calc: Calculus, gamma: Mapping[int, TensorForm],
                 table: Mapping[Word, Mapping[Word, Scalar]], inner: bool = False, name: str = "nabla"):
        super().__init__(calc, calc.frame, gamma, table)
        self.inner = inner
        self.name = name

    @property
    def letters(self) -> List[int]:
        return self.calc.letters

    def torsion(self) -> Dict[int, TensorForm]:
        return {k: self.wedge(self.gamma.get(k, self.zero())) - self.calc.dbasis[k] for k in self.letters}

    def check_torsionfree(self) -> CheckResult:
        for k, t in self.torsion().items():
            if not t.is_zero():
                return CheckResult("torsionfree", False, "T(e(%s)) = %s" % (self.frame.names[k], t))
        for w in self.braid.words(2):
            t = self.e(w)
            r = self.wedge(t + self.sig(t))
            if not r.is_zero():
                return CheckResult("torsionfree", False, "wedge(id+sigma) on e(%s) = %s" % (self.frame.word_name(w), r))
        return CheckResult("torsionfree", True)

    def check_wedgecompat(self) -> CheckResult:
        items = []
        for r in self.calc.relations:
            rf = self.calc.relation_form(r)
            for k in self.letters:
                items.append(("relation %s (x) e(%s)" % (format_row(r, self.frame.names), self.frame.names[k]),
                              rf.tensor(self.e((k,)))))

        def resid(t):
            t = t.apply(self.braid.sigma, 1)
            t = t.apply(self.braid.sigma, 0)
            return self.wedge(t, 2)
        return self._first_fail("wedgecompat", items, resid)

    def check(self, kinds: Sequence[str] = ALL_CONDITIONS) -> List[CheckResult]:
        L = self.letters
        out = []
        for kind in kinds:
            if kind == "torsionfree":
                out.append(self.check_torsionfree())
            elif kind == "flat":
                out.append(self.check_flat(L))
            elif kind == "ybe":
                out.append(self.check_ybe(L))
            elif kind == "wedgecompat":
                out.append(self.check_wedgecompat())
            elif kind == "extendable":
                out.append(self.check_extendable(L))
            elif kind == "leibnizcompat":
                out.append(self.check_leibniz(L))
            elif kind == "curvbimod":
                out.append(self.check_curvbimod(L))
            else:
                raise ValueError("unknown condition %r" % kind)
        return out

    def check_structure(self) -> List[CheckResult]:
        return [self.check_bimodule_map(self.letters), self.check_connection_consistency(self.letters)]

    # inner criteria ---------------------------------------------------------------------
    def inner_torsion_criterion(self) -> CheckResult:
        """wedge sigma(e^i (x) theta) = - e^i wedge theta on the basis."""
        th = self.on(self.calc.require_theta())
        for k in self.letters:
            t = self.e((k,)).tensor(th)
            r = self.wedge(self.sig(t) + t)
            if not r.is_zero():
                return CheckResult("inner_torsion_criterion", False, "on e(%s): %s" % (self.frame.names[k], r))
        return CheckResult("inner_torsion_criterion", True)

    def inner_flat_criterion(self) -> CheckResult:
        """sigma_{Omega^1,Omega^2}(e^i (x) theta^2) = theta^2 (x) e^i."""
        th = self.on(self.calc.require_theta())
        th2 = self.wedge(th.tensor(th))
        for k in self.letters:
            ek = self.e((k,))
            r = self.sigma_omega2(ek.tensor(th2)) - self.wedge(th2.tensor(ek))
            if not r.is_zero():
                return CheckResult("inner_flat_criterion", False, "on e(%s): %s" % (self.frame.names[k], r))
        return CheckResult("inner_flat_criterion", True)

    def with_gamma(self, gamma: Mapping[int, TensorForm], name: str = "nabla~") -> "Connection":
        return Connection(self.calc, gamma, self.table, False, name)


def make_inner_connection(calc: Calculus, table: Mapping[Word, Mapping[Word, Scalar]],
                          alpha: Optional[Mapping[int, TensorForm]] = None) -> Connection:
    """Gamma(e^i) = theta (x) e^i - sigma(e^i (x) theta) (+ alpha(e^i))."""
    th = calc.require_theta()
    sigma = ScalarMap.from_table(calc.field, table, 2, "sigma")
    gamma = {}
    for k in calc.letters:
        ek = TensorForm.basis(calc.frame, (k,))
        g = th.tensor(ek) - ek.tensor(th).apply(sigma, 0)
        if alpha and k in alpha:
            g = g + alpha[k]
        gamma[k] = g
    return Connection(calc, gamma, table, inner=not alpha, name="inner")


def solve_braiding(calc: Calculus, gamma: Mapping[int, TensorForm]) -> Tuple[Optional[Dict[Word, Dict[Word, Scalar]]], bool]:
    """Find a Scalar sigma making Gamma a bimodule connection.

    Returns (table or None if inconsistent, unique flag).  Undetermined entries
    are set to zero.
    """
    alg = calc.alg
    frame = calc.frame
    letters = calc.letters
    table: Dict[Word, Dict[Word, Scalar]] = {}
    unique = True
    pairs = list(itertools.product(letters, repeat=2))
    for i in letters:
        ei = TensorForm.basis(frame, (i,))
        g = gamma.get(i, TensorForm.zero(frame))
        rows: List[Dict[Tuple[int, Word], Scalar]] = []
        rhs: List[Scalar] = []
        for name in alg.generators():
            a = alg.gen(name)
            pa = frame.autos[i](a)
            target = calc.d(pa).tensor(ei) + g.lmul(pa) - g.rmul(a)
            src = ei.tensor(calc.d(a))
            # sigma(sum_j b_j e^{ij}) = sum_j b_j sum_kl x_{j,kl} e^{kl}
            monos = set()
            for t in list(src.terms.values()) + list(target.terms.values()):
                monos.update(t.terms)
            for kl in pairs:
                for m in monos:
                    row = {}
                    for w, b in src.terms.items():
                        c = b.terms.get(m)
                        if c is not None:
                            row[(w[1], kl)] = c
                    val = target.terms.get(kl)
                    r = val.terms.get(m, calc.field.zero) if val is not None else calc.field.zero
                    if row or not r.is_zero():
                        rows.append(row)
                        rhs.append(r)
        sol = solve(rows, rhs, rank_key=lambda c: c)
        if sol is None:
            return None, False
        from .linalg import rref
        ech = rref(rows, lambda c: c)
        if ech.rank < len(letters) * len(pairs):
            unique = False
        for j in letters:
            table[(i, j)] = {}
        for (j, kl), c in sol.items():
            if not c.is_zero():
                table[(i, j)][kl] = c
    return table, unique
