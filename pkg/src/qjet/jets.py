"""Quantum symmetric forms, the braided shuffle product and jet bimodules.

Jets are stored as truncated graded tuples; component j is a TensorForm of
degree j lying in Omega^j_S.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import AlgebraElement
from .braid import CheckResult
from .connection import BraidingMismatch, Connection, WordGeometry
from .linalg import kernel, rref, solve
from .scalars import Scalar
from .tensors import TensorForm, Word


class JetError(ValueError):
    pass


class MembershipFailure(JetError):
    pass


class SymmetryViolation(JetError):
    pass


class NotInImage(JetError):
    pass


def wedge_residual(geo: WordGeometry, t: TensorForm, k: int) -> Optional[Tuple[int, TensorForm]]:
    """First slot i < k where wedge_i(t) is nonzero (only the first k slots are forms)."""
    for i in range(1, k):
        r = geo.wedge(t, i)
        if not r.is_zero():
            return i, r
    return None


class SymmetricSpace:
    """Omega^k_S as an exact Scalar subspace of the k-fold word space."""

    def __init__(self, geo: WordGeometry, k: int):
        if k < 0:
            raise JetError("degree must be nonnegative")
        self.geo = geo
        self.k = k
        letters = geo.calc.letters
        self.words: List[Word] = geo.braid.words(k) if k else [()]
        eqs: Dict[Tuple[int, Word], Dict[Word, Scalar]] = {}
        wmap = geo.calc.wedge_map
        for w in self.words:
            for i in range(k - 1):
                for u, c in wmap.row(w[i:i + 2]).items():
                    eqs.setdefault((i, w[:i] + u + w[i + 2:]), {})[w] = c
        self.basis: List[Dict[Word, Scalar]] = kernel(eqs.values(), self.words)
        ech = rref(self.basis, {w: j for j, w in enumerate(self.words)}.__getitem__)
        self.pivots: List[Word] = sorted(ech.pivots, key=self.words.index)
        self._echelon = [ech.pivots[p] for p in self.pivots]
        self.letters = letters

    @property
    def rank(self) -> int:
        return len(self.basis)

    def vector_form(self, v: Dict[Word, Scalar]) -> TensorForm:
        return TensorForm(self.geo.frame, {w: self.geo.alg.one.scale(c) for w, c in v.items() if not c.is_zero()})

    def contains(self, t: TensorForm) -> bool:
        return wedge_residual(self.geo, t, self.k) is None

    def coordinates(self, t: TensorForm) -> List[Tuple[TensorForm, AlgebraElement]]:
        """Decompose over the echelon basis; raises MembershipFailure off the subspace."""
        out = []
        rest = t
        for p, row in zip(self.pivots, self._echelon):
            a = rest.coefficient(p)
            if a.is_zero():
                continue
            b = self.vector_form(row).scale(row[p].inverse())
            out.append((b, a))
            rest = rest - b.lmul(a)
        if not rest.is_zero():
            raise MembershipFailure("not in Omega^%d_S: remainder %s" % (self.k, rest))
        return out


class JetGeometry:
    """Jet constructions over a connection on Omega^1 (flat, torsion free, wedge-compatible)."""

    def __init__(self, conn: Connection):
        self.conn = conn
        self.alg = conn.alg
        self.frame = conn.frame
        self.braid = conn.braid
        self._spaces: Dict[int, SymmetricSpace] = {}
        self._npow: Dict[Tuple[AlgebraElement, int], TensorForm] = {}

    def omega_s(self, k: int) -> SymmetricSpace:
        s = self._spaces.get(k)
        if s is None:
            s = self._spaces[k] = SymmetricSpace(self.conn, k)
        return s

    def scalar(self, a: AlgebraElement) -> TensorForm:
        return TensorForm.scalar(self.frame, a)

    def require_symmetric(self, t: TensorForm, k: int, exc=MembershipFailure) -> None:
        bad = wedge_residual(self.conn, t, k)
        if bad is not None:
            raise exc("degree-%d tensor leaves Omega_S at slot %d: %s" % (k, bad[0], bad[1]))

    # products ---------------------------------------------------------------------------
    def odot_graded(self, x: TensorForm, i: int, y: TensorForm, j: int, check: bool = True) -> TensorForm:
        if check:
            self.require_symmetric(x, i)
            self.require_symmetric(y, j)
        out = x.tensor(y)
        if i and j:
            out = out.apply(self.braid.binomial(i + j, j))
        return out

    def odot(self, x: TensorForm, y: TensorForm, check: bool = True) -> TensorForm:
        """Braided shuffle product, extended bilinearly over degree components."""
        total = TensorForm.zero(self.frame)
        for i in x.degrees():
            for j in y.degrees():
                total = total + self.odot_graded(x.component(i), i, y.component(j), j, check)
        return total

    # prolongation -------------------------------------------------------------------------
    def nabla_power(self, a: AlgebraElement, n: int, check: bool = True) -> TensorForm:
        if n < 0:
            raise JetError("order must be nonnegative")
        key = (a, n)
        r = self._npow.get(key)
        if r is not None:
            return r
        if n == 0:
            r = self.scalar(a)
        elif n == 1:
            r = self.conn.d(a)
        else:
            r = self.conn.nabla(self.nabla_power(a, n - 1, check))
            if check:
                self.require_symmetric(r, n, SymmetryViolation)
        self._npow[key] = r
        return r

    def jet_prolong(self, a: AlgebraElement, k: int) -> "JetElement":
        return JetElement(self, k, [self.nabla_power(a, j) for j in range(k + 1)])

    def zero_jet(self, k: int) -> "JetElement":
        return JetElement(self, k, [TensorForm.zero(self.frame) for _ in range(k + 1)])

    def make_jet(self, components: Sequence[TensorForm]) -> "JetElement":
        k = len(components) - 1
        for j, c in enumerate(components):
            if not c.is_zero() and c.degrees() != [j]:
                raise JetError("component %d has degrees %s" % (j, c.degrees()))
            self.require_symmetric(c, j)
        return JetElement(self, k, list(components))

    def bullet(self, a: AlgebraElement, xi: "JetElement", side: str = "left") -> "JetElement":
        """a . omega_j = j^{k-j}(a) (.) omega_j; the right action puts j^{k-j}(a) on the right."""
        k = xi.order
        comps = [TensorForm.zero(self.frame) for _ in range(k + 1)]
        for j, w in enumerate(xi.components):
            if w.is_zero():
                continue
            for i in range(k - j + 1):
                na = self.nabla_power(a, i)
                if side == "left":
                    comps[i + j] = comps[i + j] + self.odot_graded(na, i, w, j, check=False)
                elif side == "right":
                    comps[i + j] = comps[i + j] + self.odot_graded(w, j, na, i, check=False)
                else:
                    raise JetError("side must be left or right")
        return JetElement(self, k, comps)

    def project(self, xi: "JetElement") -> "JetElement":
        if xi.order < 1:
            raise JetError("projection needs order >= 1")
        return JetElement(self, xi.order - 1, xi.components[:-1])

    # identities -------------------------------------------------------------------------------
    def leibniz_check(self, a: AlgebraElement, b: AlgebraElement, n: int) -> List[CheckResult]:
        """n-th order Leibniz rule in binomial form and in odot form."""
        lhs = self.nabla_power(a * b, n)
        binom = TensorForm.zero(self.frame)
        circ = TensorForm.zero(self.frame)
        for k in range(n + 1):
            x, y = self.nabla_power(a, n - k), self.nabla_power(b, k)
            t = x.tensor(y)
            if 0 < k < n:
                t = t.apply(self.braid.binomial(n, k))
            binom = binom + t
            circ = circ + self.odot_graded(x, n - k, y, k)
        out = []
        for name, rhs in (("leibniz_binomial_%d" % n, binom), ("leibniz_odot_%d" % n, circ)):
            diff = lhs - rhs
            out.append(CheckResult(name, diff.is_zero(), None if diff.is_zero() else "residual %s" % diff))
        return out

    def reduced_component(self, t: TensorForm, i: int) -> TensorForm:
        """x with [i,sigma]! x = t, free coordinates zero (canonical mod the kernel)."""
        if i < 2:
            return t
        fact = self.braid.factorial(i)
        words = self.braid.words(i)
        rows: Dict[Word, Dict[Word, Scalar]] = {}
        for w in words:
            for u, c in fact.row(w).items():
                rows.setdefault(u, {})[w] = c
        by_mono: Dict[object, Dict[Word, Scalar]] = {}
        for w, a in t.terms.items():
            for m, c in a.terms.items():
                by_mono.setdefault(m, {})[w] = c
        order = {w: j for j, w in enumerate(words)}
        out = TensorForm.zero(self.frame)
        zero = self.alg.field.zero
        for m, vec in by_mono.items():
            eq_rows = [rows.get(u, {}) for u in words]
            rhs = [vec.get(u, zero) for u in words]
            sol = solve(eq_rows, rhs, order.__getitem__)
            if sol is None:
                raise NotInImage("degree-%d component is not in the image of [%d,sigma]!" % (i, i))
            for w, c in sol.items():
                out = out + TensorForm.basis(self.frame, w, self.alg.monomial(m).scale(c))
        return out

    def reduced_jet(self, a: AlgebraElement, k: int) -> List[TensorForm]:
        """Components d^i(a) with nabla^i(a) = [i,sigma]! d^i(a)."""
        return [self.reduced_component(self.nabla_power(a, i), i) for i in range(k + 1)]


@dataclass
class JetElement:
    geo: JetGeometry
    order: int
    components: List[TensorForm]

    def __add__(self, other: "JetElement") -> "JetElement":
        if self.order != other.order:
            raise JetError("orders differ")
        return JetElement(self.geo, self.order, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "JetElement") -> "JetElement":
        if self.order != other.order:
            raise JetError("orders differ")
        return JetElement(self.geo, self.order, [a - b for a, b in zip(self.components, other.components)])

    def __eq__(self, other):
        if not isinstance(other, JetElement):
            return NotImplemented
        return self.order == other.order and all(a == b for a, b in zip(self.components, other.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def total(self) -> TensorForm:
        out = TensorForm.zero(self.geo.frame)
        for c in self.components:
            out = out + c
        return out

    def to_json(self) -> Dict[str, object]:
        return {"order": self.order, "components": [str(c) for c in self.components]}


def jet2_isomorphism(geo: JetGeometry, other: JetGeometry, allow_mixed: bool = False):
    """phi(a + w1 + w2) = a + w1 + (nabla~ - nabla) w1 + w2 from J^2 to J~^2."""
    if geo.conn.table != other.conn.table and not allow_mixed:
        raise BraidingMismatch("the two connections have different braidings")

    def phi(xi: JetElement) -> JetElement:
        if xi.order != 2:
            raise JetError("the isomorphism acts on order-2 jets")
        c0, c1, c2 = xi.components
        diff = other.conn.nabla(c1) - geo.conn.nabla(c1)
        return JetElement(other, 2, [c0, c1, c2 + diff])
    return phi
