"""First-order calculi with a free left basis of 1-forms and their exterior square.

Lambda^2 is the quotient of the degree-2 word space by a span of Scalar
relation vectors.  The relations are echelonized with pivots on the
lexicographically largest words; the surviving (non-pivot) words are the
coordinates of Lambda^2 and double as canonical lifts, so wedge products are
represented as degree-2 tensors supported on surviving words.
"""

from __future__ import annotations

from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .algebra import Algebra, AlgebraElement, Endomorphism, Monomial, StructureConstantAlgebra
from .linalg import Echelon
from .scalars import Scalar
from .tensors import Frame, ScalarMap, TensorForm, Word, parse_tensor

Check = Tuple[str, bool, Optional[str]]


class CalculusError(ValueError):
    pass


class NotInner(CalculusError):
    pass


class NonCentralRelations(CalculusError):
    pass


class Calculus:
    """Omega^1 with basis e^0..e^{n-1}, e^i a = phi_i(a) e^i, and Lambda^2."""

    def __init__(self, alg: Algebra, basis: Sequence[str], autos: Mapping[str, Endomorphism],
                 dgen: Mapping[str, TensorForm], relations: Sequence[Mapping[Word, Scalar]],
                 dbasis: Mapping[str, TensorForm], theta: Optional[TensorForm] = None,
                 frame: Optional[Frame] = None):
        self.alg = alg
        self.field = alg.field
        self.basis = list(basis)
        self.n = len(self.basis)
        self.frame = frame or Frame(alg, {k: autos[b] for k, b in enumerate(self.basis)},
                                    {k: b for k, b in enumerate(self.basis)})
        self.letters = list(range(self.n))
        self.relations = [self._check_relation(r) for r in relations]
        rank_key = lambda w: tuple(-x for x in w)
        self._echelon = Echelon(rank_key)
        for r in self.relations:
            self._echelon.add(r)
        self.pivot_words = set(self._echelon.pivots)
        self.survivors = [w for w in self.frame.words(2) if w not in self.pivot_words]
        self.wedge_map = ScalarMap(2, self._project_word, self.field, "wedge")
        self.dgen = {g: dgen[g] for g in dgen}
        self._d_cache: Dict[Monomial, TensorForm] = {}
        self.dbasis = {k: self.wedge(dbasis[b]) if b in dbasis else TensorForm.zero(self.frame)
                       for k, b in enumerate(self.basis)}
        self.theta = theta

    def _check_relation(self, r: Mapping[Word, object]) -> Dict[Word, Scalar]:
        out = {}
        for w, c in r.items():
            if isinstance(c, AlgebraElement):
                if any(m for m in c.terms if m and m != tuple()) or len(c.terms) > 1:
                    raise NonCentralRelations("Lambda^2 relation coefficients must be scalars")
                c = next(iter(c.terms.values())) if c.terms else self.field.zero
            c = self.field.coerce(c)
            if len(w) != 2:
                raise CalculusError("Lambda^2 relations must be degree 2")
            if not c.is_zero():
                out[tuple(w)] = c
        return out

    # Lambda^2 ---------------------------------------------------------------
    def _project_word(self, w: Word) -> Dict[Word, Scalar]:
        row = self._echelon.pivots.get(w)
        if row is None:
            return {w: self.field.one}
        return {u: -c for u, c in row.items() if u != w}

    def wedge(self, t: TensorForm, slot: int = 1) -> TensorForm:
        """Project slots (slot, slot+1) onto Lambda^2 coordinates."""
        return t.apply(self.wedge_map, slot - 1)

    def lambda2_dim(self) -> int:
        return len(self.survivors)

    def relation_form(self, r: Mapping[Word, Scalar]) -> TensorForm:
        one = self.alg.one
        return TensorForm(self.frame, {w: one.scale(c) for w, c in r.items()})

    # d ----------------------------------------------------------------------
    def e(self, *names) -> TensorForm:
        return TensorForm.basis(self.frame, tuple(self.frame.letter(x) if isinstance(x, str) else x for x in names))

    def _d_generator(self, g: str) -> TensorForm:
        t = self.dgen.get(g)
        if t is None:
            return TensorForm.zero(self.frame)
        return t

    def _d_word(self, word: Monomial) -> TensorForm:
        """Leibniz rule along a (not necessarily normal) word of generators."""
        alg = self.alg
        total = TensorForm.zero(self.frame)
        for j, g in enumerate(word):
            left = alg.monomial(word[:j]) if j else alg.one
            right = alg.monomial(word[j + 1:]) if j + 1 < len(word) else alg.one
            total = total + self._d_generator(g).lmul(left).rmul(right)
        return total

    def d_monomial(self, m: Monomial) -> TensorForm:
        r = self._d_cache.get(m)
        if r is None:
            if isinstance(self.alg, StructureConstantAlgebra):
                r = self._d_generator(m[0]) if m else TensorForm.zero(self.frame)
            else:
                r = self._d_word(m)
            self._d_cache[m] = r
        return r

    def d(self, a: AlgebraElement) -> TensorForm:
        total = TensorForm.zero(self.frame)
        for m, c in a.terms.items():
            total = total + self.d_monomial(m).scale(c)
        return total

    def d_one_tensor(self, omega: TensorForm) -> TensorForm:
        """Unprojected representative of d of a 1-form: sum da_k (x) e^k + a_k de^k."""
        total = TensorForm.zero(self.frame)
        for w, a in omega.terms.items():
            if len(w) != 1:
                raise CalculusError("d_one expects a 1-form")
            k = w[0]
            total = total + self.d(a).tensor(TensorForm.basis(self.frame, w)) + self.dbasis[k].lmul(a)
        return total

    def d_one(self, omega: TensorForm) -> TensorForm:
        return self.wedge(self.d_one_tensor(omega))

    # inner structure ------------------------------------------------------------
    def require_theta(self) -> TensorForm:
        if self.theta is None:
            raise NotInner("calculus has no inner form theta")
        return self.theta

    # validation -----------------------------------------------------------------
    def validate(self) -> List[Check]:
        checks: List[Check] = []
        alg = self.alg
        gens = alg.generators()
        # automorphisms
        witness = None
        for k, b in enumerate(self.basis):
            ok, msg = self.frame.autos[k].validate()
            if not ok:
                witness = "automorphism of e(%s): %s" % (b, msg)
                break
        checks.append(("automorphisms", witness is None, witness))

        # d respects the relations
        witness = None
        if isinstance(alg, StructureConstantAlgebra):
            for x in alg.basis:
                for y in alg.basis:
                    lhs = self.d(alg.gen(x) * alg.gen(y))
                    rhs = self.d(alg.gen(x)).rmul(alg.gen(y)) + self.d(alg.gen(y)).lmul(alg.gen(x))
                    if lhs != rhs:
                        witness = "d(%s*%s) violates Leibniz" % (x, y)
                        break
                if witness:
                    break
            if witness is None and not self.d(alg.one).is_zero():
                witness = "d(1) != 0"
        else:
            for lhs, rhs in alg.rules.items():
                left = self._d_word(lhs)
                right = TensorForm.zero(self.frame)
                for w, c in rhs.items():
                    right = right + self._d_word(w).scale(c)
                if left != right:
                    witness = "d does not respect %s" % "*".join(lhs)
                    break
        checks.append(("d_relations", witness is None, witness))

        # right multiplication preserves the Lambda^2 relations
        witness = None
        for r in self.relations:
            rf = self.relation_form(r)
            for g in gens:
                if not self.wedge(rf.rmul(alg.gen(g))).is_zero():
                    witness = "relation %s times %s leaves the relation span" % (
                        {self.frame.word_name(w): str(c) for w, c in r.items()}, g)
                    break
            if witness:
                break
        checks.append(("lambda2_bimodule", witness is None, witness))

        # d compatible with e^i a = phi_i(a) e^i
        witness = None
        for k, b in enumerate(self.basis):
            ek = TensorForm.basis(self.frame, (k,))
            phi = self.frame.autos[k]
            for g in gens:
                a = alg.gen(g)
                lhs = self.dbasis[k].rmul(a) - ek.tensor(self.d(a))
                pa = phi(a)
                rhs = self.d(pa).tensor(ek) + self.dbasis[k].lmul(pa)
                if not self.wedge(lhs - rhs).is_zero():
                    witness = "d(e(%s) %s) inconsistent with the commutation rule" % (b, g)
                    break
            if witness:
                break
        checks.append(("d_commutation", witness is None, witness))

        # d^2 = 0
        witness = None
        for g in gens:
            if not self.d_one(self.d(alg.gen(g))).is_zero():
                witness = "d(d(%s)) != 0" % g
                break
        checks.append(("d_squared", witness is None, witness))

        if self.theta is not None:
            witness = None
            th = self.theta
            for g in gens:
                a = alg.gen(g)
                if self.d(a) != th.rmul(a) - th.lmul(a):
                    witness = "d(%s) != [theta, %s]" % (g, g)
                    break
            if witness is None:
                for k, b in enumerate(self.basis):
                    ek = TensorForm.basis(self.frame, (k,))
                    if self.wedge(th.tensor(ek) + ek.tensor(th) - self.dbasis[k]):
                        witness = "d e(%s) != theta^e + e^theta" % b
                        break
            checks.append(("inner", witness is None, witness))
        return checks

    def parse_form(self, text: str, extra: Optional[Mapping[str, object]] = None) -> TensorForm:
        names = {"theta": self.theta} if self.theta is not None else {}
        names.update(extra or {})
        return parse_tensor(text, self.frame, names)
