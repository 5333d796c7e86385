"""Coordinate algebras with exact normal forms.

Two backends share one element type:

* :class:`StructureConstantAlgebra` -- finite-dimensional, basis symbols with a
  multiplication table.  Monomials are 1-tuples ``(symbol,)``.
* :class:`RewriteAlgebra` -- finitely presented, words in generators reduced by
  a declared complete rewrite system.  Monomials are tuples of generator names;
  the empty tuple is the unit.

Endomorphisms are given by images of basis symbols or generators.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .scalars import Scalar, ScalarField, ScalarEvaluator, ScalarParseError, parse_expression

Monomial = Tuple[str, ...]


class AlgebraError(ValueError):
    pass


class DegreeBoundExceeded(AlgebraError):
    pass


class MixedPresentations(AlgebraError):
    pass


class AlgebraElement:
    """Immutable linear combination of normal-form monomials."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: "Algebra", terms: Dict[Monomial, Scalar]):
        self.alg = alg
        self.terms = terms

    # construction helpers
    def _same(self, other: "AlgebraElement") -> None:
        if other.alg is not self.alg:
            raise MixedPresentations("elements of different algebras")

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        if isinstance(other, AlgebraElement):
            self._same(other)
            if not other.terms:
                return self
            if not self.terms:
                return other
            out = dict(self.terms)
            for m, c in other.terms.items():
                cur = out.get(m)
                if cur is None:
                    out[m] = c
                else:
                    nc = cur + c
                    if nc.is_zero():
                        del out[m]
                    else:
                        out[m] = nc
            return AlgebraElement(self.alg, out)
        return self + self.alg.scalar(other)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.alg, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, AlgebraElement):
            return self + (-other)
        return self + self.alg.scalar(-self.alg.field.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "AlgebraElement":
        if not isinstance(c, Scalar):
            c = self.alg.field.const(c)
        if c.is_zero():
            return self.alg.zero
        if c == 1:
            return self
        return AlgebraElement(self.alg, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self.alg.mul(self, other)
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            c = other if isinstance(other, Scalar) else self.alg.field.const(other)
            return self.scale(c.inverse())
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = self.alg.one
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            if other.alg is not self.alg:
                return False
            if self.terms.keys() != other.terms.keys():
                return False
            return all(c == other.terms[m] for m, c in self.terms.items())
        if isinstance(other, (int, Fraction, Scalar)):
            return self == self.alg.scalar(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def coefficient(self, mono: Monomial) -> Scalar:
        return self.terms.get(tuple(mono), self.alg.field.zero)

    def map_scalars(self, fn) -> "AlgebraElement":
        out = {}
        for m, c in self.terms.items():
            v = fn(c)
            if not v.is_zero():
                out[m] = v
        return AlgebraElement(self.alg, out)

    def subs(self, bindings) -> "AlgebraElement":
        return self.map_scalars(lambda c: self.alg.field.coerce(c.subs(bindings)))

    def sorted_terms(self) -> List[Tuple[Monomial, Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: self.alg.monomial_key(kv[0]))

    def __str__(self):
        return self.alg.format(self)

    def __repr__(self):
        return "AlgebraElement(%s)" % self


def _fmt_coeff_mono(c: Scalar, mono: str) -> Tuple[bool, str]:
    text = str(c)
    simple = c.is_rational()
    if not mono:
        if simple:
            neg = c.as_fraction() < 0
            return neg, text.lstrip("-") if neg else text
        return False, "(%s)" % text if " " in text else text
    if simple:
        f = c.as_fraction()
        neg = f < 0
        mag = -f if neg else f
        if mag == 1:
            return neg, mono
        return neg, "%s*%s" % (mag, mono)
    if " " in text:
        text = "(%s)" % text
    return False, "%s*%s" % (text, mono)


def format_terms(pieces: Sequence[Tuple[Scalar, str]]) -> str:
    if not pieces:
        return "0"
    out = []
    for c, mono in pieces:
        neg, body = _fmt_coeff_mono(c, mono)
        if not out:
            out.append("-" + body if neg else body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)


class Algebra:
    """Common interface; subclasses implement normal forms and products."""

    kind = "abstract"
    name = "A"

    def __init__(self, field: ScalarField):
        self.field = field
        self.zero = AlgebraElement(self, {})

    # -- to be provided
    def mul_monomials(self, u: Monomial, v: Monomial) -> Dict[Monomial, Scalar]:
        raise NotImplementedError

    @property
    def one(self) -> AlgebraElement:
        raise NotImplementedError

    def monomial_key(self, m: Monomial):
        raise NotImplementedError

    def generators(self) -> List[str]:
        raise NotImplementedError

    # -- shared
    def scalar(self, c) -> AlgebraElement:
        c = self.field.coerce(c)
        return self.one.scale(c)

    def element(self, terms: Mapping[Monomial, object]) -> AlgebraElement:
        out = self.zero
        for m, c in terms.items():
            out = out + self.monomial(m).scale(self.field.coerce(c))
        return out

    def mul(self, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
        if a.alg is not self or b.alg is not self:
            raise MixedPresentations("elements of different algebras")
        if not a.terms or not b.terms:
            return self.zero
        out: Dict[Monomial, Scalar] = {}
        one = self.field.one
        for u, cu in a.terms.items():
            for v, cv in b.terms.items():
                prod = self.mul_monomials(u, v)
                if not prod:
                    continue
                c = cu * cv
                for w, cw in prod.items():
                    x = c if cw is one else c * cw
                    cur = out.get(w)
                    out[w] = x if cur is None else cur + x
        return AlgebraElement(self, {w: c for w, c in out.items() if not c.is_zero()})

    def gen(self, name: str) -> AlgebraElement:
        if name not in self.generators():
            raise AlgebraError("unknown generator %r" % name)
        return self.monomial((name,))

    def monomial(self, m: Monomial) -> AlgebraElement:
        raise NotImplementedError

    def parse(self, text: str) -> AlgebraElement:
        return parse_algebra(text, self)

    def format(self, x: AlgebraElement) -> str:
        return format_terms([(c, self.format_monomial(m)) for m, c in x.sorted_terms()])

    def format_monomial(self, m: Monomial) -> str:
        return "*".join(m)

    def commutator(self, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
        return a * b - b * a

    def anticommutator(self, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
        return a * b + b * a

    def with_field(self, field: ScalarField) -> "Algebra":
        raise NotImplementedError

    def sample(self, rng: random.Random, max_degree: int = 2, terms: int = 3) -> AlgebraElement:
        monos = self.spanning_monomials(max_degree)
        out = self.zero
        for _ in range(terms):
            m = rng.choice(monos)
            c = rng.choice([1, -1, 2, -2, 3, Fraction(1, 2), Fraction(-1, 3)])
            out = out + self.monomial(m).scale(c)
        return out

    def spanning_monomials(self, max_degree: int) -> List[Monomial]:
        raise NotImplementedError


class StructureConstantAlgebra(Algebra):
    """Finite-dimensional algebra from a multiplication table on basis symbols."""

    kind = "structure_constants"

    def __init__(self, field: ScalarField, basis: Sequence[str],
                 table: Mapping[Tuple[str, str], Mapping[str, object]],
                 unit: Mapping[str, object], name: str = "A"):
        super().__init__(field)
        self.name = name
        self.basis = list(basis)
        self._index = {b: k for k, b in enumerate(self.basis)}
        self.table: Dict[Tuple[str, str], Dict[Monomial, Scalar]] = {}
        for (x, y), prod in table.items():
            if x not in self._index or y not in self._index:
                raise AlgebraError("table entry for unknown basis symbols %r" % ((x, y),))
            out = {}
            for z, c in prod.items():
                c = field.coerce(c)
                if not c.is_zero():
                    out[(z,)] = field.one if c == field.one else c
            self.table[(x, y)] = out
        self._unit_terms = {(b,): field.coerce(c) for b, c in unit.items() if not field.coerce(c).is_zero()}
        self._one = AlgebraElement(self, dict(self._unit_terms))

    @property
    def one(self) -> AlgebraElement:
        return self._one

    def generators(self) -> List[str]:
        return list(self.basis)

    def monomial(self, m: Monomial) -> AlgebraElement:
        if len(m) == 0:
            return self.one
        if len(m) == 1:
            if m[0] not in self._index:
                raise AlgebraError("unknown basis symbol %r" % m[0])
            return AlgebraElement(self, {(m[0],): self.field.one})
        out = self.monomial(m[:1])
        for s in m[1:]:
            out = out * self.monomial((s,))
        return out

    def monomial_key(self, m: Monomial):
        return tuple(self._index[s] for s in m)

    def mul_monomials(self, u: Monomial, v: Monomial) -> Dict[Monomial, Scalar]:
        return self.table.get((u[0], v[0]), {})

    def spanning_monomials(self, max_degree: int) -> List[Monomial]:
        return [(b,) for b in self.basis]

    def with_field(self, field: ScalarField) -> "StructureConstantAlgebra":
        table = {k: {m[0]: c for m, c in v.items()} for k, v in self.table.items()}
        return StructureConstantAlgebra(field, self.basis, table,
                                        {m[0]: c for m, c in self._unit_terms.items()}, self.name)

    def validate(self) -> List[Tuple[str, bool, Optional[str]]]:
        checks = []
        basis = [self.monomial((b,)) for b in self.basis]
        witness = None
        for (x, a), (y, b), (z, c) in itertools.product(zip(self.basis, basis), repeat=3):
            if (a * b) * c != a * (b * c):
                witness = "(%s*%s)*%s != %s*(%s*%s)" % (x, y, z, x, y, z)
                break
        checks.append(("associativity", witness is None, witness))
        witness = None
        for x, a in zip(self.basis, basis):
            if self.one * a != a or a * self.one != a:
                witness = "unit fails on %s" % x
                break
        checks.append(("unit", witness is None, witness))
        return checks


class RewriteAlgebra(Algebra):
    """Finitely presented algebra with a complete rewrite system.

    ``rules`` maps a left-hand word (tuple of generator names) to a polynomial
    given as ``{word: coefficient}``.  The monomial order is degree-lex by the
    declared generator order, optionally with positive integer weights.
    Normal forms rewrite the leftmost occurrence first and are memoized.
    """

    kind = "rewrite"

    def __init__(self, field: ScalarField, generators: Sequence[str],
                 rules: Mapping[Tuple[str, ...], Mapping[Tuple[str, ...], object]],
                 weights: Optional[Mapping[str, int]] = None, degree_bound: int = 24,
                 name: str = "A", inverses: Optional[Mapping[str, str]] = None):
        super().__init__(field)
        self.name = name
        self.inverses = dict(inverses or {})
        self.gens = list(generators)
        self._gindex = {g: k for k, g in enumerate(self.gens)}
        self.weights = {g: int((weights or {}).get(g, 1)) for g in self.gens}
        if any(w < 1 for w in self.weights.values()):
            raise AlgebraError("generator weights must be positive")
        self.degree_bound = degree_bound
        self.rules: Dict[Monomial, Dict[Monomial, Scalar]] = {}
        for lhs, rhs in rules.items():
            lhs = tuple(lhs)
            for g in lhs:
                if g not in self._gindex:
                    raise AlgebraError("rule uses unknown generator %r" % g)
            out = {}
            for w, c in rhs.items():
                c = field.coerce(c)
                if not c.is_zero():
                    out[tuple(w)] = out.get(tuple(w), field.zero) + c
            self.rules[lhs] = {w: c for w, c in out.items() if not c.is_zero()}
        self._max_lhs = max((len(l) for l in self.rules), default=0)
        self._nf_cache: Dict[Monomial, Dict[Monomial, Scalar]] = {}
        self._mul_cache: Dict[Tuple[Monomial, Monomial], Dict[Monomial, Scalar]] = {}
        self._one = AlgebraElement(self, {(): field.one})

    @property
    def one(self) -> AlgebraElement:
        return self._one

    def generators(self) -> List[str]:
        return list(self.gens)

    def with_field(self, field: ScalarField) -> "RewriteAlgebra":
        return RewriteAlgebra(field, self.gens, self.rules, self.weights, self.degree_bound, self.name,
                              self.inverses)

    def monomial_key(self, m: Monomial):
        return (sum(self.weights[g] for g in m), tuple(self._gindex[g] for g in m))

    def _find_redex(self, word: Monomial) -> Optional[Tuple[int, Monomial]]:
        n = len(word)
        for i in range(n):
            for L in range(1, min(self._max_lhs, n - i) + 1):
                sub = word[i:i + L]
                if sub in self.rules:
                    return i, sub
        return None

    def nf_word(self, word: Monomial, _depth: int = 0) -> Dict[Monomial, Scalar]:
        word = tuple(word)
        cached = self._nf_cache.get(word)
        if cached is not None:
            return cached
        if len(word) > self.degree_bound or _depth > 4 * self.degree_bound + 64:
            raise DegreeBoundExceeded("rewriting %s exceeds degree bound %d" % ("*".join(word), self.degree_bound))
        redex = self._find_redex(word)
        if redex is None:
            result = {word: self.field.one}
        else:
            i, lhs = redex
            pre, post = word[:i], word[i + len(lhs):]
            acc: Dict[Monomial, Scalar] = {}
            for w, c in self.rules[lhs].items():
                for v, cv in self.nf_word(pre + w + post, _depth + 1).items():
                    x = c * cv
                    cur = acc.get(v)
                    acc[v] = x if cur is None else cur + x
            result = {v: c for v, c in acc.items() if not c.is_zero()}
        self._nf_cache[word] = result
        return result

    def nf(self, combo: Mapping[Monomial, object]) -> AlgebraElement:
        acc: Dict[Monomial, Scalar] = {}
        for w, c in combo.items():
            c = self.field.coerce(c)
            for v, cv in self.nf_word(tuple(w)).items():
                x = c * cv
                cur = acc.get(v)
                acc[v] = x if cur is None else cur + x
        return AlgebraElement(self, {v: c for v, c in acc.items() if not c.is_zero()})

    def monomial(self, m: Monomial) -> AlgebraElement:
        for g in m:
            if g not in self._gindex:
                raise AlgebraError("unknown generator %r" % g)
        return AlgebraElement(self, dict(self.nf_word(tuple(m))))

    def mul_monomials(self, u: Monomial, v: Monomial) -> Dict[Monomial, Scalar]:
        if not u:
            return {v: self.field.one}
        if not v:
            return {u: self.field.one}
        key = (u, v)
        r = self._mul_cache.get(key)
        if r is None:
            r = self._mul_cache[key] = self.nf_word(u + v)
        return r

    def is_normal(self, word: Monomial) -> bool:
        return self._find_redex(tuple(word)) is None

    def spanning_monomials(self, max_degree: int) -> List[Monomial]:
        out = [()]
        layer = [()]
        for _ in range(max_degree):
            nxt = []
            for w in layer:
                for g in self.gens:
                    v = w + (g,)
                    if self.is_normal(v):
                        nxt.append(v)
            out.extend(nxt)
            layer = nxt
        return out

    def format_monomial(self, m: Monomial) -> str:
        if not m:
            return ""
        parts = []
        for g, grp in itertools.groupby(m):
            k = len(list(grp))
            parts.append(g if k == 1 else "%s^%d" % (g, k))
        return "*".join(parts)

    def critical_words(self) -> List[Tuple[Monomial, Tuple[int, Monomial], Tuple[int, Monomial]]]:
        """Overlap and inclusion ambiguities between rule left-hand sides."""
        out = []
        lhss = list(self.rules)
        for l1 in lhss:
            for l2 in lhss:
                # inclusion: l2 inside l1
                if l1 != l2 and len(l2) <= len(l1):
                    for i in range(len(l1) - len(l2) + 1):
                        if l1[i:i + len(l2)] == l2:
                            out.append((l1, (0, l1), (i, l2)))
                # proper overlap: suffix of l1 equals prefix of l2
                for k in range(1, min(len(l1), len(l2))):
                    if l1[-k:] == l2[:k]:
                        word = l1 + l2[k:]
                        out.append((word, (0, l1), (len(l1) - k, l2)))
        return out

    def _rewrite_at(self, word: Monomial, pos: int, lhs: Monomial) -> Dict[Monomial, Scalar]:
        pre, post = word[:pos], word[pos + len(lhs):]
        return dict(self.nf({pre + w + post: c for w, c in self.rules[lhs].items()}).terms)

    def validate(self) -> List[Tuple[str, bool, Optional[str]]]:
        checks = []
        witness = None
        for lhs, rhs in self.rules.items():
            k = self.monomial_key(lhs)
            for w in rhs:
                if self.monomial_key(w) >= k:
                    witness = "rule %s -> ... contains non-smaller monomial %s" % (
                        "*".join(lhs), "*".join(w) or "1")
                    break
            if witness:
                break
        checks.append(("rules_decrease", witness is None, witness))
        witness = None
        try:
            for word, (p1, l1), (p2, l2) in self.critical_words():
                a = self._rewrite_at(word, p1, l1)
                b = self._rewrite_at(word, p2, l2)
                if AlgebraElement(self, a) != AlgebraElement(self, b):
                    witness = "overlap %s does not resolve" % "*".join(word)
                    break
        except DegreeBoundExceeded as exc:
            witness = str(exc)
        checks.append(("critical_pairs", witness is None, witness))
        return checks


class Endomorphism:
    """Algebra map given on basis symbols (structure constants) or generators."""

    def __init__(self, alg: Algebra, images: Mapping[str, AlgebraElement], name: str = "phi",
                 identity: bool = False):
        self.alg = alg
        self.name = name
        self.identity = identity
        self.images = {}
        if not identity:
            for g in alg.generators():
                img = images.get(g)
                if img is None:
                    img = alg.gen(g)
                if not isinstance(img, AlgebraElement):
                    img = alg.parse(str(img))
                self.images[g] = img
        self._cache: Dict[Monomial, AlgebraElement] = {}

    @classmethod
    def identity_map(cls, alg: Algebra) -> "Endomorphism":
        return cls(alg, {}, "id", identity=True)

    def apply_monomial(self, m: Monomial) -> AlgebraElement:
        if self.identity:
            return self.alg.monomial(m)
        r = self._cache.get(m)
        if r is None:
            if isinstance(self.alg, StructureConstantAlgebra):
                r = self.images[m[0]]
            else:
                r = self.alg.one
                for g in m:
                    r = r * self.images[g]
            self._cache[m] = r
        return r

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        if self.identity:
            return a
        out = self.alg.zero
        for m, c in a.terms.items():
            out = out + self.apply_monomial(m).scale(c)
        return out

    def compose(self, other: "Endomorphism") -> "Endomorphism":
        """self after other."""
        if self.identity:
            return other
        if other.identity:
            return self
        return Endomorphism(self.alg, {g: self(other.images[g]) for g in self.alg.generators()},
                            "%s.%s" % (self.name, other.name))

    def is_identity(self) -> bool:
        if self.identity:
            return True
        return all(img == self.alg.gen(g) for g, img in self.images.items())

    def validate(self) -> Tuple[bool, Optional[str]]:
        if self.identity:
            return True, None
        alg = self.alg
        if isinstance(alg, StructureConstantAlgebra):
            for x in alg.basis:
                for y in alg.basis:
                    a, b = alg.gen(x), alg.gen(y)
                    if self(a * b) != self(a) * self(b):
                        return False, "%s not multiplicative on %s*%s" % (self.name, x, y)
            if self(alg.one) != alg.one:
                return False, "%s does not preserve the unit" % self.name
            return True, None
        for lhs, rhs in alg.rules.items():
            left = alg.one
            for g in lhs:
                left = left * self.images[g]
            right = alg.zero
            for w, c in rhs.items():
                t = alg.one
                for g in w:
                    t = t * self.images[g]
                right = right + t.scale(c)
            if left != right:
                return False, "%s does not respect relation %s" % (self.name, "*".join(lhs))
        return True, None


# expression parsing ------------------------------------------------------------

class AlgebraEvaluator(ScalarEvaluator):
    """Scalar syntax extended with generator names; products are algebra products."""

    def __init__(self, alg: Algebra, extra: Optional[Mapping[str, object]] = None):
        names = {g: alg.gen(g) for g in alg.generators()}
        names.update(extra or {})
        super().__init__(alg.field, names)
        self.alg = alg

    def power(self, base, exponent: int):
        if isinstance(base, AlgebraElement):
            if exponent < 0:
                inv = getattr(self.alg, "inverses", {})
                mono = next(iter(base.terms)) if len(base.terms) == 1 else None
                if mono is not None and len(mono) == 1 and mono[0] in inv and base.terms[mono] == 1:
                    return self.alg.gen(inv[mono[0]]) ** (-exponent)
                raise ScalarParseError("negative powers only for declared invertible generators")
            return base ** exponent
        return super().power(base, exponent)


def _lift(alg: Algebra, x):
    if isinstance(x, Scalar):
        return alg.scalar(x)
    return x


def parse_algebra(text: str, alg: Algebra) -> AlgebraElement:
    ev = AlgebraEvaluator(alg)
    value = ev.eval(parse_expression(str(text)))
    value = _lift(alg, value)
    if not isinstance(value, AlgebraElement):
        raise ScalarParseError("%r is not an algebra expression" % text)
    return value

