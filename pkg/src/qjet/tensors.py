"""Tensor powers of free bimodules with automorphism commutation.

Letters index a free left basis.  Non-negative letters are basis 1-forms; a
bundle E adds negative letters.  Every letter x carries an automorphism phi_x
with ``e^x a = phi_x(a) e^x``, so a tensor in left normal form is a mapping
``word -> AlgebraElement`` meaning ``sum_w a_w e^{w_1} (x) ... (x) e^{w_k}``.

Scalar word maps (braidings, wedge projections, binomials) act on words with
Scalar entries and are evaluated lazily with per-word memoization.
"""

from __future__ import annotations

import itertools
import re
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .algebra import Algebra, AlgebraElement, AlgebraEvaluator, Endomorphism, Monomial
from .scalars import Scalar, ScalarParseError, parse_expression

Word = Tuple[int, ...]


class TensorError(ValueError):
    pass


class DegreeMismatch(TensorError):
    pass


class SlotOutOfRange(TensorError):
    pass


class Frame:
    """Letters, their display names and commutation automorphisms."""

    def __init__(self, alg: Algebra, autos: Mapping[int, Endomorphism], names: Mapping[int, str]):
        self.alg = alg
        self.autos = dict(autos)
        self.names = dict(names)
        self.letters = sorted(self.autos, key=lambda x: (x < 0, abs(x)))
        self._nontrivial = {x for x, f in self.autos.items() if not f.is_identity()}
        self._cache: Dict[Tuple[Word, Monomial], AlgebraElement] = {}
        self._by_name = {v: k for k, v in self.names.items()}

    @property
    def form_letters(self) -> List[int]:
        return [x for x in self.letters if x >= 0]

    @property
    def bundle_letters(self) -> List[int]:
        return [x for x in self.letters if x < 0]

    def letter(self, name: str) -> int:
        if name not in self._by_name:
            raise TensorError("unknown basis element %r" % name)
        return self._by_name[name]

    def extend(self, autos: Mapping[int, Endomorphism], names: Mapping[int, str]) -> "Frame":
        a = dict(self.autos)
        a.update(autos)
        n = dict(self.names)
        n.update(names)
        return Frame(self.alg, a, n)

    def _move_monomial(self, word: Word, m: Monomial) -> AlgebraElement:
        key = (word, m)
        r = self._cache.get(key)
        if r is None:
            x = self.autos[word[-1]]
            r = x.apply_monomial(m)
            if len(word) > 1:
                r = self.move(word[:-1], r)
            self._cache[key] = r
        return r

    def move(self, word: Word, a: AlgebraElement) -> AlgebraElement:
        """phi_word(a): the coefficient obtained when a passes left through e^word."""
        if not a.terms:
            return a
        word = tuple(x for x in word if x in self._nontrivial)
        if not word:
            return a
        alg = self.alg
        acc: Dict[Monomial, Scalar] = {}
        for m, c in a.terms.items():
            for v, cv in self._move_monomial(word, m).terms.items():
                x = c * cv
                cur = acc.get(v)
                acc[v] = x if cur is None else cur + x
        return AlgebraElement(alg, {v: c for v, c in acc.items() if not c.is_zero()})

    def word_name(self, word: Word) -> str:
        return ",".join(self.names[x] for x in word)

    def words(self, k: int, letters: Optional[Sequence[int]] = None) -> List[Word]:
        letters = self.form_letters if letters is None else list(letters)
        return [tuple(w) for w in itertools.product(letters, repeat=k)]


class _Acc:
    """Accumulator word -> monomial -> Scalar."""

    __slots__ = ("data",)

    def __init__(self):
        self.data: Dict[Word, Dict[Monomial, Scalar]] = {}

    def add(self, word: Word, a: AlgebraElement, c: Optional[Scalar] = None) -> None:
        if not a.terms:
            return
        slot = self.data.get(word)
        if slot is None:
            slot = self.data[word] = {}
        for m, v in a.terms.items():
            x = v if c is None else v * c
            cur = slot.get(m)
            slot[m] = x if cur is None else cur + x

    def form(self, frame: Frame) -> "TensorForm":
        alg = frame.alg
        out = {}
        for w, slot in self.data.items():
            terms = {m: c for m, c in slot.items() if not c.is_zero()}
            if terms:
                out[w] = AlgebraElement(alg, terms)
        return TensorForm(frame, out)


class TensorForm:
    """Sum of ``a_w e^w`` over words; words may have different lengths."""

    __slots__ = ("frame", "terms")

    def __init__(self, frame: Frame, terms: Dict[Word, AlgebraElement]):
        self.frame = frame
        self.terms = terms

    # constructors
    @classmethod
    def zero(cls, frame: Frame) -> "TensorForm":
        return cls(frame, {})

    @classmethod
    def basis(cls, frame: Frame, word: Sequence[int], coeff: Optional[AlgebraElement] = None) -> "TensorForm":
        coeff = frame.alg.one if coeff is None else coeff
        if not coeff.terms:
            return cls(frame, {})
        return cls(frame, {tuple(word): coeff})

    @classmethod
    def scalar(cls, frame: Frame, a: AlgebraElement) -> "TensorForm":
        return cls.basis(frame, (), a)

    # inspection
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degrees(self) -> List[int]:
        return sorted({len(w) for w in self.terms})

    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) > 1:
            raise DegreeMismatch("tensor form has mixed degrees %s" % ds)
        return ds[0] if ds else 0

    def component(self, k: int) -> "TensorForm":
        return TensorForm(self.frame, {w: a for w, a in self.terms.items() if len(w) == k})

    def coefficient(self, word: Sequence[int]) -> AlgebraElement:
        return self.terms.get(tuple(word), self.frame.alg.zero)

    def as_algebra(self) -> AlgebraElement:
        if any(len(w) for w in self.terms):
            raise DegreeMismatch("not a degree-0 form")
        return self.terms.get((), self.frame.alg.zero)

    # linear structure
    def __add__(self, other):
        if not isinstance(other, TensorForm):
            if isinstance(other, AlgebraElement):
                other = TensorForm.scalar(self.frame, other)
            else:
                return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for w, a in other.terms.items():
            cur = out.get(w)
            if cur is None:
                out[w] = a
            else:
                s = cur + a
                if s.terms:
                    out[w] = s
                else:
                    del out[w]
        return TensorForm(self.frame, out)

    __radd__ = __add__

    def __neg__(self):
        return TensorForm(self.frame, {w: -a for w, a in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, AlgebraElement):
            other = TensorForm.scalar(self.frame, other)
        if not isinstance(other, TensorForm):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "TensorForm":
        if c.is_zero():
            return TensorForm(self.frame, {})
        out = {}
        for w, a in self.terms.items():
            b = a.scale(c)
            if b.terms:
                out[w] = b
        return TensorForm(self.frame, out)

    def lmul(self, a: AlgebraElement) -> "TensorForm":
        """a . t"""
        out = {}
        for w, b in self.terms.items():
            p = a * b
            if p.terms:
                out[w] = p
        return TensorForm(self.frame, out)

    def rmul(self, a: AlgebraElement) -> "TensorForm":
        """t . a = sum b_w phi_w(a) e^w"""
        out = {}
        mv = self.frame.move
        for w, b in self.terms.items():
            p = b * mv(w, a)
            if p.terms:
                out[w] = p
        return TensorForm(self.frame, out)

    def tensor(self, other: "TensorForm") -> "TensorForm":
        """(a e^u) (x) (b e^v) = a phi_u(b) e^{uv}"""
        acc = _Acc()
        mv = self.frame.move
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                acc.add(u + v, a * mv(u, b))
        return acc.form(self.frame)

    def __mul__(self, other):
        if isinstance(other, TensorForm):
            return self.tensor(other)
        if isinstance(other, AlgebraElement):
            return self.rmul(other)
        if isinstance(other, Scalar):
            return self.scale(other)
        if isinstance(other, int):
            return self.scale(self.frame.alg.field.const(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, AlgebraElement):
            return self.lmul(other)
        if isinstance(other, Scalar):
            return self.scale(other)
        if isinstance(other, int):
            return self.scale(self.frame.alg.field.const(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (Scalar, int)):
            c = other if isinstance(other, Scalar) else self.frame.alg.field.const(other)
            return self.scale(c.inverse())
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            other = TensorForm.scalar(self.frame, other)
        if not isinstance(other, TensorForm):
            return NotImplemented
        if self.terms.keys() != other.terms.keys():
            return False
        return all(a == other.terms[w] for w, a in self.terms.items())

    def __hash__(self):
        return hash(frozenset((w, hash(a)) for w, a in self.terms.items()))

    def subs(self, bindings) -> "TensorForm":
        out = {}
        for w, a in self.terms.items():
            b = a.subs(bindings)
            if b.terms:
                out[w] = b
        return TensorForm(self.frame, out)

    # word maps
    def apply(self, m: "ScalarMap", offset: int = 0) -> "TensorForm":
        """Apply a Scalar word map to the slots starting at ``offset`` (0-based)."""
        acc = _Acc()
        ar = m.arity
        for w, a in self.terms.items():
            if ar is not None and len(w) < offset + ar:
                raise SlotOutOfRange("map of arity %d at offset %d on a word of length %d" % (ar, offset, len(w)))
            if ar is None:
                head, mid, tail = w[:offset], w[offset:], ()
            else:
                head, mid, tail = w[:offset], w[offset:offset + ar], w[offset + ar:]
            for u, c in m.row(mid).items():
                acc.add(head + u + tail, a, c)
        return acc.form(self.frame)

    def sorted_terms(self) -> List[Tuple[Word, AlgebraElement]]:
        def key(kv):
            w = kv[0]
            return (len(w), tuple((x < 0, abs(x)) for x in w))
        return sorted(self.terms.items(), key=key)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, a in self.sorted_terms():
            body = str(a)
            if not w:
                parts.append(body)
                continue
            basis = "e(%s)" % self.frame.word_name(w)
            if body == "1":
                parts.append(basis)
            elif body == "-1":
                parts.append("-" + basis)
            elif len(a.terms) == 1 and " " not in body:
                parts.append("%s*%s" % (body, basis))
            else:
                parts.append("(%s)*%s" % (body, basis))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return "TensorForm(%s)" % self

    def to_json(self) -> Dict[str, str]:
        return {self.frame.word_name(w) if w else "1": str(a) for w, a in self.sorted_terms()}


# scalar word maps ----------------------------------------------------------------

Row = Dict[Word, Scalar]


class ScalarMap:
    """Lazy linear map on words with Scalar entries.

    ``arity`` is the word length the map consumes (None: whole word).  Rows are
    memoized per word.
    """

    __slots__ = ("arity", "_fn", "_cache", "name", "field")

    def __init__(self, arity: Optional[int], fn: Callable[[Word], Row], field, name: str = "map"):
        self.arity = arity
        self._fn = fn
        self._cache: Dict[Word, Row] = {}
        self.name = name
        self.field = field

    def row(self, word: Word) -> Row:
        r = self._cache.get(word)
        if r is None:
            if self.arity is not None and len(word) != self.arity:
                raise DegreeMismatch("%s expects words of length %d, got %d" % (self.name, self.arity, len(word)))
            r = self._cache[word] = {u: c for u, c in self._fn(word).items() if not c.is_zero()}
        return r

    def __call__(self, t: TensorForm, offset: int = 0) -> TensorForm:
        return t.apply(self, offset)

    @classmethod
    def identity(cls, field, arity: Optional[int] = None) -> "ScalarMap":
        one = field.one
        return cls(arity, lambda w: {w: one}, field, "id")

    @classmethod
    def from_table(cls, field, table: Mapping[Word, Mapping[Word, Scalar]], arity: int, name: str,
                   default_identity: bool = False) -> "ScalarMap":
        def fn(w):
            r = table.get(w)
            if r is None:
                if default_identity:
                    return {w: field.one}
                raise TensorError("%s undefined on word %s" % (name, w))
            return dict(r)
        return cls(arity, fn, field, name)

    def embed(self, offset: int, total: Optional[int] = None) -> "ScalarMap":
        """id^offset (x) self (x) id^rest, acting on words of length ``total``."""
        ar = self.arity
        if ar is None:
            raise TensorError("cannot embed a map without fixed arity")
        inner = self

        def fn(w):
            head, mid, tail = w[:offset], w[offset:offset + ar], w[offset + ar:]
            if len(mid) != ar:
                raise SlotOutOfRange("slot %d out of range for word length %d" % (offset + 1, len(w)))
            return {head + u + tail: c for u, c in inner.row(mid).items()}

        return ScalarMap(total, fn, self.field, "%s@%d" % (self.name, offset + 1))

    def compose(self, other: "ScalarMap") -> "ScalarMap":
        """self after other."""
        first, second = other, self

        def fn(w):
            acc: Row = {}
            for u, c in first.row(w).items():
                for v, d in second.row(u).items():
                    x = c * d
                    cur = acc.get(v)
                    acc[v] = x if cur is None else cur + x
            return acc

        arity = other.arity if other.arity is not None else self.arity
        return ScalarMap(arity, fn, self.field, "%s.%s" % (self.name, other.name))

    def __matmul__(self, other: "ScalarMap") -> "ScalarMap":
        return self.compose(other)

    def __add__(self, other: "ScalarMap") -> "ScalarMap":
        a, b = self, other

        def fn(w):
            acc = dict(a.row(w))
            for u, c in b.row(w).items():
                cur = acc.get(u)
                acc[u] = c if cur is None else cur + c
            return acc

        return ScalarMap(self.arity if self.arity is not None else other.arity, fn, self.field,
                         "(%s+%s)" % (a.name, b.name))

    def scale(self, c: Scalar) -> "ScalarMap":
        a = self
        return ScalarMap(self.arity, lambda w: {u: v * c for u, v in a.row(w).items()}, self.field,
                         "%s*%s" % (c, a.name))

    def __neg__(self):
        return self.scale(-self.field.one)

    def __sub__(self, other: "ScalarMap") -> "ScalarMap":
        return self + (-other)

    def tensor_right(self, k: int) -> "ScalarMap":
        """self (x) id^k, on words of length arity + k."""
        total = None if self.arity is None else self.arity + k
        inner = self
        ar = self.arity

        def fn(w):
            head, tail = w[:ar], w[ar:]
            return {u + tail: c for u, c in inner.row(head).items()}

        return ScalarMap(total, fn, self.field, "%s(x)id^%d" % (self.name, k))

    def tensor_left(self, k: int) -> "ScalarMap":
        """id^k (x) self."""
        total = None if self.arity is None else self.arity + k
        inner = self

        def fn(w):
            head, tail = w[:k], w[k:]
            return {head + u: c for u, c in inner.row(tail).items()}

        return ScalarMap(total, fn, self.field, "id^%d(x)%s" % (k, self.name))

    def rows_on(self, words: Iterable[Word]) -> Dict[Word, Row]:
        return {w: self.row(w) for w in words}

    def column_rows(self, words: Iterable[Word]) -> List[Dict[Word, Scalar]]:
        """Images of the given words, i.e. the columns of the matrix as sparse rows."""
        return [self.row(w) for w in words]

    def subs(self, bindings) -> "ScalarMap":
        inner = self
        return ScalarMap(self.arity, lambda w: {u: c.subs(bindings) for u, c in inner.row(w).items()},
                         self.field, self.name)


def maps_equal_on(a: ScalarMap, b: ScalarMap, words: Iterable[Word]) -> Tuple[bool, Optional[Word]]:
    """Compare two word maps on a domain; returns (equal, first differing word)."""
    for w in words:
        ra, rb = a.row(w), b.row(w)
        keys = set(ra) | set(rb)
        for u in keys:
            x = ra.get(u)
            y = rb.get(u)
            if x is None:
                if not y.is_zero():
                    return False, w
            elif y is None:
                if not x.is_zero():
                    return False, w
            elif x != y:
                return False, w
    return True, None


def difference_row(a: ScalarMap, b: ScalarMap, w: Word) -> Row:
    ra, rb = a.row(w), b.row(w)
    out = dict(ra)
    for u, c in rb.items():
        cur = out.get(u)
        out[u] = -c if cur is None else cur - c
    return {u: c for u, c in out.items() if not c.is_zero()}


# expressions -----------------------------------------------------------------------

_E_SIGN = re.compile(r"e\(\s*([+\-0]|[+\-0](?:\s*,\s*[+\-0])+)\s*\)")


def _quote_signs(text: str) -> str:
    def repl(m):
        parts = [p.strip() for p in m.group(1).split(",")]
        return "e(%s)" % ",".join('"%s"' % p for p in parts)
    return _E_SIGN.sub(repl, text)


class TensorEvaluator(AlgebraEvaluator):
    """Algebra syntax plus ``e(x, y, ...)`` basis words and tensor products via ``*``."""

    def __init__(self, frame: Frame, extra: Optional[Mapping[str, object]] = None):
        super().__init__(frame.alg, extra)
        self.frame = frame

    def call(self, func, args):
        if func == "e":
            word = []
            for node in args:
                if hasattr(node, "value") and isinstance(getattr(node, "value"), str):
                    word.append(self.frame.letter(node.value))
                elif hasattr(node, "id"):
                    word.append(self.frame.letter(node.id))
                elif hasattr(node, "value") and isinstance(node.value, int):
                    word.append(self.frame.letter(str(node.value)))
                else:
                    raise ScalarParseError("e() takes basis names")
            return TensorForm.basis(self.frame, tuple(word))
        return super().call(func, args)

    def eval(self, node):
        import ast
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub)):
            left = self.eval(node.left)
            right = self.eval(node.right)
            if isinstance(left, TensorForm) or isinstance(right, TensorForm):
                left = self._as_form(left)
                right = self._as_form(right)
            return left + right if isinstance(node.op, ast.Add) else left - right
        return super().eval(node)

    def _as_form(self, x):
        if isinstance(x, TensorForm):
            return x
        if isinstance(x, Scalar):
            x = self.frame.alg.scalar(x)
        return TensorForm.scalar(self.frame, x)


def parse_tensor(text: str, frame: Frame, extra: Optional[Mapping[str, object]] = None) -> TensorForm:
    ev = TensorEvaluator(frame, extra)
    value = ev.eval(parse_expression(_quote_signs(str(text))))
    return ev._as_form(value)
