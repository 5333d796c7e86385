"""Exact scalars: cyclotomic numbers extended by free parameters.

A :class:`Scalar` lives in a :class:`ScalarField` ``Q(zeta_N)(p_1, ..., p_m)``.
Parameter-free values are stored as coefficient vectors over the power basis
``1, zeta, ..., zeta^(phi(N)-1)`` (fast path).  Values involving parameters are
stored as ``num / den`` with ``num`` a polynomial in ``zeta`` and the parameters
(reduced mod the cyclotomic polynomial) and ``den`` a monic polynomial in the
parameters alone, with common factors cancelled.  Both forms are canonical, so
equality is structural and "identically zero" means a zero numerator.
"""

from __future__ import annotations

import ast
import math
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

from gmpy2 import mpq
from sympy import QQ, Symbol, cyclotomic_poly, Poly
from sympy.polys.orderings import grlex
from sympy.polys.rings import ring as poly_ring


class ScalarError(ValueError):
    pass


class DivisionByZero(ScalarError, ZeroDivisionError):
    pass


class PoleAtBinding(ScalarError):
    pass


class ScalarParseError(ScalarError):
    pass


_ZERO = mpq(0)
_ONE = mpq(1)


def _euler_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


class _CycloData:
    """Reduction tables for Q(zeta_N) in the power basis."""

    def __init__(self, order: int):
        self.order = order
        self.phi = _euler_phi(order)
        x = Symbol("x")
        coeffs = Poly(cyclotomic_poly(order, x), x).all_coeffs()[::-1]
        # zeta^phi = -sum_{k<phi} c_k zeta^k
        self.poly_coeffs = [mpq(int(c)) for c in coeffs]
        phi = self.phi
        powers = []
        vec = [_ZERO] * phi
        vec[0] = _ONE
        for _ in range(2 * order + 2):
            powers.append(tuple(vec))
            top = vec[-1]
            vec = [_ZERO] + vec[:-1]
            if top:
                for k in range(phi):
                    vec[k] -= top * self.poly_coeffs[k]
        # powers[k] = zeta^k for 0 <= k < order (periodic beyond)
        self.powers = powers[:order] if order > 1 else [tuple([_ONE])]
        self.units = [k for k in range(1, order + 1) if math.gcd(k, order) == 1 and k < order] or [1]

    def pow_vec(self, k: int) -> Tuple[mpq, ...]:
        return self.powers[k % self.order] if self.order > 1 else (_ONE,)

    def mul(self, a: Tuple[mpq, ...], b: Tuple[mpq, ...]) -> Tuple[mpq, ...]:
        phi = self.phi
        if phi == 1:
            return (a[0] * b[0],)
        if phi == 2:
            # zeta^2 = -c1 zeta - c0
            c0, c1 = self.poly_coeffs[0], self.poly_coeffs[1]
            a0, a1 = a
            b0, b1 = b
            t2 = a1 * b1
            return (a0 * b0 - c0 * t2, a0 * b1 + a1 * b0 - c1 * t2)
        prod = [_ZERO] * (2 * phi - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        out = list(prod[:phi])
        for k in range(phi, 2 * phi - 1):
            if prod[k]:
                v = self.powers[k]
                for m in range(phi):
                    out[m] += prod[k] * v[m]
        return tuple(out)

    def conjugate(self, a: Tuple[mpq, ...], k: int) -> Tuple[mpq, ...]:
        out = [_ZERO] * self.phi
        for j, x in enumerate(a):
            if x:
                v = self.pow_vec(j * k)
                for m in range(self.phi):
                    out[m] += x * v[m]
        return tuple(out)

    def inverse(self, a: Tuple[mpq, ...]) -> Tuple[mpq, ...]:
        if not any(a):
            raise DivisionByZero("division by zero in Q(zeta_%d)" % self.order)
        if self.phi == 1:
            return (_ONE / a[0],)
        conj = None
        for k in self.units:
            if k == 1:
                continue
            c = self.conjugate(a, k)
            conj = c if conj is None else self.mul(conj, c)
        norm = self.mul(a, conj)
        n = norm[0]
        return tuple(x / n for x in conj)


_CYCLO_CACHE: Dict[int, _CycloData] = {}


def _cyclo(order: int) -> _CycloData:
    data = _CYCLO_CACHE.get(order)
    if data is None:
        data = _CYCLO_CACHE[order] = _CycloData(order)
    return data


class Cyclotomic:
    """An element of Q(zeta_N) in the reduced power basis."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Sequence):
        data = _cyclo(order)
        vec = [mpq(c) for c in coeffs]
        if len(vec) > data.phi:
            # reduce higher powers
            out = [_ZERO] * data.phi
            for k, c in enumerate(vec):
                if c:
                    pv = data.pow_vec(k)
                    for m in range(data.phi):
                        out[m] += c * pv[m]
            vec = out
        vec += [_ZERO] * (data.phi - len(vec))
        self.order = order
        self.coeffs = tuple(vec)

    @classmethod
    def zeta(cls, order: int) -> "Cyclotomic":
        return cls(order, _cyclo(order).pow_vec(1))

    def _lift(self, other: "Cyclotomic") -> Tuple[int, Tuple, Tuple]:
        order = math.lcm(self.order, other.order)
        return order, _lift_vec(self.coeffs, self.order, order), _lift_vec(other.coeffs, other.order, order)

    def __add__(self, other):
        order, a, b = self._lift(_as_cyclo(other))
        return Cyclotomic(order, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_cyclo(other))

    def __rsub__(self, other):
        return _as_cyclo(other) - self

    def __mul__(self, other):
        order, a, b = self._lift(_as_cyclo(other))
        return Cyclotomic(order, _cyclo(order).mul(a, b))

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        return Cyclotomic(self.order, _cyclo(self.order).inverse(self.coeffs))

    def __truediv__(self, other):
        return self * _as_cyclo(other).inverse()

    def __rtruediv__(self, other):
        return _as_cyclo(other) * self.inverse()

    def __eq__(self, other):
        try:
            order, a, b = self._lift(_as_cyclo(other))
        except TypeError:
            return NotImplemented
        return a == b

    def __hash__(self):
        return hash(Scalar(ScalarField(self.order), self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __repr__(self):
        return "Cyclotomic(%d, %s)" % (self.order, [str(c) for c in self.coeffs])

    def __str__(self):
        return str(ScalarField(self.order).from_cyclotomic(self))


def _as_cyclo(x) -> Cyclotomic:
    if isinstance(x, Cyclotomic):
        return x
    if isinstance(x, (int, Fraction)) or type(x).__name__ == "mpq":
        return Cyclotomic(1, [mpq(x)])
    if isinstance(x, Scalar) and x._c is not None:
        return Cyclotomic(x.field.order, x._c)
    raise TypeError("cannot convert %r to Cyclotomic" % (x,))


def _lift_vec(vec: Tuple, order: int, target: int) -> Tuple:
    if order == target:
        return vec
    step = target // order
    data = _cyclo(target)
    out = [_ZERO] * data.phi
    for k, c in enumerate(vec):
        if c:
            pv = data.pow_vec(k * step)
            for m in range(data.phi):
                out[m] += c * pv[m]
    return tuple(out)


class ScalarField:
    """Q(zeta_N)(params) with a fixed grlex order over ``zeta, params``."""

    _cache: Dict[Tuple[int, Tuple[str, ...]], "ScalarField"] = {}

    def __new__(cls, order: int = 1, params: Iterable[str] = ()):
        params = tuple(params)
        key = (int(order), params)
        field = cls._cache.get(key)
        if field is not None:
            return field
        if order < 1:
            raise ScalarError("cyclotomic order must be positive")
        for p in params:
            if not p.isidentifier() or p in ("zeta", "i", "e"):
                raise ScalarError("invalid parameter name %r" % p)
        if len(set(params)) != len(params):
            raise ScalarError("duplicate parameter names")
        field = super().__new__(cls)
        field.order = int(order)
        field.params = params
        field.cyclo = _cyclo(field.order)
        field.phi = field.cyclo.phi
        R, *gens = poly_ring(("zeta",) + params, QQ, grlex)
        field.ring = R
        field._zeta_gen = gens[0]
        field._param_gens = dict(zip(params, gens[1:]))
        phi_poly = R.zero
        for k, c in enumerate(field.cyclo.poly_coeffs):
            if c:
                phi_poly += R(c) * gens[0] ** k
        field._phi_poly = phi_poly
        field.zero = Scalar(field, (_ZERO,) * field.phi)
        field.one = Scalar(field, (_ONE,) + (_ZERO,) * (field.phi - 1))
        cls._cache[key] = field
        return field

    def __reduce__(self):
        return (ScalarField, (self.order, self.params))

    def __repr__(self):
        return "ScalarField(%d, %r)" % (self.order, self.params)

    # constructors ---------------------------------------------------------
    def const(self, value) -> "Scalar":
        if isinstance(value, Scalar):
            return self.coerce(value)
        if isinstance(value, Cyclotomic):
            return self.from_cyclotomic(value)
        return Scalar(self, (mpq(value),) + (_ZERO,) * (self.phi - 1))

    def from_cyclotomic(self, c: Cyclotomic) -> "Scalar":
        order = math.lcm(self.order, c.order)
        field = self if order == self.order else ScalarField(order, self.params)
        return Scalar(field, _lift_vec(c.coeffs, c.order, order))

    def zeta(self) -> "Scalar":
        return Scalar(self, self.cyclo.pow_vec(1))

    def param(self, name: str) -> "Scalar":
        if name not in self._param_gens:
            raise ScalarError("unknown parameter %r" % name)
        return Scalar._make(self, self._param_gens[name], self.ring.one)

    def coerce(self, x) -> "Scalar":
        if isinstance(x, Scalar):
            if x.field is self:
                return x
            target = unify_fields(self, x.field)
            if target is not self:
                raise ScalarError("scalar from %r does not embed in %r" % (x.field, self))
            return x._convert(self)
        return self.const(x)

    def extend(self, order: int = 1, params: Iterable[str] = ()) -> "ScalarField":
        new_params = list(self.params) + [p for p in params if p not in self.params]
        return ScalarField(math.lcm(self.order, order), new_params)

    def parse(self, text: str) -> "Scalar":
        return parse_scalar(text, self)

    # polynomial helpers -----------------------------------------------------
    def _has_zeta(self, p) -> bool:
        return any(m[0] for m in p.itermonoms())

    def _reduce(self, p):
        if self.phi == 1:
            if self.order == 1:
                return p.compose(self._zeta_gen, self.ring.one) if self._has_zeta(p) else p
            return p.compose(self._zeta_gen, -self.ring.one) if self._has_zeta(p) else p
        if any(m[0] >= self.phi for m in p.itermonoms()):
            return p.rem(self._phi_poly)
        return p

    def _galois(self, p, k: int):
        R = self.ring
        out = {}
        for monom, coeff in p.iterterms():
            m = (monom[0] * k,) + monom[1:]
            out[m] = out.get(m, 0) + coeff
        return self._reduce(R.from_dict(out))

    def _cyc_to_poly(self, c: Tuple) -> object:
        R = self.ring
        out = {}
        for k, x in enumerate(c):
            if x:
                out[(k,) + (0,) * len(self.params)] = QQ(int(x.numerator), int(x.denominator))
        return R.from_dict(out) if out else R.zero


def unify_fields(a: ScalarField, b: ScalarField) -> ScalarField:
    if a is b:
        return a
    return a.extend(b.order, b.params)


Number = Union[int, Fraction, "Scalar"]


class Scalar:
    """Immutable exact scalar in a :class:`ScalarField`."""

    __slots__ = ("field", "_c", "_n", "_d")

    def __init__(self, field: ScalarField, coeffs: Tuple):
        self.field = field
        self._c = coeffs
        self._n = None
        self._d = None

    @classmethod
    def _make(cls, field: ScalarField, num, den) -> "Scalar":
        R = field.ring
        if not num:
            return field.zero
        if field._has_zeta(den):
            conj = R.one
            for k in field.cyclo.units:
                if k != 1:
                    conj = field._reduce(conj * field._galois(den, k))
            num = num * conj
            den = field._reduce(den * conj)
            if field._has_zeta(den):
                raise ScalarError("failed to rationalise denominator")
        num = field._reduce(num)
        if not num:
            return field.zero
        if den.is_ground:
            lc = den.LC
            if lc != 1:
                num = num.quo_ground(lc)
            den = R.one
        else:
            g, num, den = num.cofactors(den)
            lc = den.LC
            if lc != 1:
                num = num.quo_ground(lc)
                den = den.quo_ground(lc)
        if den == R.one and all(not any(m[1:]) for m in num.itermonoms()):
            vec = [_ZERO] * field.phi
            for monom, coeff in num.iterterms():
                vec[monom[0]] = mpq(int(coeff.numerator), int(coeff.denominator))
            return Scalar(field, tuple(vec))
        s = cls.__new__(cls)
        s.field = field
        s._c = None
        s._n = num
        s._d = den
        return s

    # inspection -----------------------------------------------------------
    def is_zero(self) -> bool:
        if self._c is not None:
            return not any(self._c)
        return False

    def __bool__(self):
        return not self.is_zero()

    def is_constant(self) -> bool:
        return self._c is not None

    def is_rational(self) -> bool:
        return self._c is not None and not any(self._c[1:])

    def as_cyclotomic(self) -> Cyclotomic:
        if self._c is None:
            raise ScalarError("scalar depends on parameters: %s" % self)
        return Cyclotomic(self.field.order, self._c)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ScalarError("scalar is not rational: %s" % self)
        x = self._c[0]
        return Fraction(int(x.numerator), int(x.denominator))

    def parameters(self) -> Tuple[str, ...]:
        if self._c is not None:
            return ()
        used = set()
        for p in (self._n, self._d):
            for m in p.itermonoms():
                for name, e in zip(self.field.params, m[1:]):
                    if e:
                        used.add(name)
        return tuple(p for p in self.field.params if p in used)

    def numerator_poly(self):
        """Numerator as a sympy ring element (zeta reduced)."""
        if self._c is not None:
            return self.field._cyc_to_poly(self._c)
        return self._n

    def denominator_poly(self):
        if self._c is not None:
            return self.field.ring.one
        return self._d

    # conversion -------------------------------------------------------------
    def _poly_pair(self):
        if self._c is not None:
            return self.field._cyc_to_poly(self._c), self.field.ring.one
        return self._n, self._d

    def _convert(self, target: ScalarField) -> "Scalar":
        if target is self.field:
            return self
        if self._c is not None:
            return Scalar(target, _lift_vec(self._c, self.field.order, target.order))
        step = target.order // self.field.order
        index = [target.params.index(p) for p in self.field.params]

        def move(p):
            out = {}
            width = len(target.params)
            for monom, coeff in p.iterterms():
                m = [0] * (width + 1)
                m[0] = monom[0] * step
                for j, e in zip(index, monom[1:]):
                    m[j + 1] = e
                m = tuple(m)
                out[m] = out.get(m, 0) + coeff
            return target.ring.from_dict(out)

        return Scalar._make(target, move(self._n), move(self._d))

    def _pair(self, other) -> Tuple["Scalar", "Scalar"]:
        if isinstance(other, Scalar):
            if other.field is self.field:
                return self, other
            f = unify_fields(self.field, other.field)
            return self._convert(f), other._convert(f)
        if isinstance(other, Cyclotomic):
            other = self.field.from_cyclotomic(other)
            return self._pair(other)
        if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq":
            return self, self.field.const(other)
        raise TypeError

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        try:
            a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        if a._c is not None and b._c is not None:
            return Scalar(a.field, tuple(x + y for x, y in zip(a._c, b._c)))
        n1, d1 = a._poly_pair()
        n2, d2 = b._poly_pair()
        if d1 == d2:
            return Scalar._make(a.field, n1 + n2, d1)
        return Scalar._make(a.field, n1 * d2 + n2 * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        if self._c is not None:
            return Scalar(self.field, tuple(-x for x in self._c))
        s = Scalar.__new__(Scalar)
        s.field, s._c, s._n, s._d = self.field, None, -self._n, self._d
        return s

    def __sub__(self, other):
        try:
            a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        try:
            a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        return b + (-a)

    def __mul__(self, other):
        try:
            a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        f = a.field
        if a._c is not None and b._c is not None:
            return Scalar(f, f.cyclo.mul(a._c, b._c))
        if a._c is not None:
            a, b = b, a
        if b._c is not None:
            if not any(b._c):
                return f.zero
            if not any(b._c[1:]):
                c = b._c[0]
                if c == 1:
                    return a
                s = Scalar.__new__(Scalar)
                s.field, s._c, s._d = f, None, a._d
                s._n = a._n.mul_ground(QQ(int(c.numerator), int(c.denominator)))
                return s
            return Scalar._make(f, a._n * f._cyc_to_poly(b._c), a._d)
        return Scalar._make(f, a._n * b._n, a._d * b._d)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        f = self.field
        if self._c is not None:
            return Scalar(f, f.cyclo.inverse(self._c))
        return Scalar._make(f, self._d, self._n)

    def __truediv__(self, other):
        try:
            a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        if b.is_zero():
            raise DivisionByZero("division by zero scalar")
        return a * b.inverse()

    def __rtruediv__(self, other):
        try:
            a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        if a.is_zero():
            raise DivisionByZero("division by zero scalar")
        return b * a.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        try:
            a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        if a._c is not None or b._c is not None:
            return a._c == b._c
        return a._n == b._n and a._d == b._d

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        # consistent for values in the same field; rationals hash as Fractions
        if self._c is not None:
            if not any(self._c[1:]):
                return hash(Fraction(int(self._c[0].numerator), int(self._c[0].denominator)))
            return hash((self.field.order, self._c))
        return hash((self.field.order, self.field.params, str(self._n), str(self._d)))

    # evaluation ---------------------------------------------------------------
    def subs(self, bindings: Mapping[str, object]) -> "Scalar":
        """Substitute parameters; unbound ones stay symbolic.

        Bindings map parameter names to numbers, Cyclotomic values or Scalars.
        """
        if self._c is not None or not bindings:
            return self
        remaining = [p for p in self.field.params if p not in bindings]
        values = {}
        target = ScalarField(self.field.order, remaining)
        for name, v in bindings.items():
            if name not in self.field.params:
                continue
            if isinstance(v, Scalar):
                target = unify_fields(target, v.field)
            elif isinstance(v, Cyclotomic):
                target = target.extend(v.order)
            values[name] = v
        for name, v in values.items():
            values[name] = target.coerce(v) if isinstance(v, Scalar) else target.const(v)
        for name in remaining:
            values[name] = target.param(name)
        zeta = target.from_cyclotomic(Cyclotomic.zeta(self.field.order))

        def ev(p) -> Scalar:
            total = target.zero
            cache: Dict[Tuple[str, int], Scalar] = {}
            for monom, coeff in p.iterterms():
                term = target.const(Fraction(int(coeff.numerator), int(coeff.denominator)))
                if monom[0]:
                    term = term * zeta ** monom[0]
                for name, e in zip(self.field.params, monom[1:]):
                    if e:
                        key = (name, e)
                        if key not in cache:
                            cache[key] = values[name] ** e
                        term = term * cache[key]
                total = total + term
            return total

        num = ev(self._n)
        den = ev(self._d)
        if den.is_zero():
            raise PoleAtBinding("denominator %s vanishes at %s" % (self._d.as_expr(), dict(bindings)))
        return num / den

    # printing -------------------------------------------------------------
    def __repr__(self):
        return "Scalar(%s)" % self

    def __str__(self):
        if self._c is not None:
            return _format_cyclo(self._c, self.field.order)
        num = _format_poly(self._n, self.field)
        if self._d == self.field.ring.one:
            return num
        den = _format_poly(self._d, self.field)
        if " " in num:
            num = "(%s)" % num
        if " " in den or "*" in den:
            den = "(%s)" % den
        return "%s/%s" % (num, den)


def _format_rational(x: mpq) -> str:
    if x.denominator == 1:
        return str(int(x.numerator))
    return "%d/%d" % (int(x.numerator), int(x.denominator))


def _zeta_name(order: int) -> str:
    return "i" if order == 4 else "zeta(%d)" % order


def _format_terms(terms: Sequence[Tuple[object, str]]) -> str:
    if not terms:
        return "0"
    out = []
    for coeff, mono in terms:
        neg = coeff < 0
        mag = -coeff if neg else coeff
        if mono:
            body = mono if mag == 1 else "%s*%s" % (_format_rational(mpq(mag)), mono)
        else:
            body = _format_rational(mpq(mag))
        if not out:
            out.append("-" + body if neg else body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)


def _format_cyclo(c: Tuple, order: int) -> str:
    terms = []
    z = _zeta_name(order)
    for k in range(len(c) - 1, -1, -1):
        if c[k]:
            mono = "" if k == 0 else (z if k == 1 else "%s^%d" % (z, k))
            terms.append((c[k], mono))
    return _format_terms(terms)


def _format_poly(p, field: ScalarField) -> str:
    terms = []
    names = [_zeta_name(field.order)] + list(field.params)
    for monom, coeff in p.terms():
        parts = []
        for name, e in zip(names, monom):
            if e == 1:
                parts.append(name)
            elif e:
                parts.append("%s^%d" % (name, e))
        terms.append((mpq(int(coeff.numerator), int(coeff.denominator)), "*".join(parts)))
    return _format_terms(terms)


# parsing -----------------------------------------------------------------------

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def parse_expression(text: str) -> ast.AST:
    """Parse the shared expression syntax (``^`` for powers) into a Python AST."""
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ScalarParseError("cannot parse %r: %s" % (text, exc.msg)) from None
    return tree.body


class ScalarEvaluator:
    """Evaluates expression ASTs to Scalars; subclasses extend the name space."""

    def __init__(self, field: ScalarField, names: Optional[Mapping[str, object]] = None):
        self.field = field
        self.names = dict(names or {})

    def name(self, ident: str):
        if ident in self.names:
            return self.names[ident]
        if ident == "i":
            return self.field.from_cyclotomic(Cyclotomic.zeta(4))
        if ident in self.field.params:
            return self.field.param(ident)
        raise ScalarParseError("unknown name %r" % ident)

    def call(self, func: str, args: Sequence[ast.AST]):
        if func == "zeta" and len(args) == 1:
            n = self.eval(args[0])
            if not isinstance(n, Scalar) or not n.is_rational() or n.as_fraction().denominator != 1:
                raise ScalarParseError("zeta() needs a positive integer order")
            order = int(n.as_fraction())
            if order < 1:
                raise ScalarParseError("zeta() needs a positive integer order")
            return self.field.from_cyclotomic(Cyclotomic.zeta(order))
        raise ScalarParseError("unknown function %s()" % func)

    def power(self, base, exponent: int):
        if isinstance(base, Scalar):
            return base ** exponent
        if exponent < 0:
            raise ScalarParseError("negative power of a non-invertible value")
        result = None
        for _ in range(exponent):
            result = base if result is None else result * base
        if result is None:
            return self.field.one
        return result

    def eval(self, node: ast.AST):
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                raise ScalarParseError("only integer literals are allowed, got %r" % (node.value,))
            return self.field.const(node.value)
        if isinstance(node, ast.Name):
            return self.name(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = self.eval(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
            if isinstance(node.op, ast.Pow):
                exp = self.eval(node.right)
                if not isinstance(exp, Scalar) or not exp.is_rational() or exp.as_fraction().denominator != 1:
                    raise ScalarParseError("exponents must be integers")
                return self.power(self.eval(node.left), int(exp.as_fraction()))
            left = self.eval(node.left)
            right = self.eval(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if not isinstance(right, Scalar):
                raise ScalarParseError("division only by scalars")
            try:
                return left * right.inverse() if not isinstance(left, Scalar) else left / right
            except ZeroDivisionError:
                raise DivisionByZero("division by zero in expression") from None
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
            return self.call(node.func.id, node.args)
        raise ScalarParseError("unsupported syntax: %s" % ast.dump(node)[:60])


def parse_scalar(text: str, field: Optional[ScalarField] = None,
                 names: Optional[Mapping[str, object]] = None) -> Scalar:
    field = field or ScalarField(1)
    value = ScalarEvaluator(field, names).eval(parse_expression(str(text)))
    if not isinstance(value, Scalar):
        raise ScalarParseError("%r is not a scalar expression" % text)
    return value
