"""Braided integers, binomials and factorials built from a Scalar braiding.

All operators are lazy :class:`ScalarMap` objects memoized per word.  A
product ``A B`` of operators means "apply B first".
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .linalg import kernel, rank
from .scalars import Cyclotomic, Scalar, ScalarField
from .tensors import ScalarMap, Word, difference_row, maps_equal_on


class BraidError(ValueError):
    pass


class IndexOutOfRange(BraidError):
    pass


class NonSplitCharPoly(BraidError):
    pass


@dataclass
class CheckResult:
    name: str
    ok: bool
    witness: Optional[str] = None

    def as_dict(self) -> Dict[str, object]:
        return {"name": self.name, "status": "pass" if self.ok else "fail", "witness": self.witness}


def format_row(row: Mapping[Word, Scalar], names: Mapping[int, str]) -> str:
    if not row:
        return "0"
    parts = []
    for w in sorted(row, key=lambda w: tuple((x < 0, abs(x)) for x in w)):
        parts.append("(%s)*e(%s)" % (row[w], ",".join(names[x] for x in w)))
    return " + ".join(parts)


class BraidOperator:
    """sigma on pairs of letters, with its embedded copies sigma_i."""

    def __init__(self, field: ScalarField, letters: Sequence[int], sigma: ScalarMap,
                 names: Optional[Mapping[int, str]] = None):
        self.field = field
        self.letters = list(letters)
        self.sigma = sigma
        self.names = dict(names or {x: str(x) for x in letters})
        self._chain: Dict[Tuple[int, int], ScalarMap] = {}
        self._s: Dict[int, ScalarMap] = {}

    @classmethod
    def from_table(cls, field: ScalarField, letters: Sequence[int],
                   table: Mapping[Word, Mapping[Word, Scalar]], names=None) -> "BraidOperator":
        return cls(field, letters, ScalarMap.from_table(field, table, 2, "sigma"), names)

    def words(self, k: int) -> List[Word]:
        import itertools
        return [tuple(w) for w in itertools.product(self.letters, repeat=k)]

    def s(self, i: int) -> ScalarMap:
        """sigma_i acting on slots (i, i+1), 1-based, on words of any length."""
        m = self._s.get(i)
        if m is None:
            m = self._s[i] = self.sigma.embed(i - 1)
        return m

    def chain(self, a: int, b: int) -> ScalarMap:
        """sigma_a sigma_{a+1} ... sigma_b (sigma_b applied first); identity if a > b."""
        key = (a, b)
        m = self._chain.get(key)
        if m is None:
            if a > b:
                m = ScalarMap.identity(self.field)
            else:
                m = self.s(a)
                for i in range(a + 1, b + 1):
                    m = m.compose(self.s(i))
                m.name = "s%d..s%d" % (a, b)
            self._chain[key] = m
        return m

    def rchain(self, a: int, b: int) -> ScalarMap:
        """sigma_a sigma_{a-1} ... sigma_b for a >= b (sigma_b applied first)."""
        if a < b:
            return ScalarMap.identity(self.field)
        m = self.s(a)
        for i in range(a - 1, b - 1, -1):
            m = m.compose(self.s(i))
        return m

    # binomials ---------------------------------------------------------------
    @functools.lru_cache(maxsize=None)
    def binomial(self, n: int, k: int) -> ScalarMap:
        if n < 0 or k < 0 or k > n:
            raise IndexOutOfRange("binomial [%d, %d] out of range" % (n, k))
        if k == 0 or k == n:
            return ScalarMap.identity(self.field, n)
        first = self.binomial(n - 1, k - 1).tensor_left(1).compose(self.chain(1, n - k))
        second = self.binomial(n - 1, k).tensor_left(1)
        m = first + second
        m.arity = n
        m.name = "[%d|%d]" % (n, k)
        return m

    def integer(self, n: int) -> ScalarMap:
        return self.binomial(n, 1)

    def cointeger(self, n: int) -> ScalarMap:
        return self.binomial(n, n - 1)

    @functools.lru_cache(maxsize=None)
    def factorial(self, n: int) -> ScalarMap:
        if n < 1:
            raise IndexOutOfRange("factorial needs n >= 1")
        if n == 1:
            return ScalarMap.identity(self.field, 1)
        m = self.integer(n).compose(self.factorial(n - 1).tensor_right(1))
        m.arity = n
        m.name = "[%d]!" % n
        return m

    def integer_expanded(self, n: int) -> ScalarMap:
        """id + sigma_{n-1} + sigma_{n-2} sigma_{n-1} + ... + sigma_1 ... sigma_{n-1}."""
        m = ScalarMap.identity(self.field, n)
        for a in range(n - 1, 0, -1):
            m = m + self.chain(a, n - 1)
        m.arity = n
        return m

    def cointeger_expanded(self, n: int) -> ScalarMap:
        """id + sigma_1 + sigma_2 sigma_1 + ... + sigma_{n-1} ... sigma_1."""
        m = ScalarMap.identity(self.field, n)
        for a in range(1, n):
            m = m + self.rchain(a, 1)
        m.arity = n
        return m

    # checks ---------------------------------------------------------------------
    def _compare(self, name: str, a: ScalarMap, b: ScalarMap, words: Sequence[Word]) -> CheckResult:
        ok, w = maps_equal_on(a, b, words)
        if ok:
            return CheckResult(name, True)
        diff = difference_row(a, b, w)
        return CheckResult(name, False, "on e(%s): residual %s" % (
            ",".join(self.names[x] for x in w), format_row(diff, self.names)))

    def check_ybe(self, first_letters: Optional[Sequence[int]] = None) -> CheckResult:
        import itertools
        firsts = self.letters if first_letters is None else list(first_letters)
        words = [(x,) + tuple(r) for x in firsts for r in itertools.product(self.letters, repeat=2)]
        lhs = self.s(1).compose(self.s(2)).compose(self.s(1))
        rhs = self.s(2).compose(self.s(1)).compose(self.s(2))
        return self._compare("ybe", lhs, rhs, words)

    def ybe_residuals(self) -> List[Scalar]:
        lhs = self.s(1).compose(self.s(2)).compose(self.s(1))
        rhs = self.s(2).compose(self.s(1)).compose(self.s(2))
        out = []
        for w in self.words(3):
            out.extend(difference_row(lhs, rhs, w).values())
        return out

    def check_binomial_expansions(self, n: int) -> CheckResult:
        words = self.words(n)
        r = self._compare("integer_expansion_%d" % n, self.integer(n), self.integer_expanded(n), words)
        if not r.ok or n < 2:
            return r
        return self._compare("cointeger_expansion_%d" % n, self.cointeger(n), self.cointeger_expanded(n), words)

    def check_composition(self, n: int, k: int, m: int) -> CheckResult:
        """[n|k](id^{n-k} (x) [k|m]) = [n|m]([n-m|k-m] (x) id^m)."""
        lhs = self.binomial(n, k).compose(self.binomial(k, m).tensor_left(n - k))
        rhs = self.binomial(n, m).compose(self.binomial(n - m, k - m).tensor_right(m))
        return self._compare("composition_%d_%d_%d" % (n, k, m), lhs, rhs, self.words(n))

    def check_through_crossing(self, n: int, k: int, m: int) -> CheckResult:
        """sigma_1..sigma_{n-m}([n-m|k-m] (x) id^m) = (id (x) [n-m|k-m] (x) id^{m-1}) sigma_1..sigma_{n-m}."""
        b = self.binomial(n - m, k - m)
        lhs = self.chain(1, n - m).compose(b.tensor_right(m))
        rhs = b.tensor_left(1).tensor_right(m - 1).compose(self.chain(1, n - m))
        return self._compare("through_crossing_%d_%d_%d" % (n, k, m), lhs, rhs, self.words(n))

    # ranks and kernels -------------------------------------------------------------
    def image_rank(self, m: ScalarMap, k: int) -> int:
        return rank(m.row(w) for w in self.words(k))

    def kernel_of(self, m: ScalarMap, k: int) -> List[Dict[Word, Scalar]]:
        words = self.words(k)
        eqs: Dict[Word, Dict[Word, Scalar]] = {}
        for w in words:
            for u, c in m.row(w).items():
                eqs.setdefault(u, {})[w] = c
        return kernel(eqs.values(), words)

    def sym_rank_and_kernel(self, k: int) -> Tuple[int, List[Dict[Word, Scalar]]]:
        f = self.factorial(k)
        return self.image_rank(f, k), self.kernel_of(f, k)

    # eigenvalues ---------------------------------------------------------------------
    def matrix(self, k: int = 2) -> Tuple[List[Word], List[List[Scalar]]]:
        words = self.words(k)
        idx = {w: j for j, w in enumerate(words)}
        zero = self.field.zero
        mat = [[zero] * len(words) for _ in words]
        m = self.sigma if k == 2 else None
        for j, w in enumerate(words):
            for u, c in m.row(w).items():
                mat[idx[u]][j] = c
        return words, mat

    def char_poly(self) -> List[Scalar]:
        _, mat = self.matrix(2)
        return characteristic_polynomial(mat, self.field)

    def eigen_structure(self) -> List[Tuple[Scalar, int]]:
        poly = self.char_poly()
        return split_roots(poly, self.field)


def characteristic_polynomial(mat: List[List[Scalar]], field: ScalarField) -> List[Scalar]:
    """Coefficients of det(x I - M), highest degree first (Faddeev-LeVerrier)."""
    n = len(mat)
    zero, one = field.zero, field.one

    def matmul(a, b):
        out = [[zero] * n for _ in range(n)]
        for i in range(n):
            ai = a[i]
            for k in range(n):
                x = ai[k]
                if x.is_zero():
                    continue
                bk = b[k]
                row = out[i]
                for j in range(n):
                    y = bk[j]
                    if not y.is_zero():
                        row[j] = row[j] + x * y
        return out

    coeffs = [one]
    mk = [[zero] * n for _ in range(n)]
    c_prev = one
    for k in range(1, n + 1):
        mk = matmul(mat, mk)
        for i in range(n):
            mk[i][i] = mk[i][i] + c_prev
        am = matmul(mat, mk)
        tr = zero
        for i in range(n):
            tr = tr + am[i][i]
        c = -tr / k
        coeffs.append(c)
        c_prev = c
    return coeffs


def _poly_eval(poly: Sequence[Scalar], r: Scalar) -> Scalar:
    acc = r.field.zero if hasattr(r, "field") else 0
    for c in poly:
        acc = acc * r + c
    return acc


def _deflate(poly: List[Scalar], r: Scalar) -> Tuple[List[Scalar], Scalar]:
    out = []
    acc = None
    for c in poly:
        acc = c if acc is None else acc * r + c
        out.append(acc)
    return out[:-1], out[-1]


def split_roots(poly: List[Scalar], field: ScalarField) -> List[Tuple[Scalar, int]]:
    """Roots among 0 and the roots of unity of order dividing lcm(2, N)."""
    order = math.lcm(2, field.order)
    candidates = [field.zero] + [field.from_cyclotomic(Cyclotomic.zeta(order)) ** j for j in range(order)]
    result: List[Tuple[Scalar, int]] = []
    poly = list(poly)
    for r in candidates:
        mult = 0
        while len(poly) > 1:
            q, rem = _deflate(poly, r)
            if not rem.is_zero():
                break
            poly = q
            mult += 1
        if mult:
            result.append((r, mult))
    if len(poly) > 1:
        raise NonSplitCharPoly("characteristic polynomial has a factor without root-of-unity roots: %s" %
                               " ".join("(%s)" % c for c in poly))
    return result
