"""Residual systems of the condition battery and their scans over parameters.

Residuals are the Scalar coefficients left over by a check; a target holds
identically iff every residual is the zero rational function.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import sympy

from .connection import Connection
from .scalars import Scalar
from .tensors import TensorForm

SCAN_TARGETS = ("ybe", "flat", "torsion")


def _form_scalars(t: TensorForm) -> List[Scalar]:
    out = []
    for a in t.terms.values():
        out.extend(c for c in a.terms.values() if not c.is_zero())
    return out


def residuals(conn: Connection, target: str) -> List[Scalar]:
    """All nonzero residual coefficients of one target on basis words."""
    if target == "ybe":
        return [c for c in conn.braid.ybe_residuals() if not c.is_zero()]
    if target == "flat":
        out = []
        for x in conn.letters:
            out.extend(_form_scalars(conn.curvature_word((x,))))
        return out
    if target == "torsion":
        out = []
        for t in conn.torsion().values():
            out.extend(_form_scalars(t))
        for w in conn.braid.words(2):
            e = conn.e(w)
            out.extend(_form_scalars(conn.wedge(e + conn.sig(e))))
        return out
    raise ValueError("unknown scan target %r" % target)


def to_sympy(c: Scalar) -> sympy.Expr:
    """Numerator over denominator as a sympy expression (zeta written as a symbol)."""
    num = c.numerator_poly().as_expr()
    den = c.denominator_poly().as_expr()
    return sympy.together(num / den)


def numerators(scalars: Sequence[Scalar]) -> List[sympy.Expr]:
    out = []
    for c in scalars:
        n = c.numerator_poly().as_expr()
        if n != 0:
            out.append(sympy.expand(n))
    return out


def eliminate_to(polys: Sequence[sympy.Expr], keep: str, others: Sequence[str]) -> sympy.Poly:
    """Generator of the elimination ideal in the ``keep`` variable, with factors of keep removed."""
    ks = sympy.Symbol(keep)
    gens = [sympy.Symbol(o) for o in others] + [ks]
    if not polys:
        return sympy.Poly(0, ks)
    gb = sympy.groebner(list(polys), *gens, order="lex")
    uni = [g for g in gb.exprs if g.free_symbols <= {ks}]
    if not uni:
        return sympy.Poly(0, ks)
    p = uni[0]
    for g in uni[1:]:
        p = sympy.gcd(p, g)
    p = sympy.Poly(p, ks)
    while p.degree() > 0 and p.eval(0) == 0:
        p = sympy.Poly(sympy.quo(p.as_expr(), ks), ks)
    return p


def sample_points(params: Sequence[str], n: int, seed: int, lo: int = -9, hi: int = 9,
                  exclude: Sequence[Fraction] = (0,)) -> List[Dict[str, Fraction]]:
    rng = random.Random(seed)
    pts = []
    while len(pts) < n:
        pt = {}
        for p in params:
            while True:
                x = Fraction(rng.randint(lo, hi), rng.randint(1, 5))
                if x not in exclude:
                    break
            pt[p] = x
        pts.append(pt)
    return pts


def evaluate(scalars: Sequence[Scalar], point: Mapping[str, Fraction]) -> List[Scalar]:
    out = []
    for c in scalars:
        v = c.subs(dict(point))
        if not v.is_zero():
            out.append(v)
    return out


def scan(conn: Connection, target: str, points: Optional[Sequence[Mapping[str, Fraction]]] = None) -> Dict[str, object]:
    """Identically-zero test, or evaluation of the residuals at each grid point."""
    res = residuals(conn, target)
    report: Dict[str, object] = {"target": target, "identically_zero": not res, "residual_count": len(res)}
    if points is not None:
        rows = []
        for pt in points:
            left = evaluate(res, pt)
            rows.append({"point": {k: str(v) for k, v in pt.items()}, "zero": not left,
                         "nonzero_residuals": len(left)})
        report["points"] = rows
    return report
