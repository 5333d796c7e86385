"""Built-in geometries as declarative specs plus a loader for the JSON fixture format.

Every fixture is a plain dict of strings (the same format users write), built
by one loader.  Sections: ``scalars``, ``algebra``, ``calculus``,
``connection`` and optionally ``bundle``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import jsonschema

from .algebra import (Algebra, AlgebraElement, Endomorphism, RewriteAlgebra, StructureConstantAlgebra,
                      parse_algebra)
from .calculus import Calculus
from .connection import Connection, make_inner_connection, solve_braiding
from .scalars import Scalar, ScalarEvaluator, ScalarField, parse_expression
from .tensors import Frame, TensorForm, Word, parse_tensor

FORMAT_VERSION = 1


class FixtureError(ValueError):
    pass


_STR_MAP = {"type": "object", "additionalProperties": {"type": "string"}}
_EXPR = {"type": "string"}

# JSON schema of the fixture file format (version FORMAT_VERSION); semantic checks happen in the loader
FIXTURE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "qjet fixture",
    "type": "object",
    "required": ["algebra", "calculus", "connection"],
    "properties": {
        "format": {"const": FORMAT_VERSION},
        "name": {"type": "string"},
        "scalars": {
            "type": "object",
            "properties": {
                "order": {"type": "integer", "minimum": 1},
                "params": {"type": "array", "items": {"type": "string"}},
                "constants": _STR_MAP,
            },
            "additionalProperties": False,
        },
        "algebra": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["structure_constants", "rewrite"]},
                "name": {"type": "string"},
                "basis": {"type": "array", "items": {"type": "string"}},
                "table": {"type": "object", "additionalProperties": _STR_MAP},
                "unit": _STR_MAP,
                "generators": {"type": "array", "items": {"type": "string"}},
                "rules": _STR_MAP,
                "weights": {"type": "object", "additionalProperties": {"type": "integer"}},
                "inverses": _STR_MAP,
                "degree_bound": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "calculus": {
            "type": "object",
            "required": ["basis", "d"],
            "properties": {
                "basis": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "automorphisms": {"type": "object", "additionalProperties": _STR_MAP},
                "d": _STR_MAP,
                "relations": {"type": "array", "items": _EXPR},
                "dbasis": _STR_MAP,
                "theta": _EXPR,
            },
            "additionalProperties": False,
        },
        "connection": {
            "type": "object",
            "required": ["sigma"],
            "properties": {
                "gamma": _STR_MAP,
                "sigma": {"oneOf": [_STR_MAP, {"const": "solve"}]},
                "inner": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "bundle": {
            "type": "object",
            "required": ["basis"],
            "properties": {
                "name": {"type": "string"},
                "basis": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "automorphisms": {"type": "object", "additionalProperties": _STR_MAP},
                "gamma": _STR_MAP,
                "sigma": _STR_MAP,
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


class ParameterDomain(FixtureError):
    pass


@dataclass
class Fixture:
    name: str
    spec: Dict[str, object]
    alg: Algebra
    calc: Calculus
    conn: Connection
    constants: Dict[str, Scalar]
    dataset: Dict[str, object] = field(default_factory=dict)
    bundle_spec: Optional[Dict[str, object]] = None

    @property
    def field(self) -> ScalarField:
        return self.alg.field

    @property
    def params(self) -> Tuple[str, ...]:
        return self.field.params

    def names(self) -> Dict[str, object]:
        out: Dict[str, object] = dict(self.constants)
        if self.calc.theta is not None:
            out["theta"] = self.calc.theta
        return out

    def form(self, text: str) -> TensorForm:
        return parse_tensor(text, self.calc.frame, self.names())

    def element(self, text: str) -> AlgebraElement:
        v = self.form(text)
        return v.as_algebra()

    def scalar(self, text: str) -> Scalar:
        ev = ScalarEvaluator(self.field, self.constants)
        return self.field.coerce(ev.eval(parse_expression(text)))


# loader -------------------------------------------------------------------------------

def _scalar_env(spec: Mapping[str, object]) -> Tuple[ScalarField, Dict[str, Scalar]]:
    field = ScalarField(int(spec.get("order", 1)), list(spec.get("params", [])))
    consts: Dict[str, Scalar] = {}
    for name, text in dict(spec.get("constants", {})).items():
        ev = ScalarEvaluator(field, consts)
        value = ev.eval(parse_expression(str(text)))
        if not isinstance(value, Scalar):
            raise FixtureError("constant %s is not a scalar" % name)
        if value.field is not field:
            field = value.field
            consts = {k: field.coerce(v) for k, v in consts.items()}
        consts[name] = field.coerce(value)
    return field, consts


def _word(key: str) -> Tuple[str, ...]:
    return tuple(p.strip() for p in key.split(",")) if key.strip() else ()


def _build_algebra(spec: Mapping[str, object], field: ScalarField, consts: Mapping[str, Scalar]) -> Algebra:
    kind = spec.get("kind")
    name = str(spec.get("name", "A"))
    ev = lambda text: field.coerce(ScalarEvaluator(field, consts).eval(parse_expression(str(text))))
    if kind == "structure_constants":
        basis = list(spec["basis"])
        table = {}
        for key, prod in dict(spec["table"]).items():
            x, y = _word(key)
            table[(x, y)] = {z: ev(c) for z, c in dict(prod).items()}
        unit = {b: ev(c) for b, c in dict(spec["unit"]).items()}
        alg = StructureConstantAlgebra(field, basis, table, unit, name)
    elif kind == "rewrite":
        gens = list(spec["generators"])
        inverses = dict(spec.get("inverses", {}))
        free = RewriteAlgebra(field, gens, {}, name=name + "_free", inverses=inverses)
        rules = {}
        for key, rhs in dict(spec["rules"]).items():
            lhs = _word(key.replace("*", ","))
            poly = _eval_in_free(free, consts, str(rhs))
            rules[lhs] = dict(poly.terms)
        alg = RewriteAlgebra(field, gens, rules, weights=spec.get("weights"),
                             degree_bound=int(spec.get("degree_bound", 24)), name=name, inverses=inverses)
    else:
        raise FixtureError("unknown algebra kind %r" % kind)
    for check, ok, witness in alg.validate():
        if not ok:
            raise FixtureError("algebra %s fails %s: %s" % (name, check, witness))
    return alg


def _eval_in_free(free: RewriteAlgebra, consts: Mapping[str, Scalar], text: str) -> AlgebraElement:
    from .algebra import AlgebraEvaluator, _lift
    ev = AlgebraEvaluator(free, consts)
    # inverse powers are not meaningful in the free algebra; rules spell inverses as generators
    return _lift(free, ev.eval(parse_expression(text)))


def _letter_frame(alg: Algebra, names: Sequence[str], autos_spec: Mapping[str, Mapping[str, str]],
                  consts: Mapping[str, Scalar], start: int = 0, step: int = 1) -> Tuple[Dict[int, Endomorphism], Dict[int, str]]:
    autos, nm = {}, {}
    for k, b in enumerate(names):
        letter = start + step * k
        images = dict(autos_spec.get(b, {}))
        if images:
            imgs = {g: _parse_alg(alg, consts, t) for g, t in images.items()}
            autos[letter] = Endomorphism(alg, imgs, "phi_%s" % b)
        else:
            autos[letter] = Endomorphism.identity_map(alg)
        nm[letter] = b
    return autos, nm


def _parse_alg(alg: Algebra, consts: Mapping[str, Scalar], text: str) -> AlgebraElement:
    from .algebra import AlgebraEvaluator, _lift
    ev = AlgebraEvaluator(alg, consts)
    v = _lift(alg, ev.eval(parse_expression(str(text))))
    if not isinstance(v, AlgebraElement):
        raise FixtureError("%r is not an algebra expression" % text)
    return v


def _scalar_table(frame: Frame, entries: Mapping[str, str], names: Mapping[str, object]) -> Dict[Word, Dict[Word, Scalar]]:
    alg = frame.alg
    table: Dict[Word, Dict[Word, Scalar]] = {}
    for key, text in entries.items():
        src = tuple(frame.letter(p) for p in _word(key))
        t = parse_tensor(str(text), frame, names)
        row = {}
        for w, a in t.terms.items():
            c = scalar_multiple_of_one(alg, a)
            if c is None:
                raise FixtureError("braiding entry %s has a non-scalar coefficient %s" % (key, a))
            row[w] = c
        table[src] = row
    return table


def scalar_multiple_of_one(alg: Algebra, a: AlgebraElement) -> Optional[Scalar]:
    one = alg.one
    if not a.terms:
        return alg.field.zero
    m, c1 = next(iter(one.terms.items()))
    c = a.terms.get(m)
    if c is None:
        return None
    c = c / c1
    return c if a == one.scale(c) else None


def load_spec(spec: Mapping[str, object], dataset: Optional[Dict[str, object]] = None,
              validate: bool = True) -> Fixture:
    """Build and validate a fixture from its JSON-able description."""
    try:
        jsonschema.validate(spec, FIXTURE_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "top level"
        raise FixtureError("fixture does not match the format: %s at %s" % (exc.message, where)) from exc
    try:
        return _load(spec, dataset or {}, validate)
    except FixtureError:
        raise
    except (KeyError, TypeError) as exc:
        raise FixtureError("malformed fixture: %s" % exc) from exc


def _load(spec: Mapping[str, object], dataset: Dict[str, object], validate: bool) -> Fixture:
    name = str(spec.get("name", "custom"))
    field, consts = _scalar_env(dict(spec.get("scalars", {})))
    alg = _build_algebra(dict(spec["algebra"]), field, consts)
    field = alg.field
    cs = dict(spec["calculus"])
    basis = list(cs["basis"])
    autos, nm = _letter_frame(alg, basis, dict(cs.get("automorphisms", {})), consts)
    frame = Frame(alg, autos, nm)
    names: Dict[str, object] = dict(consts)
    theta = None
    if cs.get("theta"):
        theta = parse_tensor(str(cs["theta"]), frame, names)
        names["theta"] = theta
    dgen = {g: parse_tensor(str(t), frame, names) for g, t in dict(cs["d"]).items()}
    relations = []
    for text in cs.get("relations", []):
        t = parse_tensor(str(text), frame, names)
        row = {}
        for w, a in t.terms.items():
            c = scalar_multiple_of_one(alg, a)
            if c is None:
                raise FixtureError("relation %s has non-central coefficients" % text)
            row[w] = c
        relations.append(row)
    dbasis = {b: parse_tensor(str(t), frame, names) for b, t in dict(cs.get("dbasis", {})).items()}
    calc = Calculus(alg, basis, {b: autos[k] for k, b in enumerate(basis)}, dgen, relations, dbasis, theta, frame)
    if validate:
        for check, ok, witness in calc.validate():
            if not ok:
                raise FixtureError("calculus of %s fails %s: %s" % (name, check, witness))

    con = dict(spec["connection"])
    gamma_spec = con.get("gamma")
    sigma_spec = con.get("sigma")
    gamma = None
    if gamma_spec is not None:
        gamma = {}
        for k, b in enumerate(basis):
            text = dict(gamma_spec).get(b, "0")
            gamma[k] = parse_tensor(str(text), frame, names)
    if sigma_spec == "solve":
        if gamma is None:
            raise FixtureError("sigma 'solve' needs an explicit gamma")
        table, _unique = solve_braiding(calc, gamma)
        if table is None:
            raise FixtureError("no braiding makes the connection a bimodule connection")
    else:
        table = _scalar_table(frame, dict(sigma_spec), names)
        for x in range(len(basis)):
            for y in range(len(basis)):
                table.setdefault((x, y), {})
    if gamma is None:
        conn = make_inner_connection(calc, table)
    else:
        conn = Connection(calc, gamma, table, inner=bool(con.get("inner", False)))
    if validate:
        for r in conn.check_structure():
            if not r.ok:
                raise FixtureError("connection of %s fails %s: %s" % (name, r.name, r.witness))
    return Fixture(name, dict(spec), alg, calc, conn, consts, dataset, spec.get("bundle"))


# shipped specs ------------------------------------------------------------------------

def _join(terms: Sequence[str]) -> str:
    return " + ".join(terms) if terms else "0"


def spec_grassmann_central(n: int = 2) -> Dict[str, object]:
    if n < 1:
        raise ParameterDomain("grassmann_central needs n >= 1")
    gens = ["x%d" % (i + 1) for i in range(n)]
    basis = ["dx%d" % (i + 1) for i in range(n)]
    rules = {"%s*%s" % (gens[j], gens[i]): "%s*%s" % (gens[i], gens[j]) for i in range(n) for j in range(i + 1, n)}
    relations = ["e(%s,%s)" % (b, b) for b in basis]
    relations += ["e(%s,%s) + e(%s,%s)" % (basis[i], basis[j], basis[j], basis[i])
                  for i in range(n) for j in range(i + 1, n)]
    sigma = {"%s,%s" % (x, y): "e(%s,%s)" % (y, x) for x in basis for y in basis}
    return {
        "format": FORMAT_VERSION,
        "name": "grassmann_central_%d" % n,
        "scalars": {"order": 1, "params": []},
        "algebra": {"kind": "rewrite", "name": "Q[x]", "generators": gens, "rules": rules},
        "calculus": {"basis": basis, "d": {g: "e(%s)" % b for g, b in zip(gens, basis)},
                     "relations": relations, "dbasis": {}},
        "connection": {"gamma": {b: "0" for b in basis}, "sigma": sigma},
    }


_M2_UNITS = ["E11", "E12", "E21", "E22"]


def spec_m2() -> Dict[str, object]:
    table = {}
    for x in _M2_UNITS:
        for y in _M2_UNITS:
            if x[2] == y[1]:
                table["%s,%s" % (x, y)] = {"E%s%s" % (x[1], y[2]): "1"}
    d = {}
    for x in _M2_UNITS:
        d[x] = "(E12*{0} - {0}*E12)*e(s) + (E21*{0} - {0}*E21)*e(t)".format(x)
    sigma = {"%s,%s" % (a, b): "-e(%s,%s)" % (b, a) for a in "st" for b in "st"}
    return {
        "format": FORMAT_VERSION,
        "name": "m2",
        "scalars": {"order": 1, "params": []},
        "algebra": {"kind": "structure_constants", "name": "M2", "basis": _M2_UNITS, "table": table,
                    "unit": {"E11": "1", "E22": "1"}},
        "calculus": {"basis": ["s", "t"], "d": d,
                     "relations": ["e(s,s)", "e(t,t)", "e(s,t) - e(t,s)"],
                     "dbasis": {"s": "2*theta*e(s)", "t": "2*theta*e(t)"},
                     "theta": "E12*e(s) + E21*e(t)"},
        "connection": {"gamma": {"s": "2*theta*e(s)", "t": "2*theta*e(t)"}, "sigma": sigma, "inner": True},
    }


S3_ELEMENTS = ["e", "u", "v", "w", "uv", "vu"]
_S3_PERMS = {"e": (0, 1, 2), "u": (1, 0, 2), "v": (0, 2, 1), "w": (2, 1, 0)}


def _perm_mul(g, h):
    return tuple(g[h[i]] for i in range(3))


def s3_group() -> Dict[str, Tuple[int, int, int]]:
    perms = dict(_S3_PERMS)
    perms["uv"] = _perm_mul(perms["u"], perms["v"])
    perms["vu"] = _perm_mul(perms["v"], perms["u"])
    return perms


def s3_product(x: str, y: str) -> str:
    perms = s3_group()
    p = _perm_mul(perms[x], perms[y])
    return next(k for k, v in perms.items() if v == p)


def s3_inverse(x: str) -> str:
    return next(y for y in S3_ELEMENTS if s3_product(x, y) == "e")


def _delta(x: str) -> str:
    return "delta_" + x


def spec_s3(branch: str = "plus") -> Dict[str, object]:
    if branch not in ("plus", "minus"):
        raise ParameterDomain("s3 branch must be plus or minus")
    q = "zeta(3)" if branch == "plus" else "zeta(3)^2"
    basis = [_delta(x) for x in S3_ELEMENTS]
    table = {"%s,%s" % (_delta(x), _delta(x)): {_delta(x): "1"} for x in S3_ELEMENTS}
    unit = {b: "1" for b in basis}
    letters = ["u", "v", "w"]
    # e_a f = R_a(f) e_a with R_a(delta_x) = delta_{x a^-1}
    autos = {a: {_delta(x): _delta(s3_product(x, s3_inverse(a))) for x in S3_ELEMENTS} for a in letters}
    d = {}
    for x in S3_ELEMENTS:
        d[_delta(x)] = _join(["(%s - %s)*e(%s)" % (_delta(s3_product(x, s3_inverse(a))), _delta(x), a)
                              for a in letters])
    relations = ["e(u,u)", "e(v,v)", "e(w,w)", "e(u,v) + e(v,w) + e(w,u)", "e(v,u) + e(w,v) + e(u,w)"]
    dbasis = {"u": "-e(v,w) - e(w,v)", "v": "-e(w,u) - e(u,w)", "w": "-e(u,v) - e(v,u)"}
    pre = "1/(1-q)*"
    sigma = {
        "u,u": pre + "(e(u,u) + q^-1*e(v,v) + q^-1*e(w,w))",
        "v,v": pre + "(q^-1*e(u,u) + e(v,v) + q^-1*e(w,w))",
        "w,w": pre + "(q^-1*e(u,u) + q^-1*e(v,v) + e(w,w))",
        "u,v": pre + "(q*e(u,v) + e(v,w) + e(w,u))",
        "v,u": pre + "(q*e(v,u) + e(w,v) + e(u,w))",
        "v,w": pre + "(q*e(v,w) + e(w,u) + e(u,v))",
        "w,v": pre + "(q*e(w,v) + e(u,w) + e(v,u))",
        "w,u": pre + "(q*e(w,u) + e(u,v) + e(v,w))",
        "u,w": pre + "(q*e(u,w) + e(v,u) + e(w,v))",
    }
    return {
        "format": FORMAT_VERSION,
        "name": "s3_%s" % branch,
        "scalars": {"order": 3, "params": [], "constants": {"q": q}},
        "algebra": {"kind": "structure_constants", "name": "C(S3)", "basis": basis, "table": table, "unit": unit},
        "calculus": {"basis": letters, "automorphisms": autos, "d": d, "relations": relations,
                     "dbasis": dbasis, "theta": "e(u) + e(v) + e(w)"},
        "connection": {"sigma": sigma, "inner": True},
    }


BICROSS_PARAMS = ["alpha", "beta", "gamma", "delta", "alphap", "betap", "gammap", "deltap"]

# family -> (free parameters, substitutions for the rest; unlisted parameters are zero)
BICROSS_FAMILIES: Dict[str, Tuple[List[str], Dict[str, str]]] = {
    "i": (["delta", "beta", "deltap"], {"gammap": "delta + beta*deltap/delta",
                                         "alphap": "beta*(delta + beta*deltap/delta)/delta",
                                         "betap": "beta*deltap/delta"}),
    "ii": (["gamma", "betap"], {"beta": "-gamma", "gammap": "-betap"}),
    "iii": (["deltap", "betap"], {"alphap": "betap^2/deltap", "gammap": "betap"}),
    "iv": (["beta", "alphap"], {}),
    "prop_i": (["deltap"], {"delta": "2", "gammap": "2"}),
    "prop_ii": ([], {"betap": "-1", "gammap": "1"}),
    "ansatz": (list(BICROSS_PARAMS), {}),
}

_NONZERO = {"i": ["delta"], "iii": ["deltap"]}


def spec_bicrossproduct(family: str = "prop_i", params: Optional[Mapping[str, object]] = None) -> Dict[str, object]:
    if family not in BICROSS_FAMILIES:
        raise ParameterDomain("unknown bicrossproduct family %r" % family)
    free, subst = BICROSS_FAMILIES[family]
    params = {k: str(v) for k, v in (params or {}).items()}
    for k in params:
        if k != "lam" and k not in free:
            raise ParameterDomain("parameter %s is not free in family %s" % (k, family))
    for k in _NONZERO.get(family, []):
        if k in params and _is_rational(params[k]) and Fraction(params[k]) == 0:
            raise ParameterDomain("family %s needs %s != 0" % (family, k))
    symbolic = [p for p in ["lam"] + free if p not in params]
    consts: Dict[str, str] = {}
    for p in ["lam"] + free:
        if p in params:
            consts[p] = params[p]
    for p in BICROSS_PARAMS:
        if p in free:
            continue
        consts[p] = subst.get(p, "0")
    # constants are evaluated in order, so substitutions come after the free values
    gamma = {
        "dr": "rinv*(alpha*e(v,v) + beta*e(v,dr) + gamma*e(dr,v) + delta*e(dr,dr))",
        "v": "rinv*(alphap*e(v,v) + betap*e(v,dr) + gammap*e(dr,v) + deltap*e(dr,dr))",
    }
    sigma = {
        "dr,dr": "e(dr,dr)",
        "v,dr": "e(dr,v)",
        "dr,v": "lam*alpha*e(v,v) + (1 + lam*beta)*e(v,dr) + lam*gamma*e(dr,v) + lam*delta*e(dr,dr)",
        "v,v": "(1 + lam*alphap)*e(v,v) + lam*betap*e(v,dr) + lam*gammap*e(dr,v) + lam*deltap*e(dr,dr)",
    }
    return {
        "format": FORMAT_VERSION,
        "name": "bicrossproduct_%s" % family,
        "scalars": {"order": 1, "params": symbolic, "constants": consts},
        "algebra": {"kind": "rewrite", "name": "bicross", "generators": ["r", "rinv", "t"],
                    "inverses": {"r": "rinv", "rinv": "r"},
                    "rules": {"t*r": "r*t - lam*r", "r*rinv": "1", "rinv*r": "1", "t*rinv": "rinv*t + lam*rinv"}},
        "calculus": {"basis": ["dr", "v"],
                     "d": {"r": "e(dr)", "rinv": "-rinv^2*e(dr)", "t": "rinv*e(v) + rinv*t*e(dr)"},
                     "relations": ["e(dr,dr)", "e(dr,v) + e(v,dr)", "e(v,v) - lam*e(v,dr)"],
                     "dbasis": {"v": "2*rinv*e(dr,v)"},
                     "theta": "-1/lam*rinv*(e(v) + t*e(dr))"},
        "connection": {"gamma": gamma, "sigma": sigma},
    }


def _is_rational(text: str) -> bool:
    try:
        Fraction(text)
        return True
    except (ValueError, ZeroDivisionError):
        return False


CQ_LETTERS = ["+", "0", "-"]


def _cq_common(consts: Dict[str, str], params: List[str], order: int) -> Dict[str, object]:
    deg = {"a": 1, "c": 1, "b": -1, "d": -1}
    autos = {}
    for letter, k in (("+", 1), ("-", 1), ("0", 2)):
        autos[letter] = {g: "q^(%d)*%s" % (k * deg[g], g) for g in "abcd"}
    rules = {"b*a": "q*a*b", "c*a": "q*a*c", "b*d": "q^-1*d*b", "c*d": "q^-1*d*c", "c*b": "b*c",
             "a*d": "1 + q^-1*b*c", "d*a": "1 + q*b*c"}
    return {
        "format": FORMAT_VERSION,
        "scalars": {"order": order, "params": params, "constants": consts},
        "algebra": {"kind": "rewrite", "name": "Cq[SL2]", "generators": ["a", "d", "b", "c"],
                    "weights": {"a": 2, "d": 2, "b": 1, "c": 1}, "rules": rules},
        "calculus": {"basis": CQ_LETTERS, "automorphisms": autos,
                     "d": {"a": "q*b*e(+) + a*e(0)", "b": "a*e(-) - q^-2*b*e(0)",
                           "c": "q*d*e(+) + c*e(0)", "d": "c*e(-) - q^-2*d*e(0)"},
                     "relations": ["e(+,+)", "e(-,-)", "e(0,0)", "q^2*e(+,-) + e(-,+)",
                                   "e(0,+) + q^4*e(+,0)", "e(0,-) + q^-4*e(-,0)"],
                     "dbasis": {"0": "q^3*e(+,-)", "+": "-q^2*(1 + q^-2)*e(+,0)",
                                "-": "q^-2*(1 + q^-2)*e(-,0)"}},
    }


def _cq_sign(r: str) -> int:
    return {"+": 1, "0": 0, "-": -1}[r]


def cq_sigma(tilde: bool = False) -> Dict[str, str]:
    out = {}
    for r in CQ_LETTERS:
        for s in CQ_LETTERS:
            sign = (-1) ** (_cq_sign(r) * _cq_sign(s))
            if tilde and r == s:
                out["%s,%s" % (r, s)] = "e(%s,%s)" % (r, s)
            else:
                out["%s,%s" % (r, s)] = "%se(%s,%s)" % ("" if sign > 0 else "-", s, r)
    return out


def spec_cqsl2(sign: str = "+i", nu: Optional[object] = None) -> Dict[str, object]:
    if sign not in ("+i", "-i", "i"):
        raise ParameterDomain("cqsl2 needs q = +i or -i")
    consts = {"q": "i" if sign in ("+i", "i") else "-i"}
    params = []
    if nu is None:
        params = ["nu"]
    else:
        consts["nu"] = str(nu)
    consts["mu"] = "-nu - q"
    spec = _cq_common(consts, params, 4)
    spec["name"] = "cqsl2_%s" % ("plus" if consts["q"] == "i" else "minus")
    spec["connection"] = {"gamma": {"0": "nu*e(+,-) + mu*e(-,+)", "+": "0", "-": "0"}, "sigma": cq_sigma()}
    return spec


CQ_ANSATZ_PARAMS = ["q", "alpha_p", "alpha_m", "beta_p", "beta_m", "gamma", "nu", "mu"]


def spec_cqsl2_ansatz(params: Optional[Mapping[str, object]] = None) -> Dict[str, object]:
    """General left-invariant ansatz with symbolic q; sigma is solved from the bimodule condition."""
    params = {k: str(v) for k, v in (params or {}).items()}
    free = [p for p in CQ_ANSATZ_PARAMS if p not in params]
    order = 4 if any("i" in v.replace("mu", "").replace("nu", "") for v in params.values()) else 1
    spec = _cq_common(dict(params), free, order)
    spec["name"] = "cqsl2_ansatz"
    spec["connection"] = {"gamma": {"0": "gamma*e(0,0) + nu*e(+,-) + mu*e(-,+)",
                                    "+": "alpha_p*e(0,+) + beta_p*e(+,0)",
                                    "-": "alpha_m*e(0,-) + beta_m*e(-,0)"},
                          "sigma": "solve"}
    return spec


# registry ---------------------------------------------------------------------------------

def _m2_dataset() -> Dict[str, object]:
    # g = s(x)t - t(x)s; entries are (left, right) -> product, transcribed from the worked example
    g = "(e(s,t) - e(t,s))"
    ss, tt = "e(s,s)", "e(t,t)"
    return {
        "odot": [
            ("e(s)", "e(s)", "0"), ("e(t)", "e(t)", "0"),
            ("e(s)", "e(t)", g), ("e(t)", "e(s)", "-" + g),
            ("e(s)", ss, "e(s,s,s)"), (ss, "e(s)", "e(s,s,s)"),
            ("e(t)", tt, "e(t,t,t)"), (tt, "e(t)", "e(t,t,t)"),
            ("e(t)", ss, "e(s)*%s + e(t,s,s)" % g), (ss, "e(t)", "e(s,s,t) - %s*e(s)" % g),
            ("e(s)", tt, "%s*e(t) + e(t,t,s)" % g), (tt, "e(s)", "e(s,t,t) - e(t)*%s" % g),
            ("e(s)", g, "0"), (g, "e(s)", "0"), ("e(t)", g, "0"), (g, "e(t)", "0"),
            (ss, ss, "2*e(s,s,s,s)"), (tt, tt, "2*e(t,t,t,t)"),
            (ss, tt, "e(s,s,t,t) + e(t,t,s,s) - %s*%s" % (g, g)),
            (tt, ss, "e(s,s,t,t) + e(t,t,s,s) - %s*%s" % (g, g)),
            (g, ss, "e(s,s)*%s + %s*e(s,s)" % (g, g)), (ss, g, "e(s,s)*%s + %s*e(s,s)" % (g, g)),
            (g, tt, "e(t,t)*%s + %s*e(t,t)" % (g, g)), (tt, g, "e(t,t)*%s + %s*e(t,t)" % (g, g)),
            (g, g, "0"),
        ],
        "g": g,
        "omega_s_2": ["e(s,s)", "e(t,t)", g],
    }


def _s3_dataset() -> Dict[str, object]:
    return {
        "nabla_e_u": "1/(q-1)*(q*e(u,u) + q*e(u,v) + q*e(u,w) + q*e(v,u) + q*e(w,u) + e(v,w) + e(w,v)"
                     " + q^-1*e(v,v) + q^-1*e(w,w))",
        "ker_id_plus_sigma": ["e(w,v) - e(u,w)", "e(v,u) - e(u,w)", "e(v,w) - e(u,v)", "e(w,u) - e(u,v)"],
        "eigenvalues": [("-1", 4), ("-q^2", 4), ("-q", 1)],
    }


REGISTRY: Dict[str, Tuple[Callable[..., Dict[str, object]], str]] = {
    "grassmann_central": (spec_grassmann_central, "central closed basis with nabla = 0, sigma = flip (option n)"),
    "m2": (spec_m2, "M2 with its 2D inner calculus and the standard connection"),
    "s3": (spec_s3, "functions on S3, 3D calculus, q = zeta_3 (branch plus) or zeta_3^2 (minus)"),
    "bicrossproduct": (spec_bicrossproduct, "[r,t] = lam r with central basis dr, v (option family)"),
    "cqsl2": (spec_cqsl2, "Cq[SL2] 3D calculus at q = +i or -i with parameter nu"),
    "cqsl2_ansatz": (spec_cqsl2_ansatz, "Cq[SL2] general left-invariant ansatz, symbolic q"),
}


def fixture_spec(name: str, **options) -> Dict[str, object]:
    if name not in REGISTRY:
        raise FixtureError("unknown fixture %r (known: %s)" % (name, ", ".join(sorted(REGISTRY))))
    builder = REGISTRY[name][0]
    return builder(**{k: v for k, v in options.items() if v is not None})


def _dataset_for(name: str) -> Dict[str, object]:
    if name == "m2":
        return _m2_dataset()
    if name == "s3":
        return _s3_dataset()
    return {}


_CACHE: Dict[Tuple[str, Tuple[Tuple[str, str], ...]], Fixture] = {}


def load_fixture(name: str, **options) -> Fixture:
    """Load a shipped fixture by name; results are cached per option set."""
    key = (name, tuple(sorted((k, repr(v)) for k, v in options.items() if v is not None)))
    fx = _CACHE.get(key)
    if fx is None:
        spec = fixture_spec(name, **options)
        fx = _CACHE[key] = load_spec(spec, _dataset_for(name))
    return fx


def grassmann_central(n: int = 2) -> Fixture:
    return load_fixture("grassmann_central", n=n)


def m2() -> Fixture:
    return load_fixture("m2")


def s3(branch: str = "plus") -> Fixture:
    return load_fixture("s3", branch=branch)


def bicrossproduct(family: str = "prop_i", params: Optional[Mapping[str, object]] = None) -> Fixture:
    return load_fixture("bicrossproduct", family=family, params=dict(params) if params else None)


def cqsl2(sign: str = "+i", nu: Optional[object] = None) -> Fixture:
    return load_fixture("cqsl2", sign=sign, nu=nu)


def cqsl2_ansatz(params: Optional[Mapping[str, object]] = None) -> Fixture:
    return load_fixture("cqsl2_ansatz", params=dict(params) if params else None)


# C_q[SL_2] closed-form prolongations ------------------------------------------------------
# e^{0..0}_n, e^{{s0..0}}_n and e^{{s t 0..0}}_n as {word of letter names: integer coefficient}

def cq_zeros(n: int) -> Dict[Tuple[str, ...], int]:
    return {("0",) * n: 1}


def cq_brace_single(s: str, n: int) -> Dict[Tuple[str, ...], int]:
    """e^{{s 0..0}}_n: s in each position of a word of zeros."""
    return {tuple(s if j == k else "0" for j in range(n)): 1 for k in range(n)}


def _prefix(letter: str, terms: Mapping[Tuple[str, ...], int], sign: int = 1) -> Dict[Tuple[str, ...], int]:
    return {(letter,) + w: sign * c for w, c in terms.items()}


def _add(*parts: Mapping[Tuple[str, ...], int]) -> Dict[Tuple[str, ...], int]:
    out: Dict[Tuple[str, ...], int] = {}
    for p in parts:
        for w, c in p.items():
            out[w] = out.get(w, 0) + c
    return {w: c for w, c in out.items() if c}


def cq_brace_pair(s: str, t: str, n: int) -> Dict[Tuple[str, ...], int]:
    """e^{{s t 0..0}}_n = e^s e^{{t0..0}} - e^t e^{{s0..0}} + e^0 e^{{s t 0..0}}_{n-1}."""
    if n < 2:
        raise ValueError("pair brace needs n >= 2")
    if n == 2:
        return {(s, t): 1, (t, s): -1}
    return _add(_prefix(s, cq_brace_single(t, n - 1)), _prefix(t, cq_brace_single(s, n - 1), -1),
                _prefix("0", cq_brace_pair(s, t, n - 1)))


# generator -> (leading coefficient element, (coefficient, sign) for the single brace, pair brace signs)
CQ_PROLONGATION = {
    "a": ("a", ("q*b", "+"), ("+", "-")),
    "b": ("b", ("a", "-"), ("-", "+")),
    "c": ("c", ("q*d", "+"), ("+", "-")),
    "d": ("d", ("c", "-"), ("-", "+")),
}


def cq_nabla_power_text(gen: str, n: int, pair_coeff: str = "nu") -> str:
    """Degree-n part of j^n(gen) as a form expression, following the closed form."""
    lead, (cs, s), (p1, p2) = CQ_PROLONGATION[gen]
    if n == 0:
        return gen
    parts = ["%s*e(%s)" % (lead, ",".join(w)) for w in cq_zeros(n)]
    parts += ["(%d)*%s*e(%s)" % (c, cs, ",".join(w)) for w, c in cq_brace_single(s, n).items()]
    if n >= 2:
        parts += ["(%d)*%s*%s*e(%s)" % (c, pair_coeff, lead, ",".join(w))
                  for w, c in cq_brace_pair(p1, p2, n).items()]
    return " + ".join(parts)


# bicrossproduct partial derivatives on normal-ordered a(r, t) -------------------------------

class BicrossCoordinates:
    """Normal-ordered polynomials a(r, t) = sum c_{k,j} r^k t^j (k may be negative)."""

    def __init__(self, fx: Fixture):
        self.fx = fx
        self.alg = fx.alg
        self.lam = fx.scalar("lam")

    def to_dict(self, a: AlgebraElement) -> Dict[Tuple[int, int], Scalar]:
        out: Dict[Tuple[int, int], Scalar] = {}
        for m, c in a.terms.items():
            k = sum(1 if g == "r" else -1 if g == "rinv" else 0 for g in m)
            j = sum(1 for g in m if g == "t")
            if list(m) != sorted(m, key=lambda g: g == "t"):
                raise FixtureError("monomial %r is not normal ordered" % (m,))
            out[(k, j)] = out.get((k, j), self.alg.field.zero) + c
        return out

    def from_dict(self, d: Mapping[Tuple[int, int], Scalar]) -> AlgebraElement:
        out = self.alg.zero
        for (k, j), c in d.items():
            word = ("r",) * k if k >= 0 else ("rinv",) * (-k)
            out = out + self.alg.monomial(word + ("t",) * j).scale(c)
        return out

    def monomial(self, k: int, j: int) -> AlgebraElement:
        return self.from_dict({(k, j): self.alg.field.one})

    def d_r_classical(self, a: AlgebraElement) -> AlgebraElement:
        out: Dict[Tuple[int, int], Scalar] = {}
        for (k, j), c in self.to_dict(a).items():
            if k:
                out[(k - 1, j)] = out.get((k - 1, j), self.alg.field.zero) + c * k
        return self.from_dict(out)

    def shift_t(self, a: AlgebraElement) -> AlgebraElement:
        """a(r, t - lam), expanding (t - lam)^j binomially."""
        from math import comb
        out: Dict[Tuple[int, int], Scalar] = {}
        for (k, j), c in self.to_dict(a).items():
            for i in range(j + 1):
                coeff = c * comb(j, i) * (-self.lam) ** (j - i)
                out[(k, i)] = out.get((k, i), self.alg.field.zero) + coeff
        return self.from_dict(out)

    def d_lam(self, a: AlgebraElement) -> AlgebraElement:
        return (a - self.shift_t(a)).scale(self.lam.inverse())

    def d_r(self, a: AlgebraElement) -> AlgebraElement:
        return self.d_r_classical(a) + self.d_lam(a) * self.monomial(-1, 1)

    def d_v(self, a: AlgebraElement) -> AlgebraElement:
        return self.d_lam(a) * self.monomial(-1, 0)

    def nabla_d_formula(self, a: AlgebraElement, deltap: Scalar) -> TensorForm:
        """Closed form of nabla d a for the first proposition solution."""
        rinv = self.monomial(-1, 0)
        dr, dv = self.d_r, self.d_v
        e = lambda *w: TensorForm.basis(self.fx.calc.frame, tuple(self.fx.calc.frame.letter(x) for x in w))
        c_rr = dr(dr(a)) + dr(a) * rinv.scale(self.alg.field.const(2)) + dv(a) * rinv.scale(deltap)
        c_vv = dv(dv(a))
        c_mix = dv(dr(a)) + dv(dv(a)).scale(self.lam)
        return (e("dr", "dr").lmul(c_rr) + (e("v", "v") - e("v", "dr").scale(self.lam)).lmul(c_vv)
                + (e("v", "dr") + e("dr", "v")).lmul(c_mix))
