"""qjet command line: verify, jet, dims, table, scan and fixture listing."""

from __future__ import annotations

import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import click

from . import fixtures as fxmod
from .braid import BraidError, CheckResult
from .bundle import BUNDLE_CONDITIONS, BundleError, bundle_from_spec, bundle_omega1, bundle_trivial
from .connection import ALL_CONDITIONS
from .jets import JetError, JetGeometry
from .report import Report
from .scan import SCAN_TARGETS, sample_points, scan
from .tensors import TensorError

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

_INPUT_ERRORS = (fxmod.FixtureError, JetError, TensorError, BundleError, BraidError, ValueError, KeyError)


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


def parse_params(text: Optional[str]) -> Dict[str, str]:
    """``k=v,k2=v2`` into an ordered dict of strings."""
    out: Dict[str, str] = {}
    if not text:
        return out
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise InputError("parameter binding %r is not of the form k=v" % part)
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _fixture_options(name: str, family, branch, sign, n, params: Dict[str, str]) -> Dict[str, object]:
    opts: Dict[str, object] = {}
    params = dict(params)
    if name == "bicrossproduct":
        opts["family"] = family or "prop_i"
        opts["params"] = params or None
        params = {}
    elif name == "cqsl2":
        opts["sign"] = sign or "+i"
        if "nu" in params:
            opts["nu"] = params.pop("nu")
    elif name == "cqsl2_ansatz":
        opts["params"] = params or None
        params = {}
    elif name == "s3":
        opts["branch"] = branch or "plus"
    elif name == "grassmann_central":
        if "n" in params:
            n = params.pop("n")
        opts["n"] = int(n) if n is not None else 2
    if params:
        raise InputError("fixture %s takes no parameters %s" % (name, ", ".join(sorted(params))))
    return opts


def open_fixture(name: str, family=None, branch=None, sign=None, n=None, params: str = None
                 ) -> Tuple[fxmod.Fixture, Dict[str, str]]:
    """A shipped fixture by name, or a fixture JSON file by path."""
    bindings = parse_params(params)
    try:
        path = Path(name)
        if name.endswith(".json") or (path.exists() and path.is_file()):
            try:
                spec = json.loads(path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise InputError("cannot read fixture file %s: %s" % (name, exc))
            if bindings:
                sc = spec.setdefault("scalars", {})
                sparams = sc.get("params", [])
                for k in bindings:
                    if k in sparams:
                        sparams.remove(k)
                # bound values first, later constants may refer to them
                rest = {k: v for k, v in sc.get("constants", {}).items() if k not in bindings}
                sc["constants"] = {**bindings, **rest}
            return fxmod.load_spec(spec), {"file": path.name, **bindings}
        opts = _fixture_options(name, family, branch, sign, n, bindings)
        fx = fxmod.load_fixture(name, **opts)
    except InputError:
        raise
    except _INPUT_ERRORS as exc:
        raise InputError(str(exc))
    shown = {k: (",".join("%s=%s" % kv for kv in v.items()) if isinstance(v, dict) else str(v))
             for k, v in opts.items() if v is not None}
    return fx, shown


def fixture_options(f):
    f = click.option("--params", "params", default=None, help="Parameter bindings k=v,... (rationals or expressions).")(f)
    f = click.option("--n", "n", type=int, default=None, help="Number of generators (grassmann_central).")(f)
    f = click.option("--sign", type=click.Choice(["+i", "-i"]), default=None, help="Root q = +i or -i (cqsl2).")(f)
    f = click.option("--branch", type=click.Choice(["plus", "minus"]), default=None, help="Braiding branch (s3).")(f)
    f = click.option("--family", default=None, help="Parameter family (bicrossproduct).")(f)
    f = click.argument("fixture")(f)
    return f


def output_options(f):
    f = click.option("--timings", is_flag=True, help="Record wall time per check (breaks byte-identical output).")(f)
    f = click.option("--seed", type=int, default=0, show_default=True, help="Seed for sampled checks.")(f)
    f = click.option("--json", "json_path", default=None, help="Write the JSON report here ('-' for stdout).")(f)
    return f


def _emit(report: Report, json_path: Optional[str]) -> None:
    if json_path == "-":
        click.echo(report.to_json(), nl=False)
        return
    if json_path:
        Path(json_path).write_text(report.to_json(), encoding="utf-8")
    click.echo(report.render_text(), nl=False)


def _param_list(fx: fxmod.Fixture) -> List[str]:
    return list(fx.params)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="artifact")
def main() -> None:
    """Exact verification of quantum jet bundles over noncommutative algebras."""


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def _bundle_for(fx: fxmod.Fixture, which: str):
    if which == "A":
        return bundle_trivial(fx.conn)
    if which == "omega1":
        return bundle_omega1(fx.conn)
    if which == "spec":
        if not fx.bundle_spec:
            raise InputError("fixture %s declares no bundle section" % fx.name)
        return bundle_from_spec(fx.conn, fx.bundle_spec, fx.names())
    raise InputError("unknown bundle %r" % which)


@main.command()
@fixture_options
@output_options
@click.option("--check", "checks", multiple=True, type=click.Choice(list(ALL_CONDITIONS)),
              help="Run only these conditions (repeatable).")
@click.option("--bundle", "bundle", type=click.Choice(["A", "omega1", "spec"]), default=None,
              help="Also run the bundle battery on E = A, E = Omega^1 or the fixture's bundle section.")
@click.option("--leibniz", "leibniz", type=int, default=0, show_default=True,
              help="Also test the n-th order Leibniz rule up to this order on seeded pairs.")
@click.option("--samples", type=int, default=3, show_default=True, help="Seeded sample count for --leibniz.")
def verify(fixture, family, branch, sign, n, params, json_path, seed, timings, checks, bundle, leibniz, samples):
    """Run the condition battery on FIXTURE (a shipped name or a fixture JSON file)."""
    fx, opts = open_fixture(fixture, family, branch, sign, n, params)
    report = Report("verify", fx.name, opts, seed, _param_list(fx), timings)
    try:
        for kind in checks or ALL_CONDITIONS:
            res, dt = _timed(lambda: fx.conn.check([kind])[0])
            report.add_check(res, "connection", dt)
        if bundle:
            b = _bundle_for(fx, bundle)
            for kind in BUNDLE_CONDITIONS:
                res, dt = _timed(lambda: b.check([kind])[0])
                report.add_check(res, "bundle", dt)
        if leibniz:
            jets = JetGeometry(fx.conn)
            rng = random.Random(seed)
            for order in range(1, leibniz + 1):
                for s in range(samples):
                    a, b2 = fx.alg.sample(rng), fx.alg.sample(rng)
                    res_list, dt = _timed(lambda: jets.leibniz_check(a, b2, order))
                    for r in res_list:
                        report.add_check(CheckResult("%s_sample%d" % (r.name, s), r.ok, r.witness), "jets", dt)
    except _INPUT_ERRORS as exc:
        raise InputError(str(exc))
    _emit(report, json_path)
    sys.exit(EXIT_PASS if report.ok else EXIT_FAIL)


@main.command()
@fixture_options
@output_options
@click.option("--order", "order", type=int, required=True, help="Jet order k.")
@click.option("--element", "element", required=True, help="Algebra element expression.")
def jet(fixture, family, branch, sign, n, params, json_path, seed, timings, order, element):
    """Print j^k(element) with its graded components over the symmetric bases."""
    fx, opts = open_fixture(fixture, family, branch, sign, n, params)
    if order < 0:
        raise InputError("order must be nonnegative")
    try:
        a = fx.element(element)
        jets = JetGeometry(fx.conn)
        xi = jets.jet_prolong(a, order)
        comps = []
        for j, c in enumerate(xi.components):
            coords = []
            for b, coef in jets.omega_s(j).coordinates(c):
                coords.append({"basis": str(b), "coefficient": str(coef)})
            comps.append({"degree": j, "component": str(c), "coordinates": coords})
    except _INPUT_ERRORS as exc:
        raise InputError(str(exc))
    report = Report("jet", fx.name, dict(opts, order=str(order), element=element), seed, _param_list(fx), timings)
    report.add_object("jet", {"element": str(a), "order": order, "components": comps})
    _emit(report, json_path)


@main.command()
@fixture_options
@output_options
@click.option("--max-order", "max_order", type=int, default=3, show_default=True, help="Largest degree j.")
def dims(fixture, family, branch, sign, n, params, json_path, seed, timings, max_order):
    """Ranks of Omega^j_S and of [j,sigma]! for j <= max order."""
    fx, opts = open_fixture(fixture, family, branch, sign, n, params)
    jets = JetGeometry(fx.conn)
    rows = []
    for j in range(max_order + 1):
        fact = jets.braid.factorial(j) if j else None
        rows.append({"degree": j, "omega_s": jets.omega_s(j).rank,
                     "factorial_image": jets.braid.image_rank(fact, j) if j else 1})
    report = Report("dims", fx.name, dict(opts, max_order=str(max_order)), seed, _param_list(fx), timings)
    report.add_dimensions(rows)
    _emit(report, json_path)


@main.command()
@fixture_options
@output_options
@click.option("--product", type=click.Choice(["odot", "bullet"]), default="odot", show_default=True)
@click.option("--max-degree", "max_degree", type=int, default=2, show_default=True)
def table(fixture, family, branch, sign, n, params, json_path, seed, timings, product, max_degree):
    """Multiplication table of odot on symmetric basis forms, or of bullet by generators."""
    fx, opts = open_fixture(fixture, family, branch, sign, n, params)
    jets = JetGeometry(fx.conn)
    entries = []
    try:
        if product == "odot":
            for i in range(1, max_degree):
                for j in range(1, max_degree - i + 1):
                    for x in _basis_forms(jets, i):
                        for y in _basis_forms(jets, j):
                            entries.append({"left": str(x), "right": str(y),
                                            "product": str(jets.odot_graded(x, i, y, j))})
        else:
            gens = _generators(fx)
            for name, a in gens:
                for j in range(0, max_degree + 1):
                    for w in _basis_forms(jets, j):
                        comps = [jets.scalar(fx.alg.zero)] * (max_degree + 1)
                        comps = [c if d != j else w for d, c in enumerate(comps)]
                        xi = jets.make_jet(comps)
                        for side in ("left", "right"):
                            out = jets.bullet(a, xi, side)
                            entries.append({"generator": name, "form": str(w), "side": side,
                                            "product": [str(c) for c in out.components]})
    except _INPUT_ERRORS as exc:
        raise InputError(str(exc))
    report = Report("table", fx.name, dict(opts, product=product, max_degree=str(max_degree)),
                    seed, _param_list(fx), timings)
    report.add_object(product, entries)
    _emit(report, json_path)


def _basis_forms(jets: JetGeometry, k: int):
    if k == 0:
        return [jets.scalar(jets.alg.one)]
    sp = jets.omega_s(k)
    out = []
    for p, row in zip(sp.pivots, sp._echelon):
        out.append(sp.vector_form(row).scale(row[p].inverse()))
    return out


def _generators(fx: fxmod.Fixture):
    return [(g, fx.alg.gen(g)) for g in fx.alg.generators()]


@main.command("scan")
@fixture_options
@output_options
@click.option("--target", type=click.Choice(list(SCAN_TARGETS)), default="ybe", show_default=True)
@click.option("--grid", default=None,
              help="'random:N' for N seeded random points, or explicit points 'a=1,b=2;a=3,b=1/2'.")
def scan_cmd(fixture, family, branch, sign, n, params, json_path, seed, timings, target, grid):
    """Residuals of one target: identically zero symbolically, or evaluated on a grid."""
    fx, opts = open_fixture(fixture, family, branch, sign, n, params)
    points = _grid(grid, fx.params, seed)
    try:
        res = scan(fx.conn, target, points)
    except _INPUT_ERRORS as exc:
        raise InputError(str(exc))
    report = Report("scan", fx.name, dict(opts, target=target, grid=grid or "symbolic"), seed, _param_list(fx), timings)
    report.add_object("scan", res)
    if points is None:
        report.add_check(CheckResult(target + "_identically_zero", bool(res["identically_zero"]),
                                     None if res["identically_zero"] else "%d nonzero residuals" % res["residual_count"]),
                         "scan")
    _emit(report, json_path)


def _grid(grid: Optional[str], params: Sequence[str], seed: int):
    if not grid:
        return None
    if grid.startswith("random:"):
        try:
            count = int(grid.split(":", 1)[1])
        except ValueError:
            raise InputError("bad grid %r" % grid)
        return sample_points(list(params), count, seed)
    pts = []
    for chunk in grid.split(";"):
        b = parse_params(chunk)
        try:
            pt = {k: Fraction(v) for k, v in b.items()}
        except ValueError as exc:
            raise InputError("grid values must be rationals: %s" % exc)
        unknown = set(pt) - set(params)
        if unknown:
            raise InputError("not a parameter of the fixture: %s" % ", ".join(sorted(unknown)))
        pts.append(pt)
    return pts


@main.group()
def fixtures() -> None:
    """Shipped fixtures."""


@fixtures.command("list")
def fixtures_list() -> None:
    for name in sorted(fxmod.REGISTRY):
        click.echo("%-20s %s" % (name, fxmod.REGISTRY[name][1]))


@fixtures.command("dump")
@click.argument("name")
@click.option("--family", default=None)
@click.option("--branch", type=click.Choice(["plus", "minus"]), default=None)
@click.option("--sign", type=click.Choice(["+i", "-i"]), default=None)
@click.option("--n", "n", type=int, default=None)
@click.option("--params", default=None)
def fixtures_dump(name, family, branch, sign, n, params) -> None:
    """Print the fixture file for NAME; it loads back with any command."""
    if name not in fxmod.REGISTRY:
        raise InputError("unknown fixture %r" % name)
    opts = _fixture_options(name, family, branch, sign, n, parse_params(params))
    try:
        spec = fxmod.fixture_spec(name, **opts)
    except _INPUT_ERRORS as exc:
        raise InputError(str(exc))
    click.echo(json.dumps(spec, indent=2, ensure_ascii=False))


if __name__ == "__main__":
    main()
