"""Command-line interface: ``anderson-forge compute ...`` and ``anderson-forge verify ...``.

Exit codes: 0 success, 1 a verification suite failed, 2 invalid input
(flags, expressions, JSON files), 3 a computation raised a library error.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from functools import wraps

import click

from . import __version__
from .algebra import AlgCoeff, AlgFrac
from .drinfeld import (
    DrinfeldModule,
    PeriodBasis,
    agf_drinfeld,
    carlitz_polylog,
    cm_fixture,
    exp_phi,
    log_phi,
    period_matrix,
    quasilog,
    quasilog_series,
)
from .errors import FieldError, ForgeError, ParseError
from .expr import GRAMMAR_VERSION, parse_alg, parse_list, parse_tpoly
from .ff import FieldParams
from .laurent import INF, LaurentApprox, embed
from .motive import (
    MotiveData,
    build_g_h,
    build_phi,
    build_psi,
    carlitz_motive,
    verify_difference_eq,
)
from .suites import SUITES, SuiteConfig, default_phi, default_seed, run_suite
from .tate import TateSeries, carlitz_period, omega_series
from .tmodule import agf_tmodule, build_dP, construct_tmodule, dP_commutes, evaluate_tmodule

EXPR_HELP = (
    "Expressions (grammar v%d): theta (or θ), w (the q^s-th root of theta), integers mod p, "
    "+ - * / ^ and parentheses; lists are comma-separated." % GRAMMAR_VERSION
)

# ---------------------------------------------------------------------------
# output


def _la(x: LaurentApprox) -> dict:
    """A C_infinity approximation with its precision metadata."""
    return {
        "valuation": None if x.is_zero() else int(x.valuation()),
        "prec": None if x.prec == INF else int(x.prec),
        "text": repr(x),
        "digits": x.to_json(),
    }


def _series(f: TateSeries) -> dict:
    out = f.to_json()
    out["degree_bound"] = f.degree_bound()
    return out


def _flatten(obj, prefix: str = "") -> list[tuple[str, str]]:
    if isinstance(obj, dict):
        rows = []
        for k in obj:
            rows += _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
        return rows
    if isinstance(obj, list):
        if all(not isinstance(x, (dict, list)) for x in obj):
            return [(prefix, json.dumps(obj))]
        rows = []
        for i, x in enumerate(obj):
            rows += _flatten(x, f"{prefix}[{i}]")
        return rows
    return [(prefix, "" if obj is None else json.dumps(obj) if isinstance(obj, bool) else str(obj))]


def render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=False, ensure_ascii=False) + "\n"
    rows = _flatten(payload)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(rows)
        return buf.getvalue()
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


def emit(ctx: click.Context, payload: dict) -> None:
    text = render(payload, ctx.obj["format"])
    out = ctx.obj["out"]
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


# ---------------------------------------------------------------------------
# shared options and error mapping


def _field_from(ctx: click.Context) -> FieldParams:
    o = ctx.obj
    try:
        F = FieldParams.from_q(o["q"], m=o["m"], s=o["s"], prec=o["prec"])
    except FieldError as exc:
        raise click.UsageError(str(exc)) from None
    if o["p"] is not None and o["p"] != F.p:
        raise click.UsageError(f"--p {o['p']} does not match the characteristic of q = {o['q']}")
    if o["prec"] <= 0:
        raise click.UsageError("--prec must be positive")
    if o["D"] < 0:
        raise click.UsageError("--D must be >= 0")
    return F


def common(fn):
    """Field, precision and output options shared by every subcommand."""

    @click.option("--p", type=int, default=None, help="Characteristic (checked against q).")
    @click.option("--q", type=int, default=2, show_default=True, help="Size of the constant field F_q.")
    @click.option("--m", type=int, default=1, show_default=True, help="Coefficients in F_{q^m}.")
    @click.option("--s", type=int, default=3, show_default=True, help="Adjoin theta^(1/q^s).")
    @click.option("--prec", type=int, default=120, show_default=True, help="Working precision in v-digits.")
    @click.option("--D", "D", type=int, default=24, show_default=True, help="Truncation degree in t.")
    @click.option("--jobs", type=int, default=1, show_default=True, help="Parallel workers for suites.")
    @click.option(
        "--format", "fmt", type=click.Choice(["json", "csv", "table"]), default="json", show_default=True
    )
    @click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Write output here.")
    @click.pass_context
    @wraps(fn)
    def wrapper(ctx, p, q, m, s, prec, D, jobs, fmt, out, **kw):
        ctx.ensure_object(dict)
        ctx.obj.update(p=p, q=q, m=m, s=s, prec=prec, D=D, jobs=jobs, format=fmt, out=out)
        if jobs < 1:
            raise click.UsageError("--jobs must be >= 1")
        F = _field_from(ctx)
        try:
            return fn(ctx, F, **kw)
        except ParseError as exc:
            raise click.UsageError(f"ParseError: {exc}") from None
        except (ForgeError, ZeroDivisionError) as exc:
            name = exc.name if isinstance(exc, ForgeError) else type(exc).__name__
            click.echo(f"error: {name}: {exc}", err=True)
            ctx.exit(3)
        except ValueError as exc:
            raise click.UsageError(str(exc)) from None

    return wrapper


def _header(cmd: str, F: FieldParams, **extra) -> dict:
    out = {"command": cmd, "field": {**F.to_json(), "prec": F.prec}}
    out.update(extra)
    return out


def _poly_coeff(x: AlgFrac) -> AlgCoeff:
    if not x.is_poly():
        raise ParseError("Drinfeld coefficients must be polynomials in w")
    return x.num


def _module_phi(F: FieldParams, coeffs: str | None, r: int) -> DrinfeldModule:
    if coeffs is None:
        if r < 1:
            raise click.UsageError("--r must be >= 1")
        return DrinfeldModule.carlitz(F) if r == 1 else default_phi(F, r)
    return DrinfeldModule(F, tuple(_poly_coeff(x) for x in parse_list(coeffs, F)))


def _tmodule(F: FieldParams, module: str, coeffs: str | None, r: int, n: int):
    if module == "carlitz":
        return DrinfeldModule.carlitz(F)
    if module == "drinfeld":
        return _module_phi(F, coeffs, r)
    if module == "carlitz-power":
        return construct_tmodule("CarlitzPower", None, n, F=F)
    return construct_tmodule(module, _module_phi(F, coeffs, r), n)


MODULE_CHOICE = click.Choice(["carlitz", "drinfeld", "En", "Gn", "carlitz-power"])
coeffs_opt = click.option(
    "--coeffs", default=None, help="a_1,...,a_r of phi(t) = theta + a_1 tau + ... (default: a fixed module of rank --r)."
)
r_opt = click.option("--r", "r", type=int, default=2, show_default=True, help="Rank used when --coeffs is omitted.")
n_opt = click.option("--n", "n", type=int, default=1, show_default=True, help="Tensor/exterior index n.")


@click.group(epilog=EXPR_HELP)
@click.version_option(__version__, prog_name="anderson-forge")
def main():
    """Exact and certified computations for Drinfeld modules, the t-modules
    E_n and G_n, Carlitz tensor powers and their dual t-motives."""


@main.group(epilog=EXPR_HELP)
def compute():
    """Compute a named quantity."""


@compute.command()
@common
def omega(ctx, F):
    """Coefficients of Omega up to t-degree D."""
    f = omega_series(F, ctx.obj["D"])
    emit(ctx, _header("omega", F, D=ctx.obj["D"], coefficients=[_la(c) for c in f.coeffs]))


@compute.command()
@common
def pitilde(ctx, F):
    """The Carlitz period."""
    pi = carlitz_period(F)
    emit(ctx, _header("pitilde", F, ord_v=int(pi.valuation()), value=_la(pi)))


@compute.command()
@common
@click.option("--n", "n", type=int, default=1, show_default=True)
@click.option("--alpha", required=True, help="Point (expression).")
def polylog(ctx, F, n, alpha):
    """Carlitz n-th polylogarithm at alpha."""
    a = parse_alg(alpha, F)
    v = carlitz_polylog(embed(a, F), n)
    emit(ctx, _header("polylog", F, n=n, alpha=alpha, value=_la(v)))


def _exp_log(which: str):
    @common
    @click.option("--module", type=MODULE_CHOICE, default="carlitz", show_default=True)
    @coeffs_opt
    @r_opt
    @n_opt
    @click.option("--point", required=True, help="Point (comma-separated for t-modules).")
    def cmd(ctx, F, module, coeffs, r, n, point):
        pts = [embed(x, F) for x in parse_list(point, F)]
        G = _tmodule(F, module, coeffs, r, n)
        if isinstance(G, DrinfeldModule):
            if len(pts) != 1:
                raise click.UsageError("a Drinfeld module takes a single point")
            vals = [(exp_phi if which == "exp" else log_phi)(G, pts[0])]
        else:
            vals = evaluate_tmodule(G, which, pts)
        emit(ctx, _header(which, F, module=module, n=n, point=point, value=[_la(v) for v in vals]))

    cmd.__name__ = which
    cmd.__doc__ = f"{'Exponential' if which == 'exp' else 'Logarithm'} of a Drinfeld module or t-module."
    return cmd


compute.command("exp")(_exp_log("exp"))
compute.command("log")(_exp_log("log"))


@compute.command()
@common
@click.option("--module", type=MODULE_CHOICE, default="carlitz", show_default=True)
@coeffs_opt
@r_opt
@n_opt
@click.option("--point", required=True)
def agf(ctx, F, module, coeffs, r, n, point):
    """Anderson generating function(s) up to t-degree D."""
    pts = [embed(x, F) for x in parse_list(point, F)]
    G = _tmodule(F, module, coeffs, r, n)
    D = ctx.obj["D"]
    fs = [agf_drinfeld(G, pts[0], D)] if isinstance(G, DrinfeldModule) else agf_tmodule(G, pts, D)
    emit(ctx, _header("agf", F, module=module, D=D, series=[_series(f) for f in fs]))


def _fixture_field(F: FieldParams) -> FieldParams:
    if F.m % 2:
        raise click.UsageError("the CM fixture needs --m even")
    return F


@compute.command()
@common
@coeffs_opt
@r_opt
@click.option("--fixture", type=click.Choice(["none", "cm"]), default="none", show_default=True)
@click.option("--point", required=True)
@click.option("--i", "i", type=int, default=1, show_default=True, help="Biderivation delta_i, 0 <= i < r.")
def quasilog_cmd(ctx, F, coeffs, r, fixture, point, i):
    """Quasi-logarithm F_{delta_i}(w), by AGF twist and by the direct series."""
    phi = cm_fixture(_fixture_field(F))[0] if fixture == "cm" else _module_phi(F, coeffs, r)
    (w,) = [embed(x, F) for x in parse_list(point, F)]
    a = quasilog(phi, w, i)
    b = quasilog_series(phi, w, i)
    d = a - b
    emit(
        ctx,
        _header("quasilog", F, i=i, agf_route=_la(a), series_route=_la(b), routes_agree=d.is_zero()),
    )


compute.add_command(quasilog_cmd, "quasilog")


@compute.command("period-matrix")
@common
@click.option("--fixture", type=click.Choice(["cm"]), default="cm", show_default=True)
def period_matrix_cmd(ctx, F, fixture):
    """Period matrix of the built-in CM fixture, its determinant and pi~/det."""
    phi, basis = cm_fixture(_fixture_field(F))
    P = period_matrix(phi, basis)
    emit(
        ctx,
        _header(
            "period-matrix",
            F,
            fixture=fixture,
            rows=[[_la(x) for x in row] for row in P.P],
            det=_la(P.det),
            ratio=_la(P.ratio),
            reconstruction=None if P.reconstruction is None else list(map(list, P.reconstruction)),
        ),
    )


KIND_CHOICE = click.Choice(["Drinfeld", "En", "Gn", "Carlitz"])


@compute.command("phi")
@common
@click.option("--kind", type=KIND_CHOICE, default="Drinfeld", show_default=True)
@coeffs_opt
@r_opt
@click.option("--n", "n", type=int, default=0, show_default=True)
def phi_cmd(ctx, F, kind, coeffs, r, n):
    """The sigma-action matrix Phi of a dual t-motive."""
    if kind == "Carlitz":
        mot = carlitz_motive(F, max(n, 1), 0)
        mot.Psi, mot.report = None, None
    else:
        mot = build_phi(kind, _module_phi(F, coeffs, r), n)
    emit(ctx, _header("phi", F, motive=mot.to_json()))


@compute.command("psi")
@common
@click.option("--kind", type=KIND_CHOICE, default="Drinfeld", show_default=True)
@click.option("--fixture", type=click.Choice(["cm", "carlitz"]), default="cm", show_default=True)
@click.option("--n", "n", type=int, default=0, show_default=True)
def psi_cmd(ctx, F, kind, fixture, n):
    """Phi together with its rigid analytic trivialization Psi (to t-degree D)."""
    D = ctx.obj["D"]
    if fixture == "carlitz" or kind == "Carlitz":
        mot = carlitz_motive(F, max(n, 1), D)
    else:
        phi, basis = cm_fixture(_fixture_field(F))
        mot = build_psi(kind, phi, basis, n, D)
    emit(ctx, _header("psi", F, motive=mot.to_json()))


@compute.command("gh")
@common
@click.option("--flavor", type=click.Choice(["En", "Gn"]), default="Gn", show_default=True)
@coeffs_opt
@r_opt
@n_opt
@click.option("--alpha", required=True, help="alpha_1,...,alpha_d (comma-separated).")
def gh_cmd(ctx, F, flavor, coeffs, r, n, alpha):
    """The vectors g_y and h_alpha for y = Log(alpha)."""
    phi = _module_phi(F, coeffs, r)
    pair = build_g_h(flavor, phi, n, None, parse_list(alpha, F), ctx.obj["D"])
    emit(ctx, _header("gh", F, pair=pair.to_json()))


@compute.command("dp")
@common
@click.option("--flavor", type=click.Choice(["En", "Gn"]), default="Gn", show_default=True)
@coeffs_opt
@r_opt
@n_opt
@click.option("--a", "a", default="t", show_default=True, help="Scalar endomorphism a(t) (polynomial in t).")
@click.option("--matrix", "matrix", default=None, help="Rows ';'-separated, entries ','-separated polynomials in t.")
def dp_cmd(ctx, F, flavor, coeffs, r, n, a, matrix):
    """Tangent matrix dP of the endomorphism of E_n / G_n induced by a motive endomorphism."""
    phi = _module_phi(F, coeffs, r)
    if matrix is None:
        ap = parse_tpoly(a, F)
        Fm = [[ap if i == j else TateSeries.zero(F) for j in range(phi.r)] for i in range(phi.r)]
    else:
        Fm = [[parse_tpoly(x, F) for x in row.split(",")] for row in matrix.split(";")]
    dP = build_dP(Fm, phi, n, flavor)
    G = construct_tmodule(flavor, phi, n)
    emit(
        ctx,
        _header("dp", F, flavor=flavor, n=n, dP=[[x.to_json() for x in row] for row in dP], commutes=dP_commutes(G, dP)),
    )


# ---------------------------------------------------------------------------
# verify


@main.command(epilog="Suites: " + ", ".join(SUITES) + ", or 'all'.")
@click.argument("suite", type=click.Choice(list(SUITES) + ["all"]))
@common
@click.option("--r", "r", type=int, default=None, help="Restrict to one rank.")
@click.option("--n", "n", type=int, default=None, help="Restrict to one n.")
@click.option("--flavor", type=click.Choice(["En", "Gn"]), default=None)
@click.option("--fixture", type=click.Choice(["cm", "carlitz"]), default="cm", show_default=True)
@click.option("--motive", "motive", type=click.Path(exists=True, dir_okay=False), default=None,
              help="difference-eq only: verify a MotiveData JSON file instead of a fixture.")
@click.option("--trials", type=int, default=5, show_default=True)
@click.option("--timing/--no-timing", default=False, help="Include runtimes in the report (not byte-stable).")
def verify(ctx, F, suite, r, n, flavor, fixture, motive, trials, timing):
    """Run verification suites; exit status 1 if any check fails."""
    try:
        seed = default_seed()
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    cfg = SuiteConfig(q=F.q, m=F.m, s=F.s, prec=F.prec, D=ctx.obj["D"], r=r, n=n, flavor=flavor,
                      fixture=fixture, trials=trials, seed=seed)
    reports = []
    if motive is not None:
        if suite != "difference-eq":
            raise click.UsageError("--motive applies to the difference-eq suite only")
        try:
            with open(motive, encoding="utf-8") as fh:
                obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{motive}: {exc}") from None
        mot = MotiveData.from_json(obj.get("motive", obj), F.with_(prec=F.prec))
        if mot.Psi is None:
            raise click.UsageError("the motive file carries no Psi")
        rep = verify_difference_eq(mot.Phi, mot.Psi)
        payload = {
            "command": "verify",
            "suite": "difference-eq",
            "pass": rep.passed,
            "report": rep.to_json(),
        }
        emit(ctx, payload)
        ctx.exit(0 if rep.passed else 1)
    names = list(SUITES) if suite == "all" else [suite]
    for name in names:
        rep = run_suite(name, cfg, ctx.obj["jobs"])
        click.echo(f"{name}: {'pass' if rep.passed else 'FAIL'} ({rep.runtime:.2f} s)", err=True)
        reports.append(rep)
    ok = all(rep.passed for rep in reports)
    emit(ctx, {"command": "verify", "field": {**F.to_json(), "prec": F.prec}, "seed": seed, "pass": ok,
               "suites": [rep.to_json(timing) for rep in reports]})
    ctx.exit(0 if ok else 1)


if __name__ == "__main__":  # pragma: no cover
    main()
