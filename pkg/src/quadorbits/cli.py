"""Command-line interface: ``quadorbits <subcommand> ...``.

Data goes to stdout as JSON (default) or CSV; logs go to stderr.
Exact values are emitted as strings, floats with 17 significant digits.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import __version__
from . import bianchi as bi
from .counting import (EngineDisagreement, GroupSpec, orbit_constant, orbit_count, psi,
                       psi_constant, report, run_series)
from .hypgeom import equidistribution_demo
from .pell import (fundamental_pell4, has_negative_unit, pell_with_divisor, regulator_bits)
from .qforms import (Form, alpha_of, classify, equivalent, fundamental_automorph, reduce_form)
from .quadirr import QuadIrr, canonical_mod_translation, cf_expand, is_reciprocal_irr


class UsageError(ValueError):
    pass


# -- output ----------------------------------------------------------------


def _encode(x) -> str:
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return "null"
        return format(x, ".17g")
    if isinstance(x, (int, Fraction)):
        return json.dumps(str(x))
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in x) + "]"
    return _encode(float(x))


def emit_json(payload: dict, out) -> None:
    out.write(_encode({"version": __version__, **payload}) + "\n")


def emit_csv(rows: list[dict], columns: list[str], out) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow(["" if r[c] is None else (format(r[c], ".17g") if isinstance(r[c], float) else str(r[c]))
                    for c in columns])
    out.write(buf.getvalue())


# -- argument helpers --------------------------------------------------------


def parse_s_list(text: str) -> list:
    """"a,b,c" or "geometric:a:b:n" (n integer thresholds from a to b)."""
    if text.startswith("geometric:"):
        try:
            _, a, b, n = text.split(":")
            a, b, n = float(a), float(b), int(n)
        except ValueError:
            raise UsageError(f"bad s-list {text!r}; expected geometric:a:b:n")
        if not (0 < a < b) or n < 2:
            raise UsageError("geometric ladder needs 0 < a < b and n >= 2")
        vals = sorted({round(a * (b / a) ** (i / (n - 1))) for i in range(n)})
        return [v for v in vals if v > 0]
    return [Fraction(x) if "/" in x else int(x) for x in text.split(",") if x]


def _form(text):
    try:
        return Form.parse(text)
    except ValueError as e:
        raise UsageError(str(e))


def _alpha(text):
    try:
        return QuadIrr.parse(text)
    except ValueError as e:
        raise UsageError(str(e))


def _s(text):
    v = Fraction(text)
    if v <= 0:
        raise UsageError("s must be > 0")
    return v


def _int_s(v: Fraction) -> int:
    if v.denominator != 1:
        raise UsageError("representation counts need an integer s")
    return int(v)


def _group(text):
    try:
        return GroupSpec.parse(text)
    except ValueError as e:
        raise UsageError(str(e))


# -- subcommands -------------------------------------------------------------


def cmd_pell(a, out):
    sol = fundamental_pell4(a.D) if a.p is None else pell_with_divisor(a.D, a.p)
    emit_json({"D": a.D, "t": sol.t, "u": sol.u,
               "regulator": float(regulator_bits(sol, a.precision)),
               "negative_unit": has_negative_unit(a.D)}, out)


def cmd_form(a, out):
    Q = _form(a.form)
    if a.action == "classify":
        emit_json(classify(Q), out)
    elif a.action == "reduce":
        R, g = reduce_form(Q)
        emit_json({"form": str(Q), "reduced": str(R), "matrix": list(g.tuple())}, out)
    elif a.action == "equivalent":
        if a.form2 is None:
            raise UsageError("form equivalent needs --form2")
        ok, w = equivalent(Q, _form(a.form2), witness=True)
        emit_json({"equivalent": ok, "witness": None if w is None else list(w.tuple())}, out)
    elif a.action == "automorph":
        g = fundamental_automorph(Q)
        emit_json({"form": str(Q), "automorph": list(g.tuple())}, out)
    elif a.action == "alpha":
        emit_json({"form": str(Q), "alpha": str(alpha_of(Q))}, out)


def cmd_irr(a, out):
    x = _alpha(a.alpha)
    if a.action == "cf":
        pre, per = cf_expand(x)
        emit_json({"alpha": str(x), "preperiod": pre, "period": per}, out)
    elif a.action == "h":
        num, D = x.height()
        emit_json({"alpha": str(x), "h_squared": Fraction(num * num, D), "h": x.height_float()}, out)
    elif a.action == "reciprocal":
        emit_json({"alpha": str(x), "reciprocal": is_reciprocal_irr(x)}, out)
    elif a.action == "canonical":
        emit_json({"alpha": str(canonical_mod_translation(x, a.q))}, out)


def _counter(a):
    g = _group(a.group)
    if a.kind == "reps":
        if a.form is None:
            raise UsageError("count reps needs --form")
        Q = _form(a.form)
        return (lambda s: psi(Q, _int_s(Fraction(s)), g, a.engine, a.threads)), psi_constant(Q, g)
    if a.alpha is None:
        raise UsageError("count orbit needs --alpha")
    x = _alpha(a.alpha)
    return (lambda s: orbit_count(x, g, s, a.mode, a.threads)), orbit_constant(x, g, a.mode)


def cmd_count(a, out):
    counter, const = _counter(a)
    s = _s(a.s)
    c = counter(s)
    emit_json({"kind": a.kind, "group": a.group, "s": s, "count": c,
               "ratio": c / float(s), "predicted_constant": float(const)}, out)


def cmd_asym(a, out):
    counter, const = _counter(a)
    ths = parse_s_list(a.s_list)
    series = run_series(counter, ths, predicted=float(const), provenance=f"{a.kind} {a.group}")
    rows = report(series)
    if a.format == "csv":
        emit_csv(rows, ["s", "count", "ratio", "predicted", "rel_gap"], out)
    else:
        emit_json({"kind": a.kind, "group": a.group, "rows": rows}, out)


def cmd_equi(a, out):
    Q = _form(a.form)
    r = equidistribution_demo(Q, a.t, a.samples, a.bins, a.ymax, a.seed, a.one_sided, a.threads)
    if a.format == "csv":
        rows = [{"bin_x": i, "bin_y": j, "mass_empirical": float(r["empirical"][i, j]),
                 "mass_reference": float(r["reference"][i, j])}
                for i in range(a.bins) for j in range(a.bins)]
        emit_csv(rows, ["bin_x", "bin_y", "mass_empirical", "mass_reference"], out)
    else:
        emit_json({"t": a.t, "samples": a.samples, "kept": r["kept"], "bins": a.bins,
                   "ymax": a.ymax, "seed": a.seed, "tv": r["tv"]}, out)


def cmd_bianchi(a, out):
    D = a.D
    if D not in bi.SUPPORTED:
        raise UsageError(f"unsupported D {D}")
    if a.action == "zeta":
        emit_json({"D": D, "zeta_K2": float(bi.zeta_K2(D, a.precision))}, out)
    elif a.action == "volume":
        emit_json({"D": D, "covolume": bi.humbert_covolume(D)}, out)
    elif a.action == "fib":
        g = bi.ImagQuadInt.parse(D, a.ideal)
        emit_json({"D": D, "ideal": str(g), "k": bi.fibonacci_k(g, not a.all_terms)}, out)
    elif a.action == "count":
        g = bi.ImagQuadInt.parse(D, a.ideal)
        if g.is_zero():
            raise UsageError("zero ideal")
        if a.s is None:
            raise UsageError("bianchi count needs --s")
        s = _s(a.s)
        recip = bi.is_reciprocal(D, g)
        emit_json({"D": D, "ideal": str(g), "s": s, "count": bi.bianchi_orbit_count(D, g, s),
                   "k_a": bi.fibonacci_k(g, True),
                   "predicted_constant": float(bi.predicted_constant(D, g, recip)),
                   "reciprocal_flag": recip}, out)


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--threads", type=int, default=1)

    p = argparse.ArgumentParser(prog="quadorbits", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("pell", parents=[common], help="fundamental solution of t^2 - D u^2 = 4")
    sp.add_argument("--D", type=int, required=True)
    sp.add_argument("--p", type=int, default=None, help="least solution with p | u")
    sp.add_argument("--precision", type=int, default=64, help="regulator precision in bits")
    sp.set_defaults(func=cmd_pell)

    sp = sub.add_parser("form", parents=[common], help="binary quadratic forms")
    sp.add_argument("action", choices=["classify", "reduce", "equivalent", "automorph", "alpha"])
    sp.add_argument("--form", required=True)
    sp.add_argument("--form2")
    sp.set_defaults(func=cmd_form)

    sp = sub.add_parser("irr", parents=[common], help="quadratic irrationals")
    sp.add_argument("action", choices=["cf", "h", "reciprocal", "canonical"])
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--q", type=int, default=1)
    sp.set_defaults(func=cmd_irr)

    for name, func in (("count", cmd_count), ("asym", cmd_asym)):
        sp = sub.add_parser(name, parents=[common],
                            help="exact counts" if name == "count" else "count series with ratio table")
        sp.add_argument("kind", choices=["reps", "orbit"])
        sp.add_argument("--form")
        sp.add_argument("--alpha")
        sp.add_argument("--group", default="full", help="full, principal:p or hecke0:p")
        sp.add_argument("--engine", choices=["fast", "oracle", "both"], default="fast")
        sp.add_argument("--mode", choices=["joint", "single"], default="joint")
        if name == "count":
            sp.add_argument("--s", required=True)
        else:
            sp.add_argument("--s-list", required=True, help='"a,b,c" or "geometric:a:b:n"')
        sp.set_defaults(func=func)

    sp = sub.add_parser("equi", parents=[common], help="equidistribution demo")
    sp.add_argument("--form", default="1,-1,-1")
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--samples", type=int, default=10 ** 6)
    sp.add_argument("--bins", type=int, default=20)
    sp.add_argument("--ymax", type=float, default=4.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--one-sided", action="store_true")
    sp.set_defaults(func=cmd_equi)

    sp = sub.add_parser("bianchi", parents=[common], help="orbits of phi under Bianchi groups")
    sp.add_argument("action", choices=["zeta", "volume", "fib", "count"])
    sp.add_argument("--D", type=int, required=True)
    sp.add_argument("--ideal", default="1", help='generator "a+b*w"')
    sp.add_argument("--s")
    sp.add_argument("--precision", type=int, default=30, help="decimal digits")
    sp.add_argument("--all-terms", action="store_true", help="use F_k instead of F_2k")
    sp.set_defaults(func=cmd_bianchi)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        args.func(args, out)
    except EngineDisagreement as e:
        print(f"engine disagreement: {e}", file=sys.stderr)
        return 3
    except (UsageError, ValueError, ZeroDivisionError) as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
