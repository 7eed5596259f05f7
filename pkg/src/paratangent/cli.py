"""Command-line front end.

Usage:
    paratangent fractal cantor --depth 2                      # Williams points as CSV
    paratangent fractal sierpinski --word 1 --base vertices --iters 4 --out seq.json
    paratangent fullness seq.json --threshold 1e-6            # exit 0 iff satisfied
    paratangent flatness seq.json --function "x^2" --p 3/2 --d 2 --e 3
    paratangent interp nodes.csv --n 1 --d 2
    paratangent hdeg points.csv --n 2 --bound 3
    paratangent jet nodes.csv --n 1 --d 2

Exit codes: 0 positive verdict / success, 1 negative or inconclusive
verdict, 2 input or usage error, 3 output error.
"""

from __future__ import annotations

import json
import os
import sys
from fractions import Fraction

import click

from . import analysis, formats
from .expressions import ExpressionError, compile_function
from .ifs import CATALOG_NAMES, AffineMap, IfsSystem, catalog, iterate_word, williams_points
from .multiindex import enumerate_indices
from .nodesets import SelectionFailure, UnisolvenceError, hdeg, interpolate, select_unisolvent
from .scalars import EXACT, FLOAT, format_scalar, parse_scalar
from .vandermonde import NodeSet

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3


class InputError(Exception):
    pass


def _fail(message: str, code: int = EXIT_INPUT):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        _fail(f"cannot write {out}: {exc}", EXIT_IO)


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _run(body):
    """Map library and format errors onto exit code 2."""
    try:
        return body()
    except (InputError, ValueError, ZeroDivisionError, json.JSONDecodeError, KeyError, TypeError) as exc:
        _fail(str(exc))


def _load_sequence(path: str, mode: str):
    text = _read_text(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path} is not a nodal sequence document")
    return formats.sequence_from_dict(doc, mode if "mode" not in doc else doc["mode"])


def _system(name: str, mode: str) -> IfsSystem:
    if name.lower() in CATALOG_NAMES:
        system = catalog(name)
    elif os.path.exists(name):
        try:
            doc = json.loads(_read_text(name))
        except json.JSONDecodeError as exc:
            raise InputError(f"{name} is not valid JSON: {exc}") from None
        system = formats.ifs_from_dict(doc)
    else:
        raise InputError(f"unknown fractal {name!r}: not one of {', '.join(CATALOG_NAMES)} and not a spec file")
    if mode == FLOAT and system.mode == EXACT:
        system = IfsSystem(tuple(AffineMap(m.linear, m.translation, FLOAT) for m in system.maps), system.name)
    return system


def _polynomial_doc(kind: str, n: int, d: int, coefficients, mode: str, **extra) -> dict:
    doc = {"kind": kind, "mode": mode, "n": n, "d": d}
    doc.update(extra)
    doc["indices"] = [list(p.exponents) for p in enumerate_indices(n, d)]
    doc["coefficients"] = [format_scalar(c) for c in coefficients]
    return doc


@click.group()
@click.option(
    "--mode",
    type=click.Choice([EXACT, FLOAT]),
    default=EXACT,
    envvar="PARATANGENT_MODE",
    show_default=True,
    help="Scalar field: exact rationals or doubles.",
)
@click.pass_context
def main(ctx, mode):
    """Vandermonde-based fullness and flatness diagnostics."""
    ctx.obj = {"mode": mode}


@main.command()
@click.argument("name")
@click.option("--depth", type=click.IntRange(min=1), default=3, show_default=True, help="Williams word length.")
@click.option("--word", default=None, help="Comma-separated 1-based map indices; emits a nodal sequence.")
@click.option("--base", default="vertices", show_default=True, help="'vertices', 'williams:Q' or a points CSV.")
@click.option("--iters", "K", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--d", "d", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--out", default=None, help="Output path (default: stdout).")
@click.option("--plot", default=None, help="Also write an SVG scatter of the points.")
@click.pass_obj
def fractal(obj, name, depth, word, base, K, d, out, plot):
    """Williams points of a fractal, or a nodal sequence accumulating at a fixed point."""
    mode = obj["mode"]

    def body():
        system = _system(name, mode)
        if word is None:
            pts = williams_points(system, depth)
            return formats.points_csv(pts), pts
        try:
            w = [int(t) for t in word.split(",") if t.strip()]
        except ValueError:
            raise InputError(f"bad word {word!r}; expected comma-separated integers") from None
        if base == "vertices" or base.startswith("williams:"):
            q = 1 if base == "vertices" else int(base.split(":", 1)[1])
            candidates = williams_points(system, q)
        else:
            candidates, _ = formats.read_points_csv(_read_text(base), system.n, system.mode)
        chosen = select_unisolvent(candidates, system.n, d)
        if isinstance(chosen, SelectionFailure):
            raise InputError(
                f"no unisolvent base for d={d}: candidate points reach rank {chosen.rank} of {chosen.required}"
            )
        seq = iterate_word(system, w, chosen, K, d)
        doc = formats.sequence_to_dict(seq, fractal=system.name or name, word=w)
        return formats.dumps(doc), [p for e in seq for p in e.nodes.points]

    text, pts = _run(body)
    _emit(text, out)
    if plot:
        _emit(formats.svg_scatter(pts), plot)


@main.command()
@click.argument("sequence")
@click.option("--d", "d", type=click.IntRange(min=1), default=None, help="Degree (default: from the document).")
@click.option("--threshold", type=click.FloatRange(min=0, min_open=True), default=1e-6, show_default=True)
@click.option("--out", default=None)
@click.pass_obj
def fullness(obj, sequence, d, threshold, out):
    """Check the determinant lower bound on a nodal sequence; exit 0 iff satisfied."""

    def body():
        seq = _load_sequence(sequence, obj["mode"])
        deg = d if d is not None else seq.d
        if deg is None:
            raise InputError("degree unknown: pass --d or set 'd' in the document")
        return analysis.check_fullness(seq, deg, threshold)

    report = _run(body)
    _emit(formats.dumps(report.to_dict()), out)
    sys.exit(EXIT_OK if report.verdict == analysis.SATISFIED else EXIT_NEGATIVE)


@main.command()
@click.argument("sequence")
@click.option("--values", "values_path", default=None, help="JSON list of per-k value lists.")
@click.option("--function", "function", default=None, help="Builtin function, e.g. 'x^2' or 'sin(x1)*x2'.")
@click.option("--p", "p", required=True, help="Flatness exponent p (rational or decimal).")
@click.option("--d", "d", type=click.IntRange(min=1), required=True)
@click.option("--e", "e", default=None, help="Determinant decay exponent (default: fitted).")
@click.option("--threshold", type=click.FloatRange(min=0, min_open=True), default=1e-6, show_default=True)
@click.option("--out", default=None)
@click.pass_obj
def flatness(obj, sequence, values_path, function, p, d, e, threshold, out):
    """Flatness order of a function at the limit point; exit 0 on a flat verdict."""
    mode = obj["mode"]

    def body():
        seq = _load_sequence(sequence, mode)
        if values_path and function:
            raise InputError("give either --values or --function, not both")
        if function:
            try:
                f = compile_function(function, seq.n, seq.mode)
                values = [[f(x) for x in entry.nodes.points] for entry in seq]
            except ExpressionError:
                raise
            except (ArithmeticError, ValueError) as exc:
                raise InputError(f"evaluating {function!r} failed: {exc}") from None
        elif values_path:
            raw = json.loads(_read_text(values_path))
            if isinstance(raw, dict):
                raw = raw["values"]
            values = [[parse_scalar(v, seq.mode) for v in row] for row in raw]
        else:
            values = None
        p_val = parse_scalar(p, EXACT)
        e_val = parse_scalar(e, EXACT) if e is not None else None
        return analysis.flatness_order(seq, values, p_val, d, e_val, threshold)

    report = _run(body)
    _emit(formats.dumps(report.to_dict()), out)
    sys.exit(EXIT_OK if report.flat_order is not None else EXIT_NEGATIVE)


@main.command()
@click.argument("points")
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@click.option("--d", "d", type=click.IntRange(min=1), required=True)
@click.option("--out", default=None)
@click.pass_obj
def interp(obj, points, n, d, out):
    """Interpolating polynomial through CSV rows x1..xn,value."""
    mode = obj["mode"]

    def body():
        pts, vals = formats.read_points_csv(_read_text(points), n, mode, with_values=True)
        try:
            poly = interpolate(NodeSet(tuple(pts), mode=mode), vals, d)
        except UnisolvenceError as exc:
            raise InputError(f"{exc} (determinant {format_scalar(exc.determinant)})") from None
        return _polynomial_doc("interpolant", n, d, poly.coefficients, mode)

    _emit(formats.dumps(_run(body)), out)


@main.command("hdeg")
@click.argument("points")
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@click.option("--bound", type=click.IntRange(min=1), required=True)
@click.option("--out", default=None)
@click.pass_obj
def hdeg_cmd(obj, points, n, bound, out):
    """Least degree of a nonzero polynomial vanishing on the CSV points (up to --bound)."""
    mode = obj["mode"]

    def body():
        pts, _ = formats.read_points_csv(_read_text(points), n, mode)
        res = hdeg(pts, bound, mode)
        doc = {"kind": "hdeg", "mode": mode, "n": n, "bound": bound}
        doc["value"] = res.value if res.value is not None else "exceeds bound"
        doc["witness"] = (
            _polynomial_doc("polynomial", n, res.witness.d, res.witness.coefficients, mode) if res.witness else None
        )
        return doc

    _emit(formats.dumps(_run(body)), out)


@main.command()
@click.argument("points")
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@click.option("--d", "d", type=click.IntRange(min=1), required=True)
@click.option("--out", default=None)
@click.pass_obj
def jet(obj, points, n, d, out):
    """Taylor-coefficient estimate at the first CSV row from values at all rows."""
    mode = obj["mode"]

    def body():
        pts, vals = formats.read_points_csv(_read_text(points), n, mode, with_values=True)
        try:
            est = analysis.estimate_jet(NodeSet(tuple(pts), mode=mode), vals, d)
        except UnisolvenceError as exc:
            raise InputError(f"{exc} (determinant {format_scalar(exc.determinant)})") from None
        doc = est.to_dict()
        doc["mode"] = mode
        return doc

    _emit(formats.dumps(_run(body)), out)


if __name__ == "__main__":
    main()
