"""File formats: point CSVs, nodal-sequence and IFS JSON documents, reports, SVG scatter plots.

Rationals are written as ``p/q`` strings, floats as 17-significant-digit
strings, so documents round-trip exactly and are byte-stable.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Sequence, TextIO

from .ifs import AffineMap, IfsSystem, NodalSequence, SequenceEntry
from .scalars import EXACT, FLOAT, check_mode, format_scalar, infer_mode, parse_scalar
from .vandermonde import NodeSet


class FormatError(ValueError):
    """Malformed input document."""


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _scalars(xs) -> list[str]:
    return [format_scalar(x) for x in xs]


# --- point CSV -----------------------------------------------------------

def read_points_csv(source: TextIO | str, n: int | None, mode: str, with_values: bool = False):
    """Parse ``x1,...,xn[,value]`` rows. Returns ``(points, values)``; values is None unless requested."""
    check_mode(mode)
    text = source if isinstance(source, str) else source.read()
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise FormatError("empty CSV")
    header = [h.strip() for h in rows[0]]
    coord_cols = [i for i, h in enumerate(header) if h.startswith("x")]
    value_cols = [i for i, h in enumerate(header) if h == "value"]
    if not coord_cols:
        raise FormatError("CSV header must name coordinate columns x1,...,xn")
    if n is not None and len(coord_cols) != n:
        raise FormatError(f"CSV has {len(coord_cols)} coordinate columns, expected n = {n}")
    if with_values and len(value_cols) != 1:
        raise FormatError("CSV needs a 'value' column")
    points, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise FormatError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            points.append(tuple(parse_scalar(row[i], mode) for i in coord_cols))
            if with_values:
                values.append(parse_scalar(row[value_cols[0]], mode))
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
    if not points:
        raise FormatError("CSV has no data rows")
    return points, (values if with_values else None)


def points_csv(points: Sequence[Sequence], values: Sequence | None = None) -> str:
    n = len(points[0])
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f"x{i}" for i in range(1, n + 1)] + (["value"] if values is not None else []))
    for i, p in enumerate(points):
        w.writerow(_scalars(p) + ([format_scalar(values[i])] if values is not None else []))
    return out.getvalue()


# --- nodal sequences -----------------------------------------------------

def sequence_to_dict(seq: NodalSequence, **extra) -> dict:
    doc = {"n": seq.n, "d": seq.d, "mode": seq.mode}
    doc.update(extra)
    entries = []
    for e in seq:
        item = {
            "k": e.k,
            "r": format_scalar(e.radius),
            "center": _scalars(e.center),
            "points": [_scalars(p) for p in e.nodes.points],
        }
        if e.values is not None:
            item["values"] = _scalars(e.values)
        entries.append(item)
    doc["entries"] = entries
    return doc


def sequence_from_dict(doc: dict, mode: str | None = None) -> NodalSequence:
    """Inverse of ``sequence_to_dict``. ``center`` must be one of ``points``."""
    try:
        mode = check_mode(mode or doc.get("mode", EXACT))
        n = int(doc["n"])
        d = doc.get("d")
        d = int(d) if d is not None else None
        entries = []
        for item in doc["entries"]:
            pts = tuple(tuple(parse_scalar(x, mode) for x in p) for p in item["points"])
            if any(len(p) != n for p in pts):
                raise FormatError(f"entry k={item.get('k')}: point dimension differs from n = {n}")
            center = tuple(parse_scalar(x, mode) for x in item["center"])
            if center not in pts:
                raise FormatError(f"entry k={item.get('k')}: center is not one of the points")
            r = parse_scalar(item["r"], mode)
            nodes = NodeSet(pts, pts.index(center), r, mode)
            vals = item.get("values")
            vals = tuple(parse_scalar(v, mode) for v in vals) if vals is not None else None
            entries.append(SequenceEntry(int(item["k"]), nodes, vals))
        return NodalSequence(tuple(entries), d)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"malformed nodal sequence document: {exc}") from None


# --- IFS specs -----------------------------------------------------------

def ifs_to_dict(system: IfsSystem) -> dict:
    return {
        "n": system.n,
        "maps": [
            {"linear": [format_scalar(x) for row in m.linear for x in row], "translation": _scalars(m.translation)}
            for m in system.maps
        ],
    }


def ifs_from_dict(doc: dict, mode: str | None = None) -> IfsSystem:
    """``linear`` may be row-major flat (n*n entries) or nested rows."""
    try:
        n = int(doc["n"])
        raw = []
        for m in doc["maps"]:
            lin = m["linear"]
            if lin and isinstance(lin[0], list):
                lin = [x for row in lin for x in row]
            if len(lin) != n * n or len(m["translation"]) != n:
                raise FormatError(f"map needs {n * n} linear entries and {n} translation entries")
            raw.append((lin, m["translation"]))
        if mode is None:
            mode = EXACT if all(_is_rational_token(x) for lin, t in raw for x in list(lin) + list(t)) else FLOAT
        maps = []
        for lin, t in raw:
            vals = [parse_scalar(x, mode) for x in lin]
            maps.append(AffineMap([vals[i * n:(i + 1) * n] for i in range(n)], [parse_scalar(x, mode) for x in t], mode))
        return IfsSystem(tuple(maps), doc.get("name", ""))
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"malformed IFS document: {exc}") from None


def _is_rational_token(x) -> bool:
    if isinstance(x, bool):
        return False
    if isinstance(x, int):
        return True
    if isinstance(x, str):
        s = x.strip().lower()
        return not any(c in s for c in "e.n") or ("/" in s)
    return False


# --- plots ---------------------------------------------------------------

def svg_scatter(points: Iterable[Sequence], size: int = 400, radius: float = 1.5) -> str:
    """Static scatter of the first two coordinates (1D points drawn on a line)."""
    pts = [(float(p[0]), float(p[1]) if len(p) > 1 else 0.0) for p in points]
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    span = max(x1 - x0, y1 - y0) or 1.0
    pad = 10
    scale = (size - 2 * pad) / span
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for x, y in pts:
        cx = pad + (x - x0) * scale
        cy = size - pad - (y - y0) * scale
        lines.append(f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="{radius}" fill="black"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
