"""CSV, manifest and SVG output.

Every CSV starts with one ``# params:`` comment line echoing the run
configuration, then a header row. Floats are written with 17 significant digits
so identical runs give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

MANIFEST = "manifest.txt"


def fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return "%.17g" % value
    if hasattr(value, "dtype"):  # numpy scalar
        return fmt(value.item())
    return str(value)


def params_comment(params: dict) -> str:
    return "# params: " + json.dumps({k: params[k] for k in params}, default=fmt,
                                     separators=(",", ":"))


def render_csv(columns: Sequence[str], rows: Iterable[Sequence], params: dict) -> str:
    buf = io.StringIO()
    buf.write(params_comment(params) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} fields, header has {len(columns)}")
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, columns, rows, params: dict) -> Path:
    path = Path(path)
    path.write_text(render_csv(columns, list(rows), params), encoding="utf-8")
    return path


def read_csv(path) -> tuple[dict, list[str], list[list[str]]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("# params: "):
        raise ValueError(f"{path} lacks the params comment line")
    params = json.loads(lines[0][len("# params: "):])
    reader = list(csv.reader(lines[1:]))
    return params, reader[0], reader[1:]


def append_manifest(out_dir, filename: str, target: str) -> None:
    path = Path(out_dir) / MANIFEST
    existing = path.read_text(encoding="utf-8").splitlines() if path.exists() else []
    line = f"{filename}: {target}"
    if line not in existing:
        existing.append(line)
    path.write_text("\n".join(existing) + "\n", encoding="utf-8")


def write_svg(path, curves: dict[str, tuple[Sequence[float], Sequence[float]]],
              xlabel: str = "", ylabel: str = "", width: int = 640, height: int = 400) -> Path:
    """Self-contained line plot; one polyline per named curve."""
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    xs = [float(x) for xy in curves.values() for x in xy[0] if math.isfinite(float(x))]
    ys = [float(y) for xy in curves.values() for y in xy[1] if math.isfinite(float(y))]
    if not xs or not ys:
        raise ValueError("nothing to plot")
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1
    m = 50

    def sx(x):
        return m + (x - x0) / (x1 - x0) * (width - 2 * m)

    def sy(y):
        return height - m - (y - y0) / (y1 - y0) * (height - 2 * m)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect x="{m}" y="{m}" width="{width - 2 * m}" height="{height - 2 * m}" '
             'fill="none" stroke="black"/>',
             f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle">{xlabel}</text>',
             f'<text x="15" y="{height / 2}" transform="rotate(-90 15 {height / 2})" '
             f'text-anchor="middle">{ylabel}</text>',
             f'<text x="{m}" y="{height - m + 15}" font-size="10">{x0:.4g}</text>',
             f'<text x="{width - m}" y="{height - m + 15}" font-size="10" '
             f'text-anchor="end">{x1:.4g}</text>',
             f'<text x="{m - 5}" y="{height - m}" font-size="10" text-anchor="end">{y0:.4g}</text>',
             f'<text x="{m - 5}" y="{m + 10}" font-size="10" text-anchor="end">{y1:.4g}</text>']
    for i, (name, (x, y)) in enumerate(curves.items()):
        pts = " ".join(f"{sx(float(a)):.2f},{sy(float(b)):.2f}" for a, b in zip(x, y)
                       if math.isfinite(float(a)) and math.isfinite(float(b)))
        color = palette[i % len(palette)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        parts.append(f'<text x="{width - m + 5}" y="{m + 15 * (i + 1)}" font-size="10" '
                     f'fill="{color}">{name}</text>')
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return path
